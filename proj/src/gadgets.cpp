#include "knightian/gadgets.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

#include "knightian/freestate.hpp"

namespace knightian::gadgets {

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational parse_rational(const std::string& s) {
  auto bad = [&] { return ValidationError("BadRational", "cannot read '" + s + "' as a rational"); };
  auto parse_int = [&](const std::string& t) -> std::int64_t {
    if (t.empty()) throw bad();
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(t, &used);
    } catch (const std::exception&) {
      throw bad();
    }
    if (used != t.size()) throw bad();
    return v;
  };
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    const auto den = parse_int(s.substr(slash + 1));
    if (den == 0) throw bad();
    return Rational(parse_int(s.substr(0, slash)), den);
  }
  const auto dot = s.find('.');
  if (dot == std::string::npos) return Rational(parse_int(s));
  std::string frac = s.substr(dot + 1);
  if (frac.empty() || frac.size() > 15 || frac.find_first_not_of("0123456789") != std::string::npos) throw bad();
  std::string whole = s.substr(0, dot);
  const bool negative = !whole.empty() && whole[0] == '-';
  if (whole.empty() || whole == "-" || whole == "+") whole += "0";
  std::int64_t scale = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
  const std::int64_t w = parse_int(whole);
  const std::int64_t f = parse_int(frac);
  return Rational(w * scale + (negative ? -f : f), scale);
}

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

Rational chsh_classical_value(const ClassicalStrategy& s) {
  int wins = 0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      if ((s.alice[x] ^ s.bob[y]) == (x & y)) ++wins;
    }
  }
  return Rational(wins, 4);
}

ChshClassicalResult chsh_classical_optimum() {
  ChshClassicalResult r;
  for (int code = 0; code < 16; ++code) {
    ClassicalStrategy s;
    s.alice = {static_cast<std::uint8_t>((code >> 3) & 1), static_cast<std::uint8_t>((code >> 2) & 1)};
    s.bob = {static_cast<std::uint8_t>((code >> 1) & 1), static_cast<std::uint8_t>(code & 1)};
    const Rational v = chsh_classical_value(s);
    if (code == 0 || v > r.value) {
      r.value = v;
      r.witness = s;
    }
    if (code == 0 || v < r.minimum) r.minimum = v;
    r.table.push_back({s, v});
  }
  return r;
}

QuantumStrategy chsh_optimal_angles() {
  const double pi = std::acos(-1.0);
  return {{0.0, pi / 4.0}, {pi / 8.0, -pi / 8.0}};
}

double chsh_quantum_value(const QuantumStrategy& s) {
  using namespace freestate;
  for (double a : {s.alice[0], s.alice[1], s.bob[0], s.bob[1]}) {
    if (!std::isfinite(a)) throw ValidationError("BadAngle", "measurement angles must be finite");
  }
  Vector bell = Vector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  const Freestate shared({DensityMatrix::from_pure(PureState::make(bell))});
  const Matrix id = Matrix::Identity(2, 2);
  auto outcome_effect = [&](double theta, int outcome) -> Matrix {
    const Matrix p0 = Effect::projector(states::real_qubit(theta)).matrix();
    return outcome == 0 ? p0 : Matrix(id - p0);
  };
  double total = 0.0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      for (int a = 0; a < 2; ++a) {
        const int b = a ^ (x & y);
        const Effect e = Effect::validate(kron(outcome_effect(s.alice[x], a), outcome_effect(s.bob[y], b)));
        total += effect_interval(shared, e).lo;
      }
    }
  }
  return total / 4.0;
}

const char* rule_name(CountingRule r) {
  return r == CountingRule::CopyWeighted ? "copy-weighted" : "branch-weighted";
}

void RoomPuzzle::validate() const {
  if (prior_heads < 0 || prior_heads > 1) throw ValidationError("BadPuzzle", "prior_heads must lie in [0, 1]");
  for (const auto* rooms : {&heads_rooms, &tails_rooms}) {
    if (rooms->empty()) throw ValidationError("BadPuzzle", "each branch needs at least one copy");
    for (const auto& [color, n] : *rooms) {
      if (n <= 0) throw ValidationError("BadPuzzle", "copy count for '" + color + "' must be positive");
    }
  }
}

namespace {

Rational likelihood(const std::map<std::string, std::int64_t>& rooms, const std::string& color, CountingRule rule) {
  std::int64_t total = 0;
  for (const auto& [c, n] : rooms) total += n;
  const auto it = rooms.find(color);
  const std::int64_t matching = it == rooms.end() ? 0 : it->second;
  if (rule == CountingRule::BranchWeighted) return Rational(matching > 0 ? 1 : 0);
  return Rational(matching, total);
}

}  // namespace

RoomPosterior bostrom_posterior(const RoomPuzzle& p, CountingRule rule) {
  p.validate();
  const Rational h = p.prior_heads * likelihood(p.heads_rooms, p.observed, rule);
  const Rational t = (Rational(1) - p.prior_heads) * likelihood(p.tails_rooms, p.observed, rule);
  if (!p.heads_rooms.count(p.observed) && !p.tails_rooms.count(p.observed)) throw NoMatchingRoom(p.observed);
  if (h + t == Rational(0))
    throw ValidationError("ZeroEvidence", "the observation has probability zero under the prior");
  return {h / (h + t), t / (h + t)};
}

RoomPuzzle bostrom_variant1() {
  RoomPuzzle p;
  p.heads_rooms = {{"white", 1000}};
  p.tails_rooms = {{"white", 1}};
  p.observed = "white";
  return p;
}

RoomPuzzle bostrom_variant2() {
  RoomPuzzle p;
  p.heads_rooms = {{"blue", 999}, {"white", 1}};
  p.tails_rooms = {{"white", 1}};
  p.observed = "white";
  return p;
}

Rational newcomb_expected(const NewcombPayoffs& pay, const Rational& accuracy, BoxPolicy policy) {
  if (accuracy < 0 || accuracy > 1) throw ValidationError("BadAccuracy", "accuracy must lie in [0, 1]");
  if (policy == BoxPolicy::OneBox) return accuracy * pay.big;
  return (Rational(1) - accuracy) * pay.big + pay.small;
}

Rational newcomb_crossover(const NewcombPayoffs& pay) {
  if (pay.big <= 0) throw ValidationError("BadPayoffs", "the opaque box payoff must be positive");
  // acc * big = (1 - acc) * big + small
  return (pay.big + pay.small) / (Rational(2) * pay.big);
}

namespace {

struct Indexed {
  std::vector<std::size_t> cause;
  std::vector<std::size_t> effect;
};

Indexed index_graph(const CausalGraph& g) {
  std::unordered_map<std::string, std::size_t> at;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (!at.emplace(g.nodes[i].id, i).second) throw MalformedGraph("duplicate node id '" + g.nodes[i].id + "'");
  }
  Indexed ix;
  for (const auto& e : g.edges) {
    const auto c = at.find(e.cause);
    const auto f = at.find(e.effect);
    if (c == at.end()) throw MalformedGraph("edge cause '" + e.cause + "' is not a node");
    if (f == at.end()) throw MalformedGraph("edge effect '" + e.effect + "' is not a node");
    ix.cause.push_back(c->second);
    ix.effect.push_back(f->second);
  }
  return ix;
}

std::string edge_text(const CausalEdge& e) { return e.cause + " -> " + e.effect; }

}  // namespace

std::vector<Violation> causal_validate(const CausalGraph& g, const CausalOptions& opts) {
  const Indexed ix = index_graph(g);
  std::vector<Violation> out;
  const std::size_t n = g.nodes.size();
  std::vector<std::size_t> incident(n, 0);
  std::vector<bool> hit_backward(n, false);
  std::vector<std::size_t> macro_out(n, 0);

  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const Node& c = g.nodes[ix.cause[k]];
    const Node& f = g.nodes[ix.effect[k]];
    const bool backward = c.time >= f.time;
    // A self-loop is incident once as cause and once as effect.
    ++incident[ix.cause[k]];
    ++incident[ix.effect[k]];
    if (backward) {
      if (f.kind == FactKind::Macro) {
        out.push_back({"R1", "backward edge " + edge_text(g.edges[k]) + " ends in a macrofact"});
      } else {
        hit_backward[ix.effect[k]] = true;
      }
    }
    if (c.kind == FactKind::Micro && f.kind == FactKind::Macro) ++macro_out[ix.cause[k]];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (hit_backward[i] && incident[i] != 1) {
      out.push_back({"R2", "microfact '" + g.nodes[i].id + "' is caused from its future and has " +
                               std::to_string(incident[i] - 1) + " other incident edge(s)"});
    }
    if (opts.check_r3 && g.nodes[i].kind == FactKind::Micro && macro_out[i] > 1) {
      out.push_back({"R3", "microfact '" + g.nodes[i].id + "' causes " + std::to_string(macro_out[i]) +
                               " macrofacts"});
    }
  }
  return out;
}

bool acyclicity_check(const CausalGraph& g) {
  const Indexed ix = index_graph(g);
  const std::size_t n = g.nodes.size();
  std::vector<std::vector<std::size_t>> adj(n);
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t k = 0; k < ix.cause.size(); ++k) {
    adj[ix.cause[k]].push_back(ix.effect[k]);
    ++indegree[ix.effect[k]];
  }
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push_back(i);
  }
  std::size_t removed = 0;
  while (!ready.empty()) {
    const auto v = ready.back();
    ready.pop_back();
    ++removed;
    for (auto w : adj[v]) {
      if (--indegree[w] == 0) ready.push_back(w);
    }
  }
  return removed == n;
}

CausalGraph random_causal_graph(std::mt19937_64& rng, const RandomGraphParams& params) {
  auto below = [&](std::uint64_t n) { return static_cast<std::size_t>(rng() % n); };
  auto chance = [&](double p) { return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p; };
  CausalGraph g;
  const std::size_t n = 1 + below(params.max_nodes);
  for (std::size_t i = 0; i < n; ++i) {
    g.nodes.push_back({"n" + std::to_string(i), chance(params.micro_fraction) ? FactKind::Micro : FactKind::Macro,
                       static_cast<std::int64_t>(below(static_cast<std::uint64_t>(params.max_time) + 1))});
  }
  const std::size_t m = below(2 * n + 1);
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t c = below(n);
    std::size_t f = below(n);
    if (chance(params.forward_bias) && g.nodes[c].time > g.nodes[f].time) std::swap(c, f);
    g.edges.push_back({g.nodes[c].id, g.nodes[f].id});
  }
  return g;
}

}  // namespace knightian::gadgets
