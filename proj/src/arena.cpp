#include "knightian/arena.hpp"

#include <algorithm>
#include <array>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <map>
#include <set>

namespace knightian::arena {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = splitmix64(seed);
  for (auto p : parts) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

// Uniform double in [0, 1) from the top 53 bits; spelled out so draws do not
// depend on the standard library's distribution implementations.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint8_t bernoulli(std::mt19937_64& rng, double p) { return uniform01(rng) < p ? 1 : 0; }

[[noreturn]] void bad_subject(const std::string& name, const std::string& why) {
  throw ValidationError("BadSubject", name + ": " + why);
}

void suffix_dfs(const Subject& s, std::uint32_t state, const Bits& inputs, std::size_t k, std::size_t idx,
                double prob, const FreebitAssignment& assignment, SuffixDistribution& out) {
  if (k == inputs.size()) {
    out[idx] += prob;
    return;
  }
  const Group& g = s.group(state, inputs[k]);
  if (g.type == GroupType::Freebit) {
    const Branch& b = g.branches[assignment[g.freebit_index]];
    suffix_dfs(s, b.to, inputs, k + 1, (idx << 1) | b.emit, prob, assignment, out);
    return;
  }
  for (const Branch& b : g.branches) {
    suffix_dfs(s, b.to, inputs, k + 1, (idx << 1) | b.emit, prob * b.prob, assignment, out);
  }
}

void check_assignment(const Subject& s, const FreebitAssignment& a) {
  if (a.size() != s.freebit_budget()) {
    throw ValidationError("BadAssignment", "assignment has " + std::to_string(a.size()) +
                                               " values for a budget of " + std::to_string(s.freebit_budget()));
  }
  for (auto v : a) {
    if (v > 1) throw ValidationError("BadAssignment", "freebit values must be 0 or 1");
  }
}

void check_horizon(std::size_t h) {
  if (h > kMaxHorizon) throw HorizonTooLong(h);
}

void forecast_dfs(const Forecast& f, const Bits& inputs, Bits& behaviors, std::size_t idx, double prob,
                  SuffixDistribution& out) {
  const std::size_t k = behaviors.size();
  if (k == inputs.size()) {
    out[idx] += prob;
    return;
  }
  const double p1 = f.prob_one(k, inputs, behaviors);
  if (!(p1 >= 0.0 && p1 <= 1.0)) {
    throw ValidationError("BadForecast", "probability " + std::to_string(p1) + " outside [0, 1]");
  }
  for (std::uint8_t b = 0; b < 2; ++b) {
    behaviors.push_back(b);
    forecast_dfs(f, inputs, behaviors, (idx << 1) | b, prob * (b ? p1 : 1.0 - p1), out);
    behaviors.pop_back();
  }
}

// ---- predictors ----

class ConstantForecast : public Forecast {
 public:
  explicit ConstantForecast(double p) : p_(p) {}
  double prob_one(std::size_t, const Bits&, const Bits&) const override { return p_; }

 private:
  double p_;
};

class ConstantPredictor : public Predictor {
 public:
  explicit ConstantPredictor(double p) : p_(p) {}
  void observe(std::uint8_t, std::uint8_t) override {}
  std::unique_ptr<Forecast> emit_forecast() const override { return std::make_unique<ConstantForecast>(p_); }

 private:
  double p_;
};

// Context key: `window` input digits (newest first, current input included)
// then `window` behavior digits (newest first), base 3 with 2 = before time 0.
using Counts = std::map<std::uint64_t, std::array<std::uint32_t, 2>>;

std::uint64_t context_key(std::size_t window, const Bits& in_hist, const Bits& in_new, std::size_t in_len,
                          const Bits& b_hist, const Bits& b_new, std::size_t b_len) {
  // in_len inputs are visible: all of in_hist then in_new[0, in_len - |in_hist|).
  auto input_at = [&](std::size_t pos) -> std::uint64_t {
    return pos < in_hist.size() ? in_hist[pos] : in_new[pos - in_hist.size()];
  };
  auto behavior_at = [&](std::size_t pos) -> std::uint64_t {
    return pos < b_hist.size() ? b_hist[pos] : b_new[pos - b_hist.size()];
  };
  std::uint64_t key = 0;
  for (std::size_t j = 0; j < window; ++j) key = key * 3 + (j < in_len ? input_at(in_len - 1 - j) : 2);
  for (std::size_t j = 0; j < window; ++j) key = key * 3 + (j < b_len ? behavior_at(b_len - 1 - j) : 2);
  return key;
}

class TableForecast : public Forecast {
 public:
  TableForecast(std::size_t window, std::shared_ptr<const Counts> counts, Bits in_hist, Bits b_hist)
      : window_(window), counts_(std::move(counts)), in_hist_(std::move(in_hist)), b_hist_(std::move(b_hist)) {}

  double prob_one(std::size_t k, const Bits& inputs, const Bits& behaviors) const override {
    const auto key = context_key(window_, in_hist_, inputs, in_hist_.size() + k + 1, b_hist_, behaviors,
                                 b_hist_.size() + k);
    auto it = counts_->find(key);
    if (it == counts_->end()) return 0.5;
    const auto [c0, c1] = it->second;
    return static_cast<double>(c1) / static_cast<double>(c0 + c1);
  }

 private:
  std::size_t window_;
  std::shared_ptr<const Counts> counts_;
  Bits in_hist_;
  Bits b_hist_;
};

class TableLearner : public Predictor {
 public:
  explicit TableLearner(std::size_t window) : window_(window), counts_(std::make_shared<Counts>()) {}

  void observe(std::uint8_t input, std::uint8_t behavior) override {
    inputs_.push_back(input);
    const Bits none;
    const auto key = context_key(window_, inputs_, none, inputs_.size(), behaviors_, none, behaviors_.size());
    (*counts_)[key][behavior] += 1;
    behaviors_.push_back(behavior);
  }

  std::unique_ptr<Forecast> emit_forecast() const override {
    const std::size_t keep_in = std::min(window_, inputs_.size());
    const std::size_t keep_b = std::min(window_, behaviors_.size());
    Bits in_tail(inputs_.end() - static_cast<std::ptrdiff_t>(keep_in), inputs_.end());
    Bits b_tail(behaviors_.end() - static_cast<std::ptrdiff_t>(keep_b), behaviors_.end());
    return std::make_unique<TableForecast>(window_, std::make_shared<const Counts>(*counts_), std::move(in_tail),
                                           std::move(b_tail));
  }

 private:
  std::size_t window_;
  std::shared_ptr<Counts> counts_;
  Bits inputs_;
  Bits behaviors_;
};

struct Family {
  std::vector<Subject> members;
  std::vector<std::size_t> offset;  // flat index of (member, 0)
  std::size_t size = 0;

  explicit Family(std::vector<Subject> m) : members(std::move(m)) {
    for (const auto& s : members) {
      offset.push_back(size);
      size += s.n_states();
    }
  }
};

double branch_weight(const Group& g, const Branch& b) { return g.type == GroupType::Freebit ? 0.5 : b.prob; }

// One filtering step; returns false if the observation had zero mass.
bool filter_step(const Family& fam, std::vector<double>& belief, std::uint8_t input, std::uint8_t behavior) {
  std::vector<double> next(fam.size, 0.0);
  for (std::size_t m = 0; m < fam.members.size(); ++m) {
    const Subject& s = fam.members[m];
    for (std::uint32_t st = 0; st < s.n_states(); ++st) {
      const double w = belief[fam.offset[m] + st];
      if (w == 0.0) continue;
      const Group& g = s.group(st, input);
      for (const Branch& b : g.branches) {
        if (b.emit == behavior) next[fam.offset[m] + b.to] += w * branch_weight(g, b);
      }
    }
  }
  double total = 0.0;
  for (double x : next) total += x;
  if (total <= 0.0) return false;
  for (double& x : next) x /= total;
  belief = std::move(next);
  return true;
}

double prob_emit_one(const Family& fam, const std::vector<double>& belief, std::uint8_t input) {
  double p = 0.0;
  for (std::size_t m = 0; m < fam.members.size(); ++m) {
    const Subject& s = fam.members[m];
    for (std::uint32_t st = 0; st < s.n_states(); ++st) {
      const double w = belief[fam.offset[m] + st];
      if (w == 0.0) continue;
      const Group& g = s.group(st, input);
      for (const Branch& b : g.branches) {
        if (b.emit == 1) p += w * branch_weight(g, b);
      }
    }
  }
  return std::clamp(p, 0.0, 1.0);
}

class BayesForecast : public Forecast {
 public:
  BayesForecast(std::shared_ptr<const Family> fam, std::vector<double> belief)
      : fam_(std::move(fam)), belief_(std::move(belief)) {}

  double prob_one(std::size_t k, const Bits& inputs, const Bits& behaviors) const override {
    std::vector<double> b = belief_;
    for (std::size_t j = 0; j < k; ++j) {
      if (!filter_step(*fam_, b, inputs[j], behaviors[j])) return 0.5;
    }
    return prob_emit_one(*fam_, b, inputs[k]);
  }

 private:
  std::shared_ptr<const Family> fam_;
  std::vector<double> belief_;
};

class BayesFamilyPredictor : public Predictor {
 public:
  explicit BayesFamilyPredictor(std::shared_ptr<const Family> fam) : fam_(std::move(fam)), belief_(fam_->size, 0.0) {
    const double w = 1.0 / static_cast<double>(fam_->members.size());
    for (std::size_t m = 0; m < fam_->members.size(); ++m) {
      belief_[fam_->offset[m] + fam_->members[m].initial_state()] += w;
    }
  }

  void observe(std::uint8_t input, std::uint8_t behavior) override {
    if (!filter_step(*fam_, belief_, input, behavior)) {
      // Nothing in the family explains the data; restart from ignorance.
      std::fill(belief_.begin(), belief_.end(), 1.0 / static_cast<double>(fam_->size));
    }
  }

  std::unique_ptr<Forecast> emit_forecast() const override {
    return std::make_unique<BayesForecast>(fam_, belief_);
  }

 private:
  std::shared_ptr<const Family> fam_;
  std::vector<double> belief_;
};

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

const char* kind_name(SubjectKind k) {
  switch (k) {
    case SubjectKind::Deterministic: return "Deterministic";
    case SubjectKind::Noisy: return "Noisy";
    case SubjectKind::Freebit: return "Freebit";
    case SubjectKind::GerbilHybrid: return "GerbilHybrid";
  }
  return "?";
}

SubjectKind parse_kind(const std::string& s) {
  for (auto k : {SubjectKind::Deterministic, SubjectKind::Noisy, SubjectKind::Freebit, SubjectKind::GerbilHybrid}) {
    if (s == kind_name(k)) return k;
  }
  throw ValidationError("BadSubject", "unknown kind '" + s + "'");
}

Subject Subject::make(std::string name, SubjectKind kind, std::uint32_t n_states, std::uint32_t initial,
                      std::vector<Edge> edges, std::uint32_t freebit_budget) {
  if (n_states == 0) bad_subject(name, "no states");
  if (initial >= n_states) bad_subject(name, "initial state out of range");

  std::vector<std::vector<const Edge*>> by_group(static_cast<std::size_t>(n_states) * 2);
  for (const Edge& e : edges) {
    if (e.from >= n_states || e.to >= n_states) bad_subject(name, "edge endpoint out of range");
    if (e.on_input > 1 || e.emit > 1) bad_subject(name, "edge bits must be 0 or 1");
    by_group[e.from * 2 + e.on_input].push_back(&e);
  }

  Subject s;
  s.name_ = std::move(name);
  s.kind_ = kind;
  s.n_states_ = n_states;
  s.initial_ = initial;
  s.budget_ = freebit_budget;
  s.groups_.resize(by_group.size());

  std::map<std::uint32_t, std::uint32_t> freebit_state;
  for (std::uint32_t st = 0; st < n_states; ++st) {
    for (std::uint8_t in = 0; in < 2; ++in) {
      const auto& es = by_group[st * 2 + in];
      const std::string where = "state " + std::to_string(st) + " input " + std::to_string(in);
      if (es.empty()) bad_subject(s.name_, "no transition for " + where);
      Group& g = s.groups_[st * 2 + in];
      const bool any_fb = std::any_of(es.begin(), es.end(), [](const Edge* e) { return e->freebit_index.has_value(); });
      const bool any_prob = std::any_of(es.begin(), es.end(), [](const Edge* e) { return e->prob.has_value(); });
      if (any_fb) {
        if (any_prob) bad_subject(s.name_, "freebit and probabilistic branches mixed at " + where);
        if (es.size() != 2) bad_subject(s.name_, "freebit group at " + where + " needs exactly two edges");
        g.type = GroupType::Freebit;
        g.branches.resize(2);
        std::array<bool, 2> seen{false, false};
        for (const Edge* e : es) {
          if (!e->freebit_index || !e->freebit_value || *e->freebit_value > 1) {
            bad_subject(s.name_, "freebit edge at " + where + " needs freebit_index and freebit_value 0/1");
          }
          if (*e->freebit_index != *es[0]->freebit_index) bad_subject(s.name_, "mixed freebit indices at " + where);
          seen[*e->freebit_value] = true;
          g.branches[*e->freebit_value] = Branch{e->to, e->emit, 1.0};
        }
        if (!seen[0] || !seen[1]) bad_subject(s.name_, "freebit group at " + where + " must cover values 0 and 1");
        g.freebit_index = *es[0]->freebit_index;
        if (g.freebit_index >= freebit_budget) {
          bad_subject(s.name_, "freebit index " + std::to_string(g.freebit_index) + " exceeds budget");
        }
        // Both values lead to the same state: a freebit decides one behavior
        // bit and nothing downstream.
        if (g.branches[0].to != g.branches[1].to) {
          bad_subject(s.name_, "freebit branches at " + where + " must share a target state");
        }
        auto [it, fresh] = freebit_state.emplace(g.freebit_index, st);
        if (!fresh && it->second != st) {
          bad_subject(s.name_, "freebit index " + std::to_string(g.freebit_index) + " used at two states");
        }
      } else if (any_prob) {
        g.type = GroupType::Probabilistic;
        double total = 0.0;
        for (const Edge* e : es) {
          if (!e->prob || !(*e->prob >= 0.0 && *e->prob <= 1.0)) {
            bad_subject(s.name_, "probabilistic edge at " + where + " needs prob in [0, 1]");
          }
          total += *e->prob;
          g.branches.push_back(Branch{e->to, e->emit, *e->prob});
        }
        if (std::abs(total - 1.0) > 1e-12) bad_subject(s.name_, "probabilities at " + where + " do not sum to 1");
      } else {
        if (es.size() != 1) bad_subject(s.name_, "several deterministic edges at " + where);
        g.type = GroupType::Deterministic;
        g.branches.push_back(Branch{es[0]->to, es[0]->emit, 1.0});
      }
      if (g.type == GroupType::Freebit && kind != SubjectKind::Freebit && kind != SubjectKind::GerbilHybrid) {
        bad_subject(s.name_, std::string("freebit branch in a ") + kind_name(kind) + " subject");
      }
      if (g.type == GroupType::Probabilistic && kind != SubjectKind::Noisy && kind != SubjectKind::GerbilHybrid) {
        bad_subject(s.name_, std::string("probabilistic branch in a ") + kind_name(kind) + " subject");
      }
    }
  }

  // A freebit state must not lie on a cycle, so each freebit is consumed at
  // most once along any run.
  for (const auto& [index, st] : freebit_state) {
    std::vector<bool> seen(n_states, false);
    std::vector<std::uint32_t> stack;
    for (std::uint8_t in = 0; in < 2; ++in) {
      for (const Branch& b : s.group(st, in).branches) stack.push_back(b.to);
    }
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      if (v == st) bad_subject(s.name_, "freebit " + std::to_string(index) + " sits on a cycle");
      if (seen[v]) continue;
      seen[v] = true;
      for (std::uint8_t in = 0; in < 2; ++in) {
        for (const Branch& b : s.group(v, in).branches) stack.push_back(b.to);
      }
    }
  }

  s.edges_ = std::move(edges);
  return s;
}

SubjectState SubjectState::initial(const Subject& s) {
  SubjectState st;
  st.state = s.initial_state();
  st.consumed.assign(s.freebit_budget(), false);
  st.values.assign(s.freebit_budget(), 0);
  return st;
}

std::size_t SubjectState::consumed_count() const {
  return static_cast<std::size_t>(std::count(consumed.begin(), consumed.end(), true));
}

std::uint8_t step(const Subject& s, SubjectState& st, std::uint8_t input, std::mt19937_64& rng) {
  const Group& g = s.group(st.state, input);
  const Branch* taken = &g.branches.back();
  switch (g.type) {
    case GroupType::Deterministic:
      taken = &g.branches[0];
      break;
    case GroupType::Probabilistic: {
      double r = uniform01(rng);
      for (const Branch& b : g.branches) {
        if (r < b.prob) {
          taken = &b;
          break;
        }
        r -= b.prob;
      }
      break;
    }
    case GroupType::Freebit: {
      if (st.consumed[g.freebit_index]) {
        throw std::logic_error("freebit " + std::to_string(g.freebit_index) + " traversed twice");
      }
      const auto v = bernoulli(rng, 0.5);
      st.consumed[g.freebit_index] = true;
      st.values[g.freebit_index] = v;
      taken = &g.branches[v];
      break;
    }
  }
  st.state = taken->to;
  return taken->emit;
}

SuffixDistribution true_distribution(const Subject& s, const SubjectState& at_t, const Bits& future_inputs,
                                     const FreebitAssignment& assignment) {
  check_horizon(future_inputs.size());
  check_assignment(s, assignment);
  SuffixDistribution out(std::size_t{1} << future_inputs.size(), 0.0);
  suffix_dfs(s, at_t.state, future_inputs, 0, 0, 1.0, assignment, out);
  return out;
}

SuffixDistribution true_distribution(const Subject& s, const Bits& inputs, std::size_t t, std::size_t u,
                                     const FreebitAssignment& assignment) {
  if (t >= u) throw ValidationError("BadConfig", "need t < u");
  check_horizon(u - t);
  check_assignment(s, assignment);
  if (inputs.size() < u) throw ValidationError("BadInputs", "inputs must cover [0, u)");

  std::vector<double> occupancy(s.n_states(), 0.0);
  occupancy[s.initial_state()] = 1.0;
  for (std::size_t v = 0; v < t; ++v) {
    std::vector<double> next(s.n_states(), 0.0);
    for (std::uint32_t st = 0; st < s.n_states(); ++st) {
      if (occupancy[st] == 0.0) continue;
      const Group& g = s.group(st, inputs[v]);
      if (g.type == GroupType::Freebit) {
        next[g.branches[assignment[g.freebit_index]].to] += occupancy[st];
      } else {
        for (const Branch& b : g.branches) next[b.to] += occupancy[st] * b.prob;
      }
    }
    occupancy = std::move(next);
  }

  const Bits future(inputs.begin() + static_cast<std::ptrdiff_t>(t), inputs.begin() + static_cast<std::ptrdiff_t>(u));
  SuffixDistribution out(std::size_t{1} << future.size(), 0.0);
  for (std::uint32_t st = 0; st < s.n_states(); ++st) {
    if (occupancy[st] > 0.0) suffix_dfs(s, st, future, 0, 0, occupancy[st], assignment, out);
  }
  return out;
}

double variation_distance(const std::vector<double>& p, const std::vector<double>& q) {
  const std::size_t n = std::max(p.size(), q.size());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = i < p.size() ? p[i] : 0.0;
    const double b = i < q.size() ? q[i] : 0.0;
    total += std::abs(a - b);
  }
  return total / 2.0;
}

SuffixDistribution forecast_distribution(const Forecast& f, const Bits& inputs) {
  check_horizon(inputs.size());
  SuffixDistribution out(std::size_t{1} << inputs.size(), 0.0);
  Bits behaviors;
  behaviors.reserve(inputs.size());
  forecast_dfs(f, inputs, behaviors, 0, 1.0, out);
  return out;
}

void probe_causality(const Forecast& f, std::size_t horizon, std::size_t probes, std::mt19937_64& rng) {
  if (horizon < 2) return;
  for (std::size_t p = 0; p < probes; ++p) {
    const std::size_t stem = 1 + static_cast<std::size_t>(rng() % (horizon - 1));
    Bits a(horizon), b(horizon), beh(horizon);
    for (std::size_t i = 0; i < horizon; ++i) {
      a[i] = bernoulli(rng, 0.5);
      beh[i] = bernoulli(rng, 0.5);
    }
    b = a;
    b[stem] ^= 1;
    for (std::size_t i = stem + 1; i < horizon; ++i) b[i] = bernoulli(rng, 0.5);
    for (std::size_t k = 0; k < stem; ++k) {
      const Bits prefix(beh.begin(), beh.begin() + static_cast<std::ptrdiff_t>(k));
      const double pa = f.prob_one(k, a, prefix);
      const double pb = f.prob_one(k, b, prefix);
      if (pa != pb) {
        throw ForecastViolatesCausality("forecast for instant " + std::to_string(k) + " changed when inputs " +
                                        "from instant " + std::to_string(stem) + " on were altered (" +
                                        to_string(a) + " vs " + to_string(b) + ")");
      }
    }
  }
}

PredictorFactory constant_predictor(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("BadPredictor", "constant forecast outside [0, 1]");
  return {"constant(" + format_double(p) + ")", [p] { return std::make_unique<ConstantPredictor>(p); }};
}

PredictorFactory table_learner(std::size_t window) {
  if (window == 0 || window > 16) throw ValidationError("BadPredictor", "table window must be in [1, 16]");
  return {"table(" + std::to_string(window) + ")", [window] { return std::make_unique<TableLearner>(window); }};
}

PredictorFactory bayes_family_predictor(std::vector<Subject> family) {
  if (family.empty()) throw ValidationError("BadPredictor", "empty Bayes family");
  std::string name = "bayes(";
  for (std::size_t i = 0; i < family.size(); ++i) name += (i ? "," : "") + family[i].name();
  name += ")";
  auto fam = std::make_shared<const Family>(std::move(family));
  return {name, [fam] { return std::make_unique<BayesFamilyPredictor>(fam); }};
}

void GameConfig::validate() const {
  if (!(t < u)) throw ValidationError("BadConfig", "need 0 <= t < u");
  check_horizon(u - t);
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("BadConfig", "epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("BadConfig", "delta must lie in (0, 1)");
  if (trials == 0) throw ValidationError("BadConfig", "trials must be positive");
  if (!(input_p >= 0.0 && input_p <= 1.0)) throw ValidationError("BadConfig", "input_p must lie in [0, 1]");
}

AdversaryResult adversary_resolution(const Subject& s, const SubjectState& at_t, const Forecast& f,
                                     const Bits& future_inputs) {
  if (s.freebit_budget() > kMaxFreebits) throw BudgetTooLarge(s.freebit_budget());
  const auto forecast = forecast_distribution(f, future_inputs);
  std::vector<std::uint32_t> open;
  for (std::uint32_t i = 0; i < s.freebit_budget(); ++i) {
    if (!at_t.consumed[i]) open.push_back(i);
  }
  AdversaryResult best;
  best.distance = -1.0;
  FreebitAssignment a = at_t.values;
  const std::size_t m = open.size();
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << m); ++code) {
    for (std::size_t j = 0; j < m; ++j) a[open[j]] = static_cast<std::uint8_t>((code >> (m - 1 - j)) & 1);
    const double d = variation_distance(forecast, true_distribution(s, at_t, future_inputs, a));
    if (d > best.distance) {
      best.distance = d;
      best.assignment = a;
    }
  }
  return best;
}

std::pair<double, double> clopper_pearson(std::size_t successes, std::size_t trials, double confidence) {
  if (trials == 0 || successes > trials) throw ValidationError("BadConfig", "need 0 <= successes <= trials, trials > 0");
  const double alpha = 1.0 - confidence;
  const auto k = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  const double lo = successes == 0 ? 0.0 : boost::math::ibeta_inv(k, n - k + 1.0, alpha / 2.0);
  const double hi = successes == trials ? 1.0 : boost::math::ibeta_inv(k + 1.0, n - k, 1.0 - alpha / 2.0);
  return {lo, hi};
}

Verdict run_game(const Subject& s, const PredictorFactory& p, const GameConfig& cfg, kernels::Exec policy) {
  cfg.validate();
  if (s.freebit_budget() > kMaxFreebits) throw BudgetTooLarge(s.freebit_budget());
  const std::size_t h = cfg.u - cfg.t;

  Verdict v;
  v.subject = s.name();
  v.predictor = p.name;
  v.config = cfg;
  v.trials.resize(cfg.trials);

  kernels::for_each_index(cfg.trials, policy, [&](std::size_t i) {
    std::mt19937_64 rng(mix_seed(cfg.seed, {i}));
    SubjectState st = SubjectState::initial(s);
    auto predictor = p.make();
    for (std::size_t t = 0; t < cfg.t; ++t) {
      const auto in = bernoulli(rng, cfg.input_p);
      const auto out = step(s, st, in, rng);
      predictor->observe(in, out);
    }
    Trial& trial = v.trials[i];
    trial.freebits_consumed = st.consumed_count();

    // An oblivious adversary commits before the forecast exists.
    FreebitAssignment oblivious = st.values;
    if (cfg.adversary == AdversaryMode::Oblivious) {
      for (std::size_t j = 0; j < oblivious.size(); ++j) {
        if (!st.consumed[j]) oblivious[j] = bernoulli(rng, 0.5);
      }
    }

    const auto forecast = predictor->emit_forecast();
    std::mt19937_64 probe_rng(mix_seed(cfg.seed, {i, 1}));
    probe_causality(*forecast, h, cfg.causality_probes, probe_rng);

    trial.future_inputs.resize(h);
    for (auto& b : trial.future_inputs) b = bernoulli(rng, cfg.input_p);

    if (cfg.adversary == AdversaryMode::Adaptive) {
      auto r = adversary_resolution(s, st, *forecast, trial.future_inputs);
      trial.distance = r.distance;
      trial.assignment = std::move(r.assignment);
    } else {
      trial.assignment = oblivious;
      trial.distance = variation_distance(forecast_distribution(*forecast, trial.future_inputs),
                                          true_distribution(s, st, trial.future_inputs, trial.assignment));
    }
  });

  for (const auto& t : v.trials) {
    if (t.distance < cfg.epsilon) ++v.successes;
  }
  v.pass_fraction = static_cast<double>(v.successes) / static_cast<double>(cfg.trials);
  v.pass = v.pass_fraction >= 1.0 - cfg.delta;
  std::tie(v.ci_lo, v.ci_hi) = clopper_pearson(v.successes, cfg.trials);
  v.certified = v.ci_lo >= 1.0 - cfg.delta;
  return v;
}

ClassificationReport classify(const std::vector<ReferenceClass>& classes,
                              const std::vector<PredictorFactory>& predictors,
                              const std::vector<ScheduleEntry>& schedule, const ClassifyConfig& cfg,
                              kernels::Exec policy) {
  if (schedule.empty()) throw ValidationError("BadConfig", "empty schedule");
  if (predictors.empty()) throw ValidationError("BadConfig", "no predictors supplied");
  ClassificationReport report;
  report.scope_note =
      "A class is labelled mechanistic-at-scale when a supplied predictor passed the schedule. "
      "unpredicted-at-scale only records that none of the supplied predictors did; it says nothing "
      "about predictors outside this family.";

  for (std::size_t c = 0; c < classes.size(); ++c) {
    const auto& rc = classes[c];
    if (rc.members.empty()) throw ValidationError("BadConfig", "reference class '" + rc.name + "' is empty");
    ClassVerdict cv;
    cv.name = rc.name;
    // passes[p][e]: predictor p passed entry e on every member.
    std::vector<std::vector<bool>> passes(predictors.size(), std::vector<bool>(schedule.size(), true));
    for (std::size_t p = 0; p < predictors.size(); ++p) {
      for (std::size_t e = 0; e < schedule.size(); ++e) {
        for (std::size_t m = 0; m < rc.members.size(); ++m) {
          GameConfig g;
          g.t = schedule[e].t;
          g.u = schedule[e].t + cfg.horizon;
          g.epsilon = schedule[e].epsilon;
          g.delta = schedule[e].delta;
          g.trials = cfg.trials;
          g.input_p = cfg.input_p;
          g.adversary = cfg.adversary;
          g.seed = mix_seed(cfg.seed, {c, m, p, e});
          const auto v = run_game(rc.members[m], predictors[p], g, policy);
          GameSummary gs;
          gs.subject = v.subject;
          gs.predictor = v.predictor;
          gs.entry = schedule[e];
          gs.pass_fraction = v.pass_fraction;
          gs.pass = v.pass;
          gs.min_distance = v.trials.front().distance;
          gs.max_distance = v.trials.front().distance;
          for (const auto& t : v.trials) {
            gs.min_distance = std::min(gs.min_distance, t.distance);
            gs.max_distance = std::max(gs.max_distance, t.distance);
          }
          if (!v.pass) passes[p][e] = false;
          cv.games.push_back(std::move(gs));
        }
      }
    }
    bool mechanistic = false;
    if (cfg.order == QuantifierOrder::PredictorFirst) {
      for (const auto& row : passes) {
        if (std::all_of(row.begin(), row.end(), [](bool b) { return b; })) mechanistic = true;
      }
    } else {
      mechanistic = true;
      for (std::size_t e = 0; e < schedule.size(); ++e) {
        bool any = false;
        for (const auto& row : passes) any = any || row[e];
        mechanistic = mechanistic && any;
      }
    }
    cv.label = mechanistic ? "mechanistic-at-scale" : "unpredicted-at-scale";
    report.classes.push_back(std::move(cv));
  }
  return report;
}

namespace library {

namespace {

Edge det(std::uint32_t from, std::uint8_t in, std::uint32_t to, std::uint8_t emit) {
  return Edge{from, in, to, emit, std::nullopt, std::nullopt, std::nullopt};
}

Edge noisy(std::uint32_t from, std::uint8_t in, std::uint32_t to, std::uint8_t emit, double p) {
  return Edge{from, in, to, emit, p, std::nullopt, std::nullopt};
}

Edge freebit(std::uint32_t from, std::uint8_t in, std::uint32_t to, std::uint8_t emit, std::uint32_t index,
             std::uint8_t value) {
  return Edge{from, in, to, emit, std::nullopt, index, value};
}

}  // namespace

Subject parrot() {
  std::vector<Edge> e;
  for (std::uint8_t s = 0; s < 2; ++s)
    for (std::uint8_t i = 0; i < 2; ++i) e.push_back(det(s, i, i, s));
  return Subject::make("parrot", SubjectKind::Deterministic, 2, 0, e, 0);
}

Subject inverter() {
  return Subject::make("inverter", SubjectKind::Deterministic, 1, 0, {det(0, 0, 0, 1), det(0, 1, 0, 0)}, 0);
}

Subject toggler() {
  std::vector<Edge> e;
  for (std::uint8_t s = 0; s < 2; ++s)
    for (std::uint8_t i = 0; i < 2; ++i) e.push_back(det(s, i, 1 - s, s));
  return Subject::make("toggler", SubjectKind::Deterministic, 2, 0, e, 0);
}

Subject constant(std::uint8_t bit) {
  if (bit > 1) throw ValidationError("BadSubject", "constant bit must be 0 or 1");
  return Subject::make("constant" + std::to_string(bit), SubjectKind::Deterministic, 1, 0,
                       {det(0, 0, 0, bit), det(0, 1, 0, bit)}, 0);
}

Subject and_memory() {
  std::vector<Edge> e;
  for (std::uint8_t s = 0; s < 2; ++s)
    for (std::uint8_t i = 0; i < 2; ++i) e.push_back(det(s, i, i, s & i));
  return Subject::make("and_memory", SubjectKind::Deterministic, 2, 0, e, 0);
}

Subject fair_coin() {
  std::vector<Edge> e;
  for (std::uint8_t i = 0; i < 2; ++i) {
    e.push_back(noisy(0, i, 0, 0, 0.5));
    e.push_back(noisy(0, i, 0, 1, 0.5));
  }
  return Subject::make("fair_coin", SubjectKind::Noisy, 1, 0, e, 0);
}

Subject sticky_coin(double stay) {
  std::vector<Edge> e;
  for (std::uint8_t s = 0; s < 2; ++s) {
    for (std::uint8_t i = 0; i < 2; ++i) {
      e.push_back(noisy(s, i, s, s, stay));
      e.push_back(noisy(s, i, 1 - s, 1 - s, 1.0 - stay));
    }
  }
  return Subject::make("sticky_coin(" + format_double(stay) + ")", SubjectKind::Noisy, 2, 0, e, 0);
}

Subject noisy_parrot(double fidelity) {
  std::vector<Edge> e;
  for (std::uint8_t s = 0; s < 2; ++s) {
    for (std::uint8_t i = 0; i < 2; ++i) {
      e.push_back(noisy(s, i, i, s, fidelity));
      e.push_back(noisy(s, i, i, 1 - s, 1.0 - fidelity));
    }
  }
  return Subject::make("noisy_parrot(" + format_double(fidelity) + ")", SubjectKind::Noisy, 2, 0, e, 0);
}

Subject clocked_freebits(const std::vector<std::size_t>& fire_at) {
  std::set<std::size_t> fires(fire_at.begin(), fire_at.end());
  if (fires.empty()) throw ValidationError("BadSubject", "clocked_freebits needs at least one firing instant");
  if (fires.size() > kMaxFreebits) throw BudgetTooLarge(fires.size());
  if (*fires.rbegin() > 4096) throw ValidationError("BadSubject", "clocked_freebits instant too large");
  // States 0..last count instants; the final state idles emitting 0.
  const auto last = static_cast<std::uint32_t>(*fires.rbegin() + 1);
  std::vector<Edge> e;
  std::uint32_t index = 0;
  std::string name = "clocked_freebits(";
  for (std::uint32_t v = 0; v < last; ++v) {
    const bool fire = fires.count(v) > 0;
    for (std::uint8_t i = 0; i < 2; ++i) {
      if (fire) {
        e.push_back(freebit(v, i, v + 1, 0, index, 0));
        e.push_back(freebit(v, i, v + 1, 1, index, 1));
      } else {
        e.push_back(det(v, i, v + 1, 0));
      }
    }
    if (fire) {
      name += (index ? "," : "") + std::to_string(v);
      ++index;
    }
  }
  e.push_back(det(last, 0, last, 0));
  e.push_back(det(last, 1, last, 0));
  return Subject::make(name + ")", SubjectKind::Freebit, last + 1, 0, e, index);
}

Subject gerbil_hybrid() {
  std::vector<Edge> e;
  for (std::uint8_t i = 0; i < 2; ++i) {
    e.push_back(det(0, i, 1, i));
    e.push_back(det(1, i, 2, 1 - i));
    e.push_back(freebit(2, i, 3, 0, 0, 0));
    e.push_back(freebit(2, i, 3, 1, 0, 1));
    e.push_back(det(3, i, 3, i));
  }
  return Subject::make("gerbil_hybrid", SubjectKind::GerbilHybrid, 4, 0, e, 1);
}

ReferenceClass deterministic_class() {
  return {"deterministic", {parrot(), inverter(), toggler(), constant(0), and_memory()}};
}

ReferenceClass noisy_class() { return {"noisy", {fair_coin(), sticky_coin(0.8), noisy_parrot(0.9)}}; }

ReferenceClass freebit_class(const std::vector<std::size_t>& fire_at) {
  return {"freebit", {clocked_freebits(fire_at)}};
}

Subject by_name(const std::string& name) {
  if (name == "parrot") return parrot();
  if (name == "inverter") return inverter();
  if (name == "toggler") return toggler();
  if (name == "constant0") return constant(0);
  if (name == "constant1") return constant(1);
  if (name == "and_memory") return and_memory();
  if (name == "fair_coin") return fair_coin();
  if (name == "sticky_coin") return sticky_coin(0.8);
  if (name == "noisy_parrot") return noisy_parrot(0.9);
  if (name == "gerbil_hybrid") return gerbil_hybrid();
  throw ValidationError("UnknownSubject", "no library subject named '" + name + "'");
}

}  // namespace library

}  // namespace knightian::arena
