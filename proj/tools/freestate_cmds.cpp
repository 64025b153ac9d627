#include <cmath>
#include <random>
#include <variant>

#include "cli.hpp"
#include "knightian/freestate.hpp"
#include "knightian/sampling.hpp"

namespace cli {

using namespace knightian;
using namespace knightian::freestate;

namespace {

using AnyState = std::variant<Freestate, ClassicalFreestate>;

AnyState read_state(const Json& j, const std::string& where);

template <typename F>
AnyState combine(const AnyState& a, const AnyState& b, F&& f, const std::string& where) {
  if (a.index() != b.index()) throw io::SchemaError(where + " mixes classical and quantum states");
  if (const auto* q = std::get_if<Freestate>(&a)) return f(*q, std::get<Freestate>(b));
  return f(std::get<ClassicalFreestate>(a), std::get<ClassicalFreestate>(b));
}

AnyState read_mix(const Json& list, const std::string& where) {
  if (!list.is_array() || list.empty()) throw io::SchemaError(where + " must be a nonempty array");
  std::vector<std::pair<double, Freestate>> q;
  std::vector<std::pair<double, ClassicalFreestate>> c;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    ObjectReader r(list[i], w);
    const double weight = r.get<double>("weight");
    const AnyState s = read_state(r.required("state"), w + ".state");
    r.finish();
    if (const auto* fs = std::get_if<Freestate>(&s)) {
      q.emplace_back(weight, *fs);
    } else {
      c.emplace_back(weight, std::get<ClassicalFreestate>(s));
    }
  }
  if (!q.empty() && !c.empty()) throw io::SchemaError(where + " mixes classical and quantum states");
  if (!q.empty()) return prob_mix(q);
  return prob_mix(c);
}

// A state expression: {"dim", "generators"}, {"n", "generators"},
// {"or": [expr, ...]}, {"mix": [{"weight", "state"}, ...]} or
// {"builtin": "qubit_freebit" | "maximally_mixed", "dim"?}.
AnyState read_state(const Json& j, const std::string& where) {
  if (!j.is_object()) throw io::SchemaError(where + " must be a JSON object");
  if (j.contains("or")) {
    ObjectReader r(j, where);
    const Json& list = r.required("or");
    r.finish();
    if (!list.is_array() || list.empty()) throw io::SchemaError(where + ".or must be a nonempty array");
    AnyState acc = read_state(list[0], where + ".or[0]");
    for (std::size_t i = 1; i < list.size(); ++i) {
      const AnyState next = read_state(list[i], where + ".or[" + std::to_string(i) + "]");
      acc = combine(acc, next, [](const auto& a, const auto& b) -> AnyState { return knightian_or(a, b); }, where);
    }
    return acc;
  }
  if (j.contains("mix")) {
    ObjectReader r(j, where);
    const Json& list = r.required("mix");
    r.finish();
    return read_mix(list, where + ".mix");
  }
  if (j.contains("builtin")) {
    ObjectReader r(j, where);
    const auto name = r.get<std::string>("builtin");
    const auto dim = r.get_or<std::uint64_t>("dim", 2);
    r.finish();
    if (name == "qubit_freebit") return states::full_qubit_freebit();
    if (name == "maximally_mixed") return Freestate({DensityMatrix::maximally_mixed(dim)});
    throw io::SchemaError(where + ".builtin must be qubit_freebit or maximally_mixed");
  }
  if (j.contains("n")) return io::classical_from_json(j);
  return io::freestate_from_json(j);
}

Json state_json(const AnyState& s) {
  return std::visit([](const auto& x) { return io::to_json(x); }, s);
}

std::size_t generator_count(const AnyState& s) {
  return std::visit([](const auto& x) { return x.generators().size(); }, s);
}

Result interval(const Context&, ObjectReader& r) {
  const AnyState s = read_state(r.required("state"), "config.state");
  Interval iv;
  if (const auto* q = std::get_if<Freestate>(&s)) {
    const Effect e = io::effect_from_json(r.required("effect"));
    r.finish();
    iv = effect_interval(*q, e);
  } else {
    const Json& ev = r.required("event");
    r.finish();
    if (!ev.is_array()) throw io::SchemaError("config.event must be an array of outcome indices");
    std::vector<std::size_t> idx;
    for (const auto& x : ev) idx.push_back(io::convert<std::uint64_t>(x, "config.event"));
    iv = event_interval(std::get<ClassicalFreestate>(s), idx);
  }
  return {io::to_json(iv), std::nullopt};
}

Result witness(const Context& ctx, ObjectReader& r) {
  const AnyState a = read_state(r.required("a"), "config.a");
  const AnyState b = read_state(r.required("b"), "config.b");
  WitnessOptions opt;
  opt.tol = r.get_or<double>("tol", opt.tol);
  opt.restarts = static_cast<int>(r.get_or<std::uint64_t>("restarts", static_cast<std::uint64_t>(opt.restarts)));
  opt.ascent_iterations =
      static_cast<int>(r.get_or<std::uint64_t>("ascent_iterations", static_cast<std::uint64_t>(opt.ascent_iterations)));
  r.finish();
  opt.seed = ctx.require_seed();
  const auto* qa = std::get_if<Freestate>(&a);
  const auto* qb = std::get_if<Freestate>(&b);
  if (!qa || !qb) throw ValidationError("BadState", "witness search needs quantum freestates");
  const auto w = separating_witness(*qa, *qb, opt);
  Json body{{"separated", w.has_value()}};
  body["witness"] = w ? io::to_json(*w) : Json(nullptr);
  return {body, std::nullopt};
}

Result or_cmd(const Context&, ObjectReader& r) {
  const Json& list = r.required("states");
  r.finish();
  const AnyState s = read_state(Json{{"or", list}}, "config.states");
  return {Json{{"generators", generator_count(s)}, {"state", state_json(s)}}, std::nullopt};
}

Result mix_cmd(const Context& ctx, ObjectReader& r) {
  const Json& comps = r.required("components");
  const auto checks = r.get_or<std::uint64_t>("check_effects", 0);
  r.finish();
  const AnyState s = read_mix(comps, "config.components");
  Json body{{"generators", generator_count(s)}, {"state", state_json(s)}};
  if (checks > 0) {
    const auto* q = std::get_if<Freestate>(&s);
    if (!q) throw ValidationError("BadState", "check_effects needs quantum components");
    std::mt19937_64 rng(ctx.require_seed());
    std::vector<std::pair<double, Freestate>> parts;
    for (const auto& c : comps) {
      parts.emplace_back(c["weight"].get<double>(), std::get<Freestate>(read_state(c["state"], "component")));
    }
    double worst = 0.0;
    for (std::uint64_t k = 0; k < checks; ++k) {
      const Effect e = sampling::random_effect(rng, q->dim());
      const auto im = effect_interval(*q, e);
      double lo = 0.0, hi = 0.0;
      for (const auto& [w, part] : parts) {
        const auto ip = effect_interval(part, e);
        lo += w * ip.lo;
        hi += w * ip.hi;
      }
      worst = std::max({worst, std::abs(im.lo - lo), std::abs(im.hi - hi)});
    }
    body["linearity"] = Json{{"effects", checks}, {"max_deviation", worst}, {"within_1e-9", worst <= 1e-9}};
  }
  return {body, std::nullopt};
}

Result clone_check(const Context&, ObjectReader& r) {
  const PureState psi = io::pure_from_json(r.required("psi"));
  const PureState phi = io::pure_from_json(r.required("phi"));
  r.finish();
  if (psi.dim() != phi.dim()) throw DimMismatch(psi.dim(), phi.dim());
  const double overlap = std::abs(psi.amplitudes().dot(phi.amplitudes()));
  return {Json{{"feasible", clone_feasible(psi, phi)}, {"overlap", overlap}}, std::nullopt};
}

double expect(const Effect& e, const DensityMatrix& rho) { return (e.matrix() * rho.matrix()).trace().real(); }

Result sample_check(const Context& ctx, ObjectReader& r) {
  const auto trials = r.get_or<std::uint64_t>("states", 100);
  const auto max_dim = r.get_or<std::uint64_t>("max_dim", 4);
  const auto max_gen = r.get_or<std::uint64_t>("max_generators", 4);
  const auto samples = r.get_or<std::uint64_t>("samples", 2000);
  const auto pairs = r.get_or<std::uint64_t>("witness_pairs", 100);
  r.finish();
  if (max_dim < 2 || max_gen < 1) throw ValidationError("BadConfig", "max_dim >= 2 and max_generators >= 1");
  std::mt19937_64 rng(ctx.require_seed());
  auto dim = [&] { return 2 + rng() % (max_dim - 1); };

  double worst_exit = -1.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const std::size_t d = dim();
    const auto s = sampling::random_freestate(rng, d, 1 + rng() % max_gen);
    const auto e = sampling::random_effect(rng, d);
    const auto iv = effect_interval(s, e);
    for (std::uint64_t k = 0; k < samples; ++k) {
      const auto w = sampling::random_weights(rng, s.generators().size());
      double v = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) v += w[j] * expect(e, s.generators()[j]);
      worst_exit = std::max({worst_exit, iv.lo - v, v - iv.hi});
    }
  }

  std::uint64_t verified = 0, found = 0;
  double min_gap = 1e300;
  for (std::uint64_t t = 0; t < pairs; ++t) {
    const std::size_t d = dim();
    const auto a = sampling::random_freestate(rng, d, 1 + rng() % max_gen);
    const auto b = sampling::random_freestate(rng, d, 1 + rng() % max_gen);
    WitnessOptions opt;
    opt.seed = rng();
    const auto w = separating_witness(a, b, opt);
    if (!w) continue;
    ++found;
    double gap;
    if (const auto* p = std::get_if<PureWitness>(&*w)) {
      const auto& own = p->side == Side::First ? a : b;
      const auto& other = p->side == Side::First ? b : a;
      const Effect e = Effect::projector(p->psi);
      const double v = expect(e, own.generators()[p->generator]);
      double lo = 1e300, hi = -1e300;
      for (const auto& g : other.generators()) {
        lo = std::min(lo, expect(e, g));
        hi = std::max(hi, expect(e, g));
      }
      gap = std::max(lo - v, v - hi);
    } else {
      const auto& h = std::get<HermitianWitness>(*w);
      const auto& own = h.side == Side::First ? a : b;
      const auto& other = h.side == Side::First ? b : a;
      double best = -1e300;
      for (const auto& g : other.generators()) best = std::max(best, (h.w * g.matrix()).trace().real());
      gap = (h.w * own.generators()[h.generator].matrix()).trace().real() - best;
    }
    min_gap = std::min(min_gap, gap);
    if (gap > opt.tol) ++verified;
  }
  Json body{{"monte_carlo",
             Json{{"states", trials}, {"samples_per_state", samples}, {"worst_exit", worst_exit},
                  {"within_1e-9", worst_exit <= 1e-9}}},
            {"witnesses", Json{{"pairs", pairs},
                               {"found", found},
                               {"reverified", verified},
                               {"min_gap", found ? Json(min_gap) : Json(nullptr)},
                               {"all_reverified", verified == found}}}};
  return {body, std::nullopt};
}

}  // namespace

std::vector<Command> freestate_commands() {
  const std::string state_doc =
      "state expressions: {\"dim\": d, \"generators\": [[d*d entries]]} | {\"n\": n, \"generators\": [[probs]]} | "
      "{\"or\": [state, ...]} | {\"mix\": [{\"weight\": w, \"state\": state}, ...]} | "
      "{\"builtin\": \"qubit_freebit\" | \"maximally_mixed\", \"dim\"?}; complex entries are numbers or [re, im]";
  return {
      {"freestate", "interval", "lower/upper probability of an effect or event",
       "{\"state\": state, \"effect\": {\"dim\", \"matrix\"} | {\"projector\": [amps]}} for quantum states, "
       "{\"state\": state, \"event\": [indices]} for classical ones; " + state_doc,
       interval},
      {"freestate", "witness", "search for a pure-state witness separating two freestates (seeded)",
       "{\"a\": state, \"b\": state, \"tol\"?: 1e-6, \"restarts\"?: 64, \"ascent_iterations\"?: 200}; " + state_doc,
       witness},
      {"freestate", "or", "Knightian OR (hull of the union)", "{\"states\": [state, ...]}; " + state_doc, or_cmd},
      {"freestate", "mix", "probabilistic mixture of freestates",
       "{\"components\": [{\"weight\": w, \"state\": state}, ...], \"check_effects\"?: N (seeded linearity check)}; " +
           state_doc,
       mix_cmd},
      {"freestate", "clone-check", "whether one unitary can clone both pure states",
       "{\"psi\": {\"amplitudes\": [...]}, \"phi\": {\"amplitudes\": [...]}}", clone_check},
      {"freestate", "sample-check", "Monte-Carlo hull sampling and witness re-verification on random states (seeded)",
       "{\"states\"?: 100, \"max_dim\"?: 4, \"max_generators\"?: 4, \"samples\"?: 2000, \"witness_pairs\"?: 100}",
       sample_check},
  };
}

}  // namespace cli
