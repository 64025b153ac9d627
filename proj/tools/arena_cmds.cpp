#include "cli.hpp"
#include "knightian/arena.hpp"

namespace cli {

using namespace knightian;
using namespace knightian::arena;

namespace {

AdversaryMode read_adversary(ObjectReader& r) {
  const auto a = r.get_or<std::string>("adversary", "adaptive");
  if (a == "adaptive") return AdversaryMode::Adaptive;
  if (a == "oblivious") return AdversaryMode::Oblivious;
  throw io::SchemaError("config.adversary must be adaptive or oblivious");
}

std::vector<PredictorFactory> read_predictors(const Json& j) {
  if (!j.is_array() || j.empty()) throw io::SchemaError("config.predictors must be a nonempty array");
  std::vector<PredictorFactory> out;
  for (const auto& p : j) out.push_back(io::predictor_from_json(p));
  return out;
}

// {"builtin": "deterministic" | "noisy" | "freebit", "fire_at"?} or
// {"name", "members": [subjects]}.
ReferenceClass read_class(const Json& j, const std::string& where) {
  ObjectReader r(j, where);
  if (r.has("builtin")) {
    const auto name = r.get<std::string>("builtin");
    if (name == "freebit") {
      const Json& fire = r.required("fire_at");
      r.finish();
      if (!fire.is_array()) throw io::SchemaError(where + ".fire_at must be an array");
      std::vector<std::size_t> at;
      for (const auto& x : fire) at.push_back(io::convert<std::uint64_t>(x, where + ".fire_at"));
      return library::freebit_class(at);
    }
    r.finish();
    if (name == "deterministic") return library::deterministic_class();
    if (name == "noisy") return library::noisy_class();
    throw io::SchemaError(where + ".builtin must be deterministic, noisy or freebit");
  }
  ReferenceClass c;
  c.name = r.get<std::string>("name");
  const Json& members = r.required("members");
  r.finish();
  if (!members.is_array()) throw io::SchemaError(where + ".members must be an array");
  for (const auto& m : members) c.members.push_back(io::subject_from_json(m));
  return c;
}

Result run(const Context& ctx, ObjectReader& r) {
  const Subject s = io::subject_from_json(r.required("subject"));
  const PredictorFactory p = io::predictor_from_json(r.required("predictor"));
  GameConfig g;
  g.t = r.get<std::uint64_t>("t");
  g.u = r.has("u") ? r.get<std::uint64_t>("u") : g.t + r.get_or<std::uint64_t>("horizon", 4);
  g.epsilon = r.get_or<double>("epsilon", g.epsilon);
  g.delta = r.get_or<double>("delta", g.delta);
  g.trials = r.get_or<std::uint64_t>("trials", g.trials);
  g.input_p = r.get_or<double>("input_p", g.input_p);
  g.adversary = read_adversary(r);
  g.causality_probes = r.get_or<std::uint64_t>("causality_probes", g.causality_probes);
  r.finish();
  g.seed = ctx.require_seed();
  const auto v = run_game(s, p, g);
  Json rows = Json::array();
  for (std::size_t i = 0; i < v.trials.size(); ++i) {
    const auto& t = v.trials[i];
    std::string a;
    for (auto b : t.assignment) a += static_cast<char>('0' + b);
    rows.push_back(Json{{"trial", i},
                        {"distance", t.distance},
                        {"future_inputs", to_string(t.future_inputs)},
                        {"freebits_consumed", t.freebits_consumed},
                        {"assignment", a}});
  }
  return {io::to_json(v), rows};
}

Result classify_cmd(const Context& ctx, ObjectReader& r) {
  const Json& cj = r.required("classes");
  const auto predictors = read_predictors(r.required("predictors"));
  const Json& sj = r.required("schedule");
  ClassifyConfig cfg;
  cfg.horizon = r.get_or<std::uint64_t>("horizon", cfg.horizon);
  cfg.trials = r.get_or<std::uint64_t>("trials", cfg.trials);
  cfg.input_p = r.get_or<double>("input_p", cfg.input_p);
  cfg.adversary = read_adversary(r);
  const auto order = r.get_or<std::string>("order", "predictor-first");
  r.finish();
  if (order == "predictor-first") {
    cfg.order = QuantifierOrder::PredictorFirst;
  } else if (order == "entry-first") {
    cfg.order = QuantifierOrder::EntryFirst;
  } else {
    throw io::SchemaError("config.order must be predictor-first or entry-first");
  }
  if (!cj.is_array() || cj.empty()) throw io::SchemaError("config.classes must be a nonempty array");
  std::vector<ReferenceClass> classes;
  for (std::size_t i = 0; i < cj.size(); ++i) classes.push_back(read_class(cj[i], "config.classes[" + std::to_string(i) + "]"));
  if (!sj.is_array() || sj.empty()) throw io::SchemaError("config.schedule must be a nonempty array");
  std::vector<ScheduleEntry> schedule;
  for (std::size_t i = 0; i < sj.size(); ++i) {
    ObjectReader er(sj[i], "config.schedule[" + std::to_string(i) + "]");
    ScheduleEntry e;
    e.t = er.get<std::uint64_t>("t");
    e.epsilon = er.get_or<double>("epsilon", e.epsilon);
    e.delta = er.get_or<double>("delta", e.delta);
    er.finish();
    schedule.push_back(e);
  }
  cfg.seed = ctx.require_seed();
  const auto rep = classify(classes, predictors, schedule, cfg);
  Json rows = Json::array();
  for (const auto& c : rep.classes) {
    for (const auto& g : c.games) {
      rows.push_back(Json{{"class", c.name},
                          {"label", c.label},
                          {"subject", g.subject},
                          {"predictor", g.predictor},
                          {"t", g.entry.t},
                          {"pass_fraction", g.pass_fraction},
                          {"pass", g.pass},
                          {"min_distance", g.min_distance},
                          {"max_distance", g.max_distance}});
    }
  }
  return {io::to_json(rep), rows};
}

}  // namespace

std::vector<Command> arena_commands() {
  const std::string subj =
      "subjects: \"parrot\" | {\"builtin\": name} | {\"builtin\": \"clocked_freebits\", \"fire_at\": [..]} | "
      "{\"name\", \"kind\": \"Deterministic\"|\"Noisy\"|\"Freebit\"|\"GerbilHybrid\", \"n_states\", \"initial\"?, "
      "\"freebit_budget\"?, \"edges\": [{\"from\", \"on_input\", \"to\", \"emit\", \"prob\"?, \"freebit_index\"?, "
      "\"freebit_value\"?}]}; predictors: {\"kind\": \"constant\", \"p\"} | {\"kind\": \"table\", \"window\"} | "
      "{\"kind\": \"bayes\", \"family\": [subjects]}";
  return {
      {"arena", "run", "one (t, epsilon, delta) prediction game (seeded)",
       "{\"subject\": subject, \"predictor\": predictor, \"t\": 64, \"u\"?: t+4 | \"horizon\"?: 4, \"epsilon\"?: 0.05, "
       "\"delta\"?: 0.05, \"trials\"?: 200, \"input_p\"?: 0.5, \"adversary\"?: \"adaptive\"|\"oblivious\", "
       "\"causality_probes\"?: 8}; " + subj,
       run},
      {"arena", "classify", "label reference classes against a predictor family and schedule (seeded)",
       "{\"classes\": [{\"builtin\": \"deterministic\"|\"noisy\"|\"freebit\", \"fire_at\"?} | {\"name\", \"members\": "
       "[subjects]}], \"predictors\": [predictor], \"schedule\": [{\"t\", \"epsilon\"?, \"delta\"?}], \"horizon\"?: 4, "
       "\"trials\"?: 200, \"input_p\"?: 0.5, \"adversary\"?, \"order\"?: \"predictor-first\"|\"entry-first\"}; " + subj,
       classify_cmd},
  };
}

}  // namespace cli
