#include <cmath>
#include <numbers>
#include <random>

#include "cli.hpp"
#include "knightian/gadgets.hpp"

namespace cli {

using namespace knightian;
using namespace knightian::gadgets;

namespace {

Rational read_rational(const Json& j, const std::string& where) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_number()) return parse_rational(j.dump());
  throw io::SchemaError(where + " must be a number or a string such as \"3/4\"");
}

Json strategy_row(std::size_t i, const ChshRow& row) {
  return Json{{"row", i},
              {"a0", row.strategy.alice[0]},
              {"a1", row.strategy.alice[1]},
              {"b0", row.strategy.bob[0]},
              {"b1", row.strategy.bob[1]},
              {"value", to_string(row.value)}};
}

Result chsh_classical(const Context&, ObjectReader& r) {
  r.finish();
  const auto res = chsh_classical_optimum();
  Json table = Json::array();
  for (std::size_t i = 0; i < res.table.size(); ++i) table.push_back(strategy_row(i, res.table[i]));
  Json body{{"value", to_string(res.value)},
            {"value_float", to_double(res.value)},
            {"witness", io::to_json(res.witness)},
            {"minimum", to_string(res.minimum)},
            {"table", table}};
  return {body, table};
}

Result chsh_quantum(const Context&, ObjectReader& r) {
  QuantumStrategy s = chsh_optimal_angles();
  if (const Json* a = r.optional("alice")) {
    if (!a->is_array() || a->size() != 2) throw io::SchemaError("config.alice must be two angles");
    s.alice = {io::convert<double>((*a)[0], "config.alice"), io::convert<double>((*a)[1], "config.alice")};
  }
  if (const Json* b = r.optional("bob")) {
    if (!b->is_array() || b->size() != 2) throw io::SchemaError("config.bob must be two angles");
    s.bob = {io::convert<double>((*b)[0], "config.bob"), io::convert<double>((*b)[1], "config.bob")};
  }
  r.finish();
  const double v = chsh_quantum_value(s);
  const double target = std::pow(std::cos(std::numbers::pi / 8), 2);
  const auto classical = chsh_classical_optimum().value;
  Json body{{"value", v},
            {"alice", {s.alice[0], s.alice[1]}},
            {"bob", {s.bob[0], s.bob[1]}},
            {"cos2_pi_over_8", target},
            {"abs_error_vs_cos2_pi_over_8", std::abs(v - target)},
            {"classical_value", to_string(classical)},
            {"violation", v - to_double(classical)}};
  return {body, std::nullopt};
}

std::map<std::string, std::int64_t> read_rooms(const Json& j, const std::string& where) {
  if (!j.is_object()) throw io::SchemaError(where + " must map colors to copy counts");
  std::map<std::string, std::int64_t> out;
  for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = io::convert<std::int64_t>(it.value(), where);
  return out;
}

std::vector<CountingRule> read_rules(ObjectReader& r) {
  const auto rule = r.get_or<std::string>("rule", "both");
  std::vector<CountingRule> rules;
  if (rule == "both" || rule == "copy-weighted") rules.push_back(CountingRule::CopyWeighted);
  if (rule == "both" || rule == "branch-weighted") rules.push_back(CountingRule::BranchWeighted);
  if (rules.empty()) throw io::SchemaError("config.rule must be copy-weighted, branch-weighted or both");
  return rules;
}

RoomPuzzle builtin_puzzle(std::uint64_t v) {
  if (v == 1) return bostrom_variant1();
  if (v == 2) return bostrom_variant2();
  throw io::SchemaError("puzzle variants are 1 and 2");
}

Json solve(const RoomPuzzle& p, const std::vector<CountingRule>& rules) {
  Json post = Json::object();
  for (auto cr : rules) {
    const auto res = bostrom_posterior(p, cr);
    post[rule_name(cr)] = Json{{"heads", io::rational_json(res.heads)}, {"tails", io::rational_json(res.tails)}};
  }
  return Json{{"prior_heads", to_string(p.prior_heads)},
              {"heads_rooms", p.heads_rooms},
              {"tails_rooms", p.tails_rooms},
              {"observed", p.observed},
              {"posterior", post}};
}

Result bostrom(const Context&, ObjectReader& r) {
  if (r.has("variants")) {
    const Json& vs = r.required("variants");
    const auto rules = read_rules(r);
    r.finish();
    if (!vs.is_array() || vs.empty()) throw io::SchemaError("config.variants must be a nonempty array");
    Json out = Json::array();
    for (const auto& v : vs) {
      Json one = solve(builtin_puzzle(io::convert<std::uint64_t>(v, "config.variants")), rules);
      one["variant"] = v;
      out.push_back(one);
    }
    return {Json{{"puzzles", out}}, std::nullopt};
  }
  RoomPuzzle p;
  if (r.has("variant")) {
    p = builtin_puzzle(r.get<std::uint64_t>("variant"));
    if (const Json* ph = r.optional("prior_heads")) p.prior_heads = read_rational(*ph, "config.prior_heads");
  } else {
    if (const Json* ph = r.optional("prior_heads")) p.prior_heads = read_rational(*ph, "config.prior_heads");
    p.heads_rooms = read_rooms(r.required("heads_rooms"), "config.heads_rooms");
    p.tails_rooms = read_rooms(r.required("tails_rooms"), "config.tails_rooms");
    p.observed = r.get<std::string>("observed");
  }
  const auto rules = read_rules(r);
  r.finish();
  return {solve(p, rules), std::nullopt};
}

Result newcomb(const Context&, ObjectReader& r) {
  NewcombPayoffs pay;
  if (const Json* b = r.optional("big")) pay.big = read_rational(*b, "config.big");
  if (const Json* s = r.optional("small")) pay.small = read_rational(*s, "config.small");
  const Rational acc = read_rational(r.required("accuracy"), "config.accuracy");
  r.finish();
  const auto one = newcomb_expected(pay, acc, BoxPolicy::OneBox);
  const auto two = newcomb_expected(pay, acc, BoxPolicy::TwoBox);
  Json body{{"accuracy", io::rational_json(acc)},
            {"one_box", io::rational_json(one)},
            {"two_box", io::rational_json(two)},
            {"crossover", io::rational_json(newcomb_crossover(pay))},
            {"better", one > two ? "one-box" : (two > one ? "two-box" : "tie")}};
  return {body, std::nullopt};
}

Result causal(const Context& ctx, ObjectReader& r) {
  CausalOptions opt;
  opt.check_r3 = r.get_or<bool>("check_r3", true);
  if (r.has("graph")) {
    const auto g = io::causal_graph_from_json(r.required("graph"));
    r.finish();
    Json v = Json::array();
    for (const auto& x : causal_validate(g, opt)) v.push_back(io::to_json(x));
    const bool ok = v.empty();
    return {Json{{"valid", ok}, {"violations", v}, {"acyclic", acyclicity_check(g)}}, v};
  }
  ObjectReader rr(r.required("random"), "config.random");
  RandomGraphParams p;
  const auto count = rr.get<std::uint64_t>("count");
  p.max_nodes = rr.get_or<std::uint64_t>("max_nodes", p.max_nodes);
  p.max_time = rr.get_or<std::int64_t>("max_time", p.max_time);
  p.forward_bias = rr.get_or<double>("forward_bias", p.forward_bias);
  p.micro_fraction = rr.get_or<double>("micro_fraction", p.micro_fraction);
  rr.finish();
  r.finish();
  std::mt19937_64 rng(ctx.require_seed());
  std::uint64_t validated = 0, cyclic = 0, counterexamples = 0;
  Json first = nullptr;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto g = random_causal_graph(rng, p);
    const bool acyclic = acyclicity_check(g);
    if (!acyclic) ++cyclic;
    if (!causal_validate(g, opt).empty()) continue;
    ++validated;
    if (!acyclic && counterexamples++ == 0) first = Json{{"index", i}};
  }
  Json body{{"graphs", count},
            {"validated", validated},
            {"cyclic", cyclic},
            {"validated_and_cyclic", counterexamples},
            {"theorem_holds", counterexamples == 0},
            {"first_counterexample", first}};
  return {body, std::nullopt};
}

}  // namespace

std::vector<Command> gadgets_commands() {
  return {
      {"gadgets", "chsh-classical", "exhaustive search over the 16 deterministic CHSH strategies", "{}",
       chsh_classical},
      {"gadgets", "chsh-quantum", "CHSH win probability on a Bell pair",
       "{\"alice\"?: [a0, a1], \"bob\"?: [b0, b1]} (angles in radians; default the optimal ones)", chsh_quantum},
      {"gadgets", "bostrom", "posterior of heads in a room puzzle under both counting rules",
       "{\"variants\": [1, 2], \"rule\"?} or {\"variant\": 1 | 2, \"prior_heads\"?, \"rule\"?} or {\"prior_heads\"?: \"1/2\", \"heads_rooms\": {color: n}, "
       "\"tails_rooms\": {color: n}, \"observed\": color, \"rule\"?: \"copy-weighted\"|\"branch-weighted\"|\"both\"}",
       bostrom},
      {"gadgets", "newcomb", "expected payoffs of one- and two-boxing",
       "{\"accuracy\": \"999/1000\" | 0.5, \"big\"?: 1000000, \"small\"?: 1000}", newcomb},
      {"gadgets", "causal", "validate a causal graph, or run the acyclicity property over random graphs (seeded)",
       "{\"graph\": {\"nodes\": [{\"id\", \"kind\": \"micro\"|\"macro\", \"time\"}], \"edges\": [[cause, effect] | "
       "{\"cause\", \"effect\"}]}, \"check_r3\"?: true} or {\"random\": {\"count\", \"max_nodes\"?: 8, \"max_time\"?: 4, "
       "\"forward_bias\"?: 0.7, \"micro_fraction\"?: 0.5}, \"check_r3\"?: true}",
       causal},
  };
}

}  // namespace cli
