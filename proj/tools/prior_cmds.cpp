#include <algorithm>
#include <cmath>
#include <numeric>

#include "cli.hpp"
#include "knightian/mixture.hpp"

namespace cli {

using namespace knightian;
using namespace knightian::prior;

namespace {

unsigned read_len(ObjectReader& r) { return static_cast<unsigned>(r.get<std::uint64_t>("max_len")); }

Mixture feed(Mixture m, const Bits& h) {
  for (auto b : h) m = m.update(b);
  return m;
}

Result predict(const Context&, ObjectReader& r) {
  const auto len = read_len(r);
  const auto cfg = read_machine(r);
  const Bits history = read_bits_or(r, "history", "");
  const auto top = r.get_or<std::uint64_t>("top", 5);
  r.finish();
  const auto m = feed(Mixture::build(len, cfg), history);
  const double p1 = predict_next(m);
  const auto post = m.posterior_weights();
  std::vector<std::size_t> order(post.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return post[a] > post[b]; });
  Json best = Json::array();
  for (std::size_t i = 0; i < order.size() && i < top; ++i) {
    Json p = program_json(*m.hypotheses()[order[i]].program);
    p["posterior"] = post[order[i]];
    best.push_back(p);
  }
  Json body{{"history", to_string(history)},
            {"p_one", p1},
            {"p_zero", 1.0 - p1},
            {"log2_mass", m.log2_mass()},
            {"normalizer", m.normalizer()},
            {"hypotheses", m.hypotheses().size()},
            {"top_posterior", best}};
  return {body, std::nullopt};
}

Result regret(const Context&, ObjectReader& r) {
  const auto len = read_len(r);
  const auto cfg = read_machine(r);
  const auto q = read_program(r.required("q"), "config.q");
  const Bits seq = read_bits(r, "sequence");
  std::vector<double> eps = {0.5, 0.1};
  if (const Json* e = r.optional("epsilons")) {
    if (!e->is_array()) throw io::SchemaError("config.epsilons must be an array");
    eps.clear();
    for (const auto& x : *e) eps.push_back(io::convert<double>(x, "config.epsilons"));
  }
  r.finish();
  const auto rep = regret_report(q, seq, Mixture::build(len, cfg), eps);
  Json steps = Json::array();
  for (const auto& s : rep.steps) {
    steps.push_back(Json{{"step", s.step},
                         {"bit", s.bit},
                         {"p_u", s.p_u},
                         {"p_q", s.p_q},
                         {"ratio", s.ratio},
                         {"cum_ratio", s.cum_ratio}});
  }
  Json mistakes = Json::array();
  for (const auto& m : rep.mistakes) {
    mistakes.push_back(Json{{"epsilon", m.epsilon},
                            {"count", m.count},
                            {"bound", m.bound},
                            {"within_bound", static_cast<double>(m.count) <= m.bound + 1e-9}});
  }
  Json body{{"q", program_json(rep.q)},
            {"log2_prior_q", rep.log2_prior_q},
            {"ratio_product", rep.ratio_product},
            {"log2_ratio_product", rep.log2_ratio_product},
            {"product_bound_holds", rep.log2_ratio_product >= rep.log2_prior_q - 1e-9},
            {"mistakes", mistakes},
            {"steps", steps}};
  return {body, steps};
}

Result diagonal(const Context&, ObjectReader& r) {
  const auto len = read_len(r);
  const auto cfg = read_machine(r);
  const auto n = static_cast<unsigned>(r.get<std::uint64_t>("n"));
  r.finish();
  const auto d = diagonal_sequence(Mixture::build(len, cfg), n);
  Json rows = Json::array();
  bool each = true, cumulative = true;
  double cum = 0.0;
  for (std::size_t k = 0; k < d.bits.size(); ++k) {
    cum += std::log2(d.realized_probability[k]);
    each = each && d.realized_probability[k] <= 0.5;
    cumulative = cumulative && cum <= -static_cast<double>(k + 1);
    rows.push_back(Json{{"step", k + 1}, {"bit", d.bits[k]}, {"probability", d.realized_probability[k]},
                        {"log2_cumulative", cum}});
  }
  Json body{{"bits", to_string(d.bits)},
            {"log2_cumulative", d.log2_cumulative},
            {"each_at_most_half", each},
            {"cumulative_at_most_2^-n", cumulative},
            {"steps", rows}};
  return {body, rows};
}

Result omega(const Context&, ObjectReader& r) {
  const auto len = read_len(r);
  const auto cfg = read_machine(r);
  r.finish();
  Json rows = Json::array();
  for (unsigned l = 1; l <= len; ++l) {
    const auto o = omega_truncated(l, cfg);
    rows.push_back(Json{{"max_len", l}, {"string", o.to_string()}, {"value", o.value()}});
  }
  const auto o = omega_truncated(len, cfg);
  return {Json{{"string", o.to_string()}, {"value", o.value()}, {"by_length", rows}}, rows};
}

Result dominance(const Context&, ObjectReader& r) {
  const auto len = read_len(r);
  const auto cfg = read_machine(r);
  const auto max_seq = static_cast<unsigned>(r.get_or<std::uint64_t>("max_seq_len", 6));
  r.finish();
  const auto m0 = Mixture::build(len, cfg);
  std::uint64_t pairs = 0, violations = 0;
  double slack = INFINITY;
  for (unsigned n = 1; n <= max_seq; ++n) {
    for (const auto& seq : all_bitstrings(n)) {
      const auto m = feed(m0, seq);
      for (const auto& h : m.hypotheses()) {
        const double lq = log2_program_probability(*h.program, seq, cfg);
        if (std::isinf(lq)) continue;
        ++pairs;
        const double excess = m.log2_mass() - lq + static_cast<double>(h.program->length());
        slack = std::min(slack, excess);
        if (excess < -1e-9) ++violations;
      }
    }
  }
  Json body{{"programs", m0.hypotheses().size()},
            {"max_seq_len", max_seq},
            {"pairs", pairs},
            {"violations", violations},
            {"min_log2_slack", pairs ? Json(slack) : Json(nullptr)},
            {"holds", violations == 0}};
  return {body, std::nullopt};
}

}  // namespace

std::vector<Command> prior_commands() {
  const std::string m = "\"machine\"?: {\"step_budget\": 256, \"rand_budget\": 16, \"output_budget\": 64}";
  return {
      {"solomonoff", "predict", "next-bit prediction of the truncated universal mixture",
       "{\"max_len\": L, \"history\"?: \"0101\", \"top\"?: 5, " + m + "}", predict},
      {"solomonoff", "regret", "per-step ratio Pr_U / Pr_Q and mistake bounds against one hypothesis",
       "{\"max_len\": L, \"q\": \"<program bits>\" | {\"ops\": [\"EMIT0\", ...]} | {\"body\": \"bits\"}, "
       "\"sequence\": \"0000\", \"epsilons\"?: [0.5, 0.1], " + m + "}",
       regret},
      {"solomonoff", "diagonal", "the sequence that always takes the less likely bit",
       "{\"max_len\": L, \"n\": 16, " + m + "}", diagonal},
      {"solomonoff", "omega", "truncated halting probability as an exact dyadic", "{\"max_len\": L, " + m + "}",
       omega},
      {"solomonoff", "dominance", "exhaustive check of Pr_U[seq] >= 2^-|Q| Pr_Q[seq]",
       "{\"max_len\": L, \"max_seq_len\"?: 6, " + m + "}", dominance},
  };
}

}  // namespace cli
