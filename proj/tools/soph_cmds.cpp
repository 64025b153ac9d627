#include <map>

#include "cli.hpp"
#include "knightian/sophistication.hpp"

namespace cli {

using namespace knightian;
using namespace knightian::soph;

namespace {

Json complexity_json(const Complexity& c) {
  if (const auto* r = std::get_if<ComplexityResult>(&c)) {
    return Json{{"found", true},
                {"value", r->value},
                {"witness", program_json(r->witness)},
                {"search_bound", r->search_bound},
                {"step_budget", r->step_budget}};
  }
  const auto& nf = std::get<NotFound>(c);
  return Json{{"found", false}, {"search_bound", nf.search_bound}, {"step_budget", nf.step_budget}};
}

Json set_json(const SetListing& s) {
  Json e = Json::array();
  for (const auto& x : s.elements()) e.push_back(to_string(x));
  return e;
}

Json soph_json(const Sophistication& s) {
  if (const auto* r = std::get_if<SophResult>(&s)) {
    return Json{{"found", true},
                {"value", r->value},
                {"witness_set", set_json(r->witness_set)},
                {"witness_program", program_json(r->witness_program)},
                {"k_of_x", r->k_of_x},
                {"log2_size", r->log2_size}};
  }
  const auto& nf = std::get<NotFound>(s);
  return Json{{"found", false}, {"search_bound", nf.search_bound}, {"step_budget", nf.step_budget}};
}

unsigned read_len(ObjectReader& r) { return static_cast<unsigned>(r.get<std::uint64_t>("max_len")); }

Result k_cmd(const Context&, ObjectReader& r) {
  const Bits x = read_bits(r, "x");
  const auto len = read_len(r);
  const auto cfg = read_machine(r);
  r.finish();
  Json body = complexity_json(kolmogorov(x, len, cfg));
  body["x"] = to_string(x);
  return {body, std::nullopt};
}

Result kset_cmd(const Context&, ObjectReader& r) {
  const Json& set = r.required("set");
  const auto len = read_len(r);
  const auto cfg = read_machine(r);
  r.finish();
  if (!set.is_array()) throw io::SchemaError("config.set must be an array of bit strings");
  std::vector<Bits> el;
  for (const auto& x : set) el.push_back(parse_bits(io::convert<std::string>(x, "config.set")));
  const SetListing s(el);
  Json body = complexity_json(set_complexity(s, len, cfg));
  body["set"] = set_json(s);
  return {body, std::nullopt};
}

// Single query with "x" and "c", or a suite over every string up to "n_max"
// with the bound checks.
Result soph_cmd(const Context&, ObjectReader& r) {
  const auto len = read_len(r);
  const auto cfg = read_machine(r);
  if (r.has("x")) {
    const Bits x = read_bits(r, "x");
    const auto c = static_cast<unsigned>(r.get<std::uint64_t>("c"));
    r.finish();
    Json body = soph_json(sophistication(x, c, len, cfg));
    body["x"] = to_string(x);
    body["c"] = c;
    return {body, std::nullopt};
  }
  const auto n_max = static_cast<unsigned>(r.get<std::uint64_t>("n_max"));
  std::vector<unsigned> cs;
  const Json& cj = r.required("cs");
  const auto listing = static_cast<unsigned>(r.get_or<std::uint64_t>("listing_constant", 7));
  r.finish();
  if (!cj.is_array() || cj.empty()) throw io::SchemaError("config.cs must be a nonempty array");
  for (const auto& c : cj) cs.push_back(static_cast<unsigned>(io::convert<std::uint64_t>(c, "config.cs")));
  std::sort(cs.begin(), cs.end());
  if (n_max > 12) throw LimitExceeded("n_max", 12, n_max);

  const Tabulator tab(len, cfg);
  Json rows = Json::array();
  std::map<unsigned, std::uint64_t> at;
  std::uint64_t singleton_fail = 0, monotone_fail = 0, strings = 0;
  for (unsigned n = 0; n <= n_max; ++n) {
    for (const auto& row : tabulate(tab, n, cs)) {
      ++strings;
      Json jr{{"x", to_string(row.x)}};
      jr["k"] = row.k ? Json(*row.k) : Json(nullptr);
      if (row.k) ++at[*row.k];
      std::optional<unsigned> prev;
      bool seen = false;
      for (unsigned c : cs) {
        const auto& v = row.soph.at(c);
        jr["soph_" + std::to_string(c)] = v ? Json(*v) : Json(nullptr);
        if (v && row.k && *v > *row.k + listing) ++singleton_fail;
        if (seen && (!v || (prev && *v > *prev))) ++monotone_fail;
        if (v) {
          prev = v;
          seen = true;
        }
      }
      rows.push_back(jr);
    }
  }
  std::uint64_t counting_fail = 0, cumulative = 0;
  for (unsigned k = 0; k <= len; ++k) {
    cumulative += at[k];
    if (cumulative > (std::uint64_t{1} << (k + 1))) ++counting_fail;
  }
  Json body{{"strings", strings},
            {"listing_constant", listing},
            {"checks", Json{{"singleton_bound", singleton_fail == 0},
                            {"monotone_in_c", monotone_fail == 0},
                            {"counting_bound", counting_fail == 0}}},
            {"rows", rows}};
  return {body, rows};
}

}  // namespace

std::vector<Command> soph_commands() {
  const std::string m = "\"machine\"?: {\"step_budget\", \"rand_budget\", \"output_budget\"}";
  return {
      {"soph", "k", "time-bounded Kolmogorov complexity by exhaustive search",
       "{\"x\": \"0101\", \"max_len\": L, " + m + "}", k_cmd},
      {"soph", "kset", "complexity of listing a set", "{\"set\": [\"01\", \"10\"], \"max_len\": L, " + m + "}",
       kset_cmd},
      {"soph", "soph", "c-sophistication of one string, or a checked table over all strings up to n_max",
       "{\"x\": \"0101\", \"c\": 4, \"max_len\": L, " + m + "} or {\"n_max\": 6, \"cs\": [0, 4, 8], \"max_len\": L, "
       "\"listing_constant\"?: 7, " + m + "}",
       soph_cmd},
  };
}

}  // namespace cli
