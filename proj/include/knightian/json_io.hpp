#pragma once

// JSON codecs for the library's data types. Readers are strict: any key not
// in the schema is rejected with ValidationError("UnknownKey") naming it.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "knightian/arena.hpp"
#include "knightian/freestate.hpp"
#include "knightian/gadgets.hpp"
#include "knightian/toyvm.hpp"

namespace knightian::io {

/// Keys keep insertion order so reports serialize identically every run.
using Json = nlohmann::ordered_json;

class UnknownKey : public ValidationError {
 public:
  UnknownKey(const std::string& key, const std::string& where)
      : ValidationError("UnknownKey", "unknown key '" + key + "' in " + where) {}
};

class SchemaError : public ValidationError {
 public:
  explicit SchemaError(const std::string& detail) : ValidationError("SchemaError", detail) {}
};

/// Reads an object field by field; finish() rejects whatever was not read.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string where);

  bool has(const std::string& key) const;
  const Json& required(const std::string& key);
  const Json* optional(const std::string& key);

  template <typename T>
  T get(const std::string& key);
  template <typename T>
  T get_or(const std::string& key, T fallback);

  void finish() const;
  const std::string& where() const { return where_; }

 private:
  const Json& j_;
  std::string where_;
  std::vector<std::string> seen_;
};

template <typename T>
T convert(const Json& j, const std::string& what);
template <>
double convert<double>(const Json& j, const std::string& what);
template <>
bool convert<bool>(const Json& j, const std::string& what);
template <>
std::string convert<std::string>(const Json& j, const std::string& what);
template <>
std::uint64_t convert<std::uint64_t>(const Json& j, const std::string& what);
template <>
std::int64_t convert<std::int64_t>(const Json& j, const std::string& what);
template <>
std::uint32_t convert<std::uint32_t>(const Json& j, const std::string& what);

template <typename T>
T ObjectReader::get(const std::string& key) {
  return convert<T>(required(key), where_ + "." + key);
}

template <typename T>
T ObjectReader::get_or(const std::string& key, T fallback) {
  const Json* j = optional(key);
  return j ? convert<T>(*j, where_ + "." + key) : fallback;
}

Json parse_file(const std::string& path);
Json parse_text(const std::string& text);

// ---- freestate ----

/// Complex entries are [re, im] pairs or plain numbers.
freestate::Complex complex_from_json(const Json& j, const std::string& where);
/// {"dim": d, "matrix": [d*d entries, row-major]}
freestate::Matrix matrix_from_json(const Json& j, std::size_t dim, const std::string& where);
/// {"dim": d, "generators": [[d*d entries], ...]}
freestate::Freestate freestate_from_json(const Json& j);
/// {"n": n, "generators": [[n probabilities], ...]}
freestate::ClassicalFreestate classical_from_json(const Json& j);
/// {"dim": d, "matrix": [...]} or {"projector": [amplitudes]}
freestate::Effect effect_from_json(const Json& j);
/// {"amplitudes": [entries]}
freestate::PureState pure_from_json(const Json& j);

Json to_json(const freestate::Complex& z);
Json to_json(const freestate::Matrix& m);
Json to_json(const freestate::Freestate& s);
Json to_json(const freestate::ClassicalFreestate& s);
Json to_json(const freestate::Interval& i);
Json to_json(const freestate::Witness& w);

// ---- machine ----

/// {"step_budget", "rand_budget", "output_budget"}, each optional.
toyvm::MachineConfig machine_config_from_json(const Json& j);
Json to_json(const toyvm::MachineConfig& c);

// ---- arena ----

/// {"builtin": name} (plus "fire_at" for clocked_freebits), or a full description
/// {"name", "kind", "n_states", "initial", "freebit_budget", "edges": [...]}
/// with edges {"from", "on_input", "to", "emit", "prob"?, "freebit_index"?,
/// "freebit_value"?}.
arena::Subject subject_from_json(const Json& j);
Json to_json(const arena::Subject& s);
/// {"kind": "constant", "p"} | {"kind": "table", "window"} |
/// {"kind": "bayes", "family": [subjects]}
arena::PredictorFactory predictor_from_json(const Json& j);
Json to_json(const arena::GameConfig& c);
Json to_json(const arena::Verdict& v);
Json to_json(const arena::ClassificationReport& r);

// ---- gadgets ----

gadgets::CausalGraph causal_graph_from_json(const Json& j);
Json to_json(const gadgets::ClassicalStrategy& s);
Json to_json(const gadgets::Violation& v);
/// {"string": "3/4", "value": 0.75}
Json rational_json(const gadgets::Rational& r);

}  // namespace knightian::io
