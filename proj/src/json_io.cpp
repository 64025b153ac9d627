#include "knightian/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace knightian::io {

ObjectReader::ObjectReader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
  if (!j_.is_object()) throw SchemaError(where_ + " must be a JSON object");
}

bool ObjectReader::has(const std::string& key) const { return j_.contains(key); }

const Json& ObjectReader::required(const std::string& key) {
  if (!j_.contains(key)) throw SchemaError("missing key '" + key + "' in " + where_);
  seen_.push_back(key);
  return j_.at(key);
}

const Json* ObjectReader::optional(const std::string& key) {
  if (!j_.contains(key)) return nullptr;
  seen_.push_back(key);
  return &j_.at(key);
}

void ObjectReader::finish() const {
  for (auto it = j_.begin(); it != j_.end(); ++it) {
    if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end()) throw UnknownKey(it.key(), where_);
  }
}

template <>
double convert<double>(const Json& j, const std::string& what) {
  if (!j.is_number()) throw SchemaError(what + " must be a number");
  return j.get<double>();
}

template <>
bool convert<bool>(const Json& j, const std::string& what) {
  if (!j.is_boolean()) throw SchemaError(what + " must be true or false");
  return j.get<bool>();
}

template <>
std::string convert<std::string>(const Json& j, const std::string& what) {
  if (!j.is_string()) throw SchemaError(what + " must be a string");
  return j.get<std::string>();
}

template <>
std::uint64_t convert<std::uint64_t>(const Json& j, const std::string& what) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
    throw SchemaError(what + " must be a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

template <>
std::int64_t convert<std::int64_t>(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) throw SchemaError(what + " must be an integer");
  return j.get<std::int64_t>();
}

template <>
std::uint32_t convert<std::uint32_t>(const Json& j, const std::string& what) {
  const auto v = convert<std::uint64_t>(j, what);
  if (v > 0xffffffffULL) throw SchemaError(what + " is too large");
  return static_cast<std::uint32_t>(v);
}

Json parse_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
}

Json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("BadPath", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

// ---- freestate ----

freestate::Complex complex_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw SchemaError(where + " must be a number or an [re, im] pair");
}

freestate::Matrix matrix_from_json(const Json& j, std::size_t dim, const std::string& where) {
  if (!j.is_array() || j.size() != dim * dim) {
    throw SchemaError(where + " must list " + std::to_string(dim * dim) + " entries row-major");
  }
  freestate::Matrix m(dim, dim);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      m(r, c) = complex_from_json(j[r * dim + c], where + "[" + std::to_string(r * dim + c) + "]");
    }
  }
  return m;
}

namespace {

std::size_t read_dim(ObjectReader& r) {
  const auto d = r.get<std::size_t>("dim");
  if (d == 0 || d > 64) throw SchemaError(r.where() + ".dim must lie in [1, 64]");
  return d;
}

}  // namespace

freestate::Freestate freestate_from_json(const Json& j) {
  ObjectReader r(j, "freestate");
  const auto dim = read_dim(r);
  const Json& gens = r.required("generators");
  r.finish();
  if (!gens.is_array()) throw SchemaError("freestate.generators must be an array");
  std::vector<freestate::DensityMatrix> out;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    out.push_back(freestate::DensityMatrix::validate(
        matrix_from_json(gens[i], dim, "freestate.generators[" + std::to_string(i) + "]")));
  }
  return freestate::Freestate(std::move(out));
}

freestate::ClassicalFreestate classical_from_json(const Json& j) {
  ObjectReader r(j, "classical freestate");
  const auto n = r.get<std::size_t>("n");
  const Json& gens = r.required("generators");
  r.finish();
  if (!gens.is_array()) throw SchemaError("classical freestate.generators must be an array");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const std::string where = "classical freestate.generators[" + std::to_string(i) + "]";
    if (!gens[i].is_array()) throw SchemaError(where + " must be an array");
    std::vector<double> p;
    for (const auto& x : gens[i]) p.push_back(convert<double>(x, where));
    if (p.size() != n) throw DimMismatch(n, p.size());
    out.push_back(std::move(p));
  }
  return freestate::ClassicalFreestate(std::move(out));
}

freestate::PureState pure_from_json(const Json& j) {
  ObjectReader r(j, "pure state");
  const Json& amps = r.required("amplitudes");
  r.finish();
  if (!amps.is_array() || amps.empty()) throw SchemaError("pure state.amplitudes must be a nonempty array");
  freestate::Vector v(static_cast<Eigen::Index>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = complex_from_json(amps[i], "pure state.amplitudes");
  }
  return freestate::PureState::make(std::move(v));
}

freestate::Effect effect_from_json(const Json& j) {
  if (j.is_object() && j.contains("projector")) {
    ObjectReader r(j, "effect");
    const Json& amps = r.required("projector");
    r.finish();
    return freestate::Effect::projector(pure_from_json(Json{{"amplitudes", amps}}));
  }
  ObjectReader r(j, "effect");
  const auto dim = read_dim(r);
  const Json& m = r.required("matrix");
  r.finish();
  return freestate::Effect::validate(matrix_from_json(m, dim, "effect.matrix"));
}

Json to_json(const freestate::Complex& z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const freestate::Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(to_json(freestate::Complex(m(r, c))));
  }
  return out;
}

Json to_json(const freestate::Freestate& s) {
  Json gens = Json::array();
  for (const auto& g : s.generators()) gens.push_back(to_json(g.matrix()));
  return Json{{"dim", s.dim()}, {"generators", gens}};
}

Json to_json(const freestate::ClassicalFreestate& s) {
  return Json{{"n", s.n_outcomes()}, {"generators", s.generators()}};
}

Json to_json(const freestate::Interval& i) { return Json{{"lo", i.lo}, {"hi", i.hi}}; }

Json to_json(const freestate::Witness& w) {
  auto side = [](freestate::Side s) { return s == freestate::Side::First ? "first" : "second"; };
  if (const auto* p = std::get_if<freestate::PureWitness>(&w)) {
    Json amps = Json::array();
    for (Eigen::Index i = 0; i < p->psi.amplitudes().size(); ++i) amps.push_back(to_json(p->psi.amplitudes()(i)));
    return Json{{"type", "pure"},      {"psi", amps},           {"gap", p->gap},
                {"side", side(p->side)}, {"generator", p->generator}, {"value", p->value},
                {"other_interval", to_json(p->other)}};
  }
  const auto& h = std::get<freestate::HermitianWitness>(w);
  return Json{{"type", "hermitian"},
              {"w", to_json(h.w)},
              {"gap", h.gap},
              {"side", side(h.side)},
              {"generator", h.generator}};
}

// ---- machine ----

toyvm::MachineConfig machine_config_from_json(const Json& j) {
  ObjectReader r(j, "machine");
  toyvm::MachineConfig c;
  c.step_budget = r.get_or<std::uint32_t>("step_budget", c.step_budget);
  c.rand_budget = r.get_or<std::uint32_t>("rand_budget", c.rand_budget);
  c.output_budget = r.get_or<std::uint32_t>("output_budget", c.output_budget);
  r.finish();
  c.validate();
  return c;
}

Json to_json(const toyvm::MachineConfig& c) {
  return Json{{"step_budget", c.step_budget}, {"rand_budget", c.rand_budget}, {"output_budget", c.output_budget}};
}

// ---- arena ----

namespace {

std::uint8_t read_bit(ObjectReader& r, const std::string& key) {
  const auto v = r.get<std::uint64_t>(key);
  if (v > 1) throw SchemaError(r.where() + "." + key + " must be 0 or 1");
  return static_cast<std::uint8_t>(v);
}

}  // namespace

arena::Subject subject_from_json(const Json& j) {
  if (j.is_string()) return arena::library::by_name(j.get<std::string>());
  ObjectReader r(j, "subject");
  if (r.has("builtin")) {
    const auto name = r.get<std::string>("builtin");
    if (name == "clocked_freebits") {
      const Json& fire = r.required("fire_at");
      r.finish();
      if (!fire.is_array()) throw SchemaError("subject.fire_at must be an array");
      std::vector<std::size_t> at;
      for (const auto& x : fire) at.push_back(convert<std::size_t>(x, "subject.fire_at"));
      return arena::library::clocked_freebits(at);
    }
    r.finish();
    return arena::library::by_name(name);
  }
  const auto name = r.get_or<std::string>("name", "subject");
  const auto kind = arena::parse_kind(r.get<std::string>("kind"));
  const auto n_states = r.get<std::uint32_t>("n_states");
  const auto initial = r.get_or<std::uint32_t>("initial", 0);
  const auto budget = r.get_or<std::uint32_t>("freebit_budget", 0);
  const Json& edges = r.required("edges");
  r.finish();
  if (!edges.is_array()) throw SchemaError("subject.edges must be an array");
  std::vector<arena::Edge> out;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    ObjectReader er(edges[i], "subject.edges[" + std::to_string(i) + "]");
    arena::Edge e;
    e.from = er.get<std::uint32_t>("from");
    e.on_input = read_bit(er, "on_input");
    e.to = er.get<std::uint32_t>("to");
    e.emit = read_bit(er, "emit");
    if (er.has("prob")) e.prob = er.get<double>("prob");
    if (er.has("freebit_index")) e.freebit_index = er.get<std::uint32_t>("freebit_index");
    if (er.has("freebit_value")) e.freebit_value = read_bit(er, "freebit_value");
    er.finish();
    out.push_back(e);
  }
  return arena::Subject::make(name, kind, n_states, initial, std::move(out), budget);
}

Json to_json(const arena::Subject& s) {
  Json edges = Json::array();
  for (const auto& e : s.edges()) {
    Json je{{"from", e.from}, {"on_input", e.on_input}, {"to", e.to}, {"emit", e.emit}};
    if (e.prob) je["prob"] = *e.prob;
    if (e.freebit_index) je["freebit_index"] = *e.freebit_index;
    if (e.freebit_value) je["freebit_value"] = *e.freebit_value;
    edges.push_back(je);
  }
  return Json{{"name", s.name()},
              {"kind", arena::kind_name(s.kind())},
              {"n_states", s.n_states()},
              {"initial", s.initial_state()},
              {"freebit_budget", s.freebit_budget()},
              {"edges", edges}};
}

arena::PredictorFactory predictor_from_json(const Json& j) {
  ObjectReader r(j, "predictor");
  const auto kind = r.get<std::string>("kind");
  if (kind == "constant") {
    const auto p = r.get<double>("p");
    r.finish();
    return arena::constant_predictor(p);
  }
  if (kind == "table") {
    const auto w = r.get<std::size_t>("window");
    r.finish();
    return arena::table_learner(w);
  }
  if (kind == "bayes") {
    const Json& fam = r.required("family");
    r.finish();
    if (!fam.is_array()) throw SchemaError("predictor.family must be an array of subjects");
    std::vector<arena::Subject> members;
    for (const auto& s : fam) members.push_back(subject_from_json(s));
    return arena::bayes_family_predictor(std::move(members));
  }
  throw SchemaError("predictor.kind must be constant, table or bayes (got '" + kind + "')");
}

Json to_json(const arena::GameConfig& c) {
  return Json{{"t", c.t},
              {"u", c.u},
              {"epsilon", c.epsilon},
              {"delta", c.delta},
              {"trials", c.trials},
              {"input_p", c.input_p},
              {"adversary", c.adversary == arena::AdversaryMode::Adaptive ? "adaptive" : "oblivious"},
              {"seed", c.seed},
              {"causality_probes", c.causality_probes}};
}

Json to_json(const arena::Verdict& v) {
  Json distances = Json::array();
  for (const auto& t : v.trials) distances.push_back(t.distance);
  return Json{{"subject", v.subject},
              {"predictor", v.predictor},
              {"config", to_json(v.config)},
              {"distances", distances},
              {"successes", v.successes},
              {"pass_fraction", v.pass_fraction},
              {"pass", v.pass},
              {"confidence_interval", Json{{"level", 0.95}, {"lo", v.ci_lo}, {"hi", v.ci_hi}}},
              {"certified", v.certified}};
}

Json to_json(const arena::ClassificationReport& r) {
  Json classes = Json::array();
  for (const auto& c : r.classes) {
    Json games = Json::array();
    for (const auto& g : c.games) {
      games.push_back(Json{{"subject", g.subject},
                           {"predictor", g.predictor},
                           {"t", g.entry.t},
                           {"epsilon", g.entry.epsilon},
                           {"delta", g.entry.delta},
                           {"pass_fraction", g.pass_fraction},
                           {"pass", g.pass},
                           {"min_distance", g.min_distance},
                           {"max_distance", g.max_distance}});
    }
    classes.push_back(Json{{"name", c.name}, {"label", c.label}, {"games", games}});
  }
  return Json{{"classes", classes}, {"scope", r.scope_note}};
}

// ---- gadgets ----

gadgets::CausalGraph causal_graph_from_json(const Json& j) {
  ObjectReader r(j, "graph");
  const Json& nodes = r.required("nodes");
  const Json* edges = r.optional("edges");
  r.finish();
  if (!nodes.is_array()) throw SchemaError("graph.nodes must be an array");
  gadgets::CausalGraph g;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    ObjectReader nr(nodes[i], "graph.nodes[" + std::to_string(i) + "]");
    gadgets::Node n;
    n.id = nr.get<std::string>("id");
    const auto kind = nr.get<std::string>("kind");
    if (kind == "micro") {
      n.kind = gadgets::FactKind::Micro;
    } else if (kind == "macro") {
      n.kind = gadgets::FactKind::Macro;
    } else {
      throw SchemaError(nr.where() + ".kind must be micro or macro");
    }
    n.time = nr.get<std::int64_t>("time");
    nr.finish();
    g.nodes.push_back(std::move(n));
  }
  if (edges) {
    if (!edges->is_array()) throw SchemaError("graph.edges must be an array");
    for (std::size_t i = 0; i < edges->size(); ++i) {
      const Json& e = (*edges)[i];
      if (e.is_array() && e.size() == 2 && e[0].is_string() && e[1].is_string()) {
        g.edges.push_back({e[0].get<std::string>(), e[1].get<std::string>()});
        continue;
      }
      ObjectReader er(e, "graph.edges[" + std::to_string(i) + "]");
      gadgets::CausalEdge ce;
      ce.cause = er.get<std::string>("cause");
      ce.effect = er.get<std::string>("effect");
      er.finish();
      g.edges.push_back(std::move(ce));
    }
  }
  return g;
}

Json to_json(const gadgets::ClassicalStrategy& s) {
  return Json{{"alice", {s.alice[0], s.alice[1]}}, {"bob", {s.bob[0], s.bob[1]}}};
}

Json to_json(const gadgets::Violation& v) { return Json{{"rule", v.rule}, {"detail", v.detail}}; }

Json rational_json(const gadgets::Rational& r) {
  return Json{{"string", gadgets::to_string(r)}, {"value", gadgets::to_double(r)}};
}

}  // namespace knightian::io
