#include "doctest.h"
#include "knightian/json_io.hpp"

using namespace knightian;
using namespace knightian::io;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("json_io") {
  TEST_CASE("unknown keys are named") {
    const auto msg = error_of([] { freestate_from_json(parse_text(R"({"dim": 1, "generators": [[1]], "colour": 2})")); });
    CHECK(msg.find("UnknownKey") != std::string::npos);
    CHECK(msg.find("colour") != std::string::npos);

    const auto m2 = error_of([] { machine_config_from_json(parse_text(R"({"step_budget": 9, "stepbudget": 9})")); });
    CHECK(m2.find("stepbudget") != std::string::npos);

    const auto m3 = error_of([] {
      subject_from_json(parse_text(
          R"({"kind": "Deterministic", "n_states": 1, "edges": [{"from": 0, "on_input": 0, "to": 0, "emit": 0, "weight": 1}]})"));
    });
    CHECK(m3.find("weight") != std::string::npos);
    CHECK(m3.find("edges[0]") != std::string::npos);
  }

  TEST_CASE("schema errors") {
    CHECK_THROWS_AS(parse_text("{not json"), ValidationError);
    CHECK_THROWS_AS(freestate_from_json(parse_text(R"({"dim": 2})")), ValidationError);
    CHECK_THROWS_AS(machine_config_from_json(parse_text(R"({"step_budget": -1})")), ValidationError);
    CHECK_THROWS_AS(machine_config_from_json(parse_text(R"({"step_budget": "9"})")), ValidationError);
    CHECK_THROWS_AS(predictor_from_json(parse_text(R"({"kind": "oracle"})")), ValidationError);
    CHECK_THROWS_AS(subject_from_json(parse_text(R"("no_such_subject")")), ValidationError);
    CHECK_THROWS_AS(causal_graph_from_json(parse_text(R"({"nodes": [{"id": "a", "kind": "meso", "time": 0}]})")),
                    ValidationError);
  }

  TEST_CASE("freestate round trip") {
    const auto j = parse_text(R"({"dim": 2, "generators": [[1, 0, 0, 0], [0.5, [0, -0.5], [0, 0.5], 0.5]]})");
    const auto s = freestate_from_json(j);
    CHECK(s.generators().size() == 2);
    const auto again = freestate_from_json(to_json(s));
    CHECK((again.generators()[1].matrix() - s.generators()[1].matrix()).norm() < 1e-15);

    const auto c = classical_from_json(parse_text(R"({"n": 2, "generators": [[0.9, 0.1], [0.5, 0.5]]})"));
    CHECK(classical_from_json(to_json(c)).generators() == c.generators());

    const auto e = effect_from_json(parse_text(R"({"projector": [1, 0]})"));
    CHECK(std::abs(e.matrix()(0, 0) - 1.0) < 1e-15);
  }

  TEST_CASE("subject round trip") {
    for (const auto& s : {arena::library::gerbil_hybrid(), arena::library::sticky_coin(0.8),
                          arena::library::clocked_freebits({3, 5})}) {
      const auto back = subject_from_json(to_json(s));
      CHECK(to_json(back).dump() == to_json(s).dump());
    }
    const auto b = subject_from_json(parse_text(R"({"builtin": "clocked_freebits", "fire_at": [4]})"));
    CHECK(b.freebit_budget() == 1);
    CHECK(subject_from_json(parse_text(R"("parrot")")).name() == "parrot");
  }

  TEST_CASE("causal graph edge forms") {
    const auto g = causal_graph_from_json(parse_text(
        R"({"nodes": [{"id": "a", "kind": "macro", "time": 0}, {"id": "b", "kind": "micro", "time": 1}],
            "edges": [["a", "b"], {"cause": "b", "effect": "a"}]})"));
    REQUIRE(g.edges.size() == 2);
    CHECK(g.edges[1].cause == "b");
  }

  TEST_CASE("rationals serialize as strings and floats") {
    const auto j = rational_json(gadgets::Rational(3, 4));
    CHECK(j.dump() == R"({"string":"3/4","value":0.75})");
  }
}
