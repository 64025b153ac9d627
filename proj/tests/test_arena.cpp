#include <boost/rational.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "knightian/arena.hpp"
#include "knightian/json_io.hpp"

using namespace knightian;
using namespace knightian::arena;

namespace {

// Full-path enumeration over [0, u), marginalized to the suffix [t, u);
// written against the edge list only.
void brute_paths(const Subject& s, std::uint32_t state, const Bits& inputs, std::size_t v, std::size_t t,
                 std::size_t idx, double p, const FreebitAssignment& a, std::vector<double>& out) {
  if (v == inputs.size()) {
    out[idx] += p;
    return;
  }
  std::vector<const Edge*> group;
  for (const auto& e : s.edges()) {
    if (e.from == state && e.on_input == inputs[v]) group.push_back(&e);
  }
  for (const Edge* e : group) {
    double w = 1.0;
    if (e->prob) w = *e->prob;
    if (e->freebit_index && *e->freebit_value != a[*e->freebit_index]) continue;
    const std::size_t next = v >= t ? (idx << 1) | e->emit : idx;
    brute_paths(s, e->to, inputs, v + 1, t, next, p * w, a, out);
  }
}

class FixedForecast : public Forecast {
 public:
  explicit FixedForecast(std::vector<double> p) : p_(std::move(p)) {}
  double prob_one(std::size_t k, const Bits&, const Bits&) const override { return p_[k]; }

 private:
  std::vector<double> p_;
};

// Looks at the last future input: not causal.
class PeekingForecast : public Forecast {
 public:
  double prob_one(std::size_t, const Bits& inputs, const Bits&) const override { return inputs.back() ? 0.9 : 0.1; }
};

GameConfig config(std::size_t t, std::size_t h, std::size_t trials, std::uint64_t seed) {
  GameConfig c;
  c.t = t;
  c.u = t + h;
  c.trials = trials;
  c.seed = seed;
  return c;
}

double max_distance(const Verdict& v) {
  double m = 0.0;
  for (const auto& t : v.trials) m = std::max(m, t.distance);
  return m;
}

double min_distance(const Verdict& v) {
  double m = 1.0;
  for (const auto& t : v.trials) m = std::min(m, t.distance);
  return m;
}

}  // namespace

TEST_SUITE("arena") {
  TEST_CASE("true distribution examples") {
    const auto parrot = library::parrot();
    const Bits in = parse_bits("1011001");
    const auto d = true_distribution(parrot, in, 3, 7, {});
    // B_v = I_{v-1}: behaviors over [3, 7) are inputs over [2, 6).
    const std::size_t expect = to_uint(parse_bits("1100"));
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(d[i] == (i == expect ? 1.0 : 0.0));

    const auto coin = true_distribution(library::fair_coin(), parse_bits("010"), 0, 3, {});
    REQUIRE(coin.size() == 8);
    for (double p : coin) CHECK(p == 0.125);

    const auto g = true_distribution(library::gerbil_hybrid(), parse_bits("1101"), 0, 4, {1});
    CHECK(g[to_uint(parse_bits("1011"))] == 1.0);
    const auto g0 = true_distribution(library::gerbil_hybrid(), parse_bits("1101"), 0, 4, {0});
    CHECK(g0[to_uint(parse_bits("1001"))] == 1.0);

    CHECK_THROWS_AS(true_distribution(parrot, Bits(30, 0), 0, 21, {}), HorizonTooLong);
    CHECK_THROWS_AS(true_distribution(parrot, Bits(3, 0), 0, 4, {}), ValidationError);
    CHECK_THROWS_AS(true_distribution(library::gerbil_hybrid(), Bits(4, 0), 0, 4, {}), ValidationError);
  }

  TEST_CASE("true distribution matches full path enumeration") {
    std::mt19937_64 rng(53);
    const std::vector<Subject> subjects = {library::sticky_coin(0.7), library::noisy_parrot(0.85),
                                           library::gerbil_hybrid(), library::clocked_freebits({1, 4})};
    for (const auto& s : subjects) {
      for (int trial = 0; trial < 20; ++trial) {
        const std::size_t u = 2 + rng() % 6;
        const std::size_t t = rng() % u;
        Bits in(u);
        for (auto& b : in) b = static_cast<std::uint8_t>(rng() & 1);
        FreebitAssignment a(s.freebit_budget());
        for (auto& b : a) b = static_cast<std::uint8_t>(rng() & 1);
        std::vector<double> want(std::size_t{1} << (u - t), 0.0);
        brute_paths(s, s.initial_state(), in, 0, t, 0, 1.0, a, want);
        const auto got = true_distribution(s, in, t, u, a);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("variation distance examples") {
    CHECK(variation_distance({0.5, 0.5}, {0.5, 0.5}) == 0.0);
    CHECK(variation_distance({1.0, 0.0}, {0.0, 1.0}) == 1.0);
    CHECK(variation_distance({0.5, 0.5}, {0.75, 0.25}) == 0.25);
    CHECK(variation_distance({1.0}, {0.0, 1.0}) == 1.0);
  }

  TEST_CASE("variation distance is a metric, in exact arithmetic") {
    using R = boost::rational<std::int64_t>;
    std::mt19937_64 rng(59);
    auto random_dist = [&](std::size_t k) {
      std::vector<std::int64_t> w(k);
      std::int64_t total = 0;
      for (auto& x : w) total += (x = static_cast<std::int64_t>(rng() % 50));
      if (total == 0) {
        w[0] = 1;
        total = 1;
      }
      std::vector<R> p;
      for (auto x : w) p.emplace_back(x, total);
      return p;
    };
    auto dist = [](const std::vector<R>& p, const std::vector<R>& q) {
      R s = 0;
      for (std::size_t i = 0; i < p.size(); ++i) s += boost::abs(p[i] - q[i]);
      return s / 2;
    };
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t k = 2 + rng() % 6;
      const auto p = random_dist(k), q = random_dist(k), r = random_dist(k);
      CHECK((dist(p, p) == R(0)));
      CHECK((dist(p, q) == dist(q, p)));
      CHECK((dist(p, r) <= dist(p, q) + dist(q, r)));
      CHECK((dist(p, q) <= R(1)));
      if (dist(p, q) == R(0)) CHECK((p == q));
      // The floating version agrees.
      std::vector<double> pf, qf;
      for (std::size_t i = 0; i < k; ++i) {
        pf.push_back(boost::rational_cast<double>(p[i]));
        qf.push_back(boost::rational_cast<double>(q[i]));
      }
      CHECK(variation_distance(pf, qf) == doctest::Approx(boost::rational_cast<double>(dist(p, q))).epsilon(1e-12));
    }
  }

  TEST_CASE("subject validation") {
    auto det = [](std::uint32_t f, std::uint8_t i, std::uint32_t t, std::uint8_t e) {
      return Edge{f, i, t, e, std::nullopt, std::nullopt, std::nullopt};
    };
    auto fb = [](std::uint32_t f, std::uint8_t i, std::uint32_t t, std::uint8_t e, std::uint32_t idx) {
      return Edge{f, i, t, e, std::nullopt, idx, e};
    };
    CHECK_THROWS_AS(Subject::make("x", SubjectKind::Deterministic, 1, 0, {det(0, 0, 0, 0)}, 0), ValidationError);
    CHECK_THROWS_AS(Subject::make("x", SubjectKind::Deterministic, 1, 0,
                                  {det(0, 0, 0, 0), det(0, 1, 0, 0), det(0, 1, 0, 1)}, 0),
                    ValidationError);
    CHECK_THROWS_AS(Subject::make("x", SubjectKind::Noisy, 1, 0,
                                  {Edge{0, 0, 0, 0, 0.5, {}, {}}, Edge{0, 0, 0, 1, 0.4, {}, {}}, det(0, 1, 0, 0)}, 0),
                    ValidationError);
    // A freebit on a self-loop could be read twice.
    CHECK_THROWS_AS(Subject::make("x", SubjectKind::Freebit, 1, 0,
                                  {fb(0, 0, 0, 0, 0), fb(0, 0, 0, 1, 0), det(0, 1, 0, 0)}, 1),
                    ValidationError);
    // Traversal with budget 0 is caught up front.
    CHECK_THROWS_AS(Subject::make("x", SubjectKind::Freebit, 2, 0,
                                  {fb(0, 0, 1, 0, 0), fb(0, 0, 1, 1, 0), det(0, 1, 1, 0), det(1, 0, 1, 0),
                                   det(1, 1, 1, 0)},
                                  0),
                    ValidationError);
    // Freebit branches may not steer the future.
    CHECK_THROWS_AS(Subject::make("x", SubjectKind::Freebit, 3, 0,
                                  {fb(0, 0, 1, 0, 0), fb(0, 0, 2, 1, 0), det(0, 1, 1, 0), det(1, 0, 1, 0),
                                   det(1, 1, 1, 0), det(2, 0, 2, 0), det(2, 1, 2, 0)},
                                  1),
                    ValidationError);
    // Kind restrictions.
    CHECK_THROWS_AS(Subject::make("x", SubjectKind::Deterministic, 1, 0,
                                  {Edge{0, 0, 0, 0, 0.5, {}, {}}, Edge{0, 0, 0, 1, 0.5, {}, {}}, det(0, 1, 0, 0)}, 0),
                    ValidationError);
    CHECK_THROWS_AS(library::clocked_freebits({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17}),
                    BudgetTooLarge);
  }

  TEST_CASE("freebit depletion during simulation") {
    const auto s = library::clocked_freebits({2, 5, 7});
    std::mt19937_64 rng(61);
    for (int run = 0; run < 50; ++run) {
      auto st = SubjectState::initial(s);
      std::size_t prev = 0;
      for (std::size_t v = 0; v < 20; ++v) {
        step(s, st, static_cast<std::uint8_t>(rng() & 1), rng);
        const auto used = st.consumed_count();
        CHECK(used <= s.freebit_budget());
        CHECK(used >= prev);
        CHECK(used - prev <= 1);  // one freebit decides at most one behavior bit
        prev = used;
      }
      CHECK(prev == 3);
    }
  }

  TEST_CASE("causality probe") {
    std::mt19937_64 rng(67);
    for (const auto& p : {constant_predictor(0.3), table_learner(2), bayes_family_predictor({library::sticky_coin(0.8)})}) {
      auto pred = p.make();
      for (int i = 0; i < 40; ++i) pred->observe(static_cast<std::uint8_t>(rng() & 1), static_cast<std::uint8_t>(i % 2));
      CHECK_NOTHROW(probe_causality(*pred->emit_forecast(), 6, 32, rng));
    }
    CHECK_THROWS_AS(probe_causality(PeekingForecast{}, 6, 32, rng), ForecastViolatesCausality);
  }

  TEST_CASE("adversary examples") {
    const auto none = library::parrot();
    const auto r0 = adversary_resolution(none, SubjectState::initial(none), FixedForecast({0.5, 0.5}), Bits(2, 0));
    CHECK(r0.assignment.empty());
    CHECK(r0.distance == 0.75);  // point mass against a uniform 2-bit forecast

    const auto one = library::clocked_freebits({0});
    const auto r1 = adversary_resolution(one, SubjectState::initial(one), FixedForecast({0.5}), Bits(1, 0));
    CHECK(r1.assignment == FreebitAssignment{0});
    CHECK(r1.distance == 0.5);

    const auto two = library::clocked_freebits({0, 1});
    const auto r2 = adversary_resolution(two, SubjectState::initial(two), FixedForecast({0.9, 0.9}), Bits(2, 0));
    CHECK(r2.assignment == FreebitAssignment{0, 0});
    CHECK(r2.distance == doctest::Approx(0.99));
  }

  TEST_CASE("one adversarial freebit forces distance at least one half") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto s = library::clocked_freebits({0});
    for (int i = 0; i < 100; ++i) {
      const double p = u(rng);
      const auto r = adversary_resolution(s, SubjectState::initial(s), FixedForecast({p}), Bits(1, 0));
      CHECK(r.distance >= 0.5);
      CHECK(r.distance == doctest::Approx(std::max(p, 1.0 - p)));
    }
  }

  TEST_CASE("deterministic subjects are learned exactly") {
    for (const auto& s : library::deterministic_class().members) {
      const auto v = run_game(s, table_learner(2), config(256, 4, 100, 5));
      CHECK(max_distance(v) == 0.0);
      CHECK(v.pass);
      CHECK(v.certified);
    }
  }

  TEST_CASE("a fair forecast is exact for the fair coin") {
    const auto v = run_game(library::fair_coin(), constant_predictor(0.5), config(16, 5, 50, 9));
    CHECK(max_distance(v) == 0.0);
    CHECK(v.pass);
  }

  TEST_CASE("known-noisy class under the Bayes filter") {
    const auto cls = library::noisy_class();
    for (const auto& s : cls.members) {
      const auto v = run_game(s, bayes_family_predictor(cls.members), config(256, 4, 100, 13));
      CHECK(max_distance(v) < 0.05);
      CHECK(v.pass);
    }
  }

  TEST_CASE("freebit subject defeats fixed forecasts") {
    const auto s = library::clocked_freebits({32});
    for (double p : {0.0, 0.3, 0.5, 0.9}) {
      const auto v = run_game(s, constant_predictor(p), config(32, 3, 40, 17));
      CHECK(min_distance(v) >= 0.5);
      CHECK_FALSE(v.pass);
    }
    GameConfig obl = config(32, 1, 40, 17);
    obl.adversary = AdversaryMode::Oblivious;
    const auto v = run_game(s, constant_predictor(0.5), obl);
    CHECK(min_distance(v) == 0.5);
  }

  TEST_CASE("replay is deterministic and policy independent") {
    const auto s = library::noisy_parrot(0.9);
    const auto p = bayes_family_predictor(library::noisy_class().members);
    const auto a = run_game(s, p, config(64, 4, 64, 99), kernels::Exec::Parallel);
    const auto b = run_game(s, p, config(64, 4, 64, 99), kernels::Exec::Parallel);
    const auto c = run_game(s, p, config(64, 4, 64, 99), kernels::Exec::Serial);
    CHECK(io::to_json(a).dump() == io::to_json(b).dump());
    CHECK(io::to_json(a).dump() == io::to_json(c).dump());
    const auto d = run_game(s, p, config(64, 4, 64, 100));
    CHECK(io::to_json(a).dump() != io::to_json(d).dump());
  }

  TEST_CASE("game config validation") {
    CHECK_THROWS_AS(config(4, 0, 10, 1).validate(), ValidationError);
    CHECK_THROWS_AS(config(4, 21, 10, 1).validate(), HorizonTooLong);
    auto c = config(4, 2, 10, 1);
    c.epsilon = 0.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c.epsilon = 0.1;
    c.delta = 1.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
  }

  TEST_CASE("Clopper-Pearson interval") {
    const auto [lo, hi] = clopper_pearson(10, 10);
    CHECK(lo == doctest::Approx(std::pow(0.025, 0.1)).epsilon(1e-9));
    CHECK(hi == 1.0);
    const auto [lo0, hi0] = clopper_pearson(0, 10);
    CHECK(lo0 == 0.0);
    CHECK(hi0 == doctest::Approx(1.0 - std::pow(0.025, 0.1)).epsilon(1e-9));
    const auto [l5, h5] = clopper_pearson(5, 10);
    CHECK(l5 == doctest::Approx(0.187086).epsilon(1e-5));
    CHECK(h5 == doctest::Approx(0.812914).epsilon(1e-5));
  }

  TEST_CASE("classification labels") {
    ClassifyConfig cfg;
    cfg.trials = 40;
    cfg.horizon = 3;
    cfg.seed = 3;
    const std::vector<ScheduleEntry> sched = {{256, 0.05, 0.05}};
    const auto det = classify({library::deterministic_class()}, {table_learner(2)}, sched, cfg);
    CHECK(det.classes[0].label == "mechanistic-at-scale");
    CHECK(det.classes[0].games.size() == 5);

    const auto noisy = library::noisy_class();
    const auto nr = classify({noisy}, {bayes_family_predictor(noisy.members)}, sched, cfg);
    CHECK(nr.classes[0].label == "mechanistic-at-scale");

    const auto fbc = library::freebit_class({256});
    const auto fr = classify({fbc},
                             {constant_predictor(0.5), table_learner(2), bayes_family_predictor(fbc.members)},
                             sched, cfg);
    CHECK(fr.classes[0].label == "unpredicted-at-scale");
    for (const auto& g : fr.classes[0].games) CHECK(g.min_distance >= 0.5);
    CHECK(fr.scope_note.find("supplied") != std::string::npos);
  }

  TEST_CASE("quantifier order") {
    // toggler emits 0 at even instants: constant(0) handles t = 8, constant(1)
    // handles t = 9, and neither handles both.
    ClassifyConfig cfg;
    cfg.trials = 20;
    cfg.horizon = 1;
    const ReferenceClass cls{"toggler", {library::toggler()}};
    const std::vector<ScheduleEntry> sched = {{8, 0.05, 0.05}, {9, 0.05, 0.05}};
    const std::vector<PredictorFactory> preds = {constant_predictor(0.0), constant_predictor(1.0)};
    CHECK(classify({cls}, preds, sched, cfg).classes[0].label == "unpredicted-at-scale");
    cfg.order = QuantifierOrder::EntryFirst;
    CHECK(classify({cls}, preds, sched, cfg).classes[0].label == "mechanistic-at-scale");
  }
}
