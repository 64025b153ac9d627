#include <cmath>
#include <random>

#include "doctest.h"
#include "knightian/freestate.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace knightian;
using namespace knightian::freestate;
using namespace gen;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

DensityMatrix pure(const PureState& p) { return DensityMatrix::from_pure(p); }

Freestate singleton(const DensityMatrix& d) { return Freestate({d}); }

}  // namespace

TEST_SUITE("freestate") {
  TEST_CASE("density validation reports the failing invariant") {
    CHECK_NOTHROW(DensityMatrix::validate(diag2(0.5, 0.5)));
    try {
      DensityMatrix::validate(diag2(1.5, -0.5));
      FAIL("expected NotPSD");
    } catch (const NotPSD& e) {
      CHECK(e.min_eigenvalue == doctest::Approx(-0.5));
    }
    try {
      DensityMatrix::validate(diag2(0.6, 0.6));
      FAIL("expected TraceNotOne");
    } catch (const TraceNotOne& e) {
      CHECK(e.trace == doctest::Approx(1.2));
    }
    Matrix skew = diag2(0.5, 0.5);
    skew(0, 1) = 0.3;
    CHECK_THROWS_AS(DensityMatrix::validate(skew), NotHermitian);
    CHECK_THROWS_AS(PureState::make(Vector::Ones(2)), ValidationError);
  }

  TEST_CASE("knightian_or of the two basis states spans [0, 1]") {
    const auto s = knightian_or(singleton(pure(states::ket0())), singleton(pure(states::ket1())));
    CHECK(s.generators().size() == 2);
    const auto i = effect_interval(s, Effect::projector(states::ket0()));
    CHECK(i.lo == doctest::Approx(0.0));
    CHECK(i.hi == doctest::Approx(1.0));
    CHECK_THROWS_AS(knightian_or(s, singleton(DensityMatrix::maximally_mixed(3))), DimMismatch);
  }

  TEST_CASE("knightian_or is idempotent on intervals") {
    std::mt19937_64 rng(3);
    const auto s = random_freestate(rng, 3, 4);
    const auto ss = knightian_or(s, s);
    for (int i = 0; i < 20; ++i) {
      const auto e = random_effect(rng, 3);
      const auto a = effect_interval(s, e), b = effect_interval(ss, e);
      CHECK(a.lo == b.lo);
      CHECK(a.hi == b.hi);
    }
  }

  TEST_CASE("Knight's interval example") {
    const ClassicalFreestate a({{0.9, 0.1}});
    const ClassicalFreestate b({{0.8, 0.2}, {0.7, 0.3}});
    const ClassicalFreestate c({{0.6, 0.4}, {0.5, 0.5}});
    const auto s = knightian_or(knightian_or(a, b), c);
    const auto i = event_interval(s, {1});
    CHECK(i.lo == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(i.hi == doctest::Approx(0.5).epsilon(1e-15));
  }

  TEST_CASE("event_interval examples and errors") {
    const ClassicalFreestate u({{0.5, 0.5}});
    CHECK(event_interval(u, {1}).lo == 0.5);
    CHECK(event_interval(u, {1}).hi == 0.5);
    const ClassicalFreestate g({{0.9, 0.1}, {0.5, 0.5}});
    CHECK(event_interval(g, {1}).lo == doctest::Approx(0.1));
    CHECK(event_interval(g, {1}).hi == doctest::Approx(0.5));
    CHECK(event_interval(g, {0, 1}).lo == doctest::Approx(1.0));
    CHECK(event_interval(g, {0, 1}).hi == doctest::Approx(1.0));
    CHECK_THROWS_AS(event_interval(g, {2}), ValidationError);
    CHECK_THROWS_AS(event_interval(g, {1, 1}), ValidationError);
    CHECK_THROWS_AS(ClassicalFreestate({{0.5, 0.6}}), ValidationError);
  }

  TEST_CASE("prob_mix expands into midpoint generators") {
    std::mt19937_64 rng(5);
    const auto a = random_density(rng, 2), b = random_density(rng, 2);
    const auto c = random_density(rng, 2), d = random_density(rng, 2);
    const auto mix = prob_mix({{0.5, Freestate({a, b})}, {0.5, Freestate({c, d})}});
    REQUIRE(mix.generators().size() == 4);
    const Matrix expected[4] = {(a.matrix() + c.matrix()) / 2.0, (a.matrix() + d.matrix()) / 2.0,
                                (b.matrix() + c.matrix()) / 2.0, (b.matrix() + d.matrix()) / 2.0};
    for (int i = 0; i < 4; ++i) CHECK((mix.generators()[i].matrix() - expected[i]).norm() < 1e-15);

    const auto one = prob_mix({{1.0, Freestate({a, b})}});
    CHECK(one.generators().size() == 2);
    CHECK((one.generators()[1].matrix() - b.matrix()).norm() == 0.0);

    const auto half = prob_mix({{0.5, singleton(pure(states::ket0()))}, {0.5, singleton(pure(states::ket1()))}});
    REQUIRE(half.generators().size() == 1);
    CHECK((half.generators()[0].matrix() - DensityMatrix::maximally_mixed(2).matrix()).norm() < 1e-15);

    CHECK_THROWS_AS(prob_mix({{0.5, Freestate({a})}, {0.6, Freestate({b})}}), ValidationError);
    CHECK_THROWS_AS(prob_mix({{0.5, Freestate({a})}, {0.5, singleton(DensityMatrix::maximally_mixed(3))}}),
                    DimMismatch);
  }

  TEST_CASE("effect_interval examples") {
    const auto mm = singleton(DensityMatrix::maximally_mixed(2));
    const auto e0 = Effect::projector(states::ket0());
    CHECK(effect_interval(mm, e0).lo == doctest::Approx(0.5));
    CHECK(effect_interval(mm, e0).hi == doctest::Approx(0.5));
    const auto fb = states::full_qubit_freebit();
    CHECK(fb.generators().size() == 6);
    CHECK(effect_interval(fb, e0).lo == doctest::Approx(0.0));
    CHECK(effect_interval(fb, e0).hi == doctest::Approx(1.0));
    CHECK_THROWS_AS(effect_interval(fb, Effect::projector(PureState::make(Vector::Unit(3, 0)))), DimMismatch);
  }

  TEST_CASE("interval laws on random freestates") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t d = 2 + rng() % 3;
      const auto s1 = random_freestate(rng, d, 1 + rng() % 4);
      const auto s2 = random_freestate(rng, d, 1 + rng() % 4);
      const auto e = random_effect(rng, d);
      const auto i1 = effect_interval(s1, e), i2 = effect_interval(s2, e);

      // OR law, exactly.
      const auto io = effect_interval(knightian_or(s1, s2), e);
      CHECK(io.lo == std::min(i1.lo, i2.lo));
      CHECK(io.hi == std::max(i1.hi, i2.hi));

      // Mixture linearity.
      const double w = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const auto im = effect_interval(prob_mix({{w, s1}, {1.0 - w, s2}}), e);
      CHECK(std::abs(im.lo - (w * i1.lo + (1 - w) * i2.lo)) <= 1e-9);
      CHECK(std::abs(im.hi - (w * i1.hi + (1 - w) * i2.hi)) <= 1e-9);

      // Nesting: a sub-hull built from convex combinations of s2.
      std::vector<DensityMatrix> inner;
      for (int k = 0; k < 3; ++k) {
        const auto c = oracle::random_simplex(rng, s2.generators().size());
        Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        for (std::size_t j = 0; j < c.size(); ++j) m += c[j] * s2.generators()[j].matrix();
        inner.push_back(DensityMatrix::validate((m + m.adjoint()) / 2.0));
      }
      const Freestate sub(inner);
      for (const auto& g : sub.generators()) CHECK(hull_contains(s2, g));
      const auto is = effect_interval(sub, e);
      CHECK(is.lo >= i2.lo - 1e-12);
      CHECK(is.hi <= i2.hi + 1e-12);
    }
  }

  TEST_CASE("Monte-Carlo hull sampling stays within the interval") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
      const std::size_t d = 2 + rng() % 3;
      const auto s = random_freestate(rng, d, 2 + rng() % 3);
      const auto e = random_effect(rng, d);
      const auto iv = effect_interval(s, e);
      const auto bi = brute_interval(s, e);
      CHECK(iv.lo == doctest::Approx(bi.lo));
      CHECK(iv.hi == doctest::Approx(bi.hi));
      double mn = 1e300, mx = -1e300;
      for (int k = 0; k < 10000; ++k) {
        // Sharply peaked weights reach the corners of the hull.
        auto c = oracle::random_simplex(rng, s.generators().size());
        for (auto& x : c) x = std::pow(x, 8.0);
        double tot = 0.0;
        for (auto x : c) tot += x;
        double v = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) v += c[j] / tot * expect(e, s.generators()[j].matrix());
        CHECK_MESSAGE(v >= iv.lo - 1e-9, "sample below lo");
        CHECK_MESSAGE(v <= iv.hi + 1e-9, "sample above hi");
        mn = std::min(mn, v);
        mx = std::max(mx, v);
      }
      CHECK(mn - iv.lo <= 0.02);
      CHECK(iv.hi - mx <= 0.02);
    }
  }

  TEST_CASE("hull membership") {
    const auto plus_minus = Freestate({pure(states::plus()), pure(states::minus())});
    CHECK(hull_contains(plus_minus, DensityMatrix::maximally_mixed(2)));
    CHECK_FALSE(hull_contains(plus_minus, pure(states::ket0())));
    CHECK(separate(plus_minus, pure(states::ket0())).margin > 0.1);
    CHECK(separate(plus_minus, DensityMatrix::maximally_mixed(2)).margin <= 1e-9);
  }

  TEST_CASE("separating witness examples") {
    SUBCASE("point against maximally mixed") {
      const auto w = separating_witness(singleton(pure(states::ket0())), singleton(DensityMatrix::maximally_mixed(2)));
      REQUIRE(w.has_value());
      const auto* p = std::get_if<PureWitness>(&*w);
      REQUIRE(p != nullptr);
      CHECK(p->gap == doctest::Approx(0.5));
      // |0> and |1> separate equally well.
      const double a0 = std::norm(p->psi.amplitudes()(0));
      CHECK((std::abs(a0) < 1e-6 || std::abs(a0 - 1.0) < 1e-6));
    }
    SUBCASE("permuted generators give no witness") {
      const auto a = Freestate({pure(states::ket0()), pure(states::plus()), pure(states::minus_i())});
      const auto b = Freestate({pure(states::minus_i()), pure(states::ket0()), pure(states::plus())});
      CHECK_FALSE(separating_witness(a, b).has_value());
    }
    SUBCASE("asymmetric containment") {
      const auto mm = singleton(DensityMatrix::maximally_mixed(2));
      const auto pm = Freestate({pure(states::plus()), pure(states::minus())});
      CHECK(hull_contains(pm, DensityMatrix::maximally_mixed(2)));
      CHECK_FALSE(hull_contains(mm, pure(states::plus())));
      const auto w = separating_witness(mm, pm);
      REQUIRE(w.has_value());
      const auto* p = std::get_if<PureWitness>(&*w);
      REQUIRE(p != nullptr);
      CHECK(p->side == Side::Second);
      CHECK(p->gap == doctest::Approx(0.5));
      // psi is |+> or |-> up to phase.
      const double overlap = std::max(std::abs(states::plus().amplitudes().dot(p->psi.amplitudes())),
                                      std::abs(states::minus().amplitudes().dot(p->psi.amplitudes())));
      CHECK(overlap == doctest::Approx(1.0));
    }
  }

  TEST_CASE("every witness re-verifies independently") {
    std::mt19937_64 rng(29);
    int witnesses = 0;
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t d = 2 + rng() % 2;
      const auto a = random_freestate(rng, d, 1 + rng() % 3);
      const auto b = random_freestate(rng, d, 1 + rng() % 3);
      WitnessOptions opt;
      opt.seed = rng();
      const auto w = separating_witness(a, b, opt);
      REQUIRE(w.has_value());
      ++witnesses;
      if (const auto* p = std::get_if<PureWitness>(&*w)) {
        const auto& own = p->side == Side::First ? a : b;
        const auto& other = p->side == Side::First ? b : a;
        const Effect e = Effect::projector(p->psi);
        const double v = expect(e, own.generators()[p->generator].matrix());
        const auto iv = brute_interval(other, e);
        const double gap = std::max(iv.lo - v, v - iv.hi);
        CHECK(gap > opt.tol);
        CHECK(gap == doctest::Approx(p->gap).epsilon(1e-9));
      } else {
        const auto& h = std::get<HermitianWitness>(*w);
        const auto& own = h.side == Side::First ? a : b;
        const auto& other = h.side == Side::First ? b : a;
        const double v = (h.w * own.generators()[h.generator].matrix()).trace().real();
        double best = -1e300;
        for (const auto& g : other.generators()) best = std::max(best, (h.w * g.matrix()).trace().real());
        CHECK(v - best > opt.tol);
      }
    }
    CHECK(witnesses == 40);
  }

  TEST_CASE("hermitian coordinates pair with functional matrices") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t d = 2 + rng() % 3;
      const auto rho = random_density(rng, d);
      Eigen::VectorXd w = Eigen::VectorXd::Random(static_cast<Eigen::Index>(d * d));
      const double lhs = w.dot(hermitian_coordinates(rho.matrix()));
      const double rhs = (functional_matrix(w, d) * rho.matrix()).trace().real();
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }

  TEST_CASE("clone feasibility") {
    CHECK(clone_feasible(states::ket0(), states::ket1()));
    CHECK(clone_feasible(states::ket0(), states::ket0()));
    CHECK_FALSE(clone_feasible(states::ket0(), states::plus()));
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> ang(0.0, 6.283185307179586);
    for (int i = 0; i < 50; ++i) {
      const auto psi = states::real_qubit(ang(rng));
      const auto phi = states::real_qubit(ang(rng));
      CHECK(clone_feasible(psi, phi) == clone_feasible(phi, psi));
      const auto phased = PureState::make(psi.amplitudes() * std::polar(1.0, ang(rng)));
      CHECK(clone_feasible(psi, phased));
    }
    CHECK_THROWS_AS(clone_feasible(states::ket0(), PureState::make(Vector::Unit(3, 0))), DimMismatch);
  }
}
