#include <cmath>

#include "doctest.h"
#include "knightian/sophistication.hpp"
#include "oracles.hpp"

using namespace knightian;
using namespace knightian::soph;

namespace {

const toyvm::MachineConfig kCfg{256, 16, 64};
// Listing x instead of printing it costs at most an EMIT1 up front (the
// gamma code of m = 1) plus up to four more header bits.
constexpr unsigned kListingConstant = 7;

const Tabulator& tab20() {
  static const Tabulator t(20, kCfg);
  return t;
}

// Output of a witness, re-run through the independent interpreter.
Bits rerun(const toyvm::Program& p) {
  const auto o = oracle::run_body(p.body(), kCfg.step_budget, kCfg.rand_budget, kCfg.output_budget,
                                  Bits(kCfg.rand_budget, 0));
  REQUIRE(o.halted);
  return o.output;
}

}  // namespace

TEST_SUITE("sophistication") {
  TEST_CASE("kolmogorov examples") {
    const auto k0 = tab20().kolmogorov(Bits{});
    REQUIRE(found(k0));
    CHECK(result(k0).value == 1);
    CHECK(result(k0).search_bound == 20);
    CHECK(result(k0).step_budget == 256);

    const auto k8 = kolmogorov(Bits(8, 0), 24, kCfg);
    REQUIRE(found(k8));
    CHECK(result(k8).value == 16);
    CHECK(result(k8).witness.disassemble() == "EMIT0 INC JNZ");
    // A patternless 8-bit string has no program within the bound.
    CHECK_FALSE(found(kolmogorov(parse_bits("01101001"), 24, kCfg)));
    CHECK_FALSE(found(tab20().kolmogorov(parse_bits("010110"))));
    CHECK_THROWS_AS(Tabulator(25, kCfg), LimitExceeded);
  }

  TEST_CASE("witnesses reproduce their targets") {
    for (unsigned n = 0; n <= 6; ++n) {
      for (const auto& x : all_bitstrings(n)) {
        const auto k = tab20().kolmogorov(x);
        if (!found(k)) continue;
        CHECK(result(k).witness.length() == result(k).value);
        CHECK(rerun(result(k).witness) == x);
        CHECK_FALSE(result(k).witness.uses_rand());
      }
    }
  }

  TEST_CASE("kolmogorov agrees with a direct search") {
    // Shortest halting deterministic program per output, by brute force.
    std::map<Bits, unsigned> best;
    for (const auto& p : toyvm::enumerate(16)) {
      if (p.uses_rand()) continue;
      const auto o = oracle::run_body(p.body(), kCfg.step_budget, 0, kCfg.output_budget, Bits{});
      if (!o.halted) continue;
      auto it = best.find(o.output);
      if (it == best.end() || p.length() < it->second) best[o.output] = static_cast<unsigned>(p.length());
    }
    const Tabulator t(16, kCfg);
    for (unsigned n = 0; n <= 8; ++n) {
      for (const auto& x : all_bitstrings(n)) {
        const auto k = t.kolmogorov(x);
        const auto it = best.find(x);
        CHECK(found(k) == (it != best.end()));
        if (found(k)) CHECK(result(k).value == it->second);
      }
    }
  }

  TEST_CASE("a larger step budget never raises K") {
    const Tabulator tight(16, {12, 16, 64});
    const Tabulator loose(16, kCfg);
    for (unsigned n = 0; n <= 8; ++n) {
      for (const auto& x : all_bitstrings(n)) {
        const auto a = tight.kolmogorov(x);
        const auto b = loose.kolmogorov(x);
        if (found(a)) {
          REQUIRE(found(b));
          CHECK(result(b).value <= result(a).value);
        }
      }
    }
  }

  TEST_CASE("counting bound on short descriptions") {
    std::map<unsigned, std::size_t> at_most;
    for (unsigned n = 0; n <= 6; ++n) {
      for (const auto& x : all_bitstrings(n)) {
        const auto k = tab20().kolmogorov(x);
        if (found(k)) ++at_most[result(k).value];
      }
    }
    std::size_t cumulative = 0;
    for (unsigned k = 0; k <= 20; ++k) {
      cumulative += at_most[k];
      CHECK(cumulative <= (std::size_t{1} << (k + 1)));
    }
  }

  TEST_CASE("set listings") {
    const SetListing s({parse_bits("10"), parse_bits("01"), parse_bits("10")});
    CHECK(s.size() == 2);
    CHECK(s.width() == 2);
    CHECK(s.contains(parse_bits("01")));
    CHECK_FALSE(s.contains(parse_bits("11")));
    CHECK(s == SetListing({parse_bits("01"), parse_bits("10")}));
    CHECK_THROWS_AS(SetListing({}), ValidationError);
    CHECK_THROWS_AS(SetListing({parse_bits("0"), parse_bits("01")}), ValidationError);

    const Bits enc = encode_listing(s);
    CHECK(to_string(enc) == "0100110");
    const auto back = parse_listing(enc, 2);
    REQUIRE(back.has_value());
    CHECK(*back == s);
    CHECK_FALSE(parse_listing(enc, 3).has_value());
    Bits extra = enc;
    extra.push_back(0);
    CHECK_FALSE(parse_listing(extra, 2).has_value());
    CHECK_FALSE(parse_listing(Bits{}, 1).has_value());
    // Repeats and order are irrelevant.
    const auto rep = parse_listing(parse_bits("011" "10" "01" "10"), 2);
    REQUIRE(rep.has_value());
    CHECK(*rep == s);
  }

  TEST_CASE("set complexity") {
    const auto single = tab20().set_complexity(SetListing({parse_bits("0")}));
    REQUIRE(found(single));
    const auto k = tab20().kolmogorov(parse_bits("0"));
    CHECK(result(single).value <= result(k).value + kListingConstant);
    // The witness output parses back to the set.
    const auto out = rerun(result(single).witness);
    CHECK(parse_listing(out, 1) == SetListing({parse_bits("0")}));

    const SetListing a({parse_bits("1"), parse_bits("0")});
    const SetListing b({parse_bits("0"), parse_bits("1")});
    const Tabulator t24(24, kCfg);
    const auto ka = t24.set_complexity(a);
    const auto kb = t24.set_complexity(b);
    REQUIRE(found(ka));
    CHECK(result(ka).value == result(kb).value);
    CHECK(result(ka).value == 24);

    // The full cube of width 3 is out of reach of this machine at L <= 24.
    const auto cube = t24.set_complexity(SetListing(all_bitstrings(3)));
    CHECK_FALSE(found(cube));
    CHECK(std::get<NotFound>(cube).search_bound == 24);
  }

  TEST_CASE("singleton bound and monotonicity in c") {
    for (unsigned n = 0; n <= 6; ++n) {
      for (const auto& x : all_bitstrings(n)) {
        const auto k = tab20().kolmogorov(x);
        const auto ks = tab20().set_complexity(SetListing({x}));
        if (found(k) && found(ks)) CHECK(result(ks).value <= result(k).value + kListingConstant);
        std::optional<unsigned> prev;
        for (unsigned c = 0; c <= 24; ++c) {
          const auto s = tab20().sophistication(x, c);
          const auto* r = std::get_if<SophResult>(&s);
          if (!found(k)) {
            CHECK(r == nullptr);
            continue;
          }
          if (r) {
            CHECK(r->value <= result(k).value + kListingConstant);
            CHECK(r->value <= result(k).value + c);
            CHECK(r->witness_set.contains(x));
            CHECK(r->value + r->log2_size <= result(k).value + c + 1e-12);
            CHECK(r->k_of_x == result(k).value);
            CHECK(parse_listing(rerun(r->witness_program), x.size()) == r->witness_set);
          }
          if (prev) {
            REQUIRE(r != nullptr);
            CHECK(r->value <= *prev);
          }
          if (r) prev = r->value;
          // Once c covers the singleton, a set is always found.
          if (found(ks) && static_cast<int>(c) >= static_cast<int>(result(ks).value) - static_cast<int>(result(k).value)) {
            CHECK(r != nullptr);
          }
        }
      }
    }
  }

  TEST_CASE("tabulate rows") {
    const auto rows = tabulate(tab20(), 3, {0, 4, 8});
    REQUIRE(rows.size() == 8);
    for (const auto& row : rows) {
      REQUIRE(row.k.has_value());
      CHECK(*row.k == 16);
      CHECK_FALSE(row.soph.at(0).has_value());
      REQUIRE(row.soph.at(4).has_value());
      CHECK(*row.soph.at(4) == 19);
    }
  }

  TEST_CASE("serial and parallel tabulation agree") {
    const Tabulator a(18, kCfg, kernels::Exec::Serial);
    const Tabulator b(18, kCfg, kernels::Exec::Parallel);
    for (unsigned n = 0; n <= 6; ++n) {
      for (const auto& x : all_bitstrings(n)) {
        const auto ka = a.kolmogorov(x), kb = b.kolmogorov(x);
        CHECK(found(ka) == found(kb));
        if (found(ka)) CHECK(result(ka).witness == result(kb).witness);
      }
    }
  }
}
