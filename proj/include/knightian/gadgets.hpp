#pragma once

// Small worked puzzles: the CHSH game, anthropic room puzzles, Newcomb's
// boxes, and a validator for causal graphs that mix microfacts and
// macrofacts across time.

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "knightian/error.hpp"

namespace knightian::gadgets {

using Rational = boost::rational<std::int64_t>;

/// "p/q", or "p" when q = 1.
std::string to_string(const Rational& r);
/// Accepts "3/4", "-2", or a plain decimal such as "0.999".
Rational parse_rational(const std::string& s);
double to_double(const Rational& r);

// ---- CHSH ----

/// Deterministic responses: a = alice[x], b = bob[y].
struct ClassicalStrategy {
  std::array<std::uint8_t, 2> alice{0, 0};
  std::array<std::uint8_t, 2> bob{0, 0};
};

/// Win probability under uniform x, y; the game is won when a xor b = x and y.
Rational chsh_classical_value(const ClassicalStrategy& s);

struct ChshRow {
  ClassicalStrategy strategy;
  Rational value;
};

struct ChshClassicalResult {
  Rational value;
  ClassicalStrategy witness;  // first maximizer in table order
  Rational minimum;
  /// All 16 strategies; row i has alice = (bit3, bit2), bob = (bit1, bit0) of i.
  std::vector<ChshRow> table;
};

/// Exhaustive over deterministic strategies. Shared randomness cannot help:
/// a mixed strategy's value is an average of deterministic ones.
ChshClassicalResult chsh_classical_optimum();

/// Measurement angles in the X-Z plane; outcome 0 is the projector onto
/// cos(theta)|0> + sin(theta)|1>.
struct QuantumStrategy {
  std::array<double, 2> alice{0.0, 0.0};
  std::array<double, 2> bob{0.0, 0.0};
};

QuantumStrategy chsh_optimal_angles();

/// Win probability for players sharing (|00> + |11>)/sqrt(2), computed from
/// the density matrix and product effects.
double chsh_quantum_value(const QuantumStrategy& s);

// ---- anthropic rooms ----

enum class CountingRule {
  /// Likelihood of the observation = fraction of copies that see it.
  CopyWeighted,
  /// Likelihood = 1 if any copy sees it, else 0.
  BranchWeighted,
};

const char* rule_name(CountingRule r);

struct RoomPuzzle {
  Rational prior_heads{1, 2};
  /// color -> number of copies in that color, per branch.
  std::map<std::string, std::int64_t> heads_rooms;
  std::map<std::string, std::int64_t> tails_rooms;
  std::string observed;

  void validate() const;
};

class NoMatchingRoom : public ValidationError {
 public:
  explicit NoMatchingRoom(const std::string& color)
      : ValidationError("NoMatchingRoom", "no copy in either branch sees '" + color + "'") {}
};

struct RoomPosterior {
  Rational heads;
  Rational tails;
};

RoomPosterior bostrom_posterior(const RoomPuzzle& p, CountingRule rule);

/// Fair coin; heads: 1000 white rooms; tails: 1 white room; observe white.
RoomPuzzle bostrom_variant1();
/// Fair coin; heads: 999 blue + 1 white; tails: 1 white; observe white.
RoomPuzzle bostrom_variant2();

// ---- Newcomb ----

struct NewcombPayoffs {
  Rational big{1000000};  // in the opaque box iff one-boxing was predicted
  Rational small{1000};   // always in the transparent box
};

enum class BoxPolicy { OneBox, TwoBox };

Rational newcomb_expected(const NewcombPayoffs& pay, const Rational& accuracy, BoxPolicy policy);
/// Accuracy at which both policies earn the same.
Rational newcomb_crossover(const NewcombPayoffs& pay);

// ---- causal graphs ----

enum class FactKind { Micro, Macro };

struct Node {
  std::string id;
  FactKind kind = FactKind::Macro;
  std::int64_t time = 0;
};

struct CausalEdge {
  std::string cause;
  std::string effect;
};

struct CausalGraph {
  std::vector<Node> nodes;
  std::vector<CausalEdge> edges;
};

class MalformedGraph : public ValidationError {
 public:
  explicit MalformedGraph(const std::string& detail) : ValidationError("MalformedGraph", detail) {}
};

struct Violation {
  std::string rule;  // "R1", "R2" or "R3"
  std::string detail;
};

struct CausalOptions {
  bool check_r3 = true;
};

/// An edge is backward when cause.time >= effect.time (same-instant edges
/// count as backward).
/// R1: backward edges must end in a microfact.
/// R2: a microfact hit by a backward edge has no other incident edge.
/// R3: a microfact has at most one outgoing edge into macrofacts.
std::vector<Violation> causal_validate(const CausalGraph& g, const CausalOptions& opts = {});

/// True iff g has no directed cycle (self-loops are cycles).
bool acyclicity_check(const CausalGraph& g);

struct RandomGraphParams {
  std::size_t max_nodes = 8;
  std::int64_t max_time = 4;
  /// Chance that an edge is drawn forward in time (otherwise unconstrained).
  double forward_bias = 0.7;
  double micro_fraction = 0.5;
};

CausalGraph random_causal_graph(std::mt19937_64& rng, const RandomGraphParams& params = {});

}  // namespace knightian::gadgets
