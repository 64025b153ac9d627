#pragma once

// The prediction game: finite-state subjects with screenable input bits and
// observable behavior bits, input-monitoring predictors that emit a forecast
// at time t, and scoring of that forecast against the true conditional
// distribution of B_{t,u} given the realized inputs I_{t,u}.
//
// Time is discrete. At each instant v the subject reads input bit I_v, takes
// the transition group for (state, I_v), emits B_v and moves. A group is one
// deterministic edge, a probabilistic fan-out, or a freebit pair (one edge
// per value of a Knightian bit). A freebit is consumed the one time its group
// is traversed and never used again.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "knightian/bits.hpp"
#include "knightian/error.hpp"
#include "knightian/kernels.hpp"

namespace knightian::arena {

inline constexpr std::size_t kMaxHorizon = 20;
inline constexpr std::size_t kMaxFreebits = 16;

class HorizonTooLong : public ValidationError {
 public:
  explicit HorizonTooLong(std::size_t h)
      : ValidationError("HorizonTooLong", "u - t = " + std::to_string(h) + " exceeds " +
                                              std::to_string(kMaxHorizon)) {}
};

class BudgetTooLarge : public ValidationError {
 public:
  explicit BudgetTooLarge(std::size_t b)
      : ValidationError("BudgetTooLarge", "freebit budget " + std::to_string(b) + " exceeds " +
                                              std::to_string(kMaxFreebits)) {}
};

class ForecastViolatesCausality : public ValidationError {
 public:
  explicit ForecastViolatesCausality(const std::string& detail)
      : ValidationError("ForecastViolatesCausality", detail) {}
};

enum class SubjectKind { Deterministic, Noisy, Freebit, GerbilHybrid };

const char* kind_name(SubjectKind k);
SubjectKind parse_kind(const std::string& s);

struct Edge {
  std::uint32_t from = 0;
  std::uint8_t on_input = 0;
  std::uint32_t to = 0;
  std::uint8_t emit = 0;
  std::optional<double> prob;
  std::optional<std::uint32_t> freebit_index;
  std::optional<std::uint8_t> freebit_value;
};

struct Branch {
  std::uint32_t to = 0;
  std::uint8_t emit = 0;
  double prob = 1.0;
};

enum class GroupType { Deterministic, Probabilistic, Freebit };

struct Group {
  GroupType type = GroupType::Deterministic;
  /// Freebit groups hold exactly two branches, indexed by the freebit value.
  std::vector<Branch> branches;
  std::uint32_t freebit_index = 0;
};

/// A validated subject specification.
class Subject {
 public:
  /// Validation: every (state, input) has exactly one group; probabilistic
  /// groups sum to 1 within 1e-12; freebit groups are a 0/1 pair with an
  /// index below the budget, each index is used by one group only, and no
  /// freebit group sits on a cycle (so it can be traversed at most once). The
  /// kind restricts group types: Deterministic allows only deterministic
  /// groups, Noisy no freebits, Freebit no probabilistic groups.
  static Subject make(std::string name, SubjectKind kind, std::uint32_t n_states, std::uint32_t initial,
                      std::vector<Edge> edges, std::uint32_t freebit_budget);

  const std::string& name() const { return name_; }
  SubjectKind kind() const { return kind_; }
  std::uint32_t n_states() const { return n_states_; }
  std::uint32_t initial_state() const { return initial_; }
  std::uint32_t freebit_budget() const { return budget_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Group& group(std::uint32_t state, std::uint8_t input) const { return groups_[state * 2 + input]; }

 private:
  std::string name_;
  SubjectKind kind_ = SubjectKind::Deterministic;
  std::uint32_t n_states_ = 0;
  std::uint32_t initial_ = 0;
  std::uint32_t budget_ = 0;
  std::vector<Edge> edges_;
  std::vector<Group> groups_;
};

/// Values of every freebit, indexed by freebit index.
using FreebitAssignment = std::vector<std::uint8_t>;

/// The exact physical state at some instant: machine state plus which
/// freebits are already used up (and the values they took).
struct SubjectState {
  std::uint32_t state = 0;
  std::vector<bool> consumed;
  FreebitAssignment values;

  static SubjectState initial(const Subject& s);
  std::size_t consumed_count() const;
};

/// Dense distribution over behavior strings of length h; index k holds the
/// string whose bits, first instant first, are the binary digits of k.
using SuffixDistribution = std::vector<double>;

/// Takes one step with real randomness; a freebit met here is resolved from
/// `rng` and recorded as consumed.
std::uint8_t step(const Subject& s, SubjectState& st, std::uint8_t input, std::mt19937_64& rng);

/// Exact D(B_{t,u} | I_{t,u}) from a known state at t; `assignment` fixes
/// every freebit not yet consumed. Throws HorizonTooLong.
SuffixDistribution true_distribution(const Subject& s, const SubjectState& at_t, const Bits& future_inputs,
                                     const FreebitAssignment& assignment);

/// Exact distribution of B_{t,u} starting from the initial state at time 0,
/// given inputs over [0, u) and a full freebit assignment; branches before t
/// are marginalized.
SuffixDistribution true_distribution(const Subject& s, const Bits& inputs, std::size_t t, std::size_t u,
                                     const FreebitAssignment& assignment);

/// Half the L1 distance; the shorter vector is padded with zeros.
double variation_distance(const std::vector<double>& p, const std::vector<double>& q);

/// A forecast f: future inputs -> conditional distribution of the behaviors.
/// prob_one(k, inputs, behaviors) is Pr[B_{t+k} = 1] given all of I_{t,u}
/// and behaviors B_{t,t+k}. A causal forecast ignores inputs past index k.
class Forecast {
 public:
  virtual ~Forecast() = default;
  virtual double prob_one(std::size_t k, const Bits& inputs, const Bits& behaviors) const = 0;
};

SuffixDistribution forecast_distribution(const Forecast& f, const Bits& inputs);

/// Queries f on input pairs that share a stem and differ afterwards; throws
/// ForecastViolatesCausality on the first disagreement inside the stem.
void probe_causality(const Forecast& f, std::size_t horizon, std::size_t probes, std::mt19937_64& rng);

class Predictor {
 public:
  virtual ~Predictor() = default;
  /// One monitored instant of the training phase [0, t).
  virtual void observe(std::uint8_t input, std::uint8_t behavior) = 0;
  virtual std::unique_ptr<Forecast> emit_forecast() const = 0;
};

struct PredictorFactory {
  std::string name;
  std::function<std::unique_ptr<Predictor>()> make;
};

/// Forecasts Pr[B = 1] = p at every instant.
PredictorFactory constant_predictor(double p);
/// Frequency table keyed on the last `window` inputs (current one included)
/// and the last `window` behaviors; unseen contexts get 1/2.
PredictorFactory table_learner(std::size_t window);
/// Exact Bayesian filter over (member, state) for a known family of subjects,
/// started uniform over members at their initial states. Freebit groups are
/// modelled as fair coins.
PredictorFactory bayes_family_predictor(std::vector<Subject> family);

enum class AdversaryMode { Adaptive, Oblivious };

struct GameConfig {
  std::size_t t = 64;
  std::size_t u = 68;
  double epsilon = 0.05;
  double delta = 0.05;
  std::size_t trials = 200;
  /// Exogenous inputs are i.i.d. Bernoulli(input_p), training and future.
  double input_p = 0.5;
  AdversaryMode adversary = AdversaryMode::Adaptive;
  std::uint64_t seed = 1;
  std::size_t causality_probes = 8;

  void validate() const;
};

struct AdversaryResult {
  FreebitAssignment assignment;
  double distance = 0.0;
};

/// Worst-case resolution of the unconsumed freebits against the forecast;
/// ties go to the lexicographically smallest assignment (lowest index most
/// significant). Throws BudgetTooLarge past 16 freebits.
AdversaryResult adversary_resolution(const Subject& s, const SubjectState& at_t, const Forecast& f,
                                     const Bits& future_inputs);

struct Trial {
  double distance = 0.0;
  Bits future_inputs;
  FreebitAssignment assignment;
  std::size_t freebits_consumed = 0;
};

struct Verdict {
  std::string subject;
  std::string predictor;
  GameConfig config;
  std::vector<Trial> trials;
  std::size_t successes = 0;  // trials with distance < epsilon
  double pass_fraction = 0.0;
  bool pass = false;  // pass_fraction >= 1 - delta
  double ci_lo = 0.0;  // Clopper-Pearson 95% on the success rate
  double ci_hi = 1.0;
  bool certified = false;  // ci_lo >= 1 - delta
};

Verdict run_game(const Subject& s, const PredictorFactory& p, const GameConfig& cfg,
                 kernels::Exec policy = kernels::Exec::Parallel);

/// Two-sided Clopper-Pearson interval for a binomial proportion.
std::pair<double, double> clopper_pearson(std::size_t successes, std::size_t trials, double confidence = 0.95);

struct ReferenceClass {
  std::string name;
  std::vector<Subject> members;
};

struct ScheduleEntry {
  std::size_t t = 0;
  double epsilon = 0.05;
  double delta = 0.05;
};

enum class QuantifierOrder {
  /// One predictor must pass every entry.
  PredictorFirst,
  /// Each entry may be passed by a different predictor.
  EntryFirst,
};

struct ClassifyConfig {
  std::size_t horizon = 4;  // u - t
  std::size_t trials = 200;
  double input_p = 0.5;
  AdversaryMode adversary = AdversaryMode::Adaptive;
  QuantifierOrder order = QuantifierOrder::PredictorFirst;
  std::uint64_t seed = 1;
};

struct GameSummary {
  std::string subject;
  std::string predictor;
  ScheduleEntry entry;
  double pass_fraction = 0.0;
  bool pass = false;
  double min_distance = 0.0;
  double max_distance = 0.0;
};

struct ClassVerdict {
  std::string name;
  /// "mechanistic-at-scale" or "unpredicted-at-scale".
  std::string label;
  std::vector<GameSummary> games;
};

struct ClassificationReport {
  std::vector<ClassVerdict> classes;
  std::string scope_note;
};

ClassificationReport classify(const std::vector<ReferenceClass>& classes,
                              const std::vector<PredictorFactory>& predictors,
                              const std::vector<ScheduleEntry>& schedule, const ClassifyConfig& cfg,
                              kernels::Exec policy = kernels::Exec::Parallel);

/// Ready-made subjects and classes.
namespace library {
Subject parrot();          // B_v = I_{v-1}
Subject inverter();        // B_v = not I_v
Subject toggler();         // alternates 0, 1, 0, ...
Subject constant(std::uint8_t bit);
Subject and_memory();      // B_v = I_v and I_{v-1}
Subject fair_coin();
Subject sticky_coin(double stay);  // repeats its last behavior with prob `stay`
Subject noisy_parrot(double fidelity);
/// Emits 0 except at the listed instants, where it emits a fresh freebit.
Subject clocked_freebits(const std::vector<std::size_t>& fire_at);
/// Four-state AI/gerbil hybrid; instant 2 is a freebit tiebreak.
Subject gerbil_hybrid();

ReferenceClass deterministic_class();
ReferenceClass noisy_class();
ReferenceClass freebit_class(const std::vector<std::size_t>& fire_at);

/// Looks up a library subject by name ("parrot", "sticky_coin", ...).
Subject by_name(const std::string& name);
}  // namespace library

}  // namespace knightian::arena
