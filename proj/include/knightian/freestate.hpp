#pragma once

// Knightian states: convex sets of density matrices (quantum) or probability
// vectors (classical), kept as finite generator lists. The represented set is
// always the convex hull of the generators.

#include <complex>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "knightian/error.hpp"

namespace knightian::freestate {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-9;
inline constexpr double kPsdTol = 1e-9;
inline constexpr double kTraceTol = 1e-9;
inline constexpr double kNormTol = 1e-9;
inline constexpr double kProbabilityTol = 1e-12;
/// L-infinity distance (in real Hermitian coordinates) under which a point
/// counts as a hull member.
inline constexpr double kMembershipTol = 1e-7;

class PureState {
 public:
  /// Throws ValidationError("NotNormalized") if | |amps|^2 - 1 | > 1e-9.
  static PureState make(Vector amplitudes);
  /// Normalizes first; throws if the vector is zero.
  static PureState normalized(Vector amplitudes);

  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const Vector& amplitudes() const { return amps_; }

 private:
  explicit PureState(Vector a) : amps_(std::move(a)) {}
  Vector amps_;
};

class DensityMatrix {
 public:
  /// Checks Hermiticity, then PSD, then unit trace; the first failure is
  /// thrown as NotHermitian / NotPSD / TraceNotOne.
  static DensityMatrix validate(const Matrix& m);
  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

 private:
  explicit DensityMatrix(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// Measurement operator 0 <= E <= I.
class Effect {
 public:
  static Effect validate(const Matrix& m);
  static Effect projector(const PureState& psi);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

 private:
  explicit Effect(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

class Freestate {
 public:
  /// Throws ValidationError("EmptyFreestate") or DimMismatch.
  explicit Freestate(std::vector<DensityMatrix> generators);

  std::size_t dim() const { return dim_; }
  const std::vector<DensityMatrix>& generators() const { return generators_; }

 private:
  std::size_t dim_;
  std::vector<DensityMatrix> generators_;
};

class ClassicalFreestate {
 public:
  /// Each generator must be nonnegative and sum to 1 within 1e-12.
  explicit ClassicalFreestate(std::vector<std::vector<double>> generators);

  std::size_t n_outcomes() const { return n_; }
  const std::vector<std::vector<double>>& generators() const { return generators_; }

 private:
  std::size_t n_;
  std::vector<std::vector<double>> generators_;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Hull of the union.
Freestate knightian_or(const Freestate& a, const Freestate& b);
ClassicalFreestate knightian_or(const ClassicalFreestate& a, const ClassicalFreestate& b);

/// Probabilistic mixture of Knightian states, expanded into a single
/// Knightian state: one generator per choice of generator from each
/// component, in row-major Cartesian order (first component outermost).
/// Throws ValidationError("BadWeights") or DimMismatch.
Freestate prob_mix(const std::vector<std::pair<double, Freestate>>& components);
ClassicalFreestate prob_mix(const std::vector<std::pair<double, ClassicalFreestate>>& components);

/// Exact lower/upper probability of an effect over the hull.
Interval effect_interval(const Freestate& s, const Effect& e);

/// Lower/upper probability of an event (set of outcome indices). Throws
/// ValidationError("BadEvent") for out-of-range or repeated indices.
Interval event_interval(const ClassicalFreestate& s, const std::vector<std::size_t>& event);

/// Real coordinates of a Hermitian matrix: the diagonal, then (Re, Im) of
/// each strictly-upper entry in row-major order. dim^2 numbers.
Eigen::VectorXd hermitian_coordinates(const Matrix& m);
/// Hermitian W with Re Tr(W X) = w . hermitian_coordinates(X).
Matrix functional_matrix(const Eigen::VectorXd& w, std::size_t dim);

struct Separation {
  /// max over unit-L1 functionals w of min_i w.(rho - sigma_i); equals the
  /// L-infinity distance from rho to the hull. Zero iff rho is a member.
  double margin = 0.0;
  Eigen::VectorXd functional;
};

/// Solves the separation LP for rho against the hull of `s`.
Separation separate(const Freestate& s, const DensityMatrix& rho);
bool hull_contains(const Freestate& s, const DensityMatrix& rho, double tol = kMembershipTol);

enum class Side { First, Second };

/// A pure state whose projector value on `rho` (generator `generator` of the
/// set on `side`) lies outside the interval the other set allows.
struct PureWitness {
  PureState psi;
  double gap = 0.0;
  Side side = Side::First;
  std::size_t generator = 0;
  double value = 0.0;
  Interval other;
};

/// Fallback when no pure witness is found: a Hermitian functional with unit
/// operator norm and Re Tr(W rho) - max_sigma Re Tr(W sigma) = gap.
struct HermitianWitness {
  Matrix w;
  double gap = 0.0;
  Side side = Side::First;
  std::size_t generator = 0;
};

using Witness = std::variant<PureWitness, HermitianWitness>;

struct WitnessOptions {
  double tol = 1e-6;
  int restarts = 64;
  int ascent_iterations = 200;
  std::uint64_t seed = 0x5eed5eedULL;
};

/// std::nullopt when the hulls coincide (no witness with gap > tol exists).
std::optional<Witness> separating_witness(const Freestate& a, const Freestate& b,
                                          const WitnessOptions& options = {});

/// gap(psi) = distance of <psi|rho|psi> outside the interval of the other set.
double pure_gap(const Vector& psi, const DensityMatrix& rho, const Freestate& other);

/// True iff one unitary can clone both states: |<psi|phi>| in {0, 1}, with
/// states compared up to global phase.
bool clone_feasible(const PureState& psi, const PureState& phi);

Matrix kron(const Matrix& a, const Matrix& b);

namespace states {
PureState ket0();
PureState ket1();
PureState plus();
PureState minus();
PureState plus_i();
PureState minus_i();
/// cos(theta)|0> + sin(theta)|1>.
PureState real_qubit(double theta);
/// Hull of the six Pauli eigenstates.
Freestate full_qubit_freebit();
}  // namespace states

}  // namespace knightian::freestate
