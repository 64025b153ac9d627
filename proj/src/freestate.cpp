#include "knightian/freestate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "knightian/simplex.hpp"

namespace knightian::freestate {

namespace {

void require_square(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimMismatch(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  }
}

double hermitian_deviation(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Eigen::VectorXd hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double expectation(const Matrix& op, const Matrix& rho) {
  // Re Tr(op * rho) without forming the product.
  return (op.transpose().array() * rho.array()).sum().real();
}

double quad(const Vector& psi, const Matrix& m) { return psi.dot(m * psi).real(); }

void check_weights(const std::vector<double>& w) {
  double sum = 0.0;
  for (double x : w) {
    if (!(x >= 0.0)) throw ValidationError("BadWeights", "negative or NaN weight");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kProbabilityTol) {
    throw ValidationError("BadWeights", "weights sum to " + std::to_string(sum));
  }
}

}  // namespace

PureState PureState::make(Vector amplitudes) {
  if (amplitudes.size() == 0) throw DimMismatch(1, 0);
  const double n2 = amplitudes.squaredNorm();
  if (std::abs(n2 - 1.0) > kNormTol) {
    throw ValidationError("NotNormalized", "squared norm " + std::to_string(n2));
  }
  return PureState(std::move(amplitudes));
}

PureState PureState::normalized(Vector amplitudes) {
  const double n = amplitudes.norm();
  if (amplitudes.size() == 0 || n == 0.0) throw ValidationError("NotNormalized", "zero vector");
  return PureState(amplitudes / n);
}

DensityMatrix DensityMatrix::validate(const Matrix& m) {
  require_square(m);
  const double dev = hermitian_deviation(m);
  if (dev > kHermitianTol) throw NotHermitian(dev);
  const double min_eig = hermitian_eigenvalues(m).minCoeff();
  if (min_eig < -kPsdTol) throw NotPSD(min_eig);
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) throw TraceNotOne(tr);
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  const auto& a = psi.amplitudes();
  return DensityMatrix(a * a.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(dim));
}

Effect Effect::validate(const Matrix& m) {
  require_square(m);
  const double dev = hermitian_deviation(m);
  if (dev > kHermitianTol) throw NotHermitian(dev);
  const auto ev = hermitian_eigenvalues(m);
  if (ev.minCoeff() < -kPsdTol || ev.maxCoeff() > 1.0 + kPsdTol) {
    throw ValidationError("NotEffect", "eigenvalues must lie in [0, 1]");
  }
  return Effect(m);
}

Effect Effect::projector(const PureState& psi) {
  const auto& a = psi.amplitudes();
  return Effect(a * a.adjoint());
}

Freestate::Freestate(std::vector<DensityMatrix> generators) : generators_(std::move(generators)) {
  if (generators_.empty()) throw ValidationError("EmptyFreestate", "need at least one generator");
  dim_ = generators_.front().dim();
  for (const auto& g : generators_) {
    if (g.dim() != dim_) throw DimMismatch(dim_, g.dim());
  }
}

ClassicalFreestate::ClassicalFreestate(std::vector<std::vector<double>> generators)
    : generators_(std::move(generators)) {
  if (generators_.empty()) throw ValidationError("EmptyFreestate", "need at least one generator");
  n_ = generators_.front().size();
  if (n_ == 0) throw ValidationError("BadDistribution", "zero outcomes");
  for (const auto& g : generators_) {
    if (g.size() != n_) throw DimMismatch(n_, g.size());
    double sum = 0.0;
    for (double p : g) {
      if (!(p >= 0.0)) throw ValidationError("BadDistribution", "negative or NaN probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kProbabilityTol) {
      throw ValidationError("BadDistribution", "probabilities sum to " + std::to_string(sum));
    }
  }
}

Freestate knightian_or(const Freestate& a, const Freestate& b) {
  if (a.dim() != b.dim()) throw DimMismatch(a.dim(), b.dim());
  auto gens = a.generators();
  gens.insert(gens.end(), b.generators().begin(), b.generators().end());
  return Freestate(std::move(gens));
}

ClassicalFreestate knightian_or(const ClassicalFreestate& a, const ClassicalFreestate& b) {
  if (a.n_outcomes() != b.n_outcomes()) throw DimMismatch(a.n_outcomes(), b.n_outcomes());
  auto gens = a.generators();
  gens.insert(gens.end(), b.generators().begin(), b.generators().end());
  return ClassicalFreestate(std::move(gens));
}

namespace {

// Visits every choice vector (one generator index per component) in
// row-major order.
template <typename F>
void for_each_choice(const std::vector<std::size_t>& sizes, F&& visit) {
  std::vector<std::size_t> idx(sizes.size(), 0);
  while (true) {
    visit(idx);
    std::size_t k = sizes.size();
    while (k > 0) {
      --k;
      if (++idx[k] < sizes[k]) break;
      idx[k] = 0;
      if (k == 0) return;
    }
    if (sizes.empty()) return;
  }
}

}  // namespace

Freestate prob_mix(const std::vector<std::pair<double, Freestate>>& components) {
  if (components.empty()) throw ValidationError("BadWeights", "no components");
  std::vector<double> w;
  std::vector<std::size_t> sizes;
  const std::size_t dim = components.front().second.dim();
  for (const auto& [wi, s] : components) {
    if (s.dim() != dim) throw DimMismatch(dim, s.dim());
    w.push_back(wi);
    sizes.push_back(s.generators().size());
  }
  check_weights(w);

  const auto d = static_cast<Eigen::Index>(dim);
  std::vector<DensityMatrix> out;
  for_each_choice(sizes, [&](const std::vector<std::size_t>& idx) {
    Matrix acc = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < components.size(); ++i) {
      acc += w[i] * components[i].second.generators()[idx[i]].matrix();
    }
    out.push_back(DensityMatrix::validate(acc));
  });
  return Freestate(std::move(out));
}

ClassicalFreestate prob_mix(const std::vector<std::pair<double, ClassicalFreestate>>& components) {
  if (components.empty()) throw ValidationError("BadWeights", "no components");
  std::vector<double> w;
  std::vector<std::size_t> sizes;
  const std::size_t n = components.front().second.n_outcomes();
  for (const auto& [wi, s] : components) {
    if (s.n_outcomes() != n) throw DimMismatch(n, s.n_outcomes());
    w.push_back(wi);
    sizes.push_back(s.generators().size());
  }
  check_weights(w);

  std::vector<std::vector<double>> out;
  for_each_choice(sizes, [&](const std::vector<std::size_t>& idx) {
    std::vector<double> acc(n, 0.0);
    for (std::size_t i = 0; i < components.size(); ++i) {
      const auto& g = components[i].second.generators()[idx[i]];
      for (std::size_t x = 0; x < n; ++x) acc[x] += w[i] * g[x];
    }
    out.push_back(std::move(acc));
  });
  return ClassicalFreestate(std::move(out));
}

Interval effect_interval(const Freestate& s, const Effect& e) {
  if (s.dim() != e.dim()) throw DimMismatch(s.dim(), e.dim());
  Interval iv{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& g : s.generators()) {
    const double v = expectation(e.matrix(), g.matrix());
    iv.lo = std::min(iv.lo, v);
    iv.hi = std::max(iv.hi, v);
  }
  auto clamp = [](double v) {
    if (v < 0.0 && v >= -kPsdTol) return 0.0;
    if (v > 1.0 && v <= 1.0 + kPsdTol) return 1.0;
    return v;
  };
  return {clamp(iv.lo), clamp(iv.hi)};
}

Interval event_interval(const ClassicalFreestate& s, const std::vector<std::size_t>& event) {
  std::set<std::size_t> seen;
  for (auto x : event) {
    if (x >= s.n_outcomes()) {
      throw ValidationError("BadEvent", "outcome index " + std::to_string(x) + " out of range");
    }
    if (!seen.insert(x).second) {
      throw ValidationError("BadEvent", "outcome index " + std::to_string(x) + " repeated");
    }
  }
  Interval iv{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& g : s.generators()) {
    double p = 0.0;
    for (auto x : event) p += g[x];
    iv.lo = std::min(iv.lo, p);
    iv.hi = std::max(iv.hi, p);
  }
  return iv;
}

Eigen::VectorXd hermitian_coordinates(const Matrix& m) {
  const Eigen::Index d = m.rows();
  Eigen::VectorXd v(d * d);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < d; ++j) v(k++) = m(j, j).real();
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index l = j + 1; l < d; ++l) {
      v(k++) = m(j, l).real();
      v(k++) = m(j, l).imag();
    }
  }
  return v;
}

Matrix functional_matrix(const Eigen::VectorXd& w, std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix m = Matrix::Zero(d, d);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < d; ++j) m(j, j) = w(k++);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index l = j + 1; l < d; ++l) {
      const Complex z(w(k) / 2.0, w(k + 1) / 2.0);
      k += 2;
      m(j, l) = z;
      m(l, j) = std::conj(z);
    }
  }
  return m;
}

Separation separate(const Freestate& s, const DensityMatrix& rho) {
  if (s.dim() != rho.dim()) throw DimMismatch(s.dim(), rho.dim());
  const auto& gens = s.generators();
  const Eigen::Index q = static_cast<Eigen::Index>(s.dim() * s.dim());
  const Eigen::Index k = static_cast<Eigen::Index>(gens.size());
  const Eigen::VectorXd r = hermitian_coordinates(rho.matrix());

  // Variables: [u+ (q), u- (q), t]; w = u+ - u-, |w|_1 <= 1.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k + 1, 2 * q + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k + 1);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::VectorXd a = r - hermitian_coordinates(gens[static_cast<std::size_t>(i)].matrix());
    A.block(i, 0, 1, q) = -a.transpose();
    A.block(i, q, 1, q) = a.transpose();
    A(i, 2 * q) = 1.0;
  }
  A.block(k, 0, 1, 2 * q).setOnes();
  b(k) = 1.0;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * q + 1);
  c(2 * q) = 1.0;

  const auto res = lp::maximize(A, b, c);
  Separation out;
  out.margin = res.value;
  out.functional = res.x.head(q) - res.x.segment(q, q);
  return out;
}

bool hull_contains(const Freestate& s, const DensityMatrix& rho, double tol) {
  return separate(s, rho).margin <= tol;
}

double pure_gap(const Vector& psi, const DensityMatrix& rho, const Freestate& other) {
  const double v = quad(psi, rho.matrix());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& g : other.generators()) {
    const double x = quad(psi, g.matrix());
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return std::max(v - hi, lo - v);
}

namespace {

struct Candidate {
  Side side;
  std::size_t index;
  const DensityMatrix* rho;
  const Freestate* other;
  Separation sep;
};

// Projected ascent on the piecewise-quadratic gap, starting from psi.
Vector ascend(Vector psi, const Candidate& c, int iterations) {
  psi.normalize();
  double f = pure_gap(psi, *c.rho, *c.other);
  double eta = 1.0;
  for (int it = 0; it < iterations && eta > 1e-8; ++it) {
    // Active piece: rho - sigma_max (value above) or sigma_min - rho (below).
    const auto& gens = c.other->generators();
    std::size_t imax = 0;
    std::size_t imin = 0;
    double vmax = -std::numeric_limits<double>::infinity();
    double vmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const double x = quad(psi, gens[i].matrix());
      if (x > vmax) { vmax = x; imax = i; }
      if (x < vmin) { vmin = x; imin = i; }
    }
    const double v = quad(psi, c.rho->matrix());
    const Matrix a = (v - vmax >= vmin - v) ? Matrix(c.rho->matrix() - gens[imax].matrix())
                                            : Matrix(gens[imin].matrix() - c.rho->matrix());
    Vector next = psi + eta * (a * psi);
    next.normalize();
    const double fn = pure_gap(next, *c.rho, *c.other);
    if (fn > f) {
      psi = next;
      f = fn;
      eta *= 1.5;
    } else {
      eta *= 0.5;
    }
  }
  return psi;
}

}  // namespace

std::optional<Witness> separating_witness(const Freestate& a, const Freestate& b,
                                          const WitnessOptions& options) {
  if (a.dim() != b.dim()) throw DimMismatch(a.dim(), b.dim());

  std::vector<Candidate> outside;
  auto collect = [&](const Freestate& from, const Freestate& other, Side side) {
    for (std::size_t i = 0; i < from.generators().size(); ++i) {
      auto sep = separate(other, from.generators()[i]);
      if (sep.margin > kMembershipTol) {
        outside.push_back({side, i, &from.generators()[i], &other, std::move(sep)});
      }
    }
  };
  collect(a, b, Side::First);
  collect(b, a, Side::Second);
  if (outside.empty()) return std::nullopt;

  const auto dim = static_cast<Eigen::Index>(a.dim());
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;

  auto make_pure = [](const Vector& psi, const Candidate& c) {
    PureWitness w{PureState::normalized(psi), 0.0, c.side, c.index, 0.0, {}};
    const auto& v = w.psi.amplitudes();
    w.value = quad(v, c.rho->matrix());
    w.other.lo = std::numeric_limits<double>::infinity();
    w.other.hi = -w.other.lo;
    for (const auto& g : c.other->generators()) {
      const double x = quad(v, g.matrix());
      w.other.lo = std::min(w.other.lo, x);
      w.other.hi = std::max(w.other.hi, x);
    }
    w.gap = std::max(w.value - w.other.hi, w.other.lo - w.value);
    return w;
  };

  std::optional<PureWitness> best;
  auto consider = [&](const Vector& psi, const Candidate& c) {
    if (psi.norm() == 0.0) return;
    auto w = make_pure(psi, c);
    if (!best || w.gap > best->gap) best = std::move(w);
  };

  // Spectral candidates first: eigenvectors of the separating functional, of
  // rho, and of rho - sigma for each generator of the other set, plus the
  // computational basis.
  for (const auto& c : outside) {
    std::vector<Matrix> ops{functional_matrix(c.sep.functional, a.dim()), c.rho->matrix()};
    for (const auto& g : c.other->generators()) ops.push_back(c.rho->matrix() - g.matrix());
    for (const auto& op : ops) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (op + op.adjoint()));
      for (Eigen::Index j = 0; j < dim; ++j) consider(es.eigenvectors().col(j), c);
    }
    for (Eigen::Index j = 0; j < dim; ++j) consider(Vector::Unit(dim, j), c);
  }
  if (best && best->gap > options.tol) return Witness{*best};

  for (int r = 0; r < options.restarts; ++r) {
    const auto& c = outside[static_cast<std::size_t>(r) % outside.size()];
    Vector psi(dim);
    for (Eigen::Index j = 0; j < dim; ++j) psi(j) = Complex(normal(rng), normal(rng));
    consider(ascend(psi, c, options.ascent_iterations), c);
    if (best && best->gap > options.tol) return Witness{*best};
  }

  // Hermitian fallback from the strongest LP separation.
  const auto strongest = std::max_element(outside.begin(), outside.end(), [](const auto& x, const auto& y) {
    return x.sep.margin < y.sep.margin;
  });
  Matrix w = functional_matrix(strongest->sep.functional, a.dim());
  Eigen::SelfAdjointEigenSolver<Matrix> es(w, Eigen::EigenvaluesOnly);
  const double opnorm = es.eigenvalues().cwiseAbs().maxCoeff();
  if (opnorm == 0.0) return std::nullopt;
  w /= opnorm;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& g : strongest->other->generators()) worst = std::max(worst, expectation(w, g.matrix()));
  const double gap = expectation(w, strongest->rho->matrix()) - worst;
  if (gap <= options.tol) return std::nullopt;
  return Witness{HermitianWitness{w, gap, strongest->side, strongest->index}};
}

bool clone_feasible(const PureState& psi, const PureState& phi) {
  if (psi.dim() != phi.dim()) throw DimMismatch(psi.dim(), phi.dim());
  const double s = std::abs(psi.amplitudes().dot(phi.amplitudes()));
  return std::abs(s - s * s) <= 1e-9;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

namespace states {

namespace {
PureState qubit(Complex a0, Complex a1) {
  Vector v(2);
  v << a0, a1;
  return PureState::normalized(v);
}
}  // namespace

PureState ket0() { return qubit(1.0, 0.0); }
PureState ket1() { return qubit(0.0, 1.0); }
PureState plus() { return qubit(1.0, 1.0); }
PureState minus() { return qubit(1.0, -1.0); }
PureState plus_i() { return qubit(1.0, Complex(0.0, 1.0)); }
PureState minus_i() { return qubit(1.0, Complex(0.0, -1.0)); }
PureState real_qubit(double theta) { return qubit(std::cos(theta), std::sin(theta)); }

Freestate full_qubit_freebit() {
  std::vector<DensityMatrix> g;
  for (const auto& s : {ket0(), ket1(), plus(), minus(), plus_i(), minus_i()}) {
    g.push_back(DensityMatrix::from_pure(s));
  }
  return Freestate(std::move(g));
}

}  // namespace states

}  // namespace knightian::freestate
