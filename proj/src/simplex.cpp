#include "knightian/simplex.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

namespace knightian::lp {

namespace {
constexpr double kPivotEps = 1e-12;
}

Result maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (b.size() != m || c.size() != n) throw std::invalid_argument("lp::maximize: shape mismatch");
  if ((b.array() < 0).any()) throw std::invalid_argument("lp::maximize: needs b >= 0");

  // Tableau rows 0..m-1 are constraints, row m is the objective (reduced
  // costs, negated). Columns 0..n-1 structural, n..n+m-1 slack, last is rhs.
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  T.topLeftCorner(m, n) = A;
  T.block(0, n, m, m).setIdentity();
  T.col(n + m).head(m) = b;
  T.row(m).head(n) = -c.transpose();

  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  const Eigen::Index rhs = n + m;
  for (int iter = 0; iter < 100000; ++iter) {
    // Bland: lowest-index entering column with negative reduced cost.
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + m; ++j) {
      if (T(m, j) < -kPivotEps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;

    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (T(i, enter) > kPivotEps) {
        const double ratio = T(i, rhs) / T(i, enter);
        if (ratio < best - kPivotEps ||
            (ratio <= best + kPivotEps && leave >= 0 &&
             basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) {
      Result r;
      r.status = Status::Unbounded;
      r.value = std::numeric_limits<double>::infinity();
      return r;
    }

    T.row(leave) /= T(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i != leave && T(i, enter) != 0.0) T.row(i) -= T(i, enter) * T.row(leave);
    }
    basis[static_cast<std::size_t>(leave)] = enter;
  }

  Result r;
  r.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto j = basis[static_cast<std::size_t>(i)];
    if (j < n) r.x(j) = T(i, rhs);
  }
  r.value = c.dot(r.x);
  return r;
}

}  // namespace knightian::lp
