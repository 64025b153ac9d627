#pragma once

#include <Eigen/Dense>

namespace knightian::lp {

enum class Status { Optimal, Unbounded };

struct Result {
  Status status = Status::Optimal;
  double value = 0.0;
  Eigen::VectorXd x;
};

/// Maximizes c.x subject to A x <= b, x >= 0, for b >= 0 (so the origin is
/// feasible and no phase one is needed). Dense tableau with Bland's rule;
/// intended for the few-dozen-variable problems the freestate code poses.
Result maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c);

}  // namespace knightian::lp
