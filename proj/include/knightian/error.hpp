#pragma once

#include <stdexcept>
#include <string>

namespace knightian {

/// Base for every domain error the library raises on bad input or an
/// unsatisfiable precondition. The CLI maps these to exit code 1; anything
/// else escaping the library is an internal error (exit code 2).
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string kind, const std::string& detail)
      : std::runtime_error(kind + ": " + detail), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class DimMismatch : public ValidationError {
 public:
  DimMismatch(std::size_t expected, std::size_t got)
      : ValidationError("DimMismatch", "expected dimension " + std::to_string(expected) +
                                           ", got " + std::to_string(got)) {}
};

class NotHermitian : public ValidationError {
 public:
  explicit NotHermitian(double deviation)
      : ValidationError("NotHermitian", "max |M - M^H| = " + std::to_string(deviation)),
        deviation(deviation) {}
  double deviation;
};

class NotPSD : public ValidationError {
 public:
  explicit NotPSD(double min_eigenvalue)
      : ValidationError("NotPSD", "min eigenvalue " + std::to_string(min_eigenvalue)),
        min_eigenvalue(min_eigenvalue) {}
  double min_eigenvalue;
};

class TraceNotOne : public ValidationError {
 public:
  explicit TraceNotOne(double trace)
      : ValidationError("TraceNotOne", "trace " + std::to_string(trace)), trace(trace) {}
  double trace;
};

class LimitExceeded : public ValidationError {
 public:
  LimitExceeded(const std::string& what, long long limit, long long requested)
      : ValidationError("LimitExceeded", what + ": requested " + std::to_string(requested) +
                                             " exceeds limit " + std::to_string(limit)) {}
};

class ZeroMassHistory : public ValidationError {
 public:
  explicit ZeroMassHistory(std::size_t step)
      : ValidationError("ZeroMassHistory",
                        "history has zero mass under the truncated mixture at step " +
                            std::to_string(step)),
        step(step) {}
  std::size_t step;
};

}  // namespace knightian
