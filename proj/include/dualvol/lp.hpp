#pragma once

#include "dualvol/common.hpp"

namespace dualvol::lp {

enum class Status { kOptimal, kInfeasible, kUnbounded };

struct Result {
  Status status = Status::kInfeasible;
  double objective = 0.0;
  Vector solution;
};

// Dense two-phase simplex for
//
//   maximize  c^T x   subject to  A x <= b,  x >= 0.
//
// Bland's rule is used for pivot selection so the routine terminates on
// degenerate problems and is deterministic. Intended for problems with at
// most a few hundred rows and columns.
Result Maximize(const Matrix& A, const Vector& b, const Vector& c,
                double tolerance = 1e-11);

}  // namespace dualvol::lp
