#include "dualvol/lp.hpp"

#include <limits>
#include <vector>

namespace dualvol::lp {
namespace {

// Tableau layout (rows x cols = (m + 2) x (n + 2)):
//   rows 0..m-1   constraints, column n+1 holds the right-hand side;
//   row m         phase-1 objective (negated c);
//   row m+1       phase-2 auxiliary objective;
//   column n      the auxiliary variable used to reach feasibility.
// basic_[i] / nonbasic_[j] carry variable ids: 0..n-1 original variables,
// n..n+m-1 slacks, -1 the auxiliary variable.
class Tableau {
 public:
  Tableau(const Matrix& A, const Vector& b, const Vector& c, double tol)
      : m_(static_cast<int>(A.rows())),
        n_(static_cast<int>(A.cols())),
        tol_(tol),
        d_(Matrix::Zero(m_ + 2, n_ + 2)),
        basic_(m_),
        nonbasic_(n_ + 1) {
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) d_(i, j) = A(i, j);
      d_(i, n_) = -1.0;
      d_(i, n_ + 1) = b(i);
      basic_[i] = n_ + i;
    }
    for (int j = 0; j < n_; ++j) {
      nonbasic_[j] = j;
      d_(m_, j) = -c(j);
    }
    nonbasic_[n_] = -1;
    d_(m_ + 1, n_) = 1.0;
  }

  Result Solve() {
    Result result;
    int r = 0;
    for (int i = 1; i < m_; ++i) {
      if (d_(i, n_ + 1) < d_(r, n_ + 1)) r = i;
    }
    if (m_ > 0 && d_(r, n_ + 1) < -tol_) {
      Pivot(r, n_);
      if (!Run(2) || d_(m_ + 1, n_ + 1) < -tol_) {
        result.status = Status::kInfeasible;
        return result;
      }
      for (int i = 0; i < m_; ++i) {
        if (basic_[i] != -1) continue;
        int s = -1;
        for (int j = 0; j <= n_; ++j) {
          if (s == -1 || d_(i, j) < d_(i, s) ||
              (d_(i, j) == d_(i, s) && nonbasic_[j] < nonbasic_[s])) {
            s = j;
          }
        }
        Pivot(i, s);
      }
    }
    const bool bounded = Run(1);
    result.solution = Vector::Zero(n_);
    for (int i = 0; i < m_; ++i) {
      if (basic_[i] >= 0 && basic_[i] < n_) result.solution(basic_[i]) = d_(i, n_ + 1);
    }
    if (!bounded) {
      result.status = Status::kUnbounded;
      result.objective = std::numeric_limits<double>::infinity();
      return result;
    }
    result.status = Status::kOptimal;
    result.objective = d_(m_, n_ + 1);
    return result;
  }

 private:
  void Pivot(int r, int s) {
    const double inv = 1.0 / d_(r, s);
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r || std::abs(d_(i, s)) <= tol_) continue;
      const double factor = d_(i, s) * inv;
      for (int j = 0; j < n_ + 2; ++j) d_(i, j) -= d_(r, j) * factor;
      d_(i, s) = d_(r, s) * factor;
    }
    for (int j = 0; j < n_ + 2; ++j) {
      if (j != s) d_(r, j) *= inv;
    }
    for (int i = 0; i < m_ + 2; ++i) {
      if (i != r) d_(i, s) *= -inv;
    }
    d_(r, s) = inv;
    std::swap(basic_[r], nonbasic_[s]);
  }

  // Bland's rule: entering variable is the lowest id with a negative reduced
  // cost; ratio-test ties go to the lowest basic id.
  bool Run(int phase) {
    const int objective_row = m_ + phase - 1;
    for (;;) {
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (nonbasic_[j] == -phase) continue;
        if (d_(objective_row, j) < -tol_ && (s == -1 || nonbasic_[j] < nonbasic_[s])) s = j;
      }
      if (s == -1) return true;
      int r = -1;
      double best_ratio = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (d_(i, s) <= tol_) continue;
        const double ratio = d_(i, n_ + 1) / d_(i, s);
        if (r == -1 || ratio < best_ratio - tol_ ||
            (ratio <= best_ratio + tol_ && basic_[i] < basic_[r])) {
          r = i;
          best_ratio = ratio;
        }
      }
      if (r == -1) return false;
      Pivot(r, s);
    }
  }

  int m_;
  int n_;
  double tol_;
  Matrix d_;
  std::vector<int> basic_;
  std::vector<int> nonbasic_;
};

}  // namespace

Result Maximize(const Matrix& A, const Vector& b, const Vector& c, double tolerance) {
  Require(A.rows() == b.size(), "lp: row count of A must match b");
  Require(A.cols() == c.size(), "lp: column count of A must match c");
  Require(A.allFinite() && b.allFinite() && c.allFinite(), "lp: non-finite input");
  return Tableau(A, b, c, tolerance).Solve();
}

}  // namespace dualvol::lp
