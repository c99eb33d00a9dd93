#pragma once

#include "dualvol/common.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dualvol {

enum class GameKind { kZeroSum, kCoordination, kGeneral };

std::string_view ToString(GameKind kind);
GameKind ParseGameKind(std::string_view name);

// Payoff pair (A, B): A pays Player 1, B pays Player 2. Entries lie in
// [-1, 1]; zero-sum means B == -A and coordination means B == A exactly.
class BimatrixGame {
 public:
  BimatrixGame(Matrix A, Matrix B, GameKind kind);

  static BimatrixGame ZeroSum(Matrix A);
  static BimatrixGame Coordination(Matrix A);

  const Matrix& A() const { return a_; }
  const Matrix& B() const { return b_; }
  GameKind kind() const { return kind_; }
  int rows() const { return static_cast<int>(a_.rows()); }
  int cols() const { return static_cast<int>(a_.cols()); }
  int max_dim() const { return std::max(rows(), cols()); }
  int dual_dim() const { return rows() + cols(); }

  // The same A with the opposite structural tag: (A, -A) <-> (A, A).
  BimatrixGame Mirrored() const;

 private:
  Matrix a_;
  Matrix b_;
  GameKind kind_;
};

// Cumulative-payoff coordinates (p, q) in R^n x R^m.
struct DualPoint {
  Vector p;
  Vector q;

  static DualPoint Zero(int n, int m) { return {Vector::Zero(n), Vector::Zero(m)}; }
  Vector Stacked() const;
  static DualPoint FromStacked(const Vector& s, int n);
  bool AllFinite() const { return p.allFinite() && q.allFinite(); }
};

// Mixed-strategy profile (x, y) in the product of simplices.
struct PrimalPoint {
  Vector x;
  Vector y;

  // Validates nonnegativity and unit sums (tolerance 1e-12) and throws
  // InvalidArgument otherwise.
  static PrimalPoint Checked(Vector x, Vector y);
  Vector Stacked() const;
  bool StrictlyInterior() const { return (x.array() > 0).all() && (y.array() > 0).all(); }
};

inline constexpr double kSimplexTolerance = 1e-12;

Vector Softmax(const Vector& v);

// The map G: x_j = exp(p_j) / sum_l exp(p_l), y analogous. Stable: the
// coordinate maximum is subtracted before exponentiating. The input itself
// is never re-centred.
PrimalPoint ToPrimal(const DualPoint& d);

// A dual point whose image under ToPrimal is `pt` (log-coordinates). Entries
// of `pt` must be strictly positive.
DualPoint ToDual(const PrimalPoint& pt);

bool ShiftEquivalent(const DualPoint& d1, const DualPoint& d2, double tol);

// (p_1 - p_n, ..., p_{n-1} - p_n, q_1 - q_m, ..., q_{m-1} - q_m).
Vector ReducedCoords(const DualPoint& d);

// Distance of M from additively separable structure a_j + b_k: the minimum
// over (a, b) of max(M - a - b) - min(M - a - b). Solved as an LP.
double TrivialityDistance(const Matrix& M);

// Closed form |M11 - M12 - M21 + M22| / 2 for 2x2 matrices.
double TrivialityDistance2x2(const Matrix& M);

// Minimum triviality distance over all 2x2 submatrices of A. A matrix with
// fewer than two rows or columns has no such submatrix; that is rejected.
double Alpha1(const BimatrixGame& g);
double Alpha1(const Matrix& A);

// Minimum |A_jk - A_jl| or |A_jk - A_lk| over entry pairs sharing a row or a
// column.
double Alpha2(const BimatrixGame& g);
double Alpha2(const Matrix& A);

struct ZeroSumSolution {
  double value = 0.0;
  Vector row_strategy;
  Vector col_strategy;
};

// Minimax solution of a zero-sum game (n, m <= 10) by exact LP.
ZeroSumSolution SolveZeroSum(const BimatrixGame& g);
double GameValue(const BimatrixGame& g);

struct GameConstants {
  double c_A = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  std::optional<double> game_value;
  std::optional<double> r_margin;
};

// Game value and r_margin are filled for zero-sum games only.
GameConstants ComputeConstants(const BimatrixGame& g);

// At least `a` entries of x and `b` entries of y strictly exceed delta.
bool InRegionE(const PrimalPoint& pt, double delta, int a, int b);

// Each of x, y has exactly one entry >= 1 - delta. Requires 0 < delta < 1/2.
bool InExtremalDomain(const PrimalPoint& pt, double delta);

// The Rock-Paper-Scissors region: with Q_i the strategies of density > kappa,
// |Q_1|, |Q_2| >= 2 and some 2-subsets Q'_1, Q'_2 meet in exactly one
// strategy.
bool InRegionERps(const PrimalPoint& pt, double kappa);

// Built-in games.
BimatrixGame RockPaperScissors();
BimatrixGame MatchingPennies();
BimatrixGame IdentityCoordination(int n);
// Diagonal payoffs diag[i] > 0, off-diagonal -Z with Z >= 0.
BimatrixGame DiagonalCoordination(const std::vector<double>& diag, double Z);
// Mixed equilibrium of DiagonalCoordination:
// x*_i = (1 / (diag_i + Z)) / sum_j 1 / (diag_j + Z).
Vector DiagonalCoordinationEquilibrium(const std::vector<double>& diag, double Z);
// I.i.d. uniform [-1, 1] entries.
BimatrixGame RandomGame(int n, int m, GameKind kind, std::uint64_t seed);

// Names: "rps", "matching-pennies", "identity-coordination[:n]",
// "diagonal-coordination:a1,a2,...;Z", "random:n x m[:kind]:seed" e.g.
// "random:3x3:zero-sum:7".
BimatrixGame BuiltinGame(std::string_view name);

}  // namespace dualvol
