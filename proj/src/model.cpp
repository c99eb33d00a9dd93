#include "dualvol/model.hpp"

#include "dualvol/lp.hpp"
#include "dualvol/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

namespace dualvol {

std::string_view ToString(GameKind kind) {
  switch (kind) {
    case GameKind::kZeroSum:
      return "zero-sum";
    case GameKind::kCoordination:
      return "coordination";
    case GameKind::kGeneral:
      return "general";
  }
  return "general";
}

GameKind ParseGameKind(std::string_view name) {
  if (name == "zero-sum") return GameKind::kZeroSum;
  if (name == "coordination") return GameKind::kCoordination;
  if (name == "general") return GameKind::kGeneral;
  throw InvalidArgument(fmt::format("unknown game kind '{}'", name));
}

BimatrixGame::BimatrixGame(Matrix A, Matrix B, GameKind kind)
    : a_(std::move(A)), b_(std::move(B)), kind_(kind) {
  Require(a_.rows() >= 2 && a_.cols() >= 2, "game: both players need at least two strategies");
  Require(a_.rows() == b_.rows() && a_.cols() == b_.cols(), "game: A and B shapes differ");
  Require(a_.allFinite() && b_.allFinite(), "game: non-finite payoff");
  Require((a_.array().abs() <= 1.0).all() && (b_.array().abs() <= 1.0).all(),
          "game: payoffs must lie in [-1, 1]");
  if (kind_ == GameKind::kZeroSum) {
    Require((b_.array() == -a_.array()).all(), "game: zero-sum requires B == -A");
  } else if (kind_ == GameKind::kCoordination) {
    Require((b_.array() == a_.array()).all(), "game: coordination requires B == A");
  }
}

BimatrixGame BimatrixGame::ZeroSum(Matrix A) {
  Matrix B = -A;
  return BimatrixGame(std::move(A), std::move(B), GameKind::kZeroSum);
}

BimatrixGame BimatrixGame::Coordination(Matrix A) {
  Matrix B = A;
  return BimatrixGame(std::move(A), std::move(B), GameKind::kCoordination);
}

BimatrixGame BimatrixGame::Mirrored() const {
  switch (kind_) {
    case GameKind::kZeroSum:
      return Coordination(a_);
    case GameKind::kCoordination:
      return ZeroSum(a_);
    case GameKind::kGeneral:
      break;
  }
  throw InvalidArgument("game: only zero-sum and coordination games have a mirror");
}

Vector DualPoint::Stacked() const {
  Vector s(p.size() + q.size());
  s << p, q;
  return s;
}

DualPoint DualPoint::FromStacked(const Vector& s, int n) {
  Require(n >= 0 && n <= s.size(), "dual point: bad split index");
  return {s.head(n), s.tail(s.size() - n)};
}

PrimalPoint PrimalPoint::Checked(Vector x, Vector y) {
  auto check = [](const Vector& v, const char* name) {
    Require(v.size() >= 1 && v.allFinite(), fmt::format("primal point: {} must be finite", name));
    Require((v.array() >= 0).all(), fmt::format("primal point: {} has a negative entry", name));
    Require(std::abs(v.sum() - 1.0) <= kSimplexTolerance,
            fmt::format("primal point: {} does not sum to one", name));
  };
  check(x, "x");
  check(y, "y");
  return {std::move(x), std::move(y)};
}

Vector PrimalPoint::Stacked() const {
  Vector s(x.size() + y.size());
  s << x, y;
  return s;
}

Vector Softmax(const Vector& v) {
  const double top = v.maxCoeff();
  Vector e = (v.array() - top).exp().matrix();
  return e / e.sum();
}

PrimalPoint ToPrimal(const DualPoint& d) { return {Softmax(d.p), Softmax(d.q)}; }

DualPoint ToDual(const PrimalPoint& pt) {
  Require(pt.StrictlyInterior(), "ToDual: primal point must be strictly interior");
  return {pt.x.array().log().matrix(), pt.y.array().log().matrix()};
}

namespace {

bool IsConstantShift(const Vector& a, const Vector& b, double tol) {
  const Vector diff = a - b;
  return diff.maxCoeff() - diff.minCoeff() <= tol;
}

}  // namespace

bool ShiftEquivalent(const DualPoint& d1, const DualPoint& d2, double tol) {
  Require(d1.p.size() == d2.p.size() && d1.q.size() == d2.q.size(),
          "ShiftEquivalent: dimension mismatch");
  return IsConstantShift(d1.p, d2.p, tol) && IsConstantShift(d1.q, d2.q, tol);
}

Vector ReducedCoords(const DualPoint& d) {
  const auto n = d.p.size();
  const auto m = d.q.size();
  Vector r(n - 1 + m - 1);
  r.head(n - 1) = d.p.head(n - 1).array() - d.p(n - 1);
  r.tail(m - 1) = d.q.head(m - 1).array() - d.q(m - 1);
  return r;
}

double TrivialityDistance(const Matrix& M) {
  Require(M.size() > 0 && M.allFinite(), "triviality distance: matrix must be finite");
  const int n = static_cast<int>(M.rows());
  const int m = static_cast<int>(M.cols());
  // Shifting every residual by the same constant leaves the range unchanged,
  // so fix min(M - a - b) >= 0 and minimise the upper level u. The gauge
  // (a + c, b - c) is removed by pinning b_m = 0. Free variables are split
  // into positive and negative parts: [a+ | a- | b+ | b- | u].
  const int nb = m - 1;
  const int vars = 2 * n + 2 * nb + 1;
  const int u_col = vars - 1;
  Matrix A = Matrix::Zero(2 * n * m, vars);
  Vector b(2 * n * m);
  int row = 0;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < m; ++k) {
      // a_j + b_k <= M_jk
      A(row, j) = 1.0;
      A(row, n + j) = -1.0;
      if (k < nb) {
        A(row, 2 * n + k) = 1.0;
        A(row, 2 * n + nb + k) = -1.0;
      }
      b(row) = M(j, k);
      ++row;
      // -a_j - b_k - u <= -M_jk
      A(row, j) = -1.0;
      A(row, n + j) = 1.0;
      if (k < nb) {
        A(row, 2 * n + k) = -1.0;
        A(row, 2 * n + nb + k) = 1.0;
      }
      A(row, u_col) = -1.0;
      b(row) = -M(j, k);
      ++row;
    }
  }
  Vector c = Vector::Zero(vars);
  c(u_col) = -1.0;
  const lp::Result result = lp::Maximize(A, b, c);
  if (result.status != lp::Status::kOptimal) {
    throw NumericalError("triviality distance: LP did not reach an optimum");
  }
  return std::max(0.0, -result.objective);
}

double TrivialityDistance2x2(const Matrix& M) {
  Require(M.rows() == 2 && M.cols() == 2, "closed-form triviality distance needs a 2x2 matrix");
  return std::abs(M(0, 0) - M(0, 1) - M(1, 0) + M(1, 1)) / 2.0;
}

double Alpha1(const Matrix& A) {
  Require(A.rows() >= 2 && A.cols() >= 2, "alpha1: no 2x2 submatrix exists");
  double best = std::numeric_limits<double>::infinity();
  Matrix sub(2, 2);
  for (int j1 = 0; j1 < A.rows(); ++j1) {
    for (int j2 = j1 + 1; j2 < A.rows(); ++j2) {
      for (int k1 = 0; k1 < A.cols(); ++k1) {
        for (int k2 = k1 + 1; k2 < A.cols(); ++k2) {
          sub << A(j1, k1), A(j1, k2), A(j2, k1), A(j2, k2);
          best = std::min(best, TrivialityDistance(sub));
        }
      }
    }
  }
  return best;
}

double Alpha1(const BimatrixGame& g) { return Alpha1(g.A()); }

double Alpha2(const Matrix& A) {
  Require(A.rows() >= 2 && A.cols() >= 2, "alpha2: need at least a 2x2 matrix");
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < A.rows(); ++j) {
    for (int k = 0; k < A.cols(); ++k) {
      for (int l = k + 1; l < A.cols(); ++l) best = std::min(best, std::abs(A(j, k) - A(j, l)));
      for (int l = j + 1; l < A.rows(); ++l) best = std::min(best, std::abs(A(j, k) - A(l, k)));
    }
  }
  return best;
}

double Alpha2(const BimatrixGame& g) { return Alpha2(g.A()); }

namespace {

inline constexpr int kMaxExactValueDim = 10;

// max_x min_k sum_j x_j A_jk over the simplex, for the maximising row player.
std::pair<double, Vector> MaximinStrategy(const Matrix& payoff) {
  const int n = static_cast<int>(payoff.rows());
  const int m = static_cast<int>(payoff.cols());
  const double shift = 1.0 - payoff.minCoeff();  // shifted payoffs are >= 1
  // Variables [x_1..x_n | v], v = value of the shifted game >= 0.
  Matrix A = Matrix::Zero(m + 2, n + 1);
  Vector b = Vector::Zero(m + 2);
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < n; ++j) A(k, j) = -(payoff(j, k) + shift);
    A(k, n) = 1.0;
  }
  A.row(m).head(n).setOnes();
  b(m) = 1.0;
  A.row(m + 1).head(n).setConstant(-1.0);
  b(m + 1) = -1.0;
  Vector c = Vector::Zero(n + 1);
  c(n) = 1.0;
  const lp::Result result = lp::Maximize(A, b, c);
  if (result.status != lp::Status::kOptimal) {
    throw NumericalError("game value: LP did not reach an optimum");
  }
  Vector x = result.solution.head(n).cwiseMax(0.0);
  x /= x.sum();
  return {result.objective - shift, x};
}

}  // namespace

ZeroSumSolution SolveZeroSum(const BimatrixGame& g) {
  Require(g.kind() == GameKind::kZeroSum, "game value: zero-sum game required");
  Require(g.rows() <= kMaxExactValueDim && g.cols() <= kMaxExactValueDim,
          "game value: exact LP limited to 10 strategies per player");
  auto [value, x] = MaximinStrategy(g.A());
  auto [neg_value, y] = MaximinStrategy(-g.A().transpose());
  (void)neg_value;
  return {value, std::move(x), std::move(y)};
}

double GameValue(const BimatrixGame& g) { return SolveZeroSum(g).value; }

GameConstants ComputeConstants(const BimatrixGame& g) {
  GameConstants out;
  out.c_A = TrivialityDistance(g.A());
  out.alpha1 = Alpha1(g);
  out.alpha2 = Alpha2(g);
  if (g.kind() == GameKind::kZeroSum && g.rows() <= kMaxExactValueDim &&
      g.cols() <= kMaxExactValueDim) {
    const double v = GameValue(g);
    out.game_value = v;
    out.r_margin = (g.A().array() - v).abs().minCoeff();
  }
  return out;
}

namespace {

int CountAbove(const Vector& v, double threshold) {
  return static_cast<int>((v.array() > threshold).count());
}

}  // namespace

bool InRegionE(const PrimalPoint& pt, double delta, int a, int b) {
  Require(delta > 0 && delta < 1, "region E: delta must lie in (0, 1)");
  return CountAbove(pt.x, delta) >= a && CountAbove(pt.y, delta) >= b;
}

bool InExtremalDomain(const PrimalPoint& pt, double delta) {
  Require(delta > 0 && delta < 0.5, "extremal domain: delta must lie in (0, 1/2)");
  auto single = [delta](const Vector& v) { return (v.array() >= 1.0 - delta).count() == 1; };
  return single(pt.x) && single(pt.y);
}

bool InRegionERps(const PrimalPoint& pt, double kappa) {
  Require(kappa > 0 && kappa < 1.0 / 3.0, "region E (RPS): kappa must lie in (0, 1/3)");
  Require(pt.x.size() == pt.y.size(), "region E (RPS): both players need the same strategy set");
  std::vector<int> q1;
  std::vector<int> q2;
  for (int i = 0; i < pt.x.size(); ++i) {
    if (pt.x(i) > kappa) q1.push_back(i);
    if (pt.y(i) > kappa) q2.push_back(i);
  }
  if (q1.size() < 2 || q2.size() < 2) return false;
  for (std::size_t a = 0; a < q1.size(); ++a) {
    for (std::size_t b = a + 1; b < q1.size(); ++b) {
      for (std::size_t c = 0; c < q2.size(); ++c) {
        for (std::size_t d = c + 1; d < q2.size(); ++d) {
          const int shared = (q1[a] == q2[c]) + (q1[a] == q2[d]) + (q1[b] == q2[c]) +
                             (q1[b] == q2[d]);
          if (shared == 1) return true;
        }
      }
    }
  }
  return false;
}

BimatrixGame RockPaperScissors() {
  Matrix A(3, 3);
  A << 0, -1, 1, 1, 0, -1, -1, 1, 0;
  return BimatrixGame::ZeroSum(A);
}

BimatrixGame MatchingPennies() {
  Matrix A(2, 2);
  A << 1, -1, -1, 1;
  return BimatrixGame::ZeroSum(A);
}

BimatrixGame IdentityCoordination(int n) {
  Require(n >= 2, "identity coordination: n must be at least 2");
  return BimatrixGame::Coordination(Matrix::Identity(n, n));
}

BimatrixGame DiagonalCoordination(const std::vector<double>& diag, double Z) {
  Require(diag.size() >= 2, "diagonal coordination: need at least two strategies");
  Require(Z >= 0 && Z <= 1, "diagonal coordination: Z must lie in [0, 1]");
  const int n = static_cast<int>(diag.size());
  Matrix A = Matrix::Constant(n, n, -Z);
  for (int i = 0; i < n; ++i) {
    Require(diag[i] > 0 && diag[i] <= 1, "diagonal coordination: diagonal entries in (0, 1]");
    A(i, i) = diag[i];
  }
  return BimatrixGame::Coordination(A);
}

Vector DiagonalCoordinationEquilibrium(const std::vector<double>& diag, double Z) {
  Require(diag.size() >= 2 && Z >= 0, "diagonal coordination: bad parameters");
  Vector x(static_cast<Eigen::Index>(diag.size()));
  for (std::size_t i = 0; i < diag.size(); ++i) {
    Require(diag[i] > 0, "diagonal coordination: diagonal entries must be positive");
    x(static_cast<Eigen::Index>(i)) = 1.0 / (diag[i] + Z);
  }
  return x / x.sum();
}

BimatrixGame RandomGame(int n, int m, GameKind kind, std::uint64_t seed) {
  Require(n >= 2 && m >= 2, "random game: need at least 2x2");
  Rng rng(seed);
  Matrix A(n, m);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < m; ++k) A(j, k) = rng.Uniform(-1.0, 1.0);
  }
  switch (kind) {
    case GameKind::kZeroSum:
      return BimatrixGame::ZeroSum(A);
    case GameKind::kCoordination:
      return BimatrixGame::Coordination(A);
    case GameKind::kGeneral:
      break;
  }
  Matrix B(n, m);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < m; ++k) B(j, k) = rng.Uniform(-1.0, 1.0);
  }
  return BimatrixGame(A, B, GameKind::kGeneral);
}

namespace {

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <class T>
T ParseNumber(std::string_view s, std::string_view what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  Require(ec == std::errc() && ptr == s.data() + s.size(),
          fmt::format("cannot parse {} from '{}'", what, s));
  return value;
}

}  // namespace

BimatrixGame BuiltinGame(std::string_view name) {
  const auto parts = Split(name, ':');
  const std::string_view head = parts[0];
  if (head == "rps" && parts.size() == 1) return RockPaperScissors();
  if (head == "matching-pennies" && parts.size() == 1) return MatchingPennies();
  if (head == "identity-coordination") {
    if (parts.size() == 1) return IdentityCoordination(2);
    if (parts.size() == 2) return IdentityCoordination(ParseNumber<int>(parts[1], "n"));
  }
  if (head == "diagonal-coordination" && parts.size() == 2) {
    const auto halves = Split(parts[1], ';');
    Require(halves.size() == 2, "diagonal-coordination expects 'a1,a2,...;Z'");
    std::vector<double> diag;
    for (auto v : Split(halves[0], ',')) diag.push_back(ParseNumber<double>(v, "diagonal payoff"));
    return DiagonalCoordination(diag, ParseNumber<double>(halves[1], "Z"));
  }
  if (head == "random" && (parts.size() == 3 || parts.size() == 4)) {
    const auto dims = Split(parts[1], 'x');
    Require(dims.size() == 2, "random game expects 'random:NxM[:kind]:seed'");
    const int n = ParseNumber<int>(dims[0], "n");
    const int m = ParseNumber<int>(dims[1], "m");
    const GameKind kind = parts.size() == 4 ? ParseGameKind(parts[2]) : GameKind::kZeroSum;
    const auto seed = ParseNumber<std::uint64_t>(parts.back(), "seed");
    return RandomGame(n, m, kind, seed);
  }
  throw InvalidArgument(fmt::format("unknown builtin game '{}'", name));
}

}  // namespace dualvol
