#include "dualvol/lp.hpp"
#include "dualvol/random.hpp"

#include <doctest.h>

using namespace dualvol;

TEST_CASE("two-variable textbook LP") {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36.
  Matrix A(3, 2);
  A << 1, 0, 0, 2, 3, 2;
  Vector b(3), c(2);
  b << 4, 12, 18;
  c << 3, 5;
  const auto r = lp::Maximize(A, b, c);
  REQUIRE(r.status == lp::Status::kOptimal);
  CHECK(r.objective == doctest::Approx(36.0).epsilon(1e-12));
  CHECK(r.solution(0) == doctest::Approx(2.0));
  CHECK(r.solution(1) == doctest::Approx(6.0));
}

TEST_CASE("negative right-hand side needs phase one") {
  // max -x - y, -x - y <= -2 (x + y >= 2) -> objective -2.
  Matrix A(1, 2);
  A << -1, -1;
  Vector b(1), c(2);
  b << -2;
  c << -1, -1;
  const auto r = lp::Maximize(A, b, c);
  REQUIRE(r.status == lp::Status::kOptimal);
  CHECK(r.objective == doctest::Approx(-2.0));
}

TEST_CASE("infeasible and unbounded problems are classified") {
  Matrix A(2, 1);
  A << 1, -1;
  Vector b(2), c(1);
  b << 1, -2;  // x <= 1 and x >= 2
  c << 1;
  CHECK(lp::Maximize(A, b, c).status == lp::Status::kInfeasible);

  Matrix U(1, 2);
  U << 1, -1;
  Vector ub(1), uc(2);
  ub << 1;
  uc << 0, 1;
  CHECK(lp::Maximize(U, ub, uc).status == lp::Status::kUnbounded);
}

TEST_CASE("degenerate LP terminates") {
  // Klee-Minty style degenerate vertex at the origin.
  Matrix A(3, 3);
  A << 1, 0, 0, 20, 1, 0, 200, 20, 1;
  Vector b(3), c(3);
  b << 1, 100, 10000;
  c << 100, 10, 1;
  const auto r = lp::Maximize(A, b, c);
  REQUIRE(r.status == lp::Status::kOptimal);
  CHECK(r.objective == doctest::Approx(10000.0));
}

TEST_CASE("random feasible LPs satisfy primal feasibility and weak duality") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int rows = 2 + static_cast<int>(rng.Next() % 5);
    const int cols = 2 + static_cast<int>(rng.Next() % 5);
    Matrix A(rows, cols);
    Vector b(rows), c(cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) A(i, j) = rng.Uniform(0.1, 1.0);
      b(i) = rng.Uniform(0.5, 2.0);
    }
    for (int j = 0; j < cols; ++j) c(j) = rng.Uniform(-1.0, 1.0);
    const auto r = lp::Maximize(A, b, c);
    REQUIRE(r.status == lp::Status::kOptimal);
    CHECK(((A * r.solution - b).array() <= 1e-9).all());
    CHECK((r.solution.array() >= -1e-12).all());
    CHECK(c.dot(r.solution) == doctest::Approx(r.objective).epsilon(1e-9));
    // Dual: min b^T y, A^T y >= c, y >= 0.
    const auto dual = lp::Maximize(-A.transpose(), -c, -b);
    REQUIRE(dual.status == lp::Status::kOptimal);
    CHECK(-dual.objective == doctest::Approx(r.objective).epsilon(1e-9));
  }
}
