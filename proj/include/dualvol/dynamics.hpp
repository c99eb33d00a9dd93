#pragma once

#include "dualvol/model.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace dualvol {

// Learning step-size. Values above 1/4 (outside the regime where the MWU
// dual map is injective) require an explicit override.
class StepSize {
 public:
  static constexpr double kInjectiveLimit = 0.25;

  explicit StepSize(double eps, bool allow_large = false);

  double value() const { return eps_; }

 private:
  double eps_;
};

// Payoff vectors A y and B^T x.
Vector RowPayoffs(const BimatrixGame& g, const Vector& y);
Vector ColPayoffs(const BimatrixGame& g, const Vector& x);

// Softmax derivatives of the payoff vectors at a dual point:
//   M1_jk = d[A y(q)]_j / dq_k = y_k (A_jk - [Ay]_j),
//   M2_kj = d[B^T x(p)]_k / dp_j = x_j (B_jk - [B^T x]_k).
struct PayoffSensitivity {
  PrimalPoint primal;
  Vector u;   // A y
  Vector w;   // B^T x
  Matrix M1;  // n x m
  Matrix M2;  // m x n
};

PayoffSensitivity ComputeSensitivity(const BimatrixGame& g, const DualPoint& d);

// p' = p + eps A y(q),  q' = q + eps B^T x(p).
DualPoint MwuStepDual(const BimatrixGame& g, const DualPoint& d, StepSize eps);

// Multiplicative-weights update on the simplex. Rejects boundary input.
PrimalPoint MwuStepPrimal(const BimatrixGame& g, const PrimalPoint& pt, StepSize eps);

// Optimistic MWU keeps the previous dual point. At t = 1, prev == curr.
struct OmwuState {
  DualPoint curr;
  DualPoint prev;
  std::int64_t t = 1;

  static OmwuState Start(DualPoint d);
};

// p^{t+1} = p^t + eps (2 A y(q^t) - A y(q^{t-1})), q analogous.
OmwuState OmwuStepDual(const BimatrixGame& g, const OmwuState& s, StepSize eps);

// One-point second-order surrogate of OMWU, O(eps^3) terms dropped:
//   p'_j = p_j + eps [Ay]_j + eps^2 sum_k y_k (A_jk - [Ay]_j) [B^T x]_k,
//   q'_k = q_k + eps [B^T x]_k + eps^2 sum_j x_j (B_jk - [B^T x]_k) [Ay]_j.
DualPoint OmwuSurrogateStep(const BimatrixGame& g, const DualPoint& d, StepSize eps);

// Continuous-time analogue of OMWU,
//   (dp/dt, dq/dt) = (I - eps M(p, q))^{-1} v(p, q),
// with v = (A y, B^T x) and M = [[0, M1], [M2, 0]]. Here eps is a model
// parameter and may be zero or negative; |eps| < 1 / (2 sqrt(n + m)) keeps
// the resolvent well defined.
class OdeField {
 public:
  OdeField(BimatrixGame game, double eps);

  const BimatrixGame& game() const { return game_; }
  double eps() const { return eps_; }
  double eps_limit() const;

 private:
  BimatrixGame game_;
  double eps_;
};

Vector OdeRhs(const OdeField& f, const DualPoint& d);

// v(p, q) stacked: the replicator-dynamics field in dual coordinates.
Vector ReplicatorField(const BimatrixGame& g, const DualPoint& d);

// Explicit Euler; returns steps + 1 points starting with d0.
std::vector<DualPoint> EulerIntegrate(const OdeField& f, const DualPoint& d0, double dt,
                                      std::int64_t steps);

// || eps u(t) + eps (u(t) - u(t - eps)) - eps [u(t) + eps u'(t)] ||_inf, the
// per-step defect of the backward-difference (online) Euler scheme.
using VectorFunction = std::function<Vector(double)>;
double OnlineEulerErrorProbe(const VectorFunction& u, const VectorFunction& u_dot, double eps,
                             double t);

// Single-agent MWU against exogenous payoffs a_k + noise_k(t).
using NoiseFunction = std::function<double(std::int64_t t, int k)>;

enum class NoiseKind { kZero, kUniform, kAlternating };

std::string_view ToString(NoiseKind kind);
NoiseKind ParseNoiseKind(std::string_view name);

// Built-in perturbations bounded by 2 delta: zero; i.i.d. uniform on
// [-2 delta, 2 delta] (drawn in call order from `seed`); alternating
// 2 delta (-1)^(t + k).
NoiseFunction MakeNoise(NoiseKind kind, double delta, std::uint64_t seed);

// y'_k proportional to y_k exp(eps payoff_k).
Vector MwuStepSingle(const Vector& y, const Vector& payoff, double eps);

class SingleAgentMwu {
 public:
  SingleAgentMwu(Vector base_payoffs, double eps, NoiseFunction noise, Vector y0);

  void Step();
  const Vector& y() const { return y_; }
  std::int64_t t() const { return t_; }

 private:
  Vector base_;
  double eps_;
  NoiseFunction noise_;
  Vector y_;
  Vector payoff_;
  std::int64_t t_ = 0;
};

}  // namespace dualvol
