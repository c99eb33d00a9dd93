#include "dualvol/dynamics.hpp"

#include "dualvol/random.hpp"

#include <fmt/format.h>

#include <cmath>

namespace dualvol {

StepSize::StepSize(double eps, bool allow_large) : eps_(eps) {
  Require(std::isfinite(eps) && eps > 0.0, fmt::format("step size must be positive, got {}", eps));
  Require(allow_large || eps <= kInjectiveLimit,
          fmt::format("step size {} exceeds {} without override", eps, kInjectiveLimit));
}

Vector RowPayoffs(const BimatrixGame& g, const Vector& y) { return g.A() * y; }

Vector ColPayoffs(const BimatrixGame& g, const Vector& x) { return g.B().transpose() * x; }

PayoffSensitivity ComputeSensitivity(const BimatrixGame& g, const DualPoint& d) {
  PayoffSensitivity s;
  s.primal = ToPrimal(d);
  const Vector& x = s.primal.x;
  const Vector& y = s.primal.y;
  s.u = RowPayoffs(g, y);
  s.w = ColPayoffs(g, x);
  const int n = g.rows();
  const int m = g.cols();
  s.M1.resize(n, m);
  s.M2.resize(m, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < m; ++k) {
      s.M1(j, k) = y(k) * (g.A()(j, k) - s.u(j));
      s.M2(k, j) = x(j) * (g.B()(j, k) - s.w(k));
    }
  }
  return s;
}

DualPoint MwuStepDual(const BimatrixGame& g, const DualPoint& d, StepSize eps) {
  const PrimalPoint pt = ToPrimal(d);
  const double e = eps.value();
  return {d.p + e * RowPayoffs(g, pt.y), d.q + e * ColPayoffs(g, pt.x)};
}

namespace {

Vector Reweight(const Vector& v, const Vector& payoff, double eps) {
  const Vector gain = eps * payoff;
  const Vector scaled = (v.array() * (gain.array() - gain.maxCoeff()).exp()).matrix();
  return scaled / scaled.sum();
}

}  // namespace

PrimalPoint MwuStepPrimal(const BimatrixGame& g, const PrimalPoint& pt, StepSize eps) {
  Require(pt.x.size() == g.rows() && pt.y.size() == g.cols(), "primal step: dimension mismatch");
  Require(pt.StrictlyInterior(), "primal step: point must be strictly interior");
  return {Reweight(pt.x, RowPayoffs(g, pt.y), eps.value()),
          Reweight(pt.y, ColPayoffs(g, pt.x), eps.value())};
}

OmwuState OmwuState::Start(DualPoint d) {
  OmwuState s;
  s.prev = d;
  s.curr = std::move(d);
  s.t = 1;
  return s;
}

OmwuState OmwuStepDual(const BimatrixGame& g, const OmwuState& s, StepSize eps) {
  const double e = eps.value();
  const PrimalPoint now = ToPrimal(s.curr);
  const PrimalPoint before = ToPrimal(s.prev);
  OmwuState next;
  next.curr.p = s.curr.p + e * (2.0 * RowPayoffs(g, now.y) - RowPayoffs(g, before.y));
  next.curr.q = s.curr.q + e * (2.0 * ColPayoffs(g, now.x) - ColPayoffs(g, before.x));
  next.prev = s.curr;
  next.t = s.t + 1;
  return next;
}

DualPoint OmwuSurrogateStep(const BimatrixGame& g, const DualPoint& d, StepSize eps) {
  const double e = eps.value();
  const PayoffSensitivity s = ComputeSensitivity(g, d);
  return {d.p + e * s.u + e * e * (s.M1 * s.w), d.q + e * s.w + e * e * (s.M2 * s.u)};
}

OdeField::OdeField(BimatrixGame game, double eps) : game_(std::move(game)), eps_(eps) {
  Require(std::isfinite(eps), "ode: eps must be finite");
  Require(std::abs(eps) < eps_limit(),
          fmt::format("ode: |eps| = {} must be below 1/(2 sqrt(n+m)) = {}", std::abs(eps),
                      eps_limit()));
}

double OdeField::eps_limit() const { return 0.5 / std::sqrt(static_cast<double>(game_.dual_dim())); }

Vector ReplicatorField(const BimatrixGame& g, const DualPoint& d) {
  const PrimalPoint pt = ToPrimal(d);
  Vector v(g.dual_dim());
  v << RowPayoffs(g, pt.y), ColPayoffs(g, pt.x);
  return v;
}

Vector OdeRhs(const OdeField& f, const DualPoint& d) {
  const BimatrixGame& g = f.game();
  const PayoffSensitivity s = ComputeSensitivity(g, d);
  const int n = g.rows();
  const int m = g.cols();
  Vector v(n + m);
  v << s.u, s.w;
  if (f.eps() == 0.0) return v;
  Matrix system = Matrix::Identity(n + m, n + m);
  system.block(0, n, n, m) -= f.eps() * s.M1;
  system.block(n, 0, m, n) -= f.eps() * s.M2;
  const Eigen::PartialPivLU<Matrix> lu(system);
  const double det = lu.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-300) throw NumericalError("ode: singular resolvent");
  Vector rhs = lu.solve(v);
  if (!rhs.allFinite()) throw NumericalError("ode: non-finite resolvent solution");
  return rhs;
}

std::vector<DualPoint> EulerIntegrate(const OdeField& f, const DualPoint& d0, double dt,
                                      std::int64_t steps) {
  Require(std::isfinite(dt) && dt > 0.0, "euler: dt must be positive");
  Require(steps >= 0, "euler: negative step count");
  const int n = f.game().rows();
  std::vector<DualPoint> path;
  path.reserve(static_cast<std::size_t>(steps) + 1);
  path.push_back(d0);
  Vector s = d0.Stacked();
  for (std::int64_t t = 0; t < steps; ++t) {
    s += dt * OdeRhs(f, path.back());
    if (!s.allFinite()) throw NumericalError("euler: non-finite state", t + 1);
    path.push_back(DualPoint::FromStacked(s, n));
  }
  return path;
}

double OnlineEulerErrorProbe(const VectorFunction& u, const VectorFunction& u_dot, double eps,
                             double t) {
  const Vector now = u(t);
  const Vector online = eps * now + eps * (now - u(t - eps));
  const Vector exact = eps * (now + eps * u_dot(t));
  return (online - exact).lpNorm<Eigen::Infinity>();
}

std::string_view ToString(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kZero:
      return "zero";
    case NoiseKind::kUniform:
      return "uniform";
    case NoiseKind::kAlternating:
      return "alternating";
  }
  return "zero";
}

NoiseKind ParseNoiseKind(std::string_view name) {
  if (name == "zero") return NoiseKind::kZero;
  if (name == "uniform") return NoiseKind::kUniform;
  if (name == "alternating" || name == "adversarial") return NoiseKind::kAlternating;
  throw InvalidArgument(fmt::format("unknown noise kind '{}'", name));
}

NoiseFunction MakeNoise(NoiseKind kind, double delta, std::uint64_t seed) {
  Require(std::isfinite(delta) && delta >= 0.0, "noise: delta must be nonnegative");
  switch (kind) {
    case NoiseKind::kZero:
      return [](std::int64_t, int) { return 0.0; };
    case NoiseKind::kUniform: {
      auto rng = std::make_shared<Rng>(seed);
      return [rng, delta](std::int64_t, int) { return rng->Uniform(-2.0 * delta, 2.0 * delta); };
    }
    case NoiseKind::kAlternating:
      return [delta](std::int64_t t, int k) {
        return ((t + k) % 2 == 0) ? 2.0 * delta : -2.0 * delta;
      };
  }
  throw InvalidArgument("noise: unknown kind");
}

Vector MwuStepSingle(const Vector& y, const Vector& payoff, double eps) {
  Require(y.size() == payoff.size(), "single-agent step: dimension mismatch");
  Require((y.array() > 0).all(), "single-agent step: point must be strictly interior");
  return Reweight(y, payoff, eps);
}

SingleAgentMwu::SingleAgentMwu(Vector base_payoffs, double eps, NoiseFunction noise, Vector y0)
    : base_(std::move(base_payoffs)),
      eps_(eps),
      noise_(std::move(noise)),
      y_(std::move(y0)),
      payoff_(base_.size()) {
  Require(base_.size() >= 2, "single agent: need at least two strategies");
  Require(y_.size() == base_.size(), "single agent: start dimension mismatch");
  Require(std::isfinite(eps) && eps > 0.0, "single agent: eps must be positive");
  Require(static_cast<bool>(noise_), "single agent: missing noise function");
  Require((y_.array() > 0).all() && std::abs(y_.sum() - 1.0) <= 1e-9,
          "single agent: start must be a strictly interior distribution");
}

void SingleAgentMwu::Step() {
  for (int k = 0; k < base_.size(); ++k) payoff_(k) = base_(k) + noise_(t_, k);
  y_ = Reweight(y_, payoff_, eps_);
  ++t_;
}

}  // namespace dualvol
