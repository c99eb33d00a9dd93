#include "dualvol/volume.hpp"

#include <fmt/format.h>

#include <cmath>

namespace dualvol {

double CFunction(const BimatrixGame& g, const PrimalPoint& pt) {
  const Vector u = RowPayoffs(g, pt.y);
  const Vector w = ColPayoffs(g, pt.x);
  double total = 0.0;
  for (int j = 0; j < g.rows(); ++j) {
    for (int k = 0; k < g.cols(); ++k) {
      total += pt.x(j) * pt.y(k) * (g.A()(j, k) - u(j)) * (g.B()(j, k) - w(k));
    }
  }
  return -total;
}

double CFunction(const BimatrixGame& g, const DualPoint& d) { return CFunction(g, ToPrimal(d)); }

double CVarianceOracle(const BimatrixGame& g, const PrimalPoint& pt) {
  Require(g.kind() == GameKind::kZeroSum, "variance oracle: zero-sum game required");
  const Matrix& A = g.A();
  const Vector row = A * pt.y;
  const Vector col = A.transpose() * pt.x;
  double mean = 0.0;
  double second = 0.0;
  for (int j = 0; j < g.rows(); ++j) {
    for (int k = 0; k < g.cols(); ++k) {
      const double prob = pt.x(j) * pt.y(k);
      const double value = A(j, k) - row(j) - col(k);
      mean += prob * value;
      second += prob * value * value;
    }
  }
  return second - mean * mean;
}

JacobianMatrix JacobianAnalytic(const BimatrixGame& g, const DualPoint& d, double eps, Rule rule) {
  Require(std::isfinite(eps) && eps >= 0.0, "jacobian: eps must be nonnegative");
  Require(rule == Rule::kMwu || rule == Rule::kSurrogate,
          "jacobian: only mwu and omwu-surrogate are supported");
  const int n = g.rows();
  const int m = g.cols();
  const PayoffSensitivity s = ComputeSensitivity(g, d);
  JacobianMatrix jac{Matrix::Zero(n + m, n + m), d, rule};
  Matrix& J = jac.entries;
  J.block(0, n, n, m) = eps * s.M1;
  J.block(n, 0, m, n) = eps * s.M2;
  if (rule == Rule::kMwu) return jac;

  const double e2 = eps * eps;
  const Vector& x = s.primal.x;
  const Vector& y = s.primal.y;
  const Vector S = s.M1 * s.w;
  const Vector Tv = s.M2 * s.u;
  const double yw = y.dot(s.w);
  const double xu = x.dot(s.u);
  J.block(0, 0, n, n) = e2 * s.M1 * s.M2;
  J.block(n, n, m, m) = e2 * s.M2 * s.M1;
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < m; ++l) {
      J(j, n + l) += e2 * (s.w(l) * s.M1(j, l) - y(l) * S(j) - yw * s.M1(j, l));
    }
  }
  for (int k = 0; k < m; ++k) {
    for (int l = 0; l < n; ++l) {
      J(n + k, l) += e2 * (s.u(l) * s.M2(k, l) - x(l) * Tv(k) - xu * s.M2(k, l));
    }
  }
  return jac;
}

namespace {

long double ExtendedDeterminant(const BimatrixGame& g, const DualPoint& d, double eps, Rule rule) {
  const Matrix eJ = JacobianAnalytic(g, d, eps, rule).entries;
  if (eJ.cwiseAbs().maxCoeff() <= 1e-14) return 1.0L;
  using Extended = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  Extended system = eJ.cast<long double>();
  system += Extended::Identity(eJ.rows(), eJ.cols());
  return Eigen::PartialPivLU<Extended>(system).determinant();
}

}  // namespace

double VolumeIntegrand(const BimatrixGame& g, const DualPoint& d, double eps, Rule rule) {
  return static_cast<double>(ExtendedDeterminant(g, d, eps, rule));
}

double VolumeIntegrandExcess(const BimatrixGame& g, const DualPoint& d, double eps, Rule rule) {
  return static_cast<double>(ExtendedDeterminant(g, d, eps, rule) - 1.0L);
}

Observable ObserveVolumeMultiplier(const BimatrixGame& g, double eps, Rule rule) {
  Require(rule == Rule::kMwu || rule == Rule::kSurrogate,
          "volume observer: only mwu and omwu-surrogate are supported");
  return {{"volume_multiplier"}, [g, eps, rule](const StepView& v, std::vector<double>& out) {
            out.push_back(VolumeIntegrand(g, v.dual, eps, rule));
          }};
}

Region RegionE(double delta, int a, int b) {
  Require(std::isfinite(delta) && delta >= 0.0 && delta < 1.0, "region E: delta must lie in [0, 1)");
  Require(a >= 1 && b >= 1, "region E: a and b must be positive");
  return {fmt::format("E^{}_{{{},{}}}", delta, a, b),
          [delta, a, b](const PrimalPoint& pt) { return InRegionE(pt, delta, a, b); }};
}

Region RegionERps(double kappa) {
  Require(kappa > 0.0 && kappa < 1.0 / 3.0, "region E_rps: kappa must lie in (0, 1/3)");
  return {fmt::format("E_rps^{}", kappa),
          [kappa](const PrimalPoint& pt) { return InRegionERps(pt, kappa); }};
}

Region RegionExtremal(double delta) {
  Require(delta > 0.0 && delta < 0.5, "extremal region: delta must lie in (0, 1/2)");
  return {fmt::format("extremal^{}", delta),
          [delta](const PrimalPoint& pt) { return InExtremalDomain(pt, delta); }};
}

Region RegionEverywhere() {
  return {"everywhere", nullptr};
}

VolumeTrace TrajectoryVolume(Rule rule, const BimatrixGame& g, const DualPoint& start, StepSize eps,
                             std::int64_t T, const Region& region) {
  Require(rule == Rule::kMwu || rule == Rule::kSurrogate,
          "trajectory volume: rule must be mwu or omwu-surrogate");
  Require(T >= 0, "trajectory volume: negative horizon");
  VolumeTrace trace;
  trace.multipliers.reserve(static_cast<std::size_t>(T));
  Stepper stepper(rule, g, start, eps);
  double cum = 0.0;
  for (std::int64_t t = 0; t < T; ++t) {
    const DualPoint& d = stepper.current();
    const double mult = VolumeIntegrand(g, d, eps.value(), rule);
    cum += std::log(mult);
    trace.multipliers.push_back(mult);
    trace.cum_log_volume.push_back(cum);
    trace.region_flags.push_back(region.Contains(ToPrimal(d)));
    stepper.Advance();
  }
  return trace;
}

}  // namespace dualvol
