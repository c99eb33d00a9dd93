#include "dualvol/random.hpp"
#include "dualvol/volume.hpp"

#include <fmt/format.h>

#include <cmath>

namespace dualvol {

double EscapeTimeBound(double vol_S, double d_S, double C_bar, double eps, int n, int m) {
  Require(vol_S > 0.0 && std::isfinite(vol_S), "escape bound: vol_S must be positive");
  Require(d_S >= 0.0 && std::isfinite(d_S), "escape bound: d_S must be nonnegative");
  Require(eps > 0.0, "escape bound: eps must be positive");
  Require(C_bar > eps, fmt::format("escape bound: needs C_bar > eps (C_bar = {}, eps = {})", C_bar, eps));
  Require(n >= 1 && m >= 1, "escape bound: dimensions must be positive");
  const double rate = (C_bar - eps) * eps * eps;
  const double dim = n + m;
  const double t1 = d_S / (2.0 * eps);
  const double t2 = 8.0 * dim / rate * std::log(4.0 * dim / rate);
  const double t3 = 4.0 / rate * std::log(1.0 / vol_S);
  return std::max({t1, t2, t3});
}

double DiameterLowerBound(double vol, double R_j, double R_k, double kappa, int n, int m) {
  Require(n + m > 2, "diameter bound: n + m must exceed 2");
  Require(vol > 0.0 && R_j > 0.0 && R_k > 0.0 && kappa > 0.0,
          "diameter bound: arguments must be positive");
  const double ratio = std::pow(vol / (R_j * R_k), 1.0 / (n + m - 2));
  return (1.0 - std::exp(-0.25 * ratio)) * kappa;
}

double LyapunovTimeEstimate(double beta, int dim) {
  Require(beta > 0.0 && std::isfinite(beta), "lyapunov time: beta must be positive");
  Require(dim >= 1, "lyapunov time: dimension must be positive");
  return dim / beta;
}

CounterexampleFamily ParseCounterexampleFamily(std::string_view name) {
  if (name == "A_contract_unstable") return CounterexampleFamily::kAContractUnstable;
  if (name == "B_expand_stable") return CounterexampleFamily::kBExpandStable;
  if (name == "B_reduced") return CounterexampleFamily::kBReduced;
  throw InvalidArgument(fmt::format("unknown counterexample family '{}'", name));
}

std::string_view ToString(CounterexampleFamily family) {
  switch (family) {
    case CounterexampleFamily::kAContractUnstable:
      return "A_contract_unstable";
    case CounterexampleFamily::kBExpandStable:
      return "B_expand_stable";
    case CounterexampleFamily::kBReduced:
      return "B_reduced";
  }
  return "A_contract_unstable";
}

double PrimalDiameter(const std::vector<PrimalPoint>& points) {
  std::vector<Vector> stacked;
  stacked.reserve(points.size());
  for (const auto& pt : points) stacked.push_back(pt.Stacked());
  double best = 0.0;
  for (std::size_t i = 0; i < stacked.size(); ++i)
    for (std::size_t j = i + 1; j < stacked.size(); ++j)
      best = std::max(best, (stacked[i] - stacked[j]).squaredNorm());
  return std::sqrt(best);
}

namespace {

// Corners of a box given per-coordinate (lo, hi).
std::vector<Vector> Corners(const Vector& lo, const Vector& hi) {
  const int dim = static_cast<int>(lo.size());
  std::vector<Vector> out;
  for (int mask = 0; mask < (1 << dim); ++mask) {
    Vector c(dim);
    for (int d = 0; d < dim; ++d) c(d) = (mask >> d) & 1 ? hi(d) : lo(d);
    out.push_back(c);
  }
  return out;
}

Vector Draw(Rng& rng, const Vector& lo, const Vector& hi) {
  Vector v(lo.size());
  for (int d = 0; d < lo.size(); ++d) v(d) = rng.Uniform(lo(d), hi(d));
  return v;
}

}  // namespace

CounterexampleSet MakeCounterexampleSet(CounterexampleFamily family, double z, int samples,
                                        std::uint64_t seed) {
  Require(std::isfinite(z) && z >= 1.0, "counterexample: z must be at least 1");
  Require(samples >= 1, "counterexample: at least one sample is required");
  Rng rng(seed);
  std::vector<PrimalPoint> image;
  CounterexampleSet out;
  switch (family) {
    case CounterexampleFamily::kAContractUnstable: {
      // Coordinates (p1, p2, q1, q2).
      const double s = std::sqrt(z);
      Vector lo(4), hi(4);
      lo << -1.0 / z, -s, -1.0 / z, -s;
      hi << 1.0 / z, s, 1.0 / z, s;
      out.dual_volume = (hi - lo).prod();
      std::vector<Vector> pts = Corners(lo, hi);
      for (int i = 0; i < samples; ++i) pts.push_back(Draw(rng, lo, hi));
      for (const auto& v : pts)
        image.push_back(ToPrimal({Vector{{v(0), v(1)}}, Vector{{v(2), v(3)}}}));
      break;
    }
    case CounterexampleFamily::kBExpandStable: {
      // p2 >= p1 + z, q2 >= q1 + z, all coordinates in [0, 3z]: the triangle
      // {0 <= p1, p1 + z <= p2 <= 3z} has area 2 z^2 per player.
      out.dual_volume = 4.0 * std::pow(z, 4);
      const Vector lo = Vector::Zero(4);
      const Vector hi = Vector::Constant(4, 3.0 * z);
      const std::vector<std::pair<double, double>> tri{{0.0, z}, {0.0, 3.0 * z}, {2.0 * z, 3.0 * z}};
      for (const auto& a : tri)
        for (const auto& b : tri)
          image.push_back(ToPrimal({Vector{{a.first, a.second}}, Vector{{b.first, b.second}}}));
      int accepted = 0;
      while (accepted < samples) {
        const Vector v = Draw(rng, lo, hi);
        if (v(1) < v(0) + z || v(3) < v(2) + z) continue;
        image.push_back(ToPrimal({Vector{{v(0), v(1)}}, Vector{{v(2), v(3)}}}));
        ++accepted;
      }
      break;
    }
    case CounterexampleFamily::kBReduced: {
      // Reduced coordinates (p1 - p3, p2 - p3, q1 - q3, q2 - q3) of a 3x3 game.
      Vector lo(4), hi(4);
      lo << z, -2.0 * z, z, -2.0 * z;
      hi << 2.0 * z, -z, 2.0 * z, -z;
      out.dual_volume = (hi - lo).prod();
      std::vector<Vector> pts = Corners(lo, hi);
      for (int i = 0; i < samples; ++i) pts.push_back(Draw(rng, lo, hi));
      for (const auto& v : pts)
        image.push_back(ToPrimal({Vector{{v(0), v(1), 0.0}}, Vector{{v(2), v(3), 0.0}}}));
      break;
    }
  }
  out.primal_diameter_estimate = PrimalDiameter(image);
  return out;
}

}  // namespace dualvol
