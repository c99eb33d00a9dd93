#pragma once

#include "dualvol/trajectory.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace dualvol {

// C(x, y) = -sum_jk x_j y_k (A_jk - [Ay]_j) (B_jk - [B^T x]_k), the
// second-order coefficient of the MWU volume integrand. It depends on the
// dual point only through its primal image.
double CFunction(const BimatrixGame& g, const PrimalPoint& pt);
double CFunction(const BimatrixGame& g, const DualPoint& d);

// Zero-sum games only: Var(X) with X = A_jk - [Ay]_j - [A^T x]_k taking each
// value with probability x_j y_k, by enumeration of the n m outcomes.
double CVarianceOracle(const BimatrixGame& g, const PrimalPoint& pt);

// eps J: the derivative of one step of `rule` minus the identity. Only
// Rule::kMwu and Rule::kSurrogate have a Jacobian here.
struct JacobianMatrix {
  Matrix entries;
  DualPoint basepoint;
  Rule rule = Rule::kMwu;
};

JacobianMatrix JacobianAnalytic(const BimatrixGame& g, const DualPoint& d, double eps, Rule rule);

// det(I + eps J(d)) by LU with partial pivoting in extended precision. A
// perturbation within 1e-14 of zero gives exactly 1.
double VolumeIntegrand(const BimatrixGame& g, const DualPoint& d, double eps, Rule rule);

// det(I + eps J(d)) - 1, rounded once from extended precision. Resolves the
// O(eps^4) remainder at small eps, where the double-valued integrand cannot.
double VolumeIntegrandExcess(const BimatrixGame& g, const DualPoint& d, double eps, Rule rule);

// Observer column "volume_multiplier".
Observable ObserveVolumeMultiplier(const BimatrixGame& g, double eps, Rule rule);

// A primal-space region predicate with a printable label. An empty predicate
// is the whole space.
struct Region {
  std::string label;
  std::function<bool(const PrimalPoint&)> predicate;

  bool Contains(const PrimalPoint& pt) const { return !predicate || predicate(pt); }
  bool unconstrained() const { return !predicate; }
};

Region RegionE(double delta, int a, int b);
Region RegionERps(double kappa);
Region RegionExtremal(double delta);
Region RegionEverywhere();

struct VolumeTrace {
  std::vector<double> multipliers;
  std::vector<double> cum_log_volume;
  std::vector<bool> region_flags;
};

// Multipliers at the T visited points d_0, ..., d_{T-1}.
VolumeTrace TrajectoryVolume(Rule rule, const BimatrixGame& g, const DualPoint& start, StepSize eps,
                             std::int64_t T, const Region& region = RegionEverywhere());

// I.i.d. uniform samples from an axis-aligned box in dual space. Sample i
// depends only on (seed, i).
struct PointCloud {
  std::vector<DualPoint> samples;
  double base_volume = 0.0;
  std::uint64_t seed = 0;
  Vector center;
  Vector sides;

  static PointCloud Box(const DualPoint& center, const Vector& sides, int count,
                        std::uint64_t seed);
  static PointCloud Cube(const DualPoint& center, double side, int count, std::uint64_t seed);

  // Largest side: the d(S) of the escape bound.
  double spread() const { return sides.maxCoeff(); }
};

// First step t in [0, max_steps] at which some sample's primal image is
// outside `region`; max_steps + 1 when none leaves. Samples advance in
// lockstep, so the answer does not depend on `jobs`.
std::int64_t FirstExitStep(Rule rule, const BimatrixGame& g, const std::vector<DualPoint>& samples,
                           StepSize eps, const Region& region, std::int64_t max_steps, int jobs);

struct SetVolumeEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t T = 0;      // requested horizon
  std::int64_t T_eff = 0;  // horizon actually integrated
  bool truncated = false;  // some flow left the region before T
  double rate = 1.0;       // (estimate / base_volume)^(1 / T_eff)
  double rate_std_error = 0.0;
  std::vector<double> sample_factors;
};

// base_volume * mean_i prod_{t < T_eff} det(I + eps J(d_i(t))). With a region,
// T_eff is the first step at which any sample's flow leaves it (capped at T).
SetVolumeEstimate SetVolumeLiouville(Rule rule, const BimatrixGame& g, const PointCloud& cloud,
                                     StepSize eps, std::int64_t T,
                                     const Region& region = RegionEverywhere(), int jobs = 1);

// Area of a polygon in reduced coordinates after T steps of a 2x2 game. The
// boundary is refined adaptively so consecutive image vertices stay within
// `max_edge` of each other.
struct PolygonEvolution {
  std::vector<std::vector<Eigen::Vector2d>> snapshots;
  std::vector<std::int64_t> steps;
  std::vector<double> areas;
  bool self_intersecting = false;
};

double ShoelaceArea(const std::vector<Eigen::Vector2d>& polygon);
bool SelfIntersects(const std::vector<Eigen::Vector2d>& polygon);

PolygonEvolution EvolvePolygon2d(Rule rule, const BimatrixGame& g,
                                 const std::vector<Eigen::Vector2d>& polygon, StepSize eps,
                                 const std::vector<std::int64_t>& snapshot_steps,
                                 double max_edge = 0.02, std::size_t max_vertices = 200000);

double SetVolumeDirect2d(Rule rule, const BimatrixGame& g,
                         const std::vector<Eigen::Vector2d>& polygon, StepSize eps,
                         std::int64_t T, bool* self_intersecting = nullptr);

struct RegionSearchOptions {
  int starts = 64;
  int iterations = 200;
  std::uint64_t seed = 0;
  int max_draws = 100000;
  int jobs = 1;
};

struct RegionInfResult {
  double value = 0.0;
  // Spread of C over the final simplex of the winning start.
  double uncertainty = 0.0;
  PrimalPoint argmin;
  DualPoint dual_argmin;
  int starts = 0;
};

// Multi-start Nelder-Mead over dual coordinates with the region as a hard
// constraint. Starts are uniform primal draws accepted by the region. The
// result is attained at a point of the region, so it bounds the infimum from
// above.
RegionInfResult RegionInfC(const BimatrixGame& g, const Region& region,
                           const RegionSearchOptions& options = {});

// max{ d_S / (2 eps), 8(n+m)/((C-eps) eps^2) ln(4(n+m)/((C-eps) eps^2)),
//      4/((C-eps) eps^2) ln(1/vol_S) }
double EscapeTimeBound(double vol_S, double d_S, double C_bar, double eps, int n, int m);

// [1 - exp(-(1/4) (vol / (R_j R_k))^(1/(n+m-2)))] kappa
double DiameterLowerBound(double vol, double R_j, double R_k, double kappa, int n, int m);

// dim / beta: an order-of-magnitude estimate (the constant is 1).
double LyapunovTimeEstimate(double beta, int dim);

enum class CounterexampleFamily { kAContractUnstable, kBExpandStable, kBReduced };

CounterexampleFamily ParseCounterexampleFamily(std::string_view name);
std::string_view ToString(CounterexampleFamily family);

struct CounterexampleSet {
  double dual_volume = 0.0;
  double primal_diameter_estimate = 0.0;
};

// Closed-form dual volume and a seeded sampled l2 diameter of the primal
// image. Family A is [-1/z, 1/z]^2 x [-sqrt z, sqrt z]^2 (p_1, q_1 short).
CounterexampleSet MakeCounterexampleSet(CounterexampleFamily family, double z, int samples = 2000,
                                        std::uint64_t seed = 0);

// Largest pairwise l2 distance between stacked primal images.
double PrimalDiameter(const std::vector<PrimalPoint>& points);

}  // namespace dualvol
