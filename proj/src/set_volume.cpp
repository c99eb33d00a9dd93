#include "dualvol/parallel.hpp"
#include "dualvol/random.hpp"
#include "dualvol/volume.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace dualvol {

PointCloud PointCloud::Box(const DualPoint& center, const Vector& sides, int count,
                           std::uint64_t seed) {
  const Vector c = center.Stacked();
  Require(sides.size() == c.size(), "point cloud: one side length per dual coordinate");
  Require(sides.allFinite() && (sides.array() >= 0).all(), "point cloud: sides must be nonnegative");
  Require(count >= 1, "point cloud: at least one sample is required");
  PointCloud cloud;
  cloud.base_volume = sides.prod();
  Require(cloud.base_volume > 0.0, "point cloud: degenerate box (zero volume)");
  cloud.seed = seed;
  cloud.center = c;
  cloud.sides = sides;
  cloud.samples.reserve(static_cast<std::size_t>(count));
  const int n = static_cast<int>(center.p.size());
  for (int i = 0; i < count; ++i) {
    Rng rng(DeriveSeed(seed, static_cast<std::uint64_t>(i)));
    Vector s(c.size());
    for (int d = 0; d < c.size(); ++d) s(d) = c(d) + sides(d) * (rng.Uniform() - 0.5);
    cloud.samples.push_back(DualPoint::FromStacked(s, n));
  }
  return cloud;
}

PointCloud PointCloud::Cube(const DualPoint& center, double side, int count, std::uint64_t seed) {
  const auto dim = center.p.size() + center.q.size();
  return Box(center, Vector::Constant(dim, side), count, seed);
}

std::int64_t FirstExitStep(Rule rule, const BimatrixGame& g, const std::vector<DualPoint>& samples,
                           StepSize eps, const Region& region, std::int64_t max_steps, int jobs) {
  Require(!samples.empty(), "first exit: no samples");
  Require(max_steps >= 0, "first exit: negative horizon");
  for (const auto& d : samples) {
    if (!region.Contains(ToPrimal(d))) return 0;
  }
  constexpr std::int64_t kBatch = 256;
  std::vector<Stepper> steppers;
  steppers.reserve(samples.size());
  for (const auto& d : samples) steppers.emplace_back(rule, g, d, eps);
  const std::int64_t none = max_steps + 1;
  std::vector<std::int64_t> exits(samples.size(), none);
  for (std::int64_t done = 0; done < max_steps;) {
    const std::int64_t until = std::min(max_steps, done + kBatch);
    ParallelFor(samples.size(), jobs, [&](std::size_t i) {
      Stepper& s = steppers[i];
      while (exits[i] == none && s.step() < until) {
        s.Advance();
        if (!region.Contains(ToPrimal(s.current()))) exits[i] = s.step();
      }
    });
    const std::int64_t first = *std::min_element(exits.begin(), exits.end());
    if (first != none) return first;
    done = until;
  }
  return none;
}

SetVolumeEstimate SetVolumeLiouville(Rule rule, const BimatrixGame& g, const PointCloud& cloud,
                                     StepSize eps, std::int64_t T, const Region& region, int jobs) {
  Require(rule == Rule::kMwu || rule == Rule::kSurrogate,
          "set volume: rule must be mwu or omwu-surrogate");
  Require(!cloud.samples.empty(), "set volume: empty point cloud");
  Require(cloud.base_volume > 0.0, "set volume: degenerate point cloud (zero volume)");
  Require(T >= 0, "set volume: negative horizon");

  SetVolumeEstimate est;
  est.T = T;
  est.T_eff = T;
  if (!region.unconstrained()) {
    const std::int64_t exit = FirstExitStep(rule, g, cloud.samples, eps, region, T, jobs);
    Require(exit > 0 || T == 0, fmt::format("set volume: samples start outside region {}",
                                            region.label));
    if (exit <= T) {
      est.T_eff = exit;
      est.truncated = true;
    }
  }

  const std::size_t N = cloud.samples.size();
  std::vector<double> logs(N, 0.0);
  ParallelFor(N, jobs, [&](std::size_t i) {
    Stepper s(rule, g, cloud.samples[i], eps);
    double acc = 0.0;
    for (std::int64_t t = 0; t < est.T_eff; ++t) {
      acc += std::log(VolumeIntegrand(g, s.current(), eps.value(), rule));
      s.Advance();
    }
    logs[i] = acc;
  });

  est.sample_factors.resize(N);
  double mean = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    est.sample_factors[i] = std::exp(logs[i]);
    mean += est.sample_factors[i];
  }
  mean /= static_cast<double>(N);
  double var = 0.0;
  for (double f : est.sample_factors) var += (f - mean) * (f - mean);
  const double se_mean = N > 1 ? std::sqrt(var / static_cast<double>(N - 1) / static_cast<double>(N)) : 0.0;
  est.estimate = cloud.base_volume * mean;
  est.std_error = cloud.base_volume * se_mean;
  if (est.T_eff > 0) {
    const double inv = 1.0 / static_cast<double>(est.T_eff);
    est.rate = std::pow(mean, inv);
    est.rate_std_error = est.rate * inv * se_mean / mean;
  }
  return est;
}

double ShoelaceArea(const std::vector<Eigen::Vector2d>& polygon) {
  const std::size_t V = polygon.size();
  if (V < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < V; ++i) {
    const Eigen::Vector2d& a = polygon[i];
    const Eigen::Vector2d& b = polygon[(i + 1) % V];
    twice += a.x() * b.y() - a.y() * b.x();
  }
  return std::abs(twice) / 2.0;
}

namespace {

double Cross(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

bool ProperlyCross(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                   const Eigen::Vector2d& d) {
  const double d1 = Cross(c, d, a);
  const double d2 = Cross(c, d, b);
  const double d3 = Cross(a, b, c);
  const double d4 = Cross(a, b, d);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
         d4 != 0;
}

}  // namespace

bool SelfIntersects(const std::vector<Eigen::Vector2d>& polygon) {
  const std::size_t V = polygon.size();
  if (V < 4) return false;
  double longest = 0.0;
  for (std::size_t i = 0; i < V; ++i)
    longest = std::max(longest, (polygon[(i + 1) % V] - polygon[i]).norm());
  if (longest == 0.0) return false;
  // Uniform grid keyed by cell; edges are registered in every cell their
  // bounding box touches, so only edges sharing a cell are compared.
  const double cell = longest;
  auto key = [](std::int64_t cx, std::int64_t cy) {
    return static_cast<std::uint64_t>(cx) * 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(cy);
  };
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid;
  for (std::size_t i = 0; i < V; ++i) {
    const Eigen::Vector2d& a = polygon[i];
    const Eigen::Vector2d& b = polygon[(i + 1) % V];
    const auto x0 = static_cast<std::int64_t>(std::floor(std::min(a.x(), b.x()) / cell));
    const auto x1 = static_cast<std::int64_t>(std::floor(std::max(a.x(), b.x()) / cell));
    const auto y0 = static_cast<std::int64_t>(std::floor(std::min(a.y(), b.y()) / cell));
    const auto y1 = static_cast<std::int64_t>(std::floor(std::max(a.y(), b.y()) / cell));
    for (auto cx = x0; cx <= x1; ++cx)
      for (auto cy = y0; cy <= y1; ++cy) grid[key(cx, cy)].push_back(i);
  }
  for (const auto& [k, edges] : grid) {
    for (std::size_t s = 0; s < edges.size(); ++s) {
      for (std::size_t t = s + 1; t < edges.size(); ++t) {
        const std::size_t i = edges[s];
        const std::size_t j = edges[t];
        if ((i + 1) % V == j || (j + 1) % V == i) continue;
        if (ProperlyCross(polygon[i], polygon[(i + 1) % V], polygon[j], polygon[(j + 1) % V]))
          return true;
      }
    }
  }
  return false;
}

namespace {

struct TrackedVertex {
  Eigen::Vector2d origin;
  Stepper stepper;

  Eigen::Vector2d image() const {
    const Vector r = ReducedCoords(stepper.current());
    return {r(0), r(1)};
  }
};

TrackedVertex MakeVertex(Rule rule, const BimatrixGame& g, const Eigen::Vector2d& origin,
                         StepSize eps, std::int64_t steps) {
  DualPoint d{Vector::Zero(2), Vector::Zero(2)};
  d.p(0) = origin.x();
  d.q(0) = origin.y();
  TrackedVertex v{origin, Stepper(rule, g, d, eps)};
  while (v.stepper.step() < steps) v.stepper.Advance();
  return v;
}

}  // namespace

PolygonEvolution EvolvePolygon2d(Rule rule, const BimatrixGame& g,
                                 const std::vector<Eigen::Vector2d>& polygon, StepSize eps,
                                 const std::vector<std::int64_t>& snapshot_steps, double max_edge,
                                 std::size_t max_vertices) {
  Require(g.rows() == 2 && g.cols() == 2, "polygon evolution: 2x2 game required");
  Require(polygon.size() >= 3, "polygon evolution: need at least three vertices");
  Require(max_edge > 0.0, "polygon evolution: max_edge must be positive");
  Require(std::is_sorted(snapshot_steps.begin(), snapshot_steps.end()) &&
              (snapshot_steps.empty() || snapshot_steps.front() >= 0),
          "polygon evolution: snapshot steps must be nonnegative and sorted");

  std::vector<TrackedVertex> verts;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Eigen::Vector2d& a = polygon[i];
    const Eigen::Vector2d& b = polygon[(i + 1) % polygon.size()];
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a).norm() / max_edge)));
    for (int s = 0; s < pieces; ++s)
      verts.push_back(MakeVertex(rule, g, a + (b - a) * (static_cast<double>(s) / pieces), eps, 0));
  }

  PolygonEvolution out;
  for (const std::int64_t target : snapshot_steps) {
    for (auto& v : verts)
      while (v.stepper.step() < target) v.stepper.Advance();
    bool refined = true;
    while (refined && verts.size() < max_vertices) {
      refined = false;
      std::vector<TrackedVertex> next;
      next.reserve(verts.size() * 2);
      for (std::size_t i = 0; i < verts.size(); ++i) {
        const TrackedVertex& a = verts[i];
        const TrackedVertex& b = verts[(i + 1) % verts.size()];
        next.push_back(a);
        if ((b.image() - a.image()).norm() > max_edge &&
            next.size() + (verts.size() - i) < max_vertices) {
          next.push_back(MakeVertex(rule, g, (a.origin + b.origin) / 2.0, eps, target));
          refined = true;
        }
      }
      verts = std::move(next);
    }
    std::vector<Eigen::Vector2d> image;
    image.reserve(verts.size());
    for (const auto& v : verts) image.push_back(v.image());
    out.areas.push_back(ShoelaceArea(image));
    out.self_intersecting = out.self_intersecting || SelfIntersects(image);
    out.steps.push_back(target);
    out.snapshots.push_back(std::move(image));
  }
  return out;
}

double SetVolumeDirect2d(Rule rule, const BimatrixGame& g,
                         const std::vector<Eigen::Vector2d>& polygon, StepSize eps,
                         std::int64_t T, bool* self_intersecting) {
  const PolygonEvolution evo = EvolvePolygon2d(rule, g, polygon, eps, {T});
  if (self_intersecting) *self_intersecting = evo.self_intersecting;
  return evo.areas.back();
}

}  // namespace dualvol
