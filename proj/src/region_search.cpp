#include "dualvol/parallel.hpp"
#include "dualvol/random.hpp"
#include "dualvol/volume.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dualvol {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Reduced coordinates r -> dual point with p_n = q_m = 0.
DualPoint Lift(const Vector& r, int n, int m) {
  DualPoint d = DualPoint::Zero(n, m);
  d.p.head(n - 1) = r.head(n - 1);
  d.q.head(m - 1) = r.tail(m - 1);
  return d;
}

Vector UniformSimplex(Rng& rng, int size) {
  Vector v(size);
  for (int i = 0; i < size; ++i) v(i) = -std::log(1.0 - rng.Uniform());
  return v / v.sum();
}

struct LocalResult {
  double value = kInf;
  double spread = 0.0;
  Vector point;
};

template <class F>
LocalResult NelderMead(F&& f, const Vector& x0, int iterations) {
  const int dim = static_cast<int>(x0.size());
  std::vector<Vector> simplex(dim + 1, x0);
  std::vector<double> values(dim + 1);
  values[0] = f(x0);
  for (int i = 0; i < dim; ++i) {
    double step = 0.5;
    for (int tries = 0; tries < 12; ++tries, step /= 2.0) {
      simplex[i + 1] = x0;
      simplex[i + 1](i) += step;
      values[i + 1] = f(simplex[i + 1]);
      if (std::isfinite(values[i + 1])) break;
    }
  }
  std::vector<int> order(dim + 1);
  for (int it = 0; it < iterations; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values[a] < values[b]; });
    const int best = order.front();
    const int worst = order.back();
    const int second = order[dim - 1];
    Vector centroid = Vector::Zero(dim);
    for (int i = 0; i <= dim; ++i)
      if (i != worst) centroid += simplex[i];
    centroid /= dim;
    const Vector reflected = centroid + (centroid - simplex[worst]);
    const double fr = f(reflected);
    if (fr < values[best]) {
      const Vector expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = f(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const Vector contracted = fr < values[worst] ? Vector(centroid + 0.5 * (reflected - centroid))
                                                 : Vector(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = f(contracted);
    if (fc < std::min(fr, values[worst])) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    for (int i = 0; i <= dim; ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
      values[i] = f(simplex[i]);
    }
  }
  LocalResult out;
  double hi = -kInf;
  for (int i = 0; i <= dim; ++i) {
    if (values[i] < out.value) {
      out.value = values[i];
      out.point = simplex[i];
    }
    if (std::isfinite(values[i])) hi = std::max(hi, values[i]);
  }
  out.spread = std::isfinite(out.value) ? hi - out.value : 0.0;
  return out;
}

}  // namespace

RegionInfResult RegionInfC(const BimatrixGame& g, const Region& region,
                           const RegionSearchOptions& options) {
  Require(options.starts >= 1, "region search: at least one start is required");
  Require(options.iterations >= 0, "region search: negative iteration count");
  const int n = g.rows();
  const int m = g.cols();

  std::vector<Vector> starts;
  for (int draw = 0; draw < options.max_draws && static_cast<int>(starts.size()) < options.starts;
       ++draw) {
    Rng rng(DeriveSeed(options.seed, static_cast<std::uint64_t>(draw)));
    const PrimalPoint pt{UniformSimplex(rng, n), UniformSimplex(rng, m)};
    if (!pt.StrictlyInterior() || !region.Contains(pt)) continue;
    starts.push_back(ReducedCoords(ToDual(pt)));
  }
  if (starts.empty())
    throw InvalidArgument(fmt::format("region search: no sample fell in region {}", region.label));

  auto objective = [&](const Vector& r) {
    if (!r.allFinite()) return kInf;
    const PrimalPoint pt = ToPrimal(Lift(r, n, m));
    if (!pt.StrictlyInterior() || !region.Contains(pt)) return kInf;
    return CFunction(g, pt);
  };
  std::vector<LocalResult> local(starts.size());
  ParallelFor(starts.size(), options.jobs,
              [&](std::size_t i) { local[i] = NelderMead(objective, starts[i], options.iterations); });

  std::size_t winner = 0;
  for (std::size_t i = 1; i < local.size(); ++i)
    if (local[i].value < local[winner].value) winner = i;
  RegionInfResult result;
  result.value = local[winner].value;
  result.uncertainty = local[winner].spread;
  result.dual_argmin = Lift(local[winner].point, n, m);
  result.argmin = ToPrimal(result.dual_argmin);
  result.starts = static_cast<int>(starts.size());
  return result;
}

}  // namespace dualvol
