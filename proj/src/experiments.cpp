#include "dualvol/experiments.hpp"

#include "dualvol/game_io.hpp"
#include "dualvol/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

namespace dualvol {

namespace {

template <class T>
void ReadKey(const nlohmann::json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidArgument(fmt::format("config: bad value for \"{}\"", key));
  }
}

std::vector<double> ParseList(std::string_view text) {
  std::vector<double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    Require(ec == std::errc() && ptr == item.data() + item.size(),
            fmt::format("start: cannot parse \"{}\"", item));
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

// Probe points of E^delta: mass just above delta on one entry, nearly all of
// the rest on another. Any of them inside the region bounds inf C from above.
std::vector<Vector> BoundaryProbes(int n, double delta) {
  std::vector<Vector> out;
  const double low = delta * (1 + 1e-3);
  const double floor = 1e-6;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      Vector x = Vector::Constant(n, floor);
      x(i) = low;
      x(j) = 1.0 - low - floor * (n - 2);
      out.push_back(x);
    }
  }
  return out;
}

// C of the dynamics' own volume integrand: the OMWU surrogate carries the
// opposite sign.
BimatrixGame EffectiveGame(const BimatrixGame& g, Rule rule) {
  Require(rule == Rule::kMwu || rule == Rule::kSurrogate,
          "experiment: rule must be mwu or omwu-surrogate");
  return rule == Rule::kMwu ? g : g.Mirrored();
}

}  // namespace

void ExperimentConfig::Validate() const {
  Require(std::isfinite(eps) && eps > 0.0, "config: eps must be positive");
  Require(T >= 1, "config: T must be at least 1");
  Require(window_begin >= 0 && window_begin <= T, "config: window_begin must lie in [0, T]");
  Require(delta > 0.0 && delta < 0.5, "config: delta must lie in (0, 1/2)");
  Require(kappa > 0.0 && kappa < 1.0 / 3.0, "config: kappa must lie in (0, 1/3)");
  Require(region_a >= 1 && region_b >= 1, "config: region counts must be positive");
  Require(std::isfinite(box_side) && box_side > 0.0, "config: box_side must be positive");
  Require(samples >= 1, "config: samples must be at least 1");
  Require(games >= 1, "config: games must be at least 1");
  Require(trials >= 1, "config: trials must be at least 1");
  Require(max_m >= 2, "config: max_m must be at least 2");
  Require(stride >= 1, "config: stride must be at least 1");
  Require(jobs >= 1, "config: jobs must be at least 1");
  Require(std::is_sorted(snapshots.begin(), snapshots.end()) &&
              (snapshots.empty() || snapshots.front() >= 0),
          "config: snapshots must be nonnegative and sorted");
}

nlohmann::json ExperimentConfig::ToJson() const {
  return {{"game", game},         {"rule", std::string(ToString(rule))},
          {"eps", eps},           {"T", T},
          {"window_begin", window_begin},
          {"start", start},       {"delta", delta},
          {"kappa", kappa},       {"region_a", region_a},
          {"region_b", region_b}, {"box_side", box_side},
          {"samples", samples},   {"games", games},
          {"trials", trials},     {"max_m", max_m},
          {"snapshots", snapshots},
          {"seed", seed},         {"stride", stride}};
}

ExperimentConfig ExperimentConfig::FromJson(const nlohmann::json& j, ExperimentConfig base) {
  Require(j.is_object(), "config: expected a JSON object");
  static const char* const kKeys[] = {
      "game",    "rule",     "eps",      "T",     "window_begin", "start",     "delta",
      "kappa",   "region_a", "region_b", "box_side", "samples",   "games",     "trials",
      "max_m",   "snapshots", "seed",    "stride", "jobs",        "output_dir"};
  for (const auto& item : j.items()) {
    Require(std::find(std::begin(kKeys), std::end(kKeys), item.key()) != std::end(kKeys),
            fmt::format("config: unknown key \"{}\"", item.key()));
  }
  ExperimentConfig c = std::move(base);
  ReadKey(j, "game", c.game);
  if (j.contains("rule")) {
    std::string rule;
    ReadKey(j, "rule", rule);
    c.rule = ParseRule(rule);
  }
  ReadKey(j, "eps", c.eps);
  ReadKey(j, "T", c.T);
  ReadKey(j, "window_begin", c.window_begin);
  ReadKey(j, "start", c.start);
  ReadKey(j, "delta", c.delta);
  ReadKey(j, "kappa", c.kappa);
  ReadKey(j, "region_a", c.region_a);
  ReadKey(j, "region_b", c.region_b);
  ReadKey(j, "box_side", c.box_side);
  ReadKey(j, "samples", c.samples);
  ReadKey(j, "games", c.games);
  ReadKey(j, "trials", c.trials);
  ReadKey(j, "max_m", c.max_m);
  ReadKey(j, "snapshots", c.snapshots);
  ReadKey(j, "seed", c.seed);
  ReadKey(j, "stride", c.stride);
  ReadKey(j, "jobs", c.jobs);
  ReadKey(j, "output_dir", c.output_dir);
  return c;
}

ExperimentConfig ExperimentConfig::FromJson(const nlohmann::json& j) {
  return FromJson(j, ExperimentConfig{});
}

std::string ConfigHash(std::string_view recipe, const ExperimentConfig& cfg) {
  const std::string text = std::string(recipe) + "\n" + cfg.ToJson().dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

DualPoint ResolveStart(const std::string& spec, int n, int m) {
  if (spec == "uniform" || spec == "origin") return DualPoint::Zero(n, m);
  if (spec == "fig3") {
    Require(n == 3 && m == 3, "start: fig3 needs a 3x3 game");
    DualPoint d = DualPoint::Zero(3, 3);
    d.p(2) = 0.5;
    d.q(2) = -0.5;
    return d;
  }
  const auto semi = spec.find(';');
  Require(semi != std::string::npos, fmt::format("start: unknown start \"{}\"", spec));
  const std::vector<double> p = ParseList(std::string_view(spec).substr(0, semi));
  const std::vector<double> q = ParseList(std::string_view(spec).substr(semi + 1));
  Require(static_cast<int>(p.size()) == n && static_cast<int>(q.size()) == m,
          "start: dimension does not match the game");
  DualPoint d = DualPoint::Zero(n, m);
  for (int j = 0; j < n; ++j) d.p(j) = p[static_cast<std::size_t>(j)];
  for (int k = 0; k < m; ++k) d.q(k) = q[static_cast<std::size_t>(k)];
  Require(d.AllFinite(), "start: entries must be finite");
  return d;
}

ExtremismReport RunExtremismScan(const ExperimentConfig& cfg) {
  cfg.Validate();
  const BimatrixGame g = ResolveGame(cfg.game);
  Require(g.kind() != GameKind::kGeneral, "extremism scan: zero-sum or coordination game required");
  Stepper stepper(cfg.rule, g, ResolveStart(cfg.start, g.rows(), g.cols()), StepSize(cfg.eps));

  ExtremismReport report;
  std::int64_t enter = -1;
  std::int64_t last = -1;
  for (std::int64_t t = 0;; ++t) {
    if (t >= cfg.window_begin) {
      const PrimalPoint pt = ToPrimal(stepper.current());
      if (InExtremalDomain(pt, cfg.delta)) {
        // A single non-extremal step between two extremal ones is flicker.
        if (enter < 0 || t - last > 2) {
          if (enter >= 0) report.periods.emplace_back(enter, last + 1);
          enter = t;
        }
        last = t;
      }
      if ((t - cfg.window_begin) % cfg.stride == 0) report.trace.emplace_back(t, FourthMoment(pt));
      if (t == cfg.T) {
        report.final_primal = pt;
        break;
      }
    }
    stepper.Advance();
  }
  if (enter >= 0) report.periods.emplace_back(enter, last + 1);
  report.count = static_cast<int>(report.periods.size());
  double total = 0.0;
  for (const auto& [a, b] : report.periods) total += static_cast<double>(b - a);
  report.mean_length = report.count > 0 ? total / report.count : 0.0;
  return report;
}

nlohmann::json RecurrencePreconditions::ToJson() const {
  return {{"value", value},       {"r_margin", r_margin}, {"alpha1", alpha1},
          {"alpha2", alpha2},     {"nontrivial_2x2", nontrivial_2x2},     {"distinct_entries", distinct_entries},
          {"delta_ok", delta_ok}, {"margin_positive", margin_positive},     {"margin_covers_steps", margin_covers_steps},
          {"special_case", special_case},
          {"applicable", applicable()},
          {"label", applicable() ? "proven" : "empirical"}};
}

RecurrencePreconditions CheckRecurrencePreconditions(const BimatrixGame& g, double eps, double delta) {
  Require(g.kind() == GameKind::kZeroSum, "theorem 3 check: zero-sum game required");
  const GameConstants c = ComputeConstants(g);
  RecurrencePreconditions r;
  r.value = *c.game_value;
  r.r_margin = *c.r_margin;
  r.alpha1 = c.alpha1;
  r.alpha2 = c.alpha2;
  r.nontrivial_2x2 = r.alpha1 > 0.0;
  r.distinct_entries = r.alpha2 > 0.0;
  r.delta_ok = delta > 0.0 && delta < r.alpha2 / 4.0;
  // The game value comes from an LP; margins within its tolerance are zero.
  constexpr double kLpTolerance = 1e-9;
  r.margin_positive = r.r_margin > kLpTolerance;
  r.margin_covers_steps = r.margin_positive && 6.0 * eps + 4.0 * delta <= r.r_margin;
  r.special_case = !r.nontrivial_2x2;
  return r;
}

BimatrixGame DrawUncontrollableGame(const ExperimentConfig& cfg, int n, std::uint64_t seed,
                                    std::int64_t* draws) {
  constexpr std::int64_t kMaxDraws = 10000000;
  const Region region = RegionE(cfg.delta, cfg.region_a, cfg.region_b);
  std::vector<PrimalPoint> probes;
  for (const Vector& x : BoundaryProbes(n, cfg.delta))
    for (const Vector& y : BoundaryProbes(n, cfg.delta))
      if (region.Contains({x, y})) probes.push_back({x, y});
  for (std::int64_t s = 0; s < kMaxDraws; ++s) {
    // Screened as zero-sum; the surrogate runs on the mirrored coordination game.
    const BimatrixGame g =
        RandomGame(n, n, GameKind::kZeroSum, DeriveSeed(seed, static_cast<std::uint64_t>(s)));
    if (Alpha1(g) <= 0.0) continue;
    const bool rejected = std::any_of(probes.begin(), probes.end(),
                                      [&](const PrimalPoint& pt) { return CFunction(g, pt) <= cfg.eps; });
    if (rejected) continue;
    RegionSearchOptions opt;
    opt.seed = DeriveSeed(seed, static_cast<std::uint64_t>(s) ^ 0x5eedULL);
    const RegionInfResult inf = RegionInfC(g, region, opt);
    if (inf.value - inf.uncertainty <= cfg.eps) continue;
    if (draws) *draws = s + 1;
    return EffectiveGame(g, cfg.rule);
  }
  throw InvalidArgument("escape experiment: no uncontrollable game within the draw budget");
}

EscapeOutcome RunEscapeExperiment(const BimatrixGame& g, const ExperimentConfig& cfg) {
  constexpr std::int64_t kStepCap = 50000000;
  cfg.Validate();
  const Region region = RegionE(cfg.delta, cfg.region_a, cfg.region_b);
  RegionSearchOptions opt;
  opt.seed = DeriveSeed(cfg.seed, 1);
  opt.jobs = cfg.jobs;
  const RegionInfResult inf = RegionInfC(EffectiveGame(g, cfg.rule), region, opt);

  EscapeOutcome out{g};
  out.alpha1 = Alpha1(g);
  out.c_inf = inf.value;
  out.c_uncertainty = inf.uncertainty;
  out.c_bar = inf.value - inf.uncertainty;
  Require(out.c_bar > cfg.eps,
          fmt::format("escape experiment: region {} is not uncontrollable at eps = {} (C_bar = {})",
                      region.label, cfg.eps, out.c_bar));
  const PointCloud cloud =
      PointCloud::Cube(DualPoint::Zero(g.rows(), g.cols()), cfg.box_side, cfg.samples,
                       DeriveSeed(cfg.seed, 2));
  out.vol = cloud.base_volume;
  out.d_S = cloud.spread();
  out.bound = EscapeTimeBound(out.vol, out.d_S, out.c_bar, cfg.eps, g.rows(), g.cols());
  out.budget = static_cast<std::int64_t>(
      std::min(10.0 * out.bound, static_cast<double>(kStepCap)));
  const std::int64_t exit =
      FirstExitStep(cfg.rule, g, cloud.samples, StepSize(cfg.eps), region, out.budget, cfg.jobs);
  Require(exit > 0, "escape experiment: the box does not start inside the region");
  out.escaped = exit <= out.budget;
  out.measured = out.escaped ? exit : out.budget + 1;
  out.within_bound = out.escaped && static_cast<double>(out.measured) <= out.bound;
  return out;
}

std::string_view ToString(VolumeDirection d) {
  return d == VolumeDirection::kExpand ? "expand" : "contract";
}

VolumeDirection ExpectedDirection(Rule rule, GameKind kind) {
  Require(kind != GameKind::kGeneral, "volume direction: zero-sum or coordination game required");
  Require(rule != Rule::kOde, "volume direction: not defined for the ODE rule");
  const bool mwu = rule == Rule::kMwu;
  const bool zero_sum = kind == GameKind::kZeroSum;
  return mwu == zero_sum ? VolumeDirection::kExpand : VolumeDirection::kContract;
}

VolumeRateOutcome RunVolumeRate(const BimatrixGame& g, Rule rule, const ExperimentConfig& cfg) {
  cfg.Validate();
  VolumeRateOutcome out;
  out.rule = rule;
  out.kind = g.kind();
  out.expected = ExpectedDirection(rule, g.kind());
  const Region region = RegionE(cfg.delta, cfg.region_a, cfg.region_b);
  const PointCloud cloud = PointCloud::Cube(DualPoint::Zero(g.rows(), g.cols()), cfg.box_side,
                                            cfg.samples, DeriveSeed(cfg.seed, 3));
  out.base_volume = cloud.base_volume;
  out.estimate = SetVolumeLiouville(rule, g, cloud, StepSize(cfg.eps), cfg.T, region, cfg.jobs);
  Require(out.estimate.T_eff > 0, "volume rate: flow leaves the region at step 0");
  out.alpha1 = Alpha1(g);
  const double b = cfg.eps * cfg.eps * cfg.delta * cfg.delta * out.alpha1 * out.alpha1 / 4.0;
  const bool expand = out.expected == VolumeDirection::kExpand;
  out.predicted_rate = expand ? 1.0 + b : 1.0 - b;
  out.sign_ok = expand ? out.estimate.rate > 1.0 : out.estimate.rate < 1.0;
  const double T_eff = static_cast<double>(out.estimate.T_eff);
  const double predicted = out.base_volume * std::pow(out.predicted_rate, T_eff);
  const double slack = 3.0 * out.estimate.std_error;
  out.bound_ok = expand ? out.estimate.estimate >= predicted - slack
                        : out.estimate.estimate <= predicted + slack;
  if (rule == Rule::kMwu && g.kind() == GameKind::kZeroSum) {
    RegionSearchOptions opt;
    opt.seed = DeriveSeed(cfg.seed, 4);
    opt.jobs = cfg.jobs;
    const RegionInfResult inf = RegionInfC(g, region, opt);
    out.c_bar = inf.value - inf.uncertainty;
    if (out.c_bar > cfg.eps) {
      out.step_bound_rate = 1.0 + (out.c_bar - cfg.eps) * cfg.eps * cfg.eps;
      out.step_bound_ok =
          out.estimate.estimate >= out.base_volume * std::pow(out.step_bound_rate, T_eff) - slack;
    }
  }
  return out;
}

std::int64_t SingleMindedPeriod(int m, double alpha2, double delta, double eps) {
  Require(m >= 2, "single-minded: at least two options");
  Require(eps > 0.0 && delta > 0.0 && alpha2 > 4.0 * delta, "single-minded: need alpha2 > 4 delta");
  return static_cast<std::int64_t>(
      std::ceil(2.0 / (eps * (alpha2 - 4.0 * delta)) * std::log((m - 1) / delta)));
}

Vector EvenlySpacedPayoffs(int m) {
  Require(m >= 2, "single-minded: at least two options");
  Vector a(m);
  for (int k = 0; k < m; ++k) a(k) = 1.0 - 2.0 * k / (m - 1);
  return a;
}

SingleMindedStats RunSingleMinded(const Vector& a, double delta, double eps, NoiseKind noise,
                                  std::uint64_t seed, int trials) {
  const int m = static_cast<int>(a.size());
  Require(m >= 2, "single-minded: at least two options");
  Require((a.array().abs() <= 1.0).all(), "single-minded: payoffs must lie in [-1, 1]");
  Require(trials >= 1, "single-minded: at least one trial");
  double alpha2 = std::numeric_limits<double>::infinity();
  for (int k = 1; k < m; ++k) alpha2 = std::min(alpha2, a(k - 1) - a(k));
  Require(alpha2 > 0.0, "single-minded: payoffs must be strictly decreasing");
  Require(delta > 0.0 && delta <= alpha2 / 8.0, "single-minded: delta must lie in (0, alpha2/8]");

  SingleMindedStats stats;
  stats.m = m;
  stats.noise = noise;
  stats.alpha2 = alpha2;
  stats.T = SingleMindedPeriod(m, alpha2, delta, eps);
  stats.deadline = (m - 1) * stats.T;
  stats.trials = trials;
  const double small = delta / (m - 1);
  std::vector<int> khat(static_cast<std::size_t>(stats.deadline + 1));
  std::vector<int> above(khat.size());
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(DeriveSeed(seed, 2 * static_cast<std::uint64_t>(trial)));
    Vector logits(m);
    for (int k = 0; k < m; ++k) logits(k) = rng.Uniform(-5.0, 5.0);
    SingleAgentMwu agent(a, eps, MakeNoise(noise, delta, DeriveSeed(seed, 2 * static_cast<std::uint64_t>(trial) + 1)),
                         Softmax(logits));
    std::int64_t hit = -1;
    for (std::int64_t t = 0; t <= stats.deadline; ++t) {
      const Vector& y = agent.y();
      if (hit < 0 && y.maxCoeff() >= 1.0 - delta) hit = t;
      int first = m;
      int count = 0;
      for (int k = m - 1; k >= 0; --k) {
        if (y(k) > small) {
          first = k;
          ++count;
        }
      }
      khat[static_cast<std::size_t>(t)] = first;
      above[static_cast<std::size_t>(t)] = count;
      if (t < stats.deadline) agent.Step();
    }
    if (hit >= 0) {
      ++stats.reached;
      stats.max_hit_step = std::max(stats.max_hit_step, hit);
    }
    for (std::int64_t tau = 0; tau + stats.T <= stats.deadline; ++tau) {
      const auto later = static_cast<std::size_t>(tau + stats.T);
      if (above[later] <= 1) continue;
      ++stats.index_checks;
      if (khat[later] > khat[static_cast<std::size_t>(tau)] - 1) ++stats.index_violations;
    }
  }
  return stats;
}

SetEvolutionFigure RunSetEvolutionFigure(const BimatrixGame& g, Rule rule,
                                         const std::vector<Eigen::Vector2d>& square, StepSize eps,
                                         const std::vector<std::int64_t>& snapshots) {
  SetEvolutionFigure fig;
  fig.rule = rule;
  fig.kind = g.kind();
  fig.expected = ExpectedDirection(rule == Rule::kOmwu ? Rule::kSurrogate : rule, g.kind());
  fig.evolution = EvolvePolygon2d(rule, g, square, eps, snapshots);
  const auto& areas = fig.evolution.areas;
  fig.monotone = areas.size() >= 2;
  for (std::size_t i = 1; i < areas.size(); ++i) {
    const bool up = areas[i] > areas[i - 1];
    const bool down = areas[i] < areas[i - 1];
    if (fig.expected == VolumeDirection::kExpand ? !up : !down) fig.monotone = false;
  }
  return fig;
}

std::vector<Eigen::Vector2d> CenteredSquare(double half_side) {
  Require(half_side > 0.0, "square: half side must be positive");
  const double h = half_side;
  return {{-h, -h}, {h, -h}, {h, h}, {-h, h}};
}

}  // namespace dualvol
