#include "dualvol/experiments.hpp"
#include "dualvol/format.hpp"
#include "dualvol/game_io.hpp"
#include "dualvol/parallel.hpp"
#include "dualvol/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace dualvol {

namespace {

class Checks {
 public:
  void Add(const std::string& name, bool pass, const std::string& detail) {
    entries_.push_back({{"name", name}, {"pass", pass}, {"detail", detail}});
    lines_.push_back(fmt::format("[{}] {}: {}", pass ? "PASS" : "FAIL", name, detail));
    all_ = all_ && pass;
  }

  void Finish(ExperimentOutput& out) {
    out.summary["checks"] = entries_;
    out.summary["pass"] = all_;
    out.report_lines = lines_;
    out.passed = all_;
  }

 private:
  nlohmann::json entries_ = nlohmann::json::array();
  std::vector<std::string> lines_;
  bool all_ = true;
};

nlohmann::json AreasJson(const SetEvolutionFigure& fig) {
  return {{"rule", std::string(ToString(fig.rule))},
          {"kind", std::string(ToString(fig.kind))},
          {"expected", std::string(ToString(fig.expected))},
          {"steps", fig.evolution.steps},
          {"areas", fig.evolution.areas},
          {"self_intersecting", fig.evolution.self_intersecting},
          {"monotone", fig.monotone}};
}

void AppendPolygons(std::string& csv, const std::string& cell, const SetEvolutionFigure& fig) {
  for (std::size_t s = 0; s < fig.evolution.snapshots.size(); ++s) {
    const auto& poly = fig.evolution.snapshots[s];
    for (std::size_t v = 0; v < poly.size(); ++v) {
      csv += fmt::format("{},{},{},{},{}\n", cell, fig.evolution.steps[s], v,
                         FormatReal(poly[v].x()), FormatReal(poly[v].y()));
    }
  }
}

struct FigureCell {
  std::string name;
  BimatrixGame game;
  Rule rule;
  double side;
};

void RunFigureCells(const std::vector<FigureCell>& cells, const ExperimentConfig& cfg,
                    ExperimentOutput& out, Checks& checks) {
  std::vector<SetEvolutionFigure> figs(cells.size());
  ParallelFor(cells.size(), cfg.jobs, [&](std::size_t i) {
    figs[i] = RunSetEvolutionFigure(cells[i].game, cells[i].rule, CenteredSquare(cells[i].side / 2),
                                    StepSize(cfg.eps), cfg.snapshots);
  });
  out.trace_csv = "cell,step,vertex,r1,r2\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& fig = figs[i];
    out.summary["cells"][cells[i].name] = AreasJson(fig);
    out.summary["cells"][cells[i].name]["square_side"] = cells[i].side;
    AppendPolygons(out.trace_csv, cells[i].name, fig);
    checks.Add(cells[i].name + " area " + std::string(ToString(fig.expected)), fig.monotone,
               fmt::format("areas {:.6g} -> {:.6g} over {} snapshots", fig.evolution.areas.front(),
                           fig.evolution.areas.back(), fig.evolution.areas.size()));
  }
}

void Fig1(const ExperimentConfig& cfg, ExperimentOutput& out, Checks& checks) {
  const BimatrixGame mp = MatchingPennies();
  RunFigureCells({{"mwu/matching-pennies", mp, Rule::kMwu, cfg.box_side},
                  {"omwu/matching-pennies", mp, Rule::kOmwu, 2.0}},
                 cfg, out, checks);
}

void Fig2(const ExperimentConfig& cfg, ExperimentOutput& out, Checks& checks) {
  const BimatrixGame mp = MatchingPennies();
  const BimatrixGame co = IdentityCoordination(2);
  RunFigureCells({{"mwu/matching-pennies", mp, Rule::kMwu, cfg.box_side},
                  {"omwu/matching-pennies", mp, Rule::kOmwu, 2.0},
                  {"mwu/identity-coordination", co, Rule::kMwu, 1.0},
                  {"omwu/identity-coordination", co, Rule::kOmwu, 1.0}},
                 cfg, out, checks);
}

void Fig3(const ExperimentConfig& cfg, ExperimentOutput& out, Checks& checks) {
  const ExtremismReport report = RunExtremismScan(cfg);
  const BimatrixGame g = ResolveGame(cfg.game);
  nlohmann::json periods = nlohmann::json::array();
  for (const auto& [a, b] : report.periods) periods.push_back({a, b});
  out.summary["periods"] = periods;
  out.summary["count"] = report.count;
  out.summary["mean_length"] = report.mean_length;
  out.summary["reference_level"] = 2.0 * std::pow(1.0 - cfg.delta, 4);
  out.summary["final_primal"] = {{"x", VectorToJson(report.final_primal.x)},
                                 {"y", VectorToJson(report.final_primal.y)}};
  if (g.kind() == GameKind::kZeroSum) {
    const RecurrencePreconditions pre = CheckRecurrencePreconditions(g, cfg.eps, cfg.delta);
    out.summary["preconditions"] = pre.ToJson();
  }
  out.trace_csv = "step,fourth_moment\n";
  for (const auto& [t, v] : report.trace) out.trace_csv += fmt::format("{},{}\n", t, FormatReal(v));
  checks.Add("period count in [17, 27]", report.count >= 17 && report.count <= 27,
             fmt::format("{} periods", report.count));
  checks.Add("mean period length in [250, 450]",
             report.mean_length >= 250.0 && report.mean_length <= 450.0,
             fmt::format("mean length {:.1f}", report.mean_length));
}

void Escape(const ExperimentConfig& cfg, ExperimentOutput& out, Checks& checks) {
  constexpr int kSize = 3;
  std::vector<EscapeOutcome> runs(static_cast<std::size_t>(cfg.games), EscapeOutcome{MatchingPennies()});
  ExperimentConfig inner = cfg;
  inner.jobs = 1;
  ParallelFor(runs.size(), cfg.jobs, [&](std::size_t i) {
    std::int64_t draws = 0;
    const BimatrixGame g = DrawUncontrollableGame(cfg, kSize, DeriveSeed(cfg.seed, i), &draws);
    ExperimentConfig own = inner;
    own.seed = DeriveSeed(cfg.seed, i + 1000);
    runs[i] = RunEscapeExperiment(g, own);
    runs[i].draws = draws;
  });
  out.trace_csv = "game,draws,alpha1,c_inf,c_bar,vol,d_S,bound,measured,escaped\n";
  nlohmann::json games = nlohmann::json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const EscapeOutcome& r = runs[i];
    games.push_back({{"game", GameToJson(r.game)},
                     {"draws", r.draws},
                     {"alpha1", r.alpha1},
                     {"c_inf", r.c_inf},
                     {"c_uncertainty", r.c_uncertainty},
                     {"c_bar", r.c_bar},
                     {"vol", r.vol},
                     {"d_S", r.d_S},
                     {"bound", r.bound},
                     {"budget", r.budget},
                     {"measured", r.measured},
                     {"escaped", r.escaped},
                     {"within_bound", r.within_bound}});
    out.trace_csv += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", i, r.draws, FormatReal(r.alpha1),
                                 FormatReal(r.c_inf), FormatReal(r.c_bar), FormatReal(r.vol),
                                 FormatReal(r.d_S), FormatReal(r.bound), r.measured, r.escaped);
    checks.Add(fmt::format("game {} escapes within the bound", i), r.within_bound,
               r.escaped ? fmt::format("exit step {} <= bound {:.4g}", r.measured, r.bound)
                         : fmt::format("no exit within {} steps (bound {:.4g})", r.budget, r.bound));
  }
  out.summary["games"] = games;
}

void SingleMinded(const ExperimentConfig& cfg, ExperimentOutput& out, Checks& checks) {
  const NoiseKind kinds[] = {NoiseKind::kZero, NoiseKind::kUniform, NoiseKind::kAlternating};
  struct Job {
    int m;
    NoiseKind noise;
  };
  std::vector<Job> jobs;
  for (int m = 2; m <= cfg.max_m; ++m)
    for (NoiseKind k : kinds) jobs.push_back({m, k});
  std::vector<SingleMindedStats> stats(jobs.size());
  ParallelFor(jobs.size(), cfg.jobs, [&](std::size_t i) {
    const Vector a = EvenlySpacedPayoffs(jobs[i].m);
    double gap = 2.0;
    for (int k = 1; k < a.size(); ++k) gap = std::min(gap, a(k - 1) - a(k));
    const double delta = std::min(cfg.delta, gap / 8.0);
    stats[i] = RunSingleMinded(a, delta, cfg.eps, jobs[i].noise, DeriveSeed(cfg.seed, i), cfg.trials);
  });
  out.trace_csv = "m,noise,T,deadline,trials,reached,max_hit_step,index_checks,index_violations\n";
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : stats) {
    const std::string noise(ToString(s.noise));
    rows.push_back({{"m", s.m},
                    {"noise", noise},
                    {"alpha2", s.alpha2},
                    {"T", s.T},
                    {"deadline", s.deadline},
                    {"trials", s.trials},
                    {"reached", s.reached},
                    {"max_hit_step", s.max_hit_step},
                    {"index_checks", s.index_checks},
                    {"index_violations", s.index_violations}});
    out.trace_csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", s.m, noise, s.T, s.deadline,
                                 s.trials, s.reached, s.max_hit_step, s.index_checks,
                                 s.index_violations);
    checks.Add(fmt::format("m={} {} noise reaches 1-delta by the deadline", s.m, noise),
               s.reached == s.trials && s.index_violations == 0,
               fmt::format("{}/{} trials, latest hit {} of {}, {} index-decrease violations",
                           s.reached, s.trials, s.max_hit_step, s.deadline, s.index_violations));
  }
  out.summary["runs"] = rows;
}

void Rates(const ExperimentConfig& cfg, ExperimentOutput& out, Checks& checks) {
  struct Cell {
    BimatrixGame game;
    Rule rule;
  };
  const std::vector<Cell> cells = {{MatchingPennies(), Rule::kMwu},
                                   {MatchingPennies(), Rule::kSurrogate},
                                   {IdentityCoordination(2), Rule::kMwu},
                                   {IdentityCoordination(2), Rule::kSurrogate}};
  out.trace_csv = "rule,kind,expected,T_eff,rate,rate_std_error,predicted_rate,step_bound_rate\n";
  nlohmann::json rows = nlohmann::json::array();
  for (const Cell& c : cells) {
    const VolumeRateOutcome r = RunVolumeRate(c.game, c.rule, cfg);
    const std::string rule(ToString(r.rule));
    const std::string kind(ToString(r.kind));
    const std::string dir(ToString(r.expected));
    rows.push_back({{"rule", rule},
                    {"kind", kind},
                    {"expected", dir},
                    {"T", r.estimate.T},
                    {"T_eff", r.estimate.T_eff},
                    {"truncated", r.estimate.truncated},
                    {"estimate", r.estimate.estimate},
                    {"std_error", r.estimate.std_error},
                    {"base_volume", r.base_volume},
                    {"rate", r.estimate.rate},
                    {"rate_std_error", r.estimate.rate_std_error},
                    {"alpha1", r.alpha1},
                    {"predicted_rate", r.predicted_rate},
                    {"step_bound_rate", r.step_bound_rate},
                    {"c_bar", r.c_bar},
                    {"sign_ok", r.sign_ok},
                    {"bound_ok", r.bound_ok},
                    {"step_bound_ok", r.step_bound_ok}});
    out.trace_csv += fmt::format("{},{},{},{},{},{},{},{}\n", rule, kind, dir, r.estimate.T_eff,
                                 FormatReal(r.estimate.rate), FormatReal(r.estimate.rate_std_error),
                                 FormatReal(r.predicted_rate), FormatReal(r.step_bound_rate));
    const std::string cell = rule + "/" + kind;
    checks.Add(cell + " " + dir, r.sign_ok,
               fmt::format("rate {:.8f} over {} steps", r.estimate.rate, r.estimate.T_eff));
    checks.Add(cell + " volume bound", r.bound_ok,
               fmt::format("vol ratio {:.6g} vs {:.6g}^{}", r.estimate.estimate / r.base_volume,
                           r.predicted_rate, r.estimate.T_eff));
    if (r.step_bound_rate > 0.0) {
      checks.Add(cell + " one-step expansion bound", r.step_bound_ok,
                 fmt::format("vol ratio {:.6g} vs {:.8f}^{}", r.estimate.estimate / r.base_volume,
                             r.step_bound_rate, r.estimate.T_eff));
    }
  }
  out.summary["cells"] = rows;
}

std::vector<std::int64_t> Range(std::int64_t step, int count) {
  std::vector<std::int64_t> out;
  for (int i = 0; i <= count; ++i) out.push_back(step * i);
  return out;
}

}  // namespace

bool IsRecipe(std::string_view name) {
  return std::find(std::begin(kRecipes), std::end(kRecipes), name) != std::end(kRecipes);
}

ExperimentConfig RecipeDefaults(std::string_view recipe) {
  Require(IsRecipe(recipe), fmt::format("unknown recipe \"{}\"", recipe));
  ExperimentConfig c;
  if (recipe == "fig1" || recipe == "fig2") {
    c.game = "matching-pennies";
    c.eps = 0.05;
    c.T = 500;
    c.delta = 0.2;
    c.box_side = 0.1;
    c.snapshots = recipe == "fig1" ? Range(100, 5) : Range(10, 5);
  } else if (recipe == "fig3") {
    c.game = "rps";
    c.eps = 0.005;
    c.T = 2000000;
    c.window_begin = 1970000;
    c.start = "fig3";
    c.delta = 0.005;
    c.stride = 10;
  } else if (recipe == "escape") {
    c.game = "random:3x3:zero-sum";
    c.eps = 0.01;
    c.delta = 0.1;
    c.box_side = 0.1;
    c.samples = 64;
    c.games = 10;
  } else if (recipe == "single-minded") {
    c.eps = 0.01;
    c.delta = 0.05;
    c.trials = 100;
    c.max_m = 6;
  } else {
    c.game = "matching-pennies,identity-coordination:2";
    c.eps = 0.05;
    c.T = 1000;
    c.delta = 0.2;
    c.box_side = 0.1;
    c.samples = 1024;
  }
  return c;
}

ExperimentOutput Reproduce(std::string_view recipe, const ExperimentConfig& cfg) {
  Require(IsRecipe(recipe), fmt::format("unknown recipe \"{}\"", recipe));
  cfg.Validate();
  ExperimentOutput out;
  out.recipe = std::string(recipe);
  out.hash = ConfigHash(recipe, cfg);
  out.summary["recipe"] = out.recipe;
  out.summary["hash"] = out.hash;
  out.summary["config"] = cfg.ToJson();
  out.summary["seed"] = cfg.seed;
  Checks checks;
  if (recipe == "fig1") Fig1(cfg, out, checks);
  else if (recipe == "fig2") Fig2(cfg, out, checks);
  else if (recipe == "fig3") Fig3(cfg, out, checks);
  else if (recipe == "escape") Escape(cfg, out, checks);
  else if (recipe == "single-minded") SingleMinded(cfg, out, checks);
  else Rates(cfg, out, checks);
  checks.Finish(out);
  return out;
}

std::string SummaryText(const ExperimentOutput& out) { return out.summary.dump(2) + "\n"; }

std::vector<std::string> WriteExperimentOutput(const ExperimentOutput& out, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base = std::filesystem::path(dir) / (out.recipe + "-" + out.hash);
  std::vector<std::string> written;
  auto write = [&](const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    Require(static_cast<bool>(f), fmt::format("cannot write {}", path.string()));
    f << text;
    written.push_back(path.string());
  };
  write(base.string() + ".json", SummaryText(out));
  if (!out.trace_csv.empty()) write(base.string() + ".csv", out.trace_csv);
  return written;
}

}  // namespace dualvol
