#include "dualvol/experiments.hpp"
#include "dualvol/game_io.hpp"

#include <doctest.h>

#include <cmath>

using namespace dualvol;

namespace {

ExperimentConfig Fig3Window() { return RecipeDefaults("fig3"); }

}  // namespace

TEST_CASE("extremism periods in the Rock-Paper-Scissors window are maximal runs") {
  const ExperimentConfig cfg = Fig3Window();
  const ExtremismReport report = RunExtremismScan(cfg);
  CHECK(report.count >= 17);
  CHECK(report.count <= 27);
  CHECK(report.mean_length >= 250.0);
  CHECK(report.mean_length <= 450.0);
  CHECK(report.trace.size() == static_cast<std::size_t>((cfg.T - cfg.window_begin) / cfg.stride + 1));

  // Independent recomputation of the extremal flags over the window.
  const BimatrixGame g = ResolveGame(cfg.game);
  Stepper s(cfg.rule, g, ResolveStart(cfg.start, 3, 3), StepSize(cfg.eps));
  std::vector<bool> flag;
  for (std::int64_t t = 0; t <= cfg.T; ++t) {
    if (t >= cfg.window_begin) flag.push_back(InExtremalDomain(ToPrimal(s.current()), cfg.delta));
    if (t < cfg.T) s.Advance();
  }
  auto at = [&](std::int64_t t) { return static_cast<bool>(flag[static_cast<std::size_t>(t - cfg.window_begin)]); };
  std::int64_t flagged = 0;
  for (bool f : flag) flagged += f;
  std::int64_t covered = 0;
  for (std::size_t i = 0; i < report.periods.size(); ++i) {
    const auto [enter, exit] = report.periods[i];
    CHECK(exit > enter);
    CHECK(at(enter));
    CHECK(at(exit - 1));
    if (exit <= cfg.T) CHECK_FALSE(at(exit));
    if (enter > cfg.window_begin) CHECK_FALSE(at(enter - 1));
    if (i + 1 < report.periods.size()) CHECK(report.periods[i + 1].first >= exit + 2);
    for (std::int64_t t = enter; t < exit; ++t) covered += at(t);
    for (std::int64_t t = enter; t + 1 < exit; ++t) CHECK((at(t) || at(t + 1)));
  }
  CHECK(covered == flagged);
}

TEST_CASE("extremism scan edge cases") {
  ExperimentConfig cfg;
  cfg.T = 5000;
  cfg.stride = 100;
  const ExtremismReport fixed = RunExtremismScan(cfg);
  CHECK(fixed.count == 0);
  CHECK(fixed.mean_length == 0.0);
  CHECK(fixed.trace.front().second == doctest::Approx(6.0 / 81.0).epsilon(1e-15));

  cfg.game = "identity-coordination:3";
  cfg.rule = Rule::kOmwu;
  cfg.eps = 0.05;
  cfg.start = "0.01,0,0;0.02,0,-0.01";
  const ExtremismReport coord = RunExtremismScan(cfg);
  CHECK(coord.count >= 1);
  CHECK(InExtremalDomain(coord.final_primal, cfg.delta));

  cfg.game = "random:3x3:general:1";
  CHECK_THROWS_AS(RunExtremismScan(cfg), InvalidArgument);
  cfg.game = "rps";
  cfg.T = 0;
  CHECK_THROWS_AS(RunExtremismScan(cfg), InvalidArgument);
}

TEST_CASE("recurrence precondition report") {
  const RecurrencePreconditions rps = CheckRecurrencePreconditions(RockPaperScissors(), 0.005, 0.005);
  CHECK(std::abs(rps.value) <= 1e-12);
  CHECK(rps.alpha1 == 0.0);
  CHECK_FALSE(rps.nontrivial_2x2);
  CHECK(rps.special_case);
  CHECK(std::abs(rps.r_margin) <= 1e-12);
  CHECK_FALSE(rps.margin_positive);
  CHECK_FALSE(rps.applicable());
  CHECK(rps.ToJson()["label"] == "empirical");

  const RecurrencePreconditions mp = CheckRecurrencePreconditions(MatchingPennies(), 0.005, 0.005);
  CHECK(mp.r_margin == doctest::Approx(1.0));
  CHECK(mp.margin_positive);
  CHECK(6 * 0.005 + 4 * 0.005 == doctest::Approx(0.05));
  CHECK(mp.margin_covers_steps);
  CHECK(mp.applicable());
  CHECK_FALSE(CheckRecurrencePreconditions(MatchingPennies(), 0.1, 0.2).margin_covers_steps);
  CHECK_THROWS_AS(CheckRecurrencePreconditions(IdentityCoordination(2), 0.01, 0.01), InvalidArgument);
}

TEST_CASE("escape experiment preconditions") {
  ExperimentConfig cfg = RecipeDefaults("escape");
  cfg.samples = 16;
  CHECK_THROWS_AS(RunEscapeExperiment(IdentityCoordination(3), cfg), InvalidArgument);
  // A typical random game is far from uncontrollable at this step size.
  CHECK_THROWS_AS(RunEscapeExperiment(RandomGame(3, 3, GameKind::kZeroSum, 4), cfg), InvalidArgument);

  // The surrogate on coordination games mirrors MWU on zero-sum games.
  cfg.rule = Rule::kSurrogate;
  std::int64_t draws = 0;
  const BimatrixGame g = DrawUncontrollableGame(cfg, 3, 17, &draws);
  CHECK(g.kind() == GameKind::kCoordination);
  CHECK(draws >= 1);
  const EscapeOutcome out = RunEscapeExperiment(g, cfg);
  CHECK(out.c_bar > cfg.eps);
  CHECK(out.escaped);
  CHECK(out.within_bound);
  CHECK(out.vol == doctest::Approx(std::pow(0.1, 6)));
  CHECK(out.d_S == doctest::Approx(0.1));
  CHECK(out.bound == EscapeTimeBound(out.vol, out.d_S, out.c_bar, cfg.eps, 3, 3));
}

TEST_CASE("four-cell volume direction table") {
  CHECK(ExpectedDirection(Rule::kMwu, GameKind::kZeroSum) == VolumeDirection::kExpand);
  CHECK(ExpectedDirection(Rule::kMwu, GameKind::kCoordination) == VolumeDirection::kContract);
  CHECK(ExpectedDirection(Rule::kSurrogate, GameKind::kZeroSum) == VolumeDirection::kContract);
  CHECK(ExpectedDirection(Rule::kSurrogate, GameKind::kCoordination) == VolumeDirection::kExpand);
  CHECK_THROWS_AS(ExpectedDirection(Rule::kMwu, GameKind::kGeneral), InvalidArgument);

  ExperimentConfig cfg = RecipeDefaults("rates");
  cfg.T = 200;
  cfg.samples = 128;
  const VolumeRateOutcome mwu = RunVolumeRate(MatchingPennies(), Rule::kMwu, cfg);
  CHECK(mwu.sign_ok);
  CHECK(mwu.bound_ok);
  CHECK(mwu.step_bound_rate > 1.0);
  CHECK(mwu.step_bound_ok);
  CHECK(mwu.predicted_rate == doctest::Approx(1 + 0.05 * 0.05 * 0.2 * 0.2 * 4 / 4));
  CHECK_FALSE(mwu.estimate.truncated);
  const VolumeRateOutcome sur = RunVolumeRate(MatchingPennies(), Rule::kSurrogate, cfg);
  CHECK(sur.estimate.rate < 1.0);
  CHECK(sur.bound_ok);
  const VolumeRateOutcome co = RunVolumeRate(IdentityCoordination(2), Rule::kMwu, cfg);
  CHECK(co.estimate.rate < 1.0);
  CHECK(co.estimate.truncated);
  CHECK(co.bound_ok);
}

TEST_CASE("single-minded deadline") {
  CHECK(SingleMindedPeriod(3, 1.0, 0.05, 0.01) ==
        static_cast<std::int64_t>(std::ceil(250.0 * std::log(40.0))));
  const Vector a{{1.0, 0.0, -1.0}};
  CHECK(EvenlySpacedPayoffs(3).isApprox(a));
  const SingleMindedStats zero = RunSingleMinded(a, 0.05, 0.01, NoiseKind::kZero, 1, 20);
  CHECK(zero.reached == 20);
  CHECK(zero.deadline == 2 * zero.T);
  CHECK(zero.max_hit_step <= zero.deadline);
  CHECK(zero.index_violations == 0);
  const SingleMindedStats adv = RunSingleMinded(a, 0.05, 0.01, NoiseKind::kAlternating, 2, 100);
  CHECK(adv.reached == 100);
  CHECK(adv.index_checks > 0);
  CHECK(adv.index_violations == 0);
  CHECK_THROWS_AS(RunSingleMinded(a, 0.13, 0.01, NoiseKind::kZero, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(RunSingleMinded(Vector{{0.0, 1.0}}, 0.05, 0.01, NoiseKind::kZero, 1, 1),
                  InvalidArgument);
}

TEST_CASE("set evolution figure directions") {
  const auto mp = RunSetEvolutionFigure(MatchingPennies(), Rule::kMwu, CenteredSquare(0.05),
                                        StepSize(0.05), {0, 50, 100});
  CHECK(mp.expected == VolumeDirection::kExpand);
  CHECK(mp.monotone);
  const auto co = RunSetEvolutionFigure(IdentityCoordination(2), Rule::kMwu, CenteredSquare(0.5),
                                        StepSize(0.05), {0, 10, 20});
  CHECK(co.expected == VolumeDirection::kContract);
  CHECK(co.monotone);
  const auto co_omwu = RunSetEvolutionFigure(IdentityCoordination(2), Rule::kOmwu,
                                             CenteredSquare(0.5), StepSize(0.05), {0, 10, 20});
  CHECK(co_omwu.expected == VolumeDirection::kExpand);
  CHECK(co_omwu.monotone);
  CHECK_FALSE(RunSetEvolutionFigure(MatchingPennies(), Rule::kMwu, CenteredSquare(0.05),
                                    StepSize(0.05), {0})
                  .monotone);
}

TEST_CASE("experiment config serialization") {
  ExperimentConfig cfg = RecipeDefaults("fig3");
  const ExperimentConfig back = ExperimentConfig::FromJson(cfg.ToJson());
  CHECK(back.ToJson() == cfg.ToJson());
  CHECK(ConfigHash("fig3", back) == ConfigHash("fig3", cfg));
  CHECK(ConfigHash("fig3", cfg).size() == 16);
  CHECK(ConfigHash("fig1", cfg) != ConfigHash("fig3", cfg));
  ExperimentConfig other = cfg;
  other.jobs = 7;
  other.output_dir = "elsewhere";
  CHECK(ConfigHash("fig3", other) == ConfigHash("fig3", cfg));
  other.seed = 1;
  CHECK(ConfigHash("fig3", other) != ConfigHash("fig3", cfg));

  const ExperimentConfig merged = ExperimentConfig::FromJson({{"eps", 0.01}}, cfg);
  CHECK(merged.eps == 0.01);
  CHECK(merged.T == cfg.T);
  CHECK_THROWS_AS(ExperimentConfig::FromJson({{"epsilon", 0.01}}), InvalidArgument);
  CHECK_THROWS_AS(ExperimentConfig::FromJson({{"eps", "small"}}), InvalidArgument);
  CHECK_THROWS_AS(ExperimentConfig::FromJson({{"rule", "sgd"}}), InvalidArgument);

  ExperimentConfig bad;
  bad.eps = 0.0;
  CHECK_THROWS_AS(bad.Validate(), InvalidArgument);
  bad = {};
  bad.kappa = 0.4;
  CHECK_THROWS_AS(bad.Validate(), InvalidArgument);
  bad = {};
  bad.snapshots = {5, 1};
  CHECK_THROWS_AS(bad.Validate(), InvalidArgument);

  CHECK(ResolveStart("fig3", 3, 3).p(2) == 0.5);
  CHECK(ResolveStart("1,2;3,4", 2, 2).q(1) == 4.0);
  CHECK_THROWS_AS(ResolveStart("1,2;3", 2, 2), InvalidArgument);
  CHECK_THROWS_AS(ResolveStart("fig3", 2, 2), InvalidArgument);
  CHECK_THROWS_AS(ResolveStart("nearby", 2, 2), InvalidArgument);
}

TEST_CASE("recipes are deterministic and independent of the worker count") {
  CHECK(IsRecipe("rates"));
  CHECK_FALSE(IsRecipe("fig4"));
  CHECK_THROWS_AS(RecipeDefaults("fig4"), InvalidArgument);

  ExperimentConfig cfg = RecipeDefaults("single-minded");
  cfg.trials = 5;
  cfg.max_m = 4;
  const ExperimentOutput one = Reproduce("single-minded", cfg);
  cfg.jobs = 3;
  const ExperimentOutput three = Reproduce("single-minded", cfg);
  CHECK(SummaryText(one) == SummaryText(three));
  CHECK(one.trace_csv == three.trace_csv);
  CHECK(one.passed);
  CHECK(one.summary["config"] == cfg.ToJson());
  CHECK(one.summary["seed"] == cfg.seed);
  CHECK(one.report_lines.size() == 9);

  ExperimentConfig fig = RecipeDefaults("fig2");
  const ExperimentOutput f1 = Reproduce("fig2", fig);
  fig.jobs = 4;
  CHECK(SummaryText(Reproduce("fig2", fig)) == SummaryText(f1));
  CHECK(f1.passed);
}
