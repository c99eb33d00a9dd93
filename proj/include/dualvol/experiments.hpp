#pragma once

#include "dualvol/volume.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dualvol {

// Inputs shared by all experiment recipes; each recipe reads the fields it
// needs. `jobs` and `output_dir` do not affect results and are excluded from
// the serialized form and the config hash.
struct ExperimentConfig {
  std::string game = "rps";
  Rule rule = Rule::kMwu;
  double eps = 0.005;
  std::int64_t T = 2000000;
  // First step of the scanned window.
  std::int64_t window_begin = 0;
  // "uniform", "fig3" or "p1,...,pn;q1,...,qm".
  std::string start = "uniform";
  double delta = 0.005;
  double kappa = 0.1;
  int region_a = 2;
  int region_b = 2;
  double box_side = 0.1;
  int samples = 256;
  int games = 10;
  int trials = 100;
  int max_m = 6;
  std::vector<std::int64_t> snapshots;
  std::uint64_t seed = 0;
  std::int64_t stride = 1000;
  int jobs = 1;
  std::string output_dir;

  void Validate() const;
  nlohmann::json ToJson() const;
  // Keys absent from `j` keep the values already in `base`.
  static ExperimentConfig FromJson(const nlohmann::json& j, ExperimentConfig base);
  static ExperimentConfig FromJson(const nlohmann::json& j);
};

// 16 hex digits of FNV-1a over the serialized config and recipe name.
std::string ConfigHash(std::string_view recipe, const ExperimentConfig& cfg);

DualPoint ResolveStart(const std::string& spec, int n, int m);

struct ExtremismReport {
  // Half-open [enter, exit): every step in it is extremal except isolated
  // single-step gaps.
  std::vector<std::pair<std::int64_t, std::int64_t>> periods;
  int count = 0;
  double mean_length = 0.0;
  // (step, sum x^4 + sum y^4) at the configured stride inside the window.
  std::vector<std::pair<std::int64_t, double>> trace;
  PrimalPoint final_primal;
};

// Scans steps [window_begin, T] for visits to the extremal domain with
// threshold cfg.delta.
ExtremismReport RunExtremismScan(const ExperimentConfig& cfg);

struct RecurrencePreconditions {
  double value = 0.0;
  double r_margin = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  bool nontrivial_2x2 = false;       // alpha1 > 0
  bool distinct_entries = false;     // alpha2 > 0
  bool delta_ok = false;             // delta < alpha2 / 4
  bool margin_positive = false;      // r_margin > 0 beyond LP tolerance
  bool margin_covers_steps = false;  // 6 eps + 4 delta <= r_margin
  bool special_case = false;         // alpha1 = 0: the Rock-Paper-Scissors route
  bool applicable() const {
    return nontrivial_2x2 && distinct_entries && delta_ok && margin_positive && margin_covers_steps;
  }
  nlohmann::json ToJson() const;
};

RecurrencePreconditions CheckRecurrencePreconditions(const BimatrixGame& g, double eps, double delta);

struct EscapeOutcome {
  BimatrixGame game;
  std::int64_t draws = 0;  // games drawn before this one was accepted
  double alpha1 = 0.0;
  double c_inf = 0.0;
  double c_uncertainty = 0.0;
  double c_bar = 0.0;
  double vol = 0.0;
  double d_S = 0.0;
  double bound = 0.0;
  std::int64_t budget = 0;
  std::int64_t measured = 0;
  bool escaped = false;
  bool within_bound = false;
};

// Draws random n x n zero-sum games from (seed, index) until one has
// alpha1 > 0 and C_bar = inf C - uncertainty > eps on E^delta_{a,b}. Under
// the OMWU surrogate the mirrored coordination game is returned.
BimatrixGame DrawUncontrollableGame(const ExperimentConfig& cfg, int n, std::uint64_t seed,
                                    std::int64_t* draws = nullptr);

// Evolves a cube of side cfg.box_side at the dual origin until a sample leaves
// E^delta_{a,b}. Rejects games whose C_bar does not exceed eps.
EscapeOutcome RunEscapeExperiment(const BimatrixGame& g, const ExperimentConfig& cfg);

enum class VolumeDirection { kExpand, kContract };
std::string_view ToString(VolumeDirection d);
VolumeDirection ExpectedDirection(Rule rule, GameKind kind);

struct VolumeRateOutcome {
  Rule rule = Rule::kMwu;
  GameKind kind = GameKind::kZeroSum;
  VolumeDirection expected = VolumeDirection::kExpand;
  SetVolumeEstimate estimate;
  double base_volume = 0.0;
  double alpha1 = 0.0;
  // 1 +- eps^2 delta^2 alpha1^2 / 4 in the expected direction.
  double predicted_rate = 1.0;
  // 1 + (C_bar - eps) eps^2 for (MWU, zero-sum) when C_bar > eps, else 0.
  double step_bound_rate = 0.0;
  double c_bar = 0.0;
  bool sign_ok = false;
  // Volume after T_eff steps against predicted_rate^T_eff within 3 standard
  // errors.
  bool bound_ok = false;
  bool step_bound_ok = true;
};

VolumeRateOutcome RunVolumeRate(const BimatrixGame& g, Rule rule, const ExperimentConfig& cfg);

struct SingleMindedStats {
  int m = 0;
  NoiseKind noise = NoiseKind::kZero;
  double alpha2 = 0.0;
  std::int64_t T = 0;
  std::int64_t deadline = 0;
  int trials = 0;
  int reached = 0;
  std::int64_t max_hit_step = 0;
  // Pairs (tau, tau + T) where more than one entry exceeded delta / (m-1) at
  // tau + T, and how many of those had k(tau + T) > k(tau) - 1.
  std::int64_t index_checks = 0;
  std::int64_t index_violations = 0;
  double fraction() const { return trials > 0 ? static_cast<double>(reached) / trials : 0.0; }
};

// T = ceil(2 / (eps (alpha2 - 4 delta)) ln((m - 1) / delta)).
std::int64_t SingleMindedPeriod(int m, double alpha2, double delta, double eps);

// Payoffs a (strictly decreasing, gap alpha2) plus noise bounded by 2 delta;
// each trial starts at softmax of i.i.d. uniform [-5, 5] logits.
SingleMindedStats RunSingleMinded(const Vector& a, double delta, double eps, NoiseKind noise,
                                  std::uint64_t seed, int trials);

// a_k = 1 - 2 (k - 1) / (m - 1).
Vector EvenlySpacedPayoffs(int m);

struct SetEvolutionFigure {
  Rule rule = Rule::kMwu;
  GameKind kind = GameKind::kZeroSum;
  VolumeDirection expected = VolumeDirection::kExpand;
  PolygonEvolution evolution;
  bool monotone = false;
};

SetEvolutionFigure RunSetEvolutionFigure(const BimatrixGame& g, Rule rule,
                                         const std::vector<Eigen::Vector2d>& square, StepSize eps,
                                         const std::vector<std::int64_t>& snapshots);

// Axis-aligned square in reduced coordinates.
std::vector<Eigen::Vector2d> CenteredSquare(double half_side);

// A finished recipe: the JSON summary embeds the resolved config, every
// derived constant and one entry per assertion.
struct ExperimentOutput {
  std::string recipe;
  std::string hash;
  nlohmann::json summary;
  std::string trace_csv;
  std::vector<std::string> report_lines;
  bool passed = false;
};

inline constexpr std::string_view kRecipes[] = {"fig1", "fig2", "fig3", "escape", "single-minded",
                                               "rates"};

bool IsRecipe(std::string_view name);
// Figure parameters and acceptance thresholds baked into each recipe.
ExperimentConfig RecipeDefaults(std::string_view recipe);
ExperimentOutput Reproduce(std::string_view recipe, const ExperimentConfig& cfg);

// Writes <recipe>-<hash>.json (and .csv when there is a trace) into `dir`;
// returns the paths written.
std::vector<std::string> WriteExperimentOutput(const ExperimentOutput& out, const std::string& dir);

// The summary serialization used for files and for byte-level comparison.
std::string SummaryText(const ExperimentOutput& out);

}  // namespace dualvol
