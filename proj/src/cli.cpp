#include "dualvol/cli.hpp"

#include "dualvol/experiments.hpp"
#include "dualvol/format.hpp"
#include "dualvol/game_io.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>

namespace dualvol {

namespace {

double ParseNumber(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  Require(ec == std::errc() && ptr == text.data() + text.size() && !text.empty(),
          fmt::format("{}: cannot parse \"{}\"", what, text));
  return v;
}

int ParseCount(std::string_view text, std::string_view what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  Require(ec == std::errc() && ptr == text.data() + text.size() && !text.empty(),
          fmt::format("{}: cannot parse \"{}\"", what, text));
  return v;
}

std::vector<std::string_view> Split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto pos = text.find(sep);
    parts.push_back(text.substr(0, pos));
    if (pos == std::string_view::npos) return parts;
    text.remove_prefix(pos + 1);
  }
}

using Override = std::function<void(ExperimentConfig&)>;

// Registers `flag` on `app`; a value given on the command line replaces the
// config field after the config file has been applied.
template <class T, class Field>
void Bind(CLI::App* app, std::vector<Override>& overrides, const std::string& flag, Field field,
          const std::string& help) {
  auto value = std::make_shared<T>();
  CLI::Option* opt = app->add_option(flag, *value, help);
  overrides.push_back([opt, value, field](ExperimentConfig& c) {
    if (opt->count() > 0) field(c, *value);
  });
}

void BindCommon(CLI::App* app, std::vector<Override>& ov) {
  Bind<std::string>(app, ov, "--game", [](ExperimentConfig& c, const std::string& v) { c.game = v; },
                    "builtin game name or game JSON path");
  Bind<std::string>(app, ov, "--rule",
                    [](ExperimentConfig& c, const std::string& v) { c.rule = ParseRule(v); },
                    "mwu | omwu | omwu-surrogate | ode");
  Bind<double>(app, ov, "--eps", [](ExperimentConfig& c, double v) { c.eps = v; }, "step size");
  Bind<std::int64_t>(app, ov, "--steps", [](ExperimentConfig& c, std::int64_t v) { c.T = v; },
                     "horizon T");
  Bind<std::string>(app, ov, "--start", [](ExperimentConfig& c, const std::string& v) { c.start = v; },
                    "uniform | fig3 | p1,..,pn;q1,..,qm");
  Bind<double>(app, ov, "--delta", [](ExperimentConfig& c, double v) { c.delta = v; },
               "region or extremal threshold");
  Bind<std::int64_t>(app, ov, "--stride", [](ExperimentConfig& c, std::int64_t v) { c.stride = v; },
                     "record every stride-th step");
  Bind<double>(app, ov, "--box-side", [](ExperimentConfig& c, double v) { c.box_side = v; },
               "side of the sampled dual box");
  Bind<int>(app, ov, "--samples", [](ExperimentConfig& c, int v) { c.samples = v; },
            "Monte-Carlo sample count");
}

nlohmann::json PrimalJson(const PrimalPoint& pt) {
  return {{"x", VectorToJson(pt.x)}, {"y", VectorToJson(pt.y)}};
}

std::string VectorText(const Vector& v) {
  std::string s = "[";
  for (int i = 0; i < v.size(); ++i) s += (i ? ", " : "") + FormatReal(v(i));
  return s + "]";
}

// Writes to `path` when given, otherwise to `fallback`.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
      return;
    }
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    Require(static_cast<bool>(*file_), fmt::format("cannot write {}", path));
    stream_ = file_.get();
  }

  std::ostream& stream() { return *stream_; }
  bool to_file() const { return file_ != nullptr; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

int Simulate(const ExperimentConfig& cfg, const std::string& format, const std::string& path,
             std::ostream& out, std::ostream& err) {
  cfg.Validate();
  const BimatrixGame g = ResolveGame(cfg.game);
  const DualPoint start = ResolveStart(cfg.start, g.rows(), g.cols());
  const StepSize eps(cfg.eps);
  const std::vector<Observable> observers = {ObserveDual(g.rows(), g.cols()),
                                             ObservePrimal(g.rows(), g.cols()), ObserveFourthMoment(),
                                             ObserveExtremal(cfg.delta)};
  RecordOptions options;
  options.stride = cfg.stride;
  Output trace(path, out);
  nlohmann::json header = {{"command", "simulate"}, {"config", cfg.ToJson()}};
  DualPoint final_state;
  if (format == "json") {
    trace.stream() << header.dump() << "\n";
    JsonLinesSink sink(trace.stream());
    final_state = RunTrajectory(cfg.rule, g, start, eps, cfg.T, observers, options, sink);
  } else {
    trace.stream() << "# " << header.dump() << "\n";
    CsvSink sink(trace.stream());
    final_state = RunTrajectory(cfg.rule, g, start, eps, cfg.T, observers, options, sink);
  }
  const PrimalPoint pt = ToPrimal(final_state);
  std::ostream& summary = trace.to_file() ? out : err;
  summary << "final x = " << VectorText(pt.x) << "\n"
          << "final y = " << VectorText(pt.y) << "\n"
          << "extremal(delta = " << FormatReal(cfg.delta)
          << "): " << (InExtremalDomain(pt, cfg.delta) ? "yes" : "no") << "\n";
  return kExitOk;
}

int Volume(const ExperimentConfig& cfg, const std::string& mode, const std::string& region_spec,
           const std::string& format, const std::string& path, std::ostream& out) {
  cfg.Validate();
  const BimatrixGame g = ResolveGame(cfg.game);
  const DualPoint center = ResolveStart(cfg.start, g.rows(), g.cols());
  const Region region = ParseRegion(region_spec);
  const StepSize eps(cfg.eps);
  nlohmann::json report = {{"command", "volume"},
                           {"mode", mode},
                           {"region", region_spec},
                           {"config", cfg.ToJson()}};
  Output dest(path, out);
  if (mode == "trajectory") {
    const VolumeTrace tr = TrajectoryVolume(cfg.rule, g, center, eps, cfg.T, region);
    if (format == "csv") {
      dest.stream() << "# " << report.dump() << "\n";
      dest.stream() << "step,volume_multiplier,cum_log_volume,in_region\n";
      for (std::size_t t = 0; t < tr.multipliers.size(); ++t) {
        dest.stream() << t << "," << FormatReal(tr.multipliers[t]) << ","
                      << FormatReal(tr.cum_log_volume[t]) << "," << (tr.region_flags[t] ? 1 : 0)
                      << "\n";
      }
      return kExitOk;
    }
    report["multipliers"] = tr.multipliers;
    report["cum_log_volume"] = tr.cum_log_volume;
    report["region_flags"] = tr.region_flags;
  } else if (mode == "liouville") {
    const PointCloud cloud = PointCloud::Cube(center, cfg.box_side, cfg.samples, cfg.seed);
    const SetVolumeEstimate est =
        SetVolumeLiouville(cfg.rule, g, cloud, eps, cfg.T, region, cfg.jobs);
    report["base_volume"] = cloud.base_volume;
    report["estimate"] = est.estimate;
    report["std_error"] = est.std_error;
    report["T"] = est.T;
    report["T_eff"] = est.T_eff;
    report["truncated"] = est.truncated;
    report["rate"] = est.rate;
    report["rate_std_error"] = est.rate_std_error;
  } else {
    Require(region_spec.rfind("E:", 0) == 0, "volume: rate mode needs an E:delta:a:b region");
    ExperimentConfig rc = cfg;
    const auto parts = Split(region_spec, ':');
    rc.delta = ParseNumber(parts[1], "region");
    rc.region_a = ParseCount(parts[2], "region");
    rc.region_b = ParseCount(parts[3], "region");
    const VolumeRateOutcome r = RunVolumeRate(g, cfg.rule, rc);
    report["expected"] = std::string(ToString(r.expected));
    report["base_volume"] = r.base_volume;
    report["estimate"] = r.estimate.estimate;
    report["std_error"] = r.estimate.std_error;
    report["T"] = r.estimate.T;
    report["T_eff"] = r.estimate.T_eff;
    report["rate"] = r.estimate.rate;
    report["rate_std_error"] = r.estimate.rate_std_error;
    report["alpha1"] = r.alpha1;
    report["predicted_rate"] = r.predicted_rate;
    report["step_bound_rate"] = r.step_bound_rate;
    report["sign_ok"] = r.sign_ok;
    report["bound_ok"] = r.bound_ok;
    report["step_bound_ok"] = r.step_bound_ok;
  }
  dest.stream() << report.dump(2) << "\n";
  return kExitOk;
}

int RegionInf(const ExperimentConfig& cfg, const std::string& region_spec, int starts,
              int iterations, const std::string& format, const std::string& path,
              std::ostream& out) {
  const BimatrixGame g = ResolveGame(cfg.game);
  const Region region = ParseRegion(region_spec);
  RegionSearchOptions opt;
  opt.starts = starts;
  opt.iterations = iterations;
  opt.seed = cfg.seed;
  opt.jobs = cfg.jobs;
  const RegionInfResult r = RegionInfC(g, region, opt);
  Output dest(path, out);
  const nlohmann::json header = {{"command", "region-inf"},
                                 {"game", cfg.game},
                                 {"region", region_spec},
                                 {"starts", starts},
                                 {"iterations", iterations},
                                 {"seed", cfg.seed}};
  if (format == "csv") {
    dest.stream() << "# " << header.dump() << "\n"
                  << "value,uncertainty\n"
                  << FormatReal(r.value) << "," << FormatReal(r.uncertainty) << "\n";
    return kExitOk;
  }
  nlohmann::json report = {{"config", header},
                           {"value", r.value},
                           {"uncertainty", r.uncertainty},
                           {"argmin", PrimalJson(r.argmin)},
                           {"starts_used", r.starts}};
  dest.stream() << report.dump(2) << "\n";
  return kExitOk;
}

int Triviality(const std::string& matrix, const std::string& game, const std::string& format,
               const std::string& path, std::ostream& out) {
  Require(matrix.empty() != game.empty(), "triviality: give exactly one of --matrix and --game");
  const Matrix A = matrix.empty() ? ResolveGame(game).A() : ParseMatrix(matrix);
  nlohmann::json report = {{"command", "triviality"}, {"A", MatrixToJson(A)}};
  report["c"] = TrivialityDistance(A);
  if (A.rows() == 2 && A.cols() == 2) report["c_closed_form"] = TrivialityDistance2x2(A);
  if (A.rows() >= 2 && A.cols() >= 2) {
    report["alpha1"] = Alpha1(A);
    report["alpha2"] = Alpha2(A);
  }
  Output dest(path, out);
  if (format == "csv") {
    dest.stream() << "quantity,value\n";
    for (const char* key : {"c", "c_closed_form", "alpha1", "alpha2"}) {
      if (report.contains(key))
        dest.stream() << key << "," << FormatReal(report[key].get<double>()) << "\n";
    }
    return kExitOk;
  }
  dest.stream() << report.dump(2) << "\n";
  return kExitOk;
}

int ReproduceCommand(const std::string& recipe, const ExperimentConfig& cfg,
                     const std::string& dir, std::ostream& out) {
  const ExperimentOutput result = Reproduce(recipe, cfg);
  for (const auto& line : result.report_lines) out << line << "\n";
  for (const auto& p : WriteExperimentOutput(result, dir)) out << "wrote " << p << "\n";
  out << recipe << ": " << (result.passed ? "PASS" : "FAIL") << "\n";
  return result.passed ? kExitOk : kExitAssertion;
}

ExperimentConfig ResolveConfig(ExperimentConfig base, const std::string& config_path,
                               const std::vector<Override>& overrides) {
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    Require(static_cast<bool>(f), fmt::format("cannot read config {}", config_path));
    nlohmann::json j;
    try {
      f >> j;
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument(fmt::format("config {}: {}", config_path, e.what()));
    }
    base = ExperimentConfig::FromJson(j, std::move(base));
  }
  for (const auto& apply : overrides) apply(base);
  return base;
}

ExperimentConfig SimulateDefaults() {
  ExperimentConfig c;
  c.T = 1000;
  c.stride = 1;
  return c;
}

ExperimentConfig VolumeDefaults() {
  ExperimentConfig c;
  c.game = "matching-pennies";
  c.eps = 0.05;
  c.T = 100;
  c.delta = 0.2;
  c.samples = 1024;
  return c;
}

}  // namespace

Region ParseRegion(const std::string& spec) {
  if (spec == "none") return RegionEverywhere();
  const auto parts = Split(spec, ':');
  if (parts[0] == "E" && parts.size() == 4) {
    return RegionE(ParseNumber(parts[1], "region"), ParseCount(parts[2], "region"),
                   ParseCount(parts[3], "region"));
  }
  if (parts[0] == "rps" && parts.size() == 2) return RegionERps(ParseNumber(parts[1], "region"));
  if (parts[0] == "extremal" && parts.size() == 2)
    return RegionExtremal(ParseNumber(parts[1], "region"));
  throw InvalidArgument(fmt::format("region: unknown region \"{}\"", spec));
}

Matrix ParseMatrix(const std::string& spec) {
  const auto rows = Split(spec, ';');
  std::vector<std::vector<double>> values;
  for (const auto row : rows) {
    std::vector<double> r;
    for (const auto item : Split(row, ',')) r.push_back(ParseNumber(item, "matrix"));
    Require(values.empty() || r.size() == values[0].size(), "matrix: ragged rows");
    values.push_back(std::move(r));
  }
  Matrix M(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values[0].size()));
  for (Eigen::Index j = 0; j < M.rows(); ++j)
    for (Eigen::Index k = 0; k < M.cols(); ++k)
      M(j, k) = values[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
  return M;
}

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learning dynamics and dual-space volume in bimatrix games", "dualvol"};
  app.require_subcommand(1);
  app.fallthrough();

  std::vector<Override> global;
  std::string format = "csv";
  std::string config_path;
  app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--config", config_path, "JSON config; flags override its values");
  Bind<std::uint64_t>(&app, global, "--seed", [](ExperimentConfig& c, std::uint64_t v) { c.seed = v; },
                      "master seed");
  Bind<int>(&app, global, "--jobs", [](ExperimentConfig& c, int v) { c.jobs = v; },
            "worker threads; results do not depend on it");

  std::string output;
  auto* sim = app.add_subcommand("simulate", "run one trajectory and write its trace");
  std::vector<Override> sim_ov;
  BindCommon(sim, sim_ov);
  sim->add_option("--output", output, "trace file (default: standard output)");

  auto* vol = app.add_subcommand("volume", "dual-space volume of a box or along a trajectory");
  std::vector<Override> vol_ov;
  BindCommon(vol, vol_ov);
  std::string mode = "liouville";
  std::string region = "none";
  vol->add_option("--mode", mode, "liouville | trajectory | rate")
      ->check(CLI::IsMember({"liouville", "trajectory", "rate"}));
  vol->add_option("--region", region, "none | E:delta:a:b | rps:kappa | extremal:delta");
  vol->add_option("--output", output, "report file (default: standard output)");

  auto* inf = app.add_subcommand("region-inf", "infimum of C over a primal region");
  std::vector<Override> inf_ov;
  BindCommon(inf, inf_ov);
  int starts = 64;
  int iterations = 200;
  std::string inf_region = "E:0.1:2:2";
  inf->add_option("--region", inf_region, "E:delta:a:b | rps:kappa | extremal:delta");
  inf->add_option("--starts", starts, "Nelder-Mead starts");
  inf->add_option("--iterations", iterations, "iterations per start");
  inf->add_option("--output", output, "report file (default: standard output)");

  auto* triv = app.add_subcommand("triviality", "distance from additively separable structure");
  std::string matrix;
  std::string triv_game;
  triv->add_option("--matrix", matrix, "rows separated by ';', entries by ','");
  triv->add_option("--game", triv_game, "builtin game name or game JSON path");
  triv->add_option("--output", output, "report file (default: standard output)");

  auto* rep = app.add_subcommand("reproduce", "run a built-in experiment recipe");
  std::vector<Override> rep_ov;
  BindCommon(rep, rep_ov);
  Bind<int>(rep, rep_ov, "--games", [](ExperimentConfig& c, int v) { c.games = v; }, "escape games");
  Bind<int>(rep, rep_ov, "--trials", [](ExperimentConfig& c, int v) { c.trials = v; },
            "single-minded trials");
  std::string recipe;
  std::string output_dir = "results";
  rep->add_option("name", recipe, "fig1 | fig2 | fig3 | escape | single-minded | rates")->required();
  rep->add_option("--output-dir", output_dir, "directory for the JSON summary and CSV trace");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  auto with = [&](std::vector<Override> ov) {
    ov.insert(ov.end(), global.begin(), global.end());
    return ov;
  };
  try {
    if (sim->parsed()) {
      const ExperimentConfig cfg = ResolveConfig(SimulateDefaults(), config_path, with(sim_ov));
      return Simulate(cfg, format, output, out, err);
    }
    if (vol->parsed()) {
      const ExperimentConfig cfg = ResolveConfig(VolumeDefaults(), config_path, with(vol_ov));
      return Volume(cfg, mode, region, format, output, out);
    }
    if (inf->parsed()) {
      const ExperimentConfig cfg = ResolveConfig(ExperimentConfig{}, config_path, with(inf_ov));
      return RegionInf(cfg, inf_region, starts, iterations, format, output, out);
    }
    if (triv->parsed()) return Triviality(matrix, triv_game, format, output, out);
    Require(IsRecipe(recipe), fmt::format("unknown recipe \"{}\"", recipe));
    const ExperimentConfig cfg = ResolveConfig(RecipeDefaults(recipe), config_path, with(rep_ov));
    return ReproduceCommand(recipe, cfg, output_dir, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical error";
    if (e.step() >= 0) err << " at step " << e.step();
    err << ": " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace dualvol
