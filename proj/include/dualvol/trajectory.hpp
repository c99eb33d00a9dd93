#pragma once

#include "dualvol/dynamics.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dualvol {

enum class Rule { kMwu, kOmwu, kSurrogate, kOde };

std::string_view ToString(Rule rule);
Rule ParseRule(std::string_view name);

// Iterates one of the update rules from a dual start. For kOde the field
// parameter is eps and the Euler step is dt = eps.
class Stepper {
 public:
  Stepper(Rule rule, BimatrixGame game, DualPoint start, StepSize eps);

  void Advance();
  const DualPoint& current() const;
  std::int64_t step() const { return step_; }
  Rule rule() const { return rule_; }
  const BimatrixGame& game() const { return game_; }

 private:
  Rule rule_;
  BimatrixGame game_;
  StepSize eps_;
  DualPoint point_;
  OmwuState omwu_;
  std::optional<OdeField> field_;
  std::int64_t step_ = 0;
};

struct StepView {
  std::int64_t step;
  const DualPoint& dual;
  const PrimalPoint& primal;
};

// A named group of columns computed from the current state.
struct Observable {
  std::vector<std::string> columns;
  std::function<void(const StepView&, std::vector<double>&)> emit;
};

Observable ObserveDual(int n, int m);
Observable ObservePrimal(int n, int m);
Observable ObserveReduced(int n, int m);
Observable ObserveExtremal(double delta);
// sum_j x_j^4 + sum_k y_k^4
Observable ObserveFourthMoment();
double FourthMoment(const PrimalPoint& pt);

struct RecordOptions {
  std::int64_t stride = 1;
  std::int64_t first_step = 0;
  std::size_t max_samples = 100000;
};

class RowSink {
 public:
  virtual ~RowSink() = default;
  virtual void Header(const std::vector<std::string>& columns) = 0;
  virtual void Row(const std::vector<double>& values) = 0;
};

// Rows are (step, observables...). Floating-point values are written with 17
// significant digits.
class CsvSink : public RowSink {
 public:
  explicit CsvSink(std::ostream& out) : out_(out) {}
  void Header(const std::vector<std::string>& columns) override;
  void Row(const std::vector<double>& values) override;

 private:
  std::ostream& out_;
};

class JsonLinesSink : public RowSink {
 public:
  explicit JsonLinesSink(std::ostream& out) : out_(out) {}
  void Header(const std::vector<std::string>& columns) override;
  void Row(const std::vector<double>& values) override;

 private:
  std::ostream& out_;
  std::vector<std::string> columns_;
};

struct TrajectoryRecord {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  DualPoint final_state;
  std::int64_t steps = 0;

  void WriteCsv(std::ostream& out) const;
  void WriteJsonLines(std::ostream& out) const;
};

// Runs T steps, emitting a row at every step t >= first_step with
// (t - first_step) divisible by stride; step 0 is the start. Aborts with NumericalError (carrying the step index) on
// a non-finite state.
DualPoint RunTrajectory(Rule rule, const BimatrixGame& g, const DualPoint& start, StepSize eps,
                        std::int64_t T, const std::vector<Observable>& observers,
                        const RecordOptions& options, RowSink& sink);

// In-memory variant; throws InvalidArgument when more than
// options.max_samples rows would be stored.
TrajectoryRecord RunTrajectory(Rule rule, const BimatrixGame& g, const DualPoint& start,
                               StepSize eps, std::int64_t T,
                               const std::vector<Observable>& observers,
                               const RecordOptions& options = {});

}  // namespace dualvol
