#include "dualvol/trajectory.hpp"

#include "dualvol/format.hpp"

#include <fmt/format.h>

#include <ostream>

namespace dualvol {

std::string_view ToString(Rule rule) {
  switch (rule) {
    case Rule::kMwu:
      return "mwu";
    case Rule::kOmwu:
      return "omwu";
    case Rule::kSurrogate:
      return "omwu-surrogate";
    case Rule::kOde:
      return "ode";
  }
  return "mwu";
}

Rule ParseRule(std::string_view name) {
  if (name == "mwu") return Rule::kMwu;
  if (name == "omwu") return Rule::kOmwu;
  if (name == "omwu-surrogate" || name == "surrogate" || name == "omwu_surrogate")
    return Rule::kSurrogate;
  if (name == "ode") return Rule::kOde;
  throw InvalidArgument(fmt::format("unknown rule '{}'", name));
}

Stepper::Stepper(Rule rule, BimatrixGame game, DualPoint start, StepSize eps)
    : rule_(rule), game_(std::move(game)), eps_(eps), point_(std::move(start)) {
  Require(point_.p.size() == game_.rows() && point_.q.size() == game_.cols(),
          "trajectory: start dimension does not match the game");
  Require(point_.AllFinite(), "trajectory: start must be finite");
  if (rule_ == Rule::kOmwu) omwu_ = OmwuState::Start(point_);
  if (rule_ == Rule::kOde) field_.emplace(game_, eps_.value());
}

const DualPoint& Stepper::current() const { return rule_ == Rule::kOmwu ? omwu_.curr : point_; }

void Stepper::Advance() {
  switch (rule_) {
    case Rule::kMwu:
      point_ = MwuStepDual(game_, point_, eps_);
      break;
    case Rule::kOmwu:
      omwu_ = OmwuStepDual(game_, omwu_, eps_);
      break;
    case Rule::kSurrogate:
      point_ = OmwuSurrogateStep(game_, point_, eps_);
      break;
    case Rule::kOde: {
      const Vector next = point_.Stacked() + eps_.value() * OdeRhs(*field_, point_);
      point_ = DualPoint::FromStacked(next, game_.rows());
      break;
    }
  }
  ++step_;
  if (!current().AllFinite())
    throw NumericalError(fmt::format("non-finite state at step {}", step_), step_);
}

namespace {

std::vector<std::string> IndexedNames(const char* prefix, int count) {
  std::vector<std::string> names;
  for (int i = 1; i <= count; ++i) names.push_back(fmt::format("{}{}", prefix, i));
  return names;
}

std::vector<std::string> Concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

Observable ObserveDual(int n, int m) {
  return {Concat(IndexedNames("p", n), IndexedNames("q", m)),
          [](const StepView& v, std::vector<double>& out) {
            for (double e : v.dual.p) out.push_back(e);
            for (double e : v.dual.q) out.push_back(e);
          }};
}

Observable ObservePrimal(int n, int m) {
  return {Concat(IndexedNames("x", n), IndexedNames("y", m)),
          [](const StepView& v, std::vector<double>& out) {
            for (double e : v.primal.x) out.push_back(e);
            for (double e : v.primal.y) out.push_back(e);
          }};
}

Observable ObserveReduced(int n, int m) {
  return {Concat(IndexedNames("rp", n - 1), IndexedNames("rq", m - 1)),
          [](const StepView& v, std::vector<double>& out) {
            const Vector r = ReducedCoords(v.dual);
            for (double e : r) out.push_back(e);
          }};
}

Observable ObserveExtremal(double delta) {
  Require(delta > 0.0 && delta < 0.5, "extremal observer: delta must lie in (0, 1/2)");
  return {{"extremal"}, [delta](const StepView& v, std::vector<double>& out) {
            out.push_back(InExtremalDomain(v.primal, delta) ? 1.0 : 0.0);
          }};
}

double FourthMoment(const PrimalPoint& pt) {
  return pt.x.array().pow(4).sum() + pt.y.array().pow(4).sum();
}

Observable ObserveFourthMoment() {
  return {{"fourth_moment"},
          [](const StepView& v, std::vector<double>& out) { out.push_back(FourthMoment(v.primal)); }};
}

void CsvSink::Header(const std::vector<std::string>& columns) {
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvSink::Row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << FormatReal(values[i]);
  out_ << '\n';
}

void JsonLinesSink::Header(const std::vector<std::string>& columns) { columns_ = columns; }

void JsonLinesSink::Row(const std::vector<double>& values) {
  out_ << '{';
  for (std::size_t i = 0; i < values.size(); ++i)
    out_ << (i ? "," : "") << '"' << columns_.at(i) << "\":" << FormatReal(values[i]);
  out_ << "}\n";
}

void TrajectoryRecord::WriteCsv(std::ostream& out) const {
  CsvSink sink(out);
  sink.Header(columns);
  for (const auto& row : rows) sink.Row(row);
}

void TrajectoryRecord::WriteJsonLines(std::ostream& out) const {
  JsonLinesSink sink(out);
  sink.Header(columns);
  for (const auto& row : rows) sink.Row(row);
}

DualPoint RunTrajectory(Rule rule, const BimatrixGame& g, const DualPoint& start, StepSize eps,
                        std::int64_t T, const std::vector<Observable>& observers,
                        const RecordOptions& options, RowSink& sink) {
  Require(T >= 0, "trajectory: negative horizon");
  Require(options.stride >= 1, "trajectory: stride must be at least 1");
  Require(options.first_step >= 0, "trajectory: negative first recorded step");
  std::vector<std::string> columns{"step"};
  for (const auto& o : observers) columns.insert(columns.end(), o.columns.begin(), o.columns.end());
  sink.Header(columns);

  Stepper stepper(rule, g, start, eps);
  std::vector<double> row;
  row.reserve(columns.size());
  auto emit = [&] {
    const std::int64_t t = stepper.step();
    if (t < options.first_step || (t - options.first_step) % options.stride != 0) return;
    const PrimalPoint primal = ToPrimal(stepper.current());
    const StepView view{t, stepper.current(), primal};
    row.clear();
    row.push_back(static_cast<double>(t));
    for (const auto& o : observers) o.emit(view, row);
    sink.Row(row);
  };
  emit();
  for (std::int64_t t = 0; t < T; ++t) {
    stepper.Advance();
    emit();
  }
  return stepper.current();
}

namespace {

class MemorySink : public RowSink {
 public:
  MemorySink(TrajectoryRecord& record, std::size_t cap) : record_(record), cap_(cap) {}
  void Header(const std::vector<std::string>& columns) override { record_.columns = columns; }
  void Row(const std::vector<double>& values) override {
    if (record_.rows.size() >= cap_)
      throw InvalidArgument(fmt::format(
          "trajectory: more than {} samples requested; raise the cap or the stride", cap_));
    record_.rows.push_back(values);
  }

 private:
  TrajectoryRecord& record_;
  std::size_t cap_;
};

}  // namespace

TrajectoryRecord RunTrajectory(Rule rule, const BimatrixGame& g, const DualPoint& start,
                               StepSize eps, std::int64_t T,
                               const std::vector<Observable>& observers,
                               const RecordOptions& options) {
  TrajectoryRecord record;
  MemorySink sink(record, options.max_samples);
  record.final_state = RunTrajectory(rule, g, start, eps, T, observers, options, sink);
  record.steps = T;
  return record;
}

}  // namespace dualvol
