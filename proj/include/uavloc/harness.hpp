#pragma once

// Experiment configuration, plan files and the experiment runners behind the
// `uavloc` command line tool.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "uavloc/estimator.hpp"
#include "uavloc/synthesis.hpp"

namespace uavloc {

/// Malformed config or plan file. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& source, int line, const std::string& field,
               const std::string& message);

    int line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    int line_;
    std::string field_;
};

class UnsupportedShape : public Error {
public:
    using Error::Error;
};

enum class ExperimentKind { Plan, Eval, Grid, Sweep, MonteCarlo };

const char* to_string(ExperimentKind kind);

enum class SweepMode { AllUavs, SingleUav };

struct ExperimentConfig {
    Scenario scenario = Scenario::uniform(0.0, 3.0, {16.0, 16.0, 16.0}, 16);
    ConstraintSet constraints{60.0, 100.0, 10.0, 5.0};
    TargetPosition target;
    TargetPosition prior;  // planning center, defaults to the target
    ExperimentKind kind = ExperimentKind::Plan;

    double resolution_deg = 1.0;
    int trials = 500;
    std::uint64_t seed = 1;
    std::string output;
    std::string plan_file;

    SweepMode sweep_mode = SweepMode::AllUavs;
    std::size_t sweep_uav = 0;
    double r_max = 300.0;
    double r_step = 1.0;

    std::vector<double> prior_std{0.0, 10.0, 20.0, 40.0};  // m
    int grid_points = 41;
    /// Travel t0 M c_max per configuration, in units of pi r*.
    double below_half_arc = 0.75;
    double beyond_half_arc = 1.5;
    double full_circle_arc = 2.0;

    /// Throws InvalidArgument on out-of-range values.
    void validate() const;
};

/// Sectioned key = value text ([scenario], [constraints], [target],
/// [experiment]); '#' and ';' start comments. Angles in degrees, distances
/// in meters, variances in dB^2.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

// ---- plan files ------------------------------------------------------------

struct PlanFile {
    Scenario scenario = Scenario::uniform(0.0, 3.0, {1.0}, 1);
    ConstraintSet constraints;
    TargetPosition target;
    MeasurementPlan plan;
    std::optional<AutoPlan> synthesis;  // present when written by `plan`
};

/// JSON; bearings are stored in radians (authoritative) and degrees. Readers
/// accept either; hand-written files may give only `beta_deg`.
void write_plan_file(std::ostream& out, const PlanFile& file);
PlanFile read_plan_file(std::istream& in, const std::string& source = "<plan>");
PlanFile load_plan_file(const std::string& path);

// ---- runners ---------------------------------------------------------------

struct PlanRun {
    PlanFile file;
    AutoPlan result;
};

PlanRun run_plan(const ExperimentConfig& config);
std::string plan_summary(const AutoPlan& result);

struct EvalReport {
    FimSummary fim;
    std::optional<double> sqrt_tr_crlb;
    ValidationReport validation;
};

EvalReport run_eval(const PlanFile& file);
std::string eval_summary(const EvalReport& report);

struct GridResult {
    std::vector<double> axis_deg;  // shared by beta2 and beta3
    std::vector<double> det;       // det[a * n + b] for (beta2 = axis[a], beta3 = axis[b])
    double max_det = 0.0;
    std::vector<std::pair<double, double>> argmax;  // (beta2, beta3) in degrees, sorted
};

/// Relative tolerance grouping grid points with the maximum.
inline constexpr double kArgmaxTolerance = 1e-9;

/// det(F) over (beta2, beta3) with beta1 = 0 for three UAVs hovering at
/// (r*, h*). Throws UnsupportedShape unless N = 3.
GridResult run_grid(const ExperimentConfig& config);

struct SweepRow {
    double r = 0.0;
    double det = 0.0;
    double sqrt_tr_crlb = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double argmax_det_r = 0.0;
    double argmin_crlb_r = 0.0;
};

/// Hovering at the optimal bearings and h = h0, horizontal distance swept
/// over [r0, r_max] for every UAV or for `sweep_uav` only (others at r*).
SweepResult run_sweep(const ExperimentConfig& config);

enum class Configuration { Hovering, BelowHalf, BeyondHalf, FullCircle };

inline constexpr Configuration kConfigurations[] = {
    Configuration::Hovering, Configuration::BelowHalf, Configuration::BeyondHalf,
    Configuration::FullCircle};

const char* to_string(Configuration configuration);

/// Constraint set that places every UAV of the config in the given flight state.
ConstraintSet constraints_for(const ExperimentConfig& config, Configuration configuration);

struct MonteCarloCell {
    Configuration configuration = Configuration::Hovering;
    double prior_std = 0.0;
    std::vector<double> squared_errors;  // per trial, m^2
    double rmse = 0.0;
    double rmse_se = 0.0;                // delta-method standard error of rmse
    double mean_crlb_at_truth = 0.0;     // mean sqrt(tr CRLB) at the true target
    double nominal_crlb = 0.0;           // sqrt(tr CRLB) with no prior error
};

struct MonteCarloResult {
    std::vector<MonteCarloCell> cells;  // prior_std-major, configurations in kConfigurations order

    const MonteCarloCell& cell(Configuration configuration, double prior_std) const;
};

/// For each prior std and configuration: draw the prior center around the
/// target, plan around it, simulate from the true target and estimate. Trial
/// t uses the same random stream for every configuration.
MonteCarloResult run_montecarlo(const ExperimentConfig& config);

// ---- CSV -------------------------------------------------------------------

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

void write_grid_csv(std::ostream& out, const GridResult& result);
void write_sweep_csv(std::ostream& out, const SweepResult& result);
void write_montecarlo_csv(std::ostream& out, const MonteCarloResult& result);

}  // namespace uavloc
