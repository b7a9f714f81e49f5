#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <sstream>

#include "uavloc/harness.hpp"

namespace uavloc {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

// ---- plan / eval -------------------------------------------------------------

PlanRun run_plan(const ExperimentConfig& config) {
    PlanRun run;
    run.result = plan_auto(config.scenario, config.constraints);
    run.file.scenario = config.scenario;
    run.file.constraints = config.constraints;
    run.file.target = config.prior;
    run.file.plan = run.result.plan;
    run.file.synthesis = run.result;
    return run;
}

std::string plan_summary(const AutoPlan& r) {
    std::ostringstream out;
    out << "flight state:   " << to_string(r.state.kind) << '\n'
        << "classification: " << to_string(r.classification.verdict) << " (dominant UAV "
        << r.classification.dominant << ", weight " << format_double(r.classification.dominant_weight)
        << " vs rest " << format_double(r.classification.rest_weight) << ")\n"
        << "r* = " << format_double(r.radial.r_star) << " m, h* = " << format_double(r.radial.h_star)
        << " m\n"
        << "det(F):         " << format_double(r.achieved_det) << '\n'
        << "bound:          " << format_double(r.bound) << '\n'
        << "ratio:          " << format_double(r.bound > 0 ? r.achieved_det / r.bound : 0.0) << '\n';
    if (r.suboptimal) out << "note: plan is feasible but not proven optimal\n";
    return out.str();
}

EvalReport run_eval(const PlanFile& file) {
    EvalReport report;
    report.fim = fim(file.plan, file.scenario);
    if (report.fim.crlb_trace) report.sqrt_tr_crlb = std::sqrt(*report.fim.crlb_trace);
    report.validation = validate_plan(file.plan, file.constraints, file.target);
    return report;
}

std::string eval_summary(const EvalReport& report) {
    std::ostringstream out;
    out << "det(F):         " << format_double(report.fim.det) << '\n';
    if (report.sqrt_tr_crlb)
        out << "sqrt(tr CRLB):  " << format_double(*report.sqrt_tr_crlb) << " m\n";
    else
        out << "sqrt(tr CRLB):  undefined (singular FIM)\n";
    if (report.validation.feasible()) {
        out << "feasible:       yes\n";
    } else {
        out << "feasible:       no (" << report.validation.violations.size() << " violations)\n";
        for (const auto& v : report.validation.violations)
            out << "  " << to_string(v.kind) << " uav " << v.uav << " epoch " << v.epoch
                << " margin " << format_double(v.margin) << " m\n";
    }
    return out.str();
}

// ---- grid ----------------------------------------------------------------------

GridResult run_grid(const ExperimentConfig& config) {
    const auto& scenario = config.scenario;
    if (scenario.size() != 3)
        throw UnsupportedShape("grid: the angle grid needs exactly three UAVs");
    const double steps = 360.0 / config.resolution_deg;
    if (std::abs(steps - std::round(steps)) > 1e-9)
        throw InvalidArgument("grid: resolution must divide 360 degrees");
    const auto n = static_cast<std::size_t>(std::llround(steps));
    const auto rs = radial_optimum(config.constraints);

    GridResult result;
    result.axis_deg.resize(n);
    for (std::size_t k = 0; k < n; ++k) result.axis_deg[k] = static_cast<double>(k) * config.resolution_deg;
    result.det.resize(n * n);

    auto poses_at = [&](std::size_t uav, double beta_deg) {
        return std::vector<MeasurementPose>(static_cast<std::size_t>(scenario.uav(uav).measurements),
                                            MeasurementPose(rs.r_star, rs.h_star, beta_deg * kDegToRad));
    };
    const auto first = poses_at(0, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
        const auto second = poses_at(1, result.axis_deg[a]);
        for (std::size_t b = 0; b < n; ++b) {
            const MeasurementPlan plan({first, second, poses_at(2, result.axis_deg[b])});
            result.det[a * n + b] = fim(plan, scenario).det;
        }
    }
    result.max_det = *std::max_element(result.det.begin(), result.det.end());
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (result.det[a * n + b] >= result.max_det * (1.0 - kArgmaxTolerance))
                result.argmax.emplace_back(result.axis_deg[a], result.axis_deg[b]);
    return result;
}

// ---- sweep ---------------------------------------------------------------------

SweepResult run_sweep(const ExperimentConfig& config) {
    const auto& scenario = config.scenario;
    const auto& cons = config.constraints;
    const auto rs = radial_optimum(cons);
    if (config.sweep_mode == SweepMode::SingleUav && config.sweep_uav >= scenario.size())
        throw InvalidArgument("sweep: UAV index out of range");
    if (config.r_max < cons.min_horizontal)
        throw InvalidArgument("sweep: r_max must be >= min_horizontal");

    const auto hover = plan_hovering(scenario, cons).plan;
    std::vector<double> bearings;
    for (std::size_t i = 0; i < hover.size(); ++i) bearings.push_back(hover.uav(i).front().beta());

    const auto rows =
        static_cast<std::size_t>(std::floor((config.r_max - cons.min_horizontal) / config.r_step + 1e-9)) + 1;
    SweepResult result;
    double best_det = -1.0;
    double best_crlb = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < rows; ++k) {
        const double r = cons.min_horizontal + static_cast<double>(k) * config.r_step;
        std::vector<std::vector<MeasurementPose>> poses(scenario.size());
        for (std::size_t i = 0; i < scenario.size(); ++i) {
            const bool swept = config.sweep_mode == SweepMode::AllUavs || i == config.sweep_uav;
            poses[i].assign(static_cast<std::size_t>(scenario.uav(i).measurements),
                            MeasurementPose(swept ? r : rs.r_star, cons.min_height, bearings[i]));
        }
        const auto info = fim(MeasurementPlan(std::move(poses)), scenario);
        SweepRow row{r, info.det,
                     info.crlb_trace ? std::sqrt(*info.crlb_trace)
                                     : std::numeric_limits<double>::infinity()};
        if (row.det > best_det) {
            best_det = row.det;
            result.argmax_det_r = r;
        }
        if (row.sqrt_tr_crlb < best_crlb) {
            best_crlb = row.sqrt_tr_crlb;
            result.argmin_crlb_r = r;
        }
        result.rows.push_back(row);
    }
    return result;
}

// ---- Monte Carlo -----------------------------------------------------------------

const char* to_string(Configuration configuration) {
    switch (configuration) {
        case Configuration::Hovering: return "hovering";
        case Configuration::BelowHalf: return "below_half";
        case Configuration::BeyondHalf: return "beyond_half";
        case Configuration::FullCircle: return "full_circle";
    }
    return "unknown";
}

ConstraintSet constraints_for(const ExperimentConfig& config, Configuration configuration) {
    ConstraintSet cons = config.constraints;
    if (configuration == Configuration::Hovering) {
        cons.max_speed = 0.0;
        return cons;
    }
    const double arc = configuration == Configuration::BelowHalf    ? config.below_half_arc
                       : configuration == Configuration::BeyondHalf ? config.beyond_half_arc
                                                                    : config.full_circle_arc;
    int fewest = config.scenario.uav(0).measurements;
    for (const auto& u : config.scenario.uavs()) fewest = std::min(fewest, u.measurements);
    const double r_star = radial_optimum(cons).r_star;
    const double travel = arc * kPi * r_star;
    cons.max_speed = travel / (cons.interval * fewest);
    // the state thresholds are inclusive at the lower end; make sure rounding keeps us there
    while (cons.interval * fewest * cons.max_speed < travel)
        cons.max_speed = std::nextafter(cons.max_speed, std::numeric_limits<double>::infinity());
    return cons;
}

const MonteCarloCell& MonteCarloResult::cell(Configuration configuration, double prior_std) const {
    for (const auto& c : cells)
        if (c.configuration == configuration && c.prior_std == prior_std) return c;
    throw InvalidArgument("montecarlo: no such cell");
}

MonteCarloResult run_montecarlo(const ExperimentConfig& config) {
    const auto& scenario = config.scenario;
    const std::size_t n_cfg = std::size(kConfigurations);
    const auto rs = radial_optimum(config.constraints);

    std::vector<MeasurementPlan> plans;
    for (Configuration c : kConfigurations)
        plans.push_back(plan_auto(scenario, constraints_for(config, c)).plan);

    MonteCarloResult result;
    const auto trials = static_cast<std::size_t>(config.trials);
    for (std::size_t vi = 0; vi < config.prior_std.size(); ++vi) {
        const double v = config.prior_std[vi];
        std::vector<double> sq(n_cfg * trials), crlb(n_cfg * trials);
        std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic)
        for (std::size_t t = 0; t < trials; ++t) {
            try {
                auto rng = trial_stream(config.seed, vi * trials + t);
                std::normal_distribution<double> unit(0.0, 1.0);
                const double ox = unit(rng), oy = unit(rng);
                const TargetPosition prior{config.target.x + v * ox, config.target.y + v * oy};
                for (std::size_t c = 0; c < n_cfg; ++c) {
                    // common random numbers across configurations
                    auto noise = rng;
                    const auto positions = plan_positions(plans[c], prior);
                    const auto record = simulate(positions, config.target, scenario, noise);
                    const auto est = ml_estimate(record, scenario,
                                                 SearchRegion::around(prior, rs.r_star, config.grid_points));
                    const double ex = est.estimate.x - config.target.x;
                    const double ey = est.estimate.y - config.target.y;
                    sq[c * trials + t] = ex * ex + ey * ey;
                    crlb[c * trials + t] = crlb_rmse_bound(positions, config.target, scenario);
                }
            } catch (...) {
#pragma omp critical
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);

        for (std::size_t c = 0; c < n_cfg; ++c) {
            MonteCarloCell cell;
            cell.configuration = kConfigurations[c];
            cell.prior_std = v;
            cell.squared_errors.assign(sq.begin() + static_cast<long>(c * trials),
                                       sq.begin() + static_cast<long>((c + 1) * trials));
            double mean = 0.0, crlb_mean = 0.0;
            for (std::size_t t = 0; t < trials; ++t) {
                mean += cell.squared_errors[t];
                crlb_mean += crlb[c * trials + t];
            }
            mean /= static_cast<double>(trials);
            crlb_mean /= static_cast<double>(trials);
            double var = 0.0;
            for (double e : cell.squared_errors) var += (e - mean) * (e - mean);
            var = trials > 1 ? var / static_cast<double>(trials - 1) : 0.0;
            cell.rmse = std::sqrt(mean);
            cell.rmse_se = cell.rmse > 0.0
                               ? std::sqrt(var / static_cast<double>(trials)) / (2.0 * cell.rmse)
                               : 0.0;
            cell.mean_crlb_at_truth = crlb_mean;
            cell.nominal_crlb = crlb_rmse_bound(plans[c], config.target, scenario);
            result.cells.push_back(std::move(cell));
        }
    }
    return result;
}

// ---- CSV -----------------------------------------------------------------------

void write_grid_csv(std::ostream& out, const GridResult& result) {
    out << "beta2_deg,beta3_deg,det\n";
    const std::size_t n = result.axis_deg.size();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            out << format_double(result.axis_deg[a]) << ',' << format_double(result.axis_deg[b]) << ','
                << format_double(result.det[a * n + b]) << '\n';
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    out << "r,det,sqrt_tr_crlb\n";
    for (const auto& row : result.rows)
        out << format_double(row.r) << ',' << format_double(row.det) << ','
            << format_double(row.sqrt_tr_crlb) << '\n';
}

void write_montecarlo_csv(std::ostream& out, const MonteCarloResult& result) {
    out << "configuration,prior_std,trials,rmse,rmse_se,mean_crlb_at_truth,nominal_crlb\n";
    for (const auto& c : result.cells)
        out << to_string(c.configuration) << ',' << format_double(c.prior_std) << ','
            << c.squared_errors.size() << ',' << format_double(c.rmse) << ','
            << format_double(c.rmse_se) << ',' << format_double(c.mean_crlb_at_truth) << ','
            << format_double(c.nominal_crlb) << '\n';
}

}  // namespace uavloc
