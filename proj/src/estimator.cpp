#include "uavloc/estimator.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace uavloc {

PositionLists plan_positions(const MeasurementPlan& plan, const TargetPosition& center) {
    PositionLists out(plan.size());
    for (std::size_t i = 0; i < plan.size(); ++i)
        for (const auto& pose : plan.uav(i)) out[i].push_back(pose_to_position(pose, center));
    return out;
}

MeasurementPlan relative_plan(const PositionLists& positions, const TargetPosition& target) {
    std::vector<std::vector<MeasurementPose>> poses(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i)
        for (const auto& p : positions[i]) poses[i].push_back(position_to_pose(p, target).pose);
    return MeasurementPlan(std::move(poses));
}

double mean_rss(const Point3& uav, const TargetPosition& target, const Scenario& scenario) {
    const double d = distance(uav, Point3{target.x, target.y, 0.0});
    if (d == 0.0) throw ZeroDistance("mean_rss: UAV coincides with the target");
    return scenario.p0() - 10.0 * scenario.gamma() * std::log10(d);
}

double mean_rss(const MeasurementPose& pose, const Scenario& scenario) {
    return scenario.p0() - 10.0 * scenario.gamma() * std::log10(pose.slant_range());
}

std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    return std::mt19937_64(seq);
}

namespace {

void require_record_shape(const PositionLists& positions, const Scenario& scenario) {
    if (positions.size() != scenario.size())
        throw InvalidArgument("record: UAV count does not match the scenario");
    for (std::size_t i = 0; i < positions.size(); ++i)
        if (positions[i].size() != static_cast<std::size_t>(scenario.uav(i).measurements))
            throw InvalidArgument("record: UAV " + std::to_string(i) +
                                  " sample count does not match M_i");
}

// Flattened samples for the inner loops.
struct Sample {
    double x, y, z2;
    double rss;
    double inv_var;
};

std::vector<Sample> flatten(const MeasurementRecord& record, const Scenario& scenario) {
    require_record_shape(record.positions, scenario);
    std::vector<Sample> out;
    for (std::size_t i = 0; i < record.positions.size(); ++i) {
        if (record.rss.size() <= i || record.rss[i].size() != record.positions[i].size())
            throw InvalidArgument("record: RSS values do not match the positions");
        const double inv_var = 1.0 / scenario.uav(i).noise_variance;
        for (std::size_t j = 0; j < record.positions[i].size(); ++j) {
            const auto& p = record.positions[i][j];
            out.push_back({p.x, p.y, p.z * p.z, record.rss[i][j], inv_var});
        }
    }
    return out;
}

// sum (R - f)^2 / sigma^2, with f = p0 - 5 gamma log10(d^2)
double weighted_cost(const std::vector<Sample>& samples, double p0, double gamma, double x,
                     double y) {
    double cost = 0.0;
    for (const auto& s : samples) {
        const double d2 = (x - s.x) * (x - s.x) + (y - s.y) * (y - s.y) + s.z2;
        const double e = s.rss - (p0 - 5.0 * gamma * std::log10(d2));
        cost += s.inv_var * e * e;
    }
    return cost;
}

double normalization(const Scenario& scenario) {
    double out = 0.0;
    for (const auto& uav : scenario.uavs())
        out += 0.5 * uav.measurements * std::log(2.0 * kPi * uav.noise_variance);
    return out;
}

// J^T W J and J^T W e for the residuals e = R - f at (x, y); J = df/ds.
void normal_equations(const std::vector<Sample>& samples, double p0, double gamma, double x,
                      double y, Eigen::Matrix2d& jtj, Eigen::Vector2d& jte) {
    const double k = rss_slope(gamma);
    jtj.setZero();
    jte.setZero();
    for (const auto& s : samples) {
        const double dx = x - s.x, dy = y - s.y;
        const double d2 = dx * dx + dy * dy + s.z2;
        const double e = s.rss - (p0 - 5.0 * gamma * std::log10(d2));
        const Eigen::Vector2d j(-k * dx / d2, -k * dy / d2);
        jtj += s.inv_var * j * j.transpose();
        jte += s.inv_var * e * j;
    }
}

}  // namespace

MeasurementRecord simulate(const PositionLists& positions, const TargetPosition& target,
                           const Scenario& scenario, std::mt19937_64& rng) {
    require_record_shape(positions, scenario);
    MeasurementRecord record;
    record.positions = positions;
    record.rss.resize(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        std::normal_distribution<double> noise(0.0, std::sqrt(scenario.uav(i).noise_variance));
        for (const auto& p : positions[i])
            record.rss[i].push_back(mean_rss(p, target, scenario) + noise(rng));
    }
    return record;
}

MeasurementRecord simulate(const MeasurementPlan& plan, const TargetPosition& target,
                           const Scenario& scenario, std::uint64_t seed) {
    plan.require_shape(scenario);
    auto rng = trial_stream(seed, 0);
    return simulate(plan_positions(plan, target), target, scenario, rng);
}

double log_likelihood(const MeasurementRecord& record, const Scenario& scenario,
                      const TargetPosition& candidate) {
    const auto samples = flatten(record, scenario);
    return -0.5 * weighted_cost(samples, scenario.p0(), scenario.gamma(), candidate.x, candidate.y) -
           normalization(scenario);
}

Eigen::Vector2d log_likelihood_gradient(const MeasurementRecord& record, const Scenario& scenario,
                                        const TargetPosition& candidate) {
    const auto samples = flatten(record, scenario);
    Eigen::Matrix2d jtj;
    Eigen::Vector2d jte;
    normal_equations(samples, scenario.p0(), scenario.gamma(), candidate.x, candidate.y, jtj, jte);
    // d/ds of -1/2 sum w e^2 = sum w e df/ds
    return jte;
}

SearchRegion SearchRegion::around(const TargetPosition& center, double r_star, int grid_points) {
    return {center, 4.0 * r_star, grid_points};
}

EstimateResult ml_estimate(const MeasurementRecord& record, const Scenario& scenario,
                           const SearchRegion& region, const SolverOptions& options) {
    if (region.grid_points < 2 || !(region.side > 0.0))
        throw InvalidArgument("ml_estimate: search region needs side > 0 and >= 2 grid points");
    const auto samples = flatten(record, scenario);
    const double p0 = scenario.p0(), gamma = scenario.gamma();

    double best_x = region.center.x, best_y = region.center.y;
    double best_cost = std::numeric_limits<double>::infinity();
    const double spacing = region.side / (region.grid_points - 1);
    const double x0 = region.center.x - 0.5 * region.side;
    const double y0 = region.center.y - 0.5 * region.side;
    for (int a = 0; a < region.grid_points; ++a) {
        for (int b = 0; b < region.grid_points; ++b) {
            const double x = x0 + a * spacing, y = y0 + b * spacing;
            const double cost = weighted_cost(samples, p0, gamma, x, y);
            if (cost < best_cost) {
                best_cost = cost;
                best_x = x;
                best_y = y;
            }
        }
    }

    const auto info = fim(relative_plan(record.positions, {best_x, best_y}), scenario);
    if (info.singular) throw SingularGeometry("ml_estimate: measurement geometry is singular");

    EstimateResult result;
    Eigen::Matrix2d jtj;
    Eigen::Vector2d jte;
    for (result.iterations = 1; result.iterations <= options.max_iterations; ++result.iterations) {
        normal_equations(samples, p0, gamma, best_x, best_y, jtj, jte);
        Eigen::Vector2d step = jtj.ldlt().solve(jte);
        if (!step.allFinite()) break;
        // halve on cost increase
        bool accepted = false;
        for (int h = 0; h <= options.max_halvings; ++h) {
            const double cost = weighted_cost(samples, p0, gamma, best_x + step.x(), best_y + step.y());
            if (cost <= best_cost) {
                best_cost = cost;
                best_x += step.x();
                best_y += step.y();
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted || step.norm() < options.step_tolerance) {
            result.converged = true;
            break;
        }
    }
    result.iterations = std::min(result.iterations, options.max_iterations);
    result.estimate = {best_x, best_y};
    result.log_likelihood = -0.5 * best_cost - normalization(scenario);
    return result;
}

double crlb_rmse_bound(const PositionLists& positions, const TargetPosition& target,
                       const Scenario& scenario) {
    const auto info = fim(relative_plan(positions, target), scenario);
    if (info.singular || !info.crlb_trace) throw SingularFim("crlb_rmse_bound: FIM is singular");
    return std::sqrt(*info.crlb_trace);
}

double crlb_rmse_bound(const MeasurementPlan& plan, const TargetPosition& target,
                       const Scenario& scenario) {
    plan.require_shape(scenario);
    const auto info = fim(plan, scenario);
    if (info.singular || !info.crlb_trace) throw SingularFim("crlb_rmse_bound: FIM is singular");
    (void)target;
    return std::sqrt(*info.crlb_trace);
}

}  // namespace uavloc
