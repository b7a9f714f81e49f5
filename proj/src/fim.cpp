#include "uavloc/fim.hpp"

#include <cmath>
#include <numeric>

namespace uavloc {

double rss_slope(double gamma) { return 10.0 * gamma / std::log(10.0); }

BearingVector bearing(double beta) { return {std::sin(beta), std::cos(beta)}; }

double WeightSet::sum() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

double WeightSet::det_scale() const {
    const double k2 = rss_slope(gamma) * rss_slope(gamma);
    return k2 * k2;
}

double measurement_weight(double noise_variance, const MeasurementPose& pose) {
    const double d2 = pose.r() * pose.r() + pose.h() * pose.h();
    return pose.r() * pose.r() / (noise_variance * d2 * d2);
}

std::vector<std::vector<double>> measurement_weights(const MeasurementPlan& plan,
                                                     const Scenario& scenario) {
    plan.require_shape(scenario);
    std::vector<std::vector<double>> out(plan.size());
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const double var = scenario.uav(i).noise_variance;
        for (const auto& pose : plan.uav(i)) out[i].push_back(measurement_weight(var, pose));
    }
    return out;
}

WeightSet aggregated_weights(const Scenario& scenario, double r, double h) {
    WeightSet ws;
    ws.gamma = scenario.gamma();
    const MeasurementPose pose(r, h, 0.0);
    for (const auto& uav : scenario.uavs())
        ws.weights.push_back(uav.measurements * measurement_weight(uav.noise_variance, pose));
    return ws;
}

FimSummary summarize(const Eigen::Matrix2d& matrix) {
    FimSummary s;
    s.matrix = matrix;
    const double a = matrix(0, 0), b = matrix(0, 1), c = matrix(1, 1);
    s.det = a * c - b * b;
    const double half_trace = 0.5 * (a + c);
    s.singular = !(s.det >= 1e-12 * half_trace * half_trace) || half_trace <= 0.0;
    if (!s.singular) s.crlb_trace = (a + c) / s.det;
    return s;
}

FimSummary fim(const MeasurementPlan& plan, const Scenario& scenario) {
    plan.require_shape(scenario);
    const double k = rss_slope(scenario.gamma());
    Eigen::Matrix2d g_sum = Eigen::Matrix2d::Zero();
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const double var = scenario.uav(i).noise_variance;
        for (const auto& pose : plan.uav(i)) {
            const Eigen::Vector2d g = bearing(pose.beta()).vec();
            g_sum += measurement_weight(var, pose) * (g * g.transpose());
        }
    }
    // symmetric by construction, but pin the off-diagonal pair to one value
    g_sum(1, 0) = g_sum(0, 1);
    return summarize(k * k * g_sum);
}

namespace {

double path_loss_mean(double p0, double gamma, const Point3& uav, double tx, double ty) {
    const double d = distance(uav, Point3{tx, ty, 0.0});
    return p0 - 10.0 * gamma * std::log10(d);
}

}  // namespace

Eigen::Matrix2d fim_fd_oracle(const MeasurementPlan& plan, const TargetPosition& target,
                              const Scenario& scenario, double step) {
    if (!(step > 0.0)) throw InvalidArgument("fim_fd_oracle: step must be > 0");
    plan.require_shape(scenario);
    Eigen::Matrix2d info = Eigen::Matrix2d::Zero();
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const auto& poses = plan.uav(i);
        Eigen::MatrixXd jac(poses.size(), 2);
        for (std::size_t j = 0; j < poses.size(); ++j) {
            const Point3 u = pose_to_position(poses[j], target);
            auto f = [&](double tx, double ty) {
                return path_loss_mean(scenario.p0(), scenario.gamma(), u, tx, ty);
            };
            jac(j, 0) = (f(target.x + step, target.y) - f(target.x - step, target.y)) / (2 * step);
            jac(j, 1) = (f(target.x, target.y + step) - f(target.x, target.y - step)) / (2 * step);
        }
        // N_i = sigma_i^2 I
        info += jac.transpose() * jac / scenario.uav(i).noise_variance;
    }
    return info;
}

double max_det_regular(const WeightSet& weights) {
    const double total = weights.sum();
    return 0.25 * weights.det_scale() * total * total;
}

double max_det_irregular(const WeightSet& weights, std::size_t k) {
    if (k >= weights.weights.size()) throw InvalidArgument("max_det_irregular: index out of range");
    double rest = 0.0;
    for (std::size_t i = 0; i < weights.weights.size(); ++i)
        if (i != k) rest += weights.weights[i];
    return weights.det_scale() * weights.weights[k] * rest;
}

}  // namespace uavloc
