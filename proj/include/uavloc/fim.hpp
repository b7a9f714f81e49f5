#pragma once

// Fisher information of RSS measurements about the ground target position.
//
//   F = k^2 * sum_i sum_j sigma_i^-2 * r_ij^2 / d_ij^4 * g_ij g_ij^T,  k = 10 gamma / ln 10
//
// with g_ij the horizontal unit vector from the target to the UAV. Under this
// library's bearing convention g = (sin beta, cos beta), so the entries of F
// are literally sum (dx/d^2)^2 etc. Writing g = (cos beta, sin beta) instead
// only relabels beta -> pi/2 - beta; determinant and spectrum are unchanged.

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "uavloc/model.hpp"

namespace uavloc {

/// k = 10 gamma / ln 10, the slope of the mean RSS in natural-log distance.
double rss_slope(double gamma);

/// Horizontal unit vector for bearing beta: (sin beta, cos beta).
struct BearingVector {
    double x = 0.0;
    double y = 1.0;

    Eigen::Vector2d vec() const { return {x, y}; }
};

BearingVector bearing(double beta);

/// Nonnegative placement weights plus the path-loss exponent that scales them.
struct WeightSet {
    std::vector<double> weights;
    double gamma = 1.0;

    double sum() const;
    /// c = k^4, the factor converting sum-of-weights bounds into det(F).
    double det_scale() const;
};

/// sigma^-2 r^2 / d^4 for one measurement; zero directly above the target.
double measurement_weight(double noise_variance, const MeasurementPose& pose);

/// Weights w_ij for every measurement of the plan, same layout as the plan.
std::vector<std::vector<double>> measurement_weights(const MeasurementPlan& plan,
                                                     const Scenario& scenario);

/// Aggregated per-UAV weights M_i sigma_i^-2 r^2 / d^4 for a common (r, h).
WeightSet aggregated_weights(const Scenario& scenario, double r, double h);

struct FimSummary {
    Eigen::Matrix2d matrix = Eigen::Matrix2d::Zero();
    double det = 0.0;
    std::optional<double> crlb_trace;  // trace(F^-1), only when not singular
    bool singular = true;              // det < 1e-12 * (trace / 2)^2
};

FimSummary summarize(const Eigen::Matrix2d& matrix);

/// Closed-form double sum. The target enters only through the poses, so the
/// two overloads agree.
FimSummary fim(const MeasurementPlan& plan, const Scenario& scenario);
inline FimSummary fim(const MeasurementPlan& plan, const TargetPosition& /*target*/,
                      const Scenario& scenario) {
    return fim(plan, scenario);
}

/// Independent reconstruction F = sum_i J_i^T N_i^-1 J_i, where J_i is the
/// central finite-difference Jacobian of the mean RSS with respect to the
/// target (x, y), evaluated from 3-D UAV positions.
Eigen::Matrix2d fim_fd_oracle(const MeasurementPlan& plan, const TargetPosition& target,
                              const Scenario& scenario, double step = 1e-3);

/// 1/4 c (sum W)^2: the largest det(F) reachable when the largest weight is at
/// most half the total.
double max_det_regular(const WeightSet& weights);

/// c W_k (sum_{i != k} W_i): the largest det(F) when W_k dominates.
double max_det_irregular(const WeightSet& weights, std::size_t k);

}  // namespace uavloc
