#pragma once

// RSS measurement simulation and maximum-likelihood target estimation.

#include <cstdint>
#include <random>
#include <vector>

#include "uavloc/fim.hpp"
#include "uavloc/model.hpp"

namespace uavloc {

class ZeroDistance : public Error {
public:
    using Error::Error;
};

class SingularGeometry : public Error {
public:
    using Error::Error;
};

class SingularFim : public Error {
public:
    using Error::Error;
};

/// Absolute UAV positions, one list per UAV, chronological.
using PositionLists = std::vector<std::vector<Point3>>;

/// Places every pose of the plan around `center`.
PositionLists plan_positions(const MeasurementPlan& plan, const TargetPosition& center);

/// Re-expresses absolute positions as poses relative to `target`.
MeasurementPlan relative_plan(const PositionLists& positions, const TargetPosition& target);

/// Noiseless RSS p0 - 10 gamma log10(d). Throws ZeroDistance when d = 0.
double mean_rss(const Point3& uav, const TargetPosition& target, const Scenario& scenario);
double mean_rss(const MeasurementPose& pose, const Scenario& scenario);

struct MeasurementRecord {
    PositionLists positions;              // where each sample was taken
    std::vector<std::vector<double>> rss; // dB, same layout as positions
};

/// Random stream for one Monte Carlo trial; independent of scheduling order.
std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t trial);

/// R_ij = f_ij(target) + N(0, sigma_i^2), drawn from `rng`.
MeasurementRecord simulate(const PositionLists& positions, const TargetPosition& target,
                           const Scenario& scenario, std::mt19937_64& rng);

/// Plan placed around the true target, noise from a stream seeded by `seed`.
MeasurementRecord simulate(const MeasurementPlan& plan, const TargetPosition& target,
                           const Scenario& scenario, std::uint64_t seed);

/// Gaussian log-likelihood of the record for a candidate target.
double log_likelihood(const MeasurementRecord& record, const Scenario& scenario,
                      const TargetPosition& candidate);

struct SearchRegion {
    TargetPosition center;
    double side = 400.0;   // m, square side length
    int grid_points = 101; // per axis

    /// Square of side 4 r* around `center`.
    static SearchRegion around(const TargetPosition& center, double r_star, int grid_points = 101);
};

struct EstimateResult {
    TargetPosition estimate;
    double log_likelihood = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct SolverOptions {
    int max_iterations = 50;
    double step_tolerance = 1e-6;  // m
    int max_halvings = 20;
};

/// Coarse grid search over the region, then damped Gauss-Newton on the
/// weighted least-squares form of the negative log-likelihood. Throws
/// SingularGeometry when the measurement positions cannot fix a 2-D point.
EstimateResult ml_estimate(const MeasurementRecord& record, const Scenario& scenario,
                           const SearchRegion& region, const SolverOptions& options = {});

/// Gradient of the log-likelihood with respect to the target (x, y).
Eigen::Vector2d log_likelihood_gradient(const MeasurementRecord& record, const Scenario& scenario,
                                        const TargetPosition& candidate);

/// sqrt(trace(F^-1)) for the plan placed around `target`. Throws SingularFim.
double crlb_rmse_bound(const MeasurementPlan& plan, const TargetPosition& target,
                       const Scenario& scenario);

/// Same bound for UAVs at fixed absolute positions, evaluated at `target`.
double crlb_rmse_bound(const PositionLists& positions, const TargetPosition& target,
                       const Scenario& scenario);

}  // namespace uavloc
