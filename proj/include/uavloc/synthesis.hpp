#pragma once

// D-optimal measurement plans under region and speed constraints.
//
// Every planner fixes the UAVs at the radial optimum r* = max(r0, h0),
// h* = h0 and chooses bearings. det(F) depends on bearings only through the
// doubled-angle sum S = sum_i w_i (cos 2 beta_i, sin 2 beta_i):
//
//   det(G) = 1/4 ((sum w)^2 - |S|^2)
//
// so a configuration is optimal exactly when S is as short as the weights
// allow: zero when the largest weight is at most half the total (regular),
// w_max - rest otherwise (irregular, dominant bearing orthogonal to the rest).

#include <optional>
#include <span>
#include <vector>

#include "uavloc/fim.hpp"
#include "uavloc/model.hpp"

namespace uavloc {

class AllZeroWeights : public Error {
public:
    using Error::Error;
};

class InfeasibleClosure : public Error {
public:
    using Error::Error;
};

class InfeasibleSpeed : public Error {
public:
    using Error::Error;
};

enum class Verdict { Regular, Irregular };

const char* to_string(Verdict verdict);

struct CaseClassification {
    Verdict verdict = Verdict::Regular;
    std::size_t dominant = 0;      // index of the largest weight, lowest index on ties
    double dominant_weight = 0.0;  // varpi_a
    double rest_weight = 0.0;      // varpi_b, sum of the others
    double psi_regular = 0.0;      // 1/4 c (varpi_a + varpi_b)^2
    double psi_irregular = 0.0;    // c varpi_a varpi_b

    /// Largest det(F) for hovering with these weights.
    double hovering_bound() const {
        return verdict == Verdict::Regular ? psi_regular : psi_irregular;
    }
};

/// Throws AllZeroWeights when no weight is positive.
CaseClassification classify(const WeightSet& weights);

/// max w <= 1/2 sum w.
bool is_regular(std::span<const double> weights);

struct RadialOptimum {
    double r_star = 0.0;
    double h_star = 0.0;
    double d_star = 0.0;

    /// UAV-target elevation angle atan(h*/r*), radians.
    double elevation() const;
};

RadialOptimum radial_optimum(const ConstraintSet& constraints);

/// Bearings (one per weight, first pinned to 0) whose weighted doubled-angle
/// vectors sum to zero. Weights must be nonnegative with at least one
/// positive; throws InfeasibleClosure when the set is irregular.
///
/// The doubled vectors are laid head to tail in decreasing-weight order. Each
/// step picks the length of the remaining gap from the range the unplaced
/// vectors can still close (polygon inequality), so the last vector lands
/// exactly on the origin.
std::vector<double> regular_angles(std::span<const double> weights);

/// beta_k = 0, every other bearing pi/2.
std::vector<double> irregular_angles(std::size_t count, std::size_t dominant);

/// |sum_i w_i (cos 2 beta_i, sin 2 beta_i)|
double closure_residual(std::span<const double> weights, std::span<const double> angles);

enum class FlightStateKind { Hovering, BelowHalfCircle, BeyondHalfCircle, FullCircle };

const char* to_string(FlightStateKind kind);

struct FlightState {
    FlightStateKind kind = FlightStateKind::Hovering;
    /// K: index after which the flipped UAA bearings start. Set only for
    /// BeyondHalfCircle with M > 2, where ceil(M/2) <= K < M.
    int flip_after = 0;

    bool operator==(const FlightState&) const = default;
};

/// Hovering iff c_max = 0; otherwise by the distance t0 M c_max a UAV can
/// travel: >= 2 pi r* full circle, >= pi r* beyond half circle, else below.
FlightState flight_state(const ConstraintSet& constraints, int measurements, double r_star);

struct SynthesizedPlan {
    MeasurementPlan plan;
    /// The construction is feasible but optimality is not guaranteed.
    bool suboptimal = false;
};

/// Every UAV parks at (r*, h*) and takes all its measurements there.
SynthesizedPlan plan_hovering(const Scenario& scenario, const ConstraintSet& constraints);

/// Regular per-epoch closure rotated by a common increment each epoch; the
/// increment makes the chord equal speed_fraction * t0 * c_max. Flagged
/// suboptimal for irregular per-epoch weights or unequal measurement counts.
SynthesizedPlan plan_below_half(const Scenario& scenario, const ConstraintSet& constraints,
                                double speed_fraction = 1.0);

/// Uniform angular array per UAV (right angle pair for M = 2). UAVs with a
/// single measurement are closed among themselves. Throws InfeasibleSpeed
/// when a step chord exceeds t0 * c_max.
SynthesizedPlan plan_full_circle(const Scenario& scenario, const ConstraintSet& constraints);

/// Uniform angular array with the measurements after K_i rotated by -pi.
/// Requires M_i > 2 and ceil(M_i/2) <= K_i < M_i; throws InfeasibleSpeed when
/// any chord, including the jump at the flip, exceeds t0 * c_max.
SynthesizedPlan plan_beyond_half(const Scenario& scenario, const ConstraintSet& constraints,
                                 const std::vector<int>& flip_after);

/// Same bearings, with K_i = ceil(M_i/2) for every UAV.
SynthesizedPlan plan_beyond_half(const Scenario& scenario, const ConstraintSet& constraints);

/// beta_ij = beta_i0 + pi (j - 1) / M_i: a half-circle sweep whose doubled
/// bearings form a uniform array, so each UAV's information is isotropic.
/// Steps are pi r*/M_i long, feasible whenever t0 M_i c_max >= pi r*.
SynthesizedPlan plan_half_sweep(const Scenario& scenario, const ConstraintSet& constraints);

struct AutoPlan {
    MeasurementPlan plan;
    FlightState state;                     // least capable state over the UAVs
    std::vector<FlightState> uav_states;   // per UAV
    CaseClassification classification;    // aggregated weights at (r*, h*)
    RadialOptimum radial;
    double achieved_det = 0.0;
    double bound = 0.0;                    // closed-form maximum for the state
    bool suboptimal = false;
};

/// Picks the flight state and dispatches to the matching planner.
AutoPlan plan_auto(const Scenario& scenario, const ConstraintSet& constraints);

}  // namespace uavloc
