#include "uavloc/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>

namespace uavloc {

const char* to_string(Verdict verdict) {
    return verdict == Verdict::Regular ? "regular" : "irregular";
}

const char* to_string(FlightStateKind kind) {
    switch (kind) {
        case FlightStateKind::Hovering: return "hovering";
        case FlightStateKind::BelowHalfCircle: return "below_half_circle";
        case FlightStateKind::BeyondHalfCircle: return "beyond_half_circle";
        case FlightStateKind::FullCircle: return "full_circle";
    }
    return "unknown";
}

bool is_regular(std::span<const double> weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    const double largest = weights.empty() ? 0.0 : *std::max_element(weights.begin(), weights.end());
    return largest <= 0.5 * total;
}

CaseClassification classify(const WeightSet& weights) {
    const auto& w = weights.weights;
    if (w.empty() || std::none_of(w.begin(), w.end(), [](double x) { return x > 0.0; }))
        throw AllZeroWeights("classify: no positive weight");
    for (double x : w)
        if (x < 0.0 || !std::isfinite(x)) throw InvalidArgument("classify: weights must be >= 0");

    CaseClassification out;
    // max_element returns the first maximum, i.e. the lowest index on ties
    out.dominant = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
    out.dominant_weight = w[out.dominant];
    for (std::size_t i = 0; i < w.size(); ++i)
        if (i != out.dominant) out.rest_weight += w[i];
    out.verdict = is_regular(w) ? Verdict::Regular : Verdict::Irregular;
    const double c = weights.det_scale();
    const double total = out.dominant_weight + out.rest_weight;
    out.psi_regular = 0.25 * c * total * total;
    out.psi_irregular = c * out.dominant_weight * out.rest_weight;
    return out;
}

double RadialOptimum::elevation() const { return std::atan2(h_star, r_star); }

RadialOptimum radial_optimum(const ConstraintSet& constraints) {
    constraints.validate();
    RadialOptimum rs;
    rs.r_star = std::max(constraints.min_horizontal, constraints.min_height);
    rs.h_star = constraints.min_height;
    rs.d_star = std::hypot(rs.r_star, rs.h_star);
    return rs;
}

namespace {

// Heron's formula in Kahan's arrangement; zero for degenerate triangles.
double triangle_area(double a, double b, double c) {
    if (a < b) std::swap(a, b);
    if (b < c) std::swap(b, c);
    if (a < b) std::swap(a, b);
    const double p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    return p > 0.0 ? 0.25 * std::sqrt(p) : 0.0;
}

}  // namespace

std::vector<double> regular_angles(std::span<const double> weights) {
    const std::size_t n = weights.size();
    if (n == 0 || std::none_of(weights.begin(), weights.end(), [](double x) { return x > 0.0; }))
        throw AllZeroWeights("regular_angles: no positive weight");
    for (double x : weights)
        if (x < 0.0 || !std::isfinite(x)) throw InvalidArgument("regular_angles: weights must be >= 0");
    if (!is_regular(weights))
        throw InfeasibleClosure("regular_angles: largest weight exceeds half the total");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
    // remaining[k] = sum of the weights placed at steps k..n-1
    std::vector<double> remaining(n + 1, 0.0);
    for (std::size_t k = n; k-- > 0;) remaining[k] = remaining[k + 1] + weights[order[k]];

    std::vector<double> doubled(n, 0.0);
    std::complex<double> gap = weights[order[0]];
    for (std::size_t k = 1; k < n; ++k) {
        const double w = weights[order[k]];
        const double rest = remaining[k + 1];
        const double rest_max = k + 1 < n ? weights[order[k + 1]] : 0.0;
        // gap lengths the unplaced vectors can still close
        const double lo = std::max(0.0, 2.0 * rest_max - rest);
        const double hi = rest;
        const double g = std::abs(gap);
        const double a = std::max(std::abs(g - w), lo);
        const double b = std::min(g + w, hi);
        const double target = a <= b ? 0.5 * (a + b) : 0.5 * (std::min(a, hi) + std::max(b, lo));

        double phi;
        if (g == 0.0 || w == 0.0) {
            phi = 0.0;
        } else {
            // turn of the new vector relative to the gap; atan2 keeps it
            // accurate near 0 and pi where acos is not
            const double turn =
                std::atan2(4.0 * triangle_area(g, w, target), (target - g) * (target + g) - w * w);
            phi = std::arg(gap) - turn;
        }
        doubled[order[k]] = phi;
        gap += std::polar(w, phi);
    }

    std::vector<double> angles(n);
    for (std::size_t i = 0; i < n; ++i)
        angles[i] = std::fmod(normalize_angle(doubled[i] - doubled[0]) / 2.0, kPi);
    return angles;
}

std::vector<double> irregular_angles(std::size_t count, std::size_t dominant) {
    if (dominant >= count) throw InvalidArgument("irregular_angles: dominant index out of range");
    std::vector<double> angles(count, 0.5 * kPi);
    angles[dominant] = 0.0;
    return angles;
}

double closure_residual(std::span<const double> weights, std::span<const double> angles) {
    if (weights.size() != angles.size())
        throw InvalidArgument("closure_residual: size mismatch");
    std::complex<double> sum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) sum += std::polar(weights[i], 2.0 * angles[i]);
    return std::abs(sum);
}

FlightState flight_state(const ConstraintSet& constraints, int measurements, double r_star) {
    constraints.validate();
    if (measurements < 1) throw InvalidArgument("flight_state: measurements must be >= 1");
    if (constraints.max_speed == 0.0) return {FlightStateKind::Hovering, 0};
    const double travel = constraints.interval * measurements * constraints.max_speed;
    if (travel >= 2.0 * kPi * r_star) return {FlightStateKind::FullCircle, 0};
    if (travel >= kPi * r_star)
        return {FlightStateKind::BeyondHalfCircle, measurements > 2 ? (measurements + 1) / 2 : 0};
    return {FlightStateKind::BelowHalfCircle, 0};
}

namespace {

using AngleLists = std::vector<std::vector<double>>;

MeasurementPlan build_plan(const AngleLists& angles, const RadialOptimum& rs) {
    std::vector<std::vector<MeasurementPose>> poses(angles.size());
    for (std::size_t i = 0; i < angles.size(); ++i)
        for (double beta : angles[i]) poses[i].emplace_back(rs.r_star, rs.h_star, beta);
    return MeasurementPlan(std::move(poses));
}

void require_speed(const MeasurementPlan& plan, const ConstraintSet& constraints,
                   const char* planner) {
    const auto report = validate_plan(plan, constraints, TargetPosition{});
    for (const auto& v : report.violations) {
        if (v.kind == ConstraintKind::MaxSpeed)
            throw InfeasibleSpeed(std::string(planner) + ": UAV " + std::to_string(v.uav) +
                                  " epoch " + std::to_string(v.epoch) + " chord exceeds t0*c_max by " +
                                  std::to_string(-v.margin) + " m");
    }
}

std::vector<double> uniform_array(int m, double base) {
    std::vector<double> out(static_cast<std::size_t>(m));
    if (m == 2) {
        out = {base, base + 0.5 * kPi};
        return out;
    }
    for (int j = 0; j < m; ++j) out[j] = base + 2.0 * kPi * j / m;
    return out;
}

std::vector<double> flipped_array(int m, int flip_after, double base) {
    std::vector<double> out(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j)
        out[j] = base + 2.0 * kPi * j / m - (j >= flip_after ? kPi : 0.0);
    return out;
}

// Start bearing of UAV i. Each circle or sweep pattern is isotropic on its
// own, so spreading the starts costs nothing in det(F) and keeps the swarm
// from bunching on one side of the prior.
double stagger(std::size_t i, std::size_t n) {
    return 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
}

std::vector<double> half_sweep(int m, double base) {
    std::vector<double> out(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) out[j] = base + kPi * j / m;
    return out;
}

// A lone measurement cannot be isotropic by itself; UAVs with M_i = 1 are
// closed as a group. Returns false when the group is irregular.
bool close_single_shot_group(const Scenario& scenario, const RadialOptimum& rs, AngleLists& angles) {
    std::vector<std::size_t> group;
    for (std::size_t i = 0; i < scenario.size(); ++i)
        if (scenario.uav(i).measurements == 1) group.push_back(i);
    if (group.empty()) return true;

    std::vector<double> w;
    for (std::size_t i : group)
        w.push_back(measurement_weight(scenario.uav(i).noise_variance,
                                       MeasurementPose(rs.r_star, rs.h_star, 0.0)));
    const bool regular = is_regular(w);
    const auto base = regular
        ? regular_angles(w)
        : irregular_angles(w.size(), static_cast<std::size_t>(
                                         std::max_element(w.begin(), w.end()) - w.begin()));
    for (std::size_t g = 0; g < group.size(); ++g) angles[group[g]] = {base[g]};
    return regular;
}

WeightSet per_epoch_weights(const Scenario& scenario, const RadialOptimum& rs) {
    WeightSet ws;
    ws.gamma = scenario.gamma();
    const MeasurementPose pose(rs.r_star, rs.h_star, 0.0);
    for (const auto& uav : scenario.uavs())
        ws.weights.push_back(measurement_weight(uav.noise_variance, pose));
    return ws;
}

std::vector<double> optimal_bearings(const WeightSet& ws, const CaseClassification& cls) {
    return cls.verdict == Verdict::Regular ? regular_angles(ws.weights)
                                           : irregular_angles(ws.weights.size(), cls.dominant);
}

}  // namespace

SynthesizedPlan plan_hovering(const Scenario& scenario, const ConstraintSet& constraints) {
    const auto rs = radial_optimum(constraints);
    const auto ws = aggregated_weights(scenario, rs.r_star, rs.h_star);
    const auto bearings = optimal_bearings(ws, classify(ws));
    AngleLists angles(scenario.size());
    for (std::size_t i = 0; i < scenario.size(); ++i)
        angles[i].assign(static_cast<std::size_t>(scenario.uav(i).measurements), bearings[i]);
    return {build_plan(angles, rs), false};
}

SynthesizedPlan plan_below_half(const Scenario& scenario, const ConstraintSet& constraints,
                                double speed_fraction) {
    if (!(speed_fraction >= 0.0 && speed_fraction <= 1.0))
        throw InvalidArgument("plan_below_half: speed_fraction must lie in [0, 1]");
    const auto rs = radial_optimum(constraints);
    const auto ws = per_epoch_weights(scenario, rs);
    const auto cls = classify(ws);
    const auto start = optimal_bearings(ws, cls);

    bool equal_counts = true;
    for (const auto& uav : scenario.uavs())
        equal_counts = equal_counts && uav.measurements == scenario.uav(0).measurements;

    const double chord = speed_fraction * constraints.max_step();
    const double increment = 2.0 * std::asin(std::min(1.0, chord / (2.0 * rs.r_star)));
    AngleLists angles(scenario.size());
    for (std::size_t i = 0; i < scenario.size(); ++i)
        for (int j = 0; j < scenario.uav(i).measurements; ++j)
            angles[i].push_back(start[i] + j * increment);
    auto plan = build_plan(angles, rs);
    require_speed(plan, constraints, "plan_below_half");
    return {std::move(plan), cls.verdict == Verdict::Irregular || !equal_counts};
}

SynthesizedPlan plan_full_circle(const Scenario& scenario, const ConstraintSet& constraints) {
    const auto rs = radial_optimum(constraints);
    AngleLists angles(scenario.size());
    for (std::size_t i = 0; i < scenario.size(); ++i)
        angles[i] = uniform_array(scenario.uav(i).measurements, stagger(i, scenario.size()));
    const bool closed = close_single_shot_group(scenario, rs, angles);
    auto plan = build_plan(angles, rs);
    require_speed(plan, constraints, "plan_full_circle");
    return {std::move(plan), !closed};
}

SynthesizedPlan plan_beyond_half(const Scenario& scenario, const ConstraintSet& constraints,
                                 const std::vector<int>& flip_after) {
    if (flip_after.size() != scenario.size())
        throw InvalidArgument("plan_beyond_half: one K per UAV required");
    const auto rs = radial_optimum(constraints);
    AngleLists angles(scenario.size());
    for (std::size_t i = 0; i < scenario.size(); ++i) {
        const int m = scenario.uav(i).measurements;
        const int k = flip_after[i];
        if (m <= 2) throw InvalidArgument("plan_beyond_half: needs M_i > 2");
        if (2 * k < m || k >= m)
            throw InvalidArgument("plan_beyond_half: K_i must satisfy M_i/2 <= K_i < M_i");
        angles[i] = flipped_array(m, k, stagger(i, scenario.size()));
    }
    auto plan = build_plan(angles, rs);
    require_speed(plan, constraints, "plan_beyond_half");
    return {std::move(plan), false};
}

SynthesizedPlan plan_beyond_half(const Scenario& scenario, const ConstraintSet& constraints) {
    std::vector<int> flip_after;
    for (const auto& uav : scenario.uavs()) flip_after.push_back((uav.measurements + 1) / 2);
    return plan_beyond_half(scenario, constraints, flip_after);
}

SynthesizedPlan plan_half_sweep(const Scenario& scenario, const ConstraintSet& constraints) {
    const auto rs = radial_optimum(constraints);
    AngleLists angles(scenario.size());
    for (std::size_t i = 0; i < scenario.size(); ++i)
        angles[i] = half_sweep(scenario.uav(i).measurements, stagger(i, scenario.size()));
    const bool closed = close_single_shot_group(scenario, rs, angles);
    auto plan = build_plan(angles, rs);
    require_speed(plan, constraints, "plan_half_sweep");
    return {std::move(plan), !closed};
}

namespace {

// Each UAV flies the widest isotropic pattern its own state allows.
SynthesizedPlan plan_mixed_circle(const Scenario& scenario, const ConstraintSet& constraints,
                                  const std::vector<FlightState>& states) {
    const auto rs = radial_optimum(constraints);
    AngleLists angles(scenario.size());
    for (std::size_t i = 0; i < scenario.size(); ++i) {
        const int m = scenario.uav(i).measurements;
        const double base = stagger(i, scenario.size());
        if (states[i].kind == FlightStateKind::FullCircle || m <= 2) {
            angles[i] = uniform_array(m, base);
            continue;
        }
        // the flipped array when the jump back is within reach, else the sweep
        angles[i] = flipped_array(m, states[i].flip_after, base);
        if (!validate_plan(build_plan(AngleLists{angles[i]}, rs), constraints, TargetPosition{})
                 .feasible())
            angles[i] = half_sweep(m, base);
    }
    const bool closed = close_single_shot_group(scenario, rs, angles);
    auto plan = build_plan(angles, rs);
    require_speed(plan, constraints, "plan_auto");
    return {std::move(plan), !closed};
}

}  // namespace

AutoPlan plan_auto(const Scenario& scenario, const ConstraintSet& constraints) {
    AutoPlan out;
    out.radial = radial_optimum(constraints);
    for (const auto& uav : scenario.uavs())
        out.uav_states.push_back(flight_state(constraints, uav.measurements, out.radial.r_star));
    out.state = *std::min_element(out.uav_states.begin(), out.uav_states.end(),
                                  [](const FlightState& a, const FlightState& b) {
                                      return a.kind < b.kind;
                                  });
    if (out.state.kind != FlightStateKind::BeyondHalfCircle) out.state.flip_after = 0;

    const auto ws = aggregated_weights(scenario, out.radial.r_star, out.radial.h_star);
    out.classification = classify(ws);

    SynthesizedPlan synthesized;
    switch (out.state.kind) {
        case FlightStateKind::Hovering:
            synthesized = plan_hovering(scenario, constraints);
            out.bound = out.classification.hovering_bound();
            break;
        case FlightStateKind::BelowHalfCircle:
            synthesized = plan_below_half(scenario, constraints, 1.0);
            out.bound = out.classification.psi_regular;
            break;
        case FlightStateKind::BeyondHalfCircle:
            synthesized = plan_mixed_circle(scenario, constraints, out.uav_states);
            out.bound = out.classification.psi_regular;
            break;
        case FlightStateKind::FullCircle:
            synthesized = plan_full_circle(scenario, constraints);
            out.bound = out.classification.psi_regular;
            break;
    }
    out.plan = std::move(synthesized.plan);
    out.suboptimal = synthesized.suboptimal;
    out.achieved_det = fim(out.plan, scenario).det;
    return out;
}

}  // namespace uavloc
