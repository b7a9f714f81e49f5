#include "uavloc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uavloc {

double normalize_angle(double beta) {
    constexpr double kTwoPi = 2.0 * kPi;
    double wrapped = std::fmod(beta, kTwoPi);
    if (wrapped < 0.0) wrapped += kTwoPi;
    // fmod of a tiny negative angle can round up to exactly 2*pi
    if (wrapped >= kTwoPi) wrapped = 0.0;
    return wrapped;
}

Scenario::Scenario(double p0, double gamma, std::vector<UavSpec> uavs)
    : p0_(p0), gamma_(gamma), uavs_(std::move(uavs)) {
    if (!std::isfinite(p0_)) throw InvalidArgument("scenario: p0 must be finite");
    if (!(gamma_ > 0.0) || !std::isfinite(gamma_))
        throw InvalidArgument("scenario: gamma must be positive");
    if (uavs_.empty()) throw InvalidArgument("scenario: at least one UAV required");
    for (std::size_t i = 0; i < uavs_.size(); ++i) {
        if (!(uavs_[i].noise_variance > 0.0) || !std::isfinite(uavs_[i].noise_variance))
            throw InvalidArgument("scenario: UAV " + std::to_string(i) +
                                  " noise variance must be positive");
        if (uavs_[i].measurements < 1)
            throw InvalidArgument("scenario: UAV " + std::to_string(i) +
                                  " needs at least one measurement");
    }
}

Scenario Scenario::uniform(double p0, double gamma, const std::vector<double>& noise_variances,
                           int measurements) {
    std::vector<UavSpec> uavs;
    uavs.reserve(noise_variances.size());
    for (double v : noise_variances) uavs.push_back({v, measurements});
    return Scenario(p0, gamma, std::move(uavs));
}

void ConstraintSet::validate() const {
    if (!(min_horizontal >= 0.0) || !std::isfinite(min_horizontal))
        throw InvalidArgument("constraints: min_horizontal must be >= 0");
    if (!(min_height > 0.0) || !std::isfinite(min_height))
        throw InvalidArgument("constraints: min_height must be > 0");
    if (!(max_speed >= 0.0) || !std::isfinite(max_speed))
        throw InvalidArgument("constraints: max_speed must be >= 0");
    if (!(interval > 0.0) || !std::isfinite(interval))
        throw InvalidArgument("constraints: interval must be > 0");
}

double distance(const Point3& a, const Point3& b) {
    return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                     (a.z - b.z) * (a.z - b.z));
}

MeasurementPose::MeasurementPose(double r, double h, double beta)
    : r_(r), h_(h), beta_(normalize_angle(beta)) {
    if (!std::isfinite(r) || !std::isfinite(h) || !std::isfinite(beta))
        throw InvalidArgument("pose: non-finite component");
    if (r < 0.0) throw InvalidArgument("pose: horizontal distance must be >= 0");
    if (!(h > 0.0)) throw InvalidArgument("pose: height must be > 0");
}

double MeasurementPose::slant_range() const { return std::hypot(r_, h_); }

MeasurementPlan::MeasurementPlan(std::vector<std::vector<MeasurementPose>> poses)
    : poses_(std::move(poses)) {}

std::size_t MeasurementPlan::total_measurements() const {
    return std::accumulate(poses_.begin(), poses_.end(), std::size_t{0},
                           [](std::size_t acc, const auto& list) { return acc + list.size(); });
}

bool MeasurementPlan::matches(const Scenario& scenario) const {
    if (poses_.size() != scenario.size()) return false;
    for (std::size_t i = 0; i < poses_.size(); ++i) {
        if (poses_[i].size() != static_cast<std::size_t>(scenario.uav(i).measurements))
            return false;
    }
    return true;
}

void MeasurementPlan::require_shape(const Scenario& scenario) const {
    if (!matches(scenario))
        throw InvalidArgument("plan shape does not match the scenario's UAV count / measurements");
}

MeasurementPlan MeasurementPlan::rotated(double delta) const {
    auto out = poses_;
    for (auto& list : out)
        for (auto& pose : list) pose = MeasurementPose(pose.r(), pose.h(), pose.beta() + delta);
    return MeasurementPlan(std::move(out));
}

Point3 pose_to_position(const MeasurementPose& pose, const TargetPosition& target) {
    return {target.x + pose.r() * std::sin(pose.beta()),
            target.y + pose.r() * std::cos(pose.beta()), pose.h()};
}

PoseConversion position_to_pose(const Point3& point, const TargetPosition& target) {
    if (!(point.z > 0.0)) throw InvalidArgument("position_to_pose: height must be > 0");
    const double dx = point.x - target.x;
    const double dy = point.y - target.y;
    const double r = std::hypot(dx, dy);
    if (r == 0.0) return {MeasurementPose(0.0, point.z, 0.0), true};
    return {MeasurementPose(r, point.z, std::atan2(dx, dy)), false};
}

const char* to_string(ConstraintKind kind) {
    switch (kind) {
        case ConstraintKind::MinHorizontal: return "min_horizontal";
        case ConstraintKind::MinHeight: return "min_height";
        case ConstraintKind::MaxSpeed: return "max_speed";
    }
    return "unknown";
}

ValidationReport validate_plan(const MeasurementPlan& plan, const ConstraintSet& constraints,
                               const TargetPosition& target) {
    ValidationReport report;
    const double step = constraints.max_step();
    const double step_tol = kConstraintTolerance * std::max(1.0, step);
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const auto& list = plan.uav(i);
        for (std::size_t j = 0; j < list.size(); ++j) {
            const auto& pose = list[j];
            const double r_margin = pose.r() - constraints.min_horizontal;
            if (r_margin < -kConstraintTolerance)
                report.violations.push_back({ConstraintKind::MinHorizontal, i, j, r_margin});
            const double h_margin = pose.h() - constraints.min_height;
            if (h_margin < -kConstraintTolerance)
                report.violations.push_back({ConstraintKind::MinHeight, i, j, h_margin});
            if (j > 0) {
                const double chord = distance(pose_to_position(list[j - 1], target),
                                              pose_to_position(pose, target));
                const double margin = step - chord;
                if (margin < -step_tol)
                    report.violations.push_back({ConstraintKind::MaxSpeed, i, j, margin});
            }
        }
    }
    return report;
}

}  // namespace uavloc
