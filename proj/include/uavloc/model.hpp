#pragma once

// Scenario, constraint and plan types shared by every other module.
//
// Units: meters, seconds, dB. Angles are radians internally.
//
// Bearing convention: beta is measured from the +y axis towards +x, i.e. a
// pose at horizontal distance r and bearing beta around target (x, y) sits at
// (x + r sin(beta), y + r cos(beta)). beta = atan2(dx, dy), normalized to
// [0, 2*pi).

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavloc {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;

/// Base class for every error this library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Wraps an angle into [0, 2*pi).
double normalize_angle(double beta);

struct UavSpec {
    double noise_variance = 1.0;  // sigma_i^2, dB^2
    int measurements = 1;         // M_i
};

/// Emitter / propagation / noise description. Validated on construction.
class Scenario {
public:
    Scenario(double p0, double gamma, std::vector<UavSpec> uavs);

    double p0() const { return p0_; }
    double gamma() const { return gamma_; }
    const std::vector<UavSpec>& uavs() const { return uavs_; }
    const UavSpec& uav(std::size_t i) const { return uavs_.at(i); }
    std::size_t size() const { return uavs_.size(); }

    /// Convenience: N UAVs that share the same measurement count.
    static Scenario uniform(double p0, double gamma, const std::vector<double>& noise_variances,
                            int measurements);

private:
    double p0_;
    double gamma_;
    std::vector<UavSpec> uavs_;
};

struct ConstraintSet {
    double min_horizontal = 0.0;  // r0, m
    double min_height = 1.0;      // h0, m
    double max_speed = 0.0;       // c_max, m/s
    double interval = 1.0;        // t0, s

    /// Largest admissible displacement between consecutive epochs (t0 * c_max).
    double max_step() const { return interval * max_speed; }

    /// Throws InvalidArgument when r0 < 0, h0 <= 0, c_max < 0 or t0 <= 0.
    void validate() const;
};

struct TargetPosition {
    double x = 0.0;
    double y = 0.0;
};

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

double distance(const Point3& a, const Point3& b);

/// UAV pose relative to the target: horizontal range, height and bearing.
class MeasurementPose {
public:
    MeasurementPose() = default;
    /// Throws InvalidArgument for r < 0, h <= 0 or non-finite input.
    MeasurementPose(double r, double h, double beta);

    double r() const { return r_; }
    double h() const { return h_; }
    double beta() const { return beta_; }
    /// Slant range sqrt(r^2 + h^2).
    double slant_range() const;

    bool operator==(const MeasurementPose&) const = default;

private:
    double r_ = 0.0;
    double h_ = 1.0;
    double beta_ = 0.0;
};

/// Per-UAV chronological lists of poses.
class MeasurementPlan {
public:
    MeasurementPlan() = default;
    explicit MeasurementPlan(std::vector<std::vector<MeasurementPose>> poses);

    std::size_t size() const { return poses_.size(); }
    const std::vector<MeasurementPose>& uav(std::size_t i) const { return poses_.at(i); }
    const std::vector<std::vector<MeasurementPose>>& poses() const { return poses_; }
    std::size_t total_measurements() const;

    /// True when list i has exactly M_i poses for every UAV of the scenario.
    bool matches(const Scenario& scenario) const;
    /// Throws InvalidArgument when matches() is false.
    void require_shape(const Scenario& scenario) const;

    /// Same plan with every bearing shifted by delta.
    MeasurementPlan rotated(double delta) const;

private:
    std::vector<std::vector<MeasurementPose>> poses_;
};

Point3 pose_to_position(const MeasurementPose& pose, const TargetPosition& target);

struct PoseConversion {
    MeasurementPose pose;
    bool degenerate = false;  // directly above the target, bearing undefined (set to 0)
};

/// Inverse of pose_to_position. Requires point.z > 0.
PoseConversion position_to_pose(const Point3& point, const TargetPosition& target);

enum class ConstraintKind { MinHorizontal, MinHeight, MaxSpeed };

const char* to_string(ConstraintKind kind);

struct Violation {
    ConstraintKind kind;
    std::size_t uav;
    std::size_t epoch;
    double margin;  // negative; how far the pose is past the limit, in meters
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool feasible() const { return violations.empty(); }
};

/// Absolute slack (meters) below which a limit is considered met.
inline constexpr double kConstraintTolerance = 1e-9;

/// Checks r >= r0, h >= h0 for every pose and the chord between consecutive
/// epochs of a UAV against t0 * c_max.
ValidationReport validate_plan(const MeasurementPlan& plan, const ConstraintSet& constraints,
                               const TargetPosition& target);

}  // namespace uavloc
