#pragma once

#include <array>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace modeplan {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Quat = Eigen::Quaterniond;

/// Rigid-body configuration in SE(3). The quaternion is renormalized on construction.
class Pose {
public:
    Pose() = default;
    Pose(const Vec3& position, const Quat& orientation);

    static Pose identity() { return {}; }
    static Pose from_translation(const Vec3& p) { return {p, Quat::Identity()}; }

    /// Parses x y z qw qx qy qz.
    static Pose from_array(const std::array<double, 7>& v);
    std::array<double, 7> to_array() const;

    const Vec3& position() const noexcept { return position_; }
    const Quat& orientation() const noexcept { return orientation_; }
    Mat3 rotation() const { return orientation_.toRotationMatrix(); }

    Vec3 transform_point(const Vec3& p_body) const { return position_ + orientation_ * p_body; }
    Vec3 transform_vector(const Vec3& v_body) const { return orientation_ * v_body; }
    Vec3 inverse_transform_point(const Vec3& p_world) const {
        return orientation_.conjugate() * (p_world - position_);
    }
    Vec3 inverse_transform_vector(const Vec3& v_world) const {
        return orientation_.conjugate() * v_world;
    }

    Pose operator*(const Pose& rhs) const;
    Pose inverse() const;

private:
    Vec3 position_ = Vec3::Zero();
    Quat orientation_ = Quat::Identity();
};

/// Body-frame twist: linear velocity of the body origin and angular velocity, both in body coordinates.
struct Twist {
    Vec3 linear = Vec3::Zero();
    Vec3 angular = Vec3::Zero();

    static Twist zero() { return {}; }
    static Twist from_vector(const Vec6& v) { return {v.head<3>(), v.tail<3>()}; }
    Vec6 to_vector() const {
        Vec6 v;
        v << linear, angular;
        return v;
    }
    Twist operator*(double s) const { return {linear * s, angular * s}; }
    Twist operator-() const { return {-linear, -angular}; }
    bool is_finite() const { return linear.allFinite() && angular.allFinite(); }
};

struct GoalRegion {
    Pose center;
    double translation_tolerance = 0.0;  // m
    double rotation_tolerance = 0.0;     // rad
};

Mat3 skew(const Vec3& v);

/// SO(3) exponential of a rotation vector, as a unit quaternion.
Quat quat_exp(const Vec3& rotation_vector);

/// SO(3) logarithm; angle in [0, pi]. At exactly pi the axis is fixed by the
/// largest rotation-matrix diagonal entry, signed positive.
Vec3 quat_log(const Quat& q);

/// Geodesic angle between two orientations in [0, pi], double cover aware.
double rotation_angle(const Quat& a, const Quat& b);

/// q composed with exp(h * xi), xi a body twist.
Pose apply_twist(const Pose& q, const Twist& xi, double h);

/// Euclidean translation distance plus w_r times the rotation angle.
double pose_distance(const Pose& a, const Pose& b, double w_r);

/// Body twist xi with apply_twist(from, xi, 1) == to.
Twist desired_twist(const Pose& from, const Pose& to);

bool in_goal(const Pose& q, const GoalRegion& goal);

}  // namespace modeplan
