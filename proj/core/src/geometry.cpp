#include "modeplan/geometry.hpp"

#include <cmath>

#include "modeplan/errors.hpp"

namespace modeplan {

namespace {

constexpr double kSmallAngle = 1e-4;

Quat normalized_or_throw(const Quat& q) {
    const double n = q.norm();
    if (!std::isfinite(n) || n < 1e-12) throw InvalidInput("pose orientation is not a valid quaternion");
    return Quat(q.coeffs() / n);
}

// V(w) maps the translational part of a twist to the translation of exp(twist).
Mat3 left_jacobian(const Vec3& w) {
    const double theta = w.norm();
    const Mat3 W = skew(w);
    double b, c;
    if (theta < kSmallAngle) {
        const double t2 = theta * theta;
        b = 0.5 - t2 / 24.0;
        c = 1.0 / 6.0 - t2 / 120.0;
    } else {
        b = (1.0 - std::cos(theta)) / (theta * theta);
        c = (theta - std::sin(theta)) / (theta * theta * theta);
    }
    return Mat3::Identity() + b * W + c * W * W;
}

Mat3 left_jacobian_inverse(const Vec3& w) {
    const double theta = w.norm();
    const Mat3 W = skew(w);
    double d;
    if (theta < kSmallAngle) {
        d = 1.0 / 12.0 + theta * theta / 720.0;
    } else {
        const double half = 0.5 * theta;
        d = (1.0 - half * std::cos(half) / std::sin(half)) / (theta * theta);
    }
    return Mat3::Identity() - 0.5 * W + d * W * W;
}

}  // namespace

Pose::Pose(const Vec3& position, const Quat& orientation)
    : position_(position), orientation_(normalized_or_throw(orientation)) {
    if (!position_.allFinite()) throw InvalidInput("pose position is not finite");
}

Pose Pose::from_array(const std::array<double, 7>& v) {
    return {Vec3(v[0], v[1], v[2]), Quat(v[3], v[4], v[5], v[6])};
}

std::array<double, 7> Pose::to_array() const {
    return {position_.x(),    position_.y(),    position_.z(),   orientation_.w(),
            orientation_.x(), orientation_.y(), orientation_.z()};
}

Pose Pose::operator*(const Pose& rhs) const {
    return {transform_point(rhs.position_), orientation_ * rhs.orientation_};
}

Pose Pose::inverse() const {
    const Quat inv = orientation_.conjugate();
    return {-(inv * position_), inv};
}

Mat3 skew(const Vec3& v) {
    Mat3 m;
    m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
    return m;
}

Quat quat_exp(const Vec3& rotation_vector) {
    const double theta = rotation_vector.norm();
    if (theta < kSmallAngle) {
        // second-order series, renormalized
        const Vec3 v = 0.5 * rotation_vector;
        Quat q(1.0 - theta * theta / 8.0, v.x(), v.y(), v.z());
        q.normalize();
        return q;
    }
    const Vec3 axis = rotation_vector / theta;
    const double s = std::sin(0.5 * theta);
    return Quat(std::cos(0.5 * theta), s * axis.x(), s * axis.y(), s * axis.z());
}

Vec3 quat_log(const Quat& q_in) {
    Quat q = q_in.normalized();
    if (q.w() < 0.0) q.coeffs() = -q.coeffs();
    const Vec3 v = q.vec();
    const double s = v.norm();
    if (s < 1e-300) return Vec3::Zero();
    if (q.w() < 1e-15) {
        // rotation by pi: pick the axis sign from the dominant diagonal entry
        const Mat3 R = q.toRotationMatrix();
        int k = 0;
        R.diagonal().maxCoeff(&k);
        Vec3 axis;
        axis[k] = std::sqrt(std::max(0.0, 0.5 * (R(k, k) + 1.0)));
        for (int j = 0; j < 3; ++j) {
            if (j != k) axis[j] = R(k, j) / (2.0 * axis[k]);
        }
        return M_PI * axis.normalized();
    }
    const double theta = 2.0 * std::atan2(s, q.w());
    return (theta / s) * v;
}

double rotation_angle(const Quat& a, const Quat& b) {
    const Quat rel = a.conjugate() * b;
    return 2.0 * std::atan2(rel.vec().norm(), std::abs(rel.w()));
}

Pose apply_twist(const Pose& q, const Twist& xi, double h) {
    if (!xi.is_finite() || !std::isfinite(h)) throw InvalidInput("apply_twist: non-finite input");
    if (h < 0.0) throw InvalidInput("apply_twist: negative step");
    const Vec3 w = h * xi.angular;
    const Vec3 v = h * xi.linear;
    const Vec3 dp = left_jacobian(w) * v;
    return {q.transform_point(dp), q.orientation() * quat_exp(w)};
}

double pose_distance(const Pose& a, const Pose& b, double w_r) {
    if (w_r < 0.0) throw InvalidInput("pose_distance: negative rotation weight");
    return (a.position() - b.position()).norm() + w_r * rotation_angle(a.orientation(), b.orientation());
}

Twist desired_twist(const Pose& from, const Pose& to) {
    const Pose rel = from.inverse() * to;
    const Vec3 w = quat_log(rel.orientation());
    return {left_jacobian_inverse(w) * rel.position(), w};
}

bool in_goal(const Pose& q, const GoalRegion& goal) {
    constexpr double slack = 1e-12;
    return (q.position() - goal.center.position()).norm() <= goal.translation_tolerance + slack &&
           rotation_angle(q.orientation(), goal.center.orientation()) <= goal.rotation_tolerance + slack;
}

}  // namespace modeplan
