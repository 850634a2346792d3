#include <cmath>
#include <random>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "modeplan/errors.hpp"
#include "modeplan/geometry.hpp"

using namespace modeplan;

namespace {

Pose random_pose(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Quat q(g(rng), g(rng), g(rng), g(rng));
    return {Vec3(g(rng), g(rng), g(rng)), q};
}

Twist random_twist(std::mt19937_64& rng, double scale) {
    std::normal_distribution<double> g(0.0, scale);
    return {Vec3(g(rng), g(rng), g(rng)), Vec3(g(rng), g(rng), g(rng))};
}

Eigen::Matrix4d homogeneous(const Pose& p) {
    Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
    T.topLeftCorner<3, 3>() = p.rotation();
    T.topRightCorner<3, 1>() = p.position();
    return T;
}

// exp of the 4x4 se(3) matrix, via Eigen's general matrix exponential
Eigen::Matrix4d se3_exp(const Twist& xi, double h) {
    Eigen::Matrix4d X = Eigen::Matrix4d::Zero();
    X.topLeftCorner<3, 3>() = skew(h * xi.angular);
    X.topRightCorner<3, 1>() = h * xi.linear;
    return X.exp();
}

}  // namespace

TEST(ApplyTwist, ZeroTwistIsIdentity) {
    const Pose q(Vec3(0.3, -1.0, 2.0), Quat(0.9, 0.1, -0.3, 0.2));
    const Pose r = apply_twist(q, Twist::zero(), 0.1);
    EXPECT_EQ(r.position(), q.position());
    EXPECT_NEAR(rotation_angle(r.orientation(), q.orientation()), 0.0, 1e-15);
}

TEST(ApplyTwist, PureTranslation) {
    const Pose r = apply_twist(Pose::identity(), {Vec3(1, 0, 0), Vec3::Zero()}, 0.5);
    EXPECT_TRUE(r.position().isApprox(Vec3(0.5, 0, 0)));
    EXPECT_NEAR(rotation_angle(r.orientation(), Quat::Identity()), 0.0, 1e-15);
}

TEST(ApplyTwist, QuarterTurnMatchesRodrigues) {
    const Pose r = apply_twist(Pose::identity(), {Vec3::Zero(), Vec3(0, 0, M_PI)}, 0.5);
    const Vec3 k = Vec3::UnitZ();
    const double t = M_PI / 2;
    const Mat3 K = skew(k);
    const Mat3 R = Mat3::Identity() + std::sin(t) * K + (1 - std::cos(t)) * K * K;
    EXPECT_TRUE(r.rotation().isApprox(R, 1e-12));
    EXPECT_LT(r.position().norm(), 1e-15);
}

TEST(ApplyTwist, MatchesMatrixExponential) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const Pose q = random_pose(rng);
        // include tiny rotations to exercise the series branch
        const Twist xi = random_twist(rng, i % 4 == 0 ? 1e-6 : 1.5);
        const double h = 0.37;
        const Eigen::Matrix4d expect = homogeneous(q) * se3_exp(xi, h);
        const Eigen::Matrix4d got = homogeneous(apply_twist(q, xi, h));
        EXPECT_LT((expect - got).cwiseAbs().maxCoeff(), 1e-10) << "sample " << i;
    }
}

TEST(ApplyTwist, RejectsNonFinite) {
    Twist bad;
    bad.linear.x() = std::nan("");
    EXPECT_THROW(apply_twist(Pose::identity(), bad, 1.0), InvalidInput);
}

TEST(PoseDistance, Cases) {
    const Pose q(Vec3(1, 2, 3), Quat(0.5, 0.5, 0.5, 0.5));
    EXPECT_EQ(pose_distance(q, q, 0.7), 0.0);
    EXPECT_DOUBLE_EQ(pose_distance(Pose::identity(), Pose::from_translation(Vec3(3, 4, 0)), 1.0), 5.0);
    const Pose flipped({0, 0, 0}, Quat(0, 1, 0, 0));
    EXPECT_NEAR(pose_distance(Pose::identity(), flipped, 0.2), 0.2 * M_PI, 1e-12);
}

TEST(PoseDistance, TriangleInequality) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
        const Pose a = random_pose(rng), b = random_pose(rng), c = random_pose(rng);
        EXPECT_LE(pose_distance(a, c, 0.3), pose_distance(a, b, 0.3) + pose_distance(b, c, 0.3) + 1e-12);
    }
}

TEST(RotationAngle, DoubleCoverAndRange) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 500; ++i) {
        const Pose a = random_pose(rng), b = random_pose(rng);
        const double t = rotation_angle(a.orientation(), b.orientation());
        EXPECT_GE(t, 0.0);
        EXPECT_LE(t, M_PI + 1e-12);
        const Quat neg(-b.orientation().coeffs());
        EXPECT_NEAR(rotation_angle(a.orientation(), neg), t, 1e-12);
        EXPECT_NEAR(rotation_angle(b.orientation(), a.orientation()), t, 1e-12);
    }
}

TEST(DesiredTwist, Cases) {
    const Pose q(Vec3(1, 0, 0), Quat(0.8, 0.0, 0.6, 0.0));
    const Twist z = desired_twist(q, q);
    EXPECT_LT(z.to_vector().norm(), 1e-15);
    const Twist x = desired_twist(Pose::identity(), Pose::from_translation(Vec3(2, 0, 0)));
    EXPECT_TRUE(x.linear.isApprox(Vec3(2, 0, 0)));
    EXPECT_EQ(x.angular, Vec3::Zero());
}

TEST(DesiredTwist, RoundTrip) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        const Pose from = random_pose(rng), to = random_pose(rng);
        const Pose r = apply_twist(from, desired_twist(from, to), 1.0);
        EXPECT_LT((r.position() - to.position()).norm(), 1e-8);
        EXPECT_LT(rotation_angle(r.orientation(), to.orientation()), 1e-8);
    }
}

TEST(QuatLog, InvertsExpInsideThePrincipalBall) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        Vec3 w(u(rng), u(rng), u(rng));
        w *= (i % 5 == 0 ? 1e-7 : 3.0) * u(rng);
        if (w.norm() >= M_PI) continue;
        EXPECT_LT((quat_log(quat_exp(w)) - w).norm(), 1e-12);
    }
}

TEST(QuatLog, HalfTurnHasAngleExactlyPi) {
    const Vec3 w = quat_log(Quat(0, 0, 1, 0));
    EXPECT_NEAR(w.norm(), M_PI, 1e-15);
    EXPECT_GT(w.y(), 0.0);
}

TEST(InGoal, BoundaryInclusive) {
    GoalRegion g{Pose(Vec3(0.1, 0.2, 0.3), Quat(0.6, 0.8, 0, 0)), 0.01, 0.2};
    EXPECT_TRUE(in_goal(g.center, g));
    EXPECT_FALSE(in_goal(Pose(g.center.position() + Vec3(0.02, 0, 0), g.center.orientation()), g));
    const Pose rotated(g.center.position(), g.center.orientation() * quat_exp(Vec3(0, 0, 0.2)));
    EXPECT_TRUE(in_goal(rotated, g));
    const Pose beyond(g.center.position(), g.center.orientation() * quat_exp(Vec3(0, 0, 0.2001)));
    EXPECT_FALSE(in_goal(beyond, g));
}

TEST(Pose, RejectsZeroQuaternion) {
    EXPECT_THROW(Pose(Vec3::Zero(), Quat(0, 0, 0, 0)), InvalidInput);
}

TEST(Pose, InverseComposesToIdentity) {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 100; ++i) {
        const Pose p = random_pose(rng);
        const Pose e = p * p.inverse();
        EXPECT_LT(e.position().norm(), 1e-12);
        EXPECT_LT(rotation_angle(e.orientation(), Quat::Identity()), 1e-7);
    }
}
