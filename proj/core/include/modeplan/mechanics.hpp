#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "modeplan/collision.hpp"
#include "modeplan/contact_modes.hpp"
#include "modeplan/geometry.hpp"
#include "modeplan/linear_system.hpp"
#include "modeplan/qp.hpp"

namespace modeplan {

struct Quasistatic {};

struct Quasidynamic {
    Mat6 inertia = Mat6::Identity();  // spatial inertia about the body origin
    double h = 0.02;                  // s
};

struct DynamicsSpec {
    std::variant<Quasistatic, Quasidynamic> model;
    Vec6 external_wrench = Vec6::Zero();  // body frame

    bool quasistatic() const { return std::holds_alternative<Quasistatic>(model); }
};

/// Gravity expressed as a body-frame wrench about the body origin.
Vec6 gravity_wrench(const ObjectBody& body, const Pose& q, const Vec3& gravity_world);

/// Column layout of an assembled system: [v (6) | qdot (dof) | lambda].
struct SystemLayout {
    Eigen::Index dof = 0;
    Eigen::Index n_lambda = 0;

    Eigen::Index qdot_offset() const { return 6; }
    Eigen::Index lambda_offset() const { return 6 + dof; }
    Eigen::Index cols() const { return 6 + dof + n_lambda; }
};

struct AssembledSystem {
    LinearSystem system;
    SystemLayout layout;
    ForceBlock forces;
};

struct FrictionParams {
    double mu_env = 0.0;
    double mu_mnp = 0.0;
};

/// Velocity rows, force rows, and the six dynamics equalities for one mode.
/// `sigma` is the strictness margin for sign rows (0 in the motion QP).
AssembledSystem assemble(const ContactMode& mode, const GraspMap& grasp, const std::vector<FingerContact>& fingers,
                         const DynamicsSpec& dynamics, const TangentBasis& basis, const FrictionParams& friction,
                         Eigen::Index dof, double sigma = 0.0);

struct StepSolution {
    Twist v_o;
    Eigen::VectorXd q_dot;
    Eigen::VectorXd lambdas;
    double objective = 0.0;  // weighted velocity error plus eps * |lambda|^2
    QpSolution qp;
    QuadraticProgram problem;
};

/// Weighted twist-tracking objective over the system columns; the qdot block
/// carries an eps ridge so the program stays strictly convex.
QuadraticProgram velocity_objective(const Twist& v_des, const SystemLayout& layout, double w_a, double eps);

/// Closest achievable twist to v_des in the weighted norm, with eps regularizing
/// joint rates and forces. std::nullopt when the mode admits no motion.
std::optional<StepSolution> solve_best_velocity(const Twist& v_des, const AssembledSystem& assembled, double w_a,
                                                double eps);

/// Force-only feasibility of a mode: balance at rest when v_fixed is empty,
/// otherwise the quasidynamic equation of motion at that twist.
bool check_force_feasibility(const ContactMode& mode, const GraspMap& grasp, const std::vector<FingerContact>& fingers,
                             const DynamicsSpec& dynamics, const TangentBasis& basis, const FrictionParams& friction,
                             const std::optional<Twist>& v_fixed);

/// Ridge-regularized least-squares twist whose contact normal velocities best
/// match the signed distances: (G_N'G_N + eps I)^-1 G_N' d.
Twist correction_velocity(const GraspMap& grasp, const Eigen::VectorXd& distances, double eps_cor);

/// Weighted squared twist norm |v|^2 + w_a |w|^2.
double weighted_norm_sq(const Twist& t, double w_a);

}  // namespace modeplan
