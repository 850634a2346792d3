#include "modeplan/mechanics.hpp"

#include <Eigen/Cholesky>

#include "modeplan/errors.hpp"

namespace modeplan {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

Vec6 gravity_wrench(const ObjectBody& body, const Pose& q, const Vec3& gravity_world) {
    const Vec3 f = q.inverse_transform_vector(body.mass * gravity_world);
    Vec6 w;
    w << f, body.com.cross(f);
    return w;
}

double weighted_norm_sq(const Twist& t, double w_a) {
    return t.linear.squaredNorm() + w_a * t.angular.squaredNorm();
}

AssembledSystem assemble(const ContactMode& mode, const GraspMap& grasp, const std::vector<FingerContact>& fingers,
                         const DynamicsSpec& dynamics, const TangentBasis& basis, const FrictionParams& friction,
                         Index dof, double sigma) {
    if (mode.size() != grasp.size()) throw InvalidInput("assemble: mode and contact counts differ");
    AssembledSystem out;
    out.forces = mode_force_constraints(mode, grasp, fingers, friction.mu_env, friction.mu_mnp, basis);
    out.layout.dof = dof;
    out.layout.n_lambda = out.forces.rows.cols();
    const Index cols = out.layout.cols();

    const LinearSystem vel = mode_velocity_constraints(mode, grasp, fingers, basis, dof, sigma);
    out.system = LinearSystem::embed(vel, 0, cols);
    out.system.append(LinearSystem::embed(out.forces.rows, out.layout.lambda_offset(), cols));

    const Vec6& F = dynamics.external_wrench;
    for (int r = 0; r < 6; ++r) {
        RowVectorXd row = RowVectorXd::Zero(cols);
        row.segment(out.layout.lambda_offset(), out.layout.n_lambda) = out.forces.wrench.row(r);
        if (const auto* qd = std::get_if<Quasidynamic>(&dynamics.model)) {
            if (!(qd->h > 0.0)) throw InvalidInput("assemble: quasidynamic step must be positive");
            // M v / h - W lambda = F
            row.head<6>() = qd->inertia.row(r) / qd->h;
            row.segment(out.layout.lambda_offset(), out.layout.n_lambda) *= -1.0;
            out.system.add_eq(row, F[r]);
        } else {
            // W lambda = -F
            out.system.add_eq(row, -F[r]);
        }
    }
    return out;
}

QuadraticProgram velocity_objective(const Twist& v_des, const SystemLayout& layout, double w_a, double eps) {
    const Index n = layout.cols();
    QuadraticProgram qp = QuadraticProgram::with_size(n);
    const double wa = std::max(w_a, 1e-9);
    for (int k = 0; k < 3; ++k) {
        qp.hessian(k, k) = 2.0;
        qp.hessian(3 + k, 3 + k) = 2.0 * wa;
        qp.gradient[k] = -2.0 * v_des.linear[k];
        qp.gradient[3 + k] = -2.0 * wa * v_des.angular[k];
    }
    for (Index k = 6; k < n; ++k) qp.hessian(k, k) = 2.0 * eps;
    return qp;
}

std::optional<StepSolution> solve_best_velocity(const Twist& v_des, const AssembledSystem& assembled, double w_a,
                                                double eps) {
    if (!(eps > 0.0)) throw InvalidInput("solve_best_velocity: eps must be positive");
    if (w_a < 0.0) throw InvalidInput("solve_best_velocity: w_a must be >= 0");
    const SystemLayout& layout = assembled.layout;
    QuadraticProgram qp = velocity_objective(v_des, layout, w_a, eps);
    qp.A_eq = assembled.system.A_eq;
    qp.b_eq = assembled.system.b_eq;
    qp.A_ineq = assembled.system.A_ineq;
    qp.b_ineq = assembled.system.b_ineq;
    QpSolution sol = solve_qp(qp);
    if (!sol.optimal()) return std::nullopt;

    StepSolution step;
    step.v_o = Twist::from_vector(sol.x.head<6>());
    step.q_dot = sol.x.segment(layout.qdot_offset(), layout.dof);
    step.lambdas = sol.x.segment(layout.lambda_offset(), layout.n_lambda);
    const Twist err{v_des.linear - step.v_o.linear, v_des.angular - step.v_o.angular};
    step.objective = weighted_norm_sq(err, w_a) + eps * step.lambdas.squaredNorm();
    step.qp = std::move(sol);
    step.problem = std::move(qp);
    return step;
}

bool check_force_feasibility(const ContactMode& mode, const GraspMap& grasp, const std::vector<FingerContact>& fingers,
                             const DynamicsSpec& dynamics, const TangentBasis& basis, const FrictionParams& friction,
                             const std::optional<Twist>& v_fixed) {
    const ForceBlock fb = mode_force_constraints(mode, grasp, fingers, friction.mu_env, friction.mu_mnp, basis);
    LinearSystem sys = fb.rows;
    Vec6 rhs = -dynamics.external_wrench;
    if (v_fixed) {
        if (const auto* qd = std::get_if<Quasidynamic>(&dynamics.model)) {
            rhs += qd->inertia * v_fixed->to_vector() / qd->h;
        }
    }
    for (int r = 0; r < 6; ++r) sys.add_eq(fb.wrench.row(r), rhs[r]);
    return find_feasible_point(sys.A_eq, sys.b_eq, sys.A_ineq, sys.b_ineq).optimal();
}

Twist correction_velocity(const GraspMap& grasp, const VectorXd& distances, double eps_cor) {
    if (static_cast<Index>(grasp.size()) != distances.size())
        throw InvalidInput("correction_velocity: distance count mismatch");
    if (!(eps_cor > 0.0)) throw InvalidInput("correction_velocity: eps must be positive");
    MatrixXd GN(distances.size(), 6);
    for (std::size_t i = 0; i < grasp.size(); ++i) GN.row(static_cast<Index>(i)) = grasp[i].col(2).transpose();
    const Mat6 A = GN.transpose() * GN + eps_cor * Mat6::Identity();
    const Vec6 v = A.ldlt().solve(GN.transpose() * distances);
    return Twist::from_vector(v);
}

}  // namespace modeplan
