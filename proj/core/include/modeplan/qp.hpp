#pragma once

#include <Eigen/Core>

namespace modeplan {

/// min 1/2 x'Hx + g'x  s.t.  A_eq x = b_eq,  A_ineq x >= b_ineq.
struct QuadraticProgram {
    Eigen::MatrixXd hessian;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd A_eq;
    Eigen::VectorXd b_eq;
    Eigen::MatrixXd A_ineq;
    Eigen::VectorXd b_ineq;

    /// Empty program over n variables with zero objective.
    static QuadraticProgram with_size(Eigen::Index n);
    Eigen::Index num_variables() const { return hessian.rows(); }
};

enum class QpStatus { Optimal, Infeasible };

/// Farkas ray: A_eq' y_eq + A_ineq' y_ineq = 0, y_ineq >= 0, b_eq'y_eq + b_ineq'y_ineq > 0.
struct InfeasibilityCertificate {
    Eigen::VectorXd y_eq;
    Eigen::VectorXd y_ineq;
};

/// Multipliers follow H x + g = A_eq' eq_multipliers + A_ineq' ineq_multipliers.
struct QpSolution {
    QpStatus status = QpStatus::Infeasible;
    Eigen::VectorXd x;
    Eigen::VectorXd eq_multipliers;
    Eigen::VectorXd ineq_multipliers;
    double objective = 0.0;
    int iterations = 0;
    InfeasibilityCertificate certificate;

    bool optimal() const { return status == QpStatus::Optimal; }
};

struct QpOptions {
    double feasibility_tolerance = 1e-9;  // on unit-normalized rows
    double rank_tolerance = 1e-10;        // relative singular value cutoff for A_eq
    int max_iterations = 0;               // 0 picks a size-based limit
};

/// Goldfarb-Idnani dual active-set method after eliminating the equality
/// constraints through an SVD null-space basis. Rows are normalized to unit
/// norm before solving. The reduced Hessian must be positive definite.
/// Throws SolverIterationLimit if the active set does not settle.
QpSolution solve_qp(const QuadraticProgram& qp, const QpOptions& options = {});

/// Minimum-norm point of {A_eq x = b_eq, A_ineq x >= b_ineq}, or a certificate.
QpSolution find_feasible_point(const Eigen::MatrixXd& A_eq, const Eigen::VectorXd& b_eq,
                               const Eigen::MatrixXd& A_ineq, const Eigen::VectorXd& b_ineq,
                               const QpOptions& options = {});

}  // namespace modeplan
