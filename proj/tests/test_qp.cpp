#include <random>

#include <gtest/gtest.h>

#include "modeplan/qp.hpp"
#include "oracles.hpp"

using namespace modeplan;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Farkas ray check, scaled by the certificate size.
double certificate_error(const MatrixXd& A_eq, const VectorXd& b_eq, const MatrixXd& A_ineq, const VectorXd& b_ineq,
                         const InfeasibilityCertificate& c, double* gap) {
    VectorXd combo = VectorXd::Zero(std::max(A_eq.cols(), A_ineq.cols()));
    double yb = 0.0;
    if (A_eq.rows()) {
        combo += A_eq.transpose() * c.y_eq;
        yb += b_eq.dot(c.y_eq);
    }
    if (A_ineq.rows()) {
        combo += A_ineq.transpose() * c.y_ineq;
        yb += b_ineq.dot(c.y_ineq);
    }
    const double size = c.y_eq.cwiseAbs().sum() + c.y_ineq.cwiseAbs().sum();
    *gap = yb / size;
    double err = combo.cwiseAbs().maxCoeff() / size;
    if (c.y_ineq.size()) err = std::max(err, std::max(0.0, -c.y_ineq.minCoeff()) / size);
    return err;
}

}  // namespace

TEST(SolveQp, UnconstrainedMinimum) {
    QuadraticProgram qp = QuadraticProgram::with_size(2);
    qp.hessian = Eigen::Vector2d(2.0, 4.0).asDiagonal();
    qp.gradient = Eigen::Vector2d(-2.0, 8.0);
    const QpSolution s = solve_qp(qp);
    ASSERT_TRUE(s.optimal());
    EXPECT_TRUE(s.x.isApprox(Eigen::Vector2d(1.0, -2.0)));
}

TEST(SolveQp, SingleActiveBound) {
    // min (x-1)^2 + (y-1)^2 with x + y <= 1: optimum (0.5, 0.5), multiplier 1
    QuadraticProgram qp = QuadraticProgram::with_size(2);
    qp.hessian = 2.0 * MatrixXd::Identity(2, 2);
    qp.gradient = Eigen::Vector2d(-2.0, -2.0);
    qp.A_ineq = Eigen::RowVector2d(-1.0, -1.0);
    qp.b_ineq = Eigen::VectorXd::Constant(1, -1.0);
    const QpSolution s = solve_qp(qp);
    ASSERT_TRUE(s.optimal());
    EXPECT_TRUE(s.x.isApprox(Eigen::Vector2d(0.5, 0.5), 1e-12));
    EXPECT_NEAR(s.ineq_multipliers(0), 1.0, 1e-10);
    EXPECT_NEAR(s.objective, 2 * 0.25 + (-2.0), 1e-12);
}

TEST(SolveQp, KnownSolutionsSatisfyKkt) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto k = oracle::random_known_qp(seed);
        const QpSolution s = solve_qp(k.qp);
        ASSERT_TRUE(s.optimal()) << "seed " << seed;
        const auto r = oracle::kkt_residuals(k.qp, s.x, s.eq_multipliers, s.ineq_multipliers);
        EXPECT_LE(r.max(), 1e-6) << "seed " << seed;
        EXPECT_LE((s.x - k.x_star).norm() / (1 + k.x_star.norm()), 1e-6) << "seed " << seed;
    }
}

TEST(SolveQp, RedundantEqualitiesAreTolerated) {
    auto k = oracle::random_known_qp(5, 4, 6);
    const Eigen::Index n = k.qp.num_variables();
    MatrixXd A(2, n);
    A.row(0) = MatrixXd::Random(1, n);
    A.row(1) = 2.0 * A.row(0);
    k.qp.A_eq.conservativeResize(k.qp.A_eq.rows() + 2, n);
    k.qp.A_eq.bottomRows(2) = A;
    k.qp.b_eq.conservativeResize(k.qp.b_eq.size() + 2);
    k.qp.b_eq.tail(2) = A * k.x_star;
    const QpSolution s = solve_qp(k.qp);
    ASSERT_TRUE(s.optimal());
    EXPECT_LE((s.x - k.x_star).norm(), 1e-6);
}

TEST(SolveQp, InfeasibleSystemsCarryCertificates) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto e = oracle::random_empty_system(seed);
        QuadraticProgram qp = QuadraticProgram::with_size(std::max(e.A_eq.cols(), e.A_ineq.cols()));
        qp.A_eq = e.A_eq;
        qp.b_eq = e.b_eq;
        qp.A_ineq = e.A_ineq;
        qp.b_ineq = e.b_ineq;
        qp.hessian.setIdentity();
        const QpSolution s = solve_qp(qp);
        ASSERT_EQ(s.status, QpStatus::Infeasible) << "seed " << seed;
        double gap = 0.0;
        EXPECT_LE(certificate_error(e.A_eq, e.b_eq, e.A_ineq, e.b_ineq, s.certificate, &gap), 1e-8) << "seed " << seed;
        EXPECT_GT(gap, 0.0) << "seed " << seed;
        EXPECT_FALSE(oracle::lp_feasible(e.A_eq, e.b_eq, e.A_ineq, e.b_ineq).feasible) << "seed " << seed;
    }
}

TEST(FindFeasiblePoint, AgreesWithSimplex) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    int feasible = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 3 + trial % 4;
        const int mi = 2 + trial % 7;
        MatrixXd A(mi, n);
        VectorXd b(mi);
        for (int i = 0; i < mi; ++i) {
            for (int j = 0; j < n; ++j) A(i, j) = g(rng);
            b(i) = g(rng) + 0.5;
        }
        const MatrixXd Ae(0, n);
        const VectorXd be(0);
        const QpSolution s = find_feasible_point(Ae, be, A, b);
        const bool expect = oracle::lp_feasible(Ae, be, A, b).feasible;
        ASSERT_EQ(s.optimal(), expect) << "trial " << trial;
        if (s.optimal()) {
            ++feasible;
            EXPECT_GE((A * s.x - b).minCoeff(), -1e-9);
        }
    }
    // the generator should exercise both outcomes
    EXPECT_GT(feasible, 20);
    EXPECT_LT(feasible, 180);
}

TEST(FindFeasiblePoint, MinimumNorm) {
    // {x : x0 + x1 >= 2}: nearest point to the origin is (1, 1)
    const MatrixXd A = Eigen::RowVector2d(1, 1);
    const QpSolution s = find_feasible_point(MatrixXd(0, 2), VectorXd(0), A, VectorXd::Constant(1, 2.0));
    ASSERT_TRUE(s.optimal());
    EXPECT_TRUE(s.x.isApprox(Eigen::Vector2d(1, 1), 1e-10));
}

TEST(LpOracle, SmallCases) {
    const MatrixXd A = (MatrixXd(2, 1) << 1, -1).finished();
    EXPECT_TRUE(oracle::lp_feasible(MatrixXd(0, 1), VectorXd(0), A, Eigen::Vector2d(1, -2)).feasible);
    EXPECT_FALSE(oracle::lp_feasible(MatrixXd(0, 1), VectorXd(0), A, Eigen::Vector2d(1, 0)).feasible);
}
