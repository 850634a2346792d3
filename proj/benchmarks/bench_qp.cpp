#include <random>

#include <benchmark/benchmark.h>

#include "modeplan/qp.hpp"

using namespace modeplan;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Strictly convex QP with n variables, n/3 equalities and 2n inequalities around a feasible point.
QuadraticProgram random_qp(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    auto gauss = [&](Eigen::Index r, Eigen::Index c) {
        MatrixXd m(r, c);
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
        return m;
    };
    const MatrixXd L = gauss(n, n);
    QuadraticProgram qp = QuadraticProgram::with_size(n);
    qp.hessian = L * L.transpose() + MatrixXd::Identity(n, n);
    qp.gradient = gauss(n, 1);
    const VectorXd x0 = gauss(n, 1);
    qp.A_eq = gauss(n / 3, n);
    qp.b_eq = qp.A_eq * x0;
    qp.A_ineq = gauss(2 * n, n);
    qp.b_ineq = qp.A_ineq * x0 - (gauss(2 * n, 1).cwiseAbs().array() * 0.5).matrix();
    return qp;
}

void BM_SolveQp(benchmark::State& state) {
    const QuadraticProgram qp = random_qp(static_cast<int>(state.range(0)), 7);
    for (auto _ : state) benchmark::DoNotOptimize(solve_qp(qp));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveQp)->RangeMultiplier(2)->Range(8, 64)->Complexity();

void BM_FindFeasiblePoint(benchmark::State& state) {
    const QuadraticProgram qp = random_qp(static_cast<int>(state.range(0)), 11);
    for (auto _ : state) benchmark::DoNotOptimize(find_feasible_point(qp.A_eq, qp.b_eq, qp.A_ineq, qp.b_ineq));
}
BENCHMARK(BM_FindFeasiblePoint)->Arg(16)->Arg(40);

}  // namespace
