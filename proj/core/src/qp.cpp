#include "modeplan/qp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <vector>

#include "modeplan/errors.hpp"

namespace modeplan {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ReducedResult {
    bool feasible = false;
    VectorXd y;
    VectorXd u;       // multipliers, one per reduced row
    VectorXd ray;     // Farkas ray over reduced rows when infeasible
    int iterations = 0;
};

// Dual active-set solve of min 1/2 y'Hy + g'y s.t. C y >= d with unit-norm rows.
ReducedResult goldfarb_idnani(const MatrixXd& H, const VectorXd& g, const MatrixXd& C, const VectorXd& d,
                              double tol, int max_iter) {
    const Index n = H.rows();
    const Index m = C.rows();
    ReducedResult res;
    res.u = VectorXd::Zero(m);

    Eigen::LLT<MatrixXd> llt(H);
    if (llt.info() != Eigen::Success) throw InvalidInput("QP reduced Hessian is not positive definite");
    const MatrixXd Linv = llt.matrixL().solve(MatrixXd::Identity(n, n));
    const MatrixXd J0 = Linv.transpose();

    VectorXd y = -llt.solve(g);
    std::vector<Index> active;
    std::vector<double> u;
    MatrixXd J = J0;
    MatrixXd R(0, 0);

    auto refactor = [&]() {
        const Index q = static_cast<Index>(active.size());
        if (q == 0) {
            J = J0;
            R.resize(0, 0);
            return;
        }
        MatrixXd N(n, q);
        for (Index j = 0; j < q; ++j) N.col(j) = C.row(active[j]).transpose();
        Eigen::HouseholderQR<MatrixXd> qr(Linv * N);
        const MatrixXd Q = qr.householderQ();
        J = J0 * Q;
        R = qr.matrixQR().topLeftCorner(q, q).triangularView<Eigen::Upper>();
    };

    std::vector<char> is_active(static_cast<std::size_t>(m), 0);
    int iter = 0;
    while (true) {
        // most violated inactive constraint
        Index p = -1;
        double worst = -tol;
        for (Index i = 0; i < m; ++i) {
            if (is_active[i]) continue;
            const double s = C.row(i).dot(y) - d[i];
            if (s < worst) {
                worst = s;
                p = i;
            }
        }
        if (p < 0) break;

        double up = 0.0;
        while (true) {
            if (++iter > max_iter) throw SolverIterationLimit("QP active set did not converge");
            const Index q = static_cast<Index>(active.size());
            const VectorXd np = C.row(p).transpose();
            const VectorXd dv = J.transpose() * np;
            const VectorXd d2 = dv.tail(n - q);
            const VectorXd z = J.rightCols(n - q) * d2;
            VectorXd r(q);
            if (q > 0) r = R.triangularView<Eigen::Upper>().solve(dv.head(q));

            double t1 = kInf;
            Index drop = -1;
            for (Index j = 0; j < q; ++j) {
                if (r[j] > 1e-12) {
                    const double ratio = u[j] / r[j];
                    if (ratio < t1) {
                        t1 = ratio;
                        drop = j;
                    }
                }
            }
            double t2 = kInf;
            const bool primal_step = d2.norm() > 1e-10 * std::max(1.0, dv.norm());
            if (primal_step) t2 = -(np.dot(y) - d[p]) / z.dot(np);

            const double t = std::min(t1, t2);
            if (t == kInf) {
                res.ray = VectorXd::Zero(m);
                res.ray[p] = 1.0;
                for (Index j = 0; j < q; ++j) res.ray[active[j]] = std::max(0.0, -r[j]);
                res.iterations = iter;
                res.y = y;
                return res;
            }
            if (primal_step) y += t * z;
            for (Index j = 0; j < q; ++j) u[j] -= t * r[j];
            up += t;
            if (primal_step && t2 <= t1) {
                active.push_back(p);
                u.push_back(up);
                is_active[p] = 1;
                refactor();
                break;
            }
            is_active[active[drop]] = 0;
            active.erase(active.begin() + drop);
            u.erase(u.begin() + drop);
            refactor();
        }
    }
    res.feasible = true;
    res.y = y;
    for (std::size_t j = 0; j < active.size(); ++j) res.u[active[j]] = std::max(0.0, u[j]);
    res.iterations = iter;
    return res;
}

// Least-squares w with A' w ~= v.
VectorXd solve_transposed(const MatrixXd& A, const VectorXd& v) {
    if (A.rows() == 0) return VectorXd(0);
    return A.transpose().completeOrthogonalDecomposition().solve(v);
}

}  // namespace

QuadraticProgram QuadraticProgram::with_size(Index n) {
    QuadraticProgram qp;
    qp.hessian = MatrixXd::Zero(n, n);
    qp.gradient = VectorXd::Zero(n);
    qp.A_eq.resize(0, n);
    qp.b_eq.resize(0);
    qp.A_ineq.resize(0, n);
    qp.b_ineq.resize(0);
    return qp;
}

QpSolution solve_qp(const QuadraticProgram& qp, const QpOptions& options) {
    const Index n = qp.hessian.rows();
    if (qp.hessian.cols() != n || qp.gradient.size() != n || qp.A_eq.cols() != n || qp.A_ineq.cols() != n ||
        qp.A_eq.rows() != qp.b_eq.size() || qp.A_ineq.rows() != qp.b_ineq.size())
        throw InvalidInput("solve_qp: inconsistent problem dimensions");
    const Index me = qp.A_eq.rows();
    const Index mi = qp.A_ineq.rows();
    const double tol = options.feasibility_tolerance;

    QpSolution sol;
    sol.certificate.y_eq = VectorXd::Zero(me);
    sol.certificate.y_ineq = VectorXd::Zero(mi);
    sol.eq_multipliers = VectorXd::Zero(me);
    sol.ineq_multipliers = VectorXd::Zero(mi);

    // unit-norm rows; zero rows are checked directly
    VectorXd rho_e(me), rho_i(mi);
    MatrixXd Ae = qp.A_eq;
    VectorXd be = qp.b_eq;
    MatrixXd Ai = qp.A_ineq;
    VectorXd bi = qp.b_ineq;
    for (Index k = 0; k < me; ++k) {
        rho_e[k] = Ae.row(k).norm();
        if (rho_e[k] < 1e-14) {
            if (std::abs(be[k]) > tol) {
                sol.certificate.y_eq[k] = be[k] > 0 ? 1.0 : -1.0;
                return sol;
            }
            rho_e[k] = 0.0;
            Ae.row(k).setZero();
            be[k] = 0.0;
            continue;
        }
        Ae.row(k) /= rho_e[k];
        be[k] /= rho_e[k];
    }
    for (Index k = 0; k < mi; ++k) {
        rho_i[k] = Ai.row(k).norm();
        if (rho_i[k] < 1e-14) {
            if (bi[k] > tol) {
                sol.certificate.y_ineq[k] = 1.0;
                return sol;
            }
            rho_i[k] = 0.0;
            Ai.row(k).setZero();
            bi[k] = -1.0;
            continue;
        }
        Ai.row(k) /= rho_i[k];
        bi[k] /= rho_i[k];
    }

    if (n == 0) {  // every row was zero and satisfied above
        sol.status = QpStatus::Optimal;
        sol.x = VectorXd(0);
        return sol;
    }

    // equality elimination x = x0 + Z y
    VectorXd x0 = VectorXd::Zero(n);
    MatrixXd Z = MatrixXd::Identity(n, n);
    if (me > 0) {
        Eigen::JacobiSVD<MatrixXd> svd(Ae, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const VectorXd& sv = svd.singularValues();
        const double smax = sv.size() > 0 ? sv[0] : 0.0;
        Index rank = 0;
        for (Index k = 0; k < sv.size(); ++k) {
            if (sv[k] > options.rank_tolerance * std::max(1.0, smax)) ++rank;
        }
        const MatrixXd& U = svd.matrixU();
        const MatrixXd& V = svd.matrixV();
        x0 = V.leftCols(rank) * (sv.head(rank).cwiseInverse().asDiagonal() * (U.leftCols(rank).transpose() * be));
        const VectorXd resid = be - Ae * x0;
        if (resid.lpNorm<Eigen::Infinity>() > tol * std::max(1.0, be.lpNorm<Eigen::Infinity>())) {
            for (Index k = 0; k < me; ++k) sol.certificate.y_eq[k] = rho_e[k] > 0 ? resid[k] / rho_e[k] : 0.0;
            return sol;
        }
        Z = V.rightCols(n - rank);
    }
    const Index nr = Z.cols();

    const MatrixXd Cr = Ai * Z;
    const VectorXd dr = bi - Ai * x0;

    // map a ray over (normalized) inequality rows back to a full certificate
    auto emit_certificate = [&](const VectorXd& ray_normalized) {
        const VectorXd v = Ai.transpose() * ray_normalized;
        const VectorXd w = -solve_transposed(Ae, v);
        for (Index k = 0; k < mi; ++k) sol.certificate.y_ineq[k] = rho_i[k] > 0 ? ray_normalized[k] / rho_i[k] : 0.0;
        for (Index k = 0; k < me; ++k) sol.certificate.y_eq[k] = rho_e[k] > 0 ? w[k] / rho_e[k] : 0.0;
    };

    // rows constant on the null space
    std::vector<Index> live;
    VectorXd kappa = VectorXd::Zero(mi);
    for (Index k = 0; k < mi; ++k) {
        kappa[k] = nr > 0 ? Cr.row(k).norm() : 0.0;
        if (kappa[k] < 1e-11) {
            if (dr[k] > tol) {
                VectorXd ray = VectorXd::Zero(mi);
                ray[k] = 1.0;
                emit_certificate(ray);
                return sol;
            }
        } else {
            live.push_back(k);
        }
    }

    VectorXd yred = VectorXd::Zero(nr);
    VectorXd u_norm = VectorXd::Zero(mi);  // multipliers on the unit-normalized rows
    if (nr > 0) {
        const MatrixXd Hr = Z.transpose() * qp.hessian * Z;
        const VectorXd gr = Z.transpose() * (qp.hessian * x0 + qp.gradient);
        const Index ml = static_cast<Index>(live.size());
        MatrixXd Cl(ml, nr);
        VectorXd dl(ml);
        for (Index j = 0; j < ml; ++j) {
            Cl.row(j) = Cr.row(live[j]) / kappa[live[j]];
            dl[j] = dr[live[j]] / kappa[live[j]];
        }
        const int max_iter = options.max_iterations > 0 ? options.max_iterations
                                                        : static_cast<int>(50 * (nr + ml) + 200);
        const ReducedResult rr = goldfarb_idnani(0.5 * (Hr + Hr.transpose()), gr, Cl, dl, 1e-11, max_iter);
        sol.iterations = rr.iterations;
        if (!rr.feasible) {
            VectorXd ray = VectorXd::Zero(mi);
            for (Index j = 0; j < ml; ++j) ray[live[j]] = rr.ray[j] / kappa[live[j]];
            emit_certificate(ray);
            return sol;
        }
        yred = rr.y;
        for (Index j = 0; j < ml; ++j) u_norm[live[j]] = rr.u[j] / kappa[live[j]];
    }

    sol.status = QpStatus::Optimal;
    sol.x = x0 + Z * yred;
    for (Index k = 0; k < mi; ++k) sol.ineq_multipliers[k] = rho_i[k] > 0 ? u_norm[k] / rho_i[k] : 0.0;
    const VectorXd stat = qp.hessian * sol.x + qp.gradient - Ai.transpose() * u_norm;
    const VectorXd w = solve_transposed(Ae, stat);
    for (Index k = 0; k < me; ++k) sol.eq_multipliers[k] = rho_e[k] > 0 ? w[k] / rho_e[k] : 0.0;
    sol.objective = 0.5 * sol.x.dot(qp.hessian * sol.x) + qp.gradient.dot(sol.x);
    return sol;
}

QpSolution find_feasible_point(const MatrixXd& A_eq, const VectorXd& b_eq, const MatrixXd& A_ineq,
                               const VectorXd& b_ineq, const QpOptions& options) {
    const Index n = std::max(A_eq.cols(), A_ineq.cols());
    QuadraticProgram qp;
    qp.hessian = MatrixXd::Identity(n, n);
    qp.gradient = VectorXd::Zero(n);
    qp.A_eq = A_eq.cols() == n ? A_eq : MatrixXd(0, n);
    qp.b_eq = A_eq.cols() == n ? b_eq : VectorXd(0);
    qp.A_ineq = A_ineq.cols() == n ? A_ineq : MatrixXd(0, n);
    qp.b_ineq = A_ineq.cols() == n ? b_ineq : VectorXd(0);
    return solve_qp(qp, options);
}

}  // namespace modeplan
