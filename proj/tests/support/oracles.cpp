#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Geometry>

namespace oracle {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

LpResult lp_feasible(const MatrixXd& A_eq, const VectorXd& b_eq, const MatrixXd& A_ineq, const VectorXd& b_ineq) {
    const Index n = std::max(A_eq.cols(), A_ineq.cols());
    const Index me = A_eq.rows(), mi = A_ineq.rows(), m = me + mi;
    const Index nv = 2 * n + mi;  // x+, x-, surplus
    const Index cols = nv + m + 1;  // + artificials + rhs

    MatrixXd T = MatrixXd::Zero(m + 1, cols);
    for (Index r = 0; r < me; ++r) {
        T.row(r).segment(0, n) = A_eq.row(r);
        T.row(r).segment(n, n) = -A_eq.row(r);
        T(r, cols - 1) = b_eq(r);
    }
    for (Index r = 0; r < mi; ++r) {
        T.row(me + r).segment(0, n) = A_ineq.row(r);
        T.row(me + r).segment(n, n) = -A_ineq.row(r);
        T(me + r, 2 * n + r) = -1.0;
        T(me + r, cols - 1) = b_ineq(r);
    }
    for (Index r = 0; r < m; ++r) {
        if (T(r, cols - 1) < 0) T.row(r) *= -1.0;
        T(r, nv + r) = 1.0;
    }
    std::vector<Index> basis(static_cast<std::size_t>(m));
    for (Index r = 0; r < m; ++r) basis[static_cast<std::size_t>(r)] = nv + r;
    // reduced costs of the phase-one objective (sum of artificials)
    for (Index r = 0; r < m; ++r) T.row(m) -= T.row(r);
    for (Index r = 0; r < m; ++r) T(m, nv + r) = 0.0;

    const double scale = 1.0 + T.cwiseAbs().maxCoeff();
    const double tol = 1e-11 * scale;
    for (int iter = 0; iter < 100000; ++iter) {
        Index enter = -1;
        for (Index c = 0; c < cols - 1; ++c) {
            if (T(m, c) < -tol) {
                enter = c;
                break;
            }
        }
        if (enter < 0) break;
        Index leave = -1;
        double best = std::numeric_limits<double>::infinity();
        for (Index r = 0; r < m; ++r) {
            if (T(r, enter) <= tol) continue;
            const double ratio = T(r, cols - 1) / T(r, enter);
            if (ratio < best - 1e-14 ||
                (std::abs(ratio - best) <= 1e-14 && basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(leave)])) {
                best = ratio;
                leave = r;
            }
        }
        if (leave < 0) break;  // phase one is bounded below; cannot happen
        T.row(leave) /= T(leave, enter);
        for (Index r = 0; r <= m; ++r) {
            if (r != leave && T(r, enter) != 0.0) T.row(r) -= T(r, enter) * T.row(leave);
        }
        basis[static_cast<std::size_t>(leave)] = enter;
    }

    LpResult out;
    const double infeasibility = -T(m, cols - 1);
    out.feasible = infeasibility <= 1e-9 * scale;
    VectorXd z = VectorXd::Zero(nv + m);
    for (Index r = 0; r < m; ++r) z(basis[static_cast<std::size_t>(r)]) = T(r, cols - 1);
    out.x = z.head(n) - z.segment(n, n);
    return out;
}

double KktResiduals::max() const {
    return std::max({stationarity, primal_eq, primal_ineq, dual, complementarity});
}

KktResiduals kkt_residuals(const modeplan::QuadraticProgram& qp, const VectorXd& x, const VectorXd& y_eq,
                           const VectorXd& mu) {
    KktResiduals r;
    auto inf = [](const VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; };
    const VectorXd grad = qp.hessian * x + qp.gradient;
    VectorXd rhs = VectorXd::Zero(x.size());
    if (qp.A_eq.rows()) rhs += qp.A_eq.transpose() * y_eq;
    if (qp.A_ineq.rows()) rhs += qp.A_ineq.transpose() * mu;
    r.stationarity = inf(grad - rhs) / (1.0 + inf(grad) + inf(rhs));
    if (qp.A_eq.rows()) r.primal_eq = inf(qp.A_eq * x - qp.b_eq) / (1.0 + inf(qp.b_eq));
    if (qp.A_ineq.rows()) {
        const VectorXd slack = qp.A_ineq * x - qp.b_ineq;
        r.primal_ineq = std::max(0.0, -slack.minCoeff()) / (1.0 + inf(qp.b_ineq));
        r.dual = std::max(0.0, -mu.minCoeff()) / (1.0 + inf(mu));
        r.complementarity = inf(mu.cwiseProduct(slack)) / (1.0 + inf(mu) * (1.0 + inf(slack)));
    }
    return r;
}

void tangent_frame(const Eigen::Vector3d& n, Eigen::Vector3d& t1, Eigen::Vector3d& t2) {
    for (int k = 0; k < 3; ++k) {
        const Eigen::Vector3d e = Eigen::Vector3d::Unit(k);
        if (std::abs(e.dot(n)) < 0.9) {
            t1 = e.cross(n).normalized();
            break;
        }
    }
    t2 = n.cross(t1);
}

namespace {

// Row over the twist (v, w) giving d . (v + w x p).
Eigen::RowVectorXd velocity_row(const OracleContact& c, const Eigen::Vector3d& d) {
    Eigen::RowVectorXd row(6);
    row << d.transpose(), c.p.cross(d).transpose();
    return row;
}

struct Rows {
    MatrixXd eq = MatrixXd(0, 6), ineq = MatrixXd(0, 6);
    VectorXd beq = VectorXd(0), bineq = VectorXd(0);

    void add(const Eigen::RowVectorXd& row, int sign) {
        // sign 0: row = 0, +1: row >= 1, -1: row <= -1
        if (sign == 0) {
            eq.conservativeResize(eq.rows() + 1, 6);
            eq.bottomRows(1) = row;
            beq.conservativeResize(beq.size() + 1);
            beq(beq.size() - 1) = 0.0;
        } else {
            ineq.conservativeResize(ineq.rows() + 1, 6);
            ineq.bottomRows(1) = sign * row;
            bineq.conservativeResize(bineq.size() + 1);
            bineq(bineq.size() - 1) = 1.0;
        }
    }
    bool feasible() const { return lp_feasible(eq, beq, ineq, bineq).feasible; }
};

}  // namespace

std::vector<std::string> brute_force_cs(const std::vector<OracleContact>& contacts) {
    const std::size_t n = contacts.size();
    std::vector<std::string> out;
    for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
        std::string cs(n, 'M');
        Rows rows;
        for (std::size_t i = 0; i < n; ++i) {
            const bool separate = (bits >> (n - 1 - i)) & 1u;
            cs[i] = separate ? 'S' : 'M';
            rows.add(velocity_row(contacts[i], contacts[i].n), separate ? 1 : 0);
        }
        if (rows.feasible()) out.push_back(cs);
    }
    return out;
}

std::vector<std::string> brute_force_ss(const std::vector<OracleContact>& contacts, const std::string& cs) {
    std::vector<std::size_t> maintained;
    for (std::size_t i = 0; i < cs.size(); ++i)
        if (cs[i] == 'M') maintained.push_back(i);
    const std::size_t k = 2 * maintained.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < k; ++i) total *= 3;

    std::vector<std::string> out;
    std::vector<int> signs(k);
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t c = code;
        for (std::size_t j = 0; j < k; ++j) {
            signs[k - 1 - j] = static_cast<int>(c % 3) - 1;
            c /= 3;
        }
        Rows rows;
        std::string text;
        std::size_t next = 0;
        for (std::size_t i = 0; i < cs.size(); ++i) {
            const auto& con = contacts[i];
            if (cs[i] == 'S') {
                rows.add(velocity_row(con, con.n), 1);
                text += "S";
                continue;
            }
            Eigen::Vector3d t1, t2;
            tangent_frame(con.n, t1, t2);
            rows.add(velocity_row(con, con.n), 0);
            text += "M";
            for (const Eigen::Vector3d& t : {t1, t2}) {
                const int s = signs[next++];
                rows.add(velocity_row(con, t), s);
                text += s == 0 ? '0' : (s > 0 ? '+' : '-');
            }
        }
        if (rows.feasible()) out.push_back(text);
    }
    return out;
}


KnownQp random_known_qp(std::uint64_t seed, int n_min, int n_max) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<int> dim(n_min, n_max);
    auto randn = [&](Index r, Index c) {
        MatrixXd m(r, c);
        for (Index i = 0; i < r; ++i)
            for (Index j = 0; j < c; ++j) m(i, j) = g(rng);
        return m;
    };
    const int n = dim(rng);
    std::uniform_int_distribution<int> eq_count(0, n / 2);
    const int me = eq_count(rng);
    std::uniform_int_distribution<int> ineq_count(0, 2 * n);
    const int mi = ineq_count(rng);
    // at most n - me active inequalities keeps the active rows independent
    std::uniform_int_distribution<int> active_count(0, std::min(mi, n - me));
    const int ma = active_count(rng);

    KnownQp out;
    const MatrixXd L = randn(n, n);
    out.qp.hessian = L * L.transpose() + 0.5 * MatrixXd::Identity(n, n);
    out.x_star = randn(n, 1);
    out.qp.A_eq = randn(me, n);
    out.qp.b_eq = out.qp.A_eq * out.x_star;
    out.qp.A_ineq = randn(mi, n);
    out.qp.b_ineq = out.qp.A_ineq * out.x_star;
    std::uniform_real_distribution<double> pos(0.1, 2.0);
    VectorXd mu = VectorXd::Zero(mi);
    for (int i = 0; i < mi; ++i) {
        if (i < ma) {
            mu(i) = pos(rng);
        } else {
            out.qp.b_ineq(i) -= pos(rng);
        }
    }
    const VectorXd y = randn(me, 1);
    out.qp.gradient = -out.qp.hessian * out.x_star;
    if (me) out.qp.gradient += out.qp.A_eq.transpose() * y;
    if (mi) out.qp.gradient += out.qp.A_ineq.transpose() * mu;
    return out;
}

EmptySystem random_empty_system(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<int> dim(2, 8);
    const int n = dim(rng);
    std::uniform_int_distribution<int> rows(2, 2 * n);
    const int mi = rows(rng);
    std::uniform_int_distribution<int> eq_rows(0, n / 2);
    const int me = eq_rows(rng);

    EmptySystem s;
    s.A_eq = MatrixXd(me, n);
    s.b_eq = VectorXd(me);
    s.A_ineq = MatrixXd(mi, n);
    s.b_ineq = VectorXd(mi);
    for (int i = 0; i < me; ++i) {
        for (int j = 0; j < n; ++j) s.A_eq(i, j) = g(rng);
        s.b_eq(i) = g(rng);
    }
    for (int i = 0; i < mi; ++i)
        for (int j = 0; j < n; ++j) s.A_ineq(i, j) = g(rng);
    // the last inequality is minus a positive combination of the others
    // (plus the equalities), so y'A = 0 with y_last = 1
    std::uniform_real_distribution<double> pos(0.2, 1.5);
    VectorXd y_ineq(mi);
    for (int i = 0; i + 1 < mi; ++i) y_ineq(i) = pos(rng);
    y_ineq(mi - 1) = 1.0;
    VectorXd y_eq(me);
    for (int i = 0; i < me; ++i) y_eq(i) = g(rng);
    Eigen::RowVectorXd combo = Eigen::RowVectorXd::Zero(n);
    for (int i = 0; i + 1 < mi; ++i) combo += y_ineq(i) * s.A_ineq.row(i);
    for (int i = 0; i < me; ++i) combo += y_eq(i) * s.A_eq.row(i);
    s.A_ineq.row(mi - 1) = -combo;
    // y'b > 0: pick the inequality offsets, then the last one to leave a margin
    for (int i = 0; i + 1 < mi; ++i) s.b_ineq(i) = g(rng);
    double yb = y_eq.dot(s.b_eq);
    for (int i = 0; i + 1 < mi; ++i) yb += y_ineq(i) * s.b_ineq(i);
    s.b_ineq(mi - 1) = -yb + pos(rng);
    return s;
}

}  // namespace oracle
