#include "modeplan/contact_modes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "modeplan/errors.hpp"
#include "modeplan/qp.hpp"

namespace modeplan {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

namespace {

int char_rank(char c) {
    switch (c) {
        case 'M': return 0;
        case 'S': return 1;
        case '0': return 0;
        case '+': return 1;
        case '-': return 2;
        default: return 3 + static_cast<unsigned char>(c);
    }
}

bool is_feasible(const LinearSystem& sys) {
    return find_feasible_point(sys.A_eq, sys.b_eq, sys.A_ineq, sys.b_ineq).optimal();
}

RowVectorXd tangent_row(const ContactGrasp& G, const Eigen::Vector2d& c) {
    return (c.x() * G.col(0) + c.y() * G.col(1)).transpose();
}

void add_normal_row(LinearSystem& sys, const ContactGrasp& G, ContactState s, double sigma) {
    const RowVectorXd row = G.col(2).transpose();
    if (s == ContactState::Maintain) {
        sys.add_eq(row, 0.0);
    } else {
        sys.add_ineq(row, sigma);
    }
}

void add_sign_row(LinearSystem& sys, const RowVectorXd& row, int sign, double sigma) {
    if (sign == 0) {
        sys.add_eq(row, 0.0);
    } else {
        sys.add_ineq(sign * row, sigma);
    }
}

}  // namespace

TangentBasis TangentBasis::make(int n_t) {
    if (n_t < 2) throw InvalidInput("tangent basis needs n_t >= 2");
    TangentBasis b;
    b.n_t = n_t;
    for (int j = 0; j < n_t; ++j) {
        const double a = M_PI * j / n_t;
        b.directions.emplace_back(std::cos(a), std::sin(a));
    }
    // exact axes for the 4-sided pyramid
    if (n_t == 2) b.directions[1] = Eigen::Vector2d(0.0, 1.0);
    return b;
}

MatrixXd TangentBasis::matrix() const {
    MatrixXd C(n_t, 2);
    for (int j = 0; j < n_t; ++j) C.row(j) = directions[j].transpose();
    return C;
}

ContactMode ContactMode::all_sticking(const CsMode& cs, int n_t) {
    ContactMode m;
    m.cs = cs;
    for (auto s : cs) m.ss.emplace_back(s == ContactState::Maintain ? std::vector<int>(n_t, 0) : std::vector<int>{});
    return m;
}

bool ContactMode::sticking(std::size_t i) const {
    return maintains(i) && std::all_of(ss[i].begin(), ss[i].end(), [](int s) { return s == 0; });
}

std::string ContactMode::encode() const {
    std::string out;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (cs[i] == ContactState::Separate) {
            out += 'S';
            continue;
        }
        out += 'M';
        for (int s : ss[i]) out += s == 0 ? '0' : (s > 0 ? '+' : '-');
    }
    return out;
}

ContactMode ContactMode::decode(const std::string& text, int n_t) {
    ContactMode m;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == 'S') {
            m.cs.push_back(ContactState::Separate);
            m.ss.emplace_back();
            ++i;
            continue;
        }
        if (text[i] != 'M' || i + 1 + static_cast<std::size_t>(n_t) > text.size())
            throw InvalidInput("malformed mode string '" + text + "'");
        m.cs.push_back(ContactState::Maintain);
        std::vector<int> signs;
        for (int j = 0; j < n_t; ++j) {
            const char c = text[i + 1 + static_cast<std::size_t>(j)];
            if (c == '0') {
                signs.push_back(0);
            } else if (c == '+') {
                signs.push_back(1);
            } else if (c == '-') {
                signs.push_back(-1);
            } else {
                throw InvalidInput("malformed mode string '" + text + "'");
            }
        }
        m.ss.push_back(std::move(signs));
        i += 1 + static_cast<std::size_t>(n_t);
    }
    return m;
}

bool mode_encoding_less(const std::string& a, const std::string& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                        [](char x, char y) { return char_rank(x) < char_rank(y); });
}

ContactFrame make_contact_frame(const Vec3& p_body, const Vec3& n_body) {
    const Vec3 n = n_body.normalized();
    Vec3 e = Vec3::UnitX();
    for (int k = 0; k < 3; ++k) {
        e = Vec3::Unit(k);
        if (std::abs(e.dot(n)) < 0.9) break;
    }
    const Vec3 t1 = e.cross(n).normalized();
    return {t1, n.cross(t1), n, p_body};
}

ContactGrasp grasp_from_frame(const ContactFrame& f) {
    ContactGrasp G;
    G.col(0) << f.t1, f.p.cross(f.t1);
    G.col(1) << f.t2, f.p.cross(f.t2);
    G.col(2) << f.n, f.p.cross(f.n);
    return G;
}

ContactGrasp build_grasp_map(const ContactPoint& contact, const Pose& q) {
    return grasp_from_frame(
        make_contact_frame(q.inverse_transform_point(contact.position), q.inverse_transform_vector(contact.normal)));
}

GraspMap build_grasp_map(const std::vector<ContactPoint>& contacts, const Pose& q) {
    GraspMap g;
    g.reserve(contacts.size());
    for (const auto& c : contacts) g.push_back(build_grasp_map(c, q));
    return g;
}

std::vector<CsMode> enumerate_cs_modes(const GraspMap& grasp, const EnumerationOptions& options) {
    const std::size_t n = grasp.size();
    if (static_cast<int>(n) > options.max_contacts)
        throw TooManyContacts(std::to_string(n) + " contacts exceed the enumeration cap of " +
                              std::to_string(options.max_contacts) + "; reduce the contact set");
    std::vector<CsMode> out;
    CsMode prefix;
    LinearSystem base = LinearSystem::with_columns(6);

    // depth-first, Maintain before Separate; an infeasible prefix prunes its subtree
    auto recurse = [&](auto&& self, const LinearSystem& sys) -> void {
        const std::size_t k = prefix.size();
        if (k == n) {
            out.push_back(prefix);
            return;
        }
        for (auto s : {ContactState::Maintain, ContactState::Separate}) {
            LinearSystem next = sys;
            add_normal_row(next, grasp[k], s, options.sigma);
            if (!is_feasible(next)) continue;
            prefix.push_back(s);
            self(self, next);
            prefix.pop_back();
        }
    };
    recurse(recurse, base);
    return out;
}

std::vector<ContactMode> enumerate_ss_modes(const CsMode& cs, const GraspMap& grasp, const TangentBasis& basis,
                                            const EnumerationOptions& options) {
    if (cs.size() != grasp.size()) throw InvalidInput("enumerate_ss_modes: mode and contact counts differ");
    LinearSystem base = LinearSystem::with_columns(6);
    std::vector<std::size_t> maintained;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        add_normal_row(base, grasp[i], cs[i], options.sigma);
        if (cs[i] == ContactState::Maintain) maintained.push_back(i);
    }
    std::vector<ContactMode> out;
    if (!is_feasible(base)) return out;

    ContactMode current = ContactMode::all_sticking(cs, basis.n_t);
    const std::size_t slots = maintained.size() * static_cast<std::size_t>(basis.n_t);

    auto recurse = [&](auto&& self, const LinearSystem& sys, std::size_t slot) -> void {
        if (slot == slots) {
            out.push_back(current);
            return;
        }
        const std::size_t ci = maintained[slot / basis.n_t];
        const int j = static_cast<int>(slot % basis.n_t);
        const RowVectorXd row = tangent_row(grasp[ci], basis.directions[j]);
        for (int sign : {0, 1, -1}) {
            LinearSystem next = sys;
            add_sign_row(next, row, sign, options.sigma);
            if (!is_feasible(next)) continue;
            current.ss[ci][j] = sign;
            self(self, next, slot + 1);
        }
        current.ss[ci][j] = 0;
    };
    recurse(recurse, base, 0);

    if (options.max_ss_modes > 0 && out.size() > static_cast<std::size_t>(options.max_ss_modes)) {
        // the all-sticking mode is first in encoding order
        std::vector<std::size_t> rest(out.size() - 1);
        std::iota(rest.begin(), rest.end(), 1);
        std::mt19937_64 rng(options.seed);
        std::shuffle(rest.begin(), rest.end(), rng);
        rest.resize(static_cast<std::size_t>(options.max_ss_modes) - 1);
        std::sort(rest.begin(), rest.end());
        std::vector<ContactMode> kept{out.front()};
        for (auto i : rest) kept.push_back(out[i]);
        out = std::move(kept);
    }
    return out;
}

std::vector<Eigen::Vector2d> sliding_cone_edges(const std::vector<int>& ss, const TangentBasis& basis) {
    if (static_cast<int>(ss.size()) != basis.n_t) throw InvalidInput("sliding_cone_edges: sign vector size");
    if (std::all_of(ss.begin(), ss.end(), [](int s) { return s == 0; }))
        throw InvalidInput("sliding_cone_edges: sticking sign vector has no sliding cone");
    constexpr double eps = 1e-12;
    auto consistent = [&](const Eigen::Vector2d& r, bool strict) {
        for (int j = 0; j < basis.n_t; ++j) {
            const double c = basis.directions[j].dot(r);
            if (ss[j] == 0 && std::abs(c) > eps) return false;
            if (ss[j] > 0 && (strict ? c <= eps : c < -eps)) return false;
            if (ss[j] < 0 && (strict ? c >= -eps : c > eps)) return false;
        }
        return true;
    };
    std::vector<Eigen::Vector2d> rays;
    for (const auto& c : basis.directions) {
        const Eigen::Vector2d perp(-c.y(), c.x());
        for (const Eigen::Vector2d& r : {perp, Eigen::Vector2d(-perp)}) {
            if (!consistent(r, false)) continue;
            if (std::none_of(rays.begin(), rays.end(), [&](const auto& q) { return (q - r).norm() < 1e-9; }))
                rays.push_back(r);
        }
    }
    const bool has_zero = std::any_of(ss.begin(), ss.end(), [](int s) { return s == 0; });
    std::vector<Eigen::Vector2d> edges;
    if (has_zero) {
        for (const auto& r : rays) {
            if (consistent(r, true)) edges.push_back(r);
        }
        if (edges.size() != 1) throw InvalidInput("sliding_cone_edges: sign vector selects an empty cone");
    } else {
        if (rays.size() != 2 || !consistent((rays[0] + rays[1]).normalized(), true))
            throw InvalidInput("sliding_cone_edges: sign vector selects an empty cone");
        edges = rays;
    }
    std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
        auto ang = [](const Eigen::Vector2d& v) {
            const double t = std::atan2(v.y(), v.x());
            return t < -1e-12 ? t + 2.0 * M_PI : t;
        };
        return ang(a) < ang(b);
    });
    return edges;
}

LinearSystem mode_velocity_constraints(const ContactMode& mode, const GraspMap& grasp,
                                       const std::vector<FingerContact>& fingers, const TangentBasis& basis,
                                       Index dof, double sigma) {
    if (mode.size() != grasp.size()) throw InvalidInput("mode_velocity_constraints: mode and contact counts differ");
    const Index cols = 6 + dof;
    LinearSystem sys = LinearSystem::with_columns(cols);
    for (std::size_t i = 0; i < grasp.size(); ++i) {
        RowVectorXd row = RowVectorXd::Zero(cols);
        row.head<6>() = grasp[i].col(2).transpose();
        if (!mode.maintains(i)) {
            sys.add_ineq(row, sigma);
            continue;
        }
        sys.add_eq(row, 0.0);
        for (int j = 0; j < basis.n_t; ++j) {
            row.setZero();
            row.head<6>() = tangent_row(grasp[i], basis.directions[j]);
            const int s = mode.ss[i][static_cast<std::size_t>(j)];
            add_sign_row(sys, row, s, sigma);
        }
    }
    for (const auto& f : fingers) {
        if (f.jacobian.rows() != 3 || f.jacobian.cols() != dof)
            throw InvalidInput("mode_velocity_constraints: finger Jacobian must be 3 x dof");
        for (int k = 0; k < 3; ++k) {
            RowVectorXd row(cols);
            row.head<6>() = f.grasp.col(k).transpose();
            row.tail(dof) = -f.jacobian.row(k);
            sys.add_eq(row, 0.0);
        }
    }
    return sys;
}

ForceBlock mode_force_constraints(const ContactMode& mode, const GraspMap& grasp,
                                  const std::vector<FingerContact>& fingers, double mu_env, double mu_mnp,
                                  const TangentBasis& basis) {
    if (mode.size() != grasp.size()) throw InvalidInput("mode_force_constraints: mode and contact counts differ");

    struct Column {
        Vec6 wrench;
        int owner;
    };
    std::vector<Column> columns;
    // rows are collected as (lambda index, coefficient) lists, sized once all columns are known
    struct Row {
        std::vector<std::pair<std::size_t, double>> terms;
        bool equality;
    };
    std::vector<Row> rows;

    auto add_sticking = [&](const ContactGrasp& G, double mu, int owner) {
        const std::size_t base = columns.size();
        for (int k = 0; k < 3; ++k) columns.push_back({G.col(k), owner});
        rows.push_back({{{base + 2, 1.0}}, false});
        for (const auto& c : basis.directions) {
            rows.push_back({{{base, c.x()}, {base + 1, c.y()}, {base + 2, mu}}, false});
            rows.push_back({{{base, -c.x()}, {base + 1, -c.y()}, {base + 2, mu}}, false});
        }
    };

    for (std::size_t i = 0; i < grasp.size(); ++i) {
        if (!mode.maintains(i)) continue;
        const int owner = static_cast<int>(i);
        if (mode.sticking(i)) {
            add_sticking(grasp[i], mu_env, owner);
            continue;
        }
        const auto edges = sliding_cone_edges(mode.ss[i], basis);
        const std::size_t base = columns.size();
        columns.push_back({grasp[i].col(2), owner});
        rows.push_back({{{base, 1.0}}, false});
        Row coulomb{{{base, mu_env}}, true};
        for (const auto& h : edges) {
            const Vec6 w = -(h.x() * grasp[i].col(0) + h.y() * grasp[i].col(1));
            const std::size_t idx = columns.size();
            columns.push_back({w, owner});
            rows.push_back({{{idx, 1.0}}, false});
            coulomb.terms.emplace_back(idx, -1.0);
        }
        rows.push_back(coulomb);
    }
    for (std::size_t f = 0; f < fingers.size(); ++f) {
        add_sticking(fingers[f].grasp, mu_mnp, static_cast<int>(grasp.size() + f));
    }

    ForceBlock block;
    const Index n = static_cast<Index>(columns.size());
    block.rows = LinearSystem::with_columns(n);
    block.wrench.resize(6, n);
    for (Index k = 0; k < n; ++k) {
        block.wrench.col(k) = columns[static_cast<std::size_t>(k)].wrench;
        block.owner.push_back(columns[static_cast<std::size_t>(k)].owner);
    }
    for (const auto& r : rows) {
        RowVectorXd row = RowVectorXd::Zero(n);
        for (const auto& [idx, coef] : r.terms) row[static_cast<Index>(idx)] += coef;
        if (r.equality) {
            block.rows.add_eq(row, 0.0);
        } else {
            block.rows.add_ineq(row, 0.0);
        }
    }
    return block;
}

}  // namespace modeplan
