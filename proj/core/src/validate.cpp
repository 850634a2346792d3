#include "modeplan/validate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "modeplan/collision.hpp"
#include "modeplan/errors.hpp"
#include "modeplan/qp.hpp"
#include "modeplan/task_io.hpp"

namespace modeplan {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

namespace {

struct Failure {
    std::string check;
    std::string detail;
};

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(6);
    s << x;
    return s.str();
}

/// Exact signed distance from a world point to one primitive.
double primitive_distance(const Primitive& prim, const Vec3& p) {
    if (const auto* hs = std::get_if<HalfSpace>(&prim)) return hs->normal.dot(p) - hs->offset;
    const auto& box = std::get<Box>(prim);
    const Vec3 local = box.pose.inverse_transform_point(p);
    const Vec3 d = local.cwiseAbs() - box.half_extents;
    const double outside = d.cwiseMax(0.0).norm();
    return outside > 0.0 ? outside : d.maxCoeff();
}

double scene_distance(const EnvironmentBody& env, const Vec3& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& prim : env.primitives) best = std::min(best, primitive_distance(prim, p));
    return best;
}

struct ParsedEntry {
    bool maintain = false;
    std::vector<int> signs;
};

std::optional<std::vector<ParsedEntry>> parse_mode(const std::string& s, int n_t) {
    std::vector<ParsedEntry> out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == 'S') {
            out.push_back({false, {}});
            ++i;
        } else if (s[i] == 'M') {
            if (i + 1 + static_cast<std::size_t>(n_t) > s.size()) return std::nullopt;
            ParsedEntry e{true, {}};
            for (int j = 0; j < n_t; ++j) {
                const char c = s[i + 1 + static_cast<std::size_t>(j)];
                if (c == '0') e.signs.push_back(0);
                else if (c == '+') e.signs.push_back(1);
                else if (c == '-') e.signs.push_back(-1);
                else return std::nullopt;
            }
            out.push_back(std::move(e));
            i += 1 + static_cast<std::size_t>(n_t);
        } else {
            return std::nullopt;
        }
    }
    return out;
}

/// Unit directions of the tangent partition lines.
std::vector<Eigen::Vector2d> partition(int n_t) {
    std::vector<Eigen::Vector2d> c;
    for (int j = 0; j < n_t; ++j) {
        const double a = M_PI * j / n_t;
        c.emplace_back(std::cos(a), std::sin(a));
    }
    if (n_t == 2) c[1] = Eigen::Vector2d(0.0, 1.0);
    return c;
}

/// Extreme rays of {u : s_j c_j.u >= 0, c_j.u = 0 where s_j = 0}, found by
/// testing every unit vector orthogonal to some partition line.
std::vector<Eigen::Vector2d> cone_rays(const std::vector<int>& signs, const std::vector<Eigen::Vector2d>& c) {
    auto inside = [&](const Eigen::Vector2d& u) {
        for (std::size_t j = 0; j < c.size(); ++j) {
            const double x = c[j].dot(u);
            if (signs[j] == 0 ? std::abs(x) > 1e-12 : signs[j] * x < -1e-12) return false;
        }
        return true;
    };
    std::vector<Eigen::Vector2d> rays;
    for (const auto& cj : c) {
        for (double s : {1.0, -1.0}) {
            const Eigen::Vector2d u = s * Eigen::Vector2d(-cj.y(), cj.x());
            if (!inside(u)) continue;
            bool dup = false;
            for (const auto& r : rays) dup = dup || (r - u).norm() < 1e-9;
            if (!dup) rays.push_back(u);
        }
    }
    // an open sector is spanned by its two boundary rays; keep the pair with the widest angle
    if (rays.size() > 2) {
        double widest = -2.0;
        std::pair<std::size_t, std::size_t> pick{0, 1};
        for (std::size_t a = 0; a < rays.size(); ++a)
            for (std::size_t b = a + 1; b < rays.size(); ++b)
                if (-rays[a].dot(rays[b]) > widest) {
                    widest = -rays[a].dot(rays[b]);
                    pick = {a, b};
                }
        rays = {rays[pick.first], rays[pick.second]};
    }
    return rays;
}

/// A contact expressed in body coordinates with its own tangent frame.
struct BodyContact {
    Vec3 p;
    Vec3 n;  // into the object
    Vec3 t1;
    Vec3 t2;
};

BodyContact body_contact(const Vec3& p_body, const Vec3& n_body) {
    BodyContact c{p_body, n_body.normalized(), Vec3::Zero(), Vec3::Zero()};
    for (int k = 0; k < 3; ++k) {
        const Vec3 e = Vec3::Unit(k);
        if (std::abs(e.dot(c.n)) < 0.9) {
            c.t1 = e.cross(c.n).normalized();
            break;
        }
    }
    c.t2 = c.n.cross(c.t1);
    return c;
}

Vec6 wrench_of(const BodyContact& c, const Vec3& f) {
    Vec6 w;
    w << f, c.p.cross(f);
    return w;
}

Vec6 gravity_body(const Task& task, const Pose& q) {
    const Vec3 f = q.orientation().conjugate() * (task.object.mass * task.gravity);
    Vec6 w;
    w << f, task.object.com.cross(f);
    return w;
}

Mat6 inertia_about_origin(const ObjectBody& b) {
    Mat3 C;
    C << 0, -b.com.z(), b.com.y(), b.com.z(), 0, -b.com.x(), -b.com.y(), b.com.x(), 0;
    Mat6 M;
    M << b.mass * Mat3::Identity(), -b.mass * C, b.mass * C, b.inertia - b.mass * C * C;
    return M;
}

/// Rows over x = [v (6) | qdot (dof) | lambda], assembled from a mode string.
struct Rows {
    MatrixXd A_eq, A_ineq;
    VectorXd b_eq, b_ineq;
    Index n_lambda = 0;
};

struct ModeSetup {
    std::vector<BodyContact> env;
    std::vector<ParsedEntry> env_mode;
    std::vector<BodyContact> fingers;
    std::vector<int> finger_index;
};

Rows assemble_rows(const ModeSetup& s, const Task& task, const Pose& q, Index dof, bool include_velocity,
                   bool quasistatic) {
    const auto C = partition(task.planner.n_t);
    const double mu = task.object.mu_env, mu_f = task.object.mu_mnp;
    // force columns: wrench per lambda
    std::vector<Vec6> cols;
    std::vector<std::vector<std::pair<Index, double>>> ineq_lambda;  // sparse rows over lambda, >= 0
    std::vector<std::vector<std::pair<Index, double>>> eq_lambda;    // sparse rows over lambda, = 0

    auto sticking = [&](const BodyContact& c, double mu_c) {
        const Index base = static_cast<Index>(cols.size());
        cols.push_back(wrench_of(c, c.t1));
        cols.push_back(wrench_of(c, c.t2));
        cols.push_back(wrench_of(c, c.n));
        ineq_lambda.push_back({{base + 2, 1.0}});
        for (const auto& cj : C) {
            ineq_lambda.push_back({{base + 2, mu_c}, {base, -cj.x()}, {base + 1, -cj.y()}});
            ineq_lambda.push_back({{base + 2, mu_c}, {base, cj.x()}, {base + 1, cj.y()}});
        }
    };
    for (std::size_t i = 0; i < s.env.size(); ++i) {
        const auto& e = s.env_mode[i];
        if (!e.maintain) continue;
        const bool stick = std::all_of(e.signs.begin(), e.signs.end(), [](int x) { return x == 0; });
        if (stick) {
            sticking(s.env[i], mu);
            continue;
        }
        const Index base = static_cast<Index>(cols.size());
        cols.push_back(wrench_of(s.env[i], s.env[i].n));
        ineq_lambda.push_back({{base, 1.0}});
        std::vector<std::pair<Index, double>> cone{{base, mu}};
        for (const auto& h : cone_rays(e.signs, C)) {
            const Index k = static_cast<Index>(cols.size());
            cols.push_back(wrench_of(s.env[i], -(h.x() * s.env[i].t1 + h.y() * s.env[i].t2)));
            ineq_lambda.push_back({{k, 1.0}});
            cone.push_back({k, -1.0});
        }
        eq_lambda.push_back(cone);
    }
    for (const auto& f : s.fingers) sticking(f, mu_f);

    Rows r;
    r.n_lambda = static_cast<Index>(cols.size());
    const Index n = 6 + dof + r.n_lambda, lo = 6 + dof;
    std::vector<RowVectorXd> eq, in;
    std::vector<double> beq, bin;

    if (include_velocity) {
        const auto C2 = C;
        for (std::size_t i = 0; i < s.env.size(); ++i) {
            const auto& c = s.env[i];
            // contact velocity of the object point: v + w x p, projected on the frame
            auto vel_row = [&](const Vec3& d) {
                RowVectorXd row = RowVectorXd::Zero(n);
                row.head<3>() = d.transpose();
                row.segment<3>(3) = c.p.cross(d).transpose();
                return row;
            };
            const RowVectorXd vn = vel_row(c.n), vt1 = vel_row(c.t1), vt2 = vel_row(c.t2);
            if (!s.env_mode[i].maintain) {
                in.push_back(vn);
                bin.push_back(0.0);
                continue;
            }
            eq.push_back(vn);
            beq.push_back(0.0);
            for (std::size_t j = 0; j < C2.size(); ++j) {
                const RowVectorXd row = C2[j].x() * vt1 + C2[j].y() * vt2;
                const int sg = s.env_mode[i].signs[j];
                if (sg == 0) {
                    eq.push_back(row);
                    beq.push_back(0.0);
                } else {
                    in.push_back(sg * row);
                    bin.push_back(0.0);
                }
            }
        }
        const Mat3 Rt = q.rotation().transpose();
        for (std::size_t k = 0; k < s.fingers.size(); ++k) {
            const auto& c = s.fingers[k];
            const Index qi = 6 + 3 * s.finger_index[k];
            for (int a = 0; a < 3; ++a) {
                const Vec3 d = Vec3::Unit(a);
                RowVectorXd row = RowVectorXd::Zero(n);
                row.head<3>() = d.transpose();
                row.segment<3>(3) = c.p.cross(d).transpose();
                row.segment<3>(qi) = -(Rt.row(a));
                eq.push_back(row);
                beq.push_back(0.0);
            }
        }
    }
    for (const auto& sp : ineq_lambda) {
        RowVectorXd row = RowVectorXd::Zero(n);
        for (const auto& [k, v] : sp) row[lo + k] += v;
        in.push_back(row);
        bin.push_back(0.0);
    }
    for (const auto& sp : eq_lambda) {
        RowVectorXd row = RowVectorXd::Zero(n);
        for (const auto& [k, v] : sp) row[lo + k] += v;
        eq.push_back(row);
        beq.push_back(0.0);
    }
    const Vec6 F = gravity_body(task, q);
    const Mat6 M = inertia_about_origin(task.object);
    for (int a = 0; a < 6; ++a) {
        RowVectorXd row = RowVectorXd::Zero(n);
        for (Index k = 0; k < r.n_lambda; ++k) row[lo + k] = cols[static_cast<std::size_t>(k)][a];
        if (quasistatic) {
            eq.push_back(row);
            beq.push_back(-F[a]);
        } else {
            row *= -1.0;
            row.head<6>() = M.row(a) / task.planner.h;
            eq.push_back(row);
            beq.push_back(F[a]);
        }
    }
    r.A_eq.resize(static_cast<Index>(eq.size()), n);
    r.b_eq.resize(static_cast<Index>(eq.size()));
    for (std::size_t i = 0; i < eq.size(); ++i) {
        r.A_eq.row(static_cast<Index>(i)) = eq[i];
        r.b_eq[static_cast<Index>(i)] = beq[i];
    }
    r.A_ineq.resize(static_cast<Index>(in.size()), n);
    r.b_ineq.resize(static_cast<Index>(in.size()));
    for (std::size_t i = 0; i < in.size(); ++i) {
        r.A_ineq.row(static_cast<Index>(i)) = in[i];
        r.b_ineq[static_cast<Index>(i)] = bin[i];
    }
    return r;
}

class Checker {
public:
    Checker(const Task& task, const Trajectory& traj, const ValidationOptions& opt)
        : task_(task), traj_(traj), opt_(opt), dof_(3 * task.manipulator.n_fingers) {}

    std::optional<Failure> header(std::optional<std::uint64_t> hash) const {
        if (hash && *hash != traj_.task_hash)
            return Failure{"header", "task hash " + format_hash(traj_.task_hash) + " does not match the task file"};
        if (traj_.dynamics != to_string(task_.planner.dynamics)) return Failure{"header", "dynamics variant differs from the task"};
        if (traj_.n_t != task_.planner.n_t) return Failure{"header", "n_t differs from the task"};
        if (std::abs(traj_.h - task_.planner.h) > 0.0) return Failure{"header", "h differs from the task"};
        if (traj_.steps.empty()) return Failure{"header", "trajectory has no steps"};
        return std::nullopt;
    }

    std::optional<Failure> state(const TrajectoryStep& s, ValidationReport& rep) const {
        if (s.q_mnp.size() != dof_) return Failure{"manipulator", "q_mnp has the wrong length"};
        if (static_cast<int>(s.fingers.size()) != task_.manipulator.n_fingers)
            return Failure{"manipulator", "finger_contacts has the wrong length"};
        // penetration over every vertex, exact distances
        double dmin = std::numeric_limits<double>::infinity();
        for (const auto& v : task_.object.vertices)
            dmin = std::min(dmin, scene_distance(task_.environment, s.pose.transform_point(v)));
        rep.min_signed_distance = std::min(rep.min_signed_distance, dmin);
        if (dmin < -(task_.planner.d_contact + opt_.penetration_slack))
            return Failure{"penetration", "vertex signed distance " + fmt(dmin) + " m"};
        // recorded contacts must be the detected ones
        std::vector<ContactPoint> detected;
        try {
            detected = detect_contacts(task_.object, s.pose, task_.environment, task_.planner.d_contact);
        } catch (const DeepPenetration&) {
            return Failure{"penetration", "deep penetration at recorded pose"};
        }
        if (detected.size() != s.env_contacts.size()) return Failure{"contacts", "recorded contact set differs from detection"};
        for (std::size_t i = 0; i < detected.size(); ++i) {
            const auto& a = detected[i];
            const auto& b = s.env_contacts[i];
            if (a.primitive != b.primitive || a.vertex != b.vertex || (a.position - b.position).norm() > 1e-9 ||
                (a.normal - b.normal).norm() > 1e-9 || std::abs(a.signed_distance - b.signed_distance) > 1e-9)
                return Failure{"contacts", "recorded contact " + std::to_string(i) + " differs from detection"};
        }
        const double r = task_.manipulator.radius;
        for (int i = 0; i < task_.manipulator.n_fingers; ++i) {
            const Vec3 c = s.q_mnp.segment<3>(3 * i);
            if (!task_.manipulator.workspace.contains(c, 1e-9))
                return Failure{"manipulator", "finger " + std::to_string(i) + " outside the workspace"};
            const auto& site = s.fingers[static_cast<std::size_t>(i)];
            if (!site) continue;
            const Vec3 n_world = s.pose.orientation() * site->normal;
            const Vec3 tip = c - r * n_world;
            const double drift = (tip - s.pose.transform_point(site->position)).norm();
            rep.max_finger_drift = std::max(rep.max_finger_drift, drift);
            if (drift > opt_.finger_tol)
                return Failure{"finger_sticking", "finger " + std::to_string(i) + " is " + fmt(drift) + " m off its site"};
            if (scene_distance(task_.environment, c) < r - 1e-6)
                return Failure{"finger_collision", "finger " + std::to_string(i) + " penetrates the environment"};
        }
        return std::nullopt;
    }

    ModeSetup setup(const TrajectoryStep& s, const std::vector<ParsedEntry>& env_mode) const {
        ModeSetup m;
        m.env_mode = env_mode;
        for (const auto& c : s.env_contacts)
            m.env.push_back(body_contact(s.pose.inverse_transform_point(c.position),
                                         s.pose.orientation().conjugate() * c.normal));
        for (std::size_t i = 0; i < s.fingers.size(); ++i) {
            if (!s.fingers[i]) continue;
            m.fingers.push_back(body_contact(s.fingers[i]->position, -s.fingers[i]->normal));
            m.finger_index.push_back(static_cast<int>(i));
        }
        return m;
    }

    std::optional<Failure> split_mode(const TrajectoryStep& s, const FingerAssignment& fingers,
                                      std::vector<ParsedEntry>& env_mode) const {
        const auto parsed = parse_mode(s.mode, task_.planner.n_t);
        if (!parsed) return Failure{"mode", "cannot parse mode string '" + s.mode + "'"};
        const std::size_t ne = s.env_contacts.size();
        if (parsed->size() != ne + fingers.size()) return Failure{"mode", "mode string has the wrong number of entries"};
        for (std::size_t i = 0; i < fingers.size(); ++i) {
            const auto& e = (*parsed)[ne + i];
            const bool stick = e.maintain && std::all_of(e.signs.begin(), e.signs.end(), [](int x) { return x == 0; });
            if (fingers[i] ? !stick : e.maintain)
                return Failure{"mode", "finger " + std::to_string(i) + " entry disagrees with its contact"};
        }
        env_mode.assign(parsed->begin(), parsed->begin() + static_cast<long>(ne));
        return std::nullopt;
    }

    std::optional<Failure> relocation(const TrajectoryStep& a, const TrajectoryStep& b) const {
        if (rotation_angle(a.pose.orientation(), b.pose.orientation()) > opt_.pose_tol ||
            (b.pose.position() - a.pose.position()).norm() > opt_.pose_tol)
            return Failure{"relocation", "object moved during a finger relocation"};
        if (a.twist.to_vector().norm() != 0.0 || a.correction.to_vector().norm() != 0.0)
            return Failure{"relocation", "relocation carries a nonzero twist"};
        if (std::abs(b.time - a.time) > 1e-12) return Failure{"relocation", "relocation takes time"};
        std::vector<ParsedEntry> env_mode;
        if (auto f = split_mode(a, b.fingers, env_mode)) return f;
        for (const auto& e : env_mode)
            if (!e.maintain || std::any_of(e.signs.begin(), e.signs.end(), [](int x) { return x != 0; }))
                return Failure{"mode", "relocation mode must hold every environment contact sticking"};
        if (task_.planner.dynamics != DynamicsKind::Quasistatic) return std::nullopt;
        TrajectoryStep view = a;
        view.fingers = b.fingers;
        const Rows r = assemble_rows(setup(view, env_mode), task_, a.pose, 0, false, true);
        const MatrixXd Aeq = r.A_eq.rightCols(r.n_lambda), Ain = r.A_ineq.rightCols(r.n_lambda);
        if (!find_feasible_point(Aeq, r.b_eq, Ain, r.b_ineq).optimal())
            return Failure{"force_balance", "new finger contacts cannot hold the object at rest"};
        return std::nullopt;
    }

    std::optional<Failure> motion(const TrajectoryStep& a, const TrajectoryStep& b, ValidationReport& rep) const {
        if (!(a.fingers == b.fingers)) return Failure{"fingers", "finger contacts change without a relocation record"};
        if (std::abs(b.time - (a.time + traj_.h)) > 1e-9) return Failure{"time", "time step differs from h"};
        if (a.correction.linear.norm() > opt_.max_correction_trans || a.correction.angular.norm() > opt_.max_correction_rot)
            return Failure{"correction", "drift correction exceeds its bound"};
        const Pose expect = apply_twist(apply_twist(a.pose, a.twist, traj_.h), a.correction, 1.0);
        const double dp = (expect.position() - b.pose.position()).norm();
        const double da = rotation_angle(expect.orientation(), b.pose.orientation());
        if (dp > opt_.pose_tol * (1.0 + b.pose.position().norm()) || da > opt_.pose_tol)
            return Failure{"integration", "next pose is not the integrated twist (" + fmt(dp) + " m, " + fmt(da) + " rad)"};

        std::vector<ParsedEntry> env_mode;
        if (auto f = split_mode(a, a.fingers, env_mode)) return f;
        const ModeSetup s = setup(a, env_mode);
        const auto C = partition(task_.planner.n_t);
        const Vec6 v = a.twist.to_vector();
        for (std::size_t i = 0; i < s.env.size(); ++i) {
            const auto& c = s.env[i];
            const Vec3 pv = a.twist.linear + a.twist.angular.cross(c.p);
            const double scale = opt_.residual_tol * (1.0 + v.norm() * (1.0 + c.p.norm()));
            const double vn = c.n.dot(pv);
            const Eigen::Vector2d vt(c.t1.dot(pv), c.t2.dot(pv));
            const std::string who = "environment contact " + std::to_string(i);
            if (!env_mode[i].maintain) {
                if (vn < -scale) return Failure{"separation", who + " approaches at " + fmt(vn) + " m/s"};
                continue;
            }
            if (std::abs(vn) > scale) return Failure{"maintain", who + " normal velocity " + fmt(vn)};
            for (std::size_t j = 0; j < C.size(); ++j) {
                const double x = C[j].dot(vt);
                const int sg = env_mode[i].signs[j];
                if (sg == 0 ? std::abs(x) > scale : sg * x < -scale)
                    return Failure{"sliding_sign", who + " tangent sign " + std::to_string(j) + " violated"};
            }
        }
        // least-squares re-solve: closest admissible twist to the recorded one
        const bool qs = task_.planner.dynamics == DynamicsKind::Quasistatic;
        const Rows r = assemble_rows(s, task_, a.pose, dof_, true, qs);
        QuadraticProgram qp = QuadraticProgram::with_size(r.A_eq.cols());
        qp.hessian.diagonal().setConstant(1e-12);
        qp.hessian.diagonal().head<6>().setConstant(2.0);
        qp.gradient.head<6>() = -2.0 * v;
        qp.A_eq = r.A_eq;
        qp.b_eq = r.b_eq;
        qp.A_ineq = r.A_ineq;
        qp.b_ineq = r.b_ineq;
        QpSolution sol;
        try {
            sol = solve_qp(qp);
        } catch (const SolverIterationLimit&) {
            return Failure{"dynamics", "re-solve did not converge"};
        }
        if (!sol.optimal()) return Failure{qs ? "force_balance" : "dynamics", "no contact forces realize the recorded twist"};
        const double res = (sol.x.head<6>() - v).norm() / (1.0 + v.norm());
        rep.max_dynamics_residual = std::max(rep.max_dynamics_residual, res);
        if (res > opt_.residual_tol) return Failure{qs ? "force_balance" : "dynamics", "twist residual " + fmt(res)};
        return std::nullopt;
    }

private:
    const Task& task_;
    const Trajectory& traj_;
    const ValidationOptions& opt_;
    Index dof_;
};

}  // namespace

ValidationReport validate_trajectory(const Task& task, const Trajectory& traj, std::optional<std::uint64_t> task_hash,
                                     const ValidationOptions& options) {
    ValidationReport rep;
    rep.min_signed_distance = std::numeric_limits<double>::infinity();
    const Checker check(task, traj, options);
    if (auto f = check.header(task_hash)) {
        rep.violations.push_back({0, f->check, f->detail});
        return rep;
    }
    if (std::abs(traj.steps.front().time) > 0.0) rep.violations.push_back({0, "time", "first record must start at 0"});
    for (std::size_t k = 0; k < traj.steps.size(); ++k) {
        const auto& a = traj.steps[k];
        std::optional<Failure> f = check.state(a, rep);
        if (!f && k + 1 < traj.steps.size()) {
            const auto& b = traj.steps[k + 1];
            ++rep.transitions;
            f = b.relocation ? check.relocation(a, b) : check.motion(a, b, rep);
        }
        if (!f && k + 1 == traj.steps.size() && !a.mode.empty())
            f = Failure{"mode", "final record must not carry a mode"};
        if (f) rep.violations.push_back({static_cast<int>(k), f->check, f->detail});
    }
    return rep;
}

}  // namespace modeplan
