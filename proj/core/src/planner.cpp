#include "modeplan/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include "modeplan/errors.hpp"

#ifndef MODEPLAN_VERSION
#define MODEPLAN_VERSION "0.0.0"
#endif

namespace modeplan {

using Eigen::VectorXd;

namespace {

using PairKey = std::pair<int, int>;

PairKey key(const ContactPoint& c) { return {c.primitive, c.vertex}; }

std::optional<StepSolution> solve_step(const Twist& v_des, const AssembledSystem& sys, double w_a, double eps) {
    try {
        return solve_best_velocity(v_des, sys, w_a, eps);
    } catch (const SolverIterationLimit&) {
        return std::nullopt;
    }
}

/// Mode restricted to `next` contacts; nullopt if a maintained pair is missing.
ContactMode restrict_mode(const ContactMode& mode, const std::vector<ContactPoint>& from,
                          const std::vector<ContactPoint>& to) {
    std::map<PairKey, std::size_t> index;
    for (std::size_t i = 0; i < from.size(); ++i) index[key(from[i])] = i;
    ContactMode out;
    for (const auto& c : to) {
        const auto it = index.find(key(c));
        if (it == index.end()) continue;
        out.cs.push_back(mode.cs[it->second]);
        out.ss.push_back(mode.ss[it->second]);
    }
    return out;
}

struct CorrectionOutcome {
    Pose q;
    Twist twist;
    std::vector<ContactPoint> contacts;
};

/// Drift correction at q on maintained, newly touching and penetrating contacts.
std::optional<CorrectionOutcome> correct(const PlanningContext& ctx, const Pose& q,
                                         const std::vector<ContactPoint>& contacts,
                                         const std::vector<ContactPoint>& reference, const ContactMode& mode) {
    std::map<PairKey, std::size_t> index;
    for (std::size_t i = 0; i < reference.size(); ++i) index[key(reference[i])] = i;
    std::vector<ContactPoint> active;
    for (const auto& c : contacts) {
        const auto it = index.find(key(c));
        const bool maintained = it != index.end() && mode.maintains(it->second);
        const bool fresh = it == index.end();
        if (maintained || fresh || c.signed_distance < 0.0) active.push_back(c);
    }
    if (active.empty()) return CorrectionOutcome{q, Twist::zero(), contacts};
    const Twist v_cor = correction_velocity(build_grasp_map(active, q), signed_distances(active), ctx.config().eps_cor);
    // v_cor moves contacts outward by d; stepping along -v_cor closes the gap
    const Twist applied = -v_cor;
    if (applied.linear.norm() > 0.01 || applied.angular.norm() > 0.1) return std::nullopt;
    CorrectionOutcome out;
    out.q = apply_twist(q, applied, 1.0);
    out.twist = applied;
    try {
        out.contacts = detect_contacts(ctx.task.object, out.q, ctx.task.environment, ctx.config().d_contact);
    } catch (const DeepPenetration&) {
        return std::nullopt;
    }
    return out;
}

bool has_pair(const std::vector<ContactPoint>& contacts, const PairKey& k) {
    return std::any_of(contacts.begin(), contacts.end(), [&](const ContactPoint& c) { return key(c) == k; });
}

double weighted_norm(const Twist& t, double w_a) { return std::sqrt(weighted_norm_sq(t, w_a)); }

}  // namespace

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::Reached: return "reached";
        case StopReason::Infeasible: return "infeasible";
        case StopReason::NoMotion: return "no_motion";
        case StopReason::NoProgress: return "no_progress";
        case StopReason::NewContact: return "new_contact";
        case StopReason::ContactLost: return "contact_lost";
        case StopReason::DeepPenetration: return "deep_penetration";
        case StopReason::Kinematics: return "kinematics";
        case StopReason::Collision: return "collision";
        case StopReason::TravelCap: return "travel_cap";
        case StopReason::StepLimit: return "step_limit";
    }
    return "unknown";
}

PlanningContext::PlanningContext(Task t) : task(std::move(t)) {
    validate(task);
    const auto& m = task.manipulator;
    model = std::make_shared<FreeBallFingers>(m.n_fingers, m.radius, m.workspace);
    hull = convex_hull_faces(task.object.vertices);
    if (m.n_fingers > 0)
        sites = sample_finger_sites(task.object, task.planner.finger_site_count, task.planner.finger_site_seed);
    basis = TangentBasis::make(task.planner.n_t);
    friction = {task.object.mu_env, task.object.mu_mnp};
    inertia = spatial_inertia(task.object);
    for (const auto& v : task.object.vertices) vertex_radius = std::max(vertex_radius, v.norm());
}

DynamicsSpec PlanningContext::quasistatic_at(const Pose& q) const {
    DynamicsSpec d;
    d.model = Quasistatic{};
    d.external_wrench = gravity_wrench(task.object, q, task.gravity);
    return d;
}

DynamicsSpec PlanningContext::dynamics_at(const Pose& q) const {
    DynamicsSpec d = quasistatic_at(q);
    if (task.planner.dynamics == DynamicsKind::Quasidynamic) d.model = Quasidynamic{inertia, task.planner.h};
    return d;
}

EnumerationOptions PlanningContext::enumeration() const {
    EnumerationOptions o;
    o.max_contacts = task.planner.max_contacts;
    o.max_ss_modes = task.planner.max_ss_modes;
    o.seed = task.planner.rng_seed;
    return o;
}

VectorXd PlanningContext::parked() const {
    const auto q = model->inverse_kinematics(no_fingers(), Pose::identity());
    if (!q) throw InvalidInput("manipulator: parked configuration outside the workspace");
    return *q;
}

Quat random_orientation(Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double u1 = u(rng), u2 = u(rng), u3 = u(rng);
    const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
    return Quat(b * std::cos(2.0 * M_PI * u3), a * std::sin(2.0 * M_PI * u2), a * std::cos(2.0 * M_PI * u2),
                b * std::sin(2.0 * M_PI * u3));
}

Pose sample_object_config(const GoalRegion& goal, const SamplingBounds& bounds, double p, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (!(u(rng) < p)) return goal.center;
    Vec3 pos;
    for (int k = 0; k < 3; ++k) pos[k] = bounds.min[k] + u(rng) * (bounds.max[k] - bounds.min[k]);
    return {pos, random_orientation(rng)};
}

int nearest_neighbor(const std::vector<TreeNode>& tree, const Pose& q_rand, double w_r) {
    if (tree.empty()) throw InvalidInput("nearest_neighbor: empty tree");
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tree.size(); ++i) {
        const double d = pose_distance(tree[i].q, q_rand, w_r);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

Twist step_velocity_target(const PlanningContext& ctx, const Pose& q, const Pose& q_rand) {
    const auto& cfg = ctx.config();
    const Twist xi = desired_twist(q, q_rand);
    const double lin = xi.linear.norm(), ang = xi.angular.norm();
    double f = 1.0;
    if (lin > 0.0) f = std::min(f, 0.1 * cfg.extend_cap_trans / lin);
    if (ang > 0.0) f = std::min(f, 0.1 * cfg.extend_cap_rot / ang);
    const double sweep = lin + ang * ctx.vertex_radius;
    if (sweep > 0.0) f = std::min(f, cfg.step_displacement / sweep);
    return xi * (f / cfg.h);
}

std::optional<SsChoice> best_ss_mode(const PlanningContext& ctx, const Pose& q_near, const Pose& q_rand,
                                     const GraspMap& grasp, const std::vector<ContactMode>& candidates) {
    const auto& cfg = ctx.config();
    const Twist v_des = step_velocity_target(ctx, q_near, q_rand);
    SystemLayout layout;
    const QuadraticProgram objective = velocity_objective(v_des, layout, cfg.w_a, cfg.eps);
    std::optional<SsChoice> best;
    for (const auto& m : candidates) {
        const LinearSystem rows = mode_velocity_constraints(m, grasp, {}, ctx.basis, 0, 0.0);
        QuadraticProgram qp = objective;
        qp.A_eq = rows.A_eq;
        qp.b_eq = rows.b_eq;
        qp.A_ineq = rows.A_ineq;
        qp.b_ineq = rows.b_ineq;
        QpSolution sol;
        try {
            sol = solve_qp(qp);
        } catch (const SolverIterationLimit&) {
            continue;
        }
        if (!sol.optimal()) continue;
        const Twist v = Twist::from_vector(sol.x.head<6>());
        const Twist err{v_des.linear - v.linear, v_des.angular - v.angular};
        const double cost = weighted_norm_sq(err, cfg.w_a);
        if (!best || cost < best->cost - 1e-12 * (1.0 + best->cost)) best = SsChoice{m, cost};
    }
    return best;
}

std::string finger_mode_string(const FingerAssignment& fingers, int n_t) {
    std::string s;
    for (const auto& f : fingers) s += f ? "M" + std::string(static_cast<std::size_t>(n_t), '0') : "S";
    return s;
}

IntegrationResult project_integrate(const PlanningContext& ctx, const Pose& q_near, const Pose& q_rand,
                                    const VectorXd& q_mnp, const FingerAssignment& fingers, const ContactMode& mode,
                                    const std::vector<ContactPoint>& contacts, int max_steps) {
    const auto& cfg = ctx.config();
    const ManipulatorModel& model = *ctx.model;
    const std::string finger_part = finger_mode_string(fingers, cfg.n_t);

    IntegrationResult r;
    r.q_new = q_near;
    r.q_mnp = q_mnp;
    Pose q = q_near;
    VectorXd qm = q_mnp;
    std::vector<ContactPoint> cur_contacts = contacts;
    ContactMode cur = mode;
    bool corrected_last = true;

    // Validates a candidate next state and returns its manipulator configuration.
    auto admissible = [&](const Pose& q_next, StopReason& why) -> std::optional<VectorXd> {
        const auto qm_next = model.inverse_kinematics(fingers, q_next);
        if (!qm_next) {
            why = StopReason::Kinematics;
            return std::nullopt;
        }
        if (model.collides(*qm_next, fingers, q_next, ctx.scene())) {
            why = StopReason::Collision;
            return std::nullopt;
        }
        return qm_next;
    };

    for (int k = 0;; ++k) {
        if (k >= max_steps) {
            r.reason = StopReason::StepLimit;
            break;
        }
        const Twist xi = desired_twist(q, q_rand);
        if (weighted_norm(xi, cfg.w_a) <= 1e-4) {
            r.reason = StopReason::Reached;
            break;
        }
        const Twist v_des = step_velocity_target(ctx, q, q_rand);
        const GraspMap grasp = build_grasp_map(cur_contacts, q);
        const auto fcs = finger_contacts(model, qm, fingers, q);
        const AssembledSystem sys =
            assemble(cur, grasp, fcs, ctx.dynamics_at(q), ctx.basis, ctx.friction, model.dof());
        const auto sol = solve_step(v_des, sys, cfg.w_a, cfg.eps);
        if (!sol) {
            r.reason = StopReason::Infeasible;
            break;
        }
        const Twist v = sol->v_o;
        if (weighted_norm(v * cfg.h, cfg.w_a) <= 1e-7) {
            r.reason = StopReason::NoMotion;
            break;
        }
        Pose q_next = apply_twist(q, v, cfg.h);
        std::vector<ContactPoint> next;
        try {
            next = detect_contacts(ctx.task.object, q_next, ctx.task.environment, cfg.d_contact);
        } catch (const DeepPenetration&) {
            r.reason = StopReason::DeepPenetration;
            break;
        }
        bool lost = false;
        for (std::size_t i = 0; i < cur_contacts.size(); ++i)
            if (cur.maintains(i) && !has_pair(next, key(cur_contacts[i]))) lost = true;
        if (lost) {
            r.reason = StopReason::ContactLost;
            break;
        }
        bool fresh = false;
        bool deep = false;
        for (const auto& c : next) {
            if (!has_pair(cur_contacts, key(c))) fresh = true;
            if (c.signed_distance < -0.5 * cfg.d_contact) deep = true;
        }
        Twist cor = Twist::zero();
        if (fresh || deep || (k + 1) % cfg.cor_every == 0) {
            const auto c = correct(ctx, q_next, next, cur_contacts, cur);
            if (!c) {
                r.reason = StopReason::DeepPenetration;
                break;
            }
            q_next = c->q;
            cor = c->twist;
            next = c->contacts;
            bool lost_after = false;
            for (std::size_t i = 0; i < cur_contacts.size(); ++i)
                if (cur.maintains(i) && !has_pair(next, key(cur_contacts[i]))) lost_after = true;
            if (lost_after) {
                r.reason = StopReason::ContactLost;
                break;
            }
            for (const auto& ct : next)
                if (!has_pair(cur_contacts, key(ct))) fresh = true;
        }
        // a step must shrink the distance to q_rand by a fraction of its nominal length
        const double gain = pose_distance(q, q_rand, cfg.w_r) - pose_distance(q_next, q_rand, cfg.w_r);
        const double nominal = v_des.linear.norm() * cfg.h + cfg.w_r * v_des.angular.norm() * cfg.h;
        if (gain < std::max(1e-6, 0.01 * nominal) && !(fresh && gain >= -1e-6)) {
            r.reason = StopReason::NoProgress;
            break;
        }
        StopReason why{};
        const auto qm_next = admissible(q_next, why);
        if (!qm_next) {
            r.reason = why;
            break;
        }

        r.steps.push_back(EdgeStep{q, qm, cur_contacts, cur.encode() + finger_part, v, cor});
        corrected_last = cor.to_vector().squaredNorm() > 0.0;
        cur = restrict_mode(cur, cur_contacts, next);
        q = q_next;
        qm = *qm_next;
        cur_contacts = next;
        if (fresh) {
            r.reason = StopReason::NewContact;
            break;
        }
        if (pose_distance(q, q_near, 0.0) >= cfg.extend_cap_trans ||
            rotation_angle(q.orientation(), q_near.orientation()) >= cfg.extend_cap_rot) {
            r.reason = StopReason::TravelCap;
            break;
        }
    }

    // closing correction on the final state when the last step had none
    if (!r.steps.empty() && !corrected_last) {
        const auto c = correct(ctx, q, cur_contacts, cur_contacts, cur);
        bool ok = c.has_value();
        if (ok) {
            for (std::size_t i = 0; i < cur_contacts.size(); ++i)
                if (cur.maintains(i) && !has_pair(c->contacts, key(cur_contacts[i]))) ok = false;
            for (const auto& ct : c->contacts)
                if (!has_pair(cur_contacts, key(ct))) ok = false;
            const Pose& prev = r.steps.back().q;
            ok = ok && pose_distance(c->q, q_rand, cfg.w_r) <= pose_distance(prev, q_rand, cfg.w_r) + 1e-6;
        }
        if (ok) {
            StopReason why{};
            const auto qm_c = admissible(c->q, why);
            if (qm_c) {
                r.steps.back().correction = c->twist;
                q = c->q;
                qm = *qm_c;
            }
        }
    }
    r.q_new = q;
    r.q_mnp = qm;
    return r;
}

bool motion_feasible(const PlanningContext& ctx, const Pose& q_near, const Pose& q_rand, const VectorXd& q_mnp,
                     const FingerAssignment& fingers, const ContactMode& mode,
                     const std::vector<ContactPoint>& contacts) {
    return !project_integrate(ctx, q_near, q_rand, q_mnp, fingers, mode, contacts, 1).steps.empty();
}

bool balanced_at_rest(const PlanningContext& ctx, const Pose& q, const std::vector<ContactPoint>& contacts,
                      const VectorXd& q_mnp, const FingerAssignment& fingers) {
    CsMode cs(contacts.size(), ContactState::Maintain);
    const ContactMode sticking = ContactMode::all_sticking(cs, ctx.config().n_t);
    const auto fcs = finger_contacts(*ctx.model, q_mnp, fingers, q);
    return check_force_feasibility(sticking, build_grasp_map(contacts, q), fcs, ctx.quasistatic_at(q), ctx.basis,
                                   ctx.friction, std::nullopt);
}

std::optional<Relocation> relocate_manipulator(const PlanningContext& ctx, const Pose& q_near, const Pose& q_rand,
                                               const std::optional<VectorXd>& q_mnp, const FingerAssignment& fingers,
                                               const ContactMode& mode, const std::vector<ContactPoint>& contacts,
                                               Rng& rng) {
    const auto& cfg = ctx.config();
    const ManipulatorModel& model = *ctx.model;
    const int n = model.max_fingers();
    if (n == 0 || ctx.sites.empty()) return std::nullopt;
    const VectorXd from = q_mnp.value_or(ctx.parked());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, ctx.sites.size() - 1);

    for (int attempt = 0; attempt < cfg.relocate_attempts; ++attempt) {
        std::vector<int> chosen;
        while (chosen.empty())
            for (int i = 0; i < n; ++i)
                if (n == 1 || u(rng) < 0.5) chosen.push_back(i);
        FingerAssignment next = fingers;
        for (int i : chosen) {
            if (u(rng) < cfg.release_prob)
                next[static_cast<std::size_t>(i)].reset();
            else
                next[static_cast<std::size_t>(i)] = ctx.sites[pick(rng)];
        }
        if (q_mnp && next == fingers) continue;
        bool distinct = true;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j)
                if (next[static_cast<std::size_t>(i)] && next[static_cast<std::size_t>(i)] == next[static_cast<std::size_t>(j)])
                    distinct = false;
        if (!distinct) continue;
        const auto to = model.inverse_kinematics(next, q_near);
        if (!to) continue;
        if (model.collides(*to, next, q_near, ctx.scene())) continue;
        if (!model.relocation_path_exists(from, fingers, *to, next, q_near, ctx.scene())) continue;
        if (cfg.dynamics == DynamicsKind::Quasistatic && !balanced_at_rest(ctx, q_near, contacts, *to, next)) continue;
        if (!motion_feasible(ctx, q_near, q_rand, *to, next, mode, contacts)) continue;
        return Relocation{next, *to};
    }
    return std::nullopt;
}

std::vector<int> extend(const PlanningContext& ctx, std::vector<TreeNode>& tree, int near, const CsMode& cs,
                        const Pose& q_rand, const std::vector<ContactPoint>& contacts, const GraspMap& grasp,
                        Rng& rng) {
    const auto& cfg = ctx.config();
    std::vector<int> added;
    const auto candidates = enumerate_ss_modes(cs, grasp, ctx.basis, ctx.enumeration());
    const Pose q_near = tree[static_cast<std::size_t>(near)].q;
    const auto choice = best_ss_mode(ctx, q_near, q_rand, grasp, candidates);
    if (!choice) return added;

    std::vector<ContactMode> modes{choice->mode};
    const ContactMode sticking = ContactMode::all_sticking(cs, cfg.n_t);
    if (!(choice->mode == sticking) && std::find(candidates.begin(), candidates.end(), sticking) != candidates.end())
        modes.push_back(sticking);

    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& m : modes) {
        const TreeNode& parent = tree[static_cast<std::size_t>(near)];
        FingerAssignment fingers = parent.fingers;
        VectorXd qm = parent.q_mnp.value_or(ctx.parked());
        bool relocate = !parent.q_mnp.has_value() || u(rng) < cfg.relocate_prob;
        if (!relocate) relocate = !motion_feasible(ctx, q_near, q_rand, qm, fingers, m, contacts);
        if (relocate) {
            const auto moved = relocate_manipulator(ctx, q_near, q_rand, parent.q_mnp, fingers, m, contacts, rng);
            if (!moved) continue;
            fingers = moved->fingers;
            qm = moved->q_mnp;
        }
        IntegrationResult res = project_integrate(ctx, q_near, q_rand, qm, fingers, m, contacts);
        if (res.steps.empty()) continue;
        TreeNode node;
        node.id = static_cast<int>(tree.size());
        node.q = res.q_new;
        node.q_mnp = res.q_mnp;
        node.fingers = std::move(fingers);
        node.parent = near;
        node.incoming_mode = m;
        node.relocated = relocate;
        node.edge = std::move(res.steps);
        tree.push_back(std::move(node));
        added.push_back(tree.back().id);
    }
    return added;
}

Trajectory extract_path(const PlanningContext& ctx, const std::vector<TreeNode>& tree, int goal) {
    const auto& cfg = ctx.config();
    std::vector<int> path;
    for (int id = goal; id >= 0; id = tree[static_cast<std::size_t>(id)].parent) path.push_back(id);
    std::reverse(path.begin(), path.end());

    auto contacts_at = [&](const Pose& q) {
        return detect_contacts(ctx.task.object, q, ctx.task.environment, cfg.d_contact);
    };

    Trajectory traj;
    traj.planner_version = MODEPLAN_VERSION;
    traj.seed = cfg.rng_seed;
    traj.dynamics = to_string(cfg.dynamics);
    traj.n_t = cfg.n_t;
    traj.h = cfg.h;

    const TreeNode& root = tree[static_cast<std::size_t>(path.front())];
    TrajectoryStep first;
    first.node = root.id;
    first.pose = root.q;
    first.q_mnp = root.q_mnp.value_or(ctx.parked());
    first.env_contacts = contacts_at(root.q);
    first.fingers = root.fingers;
    traj.steps.push_back(std::move(first));

    for (std::size_t p = 1; p < path.size(); ++p) {
        const TreeNode& node = tree[static_cast<std::size_t>(path[p])];
        if (node.relocated) {
            TrajectoryStep& prev = traj.steps.back();
            prev.mode = std::string();
            for (std::size_t i = 0; i < prev.env_contacts.size(); ++i)
                prev.mode += "M" + std::string(static_cast<std::size_t>(cfg.n_t), '0');
            prev.mode += finger_mode_string(node.fingers, cfg.n_t);
            TrajectoryStep s = prev;
            s.node = node.id;
            s.q_mnp = node.edge.front().q_mnp;
            s.fingers = node.fingers;
            s.mode.clear();
            s.relocation = true;
            traj.steps.push_back(std::move(s));
        }
        for (std::size_t j = 0; j < node.edge.size(); ++j) {
            const EdgeStep& e = node.edge[j];
            TrajectoryStep& prev = traj.steps.back();
            prev.mode = e.mode;
            prev.twist = e.v;
            prev.correction = e.correction;
            TrajectoryStep s;
            s.node = node.id;
            s.time = prev.time + cfg.h;
            const bool last = j + 1 == node.edge.size();
            s.pose = last ? node.q : node.edge[j + 1].q;
            s.q_mnp = last ? *node.q_mnp : node.edge[j + 1].q_mnp;
            s.env_contacts = last ? contacts_at(node.q) : node.edge[j + 1].contacts;
            s.fingers = node.fingers;
            traj.steps.push_back(std::move(s));
        }
    }
    for (std::size_t i = 0; i < traj.steps.size(); ++i) traj.steps[i].index = static_cast<int>(i);
    return traj;
}

PlanResult plan(const Task& task) {
    const auto t0 = std::chrono::steady_clock::now();
    const PlanningContext ctx(task);
    const auto& cfg = ctx.config();
    Rng rng(cfg.rng_seed);

    PlanResult result;
    auto& tree = result.tree;
    TreeNode root;
    root.q = task.start;
    root.fingers = ctx.no_fingers();
    if (!task.manipulator.start_fingers.empty()) {
        root.fingers = task.manipulator.start_fingers;
        root.q_mnp = ctx.model->inverse_kinematics(root.fingers, root.q);
        if (!root.q_mnp) throw InvalidInput("start fingers are outside the workspace");
        if (ctx.model->collides(*root.q_mnp, root.fingers, root.q, ctx.scene()))
            throw InvalidInput("start fingers collide");
    }
    try {
        detect_contacts(task.object, task.start, task.environment, cfg.d_contact);
    } catch (const DeepPenetration&) {
        throw InvalidInput("start pose penetrates the environment");
    }
    tree.push_back(std::move(root));

    int goal = in_goal(task.start, task.goal) ? 0 : -1;
    double best = pose_distance(task.start, task.goal.center, cfg.w_r);
    int it = 0;
    for (; goal < 0 && it < cfg.max_iters; ++it) {
        const Pose q_rand = sample_object_config(task.goal, task.sampling, cfg.goal_bias, rng);
        const int near = nearest_neighbor(tree, q_rand, cfg.w_r);
        const Pose q_near = tree[static_cast<std::size_t>(near)].q;
        std::vector<ContactPoint> contacts;
        std::vector<CsMode> cs_modes;
        GraspMap grasp;
        try {
            contacts = detect_contacts(task.object, q_near, task.environment, cfg.d_contact);
            grasp = build_grasp_map(contacts, q_near);
            cs_modes = enumerate_cs_modes(grasp, ctx.enumeration());
        } catch (const DeepPenetration&) {
            continue;
        } catch (const TooManyContacts&) {
            continue;
        }
        for (const auto& cs : cs_modes) {
            for (int id : extend(ctx, tree, near, cs, q_rand, contacts, grasp, rng)) {
                const Pose& q = tree[static_cast<std::size_t>(id)].q;
                best = std::min(best, pose_distance(q, task.goal.center, cfg.w_r));
                if (goal < 0 && in_goal(q, task.goal)) goal = id;
            }
            if (goal >= 0) break;
        }
    }

    result.stats.iterations = it;
    result.stats.nodes_tree = tree.size();
    result.stats.best_distance = best;
    if (goal >= 0) {
        result.success = true;
        result.trajectory = extract_path(ctx, tree, goal);
        std::size_t depth = 0;
        for (int id = goal; id >= 0; id = tree[static_cast<std::size_t>(id)].parent) ++depth;
        result.stats.nodes_solution = depth;
        result.stats.best_distance = pose_distance(tree[static_cast<std::size_t>(goal)].q, task.goal.center, cfg.w_r);
    }
    result.stats.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace modeplan
