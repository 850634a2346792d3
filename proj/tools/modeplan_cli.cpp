// modeplan command-line driver: plan, validate, modes, sites, dump-system.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "modeplan/contact_modes.hpp"
#include "modeplan/errors.hpp"
#include "modeplan/mechanics.hpp"
#include "modeplan/planner.hpp"
#include "modeplan/task_io.hpp"
#include "modeplan/validate.hpp"

namespace {

using namespace modeplan;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kPlanFailed = 2;
constexpr int kInvalid = 3;

struct Loaded {
    Task task;
    std::uint64_t hash = 0;
};

Loaded load(const std::string& path) {
    const std::string text = read_file(path);
    return {parse_task(text), fnv1a64(text)};
}

std::string vec(const Vec3& v) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "(%.6g, %.6g, %.6g)", v.x(), v.y(), v.z());
    return buf;
}

int run_plan(const std::string& path, std::optional<std::uint64_t> seed, std::optional<int> max_iters,
             const std::string& out) {
    Loaded in = load(path);
    if (seed) in.task.planner.rng_seed = *seed;
    if (max_iters) in.task.planner.max_iters = *max_iters;
    const PlanResult r = plan(in.task);
    if (r.success) {
        Trajectory traj = r.trajectory;
        traj.task_hash = in.hash;
        const std::string text = emit_trajectory(traj);
        if (out.empty()) {
            std::cout << text;
        } else {
            std::ofstream f(out, std::ios::binary);
            if (!f) throw ParseError("", "cannot write '" + out + "'");
            f << text;
        }
    } else {
        std::fprintf(stderr, "planning failed: no goal node after %d iterations (tree %zu nodes, best distance %.6g)\n",
                     r.stats.iterations, r.stats.nodes_tree, r.stats.best_distance);
    }
    std::fprintf(stderr, "stats time_s=%.6f nodes_solution=%zu nodes_tree=%zu iterations=%d\n", r.stats.time_s,
                 r.stats.nodes_solution, r.stats.nodes_tree, r.stats.iterations);
    return r.success ? kOk : kPlanFailed;
}

int run_validate(const std::string& task_path, const std::string& traj_path) {
    const Loaded in = load(task_path);
    const Trajectory traj = parse_trajectory(read_file(traj_path));
    const ValidationReport rep = validate_trajectory(in.task, traj, in.hash);
    for (const auto& v : rep.violations) std::printf("step %d: %s: %s\n", v.step, v.check.c_str(), v.detail.c_str());
    std::printf("%s transitions=%d max_dynamics_residual=%.3g min_signed_distance=%.6g max_finger_drift=%.3g\n",
                rep.ok() ? "valid" : "invalid", rep.transitions, rep.max_dynamics_residual, rep.min_signed_distance,
                rep.max_finger_drift);
    return rep.ok() ? kOk : kInvalid;
}

int run_modes(const std::string& path) {
    const Loaded in = load(path);
    const PlanningContext ctx(in.task);
    const Pose& q = in.task.start;
    const auto contacts = detect_contacts(in.task.object, q, in.task.environment, ctx.config().d_contact);
    std::printf("contacts %zu\n", contacts.size());
    for (std::size_t i = 0; i < contacts.size(); ++i) {
        const auto& c = contacts[i];
        std::printf("  %zu primitive=%d vertex=%d position=%s normal=%s distance=%.6g\n", i, c.primitive, c.vertex,
                    vec(c.position).c_str(), vec(c.normal).c_str(), c.signed_distance);
    }
    const GraspMap grasp = build_grasp_map(contacts, q);
    const auto cs_modes = enumerate_cs_modes(grasp, ctx.enumeration());
    std::printf("cs_modes %zu\n", cs_modes.size());
    std::size_t total = 0;
    for (const auto& cs : cs_modes) {
        std::string label;
        for (auto s : cs) label += s == ContactState::Maintain ? 'M' : 'S';
        if (label.empty()) label = "-";
        const auto ss = enumerate_ss_modes(cs, grasp, ctx.basis, ctx.enumeration());
        total += ss.size();
        std::printf("  %s ss_modes=%zu\n", label.c_str(), ss.size());
    }
    std::printf("total_modes %zu\n", total);
    return kOk;
}

int run_sites(const std::string& path, int count, std::uint64_t seed) {
    const Loaded in = load(path);
    const auto sites = sample_finger_sites(in.task.object, count, seed);
    std::printf("x,y,z,nx,ny,nz\n");
    for (const auto& s : sites)
        std::printf("%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.position.x(), s.position.y(), s.position.z(),
                    s.normal.x(), s.normal.y(), s.normal.z());
    return kOk;
}

void print_matrix(const char* name, const Eigen::MatrixXd& m) {
    std::printf("%s %ld %ld\n", name, static_cast<long>(m.rows()), static_cast<long>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) std::printf(c ? " %.10g" : "%.10g", m(r, c));
        std::printf("\n");
    }
}

int run_dump_system(const std::string& path, const std::string& mode_text) {
    const Loaded in = load(path);
    const PlanningContext ctx(in.task);
    const Pose& q = in.task.start;
    const auto contacts = detect_contacts(in.task.object, q, in.task.environment, ctx.config().d_contact);
    ContactMode mode = mode_text.empty()
                           ? ContactMode::all_sticking(CsMode(contacts.size(), ContactState::Maintain), ctx.config().n_t)
                           : ContactMode::decode(mode_text, ctx.config().n_t);
    if (mode.size() != contacts.size()) throw InvalidInput("mode has " + std::to_string(mode.size()) +
                                                           " entries but the start pose has " +
                                                           std::to_string(contacts.size()) + " contacts");
    FingerAssignment fingers = in.task.manipulator.start_fingers;
    if (fingers.empty()) fingers = ctx.no_fingers();
    const auto qm = ctx.model->inverse_kinematics(fingers, q);
    if (!qm) throw InvalidInput("start fingers are outside the workspace");
    const auto sys = assemble(mode, build_grasp_map(contacts, q), finger_contacts(*ctx.model, *qm, fingers, q),
                              ctx.dynamics_at(q), ctx.basis, ctx.friction, ctx.model->dof());
    std::printf("mode %s\ncolumns v=6 qdot=%ld lambda=%ld\n", (mode.encode() + finger_mode_string(fingers, ctx.config().n_t)).c_str(),
                static_cast<long>(sys.layout.dof), static_cast<long>(sys.layout.n_lambda));
    print_matrix("A_eq", sys.system.A_eq);
    print_matrix("b_eq", sys.system.b_eq);
    print_matrix("A_ineq", sys.system.A_ineq);
    print_matrix("b_ineq", sys.system.b_ineq);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contact-mode guided manipulation planner"};
    app.require_subcommand(1);
    app.set_version_flag("--version", MODEPLAN_VERSION);

    std::string task, traj, out, mode;
    std::uint64_t seed = 0;
    int max_iters = 0, count = 200;

    auto* plan_cmd = app.add_subcommand("plan", "Plan a trajectory for a task file");
    plan_cmd->add_option("task", task, "Task file")->required();
    auto* seed_opt = plan_cmd->add_option("--seed", seed, "Random seed (overrides the task)");
    auto* iters_opt = plan_cmd->add_option("--max-iters", max_iters, "Iteration budget (overrides the task)")
                          ->check(CLI::NonNegativeNumber);
    plan_cmd->add_option("--out", out, "Write the trajectory here instead of stdout");

    auto* validate_cmd = app.add_subcommand("validate", "Check a trajectory against its task");
    validate_cmd->add_option("task", task, "Task file")->required();
    validate_cmd->add_option("trajectory", traj, "Trajectory file")->required();

    auto* modes_cmd = app.add_subcommand("modes", "List contact modes at the start pose");
    modes_cmd->add_option("task", task, "Task file")->required();

    auto* sites_cmd = app.add_subcommand("sites", "Emit finger sites as CSV");
    sites_cmd->add_option("task", task, "Task file")->required();
    sites_cmd->add_option("--count", count, "Number of sites")->required()->check(CLI::PositiveNumber);
    auto* sites_seed = sites_cmd->add_option("--seed", seed, "Site sampling seed")->required();
    (void)sites_seed;

    auto* dump_cmd = app.add_subcommand("dump-system", "Print the assembled constraint system at the start pose");
    dump_cmd->add_option("task", task, "Task file")->required();
    dump_cmd->add_option("--mode", mode, "Environment mode string (default all sticking)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*plan_cmd)
            return run_plan(task, seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt,
                            iters_opt->count() ? std::optional<int>(max_iters) : std::nullopt, out);
        if (*validate_cmd) return run_validate(task, traj);
        if (*modes_cmd) return run_modes(task);
        if (*sites_cmd) return run_sites(task, count, seed);
        if (*dump_cmd) return run_dump_system(task, mode);
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    }
    return kUsage;
}
