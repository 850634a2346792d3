#include "modeplan/task.hpp"

#include <cmath>

#include "modeplan/errors.hpp"

namespace modeplan {

std::string to_string(DynamicsKind kind) {
    return kind == DynamicsKind::Quasistatic ? "quasistatic" : "quasidynamic";
}

void validate(const PlannerConfig& c) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw InvalidInput(std::string("planner: ") + what);
    };
    require(c.goal_bias >= 0.0 && c.goal_bias <= 1.0, "goal_bias must lie in [0, 1]");
    require(c.w_r >= 0.0 && std::isfinite(c.w_r), "w_r must be >= 0");
    require(c.w_a >= 0.0 && std::isfinite(c.w_a), "w_a must be >= 0");
    require(c.max_iters >= 0, "max_iters must be >= 0");
    require(c.extend_cap_trans > 0.0 && c.extend_cap_rot > 0.0, "extension caps must be positive");
    require(c.h > 0.0 && std::isfinite(c.h), "h must be positive");
    require(c.cor_every >= 1, "cor_every must be >= 1");
    require(c.relocate_prob >= 0.0 && c.relocate_prob <= 1.0, "relocate_prob must lie in [0, 1]");
    require(c.release_prob >= 0.0 && c.release_prob <= 1.0, "release_prob must lie in [0, 1]");
    require(c.relocate_attempts >= 1, "relocate_attempts must be >= 1");
    require(c.n_t >= 2, "n_t must be >= 2");
    require(c.d_contact > 0.0, "d_contact must be positive");
    require(c.eps > 0.0 && c.eps_cor > 0.0, "eps and eps_cor must be positive");
    require(c.finger_site_count >= 1, "finger_site_count must be >= 1");
    require(c.max_contacts >= 0 && c.max_ss_modes >= 1, "enumeration limits must be positive");
    require(c.step_displacement > 0.0, "step_displacement must be positive");
}

void validate(const Task& task) {
    validate(task.object);
    validate(task.environment);
    validate(task.planner);
    const auto& m = task.manipulator;
    if (m.n_fingers < 0) throw InvalidInput("manipulator: n_fingers must be >= 0");
    if (!(m.radius > 0.0)) throw InvalidInput("manipulator: radius must be positive");
    if (!(m.workspace.min.array() < m.workspace.max.array()).all())
        throw InvalidInput("manipulator: workspace min must be below max");
    if (!m.start_fingers.empty() && static_cast<int>(m.start_fingers.size()) != m.n_fingers)
        throw InvalidInput("manipulator: start_fingers needs one entry per finger");
    if (!(task.goal.translation_tolerance > 0.0) || !(task.goal.rotation_tolerance > 0.0))
        throw InvalidInput("goal: tolerances must be positive");
    if (!(task.sampling.min.array() <= task.sampling.max.array()).all())
        throw InvalidInput("sampling_bounds: min must not exceed max");
    if (!task.gravity.allFinite()) throw InvalidInput("dynamics: gravity is not finite");
}

}  // namespace modeplan
