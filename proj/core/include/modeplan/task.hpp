#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "modeplan/collision.hpp"
#include "modeplan/geometry.hpp"
#include "modeplan/manipulator.hpp"

namespace modeplan {

enum class DynamicsKind { Quasistatic, Quasidynamic };

std::string to_string(DynamicsKind kind);

struct PlannerConfig {
    double goal_bias = 0.5;  // p: probability of a uniform sample rather than the goal
    double w_r = 0.2;        // m/rad, nearest-neighbor metric
    double w_a = 0.2;        // angular weight of the velocity cost
    int max_iters = 100;
    double extend_cap_trans = 0.1;  // m
    double extend_cap_rot = 0.5;    // rad
    double h = 0.02;                // s
    int cor_every = 5;
    double relocate_prob = 0.1;
    int relocate_attempts = 30;
    double release_prob = 0.3;  // chance a chosen finger is lifted instead of moved
    std::uint64_t rng_seed = 1;
    DynamicsKind dynamics = DynamicsKind::Quasistatic;
    int n_t = 2;
    double d_contact = 1e-3;  // m
    double eps = 1e-4;
    double eps_cor = 1e-3;
    int finger_site_count = 200;
    std::uint64_t finger_site_seed = 0;
    int max_contacts = 16;
    int max_ss_modes = 1024;
    double step_displacement = 4e-3;  // m, per-step bound on any vertex's travel
};

/// Throws InvalidInput on out-of-range values.
void validate(const PlannerConfig& config);

struct ManipulatorSpec {
    int n_fingers = 1;
    double radius = 0.01;
    Workspace workspace;
    FingerAssignment start_fingers;  // empty: no initial assignment
};

struct SamplingBounds {
    Vec3 min = Vec3::Constant(-1.0);
    Vec3 max = Vec3::Constant(1.0);
};

struct Task {
    ObjectBody object;
    EnvironmentBody environment;
    ManipulatorSpec manipulator;
    Pose start;
    GoalRegion goal;
    Vec3 gravity = Vec3(0.0, 0.0, -9.81);
    PlannerConfig planner;
    SamplingBounds sampling;
};

void validate(const Task& task);

}  // namespace modeplan
