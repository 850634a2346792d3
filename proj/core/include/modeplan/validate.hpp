#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "modeplan/task.hpp"
#include "modeplan/trajectory.hpp"

namespace modeplan {

struct ValidationOptions {
    double residual_tol = 1e-6;       // scaled mode and dynamics residuals
    double penetration_slack = 1e-4;  // m beyond d_contact
    double finger_tol = 1e-5;         // m, fingertip vs. object site
    double pose_tol = 1e-9;           // recorded vs. recomposed pose
    double max_correction_trans = 0.01;
    double max_correction_rot = 0.1;
};

struct Violation {
    int step = 0;
    std::string check;
    std::string detail;
};

struct ValidationReport {
    int transitions = 0;
    std::vector<Violation> violations;  // at most one per step: the first failing check
    double max_dynamics_residual = 0.0;
    double min_signed_distance = 0.0;
    double max_finger_drift = 0.0;

    bool ok() const { return violations.empty(); }
};

/// Re-checks a trajectory against the task with constraints assembled from the
/// recorded mode strings, independently of the planner's own assembly.
ValidationReport validate_trajectory(const Task& task, const Trajectory& trajectory,
                                     std::optional<std::uint64_t> task_hash = std::nullopt,
                                     const ValidationOptions& options = {});

}  // namespace modeplan
