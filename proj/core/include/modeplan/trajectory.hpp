#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "modeplan/collision.hpp"
#include "modeplan/geometry.hpp"
#include "modeplan/manipulator.hpp"

namespace modeplan {

/// One state of an emitted plan. `mode`, `twist` and `correction` describe the
/// transition to the next record: next = apply(apply(pose, twist, h), correction, 1).
/// A record flagged `relocation` repeats the previous pose with new finger contacts.
struct TrajectoryStep {
    int index = 0;
    double time = 0.0;
    int node = 0;
    Pose pose;
    Eigen::VectorXd q_mnp;
    std::vector<ContactPoint> env_contacts;
    FingerAssignment fingers;
    std::string mode;
    Twist twist;
    Twist correction;
    bool relocation = false;

    bool operator==(const TrajectoryStep& o) const;
};

struct Trajectory {
    std::string planner_version;
    std::uint64_t task_hash = 0;
    std::uint64_t seed = 0;
    std::string dynamics;
    int n_t = 2;
    double h = 0.0;
    std::vector<TrajectoryStep> steps;

    bool operator==(const Trajectory& o) const = default;
};

}  // namespace modeplan
