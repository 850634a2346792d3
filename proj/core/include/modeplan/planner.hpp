#pragma once

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "modeplan/contact_modes.hpp"
#include "modeplan/manipulator.hpp"
#include "modeplan/mechanics.hpp"
#include "modeplan/task.hpp"
#include "modeplan/trajectory.hpp"

namespace modeplan {

using Rng = std::mt19937_64;

/// Everything derived once from a task: hull, finger sites, tangent basis, robot model.
struct PlanningContext {
    explicit PlanningContext(Task task);

    Task task;
    std::shared_ptr<const ManipulatorModel> model;
    std::vector<HullFace> hull;
    std::vector<FingerSite> sites;
    TangentBasis basis;
    FrictionParams friction;
    Mat6 inertia;
    double vertex_radius = 0.0;  // max |vertex| in the object frame

    const PlannerConfig& config() const { return task.planner; }
    DynamicsSpec dynamics_at(const Pose& q) const;
    /// Quasistatic dynamics at q regardless of the configured model.
    DynamicsSpec quasistatic_at(const Pose& q) const;
    SceneGeometry scene() const { return {&task.environment, &hull}; }
    EnumerationOptions enumeration() const;
    FingerAssignment no_fingers() const { return FingerAssignment(static_cast<std::size_t>(model->max_fingers())); }
    Eigen::VectorXd parked() const;
};

/// One integration step as stored on a tree edge: the state at its start and
/// the twists that carry it to the next state.
struct EdgeStep {
    Pose q;
    Eigen::VectorXd q_mnp;
    std::vector<ContactPoint> contacts;
    std::string mode;
    Twist v;
    Twist correction;
};

struct TreeNode {
    int id = 0;
    Pose q;
    std::optional<Eigen::VectorXd> q_mnp;  // nullopt: no manipulator configuration assigned yet
    FingerAssignment fingers;
    int parent = -1;
    std::optional<ContactMode> incoming_mode;
    bool relocated = false;  // fingers were changed at the parent before this edge
    std::vector<EdgeStep> edge;
};

enum class StopReason {
    Reached,
    Infeasible,
    NoMotion,
    NoProgress,
    NewContact,
    ContactLost,
    DeepPenetration,
    Kinematics,
    Collision,
    TravelCap,
    StepLimit,
};

std::string to_string(StopReason reason);

struct IntegrationResult {
    Pose q_new;
    Eigen::VectorXd q_mnp;
    std::vector<EdgeStep> steps;
    StopReason reason = StopReason::Reached;
};

struct SsChoice {
    ContactMode mode;
    double cost = 0.0;
};

struct Relocation {
    FingerAssignment fingers;
    Eigen::VectorXd q_mnp;
};

struct PlanStats {
    int iterations = 0;
    std::size_t nodes_tree = 0;
    std::size_t nodes_solution = 0;
    double best_distance = 0.0;  // pose_distance of the closest node to the goal center
    double time_s = 0.0;
};

struct PlanResult {
    bool success = false;
    Trajectory trajectory;
    PlanStats stats;
    std::vector<TreeNode> tree;
};

/// Goal center with probability 1 - p, otherwise uniform position in bounds
/// and uniform orientation.
Pose sample_object_config(const GoalRegion& goal, const SamplingBounds& bounds, double p, Rng& rng);

/// Uniformly distributed unit quaternion (subgroup algorithm).
Quat random_orientation(Rng& rng);

/// Linear scan; ties go to the lowest id.
int nearest_neighbor(const std::vector<TreeNode>& tree, const Pose& q_rand, double w_r);

/// Desired body velocity toward q_rand, scaled so one step of length h
/// respects the per-step caps.
Twist step_velocity_target(const PlanningContext& ctx, const Pose& q, const Pose& q_rand);

/// Kinematic QP per candidate with the weighted velocity cost; lowest cost wins,
/// ties resolved by candidate order (encoding order). nullopt if none is feasible.
std::optional<SsChoice> best_ss_mode(const PlanningContext& ctx, const Pose& q_near, const Pose& q_rand,
                                     const GraspMap& grasp, const std::vector<ContactMode>& candidates);

/// Projected forward integration under `mode` (defined on `contacts` at q_near).
IntegrationResult project_integrate(const PlanningContext& ctx, const Pose& q_near, const Pose& q_rand,
                                    const Eigen::VectorXd& q_mnp, const FingerAssignment& fingers,
                                    const ContactMode& mode, const std::vector<ContactPoint>& contacts,
                                    int max_steps = 100000);

/// One successful integration step is possible with these fingers.
bool motion_feasible(const PlanningContext& ctx, const Pose& q_near, const Pose& q_rand, const Eigen::VectorXd& q_mnp,
                     const FingerAssignment& fingers, const ContactMode& mode,
                     const std::vector<ContactPoint>& contacts);

/// Quasistatic balance with sticking environment contacts and the given fingers.
bool balanced_at_rest(const PlanningContext& ctx, const Pose& q, const std::vector<ContactPoint>& contacts,
                      const Eigen::VectorXd& q_mnp, const FingerAssignment& fingers);

/// Rejection sampling over finger subsets and sites.
std::optional<Relocation> relocate_manipulator(const PlanningContext& ctx, const Pose& q_near, const Pose& q_rand,
                                               const std::optional<Eigen::VectorXd>& q_mnp,
                                               const FingerAssignment& fingers, const ContactMode& mode,
                                               const std::vector<ContactPoint>& contacts, Rng& rng);

/// Extends node `near` under one CS mode with the best SS mode and the
/// all-sticking completion. Returns the ids of added nodes (at most two).
std::vector<int> extend(const PlanningContext& ctx, std::vector<TreeNode>& tree, int near, const CsMode& cs,
                        const Pose& q_rand, const std::vector<ContactPoint>& contacts, const GraspMap& grasp,
                        Rng& rng);

/// "M" + n_t zeros for a finger in contact, "S" otherwise, one per slot.
std::string finger_mode_string(const FingerAssignment& fingers, int n_t);

Trajectory extract_path(const PlanningContext& ctx, const std::vector<TreeNode>& tree, int goal);

PlanResult plan(const Task& task);

}  // namespace modeplan
