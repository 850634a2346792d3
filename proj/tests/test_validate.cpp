#include <algorithm>
#include <map>

#include <gtest/gtest.h>

#include "modeplan/planner.hpp"
#include "modeplan/task_io.hpp"
#include "modeplan/validate.hpp"

using namespace modeplan;

namespace {

std::string path_of(const std::string& name) { return std::string(MODEPLAN_TASK_DIR) + "/" + name + ".json"; }

struct Planned {
    Task task;
    Trajectory traj;
};

const Planned& planned(const std::string& name) {
    static std::map<std::string, Planned> cache;
    auto it = cache.find(name);
    if (it == cache.end()) {
        Task t = load_task(path_of(name));
        t.planner.rng_seed = 2;  // succeeds on every fixture used here
        PlanResult r = plan(t);
        EXPECT_TRUE(r.success) << name;
        it = cache.emplace(name, Planned{std::move(t), std::move(r.trajectory)}).first;
    }
    return it->second;
}

// First motion record whose object touches the environment and, when asked, holds a finger.
int motion_step(const Trajectory& traj, bool need_finger) {
    for (std::size_t k = 0; k + 1 < traj.steps.size(); ++k) {
        const auto& s = traj.steps[k];
        if (traj.steps[k + 1].relocation || s.env_contacts.empty()) continue;
        const bool has_finger = std::any_of(s.fingers.begin(), s.fingers.end(), [](const auto& f) { return f.has_value(); });
        if (!need_finger || has_finger) return static_cast<int>(k);
    }
    return -1;
}

const Violation* at_step(const ValidationReport& rep, int step) {
    for (const auto& v : rep.violations)
        if (v.step == step) return &v;
    return nullptr;
}

}  // namespace

class PlannedFixture : public ::testing::TestWithParam<const char*> {};

TEST_P(PlannedFixture, PlannerOutputValidates) {
    const Planned& p = planned(GetParam());
    const ValidationReport rep = validate_trajectory(p.task, p.traj, p.traj.task_hash);
    for (const auto& v : rep.violations) ADD_FAILURE() << "step " << v.step << " " << v.check << ": " << v.detail;
    EXPECT_EQ(rep.transitions + 1, static_cast<int>(p.traj.steps.size()));
    EXPECT_GE(rep.min_signed_distance, -(p.task.planner.d_contact + ValidationOptions{}.penetration_slack));
    EXPECT_LE(rep.max_finger_drift, ValidationOptions{}.finger_tol);
}

INSTANTIATE_TEST_SUITE_P(Fixtures, PlannedFixture, ::testing::Values("cube_push", "cube_drop", "plate_flip"));

TEST(Validate, SinkingFiveMillimetresIsPenetration) {
    const Planned& p = planned("cube_push");
    const int k = motion_step(p.traj, false);
    ASSERT_GE(k, 0);
    Trajectory bad = p.traj;
    auto& pose = bad.steps[static_cast<std::size_t>(k)].pose;
    pose = Pose(pose.position() - Vec3(0, 0, 0.005), pose.orientation());
    const ValidationReport rep = validate_trajectory(p.task, bad);
    const Violation* v = at_step(rep, k);
    ASSERT_NE(v, nullptr);
    EXPECT_EQ(v->check, "penetration");
}

TEST(Validate, DroppingLoadedContactsBreaksForceBalance) {
    const Planned& p = planned("cube_push");
    const int k = motion_step(p.traj, false);
    ASSERT_GE(k, 0);
    Trajectory bad = p.traj;
    auto& s = bad.steps[static_cast<std::size_t>(k)];
    // every supporting contact declared separating; finger entries unchanged
    std::string mode(s.env_contacts.size(), 'S');
    for (const auto& f : s.fingers) mode += f ? "M00" : "S";
    s.mode = mode;
    const ValidationReport rep = validate_trajectory(p.task, bad);
    const Violation* v = at_step(rep, k);
    ASSERT_NE(v, nullptr);
    EXPECT_TRUE(v->check == "force_balance" || v->check == "dynamics") << v->check;
}

TEST(Validate, FingerDriftIsReported) {
    const Planned& p = planned("cube_push");
    const int k = motion_step(p.traj, true);
    ASSERT_GE(k, 0);
    Trajectory bad = p.traj;
    auto& s = bad.steps[static_cast<std::size_t>(k)];
    std::size_t i = 0;
    while (!s.fingers[i]) ++i;
    s.q_mnp(static_cast<Eigen::Index>(3 * i + 1)) += 1e-3;
    const ValidationReport rep = validate_trajectory(p.task, bad);
    const Violation* v = at_step(rep, k);
    ASSERT_NE(v, nullptr);
    EXPECT_EQ(v->check, "finger_sticking");
}

TEST(Validate, PerturbedTwistFailsIntegration) {
    const Planned& p = planned("cube_drop");
    int k = 0;
    while (k + 1 < static_cast<int>(p.traj.steps.size()) && p.traj.steps[static_cast<std::size_t>(k) + 1].relocation) ++k;
    ASSERT_LT(k + 1, static_cast<int>(p.traj.steps.size()));
    Trajectory bad = p.traj;
    bad.steps[static_cast<std::size_t>(k)].twist.linear.x() += 1e-3;
    const ValidationReport rep = validate_trajectory(p.task, bad);
    const Violation* v = at_step(rep, k);
    ASSERT_NE(v, nullptr);
    EXPECT_EQ(v->check, "integration");
}

TEST(Validate, HeaderMismatches) {
    const Planned& p = planned("cube_drop");
    const auto rep = validate_trajectory(p.task, p.traj, p.traj.task_hash + 1);
    ASSERT_EQ(rep.violations.size(), 1u);
    EXPECT_EQ(rep.violations[0].check, "header");

    Trajectory other_h = p.traj;
    other_h.h *= 2.0;
    EXPECT_EQ(validate_trajectory(p.task, other_h).violations.at(0).check, "header");

    Trajectory empty = p.traj;
    empty.steps.clear();
    EXPECT_FALSE(validate_trajectory(p.task, empty).ok());
}

TEST(Validate, FinalRecordCarriesNoMode) {
    const Planned& p = planned("cube_drop");
    Trajectory bad = p.traj;
    bad.steps.back().mode = "M00";
    const auto rep = validate_trajectory(p.task, bad);
    ASSERT_FALSE(rep.ok());
    EXPECT_EQ(rep.violations.back().step, static_cast<int>(bad.steps.size()) - 1);
    EXPECT_EQ(rep.violations.back().check, "mode");
}
