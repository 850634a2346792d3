#pragma once

#include <optional>
#include <vector>

#include "modeplan/collision.hpp"
#include "modeplan/contact_modes.hpp"
#include "modeplan/geometry.hpp"

namespace modeplan {

/// Per-finger contact assignment; std::nullopt means the finger is not touching the object.
using FingerAssignment = std::vector<std::optional<FingerSite>>;

/// Static scene the manipulator reasons about.
struct SceneGeometry {
    const EnvironmentBody* env = nullptr;
    const std::vector<HullFace>* hull = nullptr;  // object frame
};

struct Workspace {
    Vec3 min = Vec3::Constant(-1.0);
    Vec3 max = Vec3::Constant(1.0);

    bool contains(const Vec3& p, double tol = 1e-9) const {
        return (p.array() >= min.array() - tol).all() && (p.array() <= max.array() + tol).all();
    }
};

/// Robot-specific kinematics, collision and relocation sub-planner.
class ManipulatorModel {
public:
    virtual ~ManipulatorModel() = default;

    virtual int dof() const = 0;
    virtual int max_fingers() const = 0;

    /// World-frame point of each fingertip that touches the object.
    virtual std::vector<Vec3> forward_kinematics(const Eigen::VectorXd& q_mnp,
                                                 const FingerAssignment& fingers, const Pose& q) const = 0;
    virtual std::optional<Eigen::VectorXd> inverse_kinematics(const FingerAssignment& fingers,
                                                              const Pose& q) const = 0;
    /// 3 x dof world-frame Jacobian of fingertip `finger`'s contact point.
    virtual Eigen::MatrixXd jacobian(const Eigen::VectorXd& q_mnp, int finger) const = 0;
    /// True when the robot hits the environment, the object away from its own
    /// contacts, or itself, or leaves its workspace.
    virtual bool collides(const Eigen::VectorXd& q_mnp, const FingerAssignment& fingers, const Pose& q,
                          const SceneGeometry& scene) const = 0;
    virtual bool relocation_path_exists(const Eigen::VectorXd& from, const FingerAssignment& fingers_from,
                                        const Eigen::VectorXd& to, const FingerAssignment& fingers_to, const Pose& q,
                                        const SceneGeometry& scene) const = 0;
};

/// Point-contact balls translating freely inside an axis-aligned workspace.
/// q_mnp stacks the ball centers. Idle fingers park along the top of the workspace.
class FreeBallFingers final : public ManipulatorModel {
public:
    FreeBallFingers(int n_fingers, double radius, const Workspace& workspace);

    int dof() const override { return 3 * n_fingers_; }
    int max_fingers() const override { return n_fingers_; }
    double radius() const { return radius_; }
    const Workspace& workspace() const { return workspace_; }

    Vec3 park_position(int finger) const;
    Vec3 center(const Eigen::VectorXd& q_mnp, int finger) const { return q_mnp.segment<3>(3 * finger); }

    std::vector<Vec3> forward_kinematics(const Eigen::VectorXd& q_mnp, const FingerAssignment& fingers,
                                         const Pose& q) const override;
    std::optional<Eigen::VectorXd> inverse_kinematics(const FingerAssignment& fingers, const Pose& q) const override;
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& q_mnp, int finger) const override;
    bool collides(const Eigen::VectorXd& q_mnp, const FingerAssignment& fingers, const Pose& q,
                  const SceneGeometry& scene) const override;
    bool relocation_path_exists(const Eigen::VectorXd& from, const FingerAssignment& fingers_from,
                                const Eigen::VectorXd& to, const FingerAssignment& fingers_to, const Pose& q,
                                const SceneGeometry& scene) const override;

private:
    bool ball_clear(const Vec3& c, const Pose& q, const SceneGeometry& scene) const;

    int n_fingers_;
    double radius_;
    Workspace workspace_;
};

/// World contact point and inward normal for a finger site at pose q.
ContactPoint finger_contact_point(const FingerSite& site, const Pose& q);

/// Sticking finger contacts in contact-frame coordinates for the mode rows.
std::vector<FingerContact> finger_contacts(const ManipulatorModel& model, const Eigen::VectorXd& q_mnp,
                                           const FingerAssignment& fingers, const Pose& q);

}  // namespace modeplan
