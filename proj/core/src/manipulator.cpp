#include "modeplan/manipulator.hpp"

#include <algorithm>
#include <cmath>

#include "modeplan/errors.hpp"

namespace modeplan {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
constexpr double kClearanceTol = 1e-9;
}

FreeBallFingers::FreeBallFingers(int n_fingers, double radius, const Workspace& workspace)
    : n_fingers_(n_fingers), radius_(radius), workspace_(workspace) {
    if (n_fingers < 0) throw InvalidInput("FreeBallFingers: negative finger count");
    if (!(radius > 0.0)) throw InvalidInput("FreeBallFingers: radius must be positive");
    if (!(workspace.min.array() < workspace.max.array()).all())
        throw InvalidInput("FreeBallFingers: empty workspace");
}

Vec3 FreeBallFingers::park_position(int finger) const {
    const double s = (finger + 1.0) / (n_fingers_ + 1.0);
    Vec3 p = 0.5 * (workspace_.min + workspace_.max);
    p.x() = workspace_.min.x() + s * (workspace_.max.x() - workspace_.min.x());
    p.z() = workspace_.max.z();
    return p;
}

ContactPoint finger_contact_point(const FingerSite& site, const Pose& q) {
    ContactPoint c;
    c.position = q.transform_point(site.position);
    c.normal = -q.transform_vector(site.normal);
    c.signed_distance = 0.0;
    return c;
}

std::vector<Vec3> FreeBallFingers::forward_kinematics(const VectorXd& q_mnp, const FingerAssignment& fingers,
                                                      const Pose& q) const {
    std::vector<Vec3> out;
    for (int i = 0; i < n_fingers_; ++i) {
        if (!fingers[static_cast<std::size_t>(i)]) continue;
        const Vec3 n_out = q.transform_vector(fingers[static_cast<std::size_t>(i)]->normal);
        out.push_back(center(q_mnp, i) - radius_ * n_out);
    }
    return out;
}

std::optional<VectorXd> FreeBallFingers::inverse_kinematics(const FingerAssignment& fingers, const Pose& q) const {
    if (static_cast<int>(fingers.size()) != n_fingers_) throw InvalidInput("inverse_kinematics: finger count");
    VectorXd q_mnp(dof());
    for (int i = 0; i < n_fingers_; ++i) {
        const auto& site = fingers[static_cast<std::size_t>(i)];
        Vec3 c = park_position(i);
        if (site) c = q.transform_point(site->position) + radius_ * q.transform_vector(site->normal);
        if (!workspace_.contains(c)) return std::nullopt;
        q_mnp.segment<3>(3 * i) = c;
    }
    return q_mnp;
}

MatrixXd FreeBallFingers::jacobian(const VectorXd&, int finger) const {
    MatrixXd J = MatrixXd::Zero(3, dof());
    J.middleCols<3>(3 * finger).setIdentity();
    return J;
}

bool FreeBallFingers::ball_clear(const Vec3& c, const Pose& q, const SceneGeometry& scene) const {
    if (scene.env && environment_distance(*scene.env, c) < radius_ - kClearanceTol) return false;
    if (scene.hull && hull_signed_distance(*scene.hull, q.inverse_transform_point(c)) < radius_ - kClearanceTol)
        return false;
    return true;
}

bool FreeBallFingers::collides(const VectorXd& q_mnp, const FingerAssignment& fingers, const Pose& q,
                               const SceneGeometry& scene) const {
    for (int i = 0; i < n_fingers_; ++i) {
        if (!workspace_.contains(center(q_mnp, i))) return true;
        // parked fingers are out of the scene
        if (!fingers[static_cast<std::size_t>(i)]) continue;
        if (!ball_clear(center(q_mnp, i), q, scene)) return true;
        for (int j = 0; j < i; ++j) {
            if (!fingers[static_cast<std::size_t>(j)]) continue;
            if ((center(q_mnp, i) - center(q_mnp, j)).norm() < 2.0 * radius_ - kClearanceTol) return true;
        }
    }
    return false;
}

bool FreeBallFingers::relocation_path_exists(const VectorXd& from, const FingerAssignment& fingers_from,
                                             const VectorXd& to, const FingerAssignment& fingers_to, const Pose& q,
                                             const SceneGeometry& scene) const {
    const double step = 0.5 * radius_;
    auto segment_clear = [&](const Vec3& a, const Vec3& b) {
        const int n = std::max(1, static_cast<int>(std::ceil((b - a).norm() / step)));
        for (int k = 0; k <= n; ++k) {
            const Vec3 p = a + (b - a) * (static_cast<double>(k) / n);
            if (!workspace_.contains(p) || !ball_clear(p, q, scene)) return false;
        }
        return true;
    };
    for (int i = 0; i < n_fingers_; ++i) {
        const auto& s_from = fingers_from[static_cast<std::size_t>(i)];
        const auto& s_to = fingers_to[static_cast<std::size_t>(i)];
        if (s_from == s_to && center(from, i).isApprox(center(to, i), 0.0)) continue;
        std::vector<Vec3> waypoints{center(from, i)};
        if (s_from) waypoints.push_back(center(from, i) + 2.0 * radius_ * q.transform_vector(s_from->normal));
        if (s_to) waypoints.push_back(center(to, i) + 2.0 * radius_ * q.transform_vector(s_to->normal));
        waypoints.push_back(center(to, i));
        for (std::size_t k = 0; k + 1 < waypoints.size(); ++k) {
            // parked endpoints sit outside the scene; only the contact-side legs are swept
            const bool from_park = k == 0 && !s_from;
            const bool to_park = k + 2 == waypoints.size() && !s_to;
            if (from_park || to_park) {
                if (!workspace_.contains(waypoints[k + 1]) || !workspace_.contains(waypoints[k])) return false;
                continue;
            }
            if (segment_clear(waypoints[k], waypoints[k + 1])) continue;
            // the transfer leg between two retract points may go over the top instead
            const bool transfer = s_from && s_to && k == 1;
            if (!transfer) return false;
            const double top = workspace_.max.z();
            const Vec3 a(waypoints[1].x(), waypoints[1].y(), top);
            const Vec3 b(waypoints[2].x(), waypoints[2].y(), top);
            if (!segment_clear(waypoints[1], a) || !segment_clear(a, b) || !segment_clear(b, waypoints[2])) return false;
        }
    }
    return true;
}

std::vector<FingerContact> finger_contacts(const ManipulatorModel& model, const VectorXd& q_mnp,
                                           const FingerAssignment& fingers, const Pose& q) {
    std::vector<FingerContact> out;
    const Mat3 Rt = q.rotation().transpose();
    for (std::size_t i = 0; i < fingers.size(); ++i) {
        if (!fingers[i]) continue;
        const ContactFrame frame = make_contact_frame(fingers[i]->position, -fingers[i]->normal);
        Mat3 C;
        C << frame.t1.transpose(), frame.t2.transpose(), frame.n.transpose();
        FingerContact fc;
        fc.grasp = grasp_from_frame(frame);
        fc.jacobian = C * Rt * model.jacobian(q_mnp, static_cast<int>(i));
        out.push_back(std::move(fc));
    }
    return out;
}

}  // namespace modeplan
