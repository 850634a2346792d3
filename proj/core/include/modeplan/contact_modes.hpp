#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "modeplan/collision.hpp"
#include "modeplan/geometry.hpp"
#include "modeplan/linear_system.hpp"

namespace modeplan {

/// n_t lines through the origin of the contact tangent plane, equally spaced
/// in angle. Row j of matrix() is C_T^j; for n_t = 2 these are [1,0] and [0,1].
struct TangentBasis {
    int n_t = 2;
    std::vector<Eigen::Vector2d> directions;

    static TangentBasis make(int n_t);
    Eigen::MatrixXd matrix() const;
};

enum class ContactState : std::uint8_t { Maintain, Separate };

using CsMode = std::vector<ContactState>;

/// Joint contact mode over an ordered contact list. ss[i] holds n_t signs in
/// {-1, 0, +1} for Maintain contacts and is empty for Separate ones.
struct ContactMode {
    CsMode cs;
    std::vector<std::vector<int>> ss;

    static ContactMode all_sticking(const CsMode& cs, int n_t);

    bool maintains(std::size_t i) const { return cs[i] == ContactState::Maintain; }
    bool sticking(std::size_t i) const;
    std::size_t size() const { return cs.size(); }

    /// "S" per separating contact, "M" + n_t chars of {0,+,-} per maintained contact.
    std::string encode() const;
    static ContactMode decode(const std::string& text, int n_t);

    bool operator==(const ContactMode&) const = default;
};

/// Lexicographic order on encodings with M < S and 0 < + < -.
bool mode_encoding_less(const std::string& a, const std::string& b);

/// Orthonormal contact frame in body coordinates; n points into the object.
struct ContactFrame {
    Vec3 t1;
    Vec3 t2;
    Vec3 n;
    Vec3 p;
};

/// t1 = normalize(e x n) for the first axis e with |e.n| < 0.9, t2 = n x t1.
ContactFrame make_contact_frame(const Vec3& p_body, const Vec3& n_body);

/// 6x3 wrench basis: column k is [d_k; p x d_k] for d = (t1, t2, n). Its
/// transpose maps a body twist to the contact velocity (v_t1, v_t2, v_n).
using ContactGrasp = Eigen::Matrix<double, 6, 3>;
using GraspMap = std::vector<ContactGrasp>;

ContactGrasp grasp_from_frame(const ContactFrame& frame);
ContactGrasp build_grasp_map(const ContactPoint& contact, const Pose& q);
GraspMap build_grasp_map(const std::vector<ContactPoint>& contacts, const Pose& q);

struct EnumerationOptions {
    double sigma = 1e-6;  // strictness margin for > 0 rows
    int max_contacts = 16;
    int max_ss_modes = 1024;
    std::uint64_t seed = 0;  // subsampling when the SS cap is exceeded
};

/// Every kinematically feasible {Maintain, Separate}^N assignment, in
/// lexicographic order (Maintain first). Infeasible prefixes are pruned.
std::vector<CsMode> enumerate_cs_modes(const GraspMap& grasp, const EnumerationOptions& options = {});

/// Feasible sign completions of `cs`, ordered by encoding. Capped at
/// max_ss_modes by uniform subsampling; the all-sticking mode is kept.
std::vector<ContactMode> enumerate_ss_modes(const CsMode& cs, const GraspMap& grasp, const TangentBasis& basis,
                                            const EnumerationOptions& options = {});

/// Extreme rays of the tangent-velocity cone selected by a sign vector.
/// Throws InvalidInput for all-zero or empty cones.
std::vector<Eigen::Vector2d> sliding_cone_edges(const std::vector<int>& ss, const TangentBasis& basis);

/// A sticking manipulator contact: grasp basis plus the contact-frame
/// Jacobian (3 x dof) of the fingertip point.
struct FingerContact {
    ContactGrasp grasp;
    Eigen::MatrixXd jacobian;
};

/// Velocity rows over [v (6) | qdot (dof)]: contact velocity G'v - [J qdot; 0]
/// pinned or signed per the mode. Fingers are always sticking.
LinearSystem mode_velocity_constraints(const ContactMode& mode, const GraspMap& grasp,
                                       const std::vector<FingerContact>& fingers, const TangentBasis& basis,
                                       Eigen::Index dof, double sigma);

/// Force variables for maintained contacts and their wrench directions.
struct ForceBlock {
    LinearSystem rows;                             // over lambda only
    Eigen::Matrix<double, 6, Eigen::Dynamic> wrench;  // columns G_i h_i
    std::vector<int> owner;                        // contact index per lambda (fingers after env)
};

ForceBlock mode_force_constraints(const ContactMode& mode, const GraspMap& grasp,
                                  const std::vector<FingerContact>& fingers, double mu_env, double mu_mnp,
                                  const TangentBasis& basis);

}  // namespace modeplan
