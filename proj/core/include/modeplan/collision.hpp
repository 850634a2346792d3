#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "modeplan/geometry.hpp"

namespace modeplan {

struct ObjectBody {
    std::vector<Vec3> vertices;  // object frame
    double mass = 0.0;
    Mat3 inertia = Mat3::Zero();  // about the center of mass, body axes
    Vec3 com = Vec3::Zero();
    double mu_env = 0.0;
    double mu_mnp = 0.0;
};

/// Throws InvalidInput when the body violates its invariants (too few or
/// coplanar vertices, nonpositive mass, non-SPD inertia, negative friction).
void validate(const ObjectBody& body);

/// 6x6 inertia about the body origin, ordered (linear, angular).
Mat6 spatial_inertia(const ObjectBody& body);

/// Free space is {x : normal . x >= offset}.
struct HalfSpace {
    Vec3 normal = Vec3::UnitZ();
    double offset = 0.0;
};

/// Solid box.
struct Box {
    Pose pose;
    Vec3 half_extents = Vec3::Zero();
};

using Primitive = std::variant<HalfSpace, Box>;

struct EnvironmentBody {
    std::vector<Primitive> primitives;
};

void validate(const EnvironmentBody& env);

/// One object-vertex / environment-primitive contact, in world coordinates.
/// The normal points from the environment into the object.
struct ContactPoint {
    Vec3 position = Vec3::Zero();
    Vec3 normal = Vec3::UnitZ();
    double signed_distance = 0.0;
    int primitive = -1;
    int vertex = -1;
};

/// A candidate finger placement on the object surface, object frame, outward normal.
struct FingerSite {
    Vec3 position = Vec3::Zero();
    Vec3 normal = Vec3::UnitZ();

    bool operator==(const FingerSite&) const = default;
};

struct HullFace {
    Vec3 normal;  // outward, unit
    double offset = 0.0;
    std::vector<Vec3> polygon;  // counter-clockwise about normal
    double area = 0.0;
    Vec3 centroid = Vec3::Zero();
};

/// Faces of the convex hull of a point set. Throws DegenerateGeometry for flat or empty hulls.
std::vector<HullFace> convex_hull_faces(const std::vector<Vec3>& points);

/// Max over hull face planes of (n.p - offset): exact inside, a lower bound outside.
double hull_signed_distance(const std::vector<HullFace>& faces, const Vec3& p);

/// Signed distance from a point to the nearest environment primitive.
double environment_distance(const EnvironmentBody& env, const Vec3& p_world);

/// Every (primitive, vertex) pair whose signed distance is <= d_contact,
/// ordered by primitive then vertex. Throws DeepPenetration below -10 d_contact.
std::vector<ContactPoint> detect_contacts(const ObjectBody& body, const Pose& q,
                                          const EnvironmentBody& env, double d_contact);

Eigen::VectorXd signed_distances(const std::vector<ContactPoint>& contacts);

/// `count` sites on the hull, allocated to faces by area and laid out on a
/// per-face grid. Deterministic in (body, count, seed).
std::vector<FingerSite> sample_finger_sites(const ObjectBody& body, int count, std::uint64_t seed);

}  // namespace modeplan
