#include "modeplan/collision.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "modeplan/errors.hpp"

namespace modeplan {

namespace {

double cross2(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Andrew's monotone chain; returns counter-clockwise hull indices without collinear points.
std::vector<int> hull_2d(const std::vector<Eigen::Vector2d>& pts, double tol) {
    std::vector<int> idx(pts.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        return pts[a].x() < pts[b].x() || (pts[a].x() == pts[b].x() && pts[a].y() < pts[b].y());
    });
    if (idx.size() < 3) return idx;
    std::vector<int> h(2 * idx.size());
    std::size_t k = 0;
    for (int i : idx) {
        while (k >= 2 && cross2(pts[h[k - 2]], pts[h[k - 1]], pts[i]) <= tol) --k;
        h[k++] = i;
    }
    for (std::size_t t = idx.size() - 1, lower = k + 1; t-- > 0;) {
        const int i = idx[t];
        while (k >= lower && cross2(pts[h[k - 2]], pts[h[k - 1]], pts[i]) <= tol) --k;
        h[k++] = i;
    }
    h.resize(k - 1);
    return h;
}

struct FaceFrame {
    Vec3 origin;
    Vec3 u;
    Vec3 v;
};

FaceFrame face_frame(const HullFace& f) {
    // u along the longest polygon edge so rectangular faces get axis-aligned grids
    Vec3 best = Vec3::Zero();
    for (std::size_t i = 0; i < f.polygon.size(); ++i) {
        const Vec3 e = f.polygon[(i + 1) % f.polygon.size()] - f.polygon[i];
        if (e.norm() > best.norm() + 1e-12) best = e;
    }
    const Vec3 u = best.normalized();
    return {f.centroid, u, f.normal.cross(u)};
}

double box_point_distance(const Box& box, const Vec3& p_world) {
    const Vec3 l = box.pose.inverse_transform_point(p_world);
    const Vec3 excess = l.cwiseAbs() - box.half_extents;
    const double outside = excess.cwiseMax(0.0).norm();
    const double inside = std::min(excess.maxCoeff(), 0.0);
    return outside + inside;
}

}  // namespace

void validate(const ObjectBody& body) {
    if (body.vertices.size() < 4) throw InvalidInput("object needs at least 4 vertices");
    for (const auto& v : body.vertices) {
        if (!v.allFinite()) throw InvalidInput("object vertex is not finite");
    }
    try {
        (void)convex_hull_faces(body.vertices);
    } catch (const DegenerateGeometry&) {
        throw InvalidInput("object vertices are coplanar");
    }
    if (!(body.mass > 0.0) || !std::isfinite(body.mass)) throw InvalidInput("object mass must be positive");
    if (!body.inertia.allFinite() || (body.inertia - body.inertia.transpose()).norm() > 1e-9 * (1.0 + body.inertia.norm()))
        throw InvalidInput("object inertia must be symmetric");
    Eigen::LLT<Mat3> llt(body.inertia);
    if (llt.info() != Eigen::Success || Eigen::SelfAdjointEigenSolver<Mat3>(body.inertia).eigenvalues().minCoeff() <= 0.0)
        throw InvalidInput("object inertia must be positive definite");
    if (!(body.mu_env >= 0.0) || !(body.mu_mnp >= 0.0)) throw InvalidInput("friction coefficients must be >= 0");
    if (!body.com.allFinite()) throw InvalidInput("object com is not finite");
}

Mat6 spatial_inertia(const ObjectBody& body) {
    const Mat3 C = skew(body.com);
    Mat6 M;
    M.topLeftCorner<3, 3>() = body.mass * Mat3::Identity();
    M.topRightCorner<3, 3>() = -body.mass * C;
    M.bottomLeftCorner<3, 3>() = body.mass * C;
    M.bottomRightCorner<3, 3>() = body.inertia - body.mass * C * C;
    return M;
}

void validate(const EnvironmentBody& env) {
    for (const auto& prim : env.primitives) {
        if (const auto* hs = std::get_if<HalfSpace>(&prim)) {
            if (!hs->normal.allFinite() || std::abs(hs->normal.norm() - 1.0) > 1e-9)
                throw InvalidInput("half-space normal must be unit length");
            if (!std::isfinite(hs->offset)) throw InvalidInput("half-space offset is not finite");
        } else {
            const auto& box = std::get<Box>(prim);
            if (!(box.half_extents.array() > 0.0).all()) throw InvalidInput("box half extents must be positive");
        }
    }
}

std::vector<HullFace> convex_hull_faces(const std::vector<Vec3>& points) {
    const std::size_t n = points.size();
    if (n < 4) throw DegenerateGeometry("convex hull needs at least 4 points");
    double scale = 1.0;
    for (const auto& p : points) scale = std::max(scale, p.cwiseAbs().maxCoeff());
    const double tol = 1e-9 * scale;

    std::vector<HullFace> faces;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                Vec3 nrm = (points[j] - points[i]).cross(points[k] - points[i]);
                if (nrm.norm() < tol * scale) continue;
                nrm.normalize();
                double off = nrm.dot(points[i]);
                bool below = true, above = true;
                for (const auto& p : points) {
                    const double s = nrm.dot(p) - off;
                    below = below && s <= tol;
                    above = above && s >= -tol;
                }
                if (below == above) continue;  // not supporting, or everything coplanar
                if (above) {
                    nrm = -nrm;
                    off = -off;
                }
                const bool seen = std::any_of(faces.begin(), faces.end(), [&](const HullFace& f) {
                    return (f.normal - nrm).norm() < 1e-7 && std::abs(f.offset - off) < 1e-7 * scale;
                });
                if (!seen) faces.push_back({nrm, off, {}, 0.0, Vec3::Zero()});
            }
        }
    }
    if (faces.size() < 4) throw DegenerateGeometry("point set has an empty or flat convex hull");

    for (auto& f : faces) {
        std::vector<Vec3> on;
        for (const auto& p : points) {
            if (std::abs(f.normal.dot(p) - f.offset) <= tol &&
                std::none_of(on.begin(), on.end(), [&](const Vec3& q) { return (q - p).norm() <= tol; }))
                on.push_back(p);
        }
        Vec3 u = (on[1] - on[0]).normalized();
        const Vec3 v = f.normal.cross(u);
        std::vector<Eigen::Vector2d> flat;
        for (const auto& p : on) flat.emplace_back((p - on[0]).dot(u), (p - on[0]).dot(v));
        const auto order = hull_2d(flat, tol * tol);
        f.polygon.clear();
        double area2 = 0.0;
        Eigen::Vector2d c = Eigen::Vector2d::Zero();
        for (std::size_t a = 0; a < order.size(); ++a) {
            const auto& p0 = flat[order[a]];
            const auto& p1 = flat[order[(a + 1) % order.size()]];
            const double cr = p0.x() * p1.y() - p1.x() * p0.y();
            area2 += cr;
            c += (p0 + p1) * cr;
            f.polygon.push_back(on[order[a]]);
        }
        f.area = 0.5 * area2;
        if (area2 > 0.0) {
            c /= 3.0 * area2;
        } else {
            c = flat[order[0]];
        }
        f.centroid = on[0] + c.x() * u + c.y() * v;
    }
    return faces;
}

double hull_signed_distance(const std::vector<HullFace>& faces, const Vec3& p) {
    double d = -std::numeric_limits<double>::infinity();
    for (const auto& f : faces) d = std::max(d, f.normal.dot(p) - f.offset);
    return d;
}

double environment_distance(const EnvironmentBody& env, const Vec3& p_world) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& prim : env.primitives) {
        if (const auto* hs = std::get_if<HalfSpace>(&prim)) {
            d = std::min(d, hs->normal.dot(p_world) - hs->offset);
        } else {
            d = std::min(d, box_point_distance(std::get<Box>(prim), p_world));
        }
    }
    return d;
}

std::vector<ContactPoint> detect_contacts(const ObjectBody& body, const Pose& q, const EnvironmentBody& env,
                                          double d_contact) {
    if (!(d_contact > 0.0)) throw InvalidInput("detect_contacts: activation distance must be positive");
    const double deep = -10.0 * d_contact;
    std::vector<ContactPoint> out;
    std::vector<Vec3> world;
    world.reserve(body.vertices.size());
    for (const auto& v : body.vertices) world.push_back(q.transform_point(v));

    auto report = [&](int prim, int vert, const Vec3& normal, double d) {
        if (d < deep)
            throw DeepPenetration("vertex " + std::to_string(vert) + " penetrates primitive " + std::to_string(prim) +
                                  " by " + std::to_string(-d) + " m");
        out.push_back({world[vert], normal, d, prim, vert});
    };

    for (int pi = 0; pi < static_cast<int>(env.primitives.size()); ++pi) {
        const auto& prim = env.primitives[pi];
        for (int vi = 0; vi < static_cast<int>(world.size()); ++vi) {
            const Vec3& x = world[vi];
            if (const auto* hs = std::get_if<HalfSpace>(&prim)) {
                const double d = hs->normal.dot(x) - hs->offset;
                if (d <= d_contact) report(pi, vi, hs->normal, d);
                continue;
            }
            const auto& box = std::get<Box>(prim);
            const Vec3 l = box.pose.inverse_transform_point(x);
            const Vec3& he = box.half_extents;
            int best_axis = -1;
            double best_sign = 0.0;
            double best_d = -std::numeric_limits<double>::infinity();
            const bool inside = (l.cwiseAbs().array() <= he.array()).all();
            for (int a = 0; a < 3; ++a) {
                for (double s : {1.0, -1.0}) {
                    const double d = s * l[a] - he[a];
                    if (!inside) {
                        // face polygon check: the other two coordinates must project into the face
                        if (d < 0.0) continue;
                        bool within = true;
                        for (int b = 0; b < 3; ++b) {
                            if (b != a && std::abs(l[b]) > he[b] + 1e-12) within = false;
                        }
                        if (!within) continue;
                    }
                    if (d > best_d) {
                        best_d = d;
                        best_axis = a;
                        best_sign = s;
                    }
                }
            }
            if (best_axis < 0 || best_d > d_contact) continue;
            Vec3 n_local = Vec3::Zero();
            n_local[best_axis] = best_sign;
            report(pi, vi, box.pose.transform_vector(n_local), best_d);
        }
    }
    return out;
}

Eigen::VectorXd signed_distances(const std::vector<ContactPoint>& contacts) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(contacts.size()));
    for (std::size_t i = 0; i < contacts.size(); ++i) d[static_cast<Eigen::Index>(i)] = contacts[i].signed_distance;
    return d;
}

std::vector<FingerSite> sample_finger_sites(const ObjectBody& body, int count, std::uint64_t seed) {
    if (count < 1) throw InvalidInput("sample_finger_sites: count must be >= 1");
    const auto faces = convex_hull_faces(body.vertices);
    double total = 0.0;
    for (const auto& f : faces) total += f.area;
    if (!(total > 0.0)) throw DegenerateGeometry("object hull has zero surface area");

    // largest-remainder allocation, ties to the lower face index
    std::vector<int> alloc(faces.size());
    std::vector<std::pair<double, std::size_t>> rem;
    int assigned = 0;
    for (std::size_t i = 0; i < faces.size(); ++i) {
        const double share = count * faces[i].area / total;
        alloc[i] = static_cast<int>(std::floor(share));
        assigned += alloc[i];
        rem.emplace_back(share - alloc[i], i);
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first + 1e-12; });
    for (std::size_t r = 0; assigned < count; ++r, ++assigned) alloc[rem[r % rem.size()].second]++;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<FingerSite> sites;
    sites.reserve(static_cast<std::size_t>(count));
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
        const int k = alloc[fi];
        if (k == 0) continue;
        const auto& f = faces[fi];
        if (k == 1) {
            sites.push_back({f.centroid, f.normal});
            continue;
        }
        const FaceFrame fr = face_frame(f);
        std::vector<Eigen::Vector2d> poly;
        for (const auto& p : f.polygon) poly.emplace_back((p - fr.origin).dot(fr.u), (p - fr.origin).dot(fr.v));
        Eigen::Vector2d lo = poly[0], hi = poly[0];
        for (const auto& p : poly) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        auto inside = [&](const Eigen::Vector2d& p) {
            for (std::size_t i = 0; i < poly.size(); ++i) {
                if (cross2(poly[i], poly[(i + 1) % poly.size()], p) <= 1e-12) return false;
            }
            return true;
        };
        std::vector<Eigen::Vector2d> grid;
        const double spacing = std::sqrt(f.area / k);
        for (double shrink = 1.0; grid.size() < static_cast<std::size_t>(k); shrink *= 0.95) {
            grid.clear();
            const Eigen::Vector2d ext = hi - lo;
            const int nu = std::max(1, static_cast<int>(std::ceil(ext.x() / (spacing * shrink) - 1e-9)));
            const int nv = std::max(1, static_cast<int>(std::ceil(ext.y() / (spacing * shrink) - 1e-9)));
            for (int i = 0; i < nu; ++i) {
                for (int j = 0; j < nv; ++j) {
                    const Eigen::Vector2d p(lo.x() + (i + 0.5) * ext.x() / nu, lo.y() + (j + 0.5) * ext.y() / nv);
                    if (inside(p)) grid.push_back(p);
                }
            }
        }
        const double offset = unit(rng);
        const double step = static_cast<double>(grid.size()) / k;
        for (int i = 0; i < k; ++i) {
            const auto& p = grid[static_cast<std::size_t>(std::floor((i + offset) * step))];
            sites.push_back({fr.origin + p.x() * fr.u + p.y() * fr.v, f.normal});
        }
    }
    return sites;
}

}  // namespace modeplan
