#include "modeplan/task_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "modeplan/errors.hpp"

namespace modeplan {

using nlohmann::json;

namespace {

constexpr const char* kTrajectoryFormat = "modeplan-trajectory";
constexpr int kTrajectoryVersion = 1;

std::string join(const std::string& path, const std::string& key) { return path + "/" + key; }

void allow_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) throw ParseError(path.empty() ? "/" : path, "expected an object");
    for (const auto& [k, v] : obj.items()) {
        bool known = false;
        for (const char* allowed : keys) known = known || k == allowed;
        if (!known) throw ParseError(join(path, k), "unknown key");
    }
}

const json& field(const json& obj, const std::string& path, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(join(path, key), "missing field");
    return *it;
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ParseError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError(path, "number is not finite");
    return v;
}

long long integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ParseError(path, "expected an integer");
    return j.get<long long>();
}

std::uint64_t unsigned_integer(const json& j, const std::string& path) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
        throw ParseError(path, "expected a non-negative integer");
    return j.get<std::uint64_t>();
}

bool boolean(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ParseError(path, "expected true or false");
    return j.get<bool>();
}

std::string string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ParseError(path, "expected a string");
    return j.get<std::string>();
}

Eigen::VectorXd vector(const json& j, const std::string& path, long size = -1) {
    if (!j.is_array()) throw ParseError(path, "expected an array");
    if (size >= 0 && static_cast<long>(j.size()) != size)
        throw ParseError(path, "expected " + std::to_string(size) + " numbers, got " + std::to_string(j.size()));
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], join(path, std::to_string(i)));
    return v;
}

Vec3 vec3(const json& j, const std::string& path) { return vector(j, path, 3); }

Vec3 unit3(const json& j, const std::string& path) {
    const Vec3 v = vec3(j, path);
    if (std::abs(v.norm() - 1.0) > 1e-9) throw ParseError(path, "expected a unit vector");
    return v;
}

Pose pose(const json& j, const std::string& path) {
    const Eigen::VectorXd v = vector(j, path, 7);
    const double qn = v.tail<4>().norm();
    if (std::abs(qn - 1.0) > 1e-6) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "quaternion norm %.6g is not 1", qn);
        throw ParseError(path, buf);
    }
    std::array<double, 7> a{};
    for (int i = 0; i < 7; ++i) a[static_cast<std::size_t>(i)] = v[i];
    return Pose::from_array(a);
}

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

json to_json(const Pose& p) {
    json a = json::array();
    for (double x : p.to_array()) a.push_back(x);
    return a;
}

json to_json(const Twist& t) { return to_json(Eigen::VectorXd(t.to_vector())); }

json site_json(const std::optional<FingerSite>& s) {
    if (!s) return nullptr;
    return json{{"position", to_json(s->position)}, {"normal", to_json(s->normal)}};
}

std::optional<FingerSite> parse_site(const json& j, const std::string& path) {
    if (j.is_null()) return std::nullopt;
    allow_keys(j, path, {"position", "normal"});
    FingerSite s;
    s.position = vec3(field(j, path, "position"), join(path, "position"));
    s.normal = unit3(field(j, path, "normal"), join(path, "normal"));
    return s;
}

FingerAssignment parse_fingers(const json& j, const std::string& path) {
    if (!j.is_array()) throw ParseError(path, "expected an array");
    FingerAssignment out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_site(j[i], join(path, std::to_string(i))));
    return out;
}

json fingers_json(const FingerAssignment& fingers) {
    json a = json::array();
    for (const auto& f : fingers) a.push_back(site_json(f));
    return a;
}

ObjectBody parse_object(const json& j, const std::string& path) {
    allow_keys(j, path, {"vertices", "mass", "inertia", "com", "mu_env", "mu_mnp"});
    ObjectBody b;
    const json& verts = field(j, path, "vertices");
    const std::string vp = join(path, "vertices");
    if (!verts.is_array()) throw ParseError(vp, "expected an array");
    for (std::size_t i = 0; i < verts.size(); ++i) b.vertices.push_back(vec3(verts[i], join(vp, std::to_string(i))));
    if (b.vertices.size() < 4) throw ParseError(vp, "need at least 4 vertices");
    try {
        (void)convex_hull_faces(b.vertices);
    } catch (const DegenerateGeometry&) {
        throw ParseError(vp, "vertices are coplanar");
    }
    b.mass = number(field(j, path, "mass"), join(path, "mass"));
    if (!(b.mass > 0.0)) throw ParseError(join(path, "mass"), "mass must be positive (kg)");
    const json& in = field(j, path, "inertia");
    const std::string ip = join(path, "inertia");
    if (!in.is_array() || in.size() != 3) throw ParseError(ip, "expected a 3x3 matrix");
    for (int r = 0; r < 3; ++r) b.inertia.row(r) = vec3(in[static_cast<std::size_t>(r)], join(ip, std::to_string(r))).transpose();
    if ((b.inertia - b.inertia.transpose()).norm() > 1e-9 * (1.0 + b.inertia.norm()))
        throw ParseError(ip, "inertia must be symmetric");
    if (Eigen::SelfAdjointEigenSolver<Mat3>(b.inertia).eigenvalues().minCoeff() <= 0.0)
        throw ParseError(ip, "inertia must be positive definite");
    b.com = vec3(field(j, path, "com"), join(path, "com"));
    b.mu_env = number(field(j, path, "mu_env"), join(path, "mu_env"));
    b.mu_mnp = number(field(j, path, "mu_mnp"), join(path, "mu_mnp"));
    if (b.mu_env < 0.0) throw ParseError(join(path, "mu_env"), "friction must be >= 0");
    if (b.mu_mnp < 0.0) throw ParseError(join(path, "mu_mnp"), "friction must be >= 0");
    return b;
}

EnvironmentBody parse_environment(const json& j, const std::string& path) {
    if (!j.is_array()) throw ParseError(path, "expected an array of primitives");
    EnvironmentBody env;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = join(path, std::to_string(i));
        const json& e = j[i];
        if (!e.is_object()) throw ParseError(p, "expected an object");
        const std::string type = string(field(e, p, "type"), join(p, "type"));
        if (type == "halfspace") {
            allow_keys(e, p, {"type", "normal", "offset"});
            env.primitives.push_back(HalfSpace{unit3(field(e, p, "normal"), join(p, "normal")),
                                               number(field(e, p, "offset"), join(p, "offset"))});
        } else if (type == "box") {
            allow_keys(e, p, {"type", "pose", "half_extents"});
            Box b{pose(field(e, p, "pose"), join(p, "pose")), vec3(field(e, p, "half_extents"), join(p, "half_extents"))};
            if (!(b.half_extents.array() > 0.0).all()) throw ParseError(join(p, "half_extents"), "must be positive");
            env.primitives.push_back(b);
        } else {
            throw ParseError(join(p, "type"), "unknown primitive type '" + type + "'");
        }
    }
    return env;
}

json environment_json(const EnvironmentBody& env) {
    json a = json::array();
    for (const auto& prim : env.primitives) {
        if (const auto* hs = std::get_if<HalfSpace>(&prim)) {
            a.push_back({{"type", "halfspace"}, {"normal", to_json(hs->normal)}, {"offset", hs->offset}});
        } else {
            const auto& b = std::get<Box>(prim);
            a.push_back({{"type", "box"}, {"pose", to_json(b.pose)}, {"half_extents", to_json(b.half_extents)}});
        }
    }
    return a;
}

ManipulatorSpec parse_manipulator(const json& j, const std::string& path, const ObjectBody& object) {
    allow_keys(j, path, {"type", "n_fingers", "radius", "workspace", "start_fingers"});
    const std::string type = string(field(j, path, "type"), join(path, "type"));
    if (type != "free_balls") throw ParseError(join(path, "type"), "unsupported manipulator '" + type + "'");
    ManipulatorSpec m;
    m.n_fingers = static_cast<int>(integer(field(j, path, "n_fingers"), join(path, "n_fingers")));
    if (m.n_fingers < 0) throw ParseError(join(path, "n_fingers"), "must be >= 0");
    m.radius = number(field(j, path, "radius"), join(path, "radius"));
    if (!(m.radius > 0.0)) throw ParseError(join(path, "radius"), "must be positive (m)");
    const std::string wp = join(path, "workspace");
    const json& ws = field(j, path, "workspace");
    allow_keys(ws, wp, {"min", "max"});
    m.workspace.min = vec3(field(ws, wp, "min"), join(wp, "min"));
    m.workspace.max = vec3(field(ws, wp, "max"), join(wp, "max"));
    if (!(m.workspace.min.array() < m.workspace.max.array()).all()) throw ParseError(wp, "min must be below max");
    if (j.contains("start_fingers")) {
        const std::string sp = join(path, "start_fingers");
        m.start_fingers = parse_fingers(j["start_fingers"], sp);
        if (static_cast<int>(m.start_fingers.size()) != m.n_fingers) throw ParseError(sp, "need one entry per finger");
        const auto hull = convex_hull_faces(object.vertices);
        for (std::size_t i = 0; i < m.start_fingers.size(); ++i) {
            const auto& s = m.start_fingers[i];
            if (!s) continue;
            if (std::abs(hull_signed_distance(hull, s->position)) > 1e-6)
                throw ParseError(join(sp, std::to_string(i)), "site is not on the object surface");
        }
    }
    return m;
}

PlannerConfig parse_planner(const json& j, const std::string& path, DynamicsKind dynamics) {
    allow_keys(j, path,
               {"goal_bias", "w_r", "w_a", "max_iters", "extend_cap_trans", "extend_cap_rot", "h", "cor_every",
                "relocate_prob", "rng_seed", "relocate_attempts", "release_prob", "n_t", "d_contact", "eps", "eps_cor",
                "finger_site_count", "finger_site_seed", "max_contacts", "max_ss_modes", "step_displacement"});
    PlannerConfig c;
    auto num = [&](const char* k) { return number(field(j, path, k), join(path, k)); };
    auto opt_num = [&](const char* k, double& out) {
        if (j.contains(k)) out = number(j[k], join(path, k));
    };
    auto opt_int = [&](const char* k, int& out) {
        if (j.contains(k)) out = static_cast<int>(integer(j[k], join(path, k)));
    };
    c.goal_bias = num("goal_bias");
    c.w_r = num("w_r");
    c.w_a = num("w_a");
    c.max_iters = static_cast<int>(integer(field(j, path, "max_iters"), join(path, "max_iters")));
    c.extend_cap_trans = num("extend_cap_trans");
    c.extend_cap_rot = num("extend_cap_rot");
    c.h = num("h");
    c.cor_every = static_cast<int>(integer(field(j, path, "cor_every"), join(path, "cor_every")));
    c.relocate_prob = num("relocate_prob");
    c.rng_seed = unsigned_integer(field(j, path, "rng_seed"), join(path, "rng_seed"));
    opt_int("relocate_attempts", c.relocate_attempts);
    opt_num("release_prob", c.release_prob);
    opt_int("n_t", c.n_t);
    opt_num("d_contact", c.d_contact);
    opt_num("eps", c.eps);
    opt_num("eps_cor", c.eps_cor);
    opt_int("finger_site_count", c.finger_site_count);
    if (j.contains("finger_site_seed")) c.finger_site_seed = unsigned_integer(j["finger_site_seed"], join(path, "finger_site_seed"));
    opt_int("max_contacts", c.max_contacts);
    opt_int("max_ss_modes", c.max_ss_modes);
    opt_num("step_displacement", c.step_displacement);
    c.dynamics = dynamics;
    try {
        validate(c);
    } catch (const InvalidInput& e) {
        throw ParseError(path, e.what());
    }
    return c;
}

json planner_json(const PlannerConfig& c) {
    return {{"goal_bias", c.goal_bias},
            {"w_r", c.w_r},
            {"w_a", c.w_a},
            {"max_iters", c.max_iters},
            {"extend_cap_trans", c.extend_cap_trans},
            {"extend_cap_rot", c.extend_cap_rot},
            {"h", c.h},
            {"cor_every", c.cor_every},
            {"relocate_prob", c.relocate_prob},
            {"rng_seed", c.rng_seed},
            {"relocate_attempts", c.relocate_attempts},
            {"release_prob", c.release_prob},
            {"n_t", c.n_t},
            {"d_contact", c.d_contact},
            {"eps", c.eps},
            {"eps_cor", c.eps_cor},
            {"finger_site_count", c.finger_site_count},
            {"finger_site_seed", c.finger_site_seed},
            {"max_contacts", c.max_contacts},
            {"max_ss_modes", c.max_ss_modes},
            {"step_displacement", c.step_displacement}};
}

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("", std::string("malformed JSON: ") + e.what());
    }
}

ContactPoint parse_contact(const json& j, const std::string& path) {
    allow_keys(j, path, {"position", "normal", "signed_distance", "primitive", "vertex"});
    ContactPoint c;
    c.position = vec3(field(j, path, "position"), join(path, "position"));
    c.normal = unit3(field(j, path, "normal"), join(path, "normal"));
    c.signed_distance = number(field(j, path, "signed_distance"), join(path, "signed_distance"));
    c.primitive = static_cast<int>(integer(field(j, path, "primitive"), join(path, "primitive")));
    c.vertex = static_cast<int>(integer(field(j, path, "vertex"), join(path, "vertex")));
    return c;
}

Twist parse_twist(const json& j, const std::string& path) { return Twist::from_vector(vector(j, path, 6)); }

}  // namespace

bool TrajectoryStep::operator==(const TrajectoryStep& o) const {
    auto same_pose = [](const Pose& a, const Pose& b) { return a.to_array() == b.to_array(); };
    auto same_contacts = [](const std::vector<ContactPoint>& a, const std::vector<ContactPoint>& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i].position != b[i].position || a[i].normal != b[i].normal ||
                a[i].signed_distance != b[i].signed_distance || a[i].primitive != b[i].primitive ||
                a[i].vertex != b[i].vertex)
                return false;
        return true;
    };
    return index == o.index && time == o.time && node == o.node && same_pose(pose, o.pose) &&
           q_mnp.size() == o.q_mnp.size() && q_mnp == o.q_mnp && same_contacts(env_contacts, o.env_contacts) &&
           fingers == o.fingers && mode == o.mode && twist.to_vector() == o.twist.to_vector() &&
           correction.to_vector() == o.correction.to_vector() && relocation == o.relocation;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string format_hash(std::uint64_t hash) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("", "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Task parse_task(const std::string& text) {
    const json j = parse_text(text);
    allow_keys(j, "", {"object", "environment", "manipulator", "start", "goal", "dynamics", "planner", "sampling_bounds"});
    Task t;
    t.object = parse_object(field(j, "", "object"), "/object");
    t.environment = parse_environment(field(j, "", "environment"), "/environment");
    t.manipulator = parse_manipulator(field(j, "", "manipulator"), "/manipulator", t.object);
    t.start = pose(field(j, "", "start"), "/start");

    const json& g = field(j, "", "goal");
    allow_keys(g, "/goal", {"center", "translation_tolerance", "rotation_tolerance"});
    t.goal.center = pose(field(g, "/goal", "center"), "/goal/center");
    t.goal.translation_tolerance = number(field(g, "/goal", "translation_tolerance"), "/goal/translation_tolerance");
    t.goal.rotation_tolerance = number(field(g, "/goal", "rotation_tolerance"), "/goal/rotation_tolerance");
    if (!(t.goal.translation_tolerance > 0.0)) throw ParseError("/goal/translation_tolerance", "must be positive (m)");
    if (!(t.goal.rotation_tolerance > 0.0)) throw ParseError("/goal/rotation_tolerance", "must be positive (rad)");

    const json& d = field(j, "", "dynamics");
    allow_keys(d, "/dynamics", {"type", "gravity"});
    const std::string type = string(field(d, "/dynamics", "type"), "/dynamics/type");
    DynamicsKind kind;
    if (type == "quasistatic")
        kind = DynamicsKind::Quasistatic;
    else if (type == "quasidynamic")
        kind = DynamicsKind::Quasidynamic;
    else
        throw ParseError("/dynamics/type", "expected 'quasistatic' or 'quasidynamic'");
    if (d.contains("gravity")) t.gravity = vec3(d["gravity"], "/dynamics/gravity");

    t.planner = parse_planner(field(j, "", "planner"), "/planner", kind);

    const json& s = field(j, "", "sampling_bounds");
    allow_keys(s, "/sampling_bounds", {"min", "max"});
    t.sampling.min = vec3(field(s, "/sampling_bounds", "min"), "/sampling_bounds/min");
    t.sampling.max = vec3(field(s, "/sampling_bounds", "max"), "/sampling_bounds/max");
    if (!(t.sampling.min.array() <= t.sampling.max.array()).all())
        throw ParseError("/sampling_bounds", "min must not exceed max");

    try {
        validate(t);
    } catch (const InvalidInput& e) {
        throw ParseError("", e.what());
    }
    return t;
}

Task load_task(const std::string& path) { return parse_task(read_file(path)); }

std::string emit_task(const Task& t) {
    json verts = json::array();
    for (const auto& v : t.object.vertices) verts.push_back(to_json(v));
    json inertia = json::array();
    for (int r = 0; r < 3; ++r) inertia.push_back(to_json(Vec3(t.object.inertia.row(r).transpose())));
    json manip = {{"type", "free_balls"},
                  {"n_fingers", t.manipulator.n_fingers},
                  {"radius", t.manipulator.radius},
                  {"workspace", {{"min", to_json(t.manipulator.workspace.min)}, {"max", to_json(t.manipulator.workspace.max)}}}};
    if (!t.manipulator.start_fingers.empty()) manip["start_fingers"] = fingers_json(t.manipulator.start_fingers);
    const json j = {
        {"object",
         {{"vertices", verts},
          {"mass", t.object.mass},
          {"inertia", inertia},
          {"com", to_json(t.object.com)},
          {"mu_env", t.object.mu_env},
          {"mu_mnp", t.object.mu_mnp}}},
        {"environment", environment_json(t.environment)},
        {"manipulator", manip},
        {"start", to_json(t.start)},
        {"goal",
         {{"center", to_json(t.goal.center)},
          {"translation_tolerance", t.goal.translation_tolerance},
          {"rotation_tolerance", t.goal.rotation_tolerance}}},
        {"dynamics", {{"type", to_string(t.planner.dynamics)}, {"gravity", to_json(t.gravity)}}},
        {"planner", planner_json(t.planner)},
        {"sampling_bounds", {{"min", to_json(t.sampling.min)}, {"max", to_json(t.sampling.max)}}},
    };
    return j.dump(2) + "\n";
}

Trajectory parse_trajectory(const std::string& text) {
    const json j = parse_text(text);
    allow_keys(j, "", {"format", "version", "planner_version", "task_hash", "seed", "dynamics", "n_t", "h", "steps"});
    if (string(field(j, "", "format"), "/format") != kTrajectoryFormat)
        throw ParseError("/format", std::string("expected '") + kTrajectoryFormat + "'");
    if (integer(field(j, "", "version"), "/version") != kTrajectoryVersion)
        throw ParseError("/version", "unsupported trajectory version");
    Trajectory t;
    t.planner_version = string(field(j, "", "planner_version"), "/planner_version");
    const std::string hash = string(field(j, "", "task_hash"), "/task_hash");
    try {
        std::size_t used = 0;
        t.task_hash = std::stoull(hash, &used, 16);
        if (used != hash.size() || hash.size() != 16) throw std::invalid_argument(hash);
    } catch (const std::exception&) {
        throw ParseError("/task_hash", "expected 16 hex digits");
    }
    t.seed = unsigned_integer(field(j, "", "seed"), "/seed");
    t.dynamics = string(field(j, "", "dynamics"), "/dynamics");
    if (t.dynamics != "quasistatic" && t.dynamics != "quasidynamic")
        throw ParseError("/dynamics", "expected 'quasistatic' or 'quasidynamic'");
    t.n_t = static_cast<int>(integer(field(j, "", "n_t"), "/n_t"));
    t.h = number(field(j, "", "h"), "/h");
    const json& steps = field(j, "", "steps");
    if (!steps.is_array()) throw ParseError("/steps", "expected an array");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const std::string p = "/steps/" + std::to_string(i);
        const json& s = steps[i];
        allow_keys(s, p,
                   {"index", "time", "node", "pose", "q_mnp", "env_contacts", "finger_contacts", "mode", "twist",
                    "correction", "relocation"});
        TrajectoryStep st;
        st.index = static_cast<int>(integer(field(s, p, "index"), p + "/index"));
        if (st.index != static_cast<int>(i)) throw ParseError(p + "/index", "step indices must be contiguous from 0");
        st.time = number(field(s, p, "time"), p + "/time");
        st.node = static_cast<int>(integer(field(s, p, "node"), p + "/node"));
        st.pose = pose(field(s, p, "pose"), p + "/pose");
        st.q_mnp = vector(field(s, p, "q_mnp"), p + "/q_mnp");
        const json& ec = field(s, p, "env_contacts");
        if (!ec.is_array()) throw ParseError(p + "/env_contacts", "expected an array");
        for (std::size_t k = 0; k < ec.size(); ++k)
            st.env_contacts.push_back(parse_contact(ec[k], p + "/env_contacts/" + std::to_string(k)));
        st.fingers = parse_fingers(field(s, p, "finger_contacts"), p + "/finger_contacts");
        st.mode = string(field(s, p, "mode"), p + "/mode");
        st.twist = parse_twist(field(s, p, "twist"), p + "/twist");
        st.correction = parse_twist(field(s, p, "correction"), p + "/correction");
        st.relocation = boolean(field(s, p, "relocation"), p + "/relocation");
        t.steps.push_back(std::move(st));
    }
    return t;
}

std::string emit_trajectory(const Trajectory& t) {
    json steps = json::array();
    for (const auto& s : t.steps) {
        json contacts = json::array();
        for (const auto& c : s.env_contacts)
            contacts.push_back({{"position", to_json(c.position)},
                                {"normal", to_json(c.normal)},
                                {"signed_distance", c.signed_distance},
                                {"primitive", c.primitive},
                                {"vertex", c.vertex}});
        steps.push_back({{"index", s.index},
                         {"time", s.time},
                         {"node", s.node},
                         {"pose", to_json(s.pose)},
                         {"q_mnp", to_json(s.q_mnp)},
                         {"env_contacts", contacts},
                         {"finger_contacts", fingers_json(s.fingers)},
                         {"mode", s.mode},
                         {"twist", to_json(s.twist)},
                         {"correction", to_json(s.correction)},
                         {"relocation", s.relocation}});
    }
    const json j = {{"format", kTrajectoryFormat},
                    {"version", kTrajectoryVersion},
                    {"planner_version", t.planner_version},
                    {"task_hash", format_hash(t.task_hash)},
                    {"seed", t.seed},
                    {"dynamics", t.dynamics},
                    {"n_t", t.n_t},
                    {"h", t.h},
                    {"steps", steps}};
    return j.dump(1) + "\n";
}

}  // namespace modeplan
