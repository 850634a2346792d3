#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "modeplan/contact_modes.hpp"
#include "modeplan/errors.hpp"
#include "oracles.hpp"

using namespace modeplan;

namespace {

std::vector<ContactPoint> to_points(const std::vector<oracle::OracleContact>& cs) {
    std::vector<ContactPoint> out;
    for (const auto& c : cs) out.push_back({c.p, c.n, 0.0, 0, static_cast<int>(out.size())});
    return out;
}

std::vector<oracle::OracleContact> cube_on_floor(double half) {
    std::vector<oracle::OracleContact> out;
    for (double x : {-half, half})
        for (double y : {-half, half}) out.push_back({Vec3(x, y, -half), Vec3::UnitZ()});
    return out;
}

std::vector<std::string> encode_cs(const std::vector<CsMode>& modes) {
    std::vector<std::string> out;
    for (const auto& m : modes) {
        std::string s;
        for (auto c : m) s += c == ContactState::Maintain ? 'M' : 'S';
        out.push_back(s);
    }
    return out;
}

CsMode decode_cs(const std::string& s) {
    CsMode m;
    for (char c : s) m.push_back(c == 'M' ? ContactState::Maintain : ContactState::Separate);
    return m;
}

std::set<std::string> encode_ss(const std::vector<ContactMode>& modes) {
    std::set<std::string> out;
    for (const auto& m : modes) out.insert(m.encode());
    return out;
}

}  // namespace

TEST(GraspMap, ContactAtOrigin) {
    const ContactGrasp G = build_grasp_map(ContactPoint{Vec3::Zero(), Vec3::UnitZ()}, Pose::identity());
    Mat3 F;
    F << 0, 1, 0, -1, 0, 0, 0, 0, 1;
    EXPECT_TRUE(G.topRows<3>().isApprox(F));
    EXPECT_EQ(G.bottomRows<3>(), Mat3::Zero());
}

TEST(GraspMap, NormalColumnTorque) {
    const ContactGrasp G = build_grasp_map(ContactPoint{Vec3(1, 0, 0), Vec3::UnitZ()}, Pose::identity());
    EXPECT_TRUE(G.col(2).tail<3>().isApprox(Vec3(0, -1, 0)));
}

TEST(GraspMap, UpwardTranslationSeparates) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 20; ++i) {
        const ContactGrasp G = build_grasp_map(ContactPoint{Vec3(u(rng), u(rng), 0), Vec3::UnitZ()}, Pose::identity());
        Vec6 xi = Vec6::Zero();
        xi(2) = 1.0;
        EXPECT_NEAR((G.transpose() * xi)(2), 1.0, 1e-15);
    }
}

TEST(GraspMap, BodyFrameUnderRotation) {
    // a world contact seen from a rotated body gives the same contact velocity for the matching twist
    const Pose q(Vec3(0.2, 0.1, 0.3), Quat(0.8, 0.2, 0.4, 0.4));
    const ContactPoint c{Vec3(0.25, 0.0, 0.0), Vec3(0, 0, 1)};
    const ContactGrasp G = build_grasp_map(c, q);
    Vec6 xi;
    xi << 0.3, -0.2, 0.5, 0.1, 0.7, -0.4;
    const Vec3 p_body = q.inverse_transform_point(c.position);
    const Vec3 v_world = q.transform_vector(xi.head<3>() + xi.tail<3>().cross(p_body));
    EXPECT_NEAR((G.transpose() * xi)(2), v_world.dot(c.normal), 1e-12);
}

TEST(ContactFrame, Orthonormal) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    for (int i = 0; i < 200; ++i) {
        const Vec3 n = Vec3(g(rng), g(rng), g(rng)).normalized();
        const ContactFrame f = make_contact_frame(Vec3::Zero(), n);
        Mat3 R;
        R << f.t1, f.t2, f.n;
        EXPECT_TRUE((R.transpose() * R).isApprox(Mat3::Identity(), 1e-12));
        EXPECT_NEAR(R.determinant(), 1.0, 1e-12);
        Vec3 t1, t2;
        oracle::tangent_frame(n, t1, t2);
        EXPECT_TRUE(t1.isApprox(f.t1, 1e-12));
    }
}

TEST(CsModes, NoContactsGivesOneEmptyMode) {
    const auto modes = enumerate_cs_modes({});
    ASSERT_EQ(modes.size(), 1u);
    EXPECT_TRUE(modes[0].empty());
}

TEST(CsModes, SingleContactBothStates) {
    const auto modes = enumerate_cs_modes(build_grasp_map(to_points({{Vec3::Zero(), Vec3::UnitZ()}}), Pose::identity()));
    EXPECT_EQ(encode_cs(modes), (std::vector<std::string>{"M", "S"}));
}

TEST(CsModes, CubeOnFloorTen) {
    const auto contacts = cube_on_floor(0.5);
    const auto modes = encode_cs(enumerate_cs_modes(build_grasp_map(to_points(contacts), Pose::identity())));
    const auto oracle_modes = oracle::brute_force_cs(contacts);
    EXPECT_EQ(modes.size(), 10u);
    EXPECT_EQ(modes, oracle_modes);
    // all-M, all-S, 4 single corners and 4 adjacent edges
    int single = 0, edge = 0;
    for (const auto& m : modes) {
        const auto k = std::count(m.begin(), m.end(), 'M');
        if (k == 1) ++single;
        if (k == 2) ++edge;
    }
    EXPECT_EQ(single, 4);
    EXPECT_EQ(edge, 4);
    EXPECT_TRUE(std::is_sorted(modes.begin(), modes.end()));
}

TEST(CsModes, RandomInstancesMatchOracle) {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<oracle::OracleContact> cs;
        const int n = 1 + trial % 5;
        for (int i = 0; i < n; ++i) {
            const Vec3 p = Vec3(g(rng), g(rng), g(rng)).normalized();
            cs.push_back({p, -p});
        }
        const auto got = encode_cs(enumerate_cs_modes(build_grasp_map(to_points(cs), Pose::identity())));
        EXPECT_EQ(got, oracle::brute_force_cs(cs)) << "trial " << trial;
    }
}

TEST(CsModes, TooManyContactsThrows) {
    std::vector<oracle::OracleContact> cs(5, {Vec3::Zero(), Vec3::UnitZ()});
    EnumerationOptions opt;
    opt.max_contacts = 4;
    EXPECT_THROW(enumerate_cs_modes(build_grasp_map(to_points(cs), Pose::identity()), opt), TooManyContacts);
}

TEST(SsModes, AllSeparateHasOneMode) {
    const auto contacts = cube_on_floor(0.5);
    const auto grasp = build_grasp_map(to_points(contacts), Pose::identity());
    const auto modes = enumerate_ss_modes(decode_cs("SSSS"), grasp, TangentBasis::make(2));
    ASSERT_EQ(modes.size(), 1u);
    EXPECT_EQ(modes[0].encode(), "SSSS");
}

TEST(SsModes, SinglePointAllowsAllNine) {
    const auto grasp = build_grasp_map(to_points({{Vec3::Zero(), Vec3::UnitZ()}}), Pose::identity());
    const auto modes = enumerate_ss_modes(decode_cs("M"), grasp, TangentBasis::make(2));
    EXPECT_EQ(modes.size(), 9u);
    EXPECT_EQ(modes.front().encode(), "M00");
}

TEST(SsModes, CubeAllMaintainMatchesOracle) {
    const auto contacts = cube_on_floor(0.5);
    const auto grasp = build_grasp_map(to_points(contacts), Pose::identity());
    const auto got = encode_ss(enumerate_ss_modes(decode_cs("MMMM"), grasp, TangentBasis::make(2)));
    const auto expect = oracle::brute_force_ss(contacts, "MMMM");
    EXPECT_EQ(got, std::set<std::string>(expect.begin(), expect.end()));
    // uniform translations (8 sliding directions + sticking) are all present
    for (const std::string s : {"0+", "0-", "+0", "-0", "++", "+-", "-+", "--"})
        EXPECT_TRUE(got.count("M" + s + "M" + s + "M" + s + "M" + s)) << s;
}

TEST(SsModes, EveryCsModeMatchesOracle) {
    const auto contacts = cube_on_floor(0.05);
    const auto grasp = build_grasp_map(to_points(contacts), Pose::identity());
    for (const auto& cs : enumerate_cs_modes(grasp)) {
        std::string text;
        for (auto c : cs) text += c == ContactState::Maintain ? 'M' : 'S';
        const auto expect = oracle::brute_force_ss(contacts, text);
        EXPECT_EQ(encode_ss(enumerate_ss_modes(cs, grasp, TangentBasis::make(2))),
                  std::set<std::string>(expect.begin(), expect.end()))
            << text;
    }
}

TEST(SsModes, OrderedByEncodingWithStickingFirst) {
    const auto contacts = cube_on_floor(0.5);
    const auto grasp = build_grasp_map(to_points(contacts), Pose::identity());
    const auto modes = enumerate_ss_modes(decode_cs("MMSS"), grasp, TangentBasis::make(2));
    ASSERT_FALSE(modes.empty());
    EXPECT_EQ(modes.front().encode(), "M00M00SS");
    for (std::size_t i = 1; i < modes.size(); ++i)
        EXPECT_TRUE(mode_encoding_less(modes[i - 1].encode(), modes[i].encode()));
}

TEST(SsModes, CapKeepsStickingAndIsDeterministic) {
    const auto contacts = cube_on_floor(0.5);
    const auto grasp = build_grasp_map(to_points(contacts), Pose::identity());
    EnumerationOptions opt;
    opt.max_ss_modes = 5;
    opt.seed = 3;
    const auto a = enumerate_ss_modes(decode_cs("MMMM"), grasp, TangentBasis::make(2), opt);
    const auto b = enumerate_ss_modes(decode_cs("MMMM"), grasp, TangentBasis::make(2), opt);
    ASSERT_EQ(a.size(), 5u);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.front(), ContactMode::all_sticking(decode_cs("MMMM"), 2));
}

TEST(ModeEncoding, RoundTripAndOrder) {
    const ContactMode m = ContactMode::decode("M0+SM-0", 2);
    EXPECT_EQ(m.encode(), "M0+SM-0");
    EXPECT_FALSE(m.sticking(0));
    EXPECT_TRUE(mode_encoding_less("M00", "M0+"));
    EXPECT_TRUE(mode_encoding_less("M0+", "M0-"));
    EXPECT_TRUE(mode_encoding_less("M--", "S"));
    EXPECT_THROW(ContactMode::decode("M0", 2), InvalidInput);
    EXPECT_THROW(ContactMode::decode("X", 2), InvalidInput);
}

TEST(TangentBasis, TwoDirectionsAreAxes) {
    const TangentBasis b = TangentBasis::make(2);
    ASSERT_EQ(b.directions.size(), 2u);
    EXPECT_EQ(b.directions[0], Eigen::Vector2d(1, 0));
    EXPECT_EQ(b.directions[1], Eigen::Vector2d(0, 1));
}

TEST(SlidingCone, Edges) {
    const TangentBasis b = TangentBasis::make(2);
    auto edges = sliding_cone_edges({1, 0}, b);
    ASSERT_EQ(edges.size(), 1u);
    EXPECT_TRUE(edges[0].isApprox(Eigen::Vector2d(1, 0)));
    edges = sliding_cone_edges({1, 1}, b);
    ASSERT_EQ(edges.size(), 2u);
    EXPECT_TRUE(edges[0].isApprox(Eigen::Vector2d(1, 0)));
    EXPECT_TRUE(edges[1].isApprox(Eigen::Vector2d(0, 1)));
    // half-plane intersection of x < 0 and y > 0
    edges = sliding_cone_edges({-1, 1}, b);
    ASSERT_EQ(edges.size(), 2u);
    EXPECT_TRUE(edges[0].isApprox(Eigen::Vector2d(0, 1)));
    EXPECT_TRUE(edges[1].isApprox(Eigen::Vector2d(-1, 0)));
    EXPECT_THROW(sliding_cone_edges({0, 0}, b), InvalidInput);
}

TEST(VelocityConstraints, RowCounts) {
    const auto contacts = cube_on_floor(0.5);
    const auto grasp = build_grasp_map(to_points(contacts), Pose::identity());
    const TangentBasis b = TangentBasis::make(2);
    const auto sep = mode_velocity_constraints(ContactMode::decode("SSSS", 2), grasp, {}, b, 0, 1e-6);
    EXPECT_EQ(sep.num_eq(), 0);
    EXPECT_EQ(sep.num_ineq(), 4);
    const auto stick = mode_velocity_constraints(ContactMode::decode("M00M00M00M00", 2), grasp, {}, b, 0, 0.0);
    EXPECT_EQ(stick.num_eq(), 12);
    EXPECT_EQ(stick.num_ineq(), 0);
}

TEST(VelocityConstraints, FingerTracksObjectPoint) {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g;
    const Vec3 p(0.05, 0.01, -0.02);
    const Vec3 n_in = Vec3(g(rng), g(rng), g(rng)).normalized();
    const ContactFrame frame = make_contact_frame(p, n_in);
    FingerContact f;
    f.grasp = grasp_from_frame(frame);
    Mat3 C;
    C << frame.t1.transpose(), frame.t2.transpose(), frame.n.transpose();
    f.jacobian = C;  // point finger: qdot is the fingertip velocity
    const auto sys = mode_velocity_constraints(ContactMode{}, {}, {f}, TangentBasis::make(2), 3, 0.0);
    ASSERT_EQ(sys.num_eq(), 3);
    for (int i = 0; i < 10; ++i) {
        const Vec3 v(g(rng), g(rng), g(rng)), w(g(rng), g(rng), g(rng));
        Eigen::VectorXd x(9);
        x << v, w, v + w.cross(p);
        EXPECT_LT((sys.A_eq * x - sys.b_eq).cwiseAbs().maxCoeff(), 1e-12);
        x.tail<3>() += Vec3(0, 0, 1e-3);
        EXPECT_GT((sys.A_eq * x - sys.b_eq).cwiseAbs().maxCoeff(), 1e-4);
    }
}

TEST(ForceConstraints, AllSeparateHasNoForces) {
    const auto grasp = build_grasp_map(to_points(cube_on_floor(0.5)), Pose::identity());
    const auto fb = mode_force_constraints(ContactMode::decode("SSSS", 2), grasp, {}, 0.5, 0.5, TangentBasis::make(2));
    EXPECT_EQ(fb.wrench.cols(), 0);
}

TEST(ForceConstraints, StickingConeRowGoesNegative) {
    const auto grasp = build_grasp_map(to_points({{Vec3::Zero(), Vec3::UnitZ()}}), Pose::identity());
    const auto fb = mode_force_constraints(ContactMode::decode("M00", 2), grasp, {}, 0.5, 0.5, TangentBasis::make(2));
    ASSERT_EQ(fb.wrench.cols(), 3);
    const Eigen::Vector3d lambda(0.6, 0.0, 1.0);
    const Eigen::VectorXd slack = fb.rows.A_ineq * lambda - fb.rows.b_ineq;
    EXPECT_NEAR(slack.minCoeff(), 0.5 - 0.6, 1e-12);
    EXPECT_GE((fb.rows.A_ineq * Eigen::Vector3d(0.4, 0.1, 1.0) - fb.rows.b_ineq).minCoeff(), 0.0);
}

TEST(ForceConstraints, SlidingForceBindsCoulomb) {
    const auto grasp = build_grasp_map(to_points({{Vec3::Zero(), Vec3::UnitZ()}}), Pose::identity());
    const auto fb = mode_force_constraints(ContactMode::decode("M+0", 2), grasp, {}, 0.3, 0.3, TangentBasis::make(2));
    ASSERT_EQ(fb.wrench.cols(), 2);  // normal + one edge
    ASSERT_EQ(fb.rows.num_eq(), 1);
    // the equality fixes the edge force to mu * lambda_n
    const Eigen::Vector2d lambda(1.0, 0.3);
    EXPECT_NEAR((fb.rows.A_eq * lambda - fb.rows.b_eq).norm(), 0.0, 1e-15);
    const Vec6 w = fb.wrench * lambda;
    // tangential force in the contact frame is -0.3 * (1, 0)
    EXPECT_NEAR(w.head<3>().dot(grasp[0].col(0).head<3>()), -0.3, 1e-12);
    EXPECT_NEAR(w.head<3>().dot(grasp[0].col(1).head<3>()), 0.0, 1e-12);
    EXPECT_NEAR(w.head<3>().dot(grasp[0].col(2).head<3>()), 1.0, 1e-12);
}
