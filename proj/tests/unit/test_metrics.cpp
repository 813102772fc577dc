#include "finsler/errors.hpp"
#include "finsler/metrics.hpp"

#include "generators.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <numbers>

using namespace finsler;
using finsler::testing::Gen;

namespace {

constexpr double kPi = std::numbers::pi;

TangentVec planar(double x, double y) { return TangentVec(x, y, 0, 0); }

// Central differences of F^2 / 2 with step 1e-5.
Eigen::Matrix2d fd_tensor(const ModelManifold& man, const ChartPoint& x, const Eigen::Vector2d& u)
{
    const double h = 1e-5;
    auto half_sq = [&](const Eigen::Vector2d& v) {
        const double f = man.norm(x, planar(v.x(), v.y()));
        return 0.5 * f * f;
    };
    Eigen::Matrix2d g;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Eigen::Vector2d ei = Eigen::Vector2d::Zero(), ej = Eigen::Vector2d::Zero();
            ei(i) = h;
            ej(j) = h;
            g(i, j) = (half_sq(u + ei + ej) - half_sq(u + ei - ej) - half_sq(u - ei + ej) + half_sq(u - ei - ej)) / (4 * h * h);
        }
    return g;
}

} // namespace

TEST(Norm, RandersValues)
{
    const auto flat = ModelManifold::torus({0, 0});
    const ChartPoint o = plane_point(0, 0);
    EXPECT_DOUBLE_EQ(flat.norm(o, planar(3, 4)), 5.0);
    const auto windy = ModelManifold::torus({0.5, 0});
    EXPECT_DOUBLE_EQ(windy.norm(o, planar(1, 0)), 1.5);
    EXPECT_DOUBLE_EQ(windy.norm(o, planar(-1, 0)), 0.5);
    EXPECT_EQ(windy.norm(o, TangentVec::Zero()), 0.0);
}

TEST(Norm, ModelConstructionValidates)
{
    EXPECT_THROW(ModelManifold::torus({0.6, 0.8}), DomainError);
    EXPECT_THROW(ModelManifold::cylinder(0.0), DomainError);
    EXPECT_THROW(ModelManifold::circle_times_sphere(-1.0), DomainError);
    const auto man = ModelManifold::circle_times_sphere(1.0);
    EXPECT_THROW(man.validate_point(ChartPoint(0, 1.1, 0, 0)), DomainError);
}

TEST(Norm, PositiveHomogeneityProperty)
{
    Gen g(1);
    for (int i = 0; i < 300; ++i) {
        const auto man = g.model();
        const ChartPoint x = g.point(man);
        const TangentVec v = g.tangent(man, x);
        const double lambda = g.uniform(1e-3, 10.0);
        EXPECT_NEAR(man.norm(x, lambda * v), lambda * man.norm(x, v), 1e-12 * (1 + lambda * man.norm(x, v)));
        EXPECT_GT(man.norm(x, v), 0.0);
    }
}

TEST(FundamentalTensor, FlatIsIdentityAndZeroIsRejected)
{
    const auto man = ModelManifold::torus({0, 0});
    const auto g = man.fundamental_tensor(plane_point(0.2, 0.3), planar(0.3, -1.2));
    EXPECT_TRUE(g.isApprox(Eigen::Matrix2d::Identity(), 1e-14));
    EXPECT_THROW(man.fundamental_tensor(plane_point(0, 0), TangentVec::Zero()), DomainError);
}

TEST(FundamentalTensor, MatchesFiniteDifferences)
{
    const auto man = ModelManifold::torus({0.3, 0});
    const ChartPoint x = plane_point(0.1, 0.1);
    const Eigen::MatrixXd g = man.fundamental_tensor(x, planar(1, 0));
    const Eigen::Matrix2d fd = fd_tensor(man, x, {1, 0});
    EXPECT_LT((g - fd).cwiseAbs().maxCoeff(), 1e-6);

    Gen gen(2);
    for (int i = 0; i < 50; ++i) {
        const auto m = ModelManifold::torus(gen.drift(0.8));
        const Eigen::Vector2d u(gen.normal(), gen.normal());
        EXPECT_LT((m.fundamental_tensor(x, planar(u.x(), u.y())) - fd_tensor(m, x, u)).cwiseAbs().maxCoeff(), 1e-5);
    }
}

TEST(FundamentalTensor, SymmetricPositiveDefiniteProperty)
{
    Gen g(3);
    for (int i = 0; i < 1000; ++i) {
        const auto man = g.model();
        const ChartPoint x = g.point(man);
        const Eigen::MatrixXd t = man.fundamental_tensor(x, g.tangent(man, x));
        EXPECT_LT((t - t.transpose()).cwiseAbs().maxCoeff(), 1e-14);
        EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t).eigenvalues().minCoeff(), 0.0);
    }
}

TEST(Distance, ClosedFormExamples)
{
    const auto flat = ModelManifold::torus({0, 0});
    EXPECT_NEAR(flat.distance(plane_point(0, 0), plane_point(0.3, 0.4)), 0.5, 1e-15);
    // wrapping: (0.9, 0) is 0.1 away through the seam
    EXPECT_NEAR(flat.distance(plane_point(0, 0), plane_point(0.9, 0)), 0.1, 1e-15);

    // in the cover the drift makes (0.4, 0) cost 0.6 forward and 0.2 back
    const auto windy = ModelManifold::torus({0.5, 0});
    EXPECT_NEAR(windy.flat_length({0.4, 0}), 0.6, 1e-15);
    EXPECT_NEAR(windy.flat_length({-0.4, 0}), 0.2, 1e-15);
    // on the quotient the forward trip may go the other way round: 0.6 * 0.5
    const ChartPoint p = plane_point(0, 0), q = plane_point(0.4, 0);
    EXPECT_NEAR(windy.distance(p, q), 0.3, 1e-15);
    EXPECT_NEAR(windy.distance(q, p), 0.2, 1e-15);
    EXPECT_EQ(windy.distance(p, p), 0.0);
}

TEST(Distance, TriangleInequalityProperty)
{
    Gen g(4);
    for (int i = 0; i < 300; ++i) {
        const auto man = g.model();
        const ChartPoint a = g.point(man), b = g.point(man), c = g.point(man);
        EXPECT_LE(man.distance(a, c), man.distance(a, b) + man.distance(b, c) + 1e-12);
        EXPECT_NEAR(man.distance(a, a), 0.0, 1e-15);
    }
}

TEST(Distance, EqualsShortestOracleChordProperty)
{
    Gen g(5);
    for (int i = 0; i < 100; ++i) {
        const auto man = g.model();
        const ChartPoint p = g.point(man), q = g.point(man);
        double best = 1e300;
        const int r = man.group_rank() == 2 ? 3 : 0;
        for (int a = -3; a <= 3; ++a)
            for (int b = -r; b <= r; ++b) {
                const HomotopyClass cls = man.group_rank() == 2 ? HomotopyClass(a, b) : HomotopyClass(a);
                const auto o = man.oracle_geodesics(p, q, cls, 20.0);
                if (!o.empty()) best = std::min(best, o.front().length);
            }
        EXPECT_NEAR(man.distance(p, q), best, 1e-10);
    }
}

TEST(Distance, ReversibilityDefectOfTheRandersTorus)
{
    Gen g(6);
    for (int i = 0; i < 100; ++i) {
        const Eigen::Vector2d b = g.drift(0.9);
        const auto man = ModelManifold::torus(b);
        const Eigen::Vector2d d(g.uniform(-3, 3), g.uniform(-3, 3));
        const double fwd = man.flat_length(d), back = man.flat_length(-d);
        EXPECT_NEAR(fwd - back, 2.0 * b.dot(d), 1e-12);
    }
}

TEST(Oracle, TorusLoopAndProductArcs)
{
    const auto torus = ModelManifold::torus({0, 0});
    const auto loop = torus.oracle_geodesics(plane_point(0, 0), plane_point(0, 0), HomotopyClass(1, 0), 10.0);
    ASSERT_EQ(loop.size(), 1u);
    EXPECT_NEAR(loop[0].length, 1.0, 1e-15);
    EXPECT_EQ(loop[0].index, 0);

    const auto man = ModelManifold::circle_times_sphere(1.0);
    const auto arcs = man.oracle_geodesics(product_point(0, {1, 0, 0}), product_point(0, {0, 1, 0}), HomotopyClass(0), 8.0);
    ASSERT_EQ(arcs.size(), 3u);
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(arcs[static_cast<std::size_t>(i)].length, (0.5 + i) * kPi, 1e-12);
        EXPECT_EQ(arcs[static_cast<std::size_t>(i)].index, i);
    }
}

TEST(Oracle, DegenerateArcsAreExcludedWithWarning)
{
    const auto man = ModelManifold::circle_times_sphere(1.0);
    std::vector<std::string> warn;
    // The base arc lies strictly inside (0, pi), so no lift of it is a multiple of pi.
    const auto arcs = man.oracle_geodesics(product_point(0, {1, 0, 0}), product_point(0.5, {0, 1, 0}), HomotopyClass(0), 30.0, &warn);
    EXPECT_TRUE(warn.empty());
    for (const auto& a : arcs) EXPECT_LE(a.length, 30.0);
    EXPECT_THROW(man.oracle_geodesics(product_point(0, {1, 0, 0}), product_point(0, {-1, 0, 0}), HomotopyClass(0), 10.0),
                 DomainError);
}

TEST(Oracle, CylinderIterateWindsTwice)
{
    const auto man = ModelManifold::cylinder(2.0);
    const ChartPoint p = plane_point(0.5, 1.0);
    const auto o = man.oracle_geodesics(p, p, HomotopyClass(2), 10.0);
    ASSERT_EQ(o.size(), 1u);
    EXPECT_NEAR(o[0].length, 4.0, 1e-15);
    EXPECT_NEAR(man.symmetric_distance(o[0].end(), p), 0.0, 1e-12);
}

TEST(Covering, DeckAndReduceAgree)
{
    Gen g(7);
    for (int i = 0; i < 200; ++i) {
        const auto man = g.model();
        const ChartPoint x = g.point(man);
        const HomotopyClass h = man.group_rank() == 2 ? HomotopyClass(g.integer(-5, 5), g.integer(-5, 5))
                                                      : HomotopyClass(g.integer(-5, 5));
        const ChartPoint y = man.translate(man.reduce(x), h);
        EXPECT_EQ(man.deck(y), h);
        EXPECT_LT((man.reduce(y) - man.reduce(x)).norm(), 1e-9);
        EXPECT_LT(man.symmetric_distance(x, y), 1e-9);
    }
}

TEST(Segments, GradientMatchesFiniteDifferences)
{
    Gen g(8);
    for (int i = 0; i < 100; ++i) {
        const auto man = g.model();
        const DiscretePath p = g.walk(man, 1);
        const ChartPoint x = p.nodes[0], y = p.nodes[1];
        TangentVec gx, gy;
        man.segment_sq(x, y, &gx, &gy);
        const auto bx = man.tangent_basis(x);
        for (int c = 0; c < bx.cols(); ++c) {
            const double h = 1e-6;
            Eigen::VectorXd xi = Eigen::VectorXd::Zero(bx.cols());
            xi(c) = h;
            const double fp = man.segment_sq(man.retract(x, xi.data()), y, nullptr, nullptr);
            xi(c) = -h;
            const double fm = man.segment_sq(man.retract(x, xi.data()), y, nullptr, nullptr);
            EXPECT_NEAR((fp - fm) / (2 * h), gx.dot(bx.col(c)), 1e-6);
        }
    }
}
