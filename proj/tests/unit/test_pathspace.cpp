#include "finsler/errors.hpp"
#include "finsler/pathspace.hpp"

#include "generators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace finsler;
using finsler::testing::Gen;
using finsler::testing::product_arc;

namespace {

constexpr double kPi = std::numbers::pi;

DiscretePath straight(const ModelManifold& man, const ChartPoint& a, const ChartPoint& b, int k)
{
    std::vector<ChartPoint> nodes;
    for (int i = 0; i <= k; ++i) nodes.push_back(a + (b - a) * (static_cast<double>(i) / k));
    return make_path(man, std::move(nodes));
}

double max_node_gap(const DiscretePath& a, const DiscretePath& b)
{
    double gap = 0.0;
    for (std::size_t i = 0; i < a.nodes.size(); ++i) gap = std::max(gap, (a.nodes[i] - b.nodes[i]).norm());
    return gap;
}

} // namespace

TEST(Energy, StraightSegmentExample)
{
    const auto man = ModelManifold::torus({0, 0});
    const auto path = straight(man, plane_point(0, 0), plane_point(0.3, 0.4), 4);
    EXPECT_NEAR(discrete_energy(path), 0.25, 1e-15);
    EXPECT_NEAR(path_length(path), 0.5, 1e-15);
}

TEST(Energy, DominatesSquaredLengthProperty)
{
    Gen g(11);
    for (int i = 0; i < 300; ++i) {
        const auto man = g.model();
        const auto path = g.walk(man, g.integer(2, 12));
        const double len = path_length(path);
        EXPECT_GE(discrete_energy(path), len * len * (1 - 1e-12));
    }
}

TEST(Energy, GradientMatchesFiniteDifferences)
{
    Gen g(12);
    for (int i = 0; i < 30; ++i) {
        const auto man = g.model();
        const auto path = g.walk(man, 6, 0.3);
        const Eigen::VectorXd grad = energy_gradient(path);
        ASSERT_EQ(grad.size(), path.dof());
        const int d = man.local_dim();
        for (int c = 0; c < path.dof(); ++c) {
            const int node = 1 + c / d;
            Eigen::VectorXd xi = Eigen::VectorXd::Zero(d);
            const double h = 1e-6;
            auto shifted = [&](double sign) {
                DiscretePath p = path;
                xi(c % d) = sign * h;
                p.nodes[static_cast<std::size_t>(node)] = man.retract(path.nodes[static_cast<std::size_t>(node)], xi.data());
                return discrete_energy(p);
            };
            EXPECT_NEAR((shifted(1) - shifted(-1)) / (2 * h), grad(c), 1e-5 * (1 + std::abs(grad(c))));
        }
    }
}

TEST(MakePath, RejectsFarApartNodes)
{
    const auto man = ModelManifold::torus({0, 0});
    EXPECT_THROW(make_path(man, {plane_point(0, 0), plane_point(0.9, 0)}), RefinementRequired);
    EXPECT_EQ(choose_segment_count(man, 1.0) % 2, 0);
}

TEST(Regeodesify, SmallParameterIsIdentityProperty)
{
    Gen g(13);
    for (int i = 0; i < 100; ++i) {
        const auto man = g.model();
        const auto path = g.walk(man, 2 * g.integer(1, 6));
        for (double s : {0.0, 0.25, 0.5}) EXPECT_EQ(max_node_gap(regeodesify(path, s), path), 0.0);
    }
}

TEST(Regeodesify, GeodesicsAreFixedPoints)
{
    const auto man = ModelManifold::torus({0.3, 0.1});
    const auto path = straight(man, plane_point(0.1, 0.2), plane_point(1.4, 0.9), 8);
    for (double s : {0.75, 1.0}) EXPECT_LT(max_node_gap(regeodesify(path, s), path), 1e-12);

    const auto sphere = ModelManifold::circle_times_sphere(1.0);
    const auto arc = product_arc(sphere, 0.4, 2.5, 8);
    EXPECT_LT(max_node_gap(regeodesify(arc, 1.0), arc), 1e-12);
}

TEST(Regeodesify, NeverIncreasesEnergyProperty)
{
    Gen g(14);
    for (int i = 0; i < 100; ++i) {
        const auto man = g.model();
        const auto path = g.walk(man, 2 * g.integer(1, 6));
        for (double s : {0.25, 0.5, 1.0}) EXPECT_LE(discrete_energy(regeodesify(path, s)), discrete_energy(path) + 1e-12);
    }
}

TEST(Descend, DiagonalOfTheFlatTorus)
{
    const auto man = ModelManifold::torus({0, 0});
    // a bent path from 0 to (1, 1) in the class of the diagonal loop
    std::vector<ChartPoint> nodes;
    for (int i = 0; i <= 8; ++i) {
        const double t = i / 8.0;
        nodes.push_back(plane_point(t + 0.05 * std::sin(kPi * t), t));
    }
    const auto rec = descend(make_path(man, nodes));
    EXPECT_NEAR(rec.length, std::sqrt(2.0), 1e-8);
    EXPECT_EQ(rec.cls, HomotopyClass(1, 1));
    EXPECT_EQ(rec.index, 0);

    const auto again = descend(rec.path);
    EXPECT_LT(max_node_gap(again.path, rec.path), 1e-9);
    EXPECT_LE(again.iterations, 1);
}

TEST(Descend, ProductLongArcIsCritical)
{
    const auto man = ModelManifold::circle_times_sphere(1.0);
    const auto arc = product_arc(man, 1.0, 1.5 * kPi, 16);
    DescentOptions opts;
    opts.mode = DescentMode::critical;
    const auto rec = descend(arc, opts);
    EXPECT_NEAR(rec.length, std::hypot(1.0, 1.5 * kPi), 1e-8);
    EXPECT_EQ(rec.index, 1);
}

TEST(MorseIndex, SphereArcExamples)
{
    const auto man = ModelManifold::circle_times_sphere(1.0);
    EXPECT_EQ(morse_index(product_arc(man, 0.0, 0.5 * kPi, 8)), 0);
    EXPECT_EQ(morse_index(product_arc(man, 0.0, 1.5 * kPi, 12)), 1);
    EXPECT_EQ(morse_index(product_arc(man, 0.0, 2.5 * kPi, 16)), 2);
    EXPECT_EQ(morse_index(product_arc(man, 0.3, 3.5 * kPi, 24)), 3);
}

TEST(MorseIndex, FlatGeodesicsHaveIndexZero)
{
    Gen g(15);
    for (int i = 0; i < 20; ++i) {
        const auto man = ModelManifold::torus(g.drift());
        const ChartPoint a = plane_point(g.uniform(0, 1), g.uniform(0, 1));
        const ChartPoint b = a + ChartPoint(g.uniform(-2, 2), g.uniform(-2, 2), 0, 0);
        const double len = man.flat_length((b - a).head<2>());
        EXPECT_EQ(morse_index(straight(man, a, b, choose_segment_count(man, len))), 0);
    }
}

TEST(MorseIndex, RestrictionNeverRaisesIndexProperty)
{
    const auto man = ModelManifold::circle_times_sphere(1.0);
    Gen g(16);
    for (int i = 0; i < 10; ++i) {
        const double phi = g.uniform(0.6, 3.4) * kPi;
        if (std::abs(phi / kPi - std::round(phi / kPi)) < 0.1) continue;
        const auto arc = product_arc(man, g.uniform(-1, 1), phi, 0);
        const int full = morse_index(arc);
        EXPECT_EQ(full, static_cast<int>(std::floor(phi / kPi)));
        for (double s : {0.25, 0.5, 0.75}) {
            const double sub = s * phi / kPi;
            if (std::abs(sub - std::round(sub)) < 0.05) continue;
            EXPECT_LE(morse_index(restrict_to(arc, s)), full);
        }
    }
}

TEST(Hessian, SymmetricUpToDifferencingError)
{
    Gen g(17);
    for (int i = 0; i < 20; ++i) {
        const auto man = g.model();
        const auto rep = energy_hessian(g.walk(man, 6, 0.3));
        EXPECT_LT(rep.asymmetry, 1e-4);
    }
}

TEST(Paths, ConcatenateAndReverse)
{
    const auto man = ModelManifold::torus({0.2, 0});
    const auto a = straight(man, plane_point(0, 0), plane_point(0.5, 0), 2);
    const auto b = straight(man, plane_point(0.5, 0), plane_point(1.0, 0), 2);
    const auto ab = concatenate(a, b);
    EXPECT_EQ(ab.k(), 4);
    EXPECT_NEAR(path_length(ab), path_length(a) + path_length(b), 1e-14);
    EXPECT_EQ(ab.lift_class(), HomotopyClass(1, 0));
    // reversing against the drift costs 0.8 per unit instead of 1.2
    EXPECT_NEAR(path_length(reversed(ab)), 0.8, 1e-14);
}
