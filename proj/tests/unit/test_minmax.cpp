#include "finsler/errors.hpp"
#include "finsler/experiment.hpp"
#include "finsler/minmax.hpp"

#include "generators.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace finsler;
using finsler::testing::product_arc;

namespace {

constexpr double kPi = std::numbers::pi;

GeodesicRecord product_minimizer(double theta)
{
    const auto man = ModelManifold::circle_times_sphere(1.0);
    return record_of(product_arc(man, theta, 0.5 * kPi, 0));
}

double max_energy(const Sweepout& sw)
{
    double e = 0.0;
    for (const auto& m : sw.members) e = std::max(e, discrete_energy(m));
    return e;
}

} // namespace

TEST(Sweepout, RejectedWhereSecondHomotopyVanishes)
{
    const auto man = ModelManifold::torus({0.1, 0});
    const auto rec = record_of(make_path(man, {plane_point(0, 0), plane_point(0.2, 0), plane_point(0.4, 0)}));
    EXPECT_THROW(build_sweepout(rec), NotApplicable);
    EXPECT_THROW(build_sweepout(product_minimizer(0.0), SphereSweep::great_circles, 4), DomainError);
}

TEST(Sweepout, BaseMemberIsTheMinimizerAndClassIsShared)
{
    const auto min = product_minimizer(1.3);
    const auto sw = build_sweepout(min);
    ASSERT_EQ(sw.members.size(), 64u);
    const auto& base = sw.members[static_cast<std::size_t>(sw.base_index)];
    EXPECT_NEAR(path_length(base), min.length, 1e-9);
    for (const auto& m : sw.members) {
        EXPECT_EQ(m.lift_class(), min.cls);
        EXPECT_LT((m.front() - min.path.front()).norm(), 1e-15);
        EXPECT_LT((m.back() - min.path.back()).norm(), 1e-15);
    }
}

TEST(Sweepout, InitialMaximumIsBoundedByTheConcatenationEstimate)
{
    for (double theta : {0.0, 1.0, 3.0}) {
        const auto min = product_minimizer(theta);
        const auto sw = build_sweepout(min);
        double gen = 0.0;
        for (int j = 0; j < 64; ++j) gen = std::max(gen, generator_energy(sw, 2 * kPi * j / 64));
        EXPECT_GT(gen, 0.0);
        EXPECT_LE(max_energy(sw), 2 * min.energy + 2 * gen + 1e-9);
        EXPECT_GE(max_energy(sw), min.energy - 1e-12);
    }
}

TEST(Sweepout, ConstantGeneratorCollapses)
{
    auto sw = build_sweepout(product_minimizer(0.5), SphereSweep::constant, 16);
    const auto res = relax(sw);
    EXPECT_TRUE(res.collapsed);
    EXPECT_FALSE(res.certified);
}

TEST(Relax, LowClassesReachTheFirstIndexOneChord)
{
    const auto man = ModelManifold::circle_times_sphere(1.0);
    const auto scan = minmax_scan(man, product_point(0, Eigen::Vector3d::UnitX()),
                                  product_point(0, Eigen::Vector3d::UnitY()), 0, 1, RelaxOptions{}, 64);
    ASSERT_EQ(scan.results.size(), 2u);
    for (int m = 0; m <= 1; ++m) {
        const auto& r = scan.results[static_cast<std::size_t>(m)];
        const double expected = m * m + 2.25 * kPi * kPi;
        EXPECT_NEAR(scan.analytic_tau[static_cast<std::size_t>(m)], expected, 1e-9);
        EXPECT_TRUE(r.certified) << r.note;
        EXPECT_EQ(r.index, 1);
        EXPECT_NEAR(r.saddle_energy, expected, 0.02 * expected);
        EXPECT_NEAR(r.tau_estimate, expected, 0.02 * expected);
        EXPECT_TRUE(r.trace_monotone);
    }
    const auto rep = verify_sandwich(scan.results, scan.minimizers, scan.max_generator_energy);
    EXPECT_TRUE(rep.pass);
    EXPECT_LE(rep.fitted_c, rep.c_bound);
}

TEST(Sandwich, LowerBoundViolationThrows)
{
    const auto min = product_minimizer(2.0);
    MinmaxResult r;
    r.tau_estimate = 0.5 * min.energy;
    EXPECT_THROW(verify_sandwich({r}, {min}, 10.0), BoundViolation);
    EXPECT_THROW(verify_sandwich({}, {}, 10.0), DomainError);
    r.tau_estimate = 2 * min.length * min.length + 25.0;
    EXPECT_FALSE(verify_sandwich({r}, {min}, 10.0).pass);
    r.tau_estimate = 2 * min.length * min.length + 15.0;
    EXPECT_TRUE(verify_sandwich({r}, {min}, 10.0).pass);
}
