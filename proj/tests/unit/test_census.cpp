#include "finsler/census.hpp"
#include "finsler/errors.hpp"
#include "finsler/experiment.hpp"

#include "generators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace finsler;

namespace {

GeodesicRecord flat_chord(const ModelManifold& man, const ChartPoint& p, const Eigen::Vector2d& d)
{
    const ChartPoint q = p + ChartPoint(d.x(), d.y(), 0, 0);
    const int k = choose_segment_count(man, man.flat_length(d));
    std::vector<ChartPoint> nodes;
    for (int i = 0; i <= k; ++i) nodes.push_back(p + (q - p) * (static_cast<double>(i) / k));
    return record_of(make_path(man, std::move(nodes)), false);
}

// Closed geodesic images through a point of the flat unit torus with length
// <= ell: primitive lattice vectors up to sign.
long primitive_images(double ell)
{
    long count = 0;
    const int r = static_cast<int>(std::floor(ell));
    for (int a = -r; a <= r; ++a)
        for (int b = -r; b <= r; ++b)
            if (std::gcd(a, b) == 1 && a * a + b * b <= ell * ell) ++count;
    return count / 2;
}

GrowthTable table_of(const std::vector<double>& ells, const std::vector<long>& n, const std::vector<long>& big_n)
{
    GrowthTable t;
    for (std::size_t i = 0; i < ells.size(); ++i) t.rows.push_back({ells[i], big_n[i], n[i]});
    return t;
}

const Census& torus_census()
{
    static const Census c = [] {
        const auto man = ModelManifold::torus({0, 0});
        const ChartPoint p = plane_point(0.15, 0.25);
        return build_census(man, census_records(man, p, p, 6.0, 2), 2);
    }();
    return c;
}

} // namespace

TEST(Decompose, ClosedIteratesOfTheFlatTorus)
{
    const auto man = ModelManifold::torus({0, 0});
    const ChartPoint p = plane_point(0.15, 0.25);
    const auto two = decompose_primitive(flat_chord(man, p, {2, 4}));
    EXPECT_TRUE(two.closed);
    EXPECT_EQ(two.k, 1);
    EXPECT_LT((two.primitive_flat - Eigen::Vector2d(1, 2)).norm(), 1e-9);
    EXPECT_LT((two.loop_flat - Eigen::Vector2d(1, 2)).norm(), 1e-9);
    ASSERT_TRUE(two.loop.has_value());

    const auto three = decompose_primitive(flat_chord(man, p, {3, 6}));
    EXPECT_EQ(three.k, 2);
    EXPECT_LT((three.primitive_flat - Eigen::Vector2d(1, 2)).norm(), 1e-9);
}

TEST(Decompose, OpenChordSplitsIntoPrimitiveAndLoops)
{
    const auto man = ModelManifold::torus({0.2, 0.1});
    const auto dec = decompose_primitive(flat_chord(man, plane_point(0, 0), {2.5, 5}));
    EXPECT_FALSE(dec.closed);
    EXPECT_EQ(dec.k, 2);
    EXPECT_LT((dec.primitive_flat - Eigen::Vector2d(0.5, 1)).norm(), 1e-9);

    const auto irrational = decompose_primitive(flat_chord(man, plane_point(0, 0), {0.3, 0.7}));
    EXPECT_EQ(irrational.k, 0);
    EXPECT_FALSE(irrational.loop.has_value());
}

TEST(Decompose, UndecidedBandAndConstantPaths)
{
    const auto man = ModelManifold::torus({0, 0});
    // off the (1, 2) direction by about 5e-7, inside [1e-7, 1e-6)
    EXPECT_THROW(decompose_primitive(flat_chord(man, plane_point(0, 0), {1, 2 + 1.1e-6})), UndecidedError);
    EXPECT_NO_THROW(decompose_primitive(flat_chord(man, plane_point(0, 0), {1, 2 + 1e-4})));
    const ChartPoint p = plane_point(0.3, 0.3);
    EXPECT_THROW(decompose_primitive(record_of(make_path(man, {p, p, p}), false)), DomainError);
}

TEST(Census, TorusCountsMatchPrimitiveLattice)
{
    const Census& c = torus_census();
    for (double ell : {1.0, 2.5, 4.0, 5.0, 6.0}) {
        const auto row = geometric_count(c, ell);
        EXPECT_EQ(row.small_n, primitive_images(ell)) << "ell=" << ell;
        EXPECT_GE(row.big_n, row.small_n);
    }
}

TEST(Census, CountsAreMonotone)
{
    const Census& c = torus_census();
    const auto t = growth_table(c, ell_grid(6.0, 24), c.man.systole(), true);
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
        EXPECT_GE(t.rows[i].small_n, t.rows[i - 1].small_n);
        EXPECT_GE(t.rows[i].big_n, t.rows[i - 1].big_n);
    }
    EXPECT_TRUE(conversion_bound_check(t).pass);
}

TEST(Census, ImageDistanceSeesReparametrisedCopies)
{
    const auto man = ModelManifold::torus({0, 0});
    const auto a = flat_chord(man, plane_point(0, 0), {1, 0});
    const auto b = flat_chord(man, plane_point(0.5, 0), {1, 0});
    EXPECT_LT(image_distance(a.path, b.path), 1e-6);
    const auto c = flat_chord(man, plane_point(0, 0.5), {1, 0});
    EXPECT_NEAR(image_distance(a.path, c.path), 0.5, 1e-6);
}

TEST(Conversion, ViolatingTableIsReported)
{
    auto t = table_of({1, 2, 3}, {1, 1, 1}, {1, 4, 20});
    t.b_p = 1.0;
    const auto chk = conversion_bound_check(t);
    EXPECT_FALSE(chk.pass);
    EXPECT_EQ(chk.first_violation, 2);
    EXPECT_LT(chk.worst_margin, 0.0);
}

TEST(Fits, RecoverSyntheticFamilies)
{
    std::vector<double> ells;
    std::vector<long> sq, lg, lin;
    for (int i = 1; i <= 20; ++i) {
        const double l = 5.0 * i;
        ells.push_back(l);
        sq.push_back(std::lround(3 * l * l));
        lin.push_back(std::lround(4 * l + 2));
        lg.push_back(std::lround(1000 * std::log(l)));
    }
    const auto pw = fit_growth(table_of(ells, sq, sq), GrowthFamily::power);
    EXPECT_NEAR(pw.b, 2.0, 1e-3);
    EXPECT_NEAR(pw.a, 3.0, 0.01);
    EXPECT_TRUE(pw.verdict);
    const auto af = fit_growth(table_of(ells, lin, lin), GrowthFamily::affine);
    EXPECT_NEAR(af.a, 4.0, 1e-9);
    EXPECT_TRUE(af.verdict);
    const auto lo = fit_growth(table_of(ells, lg, lg), GrowthFamily::log);
    EXPECT_NEAR(lo.a, 1000.0, 0.5);
    EXPECT_NE(lo.describe().find("verdict=pass"), std::string::npos);
}

TEST(Fits, ConstantCountIsANegativeControl)
{
    const auto t = table_of({1, 2, 4, 8, 16}, {0, 1, 1, 1, 1}, {0, 1, 1, 1, 1});
    for (auto f : {GrowthFamily::power, GrowthFamily::log, GrowthFamily::affine}) {
        const auto r = fit_growth(t, f);
        EXPECT_FALSE(r.verdict);
        EXPECT_NE(r.describe().find("verdict=fail"), std::string::npos);
    }
    EXPECT_THROW(fit_growth(table_of({1, 2, 3}, {0, 1, 2}, {0, 1, 2}), GrowthFamily::log), FitError);
}

TEST(Fits, OneSidedOffsetLiesBelowEveryRow)
{
    const auto t = table_of({2, 4, 6, 8, 10}, {3, 9, 10, 17, 19}, {3, 9, 10, 17, 19});
    const auto f = fit_growth(t, GrowthFamily::affine);
    for (const auto& r : t.rows) EXPECT_LE(f.a * r.ell + f.b_low, static_cast<double>(r.small_n) + 1e-9);
}

TEST(Envelope, HoldsOnEveryPoint)
{
    const std::vector<int> m{0, 1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<double> len;
    for (int x : m) len.push_back(3.0 * x + 1.0 + 0.2 * std::sin(x));
    const auto env = linear_envelope(m, len);
    EXPECT_NEAR(env.a2, 3.0, 0.2);
    for (std::size_t i = 0; i < m.size(); ++i) {
        EXPECT_GE(len[i], env.a * m[i] + env.b - 1e-12);
        EXPECT_LE(len[i], env.a2 * m[i] + env.b2 + 1e-12);
    }
    EXPECT_THROW(linear_envelope({1, 2}, {1.0, 2.0}), FitError);
}

TEST(Carriers, IterateJumpIsFlagged)
{
    CarrierSequence seq;
    seq.n_top = 2;
    seq.entries = {{1, 0, -1}, {3, 1, -1}, {5, 7, -1}};
    const LinearEnvelope env{1.0, 0.0, 1.0, 0.0};
    const auto chk = carrier_bounds(seq, env, 1.0);
    EXPECT_TRUE(chk.applicable);
    EXPECT_TRUE(chk.premise);
    EXPECT_EQ(chk.kappa, 1);
    EXPECT_EQ(chk.k_limit, 4);
    EXPECT_FALSE(chk.k_ok);
    ASSERT_EQ(chk.violations.size(), 1u);
    EXPECT_EQ(chk.violations[0], 2);

    seq.entries[2].k = 2;
    EXPECT_TRUE(carrier_bounds(seq, env, 1.0).k_ok);
    seq.entries[0].index = 0;
    seq.entries[1].index = 0;
    EXPECT_FALSE(carrier_bounds(seq, env, 1.0).premise);
}

TEST(Carriers, TorusCensusSequencesAreSorted)
{
    for (const auto& seq : carrier_sequences(torus_census(), 2))
        for (std::size_t i = 1; i < seq.entries.size(); ++i) {
            const auto& a = seq.entries[i - 1];
            const auto& b = seq.entries[i];
            EXPECT_TRUE(a.m < b.m || (a.m == b.m && a.k <= b.k));
        }
}

TEST(Recurrence, AffineChain)
{
    const auto t = recurrence_growth(Polynomial{{1.0, 2.0}}, 1.0, 100.0);
    ASSERT_EQ(t.chain.size(), 6u); // 1 3 7 15 31 63
    EXPECT_EQ(t.bound_at(7.0), 2);
    EXPECT_EQ(t.bound_at(0.5), 0);
    EXPECT_EQ(t.bound_at(1000.0), 5);

    const LinearEnvelope env{1.0, 0.0, 2.0, 1.0};
    EXPECT_DOUBLE_EQ(recurrence_count_bound(t, env, 15.0, false), 2.0); // m = floor(14 / 2) = 7
    EXPECT_DOUBLE_EQ(recurrence_count_bound(t, env, 15.0, true), 1.0);
    EXPECT_DOUBLE_EQ(recurrence_count_bound(t, env, 0.5, false), 0.0);
}

TEST(Recurrence, RejectsNonGrowingPolynomials)
{
    EXPECT_THROW(recurrence_growth(Polynomial{{3.0}}, 1.0, 10.0), DomainError);
    EXPECT_THROW(recurrence_growth(Polynomial{{0.0, -1.0}}, 1.0, 10.0), DomainError);
    EXPECT_THROW(recurrence_growth(Polynomial{{0.0, 1.0}}, 1.0, 10.0), DomainError);
    EXPECT_THROW(recurrence_growth(Polynomial{{0, 0, 0, 1.0}}, 1.0, 10.0), DomainError);
    const auto q = quadratic_carrier_polynomial(LinearEnvelope{1.0, 0.0, 1.0, 0.5}, 1.0, 2);
    EXPECT_EQ(q.degree(), 2);
    EXPECT_NEAR(q(0.0), 0.5, 1e-15);
}

TEST(Recurrence, CarrierPolynomialCoefficients)
{
    const LinearEnvelope env{2.0, 1.0, 3.0, 4.0};
    const auto lin = linear_carrier_polynomial(env, 2);
    ASSERT_EQ(lin.c.size(), 2u);
    EXPECT_DOUBLE_EQ(lin.c[0], 2 * 2 * 4.0 / 2.0 - 1.0 / 2.0);
    EXPECT_DOUBLE_EQ(lin.c[1], 2 * 2 * 3.0 / 2.0);
    const auto quad = quadratic_carrier_polynomial(env, 0.5, 2);
    ASSERT_EQ(quad.c.size(), 3u);
    EXPECT_DOUBLE_EQ(quad.c[0], 4.0 / 0.5);
    EXPECT_DOUBLE_EQ(quad.c[1], 1 + 3.0 / 0.5 + 2 * (4.0 / 0.5 + 1));
    EXPECT_DOUBLE_EQ(quad.c[2], 2 * 3.0 / 0.5);
}
