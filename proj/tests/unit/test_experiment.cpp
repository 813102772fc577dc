#include "finsler/errors.hpp"
#include "finsler/experiment.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace finsler;

namespace {

ExperimentConfig parse_checked(const std::string& text)
{
    std::istringstream in(text);
    auto cfg = parse_config(in);
    validate(cfg);
    return cfg;
}

} // namespace

TEST(Config, ParsesEverySection)
{
    const auto cfg = parse_checked(
        "[manifold]\nmodel = product\ncircumference = 2.5\n"
        "[endpoints]\np = 0 1 0 0\nq = 0.3 0 1 0\n"
        "[scenario]\nname = minmax-scan\nm_min = 0\nm_max = 3\n"
        "[minmax]\nsamples = 32\ntol = 1e-7\n"
        "[census]\nell_max = 12.5\nell_steps = 10\n"
        "[group]\nkind = free\nrank = 3\n"
        "[run]\nseed = 7\njobs = 4\nout = somewhere\n");
    EXPECT_EQ(cfg.model, "product");
    EXPECT_DOUBLE_EQ(cfg.circumference, 2.5);
    EXPECT_EQ(cfg.q.size(), 4u);
    EXPECT_EQ(cfg.scenario, "minmax-scan");
    EXPECT_EQ(cfg.m_max, 3);
    EXPECT_EQ(cfg.minmax_samples, 32);
    EXPECT_DOUBLE_EQ(cfg.minmax_tol, 1e-7);
    EXPECT_EQ(cfg.ell_steps, 10);
    EXPECT_EQ(cfg.group_kind, "free");
    EXPECT_EQ(cfg.seed, 7u);
    EXPECT_EQ(cfg.jobs, 4);
    EXPECT_EQ(cfg.out, "somewhere");
}

TEST(Config, RejectsUnknownOrMalformedInput)
{
    EXPECT_THROW(parse_checked("[bogus]\nx = 1\n"), ConfigError);
    EXPECT_THROW(parse_checked("[manifold]\ncolour = red\n"), ConfigError);
    EXPECT_THROW(parse_checked("[scenario]\nm_min = 1.5\n"), ConfigError);
    EXPECT_THROW(parse_checked("[manifold]\ncircumference = abc\n"), ConfigError);
    EXPECT_THROW(parse_checked("[manifold]\ndrift = 0.1\n"), ConfigError);
    EXPECT_THROW(parse_checked("[scenario]\nname = everything\n"), ConfigError);
    EXPECT_THROW(parse_checked("[scenario]\nm_min = 3\nm_max = 1\n"), ConfigError);
    EXPECT_THROW(parse_checked("[run]\njobs = 0\n"), ConfigError);
    EXPECT_THROW(parse_checked("[manifold]\nmodel = product\n"), ConfigError); // planar default endpoints
}

TEST(Config, DriftOutsideTheUnitDiscIsADomainError)
{
    EXPECT_THROW(parse_checked("[manifold]\ndrift = 0.8 0.6\n"), DomainError);
    EXPECT_THROW(parse_checked("[manifold]\nmodel = cylinder\ncircumference = -1\n"), DomainError);
    EXPECT_NO_THROW(parse_checked("[manifold]\ndrift = 0.5 0.5\n"));
}

TEST(Scenario, ClassRangeShapes)
{
    EXPECT_EQ(class_range(ModelManifold::torus({0, 0}), -1, 1).size(), 9u);
    EXPECT_EQ(class_range(ModelManifold::cylinder(1.0), -2, 2).size(), 5u);
}

TEST(Scenario, PerturbationKeepsEndpointsAndAmplitude)
{
    const auto man = ModelManifold::torus({0.2, 0});
    std::vector<ChartPoint> nodes;
    for (int i = 0; i <= 8; ++i) nodes.push_back(plane_point(i / 8.0, 0.1));
    const auto path = make_path(man, nodes);
    const auto bent = perturb(path, 0.1, 3);
    EXPECT_EQ(bent.front(), path.front());
    EXPECT_EQ(bent.back(), path.back());
    double worst = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) worst = std::max(worst, (bent.nodes[i] - path.nodes[i]).norm());
    EXPECT_NEAR(worst, 0.1, 1e-9);
    EXPECT_EQ(perturb(path, 0.1, 3).nodes, bent.nodes);
}

TEST(Scenario, SolveClassesRecoversTorusMinimizers)
{
    const auto man = ModelManifold::torus({0.3, 0.1});
    const auto rows = solve_classes(man, plane_point(0.15, 0.25), plane_point(0.65, 0.4),
                                    class_range(man, -1, 1), 0.1, 5, 1e-10, 2);
    ASSERT_EQ(rows.size(), 9u);
    for (const auto& r : rows) {
        EXPECT_EQ(r.record.cls, r.cls);
        EXPECT_LT(r.node_error, 1e-6);
        EXPECT_NEAR(r.record.length, r.oracle_length, 1e-9);
    }
}

TEST(Scenario, EllGrid)
{
    const auto g = ell_grid(10.0, 4);
    ASSERT_EQ(g.size(), 4u);
    EXPECT_DOUBLE_EQ(g.front(), 2.5);
    EXPECT_DOUBLE_EQ(g.back(), 10.0);
}
