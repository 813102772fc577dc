#include "finsler/database.hpp"
#include "finsler/errors.hpp"

#include "generators.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace finsler;
using finsler::testing::Gen;

namespace {

std::string scratch_file(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / "finsler_db_tests";
    std::filesystem::create_directories(dir);
    const auto path = dir / name;
    std::filesystem::remove(path);
    return path.string();
}

} // namespace

TEST(Database, FormatParseRoundTripIsExactProperty)
{
    Gen g(31);
    for (int i = 0; i < 100; ++i) {
        const auto man = g.model();
        GeodesicRecord rec = record_of(g.walk(man, 2 * g.integer(1, 5)), false);
        rec.index = g.integer(0, 3);
        rec.index_degenerate = g.integer(0, 4) == 0;
        rec.provenance = "descend";
        const auto back = parse_record(man, format_record(man, rec));
        ASSERT_EQ(back.path.nodes.size(), rec.path.nodes.size());
        for (std::size_t j = 0; j < rec.path.nodes.size(); ++j) EXPECT_EQ(back.path.nodes[j], rec.path.nodes[j]);
        EXPECT_EQ(back.length, rec.length);
        EXPECT_EQ(back.energy, rec.energy);
        EXPECT_EQ(back.cls, rec.cls);
        EXPECT_EQ(back.index_degenerate, rec.index_degenerate);
        if (!rec.index_degenerate) EXPECT_EQ(back.index, rec.index);
        EXPECT_EQ(back.provenance, rec.provenance);
    }
}

TEST(Database, MalformedLinesAndForeignModelsAreRejected)
{
    const auto man = ModelManifold::torus({0.1, 0});
    const auto other = ModelManifold::cylinder(2.0);
    EXPECT_THROW(parse_record(man, "garbage"), ConfigError);
    Gen g(32);
    const auto line = format_record(other, record_of(g.walk(other, 2), false));
    EXPECT_THROW(parse_record(man, line), ConfigError);
}

TEST(Database, AppendAndLoadKeepsModelsApart)
{
    const std::string file = scratch_file("mixed.db");
    const auto torus = ModelManifold::torus({0.1, 0});
    const auto cyl = ModelManifold::cylinder(2.0);
    Gen g(33);
    const GeodesicDatabase db(file);
    db.append(torus, {record_of(g.walk(torus, 2), false), record_of(g.walk(torus, 4), false)});
    db.append(cyl, {record_of(g.walk(cyl, 2), false)});
    db.append(torus, {record_of(g.walk(torus, 6), false)});
    EXPECT_EQ(db.load(torus).size(), 3u);
    EXPECT_EQ(db.load(cyl).size(), 1u);
    EXPECT_TRUE(db.load(ModelManifold::circle_times_sphere(1.0)).empty());
}

TEST(Database, DeduplicateByClassAndEnergy)
{
    const auto man = ModelManifold::torus({0, 0});
    Gen g(34);
    const auto a = record_of(g.walk(man, 2), false);
    auto b = a;
    b.energy += 1e-12;
    auto c = a;
    c.energy += 1e-3;
    EXPECT_EQ(deduplicate({a, b, c}, 1e-9).size(), 2u);
}
