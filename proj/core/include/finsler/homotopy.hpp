#pragma once

#include "finsler/homotopy_class.hpp"
#include "finsler/pathspace.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace finsler {

/// Lifts a chain of chart points to the covering space, starting at the
/// lift of chart[0] nearest to `start_near`; each step takes the nearest
/// lift. Steps must stay below the uniqueness radius.
std::vector<ChartPoint> lift_chain(const ModelManifold& man, const std::vector<ChartPoint>& chart,
                                   const ChartPoint& start_near);

/// Canonical reference chord alpha: the minimizing oracle geodesic of the
/// neutral class, sampled as a discrete path.
DiscretePath reference_chord(const ModelManifold& man, const ChartPoint& p, const ChartPoint& q);

/// Class of alpha^{-1} . path, read from the lifted node chain.
HomotopyClass class_of(const DiscretePath& path, const DiscretePath& reference);

// --- word growth ----------------------------------------------------------------

struct GroupSpec {
    enum class Kind { free_abelian, free };
    Kind kind = Kind::free_abelian;
    int rank = 2;

    std::string name() const;
    static GroupSpec parse(const std::string& kind, int rank);
};

/// Ball sizes #B_r for the standard symmetric generating set, grown by
/// breadth-first search over the Cayley graph and memoized per radius.
class WordGrowth {
public:
    explicit WordGrowth(GroupSpec spec, std::size_t budget = 20'000'000);

    const GroupSpec& spec() const { return spec_; }
    std::uint64_t ball(int r);
    std::uint64_t sphere(int r);

private:
    using Element = std::vector<std::int64_t>;
    void grow();
    std::vector<Element> neighbours(const Element& x) const;

    GroupSpec spec_;
    std::size_t budget_;
    std::vector<std::uint64_t> spheres_; // |S_r| for r = 0..radius
    std::vector<Element> prev_, cur_;
};

std::uint64_t word_ball_count(const GroupSpec& spec, int r, std::size_t budget = 20'000'000);

struct GroupBallTable {
    GroupSpec group;
    std::vector<int> radii;
    std::vector<std::uint64_t> counts;
};

GroupBallTable ball_table(const GroupSpec& spec, const std::vector<int>& radii, std::size_t budget = 20'000'000);

struct DegreeFit {
    double degree = 0.0;      // slope of log #B_r against log r
    double coefficient = 0.0; // a in #B_r ~ a r^d
    double rms_residual = 0.0;
};

/// Least-squares growth degree; needs >= 4 positive radii spanning a factor
/// of at least 4.
DegreeFit growth_degree_fit(const GroupBallTable& table);

} // namespace finsler
