#include "finsler/homotopy.hpp"

#include <boost/functional/hash.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_set>

namespace finsler {

std::vector<ChartPoint> lift_chain(const ModelManifold& man, const std::vector<ChartPoint>& chart,
                                   const ChartPoint& start_near)
{
    std::vector<ChartPoint> out;
    if (chart.empty()) return out;
    out.reserve(chart.size());
    out.push_back(man.lift_near(chart.front(), start_near));
    const double r = man.uniqueness_radius();
    for (std::size_t i = 1; i < chart.size(); ++i) {
        ChartPoint next = man.lift_near(chart[i], out.back());
        if (!(man.segment_step(out.back(), next) < r))
            throw RefinementRequired("node chain step exceeds the uniqueness radius; lift is ambiguous");
        out.push_back(std::move(next));
    }
    return out;
}

DiscretePath reference_chord(const ModelManifold& man, const ChartPoint& p, const ChartPoint& q)
{
    const FlatFrame frame = man.flat_frame(p, q);
    const double len = man.flat_length(frame.base);
    const auto chords = man.oracle_geodesics(p, q, HomotopyClass::neutral(man.group_rank()), len * (1.0 + 1e-9) + 1e-12);
    if (chords.empty()) throw DomainError("no neutral reference chord between the endpoints");
    return from_oracle(man, chords.front());
}

HomotopyClass class_of(const DiscretePath& path, const DiscretePath& reference)
{
    const ModelManifold& man = reference.man;
    if (path.man.hash() != man.hash()) throw DomainError("paths live on different models");
    if (man.symmetric_distance(path.front(), reference.front()) > 1e-9 ||
        man.symmetric_distance(path.back(), reference.back()) > 1e-9)
        throw DomainError("class_of requires paths with the reference's endpoints");
    std::vector<ChartPoint> chart;
    chart.reserve(path.nodes.size());
    for (const auto& x : path.nodes) chart.push_back(man.reduce(x));
    const auto lifted = lift_chain(man, chart, reference.front());
    // Deck translation between the two lifted endpoints; rounding keeps
    // endpoints on a fundamental-domain boundary stable.
    const ChartPoint diff = lifted.back() - reference.back();
    if (man.kind() == ModelKind::torus)
        return HomotopyClass(std::llround(diff(0)), std::llround(diff(1)));
    return HomotopyClass(std::llround(diff(0) / man.circumference()));
}

// ---------------------------------------------------------------------------

std::string GroupSpec::name() const
{
    std::ostringstream os;
    os << (kind == Kind::free_abelian ? "Z^" : "F_") << rank;
    return os.str();
}

GroupSpec GroupSpec::parse(const std::string& kind, int rank)
{
    if (rank < 1) throw DomainError("group rank must be >= 1");
    if (kind == "free_abelian" || kind == "abelian" || kind == "Z") return {Kind::free_abelian, rank};
    if (kind == "free" || kind == "F") return {Kind::free, rank};
    throw DomainError("unknown group kind '" + kind + "' (expected free_abelian or free)");
}

WordGrowth::WordGrowth(GroupSpec spec, std::size_t budget) : spec_(spec), budget_(budget)
{
    if (spec_.rank < 1) throw DomainError("group rank must be >= 1");
    cur_.push_back(spec_.kind == GroupSpec::Kind::free_abelian ? Element(static_cast<std::size_t>(spec_.rank), 0)
                                                               : Element{});
    spheres_.push_back(1);
}

std::vector<WordGrowth::Element> WordGrowth::neighbours(const Element& x) const
{
    std::vector<Element> out;
    out.reserve(2 * static_cast<std::size_t>(spec_.rank));
    for (int g = 1; g <= spec_.rank; ++g) {
        for (int sign : {1, -1}) {
            Element y = x;
            if (spec_.kind == GroupSpec::Kind::free_abelian) {
                y[static_cast<std::size_t>(g - 1)] += sign;
            } else if (!y.empty() && y.back() == -sign * g) {
                y.pop_back(); // free reduction
            } else {
                y.push_back(sign * g);
            }
            out.push_back(std::move(y));
        }
    }
    return out;
}

void WordGrowth::grow()
{
    using Set = std::unordered_set<Element, boost::hash<Element>>;
    Set seen(prev_.begin(), prev_.end());
    seen.insert(cur_.begin(), cur_.end());
    std::vector<Element> next;
    Set next_set;
    for (const auto& x : cur_) {
        for (auto& y : neighbours(x)) {
            if (seen.count(y) || next_set.count(y)) continue;
            next_set.insert(y);
            next.push_back(std::move(y));
            if (next.size() + cur_.size() > budget_)
                throw BudgetError("word-ball enumeration exceeded its element budget");
        }
    }
    spheres_.push_back(next.size());
    prev_ = std::move(cur_);
    cur_ = std::move(next);
}

std::uint64_t WordGrowth::sphere(int r)
{
    if (r < 0) throw DomainError("radius must be >= 0");
    while (static_cast<int>(spheres_.size()) <= r) grow();
    return spheres_[static_cast<std::size_t>(r)];
}

std::uint64_t WordGrowth::ball(int r)
{
    sphere(r);
    std::uint64_t total = 0;
    for (int i = 0; i <= r; ++i) total += spheres_[static_cast<std::size_t>(i)];
    return total;
}

std::uint64_t word_ball_count(const GroupSpec& spec, int r, std::size_t budget)
{
    WordGrowth w(spec, budget);
    return w.ball(r);
}

GroupBallTable ball_table(const GroupSpec& spec, const std::vector<int>& radii, std::size_t budget)
{
    WordGrowth w(spec, budget);
    GroupBallTable t{spec, radii, {}};
    for (int r : radii) t.counts.push_back(w.ball(r));
    return t;
}

DegreeFit growth_degree_fit(const GroupBallTable& table)
{
    if (table.radii.size() != table.counts.size()) throw FitError("ball table columns differ in length");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < table.radii.size(); ++i) {
        if (table.radii[i] <= 0) continue;
        if (table.counts[i] == 0) throw FitError("ball table has an empty ball");
        xs.push_back(std::log(static_cast<double>(table.radii[i])));
        ys.push_back(std::log(static_cast<double>(table.counts[i])));
    }
    if (xs.size() < 4) throw FitError("growth fit needs at least four positive radii");
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    if (*hi - *lo < std::log(4.0) - 1e-12) throw FitError("growth fit radii must span a factor of at least four");

    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double den = n * sxx - sx * sx;
    DegreeFit f;
    f.degree = (n * sxy - sx * sy) / den;
    const double icpt = (sy - f.degree * sx) / n;
    f.coefficient = std::exp(icpt);
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (icpt + f.degree * xs[i]);
        ss += r * r;
    }
    f.rms_residual = std::sqrt(ss / n);
    return f;
}

} // namespace finsler
