#include "finsler/minmax.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

namespace finsler {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Sphere geometry of the generator at the lifted endpoint q.
struct LoopGeometry {
    ChartPoint q;
    Eigen::Vector3d qs;
    Eigen::Vector3d u; // unit, orthogonal to qs; fixes the meridian of axes

    LoopGeometry(const ModelManifold& man, const ChartPoint& p, const ChartPoint& q_lift) : q(q_lift)
    {
        qs = sphere_part(q);
        const Eigen::Vector3d ps = sphere_part(p);
        Eigen::Vector3d w = ps - ps.dot(qs) * qs;
        if (w.norm() < 1e-6) w = man.tangent_basis(q).block<3, 1>(1, 1);
        u = w.normalized();
    }

    // Circle through q about the axis at angle rho from q; rho = 0 and rho = pi
    // give the constant loop.
    ChartPoint loop(double rho, double t) const
    {
        const Eigen::Vector3d axis = std::cos(rho) * qs + std::sin(rho) * u;
        return product_point(q(0), rotate_about(qs, axis.normalized(), 2.0 * kPi * t).normalized());
    }
};

double sweep_rho(double s) { return kPi * (s - 1.0) / (2.0 * kPi - 2.0); }
double base_distance(double s) { return std::min(s, 2.0 * kPi - s); }

double energy_or_inf(const DiscretePath& path)
{
    const double r = path.man.uniqueness_radius();
    double e = 0.0;
    for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
        if (!(path.man.segment_step(path.nodes[i], path.nodes[i + 1]) < r)) return kInf;
        e += path.man.segment_sq(path.nodes[i], path.nodes[i + 1], nullptr, nullptr);
    }
    return path.k() * e;
}

double member_gap(const DiscretePath& a, const DiscretePath& b)
{
    double g = 0.0;
    for (std::size_t i = 0; i < a.nodes.size(); ++i) g = std::max(g, a.man.segment_step(a.nodes[i], b.nodes[i]));
    return g;
}

DiscretePath midpoint_member(const DiscretePath& a, const DiscretePath& b)
{
    DiscretePath m = a;
    for (std::size_t i = 0; i < a.nodes.size(); ++i) m.nodes[i] = a.man.geodesic_point(a.nodes[i], b.nodes[i], 0.5);
    return m;
}

// One energy-decreasing step along the H^1 (discrete Sobolev) gradient:
// solve 2k T y = G per ambient component, T = tridiag(-1, 2, -1), then
// project onto the tangent spaces. No node moves farther than max_move, so
// neighbouring members stay comparable. Returns false when no decrease was
// found.
bool member_step(DiscretePath& path, double& energy, double& t, double max_move)
{
    const ModelManifold& man = path.man;
    const int k = path.k();
    const int n = k - 1;
    if (n <= 0) return false;
    std::vector<TangentVec> g(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
    for (int i = 1; i < k; ++i) {
        const auto u = static_cast<std::size_t>(i);
        TangentVec ga, gb;
        man.segment_sq(path.nodes[u - 1], path.nodes[u], nullptr, &ga);
        man.segment_sq(path.nodes[u], path.nodes[u + 1], &gb, nullptr);
        g[u - 1] = static_cast<double>(k) * (ga + gb);
    }
    // Thomas algorithm; the system matrix is shared by all components.
    const double diag = 4.0 * k, off = -2.0 * k;
    std::vector<double> c(static_cast<std::size_t>(n));
    std::vector<TangentVec> d(static_cast<std::size_t>(n));
    c[0] = off / diag;
    d[0] = g[0] / diag;
    for (int i = 1; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const double m = diag - off * c[u - 1];
        c[u] = off / m;
        d[u] = (g[u] - off * d[u - 1]) / m;
    }
    y[static_cast<std::size_t>(n - 1)] = d[static_cast<std::size_t>(n - 1)];
    for (int i = n - 2; i >= 0; --i) {
        const auto u = static_cast<std::size_t>(i);
        y[u] = d[u] - c[u] * y[u + 1];
    }
    double slope = 0.0;
    const bool sphere = man.kind() == ModelKind::product;
    for (int i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        if (sphere) {
            const Eigen::Vector3d x = sphere_part(path.nodes[u + 1]);
            Eigen::Vector3d ys = y[u].tail<3>();
            ys -= ys.dot(x) * x;
            y[u].tail<3>() = ys;
        }
        slope -= g[u].dot(y[u]);
    }
    if (!(slope < 0.0)) return false;

    double biggest = 0.0;
    for (const auto& v : y) biggest = std::max(biggest, v.norm());
    DiscretePath trial = path;
    double tt = std::min(t, max_move / std::max(biggest, 1e-300));
    for (int ls = 0; ls < 30; ++ls, tt *= 0.5) {
        for (int i = 1; i < k; ++i) {
            const auto u = static_cast<std::size_t>(i);
            ChartPoint x = path.nodes[u] - tt * y[u - 1];
            if (sphere) x.tail<3>().normalize();
            trial.nodes[u] = x;
        }
        const double e_new = energy_or_inf(trial);
        if (e_new <= energy + 1e-4 * tt * slope) {
            path = std::move(trial);
            energy = e_new;
            t = std::min(1.5, tt * 1.2);
            return true;
        }
    }
    t = tt;
    return false;
}

} // namespace

Sweepout build_sweepout(const GeodesicRecord& minimizer, SphereSweep generator, int n_samples)
{
    const ModelManifold& man = minimizer.path.man;
    if (man.kind() != ModelKind::product)
        throw NotApplicable("sweepouts need pi_2 != 0; only the circle x sphere model provides one");
    if (n_samples < 8) throw DomainError("a sweepout needs at least 8 samples");

    Sweepout sw;
    sw.minimizer = minimizer;
    sw.generator = generator;
    const DiscretePath& gamma = minimizer.path;
    const int k = choose_segment_count(man, minimizer.length + 2.0 * kPi);
    const LoopGeometry geo(man, gamma.front(), gamma.back());

    for (int j = 0; j < n_samples; ++j) {
        const double s = 2.0 * kPi * j / n_samples;
        const double d = base_distance(s);
        std::vector<ChartPoint> nodes(static_cast<std::size_t>(k) + 1);
        for (int i = 0; i <= k; ++i) {
            const double t = static_cast<double>(i) / k;
            ChartPoint x;
            if (generator == SphereSweep::constant) {
                x = point_at(gamma, t);
            } else if (d < 1.0) {
                const double lambda = 1.0 - d / 2.0;
                x = t <= lambda ? point_at(gamma, t / lambda) : gamma.back();
            } else {
                x = t <= 0.5 ? point_at(gamma, 2.0 * t) : geo.loop(sweep_rho(s), 2.0 * t - 1.0);
            }
            nodes[static_cast<std::size_t>(i)] = x;
        }
        nodes.front() = gamma.front();
        nodes.back() = gamma.back();
        sw.members.push_back(make_path(man, std::move(nodes)));
    }
    sw.base_index = 0;
    return sw;
}

double generator_energy(const Sweepout& sw, double s)
{
    if (sw.generator == SphereSweep::constant || base_distance(s) < 1.0) return 0.0;
    const DiscretePath& gamma = sw.minimizer.path;
    const LoopGeometry geo(gamma.man, gamma.front(), gamma.back());
    const int half = std::max(2, sw.members.empty() ? 64 : sw.members.front().k() / 2);
    std::vector<ChartPoint> nodes;
    for (int i = 0; i <= half; ++i) nodes.push_back(geo.loop(sweep_rho(s), static_cast<double>(i) / half));
    return discrete_energy(make_path(gamma.man, std::move(nodes)));
}

MinmaxResult relax(Sweepout& sw, const RelaxOptions& opts)
{
    if (sw.members.empty()) throw DomainError("empty sweepout");
    const ModelManifold& man = sw.minimizer.path.man;
    const double r = man.uniqueness_radius();
    const std::size_t cap = static_cast<std::size_t>(opts.max_members_factor) * sw.members.size();
    const double max_move = r / 8.0;

    std::vector<double> energy(sw.members.size()), step(sw.members.size(), 1.0);
    for (std::size_t i = 0; i < sw.members.size(); ++i) energy[i] = discrete_energy(sw.members[i]);

    MinmaxResult res;
    res.cls = sw.minimizer.cls;
    res.minimizer_energy = sw.minimizer.energy;
    auto current_max = [&]() { return *std::max_element(energy.begin(), energy.end()); };
    sw.history.assign(1, current_max());

    bool stalled = false;
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        const double before = sw.history.back();
        detail::parallel_for(static_cast<int>(sw.members.size()), opts.jobs, [&](int i) {
            const auto u = static_cast<std::size_t>(i);
            member_step(sw.members[u], energy[u], step[u], max_move);
        });
        if (current_max() > before * (1.0 + 1e-12)) res.trace_monotone = false;

        // Continuity repair: refine where neighbours drifted apart. A midpoint
        // member samples the interpolated family and may sit above the old
        // sampled max near a saddle; it is inserted as is, since pushing it
        // down would tear the family off the pass.
        for (std::size_t i = 0; i < sw.members.size() && sw.members.size() < cap; ++i) {
            const std::size_t j = (i + 1) % sw.members.size();
            if (member_gap(sw.members[i], sw.members[j]) <= 0.5 * r) continue;
            DiscretePath mid = midpoint_member(sw.members[i], sw.members[j]);
            double e = energy_or_inf(mid);
            if (!std::isfinite(e)) continue;
            sw.members.insert(sw.members.begin() + static_cast<std::ptrdiff_t>(i) + 1, std::move(mid));
            energy.insert(energy.begin() + static_cast<std::ptrdiff_t>(i) + 1, e);
            step.insert(step.begin() + static_cast<std::ptrdiff_t>(i) + 1, 1.0);
            if (static_cast<int>(i) < sw.base_index) ++sw.base_index;
            ++i;
        }
        // Coarsen where members bunch together (never the base member).
        for (std::size_t i = 0; sw.members.size() > 8 && i < sw.members.size(); ++i) {
            if (static_cast<int>(i) == sw.base_index) continue;
            const std::size_t n = sw.members.size();
            const std::size_t a = (i + n - 1) % n, b = (i + 1) % n;
            if (member_gap(sw.members[a], sw.members[b]) >= 0.25 * r) continue;
            sw.members.erase(sw.members.begin() + static_cast<std::ptrdiff_t>(i));
            energy.erase(energy.begin() + static_cast<std::ptrdiff_t>(i));
            step.erase(step.begin() + static_cast<std::ptrdiff_t>(i));
            if (static_cast<int>(i) < sw.base_index) --sw.base_index;
            --i;
        }

        const double now = current_max();
        res.refinement_excess = std::max(res.refinement_excess, (now - before) / std::max(before, 1e-300));
        sw.history.push_back(now);
        const auto w = static_cast<std::size_t>(opts.stall_window);
        if (sw.history.size() > w) {
            const double old = sw.history[sw.history.size() - 1 - w];
            if (old - now <= opts.tol * static_cast<double>(w) * std::max(now, 1e-300)) {
                stalled = true;
                ++it;
                break;
            }
        }
    }
    res.trace = sw.history;
    res.iterations = it;
    res.members = static_cast<int>(sw.members.size());
    if (!stalled) {
        std::ostringstream os;
        os << "sweepout relaxation still decreasing after " << opts.max_iter << " steps (max energy "
           << sw.history.back() << ")";
        throw RelaxNonConvergence(os.str(), sw.history);
    }
    res.tau_estimate = sw.history.back();

    const double emin = sw.minimizer.energy;
    auto on_minimizer = [&](double e) { return e <= emin * (1.0 + 1e-6) + 1e-9; };
    if (on_minimizer(res.tau_estimate)) {
        res.collapsed = true;
        res.saddle = sw.minimizer;
        res.saddle_energy = emin;
        res.index = sw.minimizer.index;
        res.note = "family collapsed onto the minimizer; generator is contractible";
        return res;
    }

    std::vector<std::size_t> order(sw.members.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return energy[a] > energy[b]; });
    DescentOptions dopt;
    dopt.tol = opts.saddle_tol;
    dopt.mode = DescentMode::critical;
    bool found = false;
    for (std::size_t c = 0; c < std::min<std::size_t>(order.size(), 8) && !found; ++c) {
        try {
            GeodesicRecord rec = descend(sw.members[order[c]], dopt);
            if (on_minimizer(rec.energy)) continue;
            rec.provenance = "minmax";
            res.saddle = std::move(rec);
            found = true;
        } catch (const NonConvergence&) {
            continue;
        }
    }
    if (!found) {
        res.note = "no saddle extracted from the stalled family";
        res.saddle_energy = res.tau_estimate;
        return res;
    }
    res.saddle_energy = res.saddle.energy;
    res.index = res.saddle.index;
    const bool index_ok = !res.saddle.index_degenerate && res.index >= 1 && res.index <= opts.n_top - 1;
    const bool close = std::abs(res.tau_estimate - res.saddle_energy) <= opts.certify_rel * res.saddle_energy;
    res.certified = index_ok && close;
    if (!index_ok) res.note = "saddle index outside [1, n-1]";
    else if (!close) res.note = "stalled max and saddle energy differ by more than the certification margin";
    return res;
}

SandwichReport verify_sandwich(const std::vector<MinmaxResult>& results, const std::vector<GeodesicRecord>& minimizers,
                               double max_generator_energy)
{
    if (results.size() != minimizers.size() || results.empty())
        throw DomainError("sandwich check needs aligned, non-empty result and minimizer lists");
    SandwichReport rep;
    rep.c_bound = 2.0 * max_generator_energy;
    rep.fitted_c = -kInf;
    for (std::size_t i = 0; i < results.size(); ++i) {
        SandwichRow row;
        row.cls = minimizers[i].cls;
        row.length_sq = minimizers[i].length * minimizers[i].length;
        row.tau = results[i].tau_estimate;
        row.lower_ok = row.length_sq <= row.tau + 1e-6 * std::max(1.0, row.length_sq);
        if (!row.lower_ok) {
            std::ostringstream os;
            os << "lower sandwich bound violated in class " << row.cls.str() << ": L^2 = " << row.length_sq
               << " > tau = " << row.tau;
            throw BoundViolation(os.str());
        }
        rep.fitted_c = std::max(rep.fitted_c, row.tau - 2.0 * row.length_sq);
        rep.rows.push_back(row);
    }
    rep.pass = rep.fitted_c <= rep.c_bound;
    return rep;
}

} // namespace finsler
