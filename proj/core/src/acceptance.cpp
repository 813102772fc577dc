#include "finsler/acceptance.hpp"

#include "finsler/errors.hpp"
#include "finsler/homotopy.hpp"

#include <Eigen/Geometry>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

namespace finsler {

namespace {

constexpr double kPi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

const Eigen::Vector3d ex(1, 0, 0), ey(0, 1, 0), ez(0, 0, 1);

FlatFrame product_frame(const ModelManifold& man, const ChartPoint& origin, const Eigen::Vector3d& normal)
{
    FlatFrame f;
    f.origin = origin;
    f.normal = normal;
    f.lattice << man.circumference(), 0.0, 0.0, 2.0 * kPi;
    f.lattice_rank = 2;
    return f;
}

DiscretePath flat_path(const ModelManifold& man, const FlatFrame& f, const Eigen::Vector2d& flat)
{
    OracleGeodesic g;
    g.frame = f;
    g.kind = man.kind();
    g.flat = flat;
    g.length = man.flat_length(flat);
    return from_oracle(man, g);
}

// Bound curve from the carrier recurrence, checked against a growth table.
struct CurveCheck {
    bool below = true;
    double worst = 0.0; // max of bound - n
    double top = 0.0;   // bound at the last row
};

CurveCheck recurrence_curve(const Polynomial& p, const LinearEnvelope& env, const GrowthTable& t)
{
    double n0 = 1.0;
    while (!(p(n0) > n0) && n0 < 1e6) n0 += 1.0;
    const double ell_max = t.rows.back().ell;
    const double max_m = std::max(0.0, std::floor((ell_max - env.b2) / env.a2));
    const RecurrenceTable chain = recurrence_growth(p, n0, std::max(max_m, n0));
    CurveCheck c;
    c.worst = -1e300;
    for (const auto& row : t.rows) {
        const double bound = recurrence_count_bound(chain, env, row.ell, t.closed);
        c.worst = std::max(c.worst, bound - static_cast<double>(row.small_n));
        if (bound > static_cast<double>(row.small_n)) c.below = false;
        c.top = bound;
    }
    return c;
}

// Random path with steps of at most `step` in a random local direction.
DiscretePath random_path(const ModelManifold& man, std::mt19937_64& rng, double step)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<int> half(1, 16);
    const int k = 2 * half(rng);
    ChartPoint x;
    if (man.kind() == ModelKind::product) {
        Eigen::Vector3d s(g(rng), g(rng), g(rng));
        x = product_point(u(rng) * man.circumference(), s.normalized());
    } else {
        x = plane_point(u(rng), u(rng));
    }
    std::vector<ChartPoint> nodes{x};
    const int dim = man.local_dim();
    for (int i = 0; i < k; ++i) {
        Eigen::VectorXd xi(dim);
        for (int c = 0; c < dim; ++c) xi(c) = g(rng);
        xi *= step * u(rng) / xi.norm();
        nodes.push_back(man.retract(nodes.back(), xi.data()));
    }
    return make_path(man, std::move(nodes));
}

} // namespace

std::string format_result(const CriterionResult& r, bool with_time)
{
    std::ostringstream os;
    os << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.title << ": " << r.detail;
    if (with_time) os << " (" << fmt("%.2f", r.seconds) << " s)";
    return os.str();
}

AcceptanceSuite::AcceptanceSuite(int jobs, std::uint64_t seed) : jobs_(jobs), seed_(seed) {}

CriterionResult AcceptanceSuite::run(int id)
{
    static const char* titles[] = {"",
                                   "geodesic recovery",
                                   "index oracle",
                                   "tau sandwich",
                                   "length envelope",
                                   "census growth",
                                   "cylinder control",
                                   "conversion bound",
                                   "word growth",
                                   "carrier logic",
                                   "recurrence bounds",
                                   "retraction monotonicity"};
    const auto t0 = Clock::now();
    CriterionResult r;
    try {
        switch (id) {
        case 1: r = geodesic_recovery(); break;
        case 2: r = index_oracle(); break;
        case 3: r = tau_sandwich(); break;
        case 4: r = length_envelope(); break;
        case 5: r = census_growth(); break;
        case 6: r = cylinder_control(); break;
        case 7: r = conversion_bound(); break;
        case 8: r = word_growth(); break;
        case 9: r = carrier_logic(); break;
        case 10: r = recurrence_bounds(); break;
        case 11: r = retraction_monotone(); break;
        default: throw DomainError("no criterion " + std::to_string(id));
        }
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.id = id;
    if (id >= 1 && id <= kCriteria) r.title = titles[id];
    r.seconds = since(t0);
    return r;
}

// --- shared scenarios ---------------------------------------------------------------

const ScanResult& AcceptanceSuite::scan_c1()
{
    if (!scan_c1_) {
        const auto man = ModelManifold::circle_times_sphere(1.0);
        RelaxOptions ro;
        ro.jobs = jobs_;
        scan_c1_ = minmax_scan(man, product_point(0, ex), product_point(0, ey), 0, 8, ro, 64);
    }
    return *scan_c1_;
}

const ScanResult& AcceptanceSuite::scan_c3()
{
    if (!scan_c3_) {
        const auto man = ModelManifold::circle_times_sphere(3.0);
        RelaxOptions ro;
        ro.jobs = jobs_;
        scan_c3_ = minmax_scan(man, product_point(0, ex), product_point(0, ey), 0, 12, ro, 64);
    }
    return *scan_c3_;
}

const Census& AcceptanceSuite::torus_census()
{
    if (!torus_census_) {
        const auto man = ModelManifold::torus(Eigen::Vector2d::Zero());
        const ChartPoint p = plane_point(0.15, 0.25);
        torus_census_ = build_census(man, census_records(man, p, p, 20.0, jobs_), jobs_);
    }
    return *torus_census_;
}

const Census& AcceptanceSuite::product_census()
{
    if (!product_census_) {
        const auto man = ModelManifold::circle_times_sphere(1.0);
        const ChartPoint p = product_point(0.0, ex), q = product_point(0.3, ey);
        product_census_ = build_census(man, census_records(man, p, q, 50.0, jobs_), jobs_);
    }
    return *product_census_;
}

// --- criteria -----------------------------------------------------------------------

CriterionResult AcceptanceSuite::geodesic_recovery()
{
    const auto t0 = Clock::now();
    double worst = 0.0;
    int classes = 0, mismatched = 0, max_iter = 0;
    for (const Eigen::Vector2d drift : {Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(0.3, 0.1)}) {
        const auto man = ModelManifold::torus(drift);
        const auto rows = solve_classes(man, plane_point(0.15, 0.25), plane_point(0.65, 0.4), class_range(man, -5, 5),
                                        0.1, seed_, 1e-10, jobs_);
        for (const auto& r : rows) {
            worst = std::max(worst, r.node_error);
            max_iter = std::max(max_iter, r.record.iterations);
            if (r.record.cls != r.cls) ++mismatched;
            ++classes;
        }
    }
    const double t = since(t0);
    CriterionResult r;
    r.pass = worst < 1e-6 && mismatched == 0 && t < 10.0;
    r.detail = std::to_string(classes) + " classes, worst node error " + fmt("%.2e", worst) + " (< 1e-6), " +
               std::to_string(mismatched) + " class mismatches, max " + std::to_string(max_iter) + " iterations, " +
               fmt("%.2f", t) + " s (< 10 s)";
    return r;
}

CriterionResult AcceptanceSuite::index_oracle()
{
    const auto man = ModelManifold::circle_times_sphere(1.0);
    const ChartPoint p = product_point(0.0, ex);
    std::ostringstream os;
    bool arcs_ok = true;
    for (double s : {0.5 * kPi, 1.5 * kPi, 2.5 * kPi}) {
        const GeodesicRecord rec = record_of(flat_path(man, product_frame(man, p, ez), Eigen::Vector2d(0.0, s)));
        const int want = static_cast<int>(std::floor(s / kPi));
        arcs_ok = arcs_ok && rec.index == want && !rec.index_degenerate;
        os << "arc " << fmt("%.1f", s / kPi) << "pi index " << rec.index << " (want " << want << "); ";
    }

    std::mt19937_64 rng(seed_);
    std::uniform_real_distribution<double> arc(0.2 * kPi, 2.8 * kPi), slope(-1.0, 1.0), ang(0.0, 2.0 * kPi);
    auto near_pi = [](double s) { return std::abs(s / kPi - std::round(s / kPi)) < 0.05; };
    int super_fail = 0, exact = 0;
    for (int done = 0; done < 20;) {
        const double s1 = arc(rng), s2 = arc(rng), alpha = slope(rng);
        const Eigen::Vector3d normal = rotate_about(ez, ex, 0.3 * ang(rng));
        if (near_pi(s1) || near_pi(s2) || near_pi(s1 + s2)) continue;
        const ChartPoint start = product_point(0.0, normal.unitOrthogonal());
        const FlatFrame f1 = product_frame(man, start, normal);
        const DiscretePath a = flat_path(man, f1, s1 * Eigen::Vector2d(alpha, 1.0));
        const DiscretePath b = flat_path(man, product_frame(man, a.back(), normal), s2 * Eigen::Vector2d(alpha, 1.0));
        const int ia = record_of(a).index, ib = record_of(b).index;
        const int iab = record_of(concatenate(a, b)).index;
        if (iab < ia + ib) ++super_fail;
        if (iab == static_cast<int>(std::floor((s1 + s2) / kPi))) ++exact;
        ++done;
    }
    CriterionResult r;
    r.pass = arcs_ok && super_fail == 0;
    os << "superadditivity violations " << super_fail << "/20, concatenation index = floor(s/pi) in " << exact << "/20";
    r.detail = os.str();
    return r;
}

CriterionResult AcceptanceSuite::tau_sandwich()
{
    const auto t0 = Clock::now();
    const ScanResult& scan = scan_c1();
    const double t = since(t0);
    const SandwichReport rep = verify_sandwich(scan.results, scan.minimizers, scan.max_generator_energy);
    double worst_tau = 0.0, worst_saddle = 0.0, excess = 0.0;
    int certified = 0;
    bool monotone = true;
    for (std::size_t i = 0; i < scan.results.size(); ++i) {
        const auto& res = scan.results[i];
        const double an = scan.analytic_tau[i];
        worst_tau = std::max(worst_tau, std::abs(res.tau_estimate - an) / an);
        worst_saddle = std::max(worst_saddle, std::abs(res.saddle_energy - an) / an);
        certified += res.certified ? 1 : 0;
        monotone = monotone && res.trace_monotone;
        excess = std::max(excess, res.refinement_excess);
    }
    const int n = static_cast<int>(scan.results.size());
    CriterionResult r;
    r.pass = rep.pass && certified == n && worst_tau <= 0.02 && worst_saddle <= 0.02 && t < 300.0;
    r.detail = "L^2 <= tau in " + std::to_string(n) + "/" + std::to_string(n) + " classes, fitted C " +
               fmt("%.4g", rep.fitted_c) + " <= 2 max E(f) = " + fmt("%.4g", rep.c_bound) + ", worst |tau - analytic| " +
               fmt("%.2e", worst_tau) + " rel, saddle " + fmt("%.2e", worst_saddle) + " rel (<= 0.02), certified " +
               std::to_string(certified) + "/" + std::to_string(n) + ", flow monotone " + (monotone ? "yes" : "no") +
               ", refinement excess " + fmt("%.2e", excess) + ", " + fmt("%.1f", t) + " s (< 300 s)";
    return r;
}

CriterionResult AcceptanceSuite::length_envelope()
{
    const ScanResult& scan = scan_c3();
    std::vector<int> m;
    std::vector<double> len;
    int certified = 0;
    for (const auto& res : scan.results) {
        m.push_back(static_cast<int>(res.cls.pairing()));
        len.push_back(res.saddle.length);
        certified += res.certified ? 1 : 0;
    }
    const LinearEnvelope env = linear_envelope(m, len);
    bool inside = true;
    for (std::size_t i = 0; i < m.size(); ++i)
        inside = inside && env.a * m[i] + env.b <= len[i] + 1e-9 && len[i] <= env.a2 * m[i] + env.b2 + 1e-9;
    const double c = 3.0;
    const double rel_upper = std::abs(env.a2 - c) / c, rel_lower = std::abs(env.a - c) / c;
    CriterionResult r;
    r.pass = inside && rel_upper <= 0.05 && rel_lower <= 0.05 && certified == static_cast<int>(m.size());
    r.detail = "circumference 3, m = 0..12: " + fmt("%.4f", env.a) + " m + " + fmt("%.4f", env.b) + " <= L <= " +
               fmt("%.4f", env.a2) + " m + " + fmt("%.4f", env.b2) + ", a' off by " + fmt("%.2e", rel_upper) +
               " rel, a off by " + fmt("%.2e", rel_lower) + " rel (<= 0.05), certified " + std::to_string(certified) +
               "/" + std::to_string(m.size());
    return r;
}

CriterionResult AcceptanceSuite::census_growth()
{
    const Census& pc = product_census();
    const GrowthTable pt = growth_table(pc, ell_grid(50.0, 50), pc.man.systole(), false);
    const FitReport plog = fit_growth(pt, GrowthFamily::log);

    const Census& tc = torus_census();
    const GrowthTable tt = growth_table(tc, ell_grid(20.0, 40), tc.man.systole(), true);
    const FitReport tpow = fit_growth(tt, GrowthFamily::power);
    const FitReport taff = fit_growth(tt, GrowthFamily::affine);

    CriterionResult r;
    r.pass = plog.verdict && plog.one_sided && tpow.b >= 1.0 && taff.verdict && taff.one_sided;
    r.detail = "product n(50) = " + std::to_string(pt.rows.back().small_n) + ": n >= " + fmt("%.4g", plog.a) +
               " log l + " + fmt("%.4g", plog.b_low) + " (one-sided " + (plog.one_sided ? "yes" : "no") +
               "); torus n(20) = " + std::to_string(tt.rows.back().small_n) + ": power exponent " +
               fmt("%.3f", tpow.b) + " (>= 1), n >= " + fmt("%.4g", taff.a) + " l + " + fmt("%.4g", taff.b_low) +
               " (one-sided " + (taff.one_sided ? "yes" : "no") + ")";
    return r;
}

CriterionResult AcceptanceSuite::cylinder_control()
{
    const double c = 1.0;
    const auto man = ModelManifold::cylinder(c);
    const ChartPoint p = plane_point(0.2, 0.0);
    const Census census = build_census(man, census_records(man, p, p, 10.0, jobs_), jobs_);
    const GrowthTable t = growth_table(census, ell_grid(10.0, 40), man.systole(), true);
    int rows = 0, bad = 0;
    for (const auto& row : t.rows) {
        if (row.ell < c) continue;
        ++rows;
        if (row.small_n != 1) ++bad;
    }
    CriterionResult r;
    r.pass = rows > 0 && bad == 0;
    r.detail = "n = 1 on " + std::to_string(rows - bad) + "/" + std::to_string(rows) +
               " rows with l >= circumference, N(10) = " + std::to_string(t.rows.back().big_n);
    return r;
}

CriterionResult AcceptanceSuite::conversion_bound()
{
    const Census& tc = torus_census();
    const double b_p = tc.man.systole();
    const GrowthTable t = growth_table(tc, ell_grid(20.0, 40), b_p, true);
    const ConversionCheck chk = conversion_bound_check(t);
    GrowthTable bad;
    bad.b_p = 1.0;
    bad.rows = {{1.0, 10, 1}};
    const bool control = !conversion_bound_check(bad).pass;
    CriterionResult r;
    r.pass = chk.pass && control;
    r.detail = "b_p = " + fmt("%.4g", b_p) + ", " + std::to_string(t.rows.size()) + " rows, worst margin " +
               fmt("%.4g", chk.worst_margin) + (chk.pass ? "" : " at row " + std::to_string(chk.first_violation)) +
               ", violating table flagged " + (control ? "yes" : "no");
    return r;
}

CriterionResult AcceptanceSuite::word_growth()
{
    std::vector<int> all;
    for (int r = 0; r <= 64; ++r) all.push_back(r);
    const GroupBallTable z2 = ball_table(GroupSpec::parse("free_abelian", 2), all);
    int mismatched = 0;
    for (int r = 0; r <= 64; ++r) {
        std::uint64_t brute = 0;
        for (int a = -r; a <= r; ++a)
            for (int b = -r; b <= r; ++b)
                if (std::abs(a) + std::abs(b) <= r) ++brute;
        const auto formula = static_cast<std::uint64_t>(2 * r * r + 2 * r + 1);
        if (z2.counts[static_cast<std::size_t>(r)] != brute || brute != formula) ++mismatched;
    }
    std::vector<int> tail;
    for (int r = 8; r <= 64; ++r) tail.push_back(r);
    const DegreeFit d2 = growth_degree_fit(ball_table(GroupSpec::parse("free_abelian", 2), tail));
    const DegreeFit d1 = growth_degree_fit(ball_table(GroupSpec::parse("free_abelian", 1), tail));
    CriterionResult r;
    r.pass = mismatched == 0 && std::abs(d2.degree - 2.0) <= 0.1 && std::abs(d1.degree - 1.0) <= 0.05;
    r.detail = "Z^2 balls r <= 64: " + std::to_string(mismatched) + " mismatches against enumeration and 2r^2+2r+1; degree Z^2 " +
               fmt("%.4f", d2.degree) + " (2 +- 0.1), Z " + fmt("%.4f", d1.degree) + " (1 +- 0.05)";
    return r;
}

CriterionResult AcceptanceSuite::carrier_logic()
{
    int sequences = 0, checked = 0, k_bad = 0, m_bad = 0;
    for (const Census* c : {&torus_census(), &product_census()}) {
        LinearEnvelope env;
        std::vector<int> m;
        std::vector<double> l;
        pairing_lengths(*c, &m, &l);
        env = linear_envelope(m, l);
        for (const auto& s : carrier_sequences(*c, 2)) {
            const CarrierCheck chk = carrier_bounds(s, env, c->man.systole());
            if (!chk.applicable) continue;
            ++sequences;
            if (!chk.premise) continue;
            ++checked;
            if (!chk.k_ok) ++k_bad;
            if (!chk.m_ok) ++m_bad;
        }
    }
    CarrierSequence good{"synthetic", {{1, 0, 1}, {3, 1, 1}}, 2};
    CarrierSequence bad{"synthetic", {{1, 0, 1}, {3, 1, 1}, {5, 7, 1}}, 2};
    const CarrierCheck g = carrier_bounds(good, {}, 0.0), b = carrier_bounds(bad, {}, 0.0);
    const bool controls = g.k_ok && g.k_limit == 4 && !b.k_ok && b.violations == std::vector<int>{2};
    CriterionResult r;
    r.pass = k_bad == 0 && controls;
    r.detail = std::to_string(sequences) + " census sequences with >= 2 entries, " + std::to_string(checked) +
               " meeting the index premise, " + std::to_string(k_bad) + " iterate-bound violations (" +
               std::to_string(m_bad) + " outside the m bounds); synthetic k = 7 flagged " + (controls ? "yes" : "no");
    return r;
}

CriterionResult AcceptanceSuite::recurrence_bounds()
{
    const RecurrenceTable dbl = recurrence_growth(Polynomial{{0.0, 2.0}}, 1.0, 1024.0);
    const RecurrenceTable sq = recurrence_growth(Polynomial{{0.0, 0.0, 1.0}}, 2.0, 65536.0);
    const bool doubling = dbl.bound_at(1024.0) >= 10;
    const bool squaring = sq.chain == std::vector<double>{2, 4, 16, 256, 65536} && sq.bound_at(65536.0) == 4;

    std::ostringstream os;
    os << "A_1024 >= " << dbl.bound_at(1024.0) << ", squaring chain "
       << (squaring ? "2 4 16 256 65536" : "wrong") << "; ";
    bool below = true;

    // product: envelope from the min-max scan on the same model
    {
        const ScanResult& scan = scan_c1();
        std::vector<int> m;
        std::vector<double> l;
        for (const auto& res : scan.results) {
            m.push_back(static_cast<int>(res.cls.pairing()));
            l.push_back(res.saddle.length);
        }
        const LinearEnvelope env = linear_envelope(m, l);
        const Census& pc = product_census();
        const GrowthTable t = growth_table(pc, ell_grid(50.0, 50), pc.man.systole(), false);
        const CurveCheck lin = recurrence_curve(linear_carrier_polynomial(env, 2), env, t);
        const CurveCheck quad = recurrence_curve(quadratic_carrier_polynomial(env, pc.man.systole(), 2), env, t);
        below = below && lin.below && quad.below;
        os << "product bound at l=50: linear " << lin.top << ", quadratic " << quad.top << " vs n "
           << t.rows.back().small_n << "; ";
    }
    // torus: envelope from the shortest census loop per pairing
    {
        const Census& tc = torus_census();
        std::vector<int> m;
        std::vector<double> l;
        pairing_lengths(tc, &m, &l);
        const LinearEnvelope env = linear_envelope(m, l);
        const GrowthTable t = growth_table(tc, ell_grid(20.0, 40), tc.man.systole(), true);
        const CurveCheck lin = recurrence_curve(linear_carrier_polynomial(env, 2), env, t);
        const CurveCheck quad = recurrence_curve(quadratic_carrier_polynomial(env, tc.man.systole(), 2), env, t);
        below = below && lin.below && quad.below;
        os << "torus bound at l=20: linear " << lin.top << ", quadratic " << quad.top << " vs n "
           << t.rows.back().small_n;
    }
    CriterionResult r;
    r.pass = doubling && squaring && below;
    r.detail = os.str();
    return r;
}

CriterionResult AcceptanceSuite::retraction_monotone()
{
    const ModelManifold models[] = {ModelManifold::torus(Eigen::Vector2d(0.3, 0.1)), ModelManifold::cylinder(1.0),
                                    ModelManifold::circle_times_sphere(1.0)};
    std::mt19937_64 rng(seed_);
    int violations = 0, trials = 0;
    double worst = -1e300, drop = 0.0;
    for (const auto& man : models) {
        const double step = 0.45 * man.uniqueness_radius();
        for (int i = 0; i < 100; ++i) {
            const DiscretePath path = random_path(man, rng, step);
            const double e = discrete_energy(path);
            for (double s : {0.25, 0.5, 1.0}) {
                const double er = discrete_energy(regeodesify(path, s));
                worst = std::max(worst, (er - e) / (1.0 + e));
                drop = std::max(drop, (e - er) / (1.0 + e));
                if (er > e + 1e-12 * (1.0 + e)) ++violations;
                ++trials;
            }
        }
    }
    CriterionResult r;
    r.pass = violations == 0;
    r.detail = std::to_string(trials) + " retractions on 3 models, " + std::to_string(violations) +
               " energy increases, max relative change " + fmt("%.2e", worst) +
               ", largest relative decrease " + fmt("%.2e", drop);
    return r;
}

} // namespace finsler
