#include "finsler/experiment.hpp"

#include "finsler/acceptance.hpp"
#include "finsler/database.hpp"
#include "finsler/errors.hpp"
#include "parallel.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace finsler {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::map<std::string, std::set<std::string>>& schema()
{
    static const std::map<std::string, std::set<std::string>> s{
        {"manifold", {"model", "drift", "circumference"}},
        {"endpoints", {"p", "q"}},
        {"scenario", {"name", "m_min", "m_max", "perturbation"}},
        {"minmax", {"samples", "tol", "max_iter", "n_top"}},
        {"census", {"ell_max", "ell_steps", "n_top"}},
        {"group", {"kind", "rank", "max_radius", "budget"}},
        {"tolerances", {"descent", "dedup"}},
        {"run", {"seed", "jobs", "out"}},
    };
    return s;
}

double to_double(const std::string& key, const std::string& v)
{
    double x = 0.0;
    const char* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || ptr != end || !std::isfinite(x)) throw ConfigError(key + ": not a finite number: '" + v + "'");
    return x;
}

template <class Int>
Int to_int(const std::string& key, const std::string& v)
{
    Int x = 0;
    const char* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || ptr != end) throw ConfigError(key + ": not an integer: '" + v + "'");
    return x;
}

std::vector<double> to_list(const std::string& key, const std::string& v)
{
    std::vector<double> out;
    std::istringstream in(v);
    for (std::string tok; in >> tok;) out.push_back(to_double(key, tok));
    if (out.empty()) throw ConfigError(key + ": empty coordinate list");
    return out;
}

std::string csv_num(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

// The flat chord realising the minimizer of a class.
OracleGeodesic minimizer_oracle(const ModelManifold& man, const ChartPoint& p, const ChartPoint& q,
                                const HomotopyClass& cls)
{
    double reach = kInf;
    if (man.kind() == ModelKind::product) {
        const FlatFrame f = man.flat_frame(p, q);
        const double dtheta = f.base.x() + static_cast<double>(cls[0]) * man.circumference();
        reach = std::hypot(dtheta, std::numbers::pi) + 1e-9;
    }
    auto o = man.oracle_geodesics(p, q, cls, reach);
    if (o.empty()) throw DomainError("no oracle chord in class " + cls.str());
    return o.front();
}

std::ofstream open_out(const std::filesystem::path& dir, const std::string& name)
{
    std::ofstream f(dir / name);
    if (!f) throw ConfigError("cannot write " + (dir / name).string());
    return f;
}

} // namespace

// ---------------------------------------------------------------------------

ExperimentConfig parse_config(std::istream& in)
{
    boost::property_tree::ptree pt;
    try {
        boost::property_tree::ini_parser::read_ini(in, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.message() + " at line " + std::to_string(e.line()));
    }
    ExperimentConfig c;
    for (const auto& [section, body] : pt) {
        auto sec = schema().find(section);
        if (sec == schema().end()) throw ConfigError("unknown config section [" + section + "]");
        if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside a section");
        for (const auto& [key, node] : body) {
            if (!sec->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
            const std::string v = node.get_value<std::string>();
            const std::string name = section + "." + key;
            if (section == "manifold") {
                if (key == "model") c.model = v;
                else if (key == "drift") {
                    auto d = to_list(name, v);
                    if (d.size() != 2) throw ConfigError(name + ": expected two numbers");
                    c.drift = Eigen::Vector2d(d[0], d[1]);
                } else c.circumference = to_double(name, v);
            } else if (section == "endpoints") {
                (key == "p" ? c.p : c.q) = to_list(name, v);
            } else if (section == "scenario") {
                if (key == "name") c.scenario = v;
                else if (key == "m_min") c.m_min = to_int<int>(name, v);
                else if (key == "m_max") c.m_max = to_int<int>(name, v);
                else c.perturbation = to_double(name, v);
            } else if (section == "minmax") {
                if (key == "samples") c.minmax_samples = to_int<int>(name, v);
                else if (key == "tol") c.minmax_tol = to_double(name, v);
                else if (key == "max_iter") c.minmax_max_iter = to_int<int>(name, v);
                else c.n_top = to_int<int>(name, v);
            } else if (section == "census") {
                if (key == "ell_max") c.ell_max = to_double(name, v);
                else if (key == "ell_steps") c.ell_steps = to_int<int>(name, v);
                else c.n_top = to_int<int>(name, v);
            } else if (section == "group") {
                if (key == "kind") c.group_kind = v;
                else if (key == "rank") c.group_rank = to_int<int>(name, v);
                else if (key == "max_radius") c.group_max_radius = to_int<int>(name, v);
                else c.group_budget = to_int<std::size_t>(name, v);
            } else if (section == "tolerances") {
                if (key == "descent") c.descent_tol = to_double(name, v);
                else c.dedup_tol = to_double(name, v);
            } else {
                if (key == "seed") c.seed = to_int<std::uint64_t>(name, v);
                else if (key == "jobs") c.jobs = to_int<int>(name, v);
                else c.out = v;
            }
        }
    }
    return c;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path);
    return parse_config(in);
}

ModelManifold make_model(const ExperimentConfig& cfg)
{
    if (cfg.model == "torus") return ModelManifold::torus(cfg.drift);
    if (cfg.model == "cylinder") return ModelManifold::cylinder(cfg.circumference);
    if (cfg.model == "product") return ModelManifold::circle_times_sphere(cfg.circumference);
    throw ConfigError("manifold.model must be torus, cylinder or product, got '" + cfg.model + "'");
}

ChartPoint make_point(const ExperimentConfig& cfg, const std::vector<double>& x)
{
    ChartPoint pt;
    if (cfg.model == "product") {
        if (x.size() != 4) throw ConfigError("product endpoints need 'theta sx sy sz'");
        pt = product_point(x[0], Eigen::Vector3d(x[1], x[2], x[3]));
    } else {
        if (x.size() != 2) throw ConfigError("planar endpoints need 'x y'");
        pt = plane_point(x[0], x[1]);
    }
    make_model(cfg).validate_point(pt);
    return pt;
}

void validate(const ExperimentConfig& cfg)
{
    static const std::set<std::string> scenarios{"solve-classes", "minmax-scan", "census", "group-growth", "verify-all"};
    if (!scenarios.count(cfg.scenario)) throw ConfigError("unknown scenario '" + cfg.scenario + "'");
    make_model(cfg);
    make_point(cfg, cfg.p);
    make_point(cfg, cfg.q);
    if (cfg.m_min > cfg.m_max) throw ConfigError("scenario.m_min exceeds m_max");
    if (!(cfg.perturbation >= 0.0)) throw ConfigError("scenario.perturbation must be >= 0");
    if (cfg.minmax_samples < 8) throw ConfigError("minmax.samples must be >= 8");
    if (!(cfg.minmax_tol > 0.0) || !(cfg.descent_tol > 0.0) || !(cfg.dedup_tol >= 0.0))
        throw ConfigError("tolerances must be positive");
    if (cfg.minmax_max_iter < 1) throw ConfigError("minmax.max_iter must be >= 1");
    if (cfg.n_top < 1) throw ConfigError("n_top must be >= 1");
    if (!(cfg.ell_max > 0.0) || cfg.ell_steps < 1) throw ConfigError("census.ell_max and ell_steps must be positive");
    GroupSpec::parse(cfg.group_kind, cfg.group_rank);
    if (cfg.group_max_radius < 1) throw ConfigError("group.max_radius must be >= 1");
    if (cfg.jobs < 1) throw ConfigError("run.jobs must be >= 1");
}

// ---------------------------------------------------------------------------

std::vector<HomotopyClass> class_range(const ModelManifold& man, int m_min, int m_max)
{
    std::vector<HomotopyClass> out;
    for (int a = m_min; a <= m_max; ++a) {
        if (man.group_rank() == 1) {
            out.emplace_back(a);
            continue;
        }
        for (int b = m_min; b <= m_max; ++b) out.emplace_back(a, b);
    }
    return out;
}

DiscretePath perturb(const DiscretePath& path, double amplitude, std::uint64_t seed)
{
    if (amplitude == 0.0 || path.k() < 2) return path;
    const int dim = path.man.local_dim();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> w(-1.0, 1.0), ph(0.0, 2.0 * std::numbers::pi);
    // sin(j pi t) vanishes at both ends; the phase enters through cos weights
    std::vector<std::array<double, 2>> coef(static_cast<std::size_t>(dim));
    for (auto& c : coef) {
        const double phase = ph(rng);
        c = {w(rng) + std::cos(phase), w(rng) * std::sin(phase)};
    }
    const int k = path.k();
    std::vector<Eigen::VectorXd> xi(static_cast<std::size_t>(k + 1), Eigen::VectorXd::Zero(dim));
    double peak = 0.0;
    for (int i = 1; i < k; ++i) {
        const double t = static_cast<double>(i) / k;
        for (int c = 0; c < dim; ++c)
            xi[static_cast<std::size_t>(i)](c) = coef[static_cast<std::size_t>(c)][0] * std::sin(std::numbers::pi * t) +
                                                  coef[static_cast<std::size_t>(c)][1] * std::sin(2.0 * std::numbers::pi * t);
        peak = std::max(peak, xi[static_cast<std::size_t>(i)].norm());
    }
    if (peak == 0.0) return path;
    std::vector<ChartPoint> nodes = path.nodes;
    for (int i = 1; i < k; ++i) {
        const Eigen::VectorXd d = xi[static_cast<std::size_t>(i)] * (amplitude / peak);
        nodes[static_cast<std::size_t>(i)] = path.man.retract(path.nodes[static_cast<std::size_t>(i)], d.data());
    }
    return make_path(path.man, std::move(nodes));
}

std::vector<SolveRow> solve_classes(const ModelManifold& man, const ChartPoint& p, const ChartPoint& q,
                                    const std::vector<HomotopyClass>& classes, double perturbation,
                                    std::uint64_t seed, double tol, int jobs)
{
    std::vector<SolveRow> rows(classes.size());
    std::vector<std::string> errors(classes.size());
    detail::parallel_for(static_cast<int>(classes.size()), jobs, [&](int i) {
        auto& row = rows[static_cast<std::size_t>(i)];
        try {
            row.cls = classes[static_cast<std::size_t>(i)];
            const OracleGeodesic o = minimizer_oracle(man, p, q, row.cls);
            const DiscretePath exact = from_oracle(man, o);
            DescentOptions opts;
            opts.tol = tol;
            row.record = descend(perturb(exact, perturbation, seed + static_cast<std::uint64_t>(i)), opts);
            row.oracle_length = o.length;
            for (std::size_t n = 0; n < exact.nodes.size(); ++n)
                row.node_error = std::max(row.node_error, (row.record.path.nodes[n] - exact.nodes[n]).norm());
        } catch (const NonConvergence& e) {
            errors[static_cast<std::size_t>(i)] = "class " + classes[static_cast<std::size_t>(i)].str() + ": " + e.what();
        }
    });
    for (const auto& e : errors)
        if (!e.empty()) throw NonConvergence(e, DiscretePath{man, {p, q}}, kInf);
    return rows;
}

ScanResult minmax_scan(const ModelManifold& man, const ChartPoint& p, const ChartPoint& q, int m_min, int m_max,
                       const RelaxOptions& opts, int n_samples)
{
    ScanResult out;
    for (int m = m_min; m <= m_max; ++m) {
        const HomotopyClass cls(m);
        const OracleGeodesic o = minimizer_oracle(man, p, q, cls);
        GeodesicRecord min = record_of(from_oracle(man, o));
        min.provenance = "oracle";
        Sweepout sw = build_sweepout(min, SphereSweep::great_circles, n_samples);
        for (int j = 0; j < n_samples; ++j)
            out.max_generator_energy =
                std::max(out.max_generator_energy, generator_energy(sw, 2.0 * std::numbers::pi * j / n_samples));
        // the complementary great-circle arc is the first chord above the minimizer
        const auto chords = man.oracle_geodesics(p, q, cls, o.length + 2.0 * std::numbers::pi + 1e-9);
        double tau = kInf;
        for (const auto& g : chords)
            if (g.index >= 1) tau = std::min(tau, g.length * g.length);
        out.analytic_tau.push_back(tau);
        out.results.push_back(relax(sw, opts));
        out.minimizers.push_back(std::move(min));
    }
    return out;
}

std::vector<GeodesicRecord> census_records(const ModelManifold& man, const ChartPoint& p, const ChartPoint& q,
                                           double ell_max, int jobs)
{
    // every chord of length <= ell_max lies in a class of word size below this
    const double slack = man.kind() == ModelKind::torus ? 1.0 - man.drift().norm() : 1.0;
    const double period = man.kind() == ModelKind::torus ? 1.0 : man.circumference();
    const int reach = static_cast<int>(std::ceil(ell_max / (slack * period))) + 2;
    const auto classes = class_range(man, -reach, reach);
    std::vector<std::vector<GeodesicRecord>> per(classes.size());
    detail::parallel_for(static_cast<int>(classes.size()), jobs, [&](int i) {
        for (const auto& g : man.oracle_geodesics(p, q, classes[static_cast<std::size_t>(i)], ell_max)) {
            if (!(g.length > 0.0)) continue;
            DescentOptions opts;
            opts.mode = DescentMode::critical;
            GeodesicRecord rec = descend(from_oracle(man, g), opts);
            rec.cls = g.cls;
            rec.provenance = "census";
            per[static_cast<std::size_t>(i)].push_back(std::move(rec));
        }
    });
    std::vector<GeodesicRecord> out;
    for (auto& v : per)
        for (auto& r : v) out.push_back(std::move(r));
    return out;
}

std::vector<double> ell_grid(double ell_max, int steps)
{
    std::vector<double> g;
    for (int i = 1; i <= steps; ++i) g.push_back(ell_max * i / steps);
    return g;
}

void pairing_lengths(const Census& census, std::vector<int>* m, std::vector<double>* lengths)
{
    std::map<long, double> best;
    for (const auto& e : census.entries) {
        const long k = static_cast<long>(e.record.cls.pairing());
        if (k < 0) continue;
        auto [it, inserted] = best.emplace(k, e.record.length);
        if (!inserted) it->second = std::min(it->second, e.record.length);
    }
    m->clear();
    lengths->clear();
    for (const auto& [k, l] : best) {
        m->push_back(static_cast<int>(k));
        lengths->push_back(l);
    }
}

// ---------------------------------------------------------------------------

void write_growth_csv(std::ostream& out, const GrowthTable& t)
{
    out << "ell,N,n\n";
    for (const auto& r : t.rows) out << csv_num(r.ell) << ',' << r.big_n << ',' << r.small_n << '\n';
}

void write_fit_report(std::ostream& out, const std::vector<FitReport>& fits, const ConversionCheck& conv)
{
    for (const auto& f : fits) out << f.describe() << '\n';
    out << "conversion_bound=" << (conv.pass ? "pass" : "fail") << " worst_margin=" << csv_num(conv.worst_margin);
    if (!conv.pass) out << " first_violation_row=" << conv.first_violation;
    out << '\n';
}

void write_carrier_report(std::ostream& out, const std::vector<CarrierSequence>& seqs,
                          const std::vector<CarrierCheck>& checks)
{
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        const auto& s = seqs[i];
        const auto& c = checks[i];
        out << "chord " << s.chord << " entries";
        for (const auto& e : s.entries) out << " (" << e.m << ',' << e.k << ')';
        if (!c.applicable) {
            out << " single\n";
            continue;
        }
        if (!c.premise) {
            out << " premise-unmet\n";
            continue;
        }
        out << " k_limit=" << c.k_limit << " k=" << (c.k_ok ? "ok" : "VIOLATED") << " m_linear<=" << csv_num(c.linear_bound)
            << " m_quadratic<=" << csv_num(c.quadratic_bound) << " m=" << (c.m_ok ? "ok" : "VIOLATED") << '\n';
    }
}

void write_plot_script(std::ostream& out, const std::string& csv_name, const std::vector<FitReport>& fits)
{
    out << "import csv, math\nimport matplotlib.pyplot as plt\n\n"
        << "rows = list(csv.DictReader(open('" << csv_name << "')))\n"
        << "ell = [float(r['ell']) for r in rows]\n"
        << "n = [int(r['n']) for r in rows]\n"
        << "big_n = [int(r['N']) for r in rows]\n"
        << "plt.step(ell, n, where='post', label='n (distinct images)')\n"
        << "plt.step(ell, big_n, where='post', label='N (all chords)', alpha=0.5)\n";
    for (const auto& f : fits) {
        switch (f.family) {
        case GrowthFamily::power:
            out << "plt.plot(ell, [math.exp(" << csv_num(f.b_low) << ") * x ** " << csv_num(f.b)
                << " for x in ell], '--', label='power lower curve')\n";
            break;
        case GrowthFamily::log:
            out << "plt.plot(ell, [" << csv_num(f.a) << " * math.log(x) + " << csv_num(f.b_low)
                << " for x in ell], '--', label='log lower curve')\n";
            break;
        case GrowthFamily::affine:
            out << "plt.plot(ell, [" << csv_num(f.a) << " * x + " << csv_num(f.b_low)
                << " for x in ell], '--', label='affine lower curve')\n";
            break;
        }
    }
    out << "plt.xlabel('length bound')\nplt.ylabel('count')\nplt.legend()\n"
        << "plt.savefig('" << csv_name.substr(0, csv_name.rfind('.')) << ".png', dpi=150)\n";
}

// ---------------------------------------------------------------------------

namespace {

int run_solve(const ExperimentConfig& cfg, const std::filesystem::path& dir, std::ostream& log)
{
    const ModelManifold man = make_model(cfg);
    const ChartPoint p = make_point(cfg, cfg.p), q = make_point(cfg, cfg.q);
    const auto rows = solve_classes(man, p, q, class_range(man, cfg.m_min, cfg.m_max), cfg.perturbation, cfg.seed,
                                    cfg.descent_tol, cfg.jobs);
    auto csv = open_out(dir, "classes.csv");
    csv << "class,length,oracle_length,energy,index,iterations,node_error\n";
    std::vector<GeodesicRecord> recs;
    double worst = 0.0;
    for (const auto& r : rows) {
        csv << '"' << r.cls.str() << "\"," << csv_num(r.record.length) << ',' << csv_num(r.oracle_length) << ','
            << csv_num(r.record.energy) << ',' << r.record.index << ',' << r.record.iterations << ','
            << csv_num(r.node_error) << '\n';
        recs.push_back(r.record);
        worst = std::max(worst, r.node_error);
    }
    GeodesicDatabase((dir / "geodesics.db").string()).append(man, recs);
    log << "solved " << rows.size() << " classes, worst node error " << worst << '\n';
    return 0;
}

int run_minmax(const ExperimentConfig& cfg, const std::filesystem::path& dir, std::ostream& log)
{
    const ModelManifold man = make_model(cfg);
    const ChartPoint p = make_point(cfg, cfg.p), q = make_point(cfg, cfg.q);
    RelaxOptions ro;
    ro.tol = cfg.minmax_tol;
    ro.max_iter = cfg.minmax_max_iter;
    ro.n_top = cfg.n_top;
    ro.jobs = cfg.jobs;
    const ScanResult scan = minmax_scan(man, p, q, cfg.m_min, cfg.m_max, ro, cfg.minmax_samples);

    std::vector<GeodesicRecord> recs;
    auto csv = open_out(dir, "sandwich.csv");
    csv << "class,length_sq,tau,saddle_energy,analytic_tau,index,certified\n";
    for (std::size_t i = 0; i < scan.results.size(); ++i) {
        const auto& r = scan.results[i];
        auto trace = open_out(dir, "minmax_trace_m" + r.cls.str() + ".csv");
        trace << "iter,max_energy\n";
        for (std::size_t it = 0; it < r.trace.size(); ++it) trace << it << ',' << csv_num(r.trace[it]) << '\n';
        const double l = scan.minimizers[i].length;
        csv << r.cls.str() << ',' << csv_num(l * l) << ',' << csv_num(r.tau_estimate) << ',' << csv_num(r.saddle_energy)
            << ',' << csv_num(scan.analytic_tau[i]) << ',' << r.index << ',' << (r.certified ? 1 : 0) << '\n';
        recs.push_back(scan.minimizers[i]);
        GeodesicRecord s = r.saddle;
        s.provenance = "minmax";
        recs.push_back(std::move(s));
    }
    GeodesicDatabase((dir / "geodesics.db").string()).append(man, recs);
    const SandwichReport rep = verify_sandwich(scan.results, scan.minimizers, scan.max_generator_energy);
    auto txt = open_out(dir, "sandwich_report.txt");
    txt << "lower_bound=pass fitted_C=" << csv_num(rep.fitted_c) << " C_bound=" << csv_num(rep.c_bound)
        << " upper_bound=" << (rep.pass ? "pass" : "fail") << '\n';
    for (const auto& r : scan.results)
        if (!r.certified) txt << "class " << r.cls.str() << " uncertified: " << r.note << '\n';
    log << "sandwich fitted C = " << rep.fitted_c << " (bound " << rep.c_bound << ")\n";
    if (!rep.pass) {
        log << "error: upper sandwich bound failed\n";
        return 1;
    }
    return 0;
}

int run_census(const ExperimentConfig& cfg, const std::filesystem::path& dir, std::ostream& log)
{
    const ModelManifold man = make_model(cfg);
    const ChartPoint p = make_point(cfg, cfg.p), q = make_point(cfg, cfg.q);
    const bool closed = man.symmetric_distance(p, q) < 1e-12;
    auto recs = deduplicate(census_records(man, p, q, cfg.ell_max, cfg.jobs), cfg.dedup_tol);
    GeodesicDatabase((dir / "geodesics.db").string()).append(man, recs);
    const Census census = build_census(man, std::move(recs), cfg.jobs);

    const GrowthTable table = growth_table(census, ell_grid(cfg.ell_max, cfg.ell_steps), man.systole(), closed);
    auto csv = open_out(dir, "growth.csv");
    write_growth_csv(csv, table);

    std::vector<FitReport> fits;
    for (GrowthFamily f : {GrowthFamily::power, GrowthFamily::log, GrowthFamily::affine}) {
        try {
            fits.push_back(fit_growth(table, f));
        } catch (const FitError& e) {
            log << "fit skipped: " << e.what() << '\n';
        }
    }
    const ConversionCheck conv = conversion_bound_check(table);
    auto rep = open_out(dir, "fit_report.txt");
    write_fit_report(rep, fits, conv);
    auto plot = open_out(dir, "plot_growth.py");
    write_plot_script(plot, "growth.csv", fits);

    LinearEnvelope env;
    std::vector<int> ms;
    std::vector<double> ls;
    pairing_lengths(census, &ms, &ls);
    try {
        env = linear_envelope(ms, ls);
    } catch (const FitError& e) {
        log << "envelope skipped: " << e.what() << '\n';
    }
    const auto seqs = carrier_sequences(census, cfg.n_top);
    std::vector<CarrierCheck> checks;
    bool k_ok = true;
    for (const auto& s : seqs) {
        checks.push_back(carrier_bounds(s, env, man.systole()));
        k_ok = k_ok && checks.back().k_ok;
    }
    auto car = open_out(dir, "carriers.txt");
    write_carrier_report(car, seqs, checks);

    const CountRow last = table.rows.back();
    log << "census: " << census.entries.size() << " chords, " << census.image_classes << " distinct images; n("
        << last.ell << ") = " << last.small_n << '\n';
    if (!conv.pass) log << "error: conversion bound violated at row " << conv.first_violation << '\n';
    if (!k_ok) log << "error: carrier iterate bound violated\n";
    return conv.pass && k_ok ? 0 : 1;
}

int run_group(const ExperimentConfig& cfg, const std::filesystem::path& dir, std::ostream& log)
{
    const GroupSpec spec = GroupSpec::parse(cfg.group_kind, cfg.group_rank);
    std::vector<int> radii;
    for (int r = 0; r <= cfg.group_max_radius; ++r) radii.push_back(r);
    const GroupBallTable t = ball_table(spec, radii, cfg.group_budget);
    auto csv = open_out(dir, "balls.csv");
    csv << "r,count\n";
    for (std::size_t i = 0; i < t.radii.size(); ++i) csv << t.radii[i] << ',' << t.counts[i] << '\n';
    try {
        const DegreeFit f = growth_degree_fit(t);
        auto rep = open_out(dir, "group_fit.txt");
        rep << "group=" << spec.name() << " degree=" << csv_num(f.degree) << " coefficient=" << csv_num(f.coefficient)
            << " rms=" << csv_num(f.rms_residual) << '\n';
        log << spec.name() << ": growth degree " << f.degree << '\n';
    } catch (const FitError& e) {
        log << "degree fit skipped: " << e.what() << '\n';
    }
    return 0;
}

int run_verify(const ExperimentConfig& cfg, const std::filesystem::path& dir, std::ostream& log)
{
    AcceptanceSuite suite(cfg.jobs, cfg.seed);
    auto txt = open_out(dir, "verify.txt");
    bool all = true;
    for (int id = 1; id <= AcceptanceSuite::kCriteria; ++id) {
        const CriterionResult r = suite.run(id);
        txt << format_result(r, false) << '\n';
        log << format_result(r, true) << '\n';
        all = all && r.pass;
    }
    log << (all ? "all criteria pass" : "some criteria FAIL") << '\n';
    return all ? 0 : 1;
}

} // namespace

int run(const ExperimentConfig& cfg, std::ostream& log)
{
    validate(cfg);
    const std::filesystem::path dir(cfg.out);
    std::filesystem::create_directories(dir);
    if (cfg.scenario == "solve-classes") return run_solve(cfg, dir, log);
    if (cfg.scenario == "minmax-scan") return run_minmax(cfg, dir, log);
    if (cfg.scenario == "census") return run_census(cfg, dir, log);
    if (cfg.scenario == "group-growth") return run_group(cfg, dir, log);
    return run_verify(cfg, dir, log);
}

} // namespace finsler
