#include "finsler/census.hpp"

#include "parallel.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

namespace finsler {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

Eigen::Matrix2d model_lattice(const ModelManifold& man, int* rank)
{
    Eigen::Matrix2d l;
    switch (man.kind()) {
    case ModelKind::torus:
        l.setIdentity();
        *rank = 2;
        break;
    case ModelKind::cylinder:
        l << man.circumference(), 0.0, 0.0, 0.0;
        *rank = 1;
        break;
    case ModelKind::product:
        l << man.circumference(), 0.0, 0.0, 2.0 * std::numbers::pi;
        *rank = 2;
        break;
    }
    return l;
}

GeodesicRecord flat_record(const ModelManifold& man, const FlatFrame& frame, const Eigen::Vector2d& flat,
                           bool compute_index)
{
    OracleGeodesic g;
    g.frame = frame;
    g.kind = man.kind();
    g.flat = flat;
    g.length = man.flat_length(flat);
    DiscretePath path = from_oracle(man, g);
    GeodesicRecord rec = record_of(path, compute_index);
    rec.provenance = "primitive";
    return rec;
}

// Cumulative symmetric step lengths along the nodes.
std::vector<double> arc_table(const DiscretePath& p)
{
    std::vector<double> s(p.nodes.size(), 0.0);
    for (std::size_t i = 1; i < p.nodes.size(); ++i) s[i] = s[i - 1] + p.man.segment_step(p.nodes[i - 1], p.nodes[i]);
    return s;
}

ChartPoint at_arc(const DiscretePath& p, const std::vector<double>& arc, double s)
{
    auto it = std::upper_bound(arc.begin(), arc.end(), s);
    std::size_t i = it == arc.begin() ? 0 : static_cast<std::size_t>(it - arc.begin()) - 1;
    i = std::min(i, p.nodes.size() - 2);
    const double len = arc[i + 1] - arc[i];
    const double t = len > 0.0 ? std::clamp((s - arc[i]) / len, 0.0, 1.0) : 0.0;
    return p.man.geodesic_point(p.nodes[i], p.nodes[i + 1], t);
}

double distance_to_segment(const ModelManifold& man, const ChartPoint& x, const ChartPoint& a, const ChartPoint& b)
{
    // golden-section search; the symmetric distance is unimodal along a short segment
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = 0.0, hi = 1.0;
    auto f = [&](double t) { return man.symmetric_distance(x, man.geodesic_point(a, b, t)); };
    double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 32; ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + phi * (hi - lo);
            fd = f(d);
        }
    }
    return std::min({fc, fd, f(0.0), f(1.0)});
}

double distance_to_curve(const DiscretePath& curve, const ChartPoint& x)
{
    const ModelManifold& man = curve.man;
    std::vector<double> dist(curve.nodes.size());
    double bd = kInf;
    for (std::size_t i = 0; i < curve.nodes.size(); ++i) {
        dist[i] = man.symmetric_distance(x, curve.nodes[i]);
        bd = std::min(bd, dist[i]);
    }
    // Every segment that can hold a closer point than the nearest node; on
    // closed images the nearest node may be either copy of the base point.
    double out = bd;
    for (std::size_t i = 0; i + 1 < curve.nodes.size(); ++i) {
        const double step = man.segment_step(curve.nodes[i], curve.nodes[i + 1]);
        if (std::min(dist[i], dist[i + 1]) <= bd + step * (1.0 + 1e-9))
            out = std::min(out, distance_to_segment(man, x, curve.nodes[i], curve.nodes[i + 1]));
    }
    return out;
}

// Directed sampled Hausdorff distance; stops early once above `stop`.
double directed_hausdorff(const DiscretePath& a, const DiscretePath& b, int samples, double stop)
{
    const auto arc = arc_table(a);
    const double total = arc.back();
    double worst = 0.0;
    // visit samples in a stride order so distinct images separate early
    const int stride = 37;
    for (int j = 0; j < samples; ++j) {
        const int idx = (j * stride) % samples;
        const double s = samples > 1 ? total * idx / (samples - 1) : 0.0;
        worst = std::max(worst, distance_to_curve(b, at_arc(a, arc, s)));
        if (worst > stop) return worst;
    }
    return worst;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x)
    {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b)
    {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
};

} // namespace

// ---------------------------------------------------------------------------

Eigen::Vector2d flat_displacement(const DiscretePath& path, FlatFrame* frame_out)
{
    const ModelManifold& man = path.man;
    FlatFrame frame;
    frame.origin = path.front();
    frame.lattice = model_lattice(man, &frame.lattice_rank);
    Eigen::Vector2d flat;
    if (man.kind() != ModelKind::product) {
        flat = (path.back() - path.front()).head<2>();
    } else {
        const Eigen::Vector3d ps = sphere_part(path.front()), qs = sphere_part(path.back());
        Eigen::Vector3d n = ps.cross(qs);
        if (n.norm() < 1e-9) {
            n.setZero();
            for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i)
                n += sphere_part(path.nodes[i]).cross(sphere_part(path.nodes[i + 1]));
        }
        if (n.norm() < 1e-12) n = man.tangent_basis(path.front()).block<3, 1>(1, 2);
        frame.normal = n.normalized();
        double phi = 0.0;
        for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
            const Eigen::Vector3d a = sphere_part(path.nodes[i]), b = sphere_part(path.nodes[i + 1]);
            phi += std::atan2(frame.normal.dot(a.cross(b)), a.dot(b));
        }
        flat = Eigen::Vector2d(path.back()(0) - path.front()(0), phi);
    }
    frame.base = flat;
    if (frame_out) *frame_out = frame;
    return flat;
}

PrimitiveDecomposition decompose_primitive(const GeodesicRecord& rec, double tol)
{
    const DiscretePath& path = rec.path;
    const ModelManifold& man = path.man;
    PrimitiveDecomposition out;
    out.flat = flat_displacement(path, &out.frame);
    const Eigen::Vector2d d = out.flat;
    const double dn = d.norm();
    if (dn == 0.0) throw DomainError("a constant path has no primitive decomposition");
    {
        const ChartPoint end = out.frame.at(man.kind(), d);
        if (man.segment_step(end, path.back()) > 1e-6 * (1.0 + dn))
            throw DomainError("record does not follow a straight line of its flat plane");
    }
    out.closed = man.symmetric_distance(path.front(), path.back()) < 1e-9;

    // Shortest lattice vector parallel to d with the same orientation.
    const Eigen::Matrix2d& lat = out.frame.lattice;
    const Eigen::Vector2d dh = d / dn;
    const double reach = dn + 10.0 * tol;
    const int ni = static_cast<int>(std::ceil(reach / lat.col(0).norm()));
    const int nj = out.frame.lattice_rank == 2 ? static_cast<int>(std::ceil(reach / lat.col(1).norm())) : 0;
    std::optional<Eigen::Vector2d> w;
    bool undecided = false;
    for (int i = -ni; i <= ni; ++i) {
        for (int j = -nj; j <= nj; ++j) {
            if (i == 0 && j == 0) continue;
            const Eigen::Vector2d v = i * lat.col(0) + j * lat.col(1);
            if (v.dot(dh) <= 0.0 || v.norm() > reach) continue;
            const double off = std::abs(cross2(dh, v));
            if (off < tol) {
                if (!w || v.norm() < w->norm()) w = v;
            } else if (off < 10.0 * tol) {
                undecided = true;
            }
        }
    }
    if (undecided) throw UndecidedError("flat direction lies within the undecided band of a closed direction");

    if (!w) {
        out.primitive = rec;
        out.primitive_flat = d;
        return out;
    }
    const double t = dn / w->norm();
    if (out.closed) {
        const long g = std::lround(t);
        if (std::abs(t - static_cast<double>(g)) > 1e-6) throw UndecidedError("closed record is not a whole iterate");
        out.k = static_cast<int>(g) - 1;
        out.primitive_flat = *w;
    } else {
        out.k = static_cast<int>(std::floor(t + 1e-12));
        out.primitive_flat = d - out.k * *w;
    }
    out.loop_flat = *w;
    const bool want_index = out.k >= 1;
    out.primitive = out.k == 0 && !out.closed ? rec : flat_record(man, out.frame, out.primitive_flat, want_index);
    if (out.k >= 1 || out.closed) {
        FlatFrame at_q = out.frame;
        at_q.origin = out.frame.at(man.kind(), out.primitive_flat);
        at_q.base.setZero();
        out.loop = flat_record(man, at_q, *w, want_index);
    }
    return out;
}

double image_distance(const DiscretePath& a, const DiscretePath& b, int samples)
{
    return std::max(directed_hausdorff(a, b, samples, kInf), directed_hausdorff(b, a, samples, kInf));
}

Census build_census(const ModelManifold& man, std::vector<GeodesicRecord> records, int jobs)
{
    Census c;
    c.man = man;
    records.erase(std::remove_if(records.begin(), records.end(), [](const GeodesicRecord& r) { return !(r.length > 0.0); }),
                  records.end());
    std::stable_sort(records.begin(), records.end(),
                     [](const GeodesicRecord& a, const GeodesicRecord& b) { return a.length < b.length; });
    c.entries.resize(records.size());
    detail::parallel_for(static_cast<int>(records.size()), jobs, [&](int i) {
        auto& e = c.entries[static_cast<std::size_t>(i)];
        e.record = std::move(records[static_cast<std::size_t>(i)]);
        e.decomposition = decompose_primitive(e.record);
    });

    // Image representative: the primitive loop when the image closes up.
    const int n = static_cast<int>(c.entries.size());
    std::vector<const DiscretePath*> rep(static_cast<std::size_t>(n));
    std::vector<double> rep_len(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto& dec = c.entries[static_cast<std::size_t>(i)].decomposition;
        const bool loop = dec.loop.has_value();
        rep[static_cast<std::size_t>(i)] = loop ? &dec.loop->path : &dec.primitive.path;
        rep_len[static_cast<std::size_t>(i)] = loop ? dec.loop_flat.norm() : dec.flat.norm();
    }
    const double tol = 1e-4 * man.diameter_scale();
    UnionFind uf(n);
    // Entries sharing one representative (same loop or chord) need no sampling.
    std::map<std::string, int> same_rep;
    for (int i = 0; i < n; ++i) {
        const auto& dec = c.entries[static_cast<std::size_t>(i)].decomposition;
        const Eigen::Vector2d f = dec.loop ? dec.loop_flat : dec.flat;
        const ChartPoint o = man.reduce(rep[static_cast<std::size_t>(i)]->front()) + ChartPoint::Zero();
        const Eigen::Vector3d nrm = man.kind() == ModelKind::product ? dec.frame.normal : Eigen::Vector3d::Zero();
        char key[320];
        std::snprintf(key, sizeof key, "%.7f %.7f %.7f %.7f %.7f %.7f %.7f %.7f %.7f %.7f", o(0), o(1), o(2), o(3), f.x(),
                      f.y(), nrm.x(), nrm.y(), nrm.z(), man.reduce(c.entries[static_cast<std::size_t>(i)].record.path.back())(0) + 0.0);
        auto [it, inserted] = same_rep.emplace(key, i);
        if (!inserted) uf.unite(it->second, i);
    }
    // Only one entry per representative is sampled.
    std::vector<int> order;
    for (const auto& [key, i] : same_rep) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return rep_len[static_cast<std::size_t>(a)] != rep_len[static_cast<std::size_t>(b)]
                   ? rep_len[static_cast<std::size_t>(a)] < rep_len[static_cast<std::size_t>(b)]
                   : a < b;
    });
    for (std::size_t x = 0; x < order.size(); ++x) {
        const int i = order[x];
        const auto& ei = c.entries[static_cast<std::size_t>(i)].record.path;
        for (std::size_t y = x + 1; y < order.size(); ++y) {
            const int j = order[y];
            const double li = rep_len[static_cast<std::size_t>(i)], lj = rep_len[static_cast<std::size_t>(j)];
            if (lj - li > 1e-6 * (1.0 + li)) break;
            if (uf.find(i) == uf.find(j)) continue;
            const auto& ej = c.entries[static_cast<std::size_t>(j)].record.path;
            if (man.symmetric_distance(ei.front(), ej.front()) > 1e-9 || man.symmetric_distance(ei.back(), ej.back()) > 1e-9)
                continue;
            const DiscretePath& a = *rep[static_cast<std::size_t>(i)];
            const DiscretePath& b = *rep[static_cast<std::size_t>(j)];
            if (directed_hausdorff(a, b, 128, tol) < tol && directed_hausdorff(b, a, 128, tol) < tol) uf.unite(i, j);
        }
    }
    std::map<int, int> label;
    for (int i = 0; i < n; ++i) {
        const int root = uf.find(i);
        auto [it, inserted] = label.emplace(root, static_cast<int>(label.size()));
        c.entries[static_cast<std::size_t>(i)].image_class = it->second;
        if (inserted) c.image_length.push_back(c.entries[static_cast<std::size_t>(i)].record.length);
        else c.image_length[static_cast<std::size_t>(it->second)] =
            std::min(c.image_length[static_cast<std::size_t>(it->second)], c.entries[static_cast<std::size_t>(i)].record.length);
    }
    c.image_classes = static_cast<int>(label.size());
    return c;
}

CountRow geometric_count(const Census& census, double ell)
{
    CountRow row;
    row.ell = ell;
    const double lim = ell * (1.0 + 1e-12);
    for (const auto& e : census.entries)
        if (e.record.length <= lim) ++row.big_n;
    for (double l : census.image_length)
        if (l <= lim) ++row.small_n;
    return row;
}

GrowthTable growth_table(const Census& census, const std::vector<double>& ells, double b_p, bool closed)
{
    GrowthTable t;
    t.b_p = b_p;
    t.closed = closed;
    for (double l : ells) t.rows.push_back(geometric_count(census, l));
    return t;
}

ConversionCheck conversion_bound_check(const GrowthTable& table)
{
    ConversionCheck c;
    c.worst_margin = kInf;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        if (!(r.ell > 0.0)) continue;
        const double margin = static_cast<double>(r.small_n) - table.b_p / (2.0 * r.ell) * static_cast<double>(r.big_n);
        c.worst_margin = std::min(c.worst_margin, margin);
        if (margin < -1e-12 && c.pass) {
            c.pass = false;
            c.first_violation = static_cast<int>(i);
        }
    }
    return c;
}

// ---------------------------------------------------------------------------

std::string FitReport::describe() const
{
    static const char* names[] = {"power", "log", "affine"};
    char buf[256];
    std::snprintf(buf, sizeof buf, "family=%s a=%.10g b=%.10g b_low=%.10g rms=%.6g one_sided=%d verdict=%s",
                  names[static_cast<int>(family)], a, b, b_low, rms, one_sided ? 1 : 0, verdict ? "pass" : "fail");
    return buf;
}

FitReport fit_growth(const GrowthTable& table, GrowthFamily family)
{
    std::vector<double> xs, ys;
    for (const auto& r : table.rows) {
        // rows below the shortest chord carry no growth information
        if (!(r.ell > 0.0) || r.small_n == 0) continue;
        const double n = static_cast<double>(r.small_n);
        switch (family) {
        case GrowthFamily::power:
            xs.push_back(std::log(r.ell));
            ys.push_back(std::log(n));
            break;
        case GrowthFamily::log:
            xs.push_back(std::log(r.ell));
            ys.push_back(n);
            break;
        case GrowthFamily::affine:
            xs.push_back(r.ell);
            ys.push_back(n);
            break;
        }
    }
    if (xs.size() < 3) throw FitError("growth fit needs at least three usable rows");
    const double m = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw FitError("growth fit rows do not vary in ell");
    const double slope = sxy / sxx;
    const double icpt = my - slope * mx;
    double ss = 0.0, low = kInf;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (icpt + slope * xs[i]);
        ss += r * r;
        low = std::min(low, ys[i] - slope * xs[i]);
    }
    FitReport f;
    f.family = family;
    f.rms = std::sqrt(ss / m);
    if (family == GrowthFamily::power) {
        f.a = std::exp(icpt);
        f.b = slope;
        f.b_low = low; // log prefactor that keeps the power curve below the data
        f.verdict = slope > 1e-9;
    } else {
        f.a = slope;
        f.b = icpt;
        f.b_low = low;
        f.verdict = slope > 1e-9;
    }
    f.one_sided = true;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (ys[i] - (f.b_low + slope * xs[i]) < -1e-9 * (1.0 + std::abs(ys[i]))) f.one_sided = false;
    return f;
}

LinearEnvelope linear_envelope(const std::vector<int>& m, const std::vector<double>& lengths)
{
    if (m.size() != lengths.size() || m.size() < 3) throw FitError("envelope needs at least three (m, L) pairs");
    const int top = *std::max_element(m.begin(), m.end());
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (2 * m[i] >= top) {
            xs.push_back(m[i]);
            ys.push_back(lengths[i]);
        }
    if (xs.size() < 2) throw FitError("envelope tail has fewer than two points");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw FitError("envelope tail is degenerate");
    LinearEnvelope e;
    e.a2 = e.a = sxy / sxx;
    e.b2 = -kInf;
    e.b = kInf;
    for (std::size_t i = 0; i < m.size(); ++i) {
        e.b2 = std::max(e.b2, lengths[i] - e.a2 * m[i]);
        e.b = std::min(e.b, lengths[i] - e.a * m[i]);
    }
    return e;
}

// ---------------------------------------------------------------------------

std::vector<CarrierSequence> carrier_sequences(const Census& census, int n_top)
{
    std::map<std::string, CarrierSequence> groups;
    for (const auto& e : census.entries) {
        const auto& dec = e.decomposition;
        char key[128];
        std::snprintf(key, sizeof key, "%.6f,%.6f", dec.primitive_flat.x() + 0.0, dec.primitive_flat.y() + 0.0);
        auto& seq = groups[key];
        seq.chord = key;
        seq.n_top = n_top;
        seq.entries.push_back({static_cast<long>(e.record.cls.pairing()), dec.k, e.record.index_degenerate ? -1 : e.record.index});
    }
    std::vector<CarrierSequence> out;
    for (auto& [key, seq] : groups) {
        std::stable_sort(seq.entries.begin(), seq.entries.end(), [](const CarrierEntry& a, const CarrierEntry& b) {
            return a.m != b.m ? a.m < b.m : a.k < b.k;
        });
        out.push_back(std::move(seq));
    }
    return out;
}

double Polynomial::operator()(double x) const
{
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
    return v;
}

int Polynomial::degree() const
{
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
        if (c[static_cast<std::size_t>(i)] != 0.0) return i;
    return 0;
}

Polynomial quadratic_carrier_polynomial(const LinearEnvelope& env, double r, int n_top)
{
    if (!(r > 0.0)) throw DomainError("the shortest non-trivial loop length must be > 0");
    const double n = n_top;
    // P(x) = x + (a'x + b')/r + n ((a'x + b')/r + 1) x
    return Polynomial{{env.b2 / r, 1.0 + env.a2 / r + n * (env.b2 / r + 1.0), n * env.a2 / r}};
}

Polynomial linear_carrier_polynomial(const LinearEnvelope& env, int n_top)
{
    if (!(env.a > 0.0)) throw DomainError("the lower envelope slope must be > 0");
    const double n = n_top;
    return Polynomial{{2.0 * n * env.b2 / env.a - env.b / env.a, 2.0 * (env.a2 / env.a) * n}};
}

CarrierCheck carrier_bounds(const CarrierSequence& seq, const LinearEnvelope& env, double r)
{
    CarrierCheck c;
    c.applicable = seq.entries.size() >= 2;
    if (!c.applicable) return c;
    const auto& e1 = seq.entries[0];
    const auto& e2 = seq.entries[1];
    c.premise = e1.index != 0 || e2.index != 0;
    c.kappa = std::max(e1.k, e2.k);
    c.k_limit = seq.n_top * (c.kappa + 1);
    const double m2 = std::abs(static_cast<double>(e2.m));
    c.linear_bound = env.a > 0.0 ? linear_carrier_polynomial(env, seq.n_top)(m2) : kInf;
    c.quadratic_bound = r > 0.0 ? quadratic_carrier_polynomial(env, r, seq.n_top)(m2) : kInf;
    if (!c.premise) return c;
    for (std::size_t i = 0; i < seq.entries.size(); ++i) {
        const auto& e = seq.entries[i];
        const bool k_ok = e.k < c.k_limit;
        const double am = std::abs(static_cast<double>(e.m));
        const bool m_ok = am <= c.linear_bound + 1e-9 && am <= c.quadratic_bound + 1e-9;
        c.k_ok = c.k_ok && k_ok;
        c.m_ok = c.m_ok && m_ok;
        if (!k_ok || !m_ok) c.violations.push_back(static_cast<int>(i));
    }
    return c;
}

int RecurrenceTable::bound_at(double m) const
{
    int steps = 0;
    for (std::size_t j = 1; j < chain.size(); ++j)
        if (chain[j] <= m * (1.0 + 1e-12)) steps = static_cast<int>(j);
    return steps;
}

RecurrenceTable recurrence_growth(const Polynomial& p, double n0, double max_m)
{
    const int deg = p.degree();
    if (deg < 1 || deg > 2 || !(p.c[static_cast<std::size_t>(deg)] > 0.0))
        throw DomainError("recurrence polynomial must be affine or quadratic with positive leading coefficient");
    RecurrenceTable t;
    double x = n0;
    while (x <= max_m * (1.0 + 1e-12)) {
        t.chain.push_back(x);
        const double next = p(x);
        if (!(next > x)) throw DomainError("recurrence does not grow from the start value");
        x = next;
    }
    return t;
}

double recurrence_count_bound(const RecurrenceTable& t, const LinearEnvelope& env, double ell, bool closed)
{
    if (!(env.a2 > 0.0)) return 0.0;
    const double m = std::floor((ell - env.b2) / env.a2);
    if (m < 0.0) return 0.0;
    const double a = t.bound_at(m);
    return closed ? a / 2.0 : a;
}

} // namespace finsler
