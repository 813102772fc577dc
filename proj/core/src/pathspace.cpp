#include "finsler/pathspace.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace finsler {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Largest dof for which the Hessian spectrum is computed densely.
constexpr int kDenseLimit = 64;

bool segments_ok(const DiscretePath& path)
{
    const double r = path.man.uniqueness_radius();
    for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i)
        if (!(path.man.segment_step(path.nodes[i], path.nodes[i + 1]) < r)) return false;
    return true;
}

void require_segments(const DiscretePath& path)
{
    const double r = path.man.uniqueness_radius();
    for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
        const double s = path.man.segment_step(path.nodes[i], path.nodes[i + 1]);
        if (!(s < r)) {
            std::ostringstream os;
            os << "segment " << i << " has size " << s << " >= uniqueness radius " << r << "; refine the path";
            throw RefinementRequired(os.str());
        }
    }
}

double energy_unchecked(const DiscretePath& path)
{
    double e = 0.0;
    for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i)
        e += path.man.segment_sq(path.nodes[i], path.nodes[i + 1], nullptr, nullptr);
    return path.k() * e;
}

// Energy, or +inf when a segment leaves the uniqueness radius.
double energy_or_inf(const DiscretePath& path) { return segments_ok(path) ? energy_unchecked(path) : kInf; }

// Local gradient at interior node `base` moved to retract(base, xi), with
// neighbours prev and next held fixed.
void node_gradient(const ModelManifold& man, int k, const ChartPoint& prev, const ChartPoint& base, const double* xi,
                   const ChartPoint& next, double* out)
{
    const ChartPoint y = man.retract(base, xi);
    TangentVec ga, gb;
    man.segment_sq(prev, y, nullptr, &ga);
    man.segment_sq(y, next, &gb, nullptr);
    const TangentVec g = static_cast<double>(k) * (ga + gb);
    man.pull_back(base, xi, g, out);
}

DiscretePath step(const DiscretePath& path, const Eigen::VectorXd& delta, double t)
{
    const int ld = path.man.local_dim();
    DiscretePath out = path;
    double xi[3];
    for (int i = 1; i < path.k(); ++i) {
        for (int a = 0; a < ld; ++a) xi[a] = t * delta((i - 1) * ld + a);
        out.nodes[static_cast<std::size_t>(i)] = path.man.retract(path.nodes[static_cast<std::size_t>(i)], xi);
    }
    return out;
}

struct Inertia {
    int negative = 0;
    bool degenerate = false;
};

double spectral_radius(const Eigen::SparseMatrix<double>& h)
{
    Eigen::VectorXd v = Eigen::VectorXd::Ones(h.rows()).normalized();
    // alternate signs so the start vector sees the high-frequency modes
    for (Eigen::Index i = 1; i < v.size(); i += 2) v(i) = -v(i);
    double lambda = 0.0;
    for (int it = 0; it < 200; ++it) {
        Eigen::VectorXd w = h * v;
        const double nw = w.norm();
        if (nw == 0.0) return 0.0;
        const double next = nw;
        v = w / nw;
        if (it > 10 && std::abs(next - lambda) <= 1e-6 * next) return next;
        lambda = next;
    }
    return lambda;
}

int ldlt_negatives(const Eigen::SparseMatrix<double>& a, bool* ok)
{
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::NaturalOrdering<int>> ldlt(a);
    *ok = ldlt.info() == Eigen::Success;
    if (!*ok) return 0;
    const Eigen::VectorXd d = ldlt.vectorD();
    int neg = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (!(std::abs(d(i)) > 0.0) || !std::isfinite(d(i))) *ok = false;
        if (d(i) < 0.0) ++neg;
    }
    return neg;
}

Inertia inertia(const Eigen::SparseMatrix<double>& h, double zero_tol)
{
    Inertia r;
    const auto n = h.rows();
    if (n == 0) return r;
    if (n <= kDenseLimit) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(h), Eigen::EigenvaluesOnly);
        const Eigen::VectorXd ev = es.eigenvalues();
        const double tol = zero_tol > 0.0 ? zero_tol : 1e-7 * (1.0 + ev.cwiseAbs().maxCoeff());
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            if (std::abs(ev(i)) < tol) r.degenerate = true;
            if (ev(i) < 0.0) ++r.negative;
        }
        return r;
    }
    const double tol = zero_tol > 0.0 ? zero_tol : 1e-7 * (1.0 + spectral_radius(h));
    Eigen::SparseMatrix<double> id(n, n);
    id.setIdentity();
    bool ok_lo = false, ok_hi = false;
    // #(lambda < tol) and #(lambda < -tol)
    const int below_hi = ldlt_negatives(h - tol * id, &ok_hi);
    const int below_lo = ldlt_negatives(h + tol * id, &ok_lo);
    if (!ok_lo || !ok_hi) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(h), Eigen::EigenvaluesOnly);
        const Eigen::VectorXd ev = es.eigenvalues();
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            if (std::abs(ev(i)) < tol) r.degenerate = true;
            if (ev(i) < 0.0) ++r.negative;
        }
        return r;
    }
    r.negative = below_lo;
    r.degenerate = below_hi != below_lo;
    return r;
}

// Newton-type direction. Returns false when no usable direction exists.
bool newton_direction(const Eigen::SparseMatrix<double>& h, const Eigen::VectorXd& g, DescentMode mode,
                      Eigen::VectorXd* delta)
{
    if (mode == DescentMode::minimize) {
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::NaturalOrdering<int>> ldlt(h);
        if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all()) {
            *delta = -ldlt.solve(g);
            return delta->allFinite();
        }
        if (h.rows() > 4 * kDenseLimit) return false;
        // modified Newton: |lambda| keeps the step a descent direction
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es((Eigen::MatrixXd(h)));
        const Eigen::VectorXd ev = es.eigenvalues();
        const double floor = 1e-8 * std::max(1.0, ev.cwiseAbs().maxCoeff());
        const Eigen::VectorXd inv = ev.cwiseAbs().cwiseMax(floor).cwiseInverse();
        *delta = -(es.eigenvectors() * (inv.asDiagonal() * (es.eigenvectors().transpose() * g)));
        return delta->allFinite();
    }
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(h);
    if (lu.info() != Eigen::Success) return false;
    *delta = -lu.solve(g);
    return lu.info() == Eigen::Success && delta->allFinite();
}

} // namespace

// ---------------------------------------------------------------------------

DiscretePath make_path(const ModelManifold& man, std::vector<ChartPoint> nodes)
{
    if (nodes.size() < 2) throw DomainError("a discrete path needs at least two nodes");
    for (const auto& x : nodes) man.validate_point(x);
    DiscretePath p{man, std::move(nodes)};
    require_segments(p);
    return p;
}

int choose_segment_count(const ModelManifold& man, double length_estimate)
{
    int k = static_cast<int>(std::ceil(3.0 * std::max(0.0, length_estimate) / man.uniqueness_radius()));
    k = std::max(k, 2);
    return k + (k % 2);
}

DiscretePath from_oracle(const ModelManifold& man, const OracleGeodesic& g, int k)
{
    if (k <= 0) k = choose_segment_count(man, g.length);
    std::vector<ChartPoint> nodes(static_cast<std::size_t>(k) + 1);
    for (int i = 0; i <= k; ++i) nodes[static_cast<std::size_t>(i)] = g.at(static_cast<double>(i) / k);
    nodes.front() = g.frame.origin;
    return make_path(man, std::move(nodes));
}

ChartPoint point_at(const DiscretePath& path, double t)
{
    t = std::clamp(t, 0.0, 1.0);
    const int k = path.k();
    const double u = t * k;
    const int i = std::min(static_cast<int>(std::floor(u)), k - 1);
    const auto& a = path.nodes[static_cast<std::size_t>(i)];
    const auto& b = path.nodes[static_cast<std::size_t>(i) + 1];
    if (u - i == 0.0) return a;
    if (i == k - 1 && u >= k) return b;
    return path.man.geodesic_point(a, b, u - i);
}

DiscretePath restrict_to(const DiscretePath& path, double s)
{
    if (!(s > 0.0 && s <= 1.0)) throw DomainError("restriction parameter must lie in (0, 1]");
    const int k = std::max(choose_segment_count(path.man, s * path_length(path)), 2);
    std::vector<ChartPoint> nodes(static_cast<std::size_t>(k) + 1);
    for (int i = 0; i <= k; ++i) nodes[static_cast<std::size_t>(i)] = point_at(path, s * i / k);
    return make_path(path.man, std::move(nodes));
}

DiscretePath concatenate(const DiscretePath& a, const DiscretePath& b)
{
    const ModelManifold& man = a.man;
    if (man.hash() != b.man.hash()) throw DomainError("cannot concatenate paths on different models");
    if (man.symmetric_distance(a.back(), b.front()) > 1e-9)
        throw DomainError("concatenation requires the first path to end where the second starts");
    const ChartPoint lifted = man.lift_near(b.front(), a.back());
    ChartPoint shift = lifted - b.front();
    shift.tail<2>().setZero();
    if (man.kind() == ModelKind::product) shift.tail<3>().setZero();
    std::vector<ChartPoint> nodes = a.nodes;
    for (std::size_t i = 1; i < b.nodes.size(); ++i) nodes.push_back(b.nodes[i] + shift);
    return make_path(man, std::move(nodes));
}

DiscretePath reversed(const DiscretePath& path)
{
    DiscretePath r = path;
    std::reverse(r.nodes.begin(), r.nodes.end());
    return r;
}

double discrete_energy(const DiscretePath& path)
{
    require_segments(path);
    return energy_unchecked(path);
}

double path_length(const DiscretePath& path)
{
    double l = 0.0;
    for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) l += path.man.segment_length(path.nodes[i], path.nodes[i + 1]);
    return l;
}

Eigen::VectorXd energy_gradient(const DiscretePath& path)
{
    const int ld = path.man.local_dim();
    Eigen::VectorXd g(std::max(0, path.dof()));
    const double zero[3] = {0.0, 0.0, 0.0};
    for (int i = 1; i < path.k(); ++i) {
        const auto u = static_cast<std::size_t>(i);
        node_gradient(path.man, path.k(), path.nodes[u - 1], path.nodes[u], zero, path.nodes[u + 1],
                      g.data() + (i - 1) * ld);
    }
    return g;
}

double geodesic_defect(const DiscretePath& path)
{
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < path.nodes.size(); ++i) {
        const ChartPoint m = path.man.geodesic_point(path.nodes[i - 1], path.nodes[i + 1], 0.5);
        worst = std::max(worst, path.man.segment_step(m, path.nodes[i]));
    }
    return worst;
}

DiscretePath regeodesify(const DiscretePath& path, double s)
{
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("retraction parameter must lie in [0, 1]");
    require_segments(path);
    DiscretePath out = path;
    // Within each window [x_{2j}, x_{2j+2}] the first half is already
    // minimizing, so r_s moves nothing until s passes 1/2.
    if (s <= 0.5) return out;
    const ModelManifold& man = path.man;
    for (std::size_t j = 0; j + 2 < path.nodes.size(); j += 2) {
        const ChartPoint y = man.geodesic_point(path.nodes[j + 1], path.nodes[j + 2], 2.0 * s - 1.0);
        out.nodes[j + 1] = man.geodesic_point(path.nodes[j], y, 1.0 / (2.0 * s));
    }
    return out;
}

HessianReport energy_hessian(const DiscretePath& path, double h)
{
    const ModelManifold& man = path.man;
    const int ld = man.local_dim();
    const int k = path.k();
    const int n = path.dof();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(3 * ld));
    const double zero[3] = {0.0, 0.0, 0.0};
    double gp[3], gm[3];
    for (int j = 1; j < k; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        for (int b = 0; b < ld; ++b) {
            double xp[3] = {0.0, 0.0, 0.0}, xm[3] = {0.0, 0.0, 0.0};
            xp[b] = h;
            xm[b] = -h;
            const int col = (j - 1) * ld + b;
            node_gradient(man, k, path.nodes[uj - 1], path.nodes[uj], xp, path.nodes[uj + 1], gp);
            node_gradient(man, k, path.nodes[uj - 1], path.nodes[uj], xm, path.nodes[uj + 1], gm);
            for (int a = 0; a < ld; ++a) trip.emplace_back((j - 1) * ld + a, col, (gp[a] - gm[a]) / (2.0 * h));
            const ChartPoint yp = man.retract(path.nodes[uj], xp);
            const ChartPoint ym = man.retract(path.nodes[uj], xm);
            if (j > 1) {
                node_gradient(man, k, path.nodes[uj - 2], path.nodes[uj - 1], zero, yp, gp);
                node_gradient(man, k, path.nodes[uj - 2], path.nodes[uj - 1], zero, ym, gm);
                for (int a = 0; a < ld; ++a) trip.emplace_back((j - 2) * ld + a, col, (gp[a] - gm[a]) / (2.0 * h));
            }
            if (j < k - 1) {
                node_gradient(man, k, yp, path.nodes[uj + 1], zero, path.nodes[uj + 2], gp);
                node_gradient(man, k, ym, path.nodes[uj + 1], zero, path.nodes[uj + 2], gm);
                for (int a = 0; a < ld; ++a) trip.emplace_back(j * ld + a, col, (gp[a] - gm[a]) / (2.0 * h));
            }
        }
    }
    Eigen::SparseMatrix<double> raw(n, n);
    raw.setFromTriplets(trip.begin(), trip.end());
    const Eigen::SparseMatrix<double> rawt = raw.transpose();
    HessianReport rep;
    rep.hessian = 0.5 * (raw + rawt);
    const Eigen::SparseMatrix<double> skew = raw - rawt;
    double scale = 0.0, asym = 0.0;
    for (int c = 0; c < raw.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(raw, c); it; ++it) scale = std::max(scale, std::abs(it.value()));
    for (int c = 0; c < skew.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(skew, c); it; ++it) asym = std::max(asym, std::abs(it.value()));
    rep.asymmetry = scale > 0.0 ? asym / scale : 0.0;
    return rep;
}

int morse_index(const DiscretePath& path, double zero_tol)
{
    const Inertia in = inertia(energy_hessian(path).hessian, zero_tol);
    if (in.degenerate)
        throw DegenerateIndex("Hessian has an eigenvalue within the zero tolerance; endpoints may be conjugate");
    return in.negative;
}

int morse_index(const GeodesicRecord& rec, double zero_tol) { return morse_index(rec.path, zero_tol); }

GeodesicRecord record_of(const DiscretePath& path, bool compute_index)
{
    GeodesicRecord rec;
    rec.path = path;
    rec.energy = discrete_energy(path);
    rec.length = path_length(path);
    rec.cls = path.lift_class();
    rec.gradient_norm = path.dof() > 0 ? energy_gradient(path).norm() : 0.0;
    if (compute_index && path.dof() > 0) {
        const Inertia in = inertia(energy_hessian(path).hessian, 0.0);
        rec.index = in.negative;
        rec.index_degenerate = in.degenerate;
    }
    return rec;
}

GeodesicRecord descend(const DiscretePath& path, const DescentOptions& opts)
{
    if (!(opts.tol > 0.0)) throw DomainError("descent tolerance must be > 0");
    require_segments(path);

    DiscretePath cur = path;
    double e = energy_unchecked(cur);
    Eigen::VectorXd g = energy_gradient(cur);
    double gn = g.size() ? g.norm() : 0.0;
    DiscretePath best = cur;
    double best_gn = gn;
    int iterations = 0;

    auto finish = [&]() {
        GeodesicRecord rec = record_of(cur, opts.compute_index);
        rec.iterations = iterations;
        return rec;
    };
    auto note_best = [&]() {
        if (gn < best_gn) {
            best = cur;
            best_gn = gn;
        }
    };
    if (gn < opts.tol) return finish();

    // Accept a trial point in minimize mode: Armijo decrease, or an energy
    // change at rounding level that still shrinks the gradient.
    auto accept_min = [&](double e_new, double gn_new, double slope, double t) {
        if (!std::isfinite(e_new)) return false;
        if (e_new <= e + 1e-4 * t * slope) return true;
        return e_new <= e + 8.0 * kEps * std::abs(e) && gn_new < gn;
    };

    const int n = cur.dof();
    bool second_order = opts.accelerate;
    while (second_order && iterations < opts.max_iter) {
        Eigen::VectorXd delta;
        const HessianReport hr = energy_hessian(cur);
        if (!newton_direction(hr.hessian, g, opts.mode, &delta)) break;
        const double slope = g.dot(delta);
        if (opts.mode == DescentMode::minimize && !(slope < 0.0)) break;
        bool accepted = false;
        double t = 1.0;
        for (int ls = 0; ls < 40 && !accepted; ++ls, t *= 0.5) {
            DiscretePath trial = step(cur, delta, t);
            const double e_new = energy_or_inf(trial);
            if (!std::isfinite(e_new)) continue;
            const Eigen::VectorXd g_new = energy_gradient(trial);
            const double gn_new = g_new.norm();
            const bool ok = opts.mode == DescentMode::minimize ? accept_min(e_new, gn_new, slope, t)
                                                               : gn_new <= (1.0 - 1e-4 * t) * gn;
            if (ok) {
                cur = std::move(trial);
                e = e_new;
                g = g_new;
                gn = gn_new;
                accepted = true;
            }
        }
        ++iterations;
        if (!accepted) break;
        note_best();
        if (gn < opts.tol) return finish();
    }

    if (opts.mode == DescentMode::critical) {
        std::ostringstream os;
        os << "critical-point Newton iteration stalled at gradient norm " << best_gn << " after " << iterations
           << " iterations";
        throw NonConvergence(os.str(), best, best_gn);
    }

    // Adaptive first-order descent: halve on failure, grow by 1.2 on success.
    double eta = 0.05 / std::max(1, cur.k());
    int fails = 0;
    for (int it = 0; it < opts.first_order_max_iter && n > 0; ++it) {
        DiscretePath trial = step(cur, g, -eta);
        const double e_new = energy_or_inf(trial);
        bool ok = false;
        Eigen::VectorXd g_new;
        if (std::isfinite(e_new)) {
            g_new = energy_gradient(trial);
            ok = accept_min(e_new, g_new.norm(), -gn * gn, eta);
        }
        ++iterations;
        if (ok) {
            cur = std::move(trial);
            e = e_new;
            g = std::move(g_new);
            gn = g.norm();
            eta *= 1.2;
            fails = 0;
            note_best();
            if (gn < opts.tol) return finish();
        } else {
            eta *= 0.5;
            if (++fails > 60) break;
        }
    }
    std::ostringstream os;
    os << "descent reached its iteration cap at gradient norm " << best_gn << " (tol " << opts.tol << ")";
    throw NonConvergence(os.str(), best, best_gn);
}

} // namespace finsler
