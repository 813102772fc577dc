#include "finsler/metrics.hpp"

#include "finsler/errors.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace finsler {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kUnitTol = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Eigen::Vector2d planar(const ChartPoint& x) { return x.head<2>(); }

double randers(const Eigen::Vector2d& drift, const Eigen::Vector2d& v)
{
    return v.norm() + drift.dot(v);
}

// Representative of t modulo period in [-period/2, period/2].
double wrap_centered(double t, double period) { return t - period * std::round(t / period); }

} // namespace

ChartPoint plane_point(double x, double y) { return ChartPoint(x, y, 0.0, 0.0); }

ChartPoint product_point(double theta, const Eigen::Vector3d& s)
{
    return ChartPoint(theta, s.x(), s.y(), s.z());
}

Eigen::Vector3d sphere_part(const ChartPoint& x) { return x.tail<3>(); }

double sphere_arc(const Eigen::Vector3d& a, const Eigen::Vector3d& b)
{
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

Eigen::Vector3d rotate_about(const Eigen::Vector3d& x, const Eigen::Vector3d& axis, double angle)
{
    const double c = std::cos(angle), s = std::sin(angle);
    return x * c + axis.cross(x) * s + axis * axis.dot(x) * (1.0 - c);
}

ChartPoint FlatFrame::at(ModelKind kind, const Eigen::Vector2d& flat) const
{
    if (kind != ModelKind::product) {
        ChartPoint r = origin;
        r.head<2>() += flat;
        return r;
    }
    const Eigen::Vector3d s = rotate_about(sphere_part(origin), normal, flat.y());
    return product_point(origin(0) + flat.x(), s.normalized());
}

// ---------------------------------------------------------------------------

ModelManifold ModelManifold::torus(const Eigen::Vector2d& drift)
{
    if (!drift.allFinite() || drift.norm() >= 1.0)
        throw DomainError("Randers drift must have Euclidean norm < 1");
    return ModelManifold(FlatTorus{drift});
}

ModelManifold ModelManifold::cylinder(double circumference)
{
    if (!(circumference > 0.0) || !std::isfinite(circumference))
        throw DomainError("cylinder circumference must be > 0");
    return ModelManifold(FlatCylinder{circumference});
}

ModelManifold ModelManifold::circle_times_sphere(double circumference)
{
    if (!(circumference > 0.0) || !std::isfinite(circumference))
        throw DomainError("circle circumference must be > 0");
    return ModelManifold(CircleTimesSphere{circumference});
}

ModelKind ModelManifold::kind() const
{
    return std::visit(overloaded{
                          [](const FlatTorus&) { return ModelKind::torus; },
                          [](const FlatCylinder&) { return ModelKind::cylinder; },
                          [](const CircleTimesSphere&) { return ModelKind::product; },
                      },
                      v_);
}

std::string ModelManifold::name() const
{
    switch (kind()) {
    case ModelKind::torus: return "torus";
    case ModelKind::cylinder: return "cylinder";
    case ModelKind::product: return "product";
    }
    return "?";
}

std::string ModelManifold::describe() const
{
    std::ostringstream os;
    os.precision(17);
    os << name();
    if (kind() == ModelKind::torus)
        os << " drift=" << drift().x() << ',' << drift().y();
    else
        os << " circumference=" << circumference();
    return os.str();
}

std::uint64_t ModelManifold::hash() const
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : describe()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

Eigen::Vector2d ModelManifold::drift() const
{
    if (auto* t = std::get_if<FlatTorus>(&v_)) return t->drift;
    return Eigen::Vector2d::Zero();
}

double ModelManifold::circumference() const
{
    return std::visit(overloaded{
                          [](const FlatTorus&) { return 1.0; },
                          [](const FlatCylinder& c) { return c.circumference; },
                          [](const CircleTimesSphere& c) { return c.circumference; },
                      },
                      v_);
}

void ModelManifold::validate_point(const ChartPoint& x) const
{
    if (!x.allFinite()) throw DomainError("non-finite chart point");
    if (kind() == ModelKind::product) {
        const double n = sphere_part(x).norm();
        if (std::abs(n - 1.0) > kUnitTol) throw DomainError("sphere point is not a unit vector");
    }
}

void ModelManifold::validate_tangent(const ChartPoint& x, const TangentVec& v) const
{
    validate_point(x);
    if (!v.allFinite()) throw DomainError("non-finite tangent vector");
    if (kind() == ModelKind::product) {
        const Eigen::Vector3d vs = v.tail<3>();
        if (std::abs(sphere_part(x).dot(vs)) > 1e-9 * std::max(1.0, vs.norm()))
            throw DomainError("sphere tangent is not orthogonal to the base point");
    }
}

double ModelManifold::norm(const ChartPoint& x, const TangentVec& v) const
{
    validate_tangent(x, v);
    switch (kind()) {
    case ModelKind::torus: return randers(drift(), planar(v));
    case ModelKind::cylinder: return planar(v).norm();
    case ModelKind::product: return v.norm();
    }
    return 0.0;
}

Eigen::MatrixXd ModelManifold::fundamental_tensor(const ChartPoint& x, const TangentVec& u) const
{
    validate_tangent(x, u);
    if (u.norm() == 0.0) throw DomainError("fundamental tensor is undefined on the zero section");
    if (kind() != ModelKind::torus) return Eigen::MatrixXd::Identity(local_dim(), local_dim());

    // (1/2) Hess F^2 = l l^T + (F/|u|) (I - uhat uhat^T),  l = uhat + drift
    const Eigen::Vector2d uu = planar(u);
    const double a = uu.norm();
    const Eigen::Vector2d uhat = uu / a;
    const Eigen::Vector2d l = uhat + drift();
    const double f = randers(drift(), uu);
    Eigen::Matrix2d g = l * l.transpose() + (f / a) * (Eigen::Matrix2d::Identity() - uhat * uhat.transpose());
    return g;
}

double ModelManifold::distance(const ChartPoint& p, const ChartPoint& q) const
{
    validate_point(p);
    validate_point(q);
    switch (kind()) {
    case ModelKind::torus: {
        const Eigen::Vector2d b = drift();
        Eigen::Vector2d d = planar(q) - planar(p);
        d -= d.array().round().matrix();
        // F(v) >= (1 - |b|)|v| bounds the useful lattice window.
        const int reach = static_cast<int>(std::ceil((1.0 + b.norm()) / (1.0 - b.norm()))) + 1;
        double best = randers(b, d);
        for (int i = -reach; i <= reach; ++i)
            for (int j = -reach; j <= reach; ++j)
                best = std::min(best, randers(b, d + Eigen::Vector2d(i, j)));
        return best;
    }
    case ModelKind::cylinder: {
        const double c = circumference();
        return std::hypot(wrap_centered(q(0) - p(0), c), q(1) - p(1));
    }
    case ModelKind::product: {
        const double c = circumference();
        return std::hypot(wrap_centered(q(0) - p(0), c), sphere_arc(sphere_part(p), sphere_part(q)));
    }
    }
    return 0.0;
}

double ModelManifold::symmetric_distance(const ChartPoint& a, const ChartPoint& b) const
{
    switch (kind()) {
    case ModelKind::torus: {
        Eigen::Vector2d d = planar(b) - planar(a);
        d -= d.array().round().matrix();
        return d.norm();
    }
    case ModelKind::cylinder:
        return std::hypot(wrap_centered(b(0) - a(0), circumference()), b(1) - a(1));
    case ModelKind::product:
        return std::hypot(wrap_centered(b(0) - a(0), circumference()),
                          sphere_arc(sphere_part(a), sphere_part(b)));
    }
    return 0.0;
}

double ModelManifold::segment_length(const ChartPoint& x, const ChartPoint& y) const
{
    switch (kind()) {
    case ModelKind::torus: return randers(drift(), planar(y) - planar(x));
    case ModelKind::cylinder: return (planar(y) - planar(x)).norm();
    case ModelKind::product:
        return std::hypot(y(0) - x(0), sphere_arc(sphere_part(x), sphere_part(y)));
    }
    return 0.0;
}

double ModelManifold::segment_step(const ChartPoint& x, const ChartPoint& y) const
{
    if (kind() == ModelKind::product) return segment_length(x, y);
    return (planar(y) - planar(x)).norm();
}

double ModelManifold::segment_sq(const ChartPoint& x, const ChartPoint& y, TangentVec* gx, TangentVec* gy) const
{
    if (kind() != ModelKind::product) {
        const Eigen::Vector2d b = drift();
        const Eigen::Vector2d d = planar(y) - planar(x);
        const double n = d.norm();
        const double f = n + b.dot(d);
        if (gx || gy) {
            Eigen::Vector2d g = Eigen::Vector2d::Zero();
            if (n > 0.0) g = 2.0 * f * (d / n + b);
            if (gy) *gy << g, 0.0, 0.0;
            if (gx) *gx << -g, 0.0, 0.0;
        }
        return f * f;
    }

    const Eigen::Vector3d xs = sphere_part(x), ys = sphere_part(y);
    const double dt = y(0) - x(0);
    const double sn = xs.cross(ys).norm();
    const double cs = xs.dot(ys);
    const double a = std::atan2(sn, cs);
    if (gx || gy) {
        // d(a^2)/dy = -2 (a / sin a) (x - cos a y), tangent at y
        const double ratio = sn > 1e-300 ? a / sn : 1.0;
        if (gy) {
            const Eigen::Vector3d g = -2.0 * ratio * (xs - cs * ys);
            *gy << 2.0 * dt, g;
        }
        if (gx) {
            const Eigen::Vector3d g = -2.0 * ratio * (ys - cs * xs);
            *gx << -2.0 * dt, g;
        }
    }
    return dt * dt + a * a;
}

ChartPoint ModelManifold::geodesic_point(const ChartPoint& x, const ChartPoint& y, double t) const
{
    if (kind() != ModelKind::product) return x + t * (y - x);
    const Eigen::Vector3d xs = sphere_part(x), ys = sphere_part(y);
    const double a = sphere_arc(xs, ys);
    Eigen::Vector3d s;
    if (a < 1e-12) {
        s = (xs + t * (ys - xs)).normalized();
    } else {
        const double sa = std::sin(a);
        s = (std::sin((1.0 - t) * a) / sa) * xs + (std::sin(t * a) / sa) * ys;
        s.normalize();
    }
    return product_point(x(0) + t * (y(0) - x(0)), s);
}

double ModelManifold::uniqueness_radius() const
{
    switch (kind()) {
    case ModelKind::torus: return 0.5 * (1.0 - drift().norm());
    case ModelKind::cylinder: return 0.5 * circumference();
    case ModelKind::product: return std::min(0.5 * circumference(), 0.5 * kPi);
    }
    return 0.0;
}

double ModelManifold::systole() const
{
    if (kind() != ModelKind::torus) return circumference();
    const Eigen::Vector2d b = drift();
    const int reach = static_cast<int>(std::ceil((1.0 + b.norm()) / (1.0 - b.norm()))) + 1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = -reach; i <= reach; ++i)
        for (int j = -reach; j <= reach; ++j)
            if (i != 0 || j != 0) best = std::min(best, randers(b, Eigen::Vector2d(i, j)));
    return best;
}

double ModelManifold::diameter_scale() const
{
    switch (kind()) {
    case ModelKind::torus: return std::sqrt(0.5);
    case ModelKind::cylinder: return 0.5 * circumference();
    case ModelKind::product: return std::hypot(0.5 * circumference(), kPi);
    }
    return 1.0;
}

Eigen::Matrix<double, 4, Eigen::Dynamic> ModelManifold::tangent_basis(const ChartPoint& x) const
{
    Eigen::Matrix<double, 4, Eigen::Dynamic> b = Eigen::Matrix<double, 4, Eigen::Dynamic>::Zero(4, local_dim());
    if (kind() != ModelKind::product) {
        b(0, 0) = 1.0;
        b(1, 1) = 1.0;
        return b;
    }
    const Eigen::Vector3d s = sphere_part(x);
    int axis = 0;
    s.cwiseAbs().minCoeff(&axis);
    const Eigen::Vector3d a = Eigen::Vector3d::Unit(axis);
    const Eigen::Vector3d e1 = (a - a.dot(s) * s).normalized();
    const Eigen::Vector3d e2 = s.cross(e1);
    b(0, 0) = 1.0;
    b.block<3, 1>(1, 1) = e1;
    b.block<3, 1>(1, 2) = e2;
    return b;
}

ChartPoint ModelManifold::retract(const ChartPoint& x, const double* xi) const
{
    if (kind() != ModelKind::product) return ChartPoint(x(0) + xi[0], x(1) + xi[1], 0.0, 0.0);
    const auto b = tangent_basis(x);
    const Eigen::Vector3d w = sphere_part(x) + xi[1] * b.block<3, 1>(1, 1) + xi[2] * b.block<3, 1>(1, 2);
    return product_point(x(0) + xi[0], w.normalized());
}

void ModelManifold::pull_back(const ChartPoint& x, const double* xi, const TangentVec& ambient, double* out) const
{
    if (kind() != ModelKind::product) {
        out[0] = ambient(0);
        out[1] = ambient(1);
        return;
    }
    const auto b = tangent_basis(x);
    const Eigen::Vector3d w = sphere_part(x) + xi[1] * b.block<3, 1>(1, 1) + xi[2] * b.block<3, 1>(1, 2);
    const double wn = w.norm();
    const Eigen::Vector3d y = w / wn;
    const Eigen::Vector3d g = ambient.tail<3>();
    out[0] = ambient(0);
    for (int j = 1; j <= 2; ++j) {
        const Eigen::Vector3d e = b.block<3, 1>(1, j);
        out[j] = (e - e.dot(y) * y).dot(g) / wn;
    }
}

ChartPoint ModelManifold::reduce(const ChartPoint& x) const
{
    ChartPoint r = x;
    if (kind() == ModelKind::torus) {
        r(0) -= std::floor(r(0));
        r(1) -= std::floor(r(1));
    } else {
        const double c = circumference();
        r(0) -= c * std::floor(r(0) / c);
    }
    return r;
}

ChartPoint ModelManifold::lift_near(const ChartPoint& chart, const ChartPoint& near) const
{
    ChartPoint r = chart;
    if (kind() == ModelKind::torus) {
        r(0) += std::round(near(0) - chart(0));
        r(1) += std::round(near(1) - chart(1));
    } else {
        const double c = circumference();
        r(0) += c * std::round((near(0) - chart(0)) / c);
    }
    return r;
}

ChartPoint ModelManifold::translate(const ChartPoint& x, const HomotopyClass& h) const
{
    if (h.rank() != group_rank()) throw DomainError("homotopy class rank does not match the model");
    ChartPoint r = x;
    if (kind() == ModelKind::torus) {
        r(0) += static_cast<double>(h[0]);
        r(1) += static_cast<double>(h[1]);
    } else {
        r(0) += static_cast<double>(h[0]) * circumference();
    }
    return r;
}

HomotopyClass ModelManifold::deck(const ChartPoint& x) const
{
    if (kind() == ModelKind::torus)
        return HomotopyClass(static_cast<std::int64_t>(std::floor(x(0))), static_cast<std::int64_t>(std::floor(x(1))));
    return HomotopyClass(static_cast<std::int64_t>(std::floor(x(0) / circumference())));
}

FlatFrame ModelManifold::flat_frame(const ChartPoint& p, const ChartPoint& q) const
{
    validate_point(p);
    validate_point(q);
    FlatFrame f;
    f.origin = p;
    const ChartPoint rp = reduce(p), rq = reduce(q);
    switch (kind()) {
    case ModelKind::torus:
        f.base = planar(rq) - planar(rp);
        f.lattice = Eigen::Matrix2d::Identity();
        f.lattice_rank = 2;
        break;
    case ModelKind::cylinder:
        f.base = planar(rq) - planar(rp);
        f.lattice << circumference(), 0.0, 0.0, 0.0;
        f.lattice_rank = 1;
        break;
    case ModelKind::product: {
        const Eigen::Vector3d xs = sphere_part(p), ys = sphere_part(q);
        const Eigen::Vector3d n = xs.cross(ys);
        if (n.norm() < 1e-9)
            throw DomainError("degenerate endpoints: sphere points coincide or are antipodal");
        f.normal = n.normalized();
        f.base = Eigen::Vector2d(rq(0) - rp(0), sphere_arc(xs, ys));
        f.lattice << circumference(), 0.0, 0.0, 2.0 * kPi;
        f.lattice_rank = 2;
        break;
    }
    }
    return f;
}

double ModelManifold::flat_length(const Eigen::Vector2d& flat) const
{
    return kind() == ModelKind::torus ? randers(drift(), flat) : flat.norm();
}

Eigen::Vector2d ModelManifold::flat_of(const FlatFrame& frame, const ChartPoint& end) const
{
    if (kind() != ModelKind::product) return planar(end) - planar(frame.origin);
    const Eigen::Vector3d a = sphere_part(frame.origin), b = sphere_part(end);
    const double angle = std::atan2(frame.normal.dot(a.cross(b)), a.dot(b));
    return Eigen::Vector2d(end(0) - frame.origin(0), angle);
}

std::vector<OracleGeodesic> ModelManifold::oracle_geodesics(const ChartPoint& p, const ChartPoint& q,
                                                            const HomotopyClass& cls, double max_len,
                                                            std::vector<std::string>* warnings) const
{
    if (cls.rank() != group_rank()) throw DomainError("homotopy class rank does not match the model");
    const FlatFrame frame = flat_frame(p, q);
    std::vector<OracleGeodesic> out;
    auto push = [&](const Eigen::Vector2d& flat, int index) {
        OracleGeodesic g;
        g.frame = frame;
        g.kind = kind();
        g.flat = flat;
        g.length = flat_length(flat);
        g.index = index;
        g.cls = cls;
        if (g.length <= max_len * (1.0 + 1e-12)) out.push_back(std::move(g));
    };

    switch (kind()) {
    case ModelKind::torus:
        push(frame.base + Eigen::Vector2d(static_cast<double>(cls[0]), static_cast<double>(cls[1])), 0);
        break;
    case ModelKind::cylinder:
        push(frame.base + Eigen::Vector2d(static_cast<double>(cls[0]) * circumference(), 0.0), 0);
        break;
    case ModelKind::product: {
        const double dtheta = frame.base.x() + static_cast<double>(cls[0]) * circumference();
        if (std::abs(dtheta) > max_len) break;
        const double reach = std::sqrt(std::max(0.0, max_len * max_len - dtheta * dtheta));
        const double period = 2.0 * kPi;
        const auto n_lo = static_cast<long>(std::ceil((-reach - frame.base.y()) / period));
        const auto n_hi = static_cast<long>(std::floor((reach - frame.base.y()) / period));
        for (long n = n_lo; n <= n_hi; ++n) {
            const double phi = frame.base.y() + period * static_cast<double>(n);
            const double turns = std::abs(phi) / kPi;
            if (std::abs(turns - std::round(turns)) < 1e-9) {
                if (warnings) {
                    std::ostringstream os;
                    os << "degenerate sphere arc " << std::abs(phi) << " (multiple of pi) excluded in class "
                       << cls.str();
                    warnings->push_back(os.str());
                }
                continue;
            }
            push(Eigen::Vector2d(dtheta, phi), static_cast<int>(std::floor(turns)));
        }
        break;
    }
    }
    std::sort(out.begin(), out.end(), [](const OracleGeodesic& a, const OracleGeodesic& b) { return a.length < b.length; });
    return out;
}

} // namespace finsler
