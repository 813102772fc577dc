#pragma once

#include "finsler/homotopy_class.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace finsler {

// Points and tangent vectors share one fixed-size layout for all models:
//   torus, cylinder : (x, y, 0, 0)
//   circle x sphere : (theta, sx, sy, sz) with (sx, sy, sz) a unit vector
// Paths are stored in covering-space coordinates (the circle angle and the
// torus coordinates unwrapped), so homotopy classes are read from the lift.
using ChartPoint = Eigen::Vector4d;
using TangentVec = Eigen::Vector4d;

/// Randers torus R^2 / Z^2 with F(v) = |v| + <drift, v>.
struct FlatTorus {
    Eigen::Vector2d drift{0.0, 0.0};
};

/// Flat S^1 x R, circle coordinate in [0, circumference).
struct FlatCylinder {
    double circumference = 1.0;
};

/// Riemannian product S^1(circumference) x S^2(1).
struct CircleTimesSphere {
    double circumference = 1.0;
};

enum class ModelKind { torus, cylinder, product };

/// Flat, totally geodesic 2-plane carrying every geodesic chord between two
/// points: the torus and cylinder universal covers themselves, and for the
/// product the flat torus S^1 x (great circle through both sphere points).
/// Chords are straight segments from the origin to lattice translates of
/// `base`.
struct FlatFrame {
    ChartPoint origin = ChartPoint::Zero();
    Eigen::Vector2d base = Eigen::Vector2d::Zero();
    Eigen::Matrix2d lattice = Eigen::Matrix2d::Identity(); // columns
    int lattice_rank = 2;
    Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();     // product only

    /// Covering-space point reached from the origin by a flat displacement.
    ChartPoint at(ModelKind kind, const Eigen::Vector2d& flat) const;
};

/// Closed-form geodesic from the catalog oracles.
struct OracleGeodesic {
    FlatFrame frame;
    ModelKind kind = ModelKind::torus;
    Eigen::Vector2d flat = Eigen::Vector2d::Zero(); // displacement in the frame
    double length = 0.0;
    int index = 0;
    HomotopyClass cls;

    ChartPoint at(double t) const { return frame.at(kind, t * flat); }
    ChartPoint end() const { return at(1.0); }
};

class ModelManifold {
public:
    using Variant = std::variant<FlatTorus, FlatCylinder, CircleTimesSphere>;

    static ModelManifold torus(const Eigen::Vector2d& drift);
    static ModelManifold cylinder(double circumference);
    static ModelManifold circle_times_sphere(double circumference);

    ModelKind kind() const;
    const Variant& variant() const { return v_; }
    std::string name() const;
    std::string describe() const;
    /// FNV-1a over describe(); identifies the model in database files.
    std::uint64_t hash() const;

    Eigen::Vector2d drift() const;
    double circumference() const;

    int local_dim() const { return kind() == ModelKind::product ? 3 : 2; }
    int group_rank() const { return kind() == ModelKind::torus ? 2 : 1; }

    void validate_point(const ChartPoint& x) const;
    void validate_tangent(const ChartPoint& x, const TangentVec& v) const;

    // --- norm and tensor --------------------------------------------------
    double norm(const ChartPoint& x, const TangentVec& v) const;
    /// g_u in the local tangent basis at x (see tangent_basis).
    Eigen::MatrixXd fundamental_tensor(const ChartPoint& x, const TangentVec& u) const;

    // --- distances ----------------------------------------------------------
    /// Asymmetric quotient distance d(p, q).
    double distance(const ChartPoint& p, const ChartPoint& q) const;
    /// Symmetrised quotient distance used for image comparisons.
    double symmetric_distance(const ChartPoint& a, const ChartPoint& b) const;
    /// F-length of the minimizing covering geodesic from x to y (x, y lifted).
    double segment_length(const ChartPoint& x, const ChartPoint& y) const;
    /// Symmetric size of a lifted segment, compared against the radius.
    double segment_step(const ChartPoint& x, const ChartPoint& y) const;
    /// segment_length^2 with its gradients in both endpoints. Sphere parts
    /// of the gradients are tangent at the respective endpoint.
    double segment_sq(const ChartPoint& x, const ChartPoint& y, TangentVec* gx, TangentVec* gy) const;
    /// Point at fraction t of the minimizing covering geodesic x -> y.
    ChartPoint geodesic_point(const ChartPoint& x, const ChartPoint& y, double t) const;

    double uniqueness_radius() const;
    /// Length of the shortest non-contractible geodesic loop through a point.
    double systole() const;
    double diameter_scale() const;

    // --- local coordinates --------------------------------------------------
    /// Orthonormal basis of the tangent space at x, local_dim() columns,
    /// expressed in the ambient 4-vector layout.
    Eigen::Matrix<double, 4, Eigen::Dynamic> tangent_basis(const ChartPoint& x) const;
    ChartPoint retract(const ChartPoint& x, const double* xi) const;
    /// Local-coordinate gradient at xi of f(retract(x, xi)), given the
    /// ambient gradient of f at the retracted point.
    void pull_back(const ChartPoint& x, const double* xi, const TangentVec& ambient, double* out) const;

    // --- covering space -----------------------------------------------------
    /// Representative of x in the fundamental domain.
    ChartPoint reduce(const ChartPoint& x) const;
    /// Lift of a chart point closest to a given covering point.
    ChartPoint lift_near(const ChartPoint& chart, const ChartPoint& near) const;
    ChartPoint translate(const ChartPoint& x, const HomotopyClass& h) const;
    /// Deck transformation taking reduce(x) to x.
    HomotopyClass deck(const ChartPoint& x) const;

    // --- oracles ------------------------------------------------------------
    FlatFrame flat_frame(const ChartPoint& p, const ChartPoint& q) const;
    double flat_length(const Eigen::Vector2d& flat) const;
    /// Flat displacement of a covering-space chord; inverse of FlatFrame::at
    /// for points in the frame.
    Eigen::Vector2d flat_of(const FlatFrame& frame, const ChartPoint& end) const;
    /// Every oracle geodesic from p to q in the class with length <= max_len.
    /// Degenerate sphere arcs (multiples of pi) are skipped and reported.
    std::vector<OracleGeodesic> oracle_geodesics(const ChartPoint& p, const ChartPoint& q,
                                                 const HomotopyClass& cls, double max_len,
                                                 std::vector<std::string>* warnings = nullptr) const;

private:
    explicit ModelManifold(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

/// Convenience constructors for chart points.
ChartPoint plane_point(double x, double y);
ChartPoint product_point(double theta, const Eigen::Vector3d& s);
Eigen::Vector3d sphere_part(const ChartPoint& x);
/// Great-circle distance of two unit vectors.
double sphere_arc(const Eigen::Vector3d& a, const Eigen::Vector3d& b);
/// Rotation of a unit vector about a unit axis.
Eigen::Vector3d rotate_about(const Eigen::Vector3d& x, const Eigen::Vector3d& axis, double angle);

} // namespace finsler
