#pragma once

#include "finsler/errors.hpp"
#include "finsler/metrics.hpp"

#include <Eigen/SparseCore>

#include <string>
#include <vector>

namespace finsler {

/// k-broken geodesic: k+1 covering-space nodes, nodes[0] = p and nodes[k] = q
/// fixed. Consecutive nodes stay within the model's uniqueness radius, so
/// the piecewise-minimizing interpolation is well defined.
struct DiscretePath {
    ModelManifold man = ModelManifold::torus(Eigen::Vector2d::Zero());
    std::vector<ChartPoint> nodes;

    int k() const { return static_cast<int>(nodes.size()) - 1; }
    const ChartPoint& front() const { return nodes.front(); }
    const ChartPoint& back() const { return nodes.back(); }
    /// deck(q lift) - deck(p lift); equals the class relative to the
    /// canonical reference chord from the same starting lift.
    HomotopyClass lift_class() const { return man.deck(back()) - man.deck(front()); }
    /// Number of interior coordinates, (k - 1) * local_dim.
    int dof() const { return (k() - 1) * man.local_dim(); }
};

struct GeodesicRecord {
    DiscretePath path;
    double length = 0.0;
    double energy = 0.0;
    int index = 0;
    bool index_degenerate = false;
    HomotopyClass cls;
    double gradient_norm = 0.0;
    int iterations = 0;
    std::string provenance = "descend";
};

/// Raised when descent hits its iteration cap; carries the best iterate.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, DiscretePath best, double gradient_norm)
        : Error(what), best_(std::move(best)), gradient_norm_(gradient_norm) {}
    const DiscretePath& best() const { return best_; }
    double gradient_norm() const { return gradient_norm_; }

private:
    DiscretePath best_;
    double gradient_norm_;
};

// --- construction -------------------------------------------------------------

/// Validates node proximity and sphere normalisation.
DiscretePath make_path(const ModelManifold& man, std::vector<ChartPoint> nodes);
/// ceil(3 L / r_u) rounded up to an even count (>= 2).
int choose_segment_count(const ModelManifold& man, double length_estimate);
/// Samples an oracle geodesic at k uniform parameters; k = 0 picks one.
DiscretePath from_oracle(const ModelManifold& man, const OracleGeodesic& g, int k = 0);
/// Point at parameter t in [0, 1] of the piecewise-geodesic interpolation.
ChartPoint point_at(const DiscretePath& path, double t);
/// Sub-path on [0, s], re-discretised.
DiscretePath restrict_to(const DiscretePath& path, double s);
/// a then b; b is translated by a deck transformation to start at a's end.
DiscretePath concatenate(const DiscretePath& a, const DiscretePath& b);
DiscretePath reversed(const DiscretePath& path);

// --- energy -------------------------------------------------------------------

/// k * sum d(x_i, x_{i+1})^2 in path order.
double discrete_energy(const DiscretePath& path);
double path_length(const DiscretePath& path);
/// Gradient of the energy in the local interior coordinates (size dof()).
Eigen::VectorXd energy_gradient(const DiscretePath& path);
/// Largest distance of an interior node from the geodesic midpoint of its
/// neighbours.
double geodesic_defect(const DiscretePath& path);

/// Retraction onto locally minimizing 2-segment windows; s = 0 is the
/// identity, s = 1 moves each odd node to its window's geodesic midpoint.
DiscretePath regeodesify(const DiscretePath& path, double s);

// --- critical points ------------------------------------------------------------

enum class DescentMode {
    minimize, // energy never increases
    critical, // Newton on the gradient norm; converges to nearby saddles
};

struct DescentOptions {
    double tol = 1e-8;
    int max_iter = 400;
    DescentMode mode = DescentMode::minimize;
    /// Second-order steps; false gives plain adaptive gradient descent.
    bool accelerate = true;
    bool compute_index = true;
    int first_order_max_iter = 200000;
};

GeodesicRecord descend(const DiscretePath& path, const DescentOptions& opts = {});
/// Record for a path assumed critical; no iterations.
GeodesicRecord record_of(const DiscretePath& path, bool compute_index = true);

struct HessianReport {
    Eigen::SparseMatrix<double> hessian; // symmetrised
    double asymmetry = 0.0;              // max |H - H^T| / max |H|
};

/// Finite-difference Hessian of the energy in interior local coordinates.
HessianReport energy_hessian(const DiscretePath& path, double h = 1e-6);

/// Negative eigenvalue count of the discrete Hessian; zero_tol <= 0 selects
/// 1e-7 * (1 + |lambda_max|). Throws DegenerateIndex when an eigenvalue lies
/// within zero_tol of 0.
int morse_index(const GeodesicRecord& rec, double zero_tol = 0.0);
int morse_index(const DiscretePath& path, double zero_tol = 0.0);

} // namespace finsler
