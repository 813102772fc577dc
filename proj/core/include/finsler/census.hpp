#pragma once

#include "finsler/pathspace.hpp"

#include <optional>
#include <string>
#include <vector>

namespace finsler {

// --- primitive chords -------------------------------------------------------------

/// record = d . c^k up to reparametrisation. For loops (p = q) d is itself
/// the primitive loop c.
struct PrimitiveDecomposition {
    GeodesicRecord primitive;
    std::optional<GeodesicRecord> loop;
    int k = 0;
    FlatFrame frame;                   // flat plane of the record, origin p
    Eigen::Vector2d flat;              // record displacement in the frame
    Eigen::Vector2d primitive_flat;    // d
    Eigen::Vector2d loop_flat{0, 0};   // c, zero when absent
    bool closed = false;               // p = q in the quotient
};

/// Detects image repetition by lattice rationality of the flat displacement.
/// A direction whose nearest lattice vector is off by more than tol but less
/// than 10 tol is reported as UndecidedError.
PrimitiveDecomposition decompose_primitive(const GeodesicRecord& rec, double tol = 1e-7);

/// Flat displacement of a record in its own flat plane (sphere arcs are
/// accumulated with sign, so multiple turns are kept).
Eigen::Vector2d flat_displacement(const DiscretePath& path, FlatFrame* frame = nullptr);

// --- geometric counting --------------------------------------------------------------

struct CensusEntry {
    GeodesicRecord record;
    PrimitiveDecomposition decomposition;
    int image_class = -1; // index of the geometric-image class
};

struct Census {
    ModelManifold man = ModelManifold::torus(Eigen::Vector2d::Zero());
    std::vector<CensusEntry> entries;  // sorted by length
    std::vector<double> image_length;  // minimum length per image class
    int image_classes = 0;
};

/// Groups records by image coincidence: sampled Hausdorff distance (128
/// arc-length samples, symmetrised quotient distance) below
/// 1e-4 * diameter_scale. Zero-length records are dropped.
Census build_census(const ModelManifold& man, std::vector<GeodesicRecord> records, int jobs = 1);

/// Symmetric sampled Hausdorff distance between two path images.
double image_distance(const DiscretePath& a, const DiscretePath& b, int samples = 128);

struct CountRow {
    double ell = 0.0;
    long big_n = 0;   // all chords of length <= ell
    long small_n = 0; // geometrically distinct
};

CountRow geometric_count(const Census& census, double ell);

struct GrowthTable {
    std::vector<CountRow> rows;
    double b_p = 0.0;
    bool closed = false; // p = q
};

GrowthTable growth_table(const Census& census, const std::vector<double>& ells, double b_p, bool closed);

struct ConversionCheck {
    bool pass = true;
    int first_violation = -1;
    double worst_margin = 0.0; // min of n - (b_p / 2 ell) N
};

/// n(ell) >= (b_p / 2 ell) N(ell) for every row.
ConversionCheck conversion_bound_check(const GrowthTable& table);

// --- fits -------------------------------------------------------------------------

enum class GrowthFamily { power, log, affine };

struct FitReport {
    GrowthFamily family = GrowthFamily::power;
    double a = 0.0;        // leading coefficient (power: prefactor)
    double b = 0.0;        // offset (power: exponent)
    double b_low = 0.0;    // offset that puts the curve below every row
    double rms = 0.0;
    bool one_sided = false;
    bool verdict = false;  // positive leading coefficient
    std::string describe() const;
};

/// Least squares over the rows with n > 0. Throws FitError with fewer than
/// three such rows.
FitReport fit_growth(const GrowthTable& table, GrowthFamily family);

struct LinearEnvelope {
    double a = 0.0, b = 0.0;   // lower line a m + b
    double a2 = 0.0, b2 = 0.0; // upper line a' m + b'
};

/// a' = least-squares slope over the tail m >= max(m)/2; b' = max(L - a' m);
/// a = a' and b = min(L - a m), so the envelope holds on every point.
LinearEnvelope linear_envelope(const std::vector<int>& m, const std::vector<double>& lengths);

// --- carriers ------------------------------------------------------------------------

struct CarrierEntry {
    long m = 0;     // pairing of the class
    int k = 0;      // iterate count of the carried loop
    int index = -1; // Morse index, -1 when unknown
};

struct CarrierSequence {
    std::string chord;  // description of the carried primitive chord
    std::vector<CarrierEntry> entries; // sorted by m
    int n_top = 2;
};

/// Sequences of records carrying one primitive chord, grouped by chord.
std::vector<CarrierSequence> carrier_sequences(const Census& census, int n_top);

struct CarrierCheck {
    bool applicable = false;      // at least two entries
    bool premise = false;         // index >= 1 at one of the first two (unknown counts as given)
    int kappa = 0;
    int k_limit = 0;              // n (kappa + 1)
    bool k_ok = true;
    double linear_bound = 0.0;    // affine bound on m from the envelope
    double quadratic_bound = 0.0; // P(m_2)
    bool m_ok = true;
    std::vector<int> violations;  // entry positions
};

/// k_i < n (max(k_1, k_2) + 1), and the linear and quadratic bounds on m_i,
/// with envelope constants and r the shortest non-trivially classed loop.
CarrierCheck carrier_bounds(const CarrierSequence& seq, const LinearEnvelope& env, double r);

struct Polynomial {
    std::vector<double> c; // ascending coefficients
    double operator()(double x) const;
    int degree() const;
};

/// Quadratic polynomial of the quadratic-growth lemma.
Polynomial quadratic_carrier_polynomial(const LinearEnvelope& env, double r, int n_top);
/// Affine recurrence N -> a N + b from the linear lemma.
Polynomial linear_carrier_polynomial(const LinearEnvelope& env, int n_top);

struct RecurrenceTable {
    std::vector<double> chain; // N_0, P(N_0), P(P(N_0)), ...
    /// Guaranteed lower bound on A_m: the number of chain points <= m beyond N_0.
    int bound_at(double m) const;
};

RecurrenceTable recurrence_growth(const Polynomial& p, double n0, double max_m);

/// Lower bound on n(ell) implied by a recurrence through the length envelope:
/// A_{floor((ell - b') / a')}, halved when p = q.
double recurrence_count_bound(const RecurrenceTable& t, const LinearEnvelope& env, double ell, bool closed);

} // namespace finsler
