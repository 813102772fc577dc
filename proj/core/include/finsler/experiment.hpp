#pragma once

#include "finsler/census.hpp"
#include "finsler/homotopy.hpp"
#include "finsler/minmax.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace finsler {

// --- configuration ------------------------------------------------------------------

/// Flat key = value config in named sections. Every key is optional; unknown
/// sections and keys are rejected.
///
///   [manifold]   model = torus | cylinder | product; drift = "bx by"; circumference
///   [endpoints]  p, q = "x y" (torus, cylinder) or "theta sx sy sz" (product)
///   [scenario]   name; m_min; m_max; perturbation
///   [minmax]     samples; tol; max_iter; n_top
///   [census]     ell_max; ell_steps; n_top
///   [group]      kind = free_abelian | free; rank; max_radius; budget
///   [tolerances] descent; dedup
///   [run]        seed; jobs; out
struct ExperimentConfig {
    std::string model = "torus";
    Eigen::Vector2d drift = Eigen::Vector2d::Zero();
    double circumference = 1.0;
    std::vector<double> p{0.15, 0.25};
    std::vector<double> q{0.65, 0.4};

    std::string scenario = "solve-classes";
    int m_min = -5;
    int m_max = 5;
    double perturbation = 0.1;

    int minmax_samples = 64;
    double minmax_tol = 1e-8;
    int minmax_max_iter = 4000;
    int n_top = 2;

    double ell_max = 20.0;
    int ell_steps = 40;

    std::string group_kind = "free_abelian";
    int group_rank = 2;
    int group_max_radius = 64;
    std::size_t group_budget = 20'000'000;

    double descent_tol = 1e-8;
    double dedup_tol = 1e-9;

    std::uint64_t seed = 1;
    int jobs = 1;
    std::string out = "out";
};

/// Throws ConfigError on unknown keys or unparsable values, DomainError on
/// values outside a model's domain (for instance drift norm >= 1).
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(std::istream& in);
/// Checks cross-field constraints; builds the model to validate it.
void validate(const ExperimentConfig& cfg);

ModelManifold make_model(const ExperimentConfig& cfg);
ChartPoint make_point(const ExperimentConfig& cfg, const std::vector<double>& coords);

// --- scenario building blocks ---------------------------------------------------------

/// Classes m_min..m_max (rank one) or the square [m_min, m_max]^2 (torus).
std::vector<HomotopyClass> class_range(const ModelManifold& man, int m_min, int m_max);

/// Smooth perturbation of the interior nodes: a sum of two sine modes per
/// local coordinate with seeded phases, scaled so the largest displacement
/// equals amplitude. Endpoints stay fixed.
DiscretePath perturb(const DiscretePath& path, double amplitude, std::uint64_t seed);

struct SolveRow {
    HomotopyClass cls;
    GeodesicRecord record;
    double oracle_length = 0.0;
    double node_error = 0.0; // max node distance to the oracle minimizer
};

/// Minimizer per class, descended from a perturbed oracle path.
std::vector<SolveRow> solve_classes(const ModelManifold& man, const ChartPoint& p, const ChartPoint& q,
                                    const std::vector<HomotopyClass>& classes, double perturbation,
                                    std::uint64_t seed, double tol, int jobs);

struct ScanResult {
    std::vector<GeodesicRecord> minimizers;
    std::vector<MinmaxResult> results;
    std::vector<double> analytic_tau; // oracle energy of the first non-minimizing chord
    double max_generator_energy = 0.0;
};

/// Min-max relaxation for each class m_min..m_max on the product model.
ScanResult minmax_scan(const ModelManifold& man, const ChartPoint& p, const ChartPoint& q, int m_min, int m_max,
                       const RelaxOptions& opts, int n_samples);

/// Every oracle chord of length <= ell_max, each confirmed by a descent check.
std::vector<GeodesicRecord> census_records(const ModelManifold& man, const ChartPoint& p, const ChartPoint& q,
                                           double ell_max, int jobs);

/// Evenly spaced grid (ell_max / steps) * {1, ..., steps}.
std::vector<double> ell_grid(double ell_max, int steps);

/// Shortest length per pairing m >= 0 among census records, for envelopes.
void pairing_lengths(const Census& census, std::vector<int>* m, std::vector<double>* lengths);

// --- reports ----------------------------------------------------------------------------

void write_growth_csv(std::ostream& out, const GrowthTable& t);
void write_fit_report(std::ostream& out, const std::vector<FitReport>& fits, const ConversionCheck& conv);
void write_carrier_report(std::ostream& out, const std::vector<CarrierSequence>& seqs,
                          const std::vector<CarrierCheck>& checks);
/// matplotlib script plotting n(ell) against the fitted lower-bound curves.
void write_plot_script(std::ostream& out, const std::string& csv_name, const std::vector<FitReport>& fits);

/// Runs the configured scenario, writing artifacts into cfg.out. Returns the
/// process exit status: 0 success, 1 non-convergence or a failed bound check.
/// Errors of the library propagate.
int run(const ExperimentConfig& cfg, std::ostream& log);

} // namespace finsler
