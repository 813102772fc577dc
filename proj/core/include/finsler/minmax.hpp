#pragma once

#include "finsler/pathspace.hpp"

#include <string>
#include <vector>

namespace finsler {

/// Loop-of-loops f : (S^1, x0) -> (Omega_q, q) used as the generator.
enum class SphereSweep {
    great_circles, // circles through q with centres on a meridian; the pi_2(S^2) generator
    constant,      // contractible control: every loop is the constant loop
};

/// Discretised family f_h : S^1 -> Omega^h_{p,q}. Members are sampled at
/// s_j = 2 pi j / N_s and share endpoints, segment count and class.
struct Sweepout {
    GeodesicRecord minimizer;
    SphereSweep generator = SphereSweep::great_circles;
    std::vector<DiscretePath> members;
    int base_index = 0;
    std::vector<double> history; // max member energy per relaxation step
};

/// Members follow gamma_h(t / lambda(s)) near the base point and gamma_h . f(s)
/// beyond distance 1. Throws NotApplicable on models with pi_2 = 0.
Sweepout build_sweepout(const GeodesicRecord& minimizer, SphereSweep generator = SphereSweep::great_circles,
                        int n_samples = 64);

/// Energy of the loop f(s) at circle parameter s, sampled as in the family.
double generator_energy(const Sweepout& sw, double s);

struct RelaxOptions {
    double tol = 1e-8;        // relative max-energy decrease per step counted as stalled
    int max_iter = 4000;
    int stall_window = 40;
    int max_members_factor = 4;
    double saddle_tol = 1e-8; // gradient tolerance of the saddle descent
    int n_top = 2;            // sweepout dimension n; certified indices lie in [1, n - 1]
    double certify_rel = 0.02;
    int jobs = 1;
};

struct MinmaxResult {
    HomotopyClass cls;
    double minimizer_energy = 0.0;
    double tau_estimate = 0.0;  // stalled max member energy
    double saddle_energy = 0.0; // energy after saddle descent
    GeodesicRecord saddle;
    int index = 0;
    bool certified = false;
    bool collapsed = false;     // family relaxed onto the minimizer
    bool trace_monotone = true;     // no flow step raised the max member energy
    double refinement_excess = 0.0; // largest relative max increase from member insertion
    int iterations = 0;
    int members = 0;
    std::vector<double> trace;
    std::string note;
};

/// Raised when relaxation keeps decreasing at its iteration cap.
class RelaxNonConvergence : public Error {
public:
    RelaxNonConvergence(const std::string& what, std::vector<double> trace)
        : Error(what), trace_(std::move(trace)) {}
    const std::vector<double>& trace() const { return trace_; }

private:
    std::vector<double> trace_;
};

MinmaxResult relax(Sweepout& sweepout, const RelaxOptions& opts = {});

struct SandwichRow {
    HomotopyClass cls;
    double length_sq = 0.0; // L(gamma_h)^2
    double tau = 0.0;
    bool lower_ok = true;
};

struct SandwichReport {
    std::vector<SandwichRow> rows;
    double fitted_c = 0.0; // max(tau - 2 L^2)
    double c_bound = 0.0;  // 2 max E(f)
    bool pass = false;
};

/// L^2 <= tau (hard; BoundViolation beyond 1e-6) and one constant C with
/// tau <= 2 L^2 + C, where C may not exceed 2 max E(f).
SandwichReport verify_sandwich(const std::vector<MinmaxResult>& results,
                               const std::vector<GeodesicRecord>& minimizers, double max_generator_energy);

} // namespace finsler
