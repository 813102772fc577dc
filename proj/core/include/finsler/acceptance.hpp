#pragma once

#include "finsler/census.hpp"
#include "finsler/experiment.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

namespace finsler {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// "[PASS] 3 title: detail", with the wall time appended when asked.
std::string format_result(const CriterionResult& r, bool with_time);

/// End-to-end checks of the whole pipeline. Expensive intermediate results
/// (the product min-max scans and the two censuses) are computed once and
/// shared by the criteria that read them.
class AcceptanceSuite {
public:
    static constexpr int kCriteria = 11;

    explicit AcceptanceSuite(int jobs = 1, std::uint64_t seed = 1);

    /// Never throws: a library error becomes a failing result naming it.
    CriterionResult run(int id);

private:
    CriterionResult geodesic_recovery();
    CriterionResult index_oracle();
    CriterionResult tau_sandwich();
    CriterionResult length_envelope();
    CriterionResult census_growth();
    CriterionResult cylinder_control();
    CriterionResult conversion_bound();
    CriterionResult word_growth();
    CriterionResult carrier_logic();
    CriterionResult recurrence_bounds();
    CriterionResult retraction_monotone();

    const ScanResult& scan_c1();
    const ScanResult& scan_c3();
    const Census& torus_census();
    const Census& product_census();

    int jobs_;
    std::uint64_t seed_;
    std::optional<ScanResult> scan_c1_, scan_c3_;
    std::optional<Census> torus_census_, product_census_;
};

} // namespace finsler
