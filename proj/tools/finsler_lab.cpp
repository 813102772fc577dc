#include "finsler/errors.hpp"
#include "finsler/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>

namespace {

// Exit status: 0 ok, 1 a check failed or a solver did not converge,
// 2 invalid configuration or arguments.
int dispatch(const std::string& scenario, const std::string& config, const std::string& out,
             std::optional<std::uint64_t> seed, std::optional<int> jobs)
{
    using namespace finsler;
    try {
        ExperimentConfig cfg = config.empty() ? ExperimentConfig{} : load_config(config);
        cfg.scenario = scenario;
        if (!out.empty()) cfg.out = out;
        if (seed) cfg.seed = *seed;
        if (jobs) cfg.jobs = *jobs;
        return run(cfg, std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const NotApplicable& e) {
        std::cerr << "not applicable: " << e.what() << '\n';
        return 2;
    } catch (const NonConvergence& e) {
        std::cerr << "non-convergence: " << e.what() << '\n';
        return 1;
    } catch (const RelaxNonConvergence& e) {
        std::cerr << "non-convergence: " << e.what() << '\n';
        return 1;
    } catch (const BoundViolation& e) {
        std::cerr << "bound violation: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Geodesic counting experiments on Finsler model manifolds"};
    app.require_subcommand(1);

    std::string config, out;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::string chosen;

    for (const char* name : {"solve-classes", "minmax-scan", "census", "group-growth", "verify-all"}) {
        static const std::map<std::string, std::string> help{
            {"solve-classes", "minimize energy in every class of the configured range"},
            {"minmax-scan", "relax sweepouts and check the critical-value sandwich (circle x sphere)"},
            {"census", "count geometrically distinct chords and fit growth laws"},
            {"group-growth", "word-ball table and growth degree of the configured group"},
            {"verify-all", "run every acceptance check and print a pass/fail summary"},
        };
        auto* sub = app.add_subcommand(name, help.at(name));
        sub->add_option("--config", config, "INI experiment config")->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory (overrides [run] out)");
        sub->add_option("--seed", seed, "random seed (overrides [run] seed)");
        sub->add_option("--jobs", jobs, "worker threads (overrides [run] jobs)")->check(CLI::PositiveNumber);
        sub->callback([&chosen, name] { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    return dispatch(chosen, config, out, seed, jobs);
}
