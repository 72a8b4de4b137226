#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcritic/backend.hpp"
#include "fcritic/config.hpp"
#include "fcritic/critic.hpp"
#include "fcritic/metrics.hpp"
#include "fcritic/perturbation.hpp"
#include "fcritic/plot.hpp"
#include "fcritic/promo.hpp"
#include "fcritic/prompt.hpp"
#include "fcritic/records.hpp"
#include "fcritic/report.hpp"

namespace fcritic {

/// Perturbation groups: the four types plus "mixture".
inline constexpr std::string_view kMixtureGroup = "mixture";

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::Perturbation;
    std::uint64_t seed = 0;

    // perturbation experiment
    std::size_t generated = 334;
    double retain_fraction = 0.75;
    std::size_t clean = 250;
    std::vector<std::string> groups{"vertical_shift", "trend_modify", "time_stretch",
                                    "random_spikes", "mixture"};
    double omega = 0.5;
    double beta = -3.0;
    double alpha = 3.0;
    double gamma = 0.5;
    std::size_t n_max = 3;

    // promo experiment
    std::size_t cases_per_scenario = 500;
    ScenarioParams scenario;

    // synthetic grid
    double t0 = 0.0;
    double dt = 0.1;
    std::size_t n_points = 101;
    double split_time = 8.0;

    // realworld experiment
    std::string input_path;

    PlotStyle style;
    StdFlavor std_flavor = StdFlavor::Sample;
    std::size_t max_parallel = 4;
    RetryPolicy retry;
    std::filesystem::path output_dir = "out";

    TimeGrid grid() const;
    /// Throws ConfigError on inconsistent counts or unknown groups.
    void validate() const;
    /// Everything that determines the results; excludes output_dir.
    nlohmann::json echo() const;
};

/// Every key accepted in config files and overrides.
const std::set<std::string>& known_config_keys();

ExperimentConfig experiment_config_from(const Settings& settings);
BackendConfig backend_config_from(const Settings& settings);
PlotStyle plot_style_from(const Settings& settings);

/// Real-world probabilistic case:
/// {"id":..., "history":[...], "quantiles":{"0.1":[...], ...}, "actuals":[...]}
struct RealWorldCase {
    std::string id;
    std::vector<double> history;
    QuantileForecast forecast;
    std::optional<std::vector<double>> actuals;
};

RealWorldCase realworld_from_json(const nlohmann::json& j);
nlohmann::json realworld_to_json(const RealWorldCase& c);
std::vector<RealWorldCase> read_realworld_jsonl(const std::string& path);

/// {"type": ..., <parameters>}; shared by case sources and the perturb subcommand.
nlohmann::json perturbation_to_json(const PerturbKind& kind);
/// The configured parameters for one perturbation type.
PerturbKind perturbation_for(const ExperimentConfig& config, PerturbType type, std::uint64_t spike_seed);
/// "images/<case_id>.png" with characters outside [A-Za-z0-9._-] replaced by '_'.
std::string image_path_for(const std::string& case_id);

/// A synthetic point-forecast plot.
struct PointPlot {
    TimeSeries series;
};

/// A probabilistic plot; the grid spans history plus horizon.
struct ProbabilisticPlot {
    TimeGrid grid;
    std::vector<double> history;
    QuantileForecast forecast;
};

/// A fully determined case, ready to render and critique.
struct CasePlan {
    CaseRecord record;
    TemplateId prompt_template = TemplateId::PointSynthetic;
    std::map<std::string, double> prompt_params;
    std::variant<PointPlot, ProbabilisticPlot> plot;

    std::vector<std::uint8_t> render(const PlotStyle& style) const;
    std::string prompt() const;
};

/// Case generation only; no rendering or critique.
///
/// Perturbation: per type, `generated` candidates filtered to the worst
/// floor(retain_fraction * generated) by forecast SMAPE, plus `clean`
/// unperturbed cases. Mixture draws the type per retained slot and filters
/// within each type's own candidate pool.
std::vector<CasePlan> plan_perturbation(const ExperimentConfig& config);
std::vector<CasePlan> plan_promo(const ExperimentConfig& config);
std::vector<CasePlan> plan_realworld(const ExperimentConfig& config,
                                     const std::vector<RealWorldCase>& cases);

struct RunOptions {
    /// Write the plan and images but do not call the backend.
    bool plan_only = false;
    /// Stop after this many newly processed cases (simulated interruption).
    std::optional<std::size_t> stop_after;
};

struct RunSummary {
    Report report;
    std::size_t planned = 0;
    std::size_t resumed = 0;    // already present in the store
    std::size_t processed = 0;  // critiqued in this invocation
    std::size_t errors = 0;     // records carrying an error, all invocations
    bool complete = false;
};

/// Plan, render, critique and report into config.output_dir:
///   config.json, cases.jsonl, images/<case_id>.png, records.jsonl/.idx,
///   report.{md,csv,json}.
/// Re-running on the same directory resumes: cases already in the store are
/// not sent again. A directory created with a different configuration is
/// rejected with ConfigError.
RunSummary run_experiment(const ExperimentConfig& config, Backend& backend,
                          const RunOptions& options = {},
                          const std::vector<RealWorldCase>* realworld = nullptr);

RunSummary run_perturbation_experiment(const ExperimentConfig& config, Backend& backend,
                                       const RunOptions& options = {});
RunSummary run_promo_experiment(const ExperimentConfig& config, Backend& backend,
                                const RunOptions& options = {});
RunSummary run_realworld_experiment(const ExperimentConfig& config, Backend& backend,
                                    const std::vector<RealWorldCase>& cases,
                                    const RunOptions& options = {});

}  // namespace fcritic
