#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcritic/metrics.hpp"
#include "fcritic/records.hpp"

namespace fcritic {

/// Classification scores for one perturbation type or scenario.
struct GroupScore {
    std::string group;
    std::size_t cases = 0;
    std::size_t errors = 0;
    Confusion confusion;
    ClassF1 f1;
    double weighted_f1 = 0.0;
    double accuracy = 0.0;
};

/// sCRPS statistics of cases the critic called reasonable vs. unreasonable.
struct PartitionReport {
    std::size_t flagged_reasonable = 0;    // R in "R:X|U:Y"
    std::size_t flagged_unreasonable = 0;  // U
    std::size_t errors = 0;
    std::size_t excluded = 0;  // critiqued but unscored
    std::optional<SummaryStats> reasonable;
    std::optional<SummaryStats> unreasonable;
    std::optional<double> pct_diff_median;
    std::optional<double> pct_diff_mean;
    /// U is reported for the unreasonable sample.
    std::optional<RankTestResult> mann_whitney;

    bool stats_available() const noexcept { return mann_whitney.has_value(); }
};

struct Report {
    ExperimentKind experiment = ExperimentKind::Perturbation;
    std::size_t total = 0;
    std::size_t errors = 0;
    std::vector<GroupScore> groups;
    /// Pooled over all groups (promo experiment).
    std::optional<GroupScore> overall;
    std::optional<PartitionReport> partition;
    nlohmann::json config = nlohmann::json::object();
    StdFlavor std_flavor = StdFlavor::Sample;
};

/// Scores grouped in order of first appearance of `group_order`, then any
/// remaining groups alphabetically.
Report build_report(ExperimentKind kind, const std::vector<CaseRecord>& records,
                    const nlohmann::json& config_echo,
                    const std::vector<std::string>& group_order = {},
                    StdFlavor flavor = StdFlavor::Sample);

nlohmann::json report_to_json(const Report& report);
std::string report_to_csv(const Report& report);
std::string report_to_markdown(const Report& report);

/// report.md, report.csv, report.json under dir.
void emit_report(const Report& report, const std::filesystem::path& dir);

}  // namespace fcritic
