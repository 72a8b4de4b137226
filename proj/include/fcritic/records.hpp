#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcritic/label.hpp"
#include "fcritic/verdict.hpp"

namespace fcritic {

enum class ExperimentKind { Perturbation, Promo, RealWorld };

std::string_view experiment_name(ExperimentKind k);
ExperimentKind experiment_from_name(std::string_view name);

struct CaseError {
    std::string kind;  // "backend" | "unparseable"
    std::string message;
    std::string raw;
};

/// One experiment case: what was shown, what the truth is, what came back.
struct CaseRecord {
    std::string case_id;
    ExperimentKind experiment = ExperimentKind::Perturbation;
    /// Perturbation type, scenario kind, or "realworld".
    std::string group;
    /// Ground truth; absent for real-world cases.
    std::optional<Label> label;
    /// Generating spec / scenario / source series id.
    nlohmann::json source = nlohmann::json::object();
    /// Image path relative to the run directory.
    std::string image;
    std::optional<Verdict> verdict;
    std::optional<CaseError> error;
    int retries = 0;
    /// "smape" for synthetic cases, "scrps" for scored real-world cases.
    std::map<std::string, double> scores;
    /// Why a score is missing ("no_actuals", "missing_deciles", ...).
    std::string score_note;

    bool processed() const noexcept { return verdict.has_value() || error.has_value(); }
};

nlohmann::json record_to_json(const CaseRecord& r);
CaseRecord record_from_json(const nlohmann::json& j);

/// Append-only JSONL store of processed records with a companion index.
///
/// Each append writes the record line, flushes, then appends the case id to
/// the index. On open the index is replayed: a record counts as completed only
/// if its id is indexed and its line parses, so a crash mid-write loses at
/// most the case being written. append() is safe to call from many threads.
class RecordStore {
public:
    /// Files <dir>/<stem>.jsonl and <dir>/<stem>.idx; the directory is created.
    explicit RecordStore(const std::filesystem::path& dir, const std::string& stem = "records");

    bool contains(const std::string& case_id) const;
    std::size_t size() const;
    void append(const CaseRecord& record);
    /// Completed records ordered by case id.
    std::vector<CaseRecord> records() const;

private:
    mutable std::mutex mutex_;
    std::filesystem::path jsonl_path_;
    std::filesystem::path index_path_;
    std::map<std::string, CaseRecord> completed_;
    std::ofstream jsonl_;
    std::ofstream index_;
};

/// Case plan skeletons (unprocessed records), one JSON object per line.
void write_plan(const std::filesystem::path& path, const std::vector<CaseRecord>& plan);
std::vector<CaseRecord> read_plan(const std::filesystem::path& path);

}  // namespace fcritic
