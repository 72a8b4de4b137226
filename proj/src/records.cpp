#include "fcritic/records.hpp"

#include <string>

#include "fcritic/error.hpp"

namespace fcritic {

std::string_view experiment_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Perturbation: return "perturbation";
        case ExperimentKind::Promo: return "promo";
        case ExperimentKind::RealWorld: return "realworld";
    }
    return "unknown";
}

ExperimentKind experiment_from_name(std::string_view name) {
    if (name == "perturbation") return ExperimentKind::Perturbation;
    if (name == "promo") return ExperimentKind::Promo;
    if (name == "realworld") return ExperimentKind::RealWorld;
    throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

nlohmann::json record_to_json(const CaseRecord& r) {
    nlohmann::json j{{"case_id", r.case_id},
                     {"experiment", experiment_name(r.experiment)},
                     {"group", r.group},
                     {"label", r.label ? nlohmann::json(label_name(*r.label)) : nlohmann::json(nullptr)},
                     {"source", r.source},
                     {"image", r.image},
                     {"scores", r.scores}};
    if (!r.score_note.empty()) j["score_note"] = r.score_note;
    if (r.verdict) {
        j["verdict"] = {{"label", label_name(r.verdict->label)},
                        {"rationale", r.verdict->rationale},
                        {"raw", r.verdict->raw},
                        {"latency_ms", r.verdict->latency_ms},
                        {"backend_id", r.verdict->backend_id}};
    }
    if (r.error) j["error"] = {{"kind", r.error->kind}, {"message", r.error->message}, {"raw", r.error->raw}};
    if (r.verdict || r.error) j["retries"] = r.retries;
    return j;
}

CaseRecord record_from_json(const nlohmann::json& j) {
    CaseRecord r;
    r.case_id = j.at("case_id").get<std::string>();
    r.experiment = experiment_from_name(j.at("experiment").get<std::string>());
    r.group = j.value("group", "");
    if (j.contains("label") && !j.at("label").is_null()) r.label = label_from_name(j.at("label").get<std::string>());
    r.source = j.value("source", nlohmann::json::object());
    r.image = j.value("image", "");
    if (j.contains("scores")) r.scores = j.at("scores").get<std::map<std::string, double>>();
    r.score_note = j.value("score_note", "");
    if (j.contains("verdict")) {
        const auto& v = j.at("verdict");
        Verdict verdict;
        verdict.label = label_from_name(v.at("label").get<std::string>());
        verdict.rationale = v.value("rationale", "");
        verdict.raw = v.value("raw", "");
        verdict.latency_ms = v.value("latency_ms", std::int64_t{0});
        verdict.backend_id = v.value("backend_id", "");
        r.verdict = std::move(verdict);
    }
    if (j.contains("error")) {
        const auto& e = j.at("error");
        r.error = CaseError{e.value("kind", ""), e.value("message", ""), e.value("raw", "")};
    }
    r.retries = j.value("retries", 0);
    return r;
}

RecordStore::RecordStore(const std::filesystem::path& dir, const std::string& stem)
    : jsonl_path_(dir / (stem + ".jsonl")), index_path_(dir / (stem + ".idx")) {
    std::filesystem::create_directories(dir);

    std::set<std::string> indexed;
    {
        std::ifstream idx(index_path_);
        std::string line;
        while (std::getline(idx, line))
            if (!line.empty()) indexed.insert(line);
    }
    {
        std::ifstream in(jsonl_path_);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                CaseRecord r = record_from_json(nlohmann::json::parse(line));
                if (indexed.contains(r.case_id)) completed_[r.case_id] = std::move(r);
            } catch (const std::exception&) {
                // torn trailing write from an interrupted run
            }
        }
    }

    // Terminate a torn tail so the next append starts on a fresh line.
    for (const auto& path : {jsonl_path_, index_path_}) {
        std::ifstream probe(path, std::ios::binary | std::ios::ate);
        if (!probe || probe.tellg() <= 0) continue;
        probe.seekg(-1, std::ios::end);
        if (probe.get() != '\n') std::ofstream(path, std::ios::app) << '\n';
    }
    jsonl_.open(jsonl_path_, std::ios::app);
    index_.open(index_path_, std::ios::app);
    if (!jsonl_ || !index_) throw std::runtime_error("cannot open record store in " + dir.string());
}

bool RecordStore::contains(const std::string& case_id) const {
    std::lock_guard lock(mutex_);
    return completed_.contains(case_id);
}

std::size_t RecordStore::size() const {
    std::lock_guard lock(mutex_);
    return completed_.size();
}

void RecordStore::append(const CaseRecord& record) {
    const std::string line = record_to_json(record).dump();
    std::lock_guard lock(mutex_);
    jsonl_ << line << '\n';
    jsonl_.flush();
    index_ << record.case_id << '\n';
    index_.flush();
    if (!jsonl_ || !index_) throw std::runtime_error("record store write failed");
    completed_[record.case_id] = record;
}

std::vector<CaseRecord> RecordStore::records() const {
    std::lock_guard lock(mutex_);
    std::vector<CaseRecord> out;
    out.reserve(completed_.size());
    for (const auto& [_, r] : completed_) out.push_back(r);
    return out;
}

void write_plan(const std::filesystem::path& path, const std::vector<CaseRecord>& plan) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const auto& r : plan) out << record_to_json(r).dump() << '\n';
}

std::vector<CaseRecord> read_plan(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read case plan " + path.string());
    std::vector<CaseRecord> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(record_from_json(nlohmann::json::parse(line)));
    return out;
}

}  // namespace fcritic
