#include "fcritic/annotate.hpp"

#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>

#include "fcritic/error.hpp"
#include "fcritic/records.hpp"

namespace fcritic {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char ch : s) {
        if (ch == '\'') out += "'\\''";
        else out += ch;
    }
    return out + "'";
}

}  // namespace

AnnotateSummary annotate_human(const AnnotateOptions& options, std::istream& in, std::ostream& out) {
    const auto plan_path = options.run_dir / "cases.jsonl";
    if (!std::filesystem::exists(plan_path))
        throw ConfigError("no case plan at " + plan_path.string() + "; run with --plan-only first");
    const std::vector<CaseRecord> plan = read_plan(plan_path);
    RecordStore store(options.run_dir / "annotations");

    AnnotateSummary summary;
    summary.total = plan.size();
    std::size_t position = 0;
    for (const auto& skeleton : plan) {
        ++position;
        if (store.contains(skeleton.case_id)) {
            ++summary.already_labeled;
            continue;
        }
        const auto image = options.run_dir / skeleton.image;
        out << "[" << position << "/" << plan.size() << "] " << skeleton.case_id << ": " << image.string() << '\n';
        if (!options.viewer_command.empty()) {
            const std::string cmd = options.viewer_command + " " + shell_quote(image.string());
            if (std::system(cmd.c_str()) != 0) out << "(viewer command failed)\n";
        }

        std::optional<Label> label;
        std::string line;
        while (!label) {
            out << "1 = reasonable, 2 = unreasonable, q = quit: " << std::flush;
            if (!std::getline(in, line)) return summary;
            const std::string answer = trim(line);
            if (answer == "q" || answer == "Q") return summary;
            if (answer == "1") label = Label::Reasonable;
            else if (answer == "2") label = Label::Unreasonable;
            else out << "Please answer 1, 2 or q.\n";
        }

        CaseRecord rec = skeleton;
        rec.verdict = Verdict{*label, "", trim(line), 0, options.annotator};
        store.append(rec);
        ++summary.labeled_now;
    }
    summary.finished = true;
    return summary;
}

}  // namespace fcritic
