#include "fcritic/verdict.hpp"

#include <regex>
#include <string>

#include "fcritic/error.hpp"

namespace fcritic {

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

}  // namespace

Verdict parse_verdict(std::string_view raw) {
    static const std::regex kTag(R"(<answer>\s*([^<]*?)\s*</answer>)", std::regex::icase);
    const std::string text(raw);

    std::smatch last;
    bool found = false;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), kTag); it != std::sregex_iterator(); ++it) {
        last = *it;
        found = true;
    }
    if (!found) throw UnparseableVerdict("no <answer> tag in response", text);

    const std::string value = last[1].str();
    Verdict v;
    if (value == "1") {
        v.label = Label::Reasonable;
    } else if (value == "2") {
        v.label = Label::Unreasonable;
    } else {
        throw UnparseableVerdict("answer '" + value + "' is not 1 or 2", text);
    }
    const auto pos = static_cast<std::size_t>(last.position(0));
    v.rationale = trim(text.substr(0, pos) + text.substr(pos + static_cast<std::size_t>(last.length(0))));
    v.raw = text;
    return v;
}

}  // namespace fcritic
