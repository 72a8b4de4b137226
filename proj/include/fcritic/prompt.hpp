#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace fcritic {

enum class TemplateId { PointSynthetic, Holiday, ProbabilisticM5 };

std::string_view template_name(TemplateId id);
TemplateId template_from_name(std::string_view name);

inline constexpr std::string_view kHistHolidayKey = "hist_holiday_t";
inline constexpr std::string_view kFcstHolidayKey = "fcst_holiday_t";

/// Shared closing block listing the two answer options.
extern const std::string_view kAnswerOptions;

struct PromptTemplate {
    TemplateId id;
    /// Verbatim text; placeholders are written {name}.
    std::string_view body;
    std::vector<std::string_view> placeholders;
};

const PromptTemplate& prompt_template(TemplateId id);

/// Substitute every placeholder with its value formatted to three significant
/// digits. Missing values throw ParameterError; extra values are ignored.
std::string build_prompt(const PromptTemplate& tmpl, const std::map<std::string, double>& params = {});

/// "%.3g" formatting used for timestamps in prompts.
std::string format_sig3(double value);

}  // namespace fcritic
