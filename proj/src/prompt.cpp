#include "fcritic/prompt.hpp"

#include <cstdio>
#include <string>

#include "fcritic/error.hpp"

namespace fcritic {

namespace {

#define FC_ANSWER_OPTIONS                                      \
    "<answer> 1 </answer> — The forecast is reasonable.\n" \
    "<answer> 2 </answer> — The forecast is unreasonable."

#define FC_INSTRUCTIONS                                                            \
    "Please provide a brief explanation (1–2 sentences) justifying your decision. " \
    "Then present your final answer using one of the following options, wrapped in <answer> tags:\n\n"

constexpr const char* kPointBody =
    "You are shown an image of historical data (in black) and a forecast (in blue). "
    "Based on the historical trend, assess whether the forecast is reasonable. "
    "A reasonable forecast should generally follow the same direction and capture any seasonal "
    "trends if there are any.\n\n" FC_INSTRUCTIONS FC_ANSWER_OPTIONS;

constexpr const char* kHolidayBody =
    "You are shown an image of historical data (in black) and a forecast (in blue). "
    "Based on the historical trend, assess whether the forecast is reasonable.\n\n"
    "A reasonable forecast should generally follow the same direction and capture any seasonal "
    "trends if there are any. Note, there is a holiday at t={hist_holiday_t} in the historical "
    "and a second holiday at time t={fcst_holiday_t} in the forecast that may affect the demand.\n\n"
    FC_INSTRUCTIONS FC_ANSWER_OPTIONS;

constexpr const char* kM5Body =
    "You are shown an image of historical data (in black) and a forecast (in blue). "
    "Your task is to assess whether the forecast appears visually reasonable.\n\n"
    "A reasonable forecast should generally follow the same direction as the historical trend "
    "and reflect any clear seasonal patterns, if present.\n\n"
    "IMPORTANT: Only label a forecast as unreasonable if there is an obvious and significant "
    "mismatch — for example, if the forecast goes in the opposite direction of the trend, ignores "
    "strong seasonal patterns, or shows extreme jumps that are not supported by the historical data.\n\n"
    "Minor deviations or slight over/underestimates are acceptable and should still be considered "
    "reasonable.\n\n" FC_INSTRUCTIONS FC_ANSWER_OPTIONS
    "\n\nIf you find the forecast unreasonable, clearly explain what makes it obviously inconsistent.";

const PromptTemplate kTemplates[] = {
    {TemplateId::PointSynthetic, kPointBody, {}},
    {TemplateId::Holiday, kHolidayBody, {kHistHolidayKey, kFcstHolidayKey}},
    {TemplateId::ProbabilisticM5, kM5Body, {}},
};

}  // namespace

const std::string_view kAnswerOptions = FC_ANSWER_OPTIONS;

#undef FC_ANSWER_OPTIONS
#undef FC_INSTRUCTIONS

std::string_view template_name(TemplateId id) {
    switch (id) {
        case TemplateId::PointSynthetic: return "point-synthetic";
        case TemplateId::Holiday: return "holiday";
        case TemplateId::ProbabilisticM5: return "probabilistic-m5";
    }
    return "unknown";
}

TemplateId template_from_name(std::string_view name) {
    if (name == "point-synthetic") return TemplateId::PointSynthetic;
    if (name == "holiday") return TemplateId::Holiday;
    if (name == "probabilistic-m5") return TemplateId::ProbabilisticM5;
    throw ParameterError("unknown prompt template '" + std::string(name) + "'");
}

const PromptTemplate& prompt_template(TemplateId id) {
    for (const auto& t : kTemplates)
        if (t.id == id) return t;
    throw ParameterError("unknown prompt template");
}

std::string format_sig3(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", value);
    return buf;
}

std::string build_prompt(const PromptTemplate& tmpl, const std::map<std::string, double>& params) {
    std::string out(tmpl.body);
    for (const auto key : tmpl.placeholders) {
        const auto it = params.find(std::string(key));
        if (it == params.end())
            throw ParameterError("prompt '" + std::string(template_name(tmpl.id)) + "' needs " + std::string(key));
        const std::string token = "{" + std::string(key) + "}";
        const std::string value = format_sig3(it->second);
        for (auto pos = out.find(token); pos != std::string::npos; pos = out.find(token, pos + value.size()))
            out.replace(pos, token.size(), value);
    }
    return out;
}

}  // namespace fcritic
