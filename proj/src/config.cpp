#include "fcritic/config.hpp"

#include <fstream>

#include "fcritic/error.hpp"

namespace fcritic {

Settings::Settings(nlohmann::json values) : values_(std::move(values)) {
    if (!values_.is_object()) throw ConfigError("settings must be a JSON object");
}

Settings Settings::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    try {
        return Settings(nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void Settings::apply_override(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0)
        throw ConfigError("override must be key=value: '" + std::string(assignment) + "'");
    const std::string key(assignment.substr(0, eq));
    const std::string text(assignment.substr(eq + 1));
    nlohmann::json value = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (value.is_discarded()) value = text;
    values_[key] = std::move(value);
}

void Settings::set(const std::string& key, nlohmann::json value) {
    values_[key] = std::move(value);
}

void Settings::require_known(const std::set<std::string>& known) const {
    for (const auto& [key, _] : values_.items())
        if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
}

void Settings::throw_type_error(const std::string& key) const {
    throw ConfigError("config key '" + key + "' has the wrong type: " + values_.at(key).dump());
}

}  // namespace fcritic
