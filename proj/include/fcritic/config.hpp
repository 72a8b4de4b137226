#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace fcritic {

/// Flat key-value settings: a JSON object file plus `key=value` overrides.
///
/// Override values are parsed as JSON when possible (numbers, booleans,
/// arrays, quoted strings) and kept as plain strings otherwise. Overrides are
/// applied after the file, so they win.
class Settings {
public:
    Settings() = default;
    explicit Settings(nlohmann::json values);

    /// Throws ConfigError if the file is unreadable or not a JSON object.
    static Settings load(const std::string& path);

    /// "key=value". Throws ConfigError without '='.
    void apply_override(std::string_view assignment);
    void set(const std::string& key, nlohmann::json value);

    bool has(const std::string& key) const { return values_.contains(key); }
    const nlohmann::json& raw() const noexcept { return values_; }

    /// Typed lookup; a present value of the wrong type throws ConfigError.
    template <typename T>
    T get(const std::string& key, T fallback) const {
        if (!values_.contains(key)) return fallback;
        try {
            return values_.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            throw_type_error(key);
        }
    }

    /// Throws ConfigError naming the first key not in `known`.
    void require_known(const std::set<std::string>& known) const;

private:
    [[noreturn]] void throw_type_error(const std::string& key) const;
    nlohmann::json values_ = nlohmann::json::object();
};

}  // namespace fcritic
