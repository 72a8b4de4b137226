#include "fcritic/backend.hpp"

#include <fstream>
#include <thread>

#include <openssl/evp.h>

#include "fcritic/error.hpp"

namespace fcritic {

MockBackend::MockBackend(std::map<std::string, std::vector<std::string>> script) {
    for (auto& [id, responses] : script)
        for (auto& r : responses) script_[id].push_back(std::move(r));
}

std::unique_ptr<MockBackend> MockBackend::from_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read mock script " + path);
    auto mock = std::make_unique<MockBackend>();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            mock->add(j.at("case_id").get<std::string>(), j.at("response").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return mock;
}

std::unique_ptr<MockBackend> MockBackend::always(std::string response) {
    auto mock = std::make_unique<MockBackend>();
    mock->add(std::string(kWildcard), std::move(response));
    return mock;
}

void MockBackend::add(const std::string& case_id, std::string response) {
    std::lock_guard lock(mutex_);
    script_[case_id].push_back(std::move(response));
}

std::size_t MockBackend::calls_for(const std::string& case_id) const {
    std::lock_guard lock(mutex_);
    const auto it = per_case_calls_.find(case_id);
    return it == per_case_calls_.end() ? 0 : it->second;
}

std::string MockBackend::last_prompt(const std::string& case_id) const {
    std::lock_guard lock(mutex_);
    const auto it = prompts_.find(case_id);
    return it == prompts_.end() ? std::string{} : it->second;
}

std::string MockBackend::complete(const CritiqueRequest& request) {
    const std::size_t now = ++in_flight_;
    std::size_t seen = max_in_flight_.load();
    while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
    }
    struct Leave {
        std::atomic<std::size_t>& n;
        ~Leave() { --n; }
    } leave{in_flight_};
    ++calls_;

    if (delay_.count() > 0) std::this_thread::sleep_for(delay_);

    std::string response;
    {
        std::lock_guard lock(mutex_);
        ++per_case_calls_[request.case_id];
        prompts_[request.case_id] = request.prompt;
        auto it = script_.find(request.case_id);
        if (it == script_.end()) it = script_.find(std::string(kWildcard));
        if (it == script_.end() || it->second.empty())
            throw BackendError("mock: no scripted response for case " + request.case_id);
        response = it->second.front();
        if (it->second.size() > 1) it->second.pop_front();
    }
    if (response == kTransientMarker) throw TransientBackendError("mock: scripted transient failure");
    return response;
}

void BackendConfig::validate() const {
    if (max_parallel < 1) throw ConfigError("max_parallel must be >= 1");
    if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
    if (!(timeout_s > 0.0)) throw ConfigError("timeout_s must be positive");
    if (backoff_initial_s < 0.0) throw ConfigError("backoff_initial_s must be >= 0");
    if (!request_overrides.is_object()) throw ConfigError("request_overrides must be a JSON object");
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                  static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

nlohmann::json build_chat_request(const BackendConfig& config, const CritiqueRequest& request) {
    nlohmann::json content = nlohmann::json::array();
    content.push_back({{"type", "text"}, {"text", request.prompt}});
    content.push_back({{"type", "image_url"},
                       {"image_url", {{"url", "data:image/png;base64," + base64_encode(request.image_png)}}}});
    nlohmann::json body{{"model", config.model},
                        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", std::move(content)}}})}};
    for (const auto& [key, value] : config.request_overrides.items()) body[key] = value;
    return body;
}

std::string extract_reply(const BackendConfig& config, const nlohmann::json& body) {
    const nlohmann::json::json_pointer ptr(config.response_pointer);
    if (!body.contains(ptr)) throw BackendError("response has no field at " + config.response_pointer);
    const auto& node = body.at(ptr);
    if (node.is_string()) return node.get<std::string>();
    if (node.is_array()) {
        std::string text;
        for (const auto& part : node)
            if (part.is_object() && part.value("type", "") == "text") text += part.value("text", "");
        return text;
    }
    throw BackendError("response field at " + config.response_pointer + " is not text");
}

}  // namespace fcritic
