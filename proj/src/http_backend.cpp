#include <cstdlib>
#include <string>

#include <httplib.h>

#include "fcritic/backend.hpp"
#include "fcritic/error.hpp"

namespace fcritic {

namespace {

bool is_transient_status(int status) {
    return status == 408 || status == 429 || status >= 500;
}

}  // namespace

HttpBackend::HttpBackend(BackendConfig config) : config_(std::move(config)) {
    config_.validate();
    const auto& url = config_.endpoint;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint must be an http(s) URL: '" + url + "'");
    const std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") throw ConfigError("unsupported endpoint scheme '" + scheme + "'");
    const auto path_start = url.find('/', scheme_end + 3);
    scheme_host_port_ = url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
    if (scheme_host_port_.size() <= scheme_end + 3) throw ConfigError("endpoint has no host: '" + url + "'");

    if (!config_.api_key_env.empty()) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (key == nullptr || *key == '\0')
            throw ConfigError("environment variable " + config_.api_key_env + " is not set");
        api_key_ = key;
    }
}

std::string HttpBackend::complete(const CritiqueRequest& request) {
    httplib::Client client(scheme_host_port_);
    const auto timeout = std::chrono::duration<double>(config_.timeout_s);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));

    httplib::Headers headers;
    if (api_key_) headers.emplace(config_.auth_header, config_.auth_prefix + *api_key_);

    const std::string body = build_chat_request(config_, request).dump();
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) throw TransientBackendError("request failed: " + httplib::to_string(res.error()));
    if (is_transient_status(res->status))
        throw TransientBackendError("HTTP " + std::to_string(res->status) + " from " + scheme_host_port_);
    if (res->status < 200 || res->status >= 300)
        throw BackendError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500));

    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(std::string("response is not JSON: ") + e.what());
    }
    return extract_reply(config_, parsed);
}

}  // namespace fcritic
