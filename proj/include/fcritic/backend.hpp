#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fcritic {

struct CritiqueRequest {
    std::string case_id;
    std::string prompt;
    std::span<const std::uint8_t> image_png;
};

/// A multimodal model that answers one (image, prompt) request with text.
///
/// Implementations throw TransientBackendError for retryable transport
/// failures and BackendError for everything else. They must be safe to call
/// concurrently.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string complete(const CritiqueRequest& request) = 0;
    virtual std::string id() const = 0;
};

/// Scripted stand-in for a model.
///
/// The script maps case ids to a queue of raw responses; each call pops the
/// next one and the last response repeats once the queue is drained. The id
/// "*" supplies a response for unscripted cases. A scripted "!transient"
/// response raises TransientBackendError instead of answering.
class MockBackend final : public Backend {
public:
    static constexpr std::string_view kWildcard = "*";
    static constexpr std::string_view kTransientMarker = "!transient";

    MockBackend() = default;
    explicit MockBackend(std::map<std::string, std::vector<std::string>> script);

    /// JSONL lines {"case_id": "...", "response": "..."}; repeated ids queue up.
    static std::unique_ptr<MockBackend> from_jsonl(const std::string& path);
    static std::unique_ptr<MockBackend> always(std::string response);

    void add(const std::string& case_id, std::string response);
    /// Simulated service time, for concurrency tests.
    void set_delay(std::chrono::milliseconds delay) { delay_ = delay; }

    std::string complete(const CritiqueRequest& request) override;
    std::string id() const override { return "mock"; }

    std::size_t calls() const noexcept { return calls_.load(); }
    std::size_t calls_for(const std::string& case_id) const;
    /// Highest number of simultaneous complete() calls observed.
    std::size_t max_in_flight() const noexcept { return max_in_flight_.load(); }
    /// Prompt last sent for a case (empty if never called).
    std::string last_prompt(const std::string& case_id) const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::deque<std::string>> script_;
    std::map<std::string, std::size_t> per_case_calls_;
    std::map<std::string, std::string> prompts_;
    std::chrono::milliseconds delay_{0};
    std::atomic<std::size_t> calls_{0};
    std::atomic<std::size_t> in_flight_{0};
    std::atomic<std::size_t> max_in_flight_{0};
};

struct BackendConfig {
    /// Full URL, e.g. https://gateway.example.com/v1/chat/completions
    std::string endpoint;
    std::string model;
    /// Name of the environment variable holding the API key ("" = no auth).
    std::string api_key_env = "FC_API_KEY";
    std::string auth_header = "Authorization";
    std::string auth_prefix = "Bearer ";
    double timeout_s = 120.0;
    int max_retries = 3;
    int max_parallel = 4;
    /// Initial backoff; doubles after every transient failure.
    double backoff_initial_s = 1.0;
    /// JSON pointer to the reply text in the response body.
    std::string response_pointer = "/choices/0/message/content";
    /// Extra top-level request fields (temperature, max_tokens, ...), passed through.
    nlohmann::json request_overrides = nlohmann::json::object();

    /// Throws ConfigError when max_parallel < 1, max_retries < 0 or timeout <= 0.
    void validate() const;
};

/// Chat-style JSON body: one user message with a text part and a base64 PNG part.
nlohmann::json build_chat_request(const BackendConfig& config, const CritiqueRequest& request);

/// Extract the reply text using config.response_pointer. Handles content given
/// either as a string or as an array of {"type":"text","text":...} parts.
std::string extract_reply(const BackendConfig& config, const nlohmann::json& body);

std::string base64_encode(std::span<const std::uint8_t> bytes);

/// HTTP(S) backend for any chat-completions-style multimodal endpoint.
class HttpBackend final : public Backend {
public:
    /// Reads the API key from the configured environment variable. Throws
    /// ConfigError if the variable is named but unset, or the URL is malformed.
    explicit HttpBackend(BackendConfig config);

    std::string complete(const CritiqueRequest& request) override;
    std::string id() const override { return "http:" + config_.model; }

    const BackendConfig& config() const noexcept { return config_; }

private:
    BackendConfig config_;
    std::string scheme_host_port_;
    std::string path_;
    std::optional<std::string> api_key_;
};

}  // namespace fcritic
