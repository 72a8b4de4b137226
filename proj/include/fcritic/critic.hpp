#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "fcritic/backend.hpp"
#include "fcritic/verdict.hpp"

namespace fcritic {

struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds backoff_initial{1000};
    /// Extra attempts granted for replies without a usable <answer> tag.
    int unparseable_retries = 1;
};

RetryPolicy retry_policy_from(const BackendConfig& config);

struct CritiqueOutcome {
    std::optional<Verdict> verdict;
    /// Set when no verdict could be obtained.
    std::string error_kind;     // "backend" | "unparseable"
    std::string error_message;
    std::string error_raw;
    /// Attempts beyond the first.
    int retries = 0;

    bool ok() const noexcept { return verdict.has_value(); }
};

/// Ask the backend once, retrying transient failures with exponential
/// backoff and an unparseable reply once. Failures are returned, not thrown,
/// so the caller can record them against the case. ConfigError propagates.
CritiqueOutcome critique(Backend& backend, const CritiqueRequest& request, const RetryPolicy& policy);

/// Run work(i) for i in [0, count) on at most max_parallel threads.
/// Exceptions thrown by work are rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t max_parallel,
                  const std::function<void(std::size_t)>& work);

}  // namespace fcritic
