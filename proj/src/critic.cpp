#include "fcritic/critic.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "fcritic/error.hpp"

namespace fcritic {

RetryPolicy retry_policy_from(const BackendConfig& config) {
    RetryPolicy p;
    p.max_retries = config.max_retries;
    p.backoff_initial = std::chrono::milliseconds(static_cast<long long>(config.backoff_initial_s * 1000.0));
    return p;
}

CritiqueOutcome critique(Backend& backend, const CritiqueRequest& request, const RetryPolicy& policy) {
    CritiqueOutcome out;
    int transient_failures = 0;
    int unparseable_failures = 0;
    auto backoff = policy.backoff_initial;

    while (true) {
        const auto start = std::chrono::steady_clock::now();
        try {
            std::string raw = backend.complete(request);
            const auto elapsed = std::chrono::steady_clock::now() - start;
            try {
                Verdict v = parse_verdict(raw);
                v.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
                v.backend_id = backend.id();
                out.verdict = std::move(v);
                return out;
            } catch (const UnparseableVerdict& e) {
                if (unparseable_failures++ >= policy.unparseable_retries) {
                    out.error_kind = "unparseable";
                    out.error_message = e.what();
                    out.error_raw = e.raw();
                    return out;
                }
            }
        } catch (const TransientBackendError& e) {
            if (transient_failures++ >= policy.max_retries) {
                out.error_kind = "backend";
                out.error_message = std::string("retries exhausted: ") + e.what();
                return out;
            }
            if (backoff.count() > 0) std::this_thread::sleep_for(backoff);
            backoff *= 2;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            out.error_kind = "backend";
            out.error_message = e.what();
            return out;
        }
        ++out.retries;
    }
}

void parallel_for(std::size_t count, std::size_t max_parallel, const std::function<void(std::size_t)>& work) {
    if (count == 0) return;
    const std::size_t workers = std::max<std::size_t>(1, std::min(max_parallel, count));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto run = [&] {
        while (!failed.load()) {
            const std::size_t i = next++;
            if (i >= count) return;
            try {
                work(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed = true;
            }
        }
    };

    if (workers == 1) {
        run();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
    }
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace fcritic
