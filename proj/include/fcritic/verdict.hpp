#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "fcritic/label.hpp"

namespace fcritic {

struct Verdict {
    Label label = Label::Reasonable;
    std::string rationale;
    std::string raw;
    std::int64_t latency_ms = 0;
    std::string backend_id;
};

/// Parse the last `<answer> N </answer>` tag (any whitespace around N).
/// 1 -> reasonable, 2 -> unreasonable. The rationale is the raw text with that
/// tag removed, trimmed. Throws UnparseableVerdict if there is no tag or the
/// last tag holds anything other than 1 or 2.
Verdict parse_verdict(std::string_view raw);

}  // namespace fcritic
