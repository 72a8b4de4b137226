#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <stdexcept>
#include <thread>

#include "fcritic/backend.hpp"
#include "fcritic/critic.hpp"
#include "fcritic/error.hpp"
#include "fcritic/prompt.hpp"
#include "fcritic/verdict.hpp"
#include "test_util.hpp"

using namespace fcritic;
using namespace std::chrono_literals;

namespace {

RetryPolicy fast_policy(int max_retries = 3) {
    RetryPolicy p;
    p.max_retries = max_retries;
    p.backoff_initial = 0ms;
    return p;
}

CritiqueRequest request(const std::string& id) { return {id, "prompt", {}}; }

class ThrowingBackend : public Backend {
public:
    std::string complete(const CritiqueRequest&) override { throw std::runtime_error("boom"); }
    std::string id() const override { return "throwing"; }
};

class ConfigFailBackend : public Backend {
public:
    std::string complete(const CritiqueRequest&) override { throw ConfigError("missing key"); }
    std::string id() const override { return "config"; }
};

}  // namespace

TEST(Prompt, PointSyntheticVerbatim) {
    const auto p = build_prompt(prompt_template(TemplateId::PointSynthetic));
    EXPECT_NE(p.find("assess whether the forecast is reasonable"), std::string::npos);
    EXPECT_NE(p.find("<answer> 1 </answer>"), std::string::npos);
    EXPECT_NE(p.find("<answer> 2 </answer>"), std::string::npos);
    EXPECT_EQ(p.find('{'), std::string::npos);
}

TEST(Prompt, HolidayPlaceholders) {
    const auto& t = prompt_template(TemplateId::Holiday);
    const auto p = build_prompt(t, {{"hist_holiday_t", 0.321}, {"fcst_holiday_t", 8.47}});
    EXPECT_NE(p.find("t=0.321"), std::string::npos);
    EXPECT_NE(p.find("t=8.47"), std::string::npos);
    EXPECT_THROW(build_prompt(t, {{"hist_holiday_t", 0.321}}), ParameterError);
    EXPECT_EQ(build_prompt(t, {{"hist_holiday_t", 0.321}, {"fcst_holiday_t", 8.47}, {"unused", 1.0}}), p);
}

TEST(Prompt, UnusedPlaceholderIgnored) {
    const auto& t = prompt_template(TemplateId::PointSynthetic);
    EXPECT_EQ(build_prompt(t, {{"hist_holiday_t", 3.0}}), build_prompt(t));
}

TEST(Prompt, ProbabilisticTemplate) {
    const auto p = build_prompt(prompt_template(TemplateId::ProbabilisticM5));
    EXPECT_NE(p.find("<answer> 1 </answer>"), std::string::npos);
    for (auto id : {TemplateId::PointSynthetic, TemplateId::Holiday, TemplateId::ProbabilisticM5})
        EXPECT_EQ(template_from_name(template_name(id)), id);
    EXPECT_THROW(template_from_name("nope"), ParameterError);
}

TEST(Prompt, FormatSig3) {
    EXPECT_EQ(format_sig3(0.321), "0.321");
    EXPECT_EQ(format_sig3(8.47), "8.47");
    EXPECT_EQ(format_sig3(8.4666), "8.47");
    EXPECT_EQ(format_sig3(10.0), "10");
}

TEST(Verdict, Parsing) {
    EXPECT_EQ(parse_verdict("... <answer> 2 </answer>").label, Label::Unreasonable);
    EXPECT_EQ(parse_verdict("<answer>1</answer>").label, Label::Reasonable);
    EXPECT_EQ(parse_verdict("<answer>1</answer> then <answer> 2 </answer>").label, Label::Unreasonable);
    EXPECT_EQ(parse_verdict("<ANSWER>\n1\n</ANSWER>").label, Label::Reasonable);
    EXPECT_THROW(parse_verdict("I think it is fine."), UnparseableVerdict);
    EXPECT_THROW(parse_verdict("<answer>3</answer>"), UnparseableVerdict);
    EXPECT_THROW(parse_verdict("<answer>2</answer> <answer>maybe</answer>"), UnparseableVerdict);
}

TEST(Verdict, RationaleAndRaw) {
    const auto v = parse_verdict("The spike is odd.\n<answer> 2 </answer>\n");
    EXPECT_EQ(v.rationale, "The spike is odd.");
    EXPECT_EQ(v.raw, "The spike is odd.\n<answer> 2 </answer>\n");
    try {
        parse_verdict("no tag");
        FAIL();
    } catch (const UnparseableVerdict& e) {
        EXPECT_EQ(e.raw(), "no tag");
    }
}

TEST(MockBackend, ScriptQueuesAndRepeats) {
    MockBackend m;
    m.add("a", "<answer>1</answer>");
    m.add("a", "<answer>2</answer>");
    EXPECT_EQ(m.complete(request("a")), "<answer>1</answer>");
    EXPECT_EQ(m.complete(request("a")), "<answer>2</answer>");
    EXPECT_EQ(m.complete(request("a")), "<answer>2</answer>");
    EXPECT_THROW(m.complete(request("b")), BackendError);
    m.add("*", "<answer>1</answer>");
    EXPECT_EQ(m.complete(request("b")), "<answer>1</answer>");
    EXPECT_EQ(m.calls(), 5u);
    EXPECT_EQ(m.calls_for("a"), 3u);
    EXPECT_EQ(m.last_prompt("a"), "prompt");
}

TEST(MockBackend, FromJsonl) {
    testutil::TempDir dir;
    testutil::spit(dir / "s.jsonl",
                   "{\"case_id\": \"x\", \"response\": \"<answer>2</answer>\"}\n\n"
                   "{\"case_id\": \"*\", \"response\": \"<answer>1</answer>\"}\n");
    auto m = MockBackend::from_jsonl((dir / "s.jsonl").string());
    EXPECT_EQ(m->complete(request("x")), "<answer>2</answer>");
    EXPECT_EQ(m->complete(request("y")), "<answer>1</answer>");
    testutil::spit(dir / "bad.jsonl", "{\"case\": 1}\n");
    EXPECT_THROW(MockBackend::from_jsonl((dir / "bad.jsonl").string()), ConfigError);
    EXPECT_THROW(MockBackend::from_jsonl((dir / "missing.jsonl").string()), ConfigError);
}

TEST(Critique, AlwaysOneIsReasonable) {
    auto m = MockBackend::always("<answer>1</answer>");
    for (int i = 0; i < 10; ++i) {
        const auto out = critique(*m, request("c" + std::to_string(i)), fast_policy());
        ASSERT_TRUE(out.ok());
        EXPECT_EQ(out.verdict->label, Label::Reasonable);
        EXPECT_EQ(out.verdict->backend_id, "mock");
        EXPECT_EQ(out.retries, 0);
    }
}

TEST(Critique, NoTagThenValidSucceedsOnRetry) {
    MockBackend m;
    m.add("a", "hmm, hard to say");
    m.add("a", "<answer>2</answer>");
    const auto out = critique(m, request("a"), fast_policy());
    ASSERT_TRUE(out.ok());
    EXPECT_EQ(out.verdict->label, Label::Unreasonable);
    EXPECT_EQ(out.retries, 1);
    EXPECT_EQ(m.calls_for("a"), 2u);
}

TEST(Critique, PersistentlyUnparseableIsAnError) {
    MockBackend m;
    m.add("a", "no idea");
    const auto out = critique(m, request("a"), fast_policy());
    EXPECT_FALSE(out.ok());
    EXPECT_EQ(out.error_kind, "unparseable");
    EXPECT_EQ(out.error_raw, "no idea");
    EXPECT_EQ(m.calls_for("a"), 2u);
}

TEST(Critique, TransientErrorsRetriedThenSucceed) {
    MockBackend m;
    m.add("a", "!transient");
    m.add("a", "!transient");
    m.add("a", "<answer>1</answer>");
    const auto out = critique(m, request("a"), fast_policy(3));
    ASSERT_TRUE(out.ok());
    EXPECT_EQ(out.retries, 2);
}

TEST(Critique, RetriesExhausted) {
    MockBackend m;
    m.add("a", "!transient");
    const auto out = critique(m, request("a"), fast_policy(2));
    EXPECT_FALSE(out.ok());
    EXPECT_EQ(out.error_kind, "backend");
    EXPECT_EQ(m.calls_for("a"), 3u);
}

TEST(Critique, BackoffDoubles) {
    MockBackend m;
    m.add("a", "!transient");
    m.add("a", "!transient");
    m.add("a", "<answer>1</answer>");
    RetryPolicy p = fast_policy(3);
    p.backoff_initial = 20ms;
    const auto start = std::chrono::steady_clock::now();
    ASSERT_TRUE(critique(m, request("a"), p).ok());
    EXPECT_GE(std::chrono::steady_clock::now() - start, 60ms);
}

TEST(Critique, NonTransientFailureIsRecorded) {
    ThrowingBackend b;
    const auto out = critique(b, request("a"), fast_policy());
    EXPECT_FALSE(out.ok());
    EXPECT_EQ(out.error_kind, "backend");
    EXPECT_EQ(out.error_message, "boom");
    ConfigFailBackend c;
    EXPECT_THROW(critique(c, request("a"), fast_policy()), ConfigError);
}

TEST(ParallelFor, RespectsLimit) {
    auto m = MockBackend::always("<answer>1</answer>");
    m->set_delay(5ms);
    parallel_for(40, 3, [&](std::size_t i) { critique(*m, request("c" + std::to_string(i)), fast_policy()); });
    EXPECT_EQ(m->calls(), 40u);
    EXPECT_LE(m->max_in_flight(), 3u);
    EXPECT_GE(m->max_in_flight(), 2u);
}

TEST(ParallelFor, EachIndexOnceAndErrorsRethrown) {
    std::vector<std::atomic<int>> hits(100);
    parallel_for(100, 4, [&](std::size_t i) { ++hits[i]; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
    EXPECT_THROW(parallel_for(10, 2,
                              [](std::size_t i) {
                                  if (i == 5) throw std::runtime_error("x");
                              }),
                 std::runtime_error);
    parallel_for(0, 2, [](std::size_t) { FAIL(); });
}
