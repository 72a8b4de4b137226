#include <gtest/gtest.h>

#include <map>
#include <set>

#include "fcritic/error.hpp"
#include "fcritic/harness.hpp"
#include "test_util.hpp"

using namespace fcritic;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_perturbation(const fs::path& out) {
    ExperimentConfig c;
    c.seed = 17;
    c.generated = 40;
    c.clean = 10;
    c.style.width_px = 200;
    c.style.height_px = 120;
    c.style.test_mode = true;
    c.max_parallel = 2;
    c.retry.backoff_initial = std::chrono::milliseconds(0);
    c.output_dir = out;
    return c;
}

std::string answer(Label l) { return l == Label::Reasonable ? "<answer> 1 </answer>" : "<answer> 2 </answer>"; }

void script_oracle(MockBackend& m, const std::vector<CasePlan>& plan) {
    for (const auto& p : plan) m.add(p.record.case_id, answer(*p.record.label));
}

const GroupScore& group(const Report& r, const std::string& name) {
    for (const auto& g : r.groups)
        if (g.group == name) return g;
    throw std::runtime_error("no group " + name);
}

}  // namespace

TEST(PlanPerturbation, DefaultCounts) {
    ExperimentConfig c;
    const auto plan = plan_perturbation(c);
    std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
    std::set<std::string> ids;
    for (const auto& p : plan) {
        auto& [reasonable, unreasonable] = counts[p.record.group];
        ++(*p.record.label == Label::Reasonable ? reasonable : unreasonable);
        EXPECT_TRUE(ids.insert(p.record.case_id).second) << p.record.case_id;
        EXPECT_EQ(p.record.image, image_path_for(p.record.case_id));
    }
    ASSERT_EQ(counts.size(), 5u);
    for (const auto& [g, n] : counts) {
        EXPECT_EQ(n.first, 250u) << g;
        EXPECT_EQ(n.second, 250u) << g;
    }
    EXPECT_EQ(plan.size(), 2500u);
}

TEST(PlanPerturbation, MixtureUsesAllTypes) {
    ExperimentConfig c;
    c.groups = {"mixture"};
    std::map<std::string, std::size_t> types;
    for (const auto& p : plan_perturbation(c))
        if (*p.record.label == Label::Unreasonable) ++types[p.record.source["perturbation"]["type"]];
    ASSERT_EQ(types.size(), 4u);
    std::size_t total = 0;
    for (const auto& [t, n] : types) {
        EXPECT_GT(n, 30u) << t;
        total += n;
    }
    EXPECT_EQ(total, 250u);
}

TEST(PlanPerturbation, RetainsTheHighestSmape) {
    auto c = small_perturbation("unused");
    c.groups = {"vertical_shift"};
    c.retain_fraction = 0.5;
    double min_kept = 1e300;
    std::size_t kept = 0;
    for (const auto& p : plan_perturbation(c))
        if (*p.record.label == Label::Unreasonable) {
            min_kept = std::min(min_kept, p.record.scores.at("smape"));
            ++kept;
        }
    EXPECT_EQ(kept, 20u);
    // Recompute the full candidate pool the same way and compare with the 20th largest.
    c.retain_fraction = 1.0;
    std::vector<double> all;
    for (const auto& p : plan_perturbation(c))
        if (*p.record.label == Label::Unreasonable) all.push_back(p.record.scores.at("smape"));
    ASSERT_EQ(all.size(), 40u);
    std::sort(all.rbegin(), all.rend());
    EXPECT_EQ(min_kept, all[19]);
}

TEST(PlanPerturbation, Deterministic) {
    const auto c = small_perturbation("unused");
    const auto a = plan_perturbation(c);
    const auto b = plan_perturbation(c);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].record.case_id, b[i].record.case_id);
        EXPECT_EQ(record_to_json(a[i].record), record_to_json(b[i].record));
    }
    auto other = c;
    other.seed = 18;
    const auto d = plan_perturbation(other);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) differs |= record_to_json(a[i].record) != record_to_json(d[i].record);
    EXPECT_TRUE(differs);
}

TEST(PlanPromo, CountsAndPrompts) {
    ExperimentConfig c;
    c.experiment = ExperimentKind::Promo;
    c.cases_per_scenario = 30;
    const auto plan = plan_promo(c);
    ASSERT_EQ(plan.size(), 120u);
    std::map<std::string, std::size_t> per;
    for (const auto& p : plan) {
        ++per[p.record.group];
        const auto prompt = p.prompt();
        EXPECT_NE(prompt.find("t=" + format_sig3(p.prompt_params.at("hist_holiday_t"))), std::string::npos);
        EXPECT_NE(prompt.find("t=" + format_sig3(p.prompt_params.at("fcst_holiday_t"))), std::string::npos);
        const bool reasonable = p.record.group == "A" || p.record.group == "D";
        EXPECT_EQ(*p.record.label, reasonable ? Label::Reasonable : Label::Unreasonable);
    }
    for (const char* g : {"A", "B", "C", "D"}) EXPECT_EQ(per[g], 30u);
}

TEST(RunExperiment, OracleScoresPerfectly) {
    testutil::TempDir dir;
    const auto c = small_perturbation(dir / "run");
    MockBackend backend;
    script_oracle(backend, plan_perturbation(c));
    const auto s = run_perturbation_experiment(c, backend);
    EXPECT_TRUE(s.complete);
    EXPECT_EQ(s.planned, 200u);
    EXPECT_EQ(s.processed, 200u);
    EXPECT_EQ(s.errors, 0u);
    ASSERT_EQ(s.report.groups.size(), 5u);
    for (const auto& g : s.report.groups) {
        EXPECT_DOUBLE_EQ(g.weighted_f1, 1.0) << g.group;
        EXPECT_EQ(g.cases, 40u);
    }
    for (const char* f : {"config.json", "cases.jsonl", "records.jsonl", "records.idx", "report.json", "report.csv",
                          "report.md"})
        EXPECT_TRUE(fs::exists(dir / "run" / f)) << f;
    EXPECT_EQ(std::distance(fs::directory_iterator(dir / "run" / "images"), fs::directory_iterator{}), 200);
    EXPECT_EQ(backend.calls(), 200u);
}

TEST(RunExperiment, FlippedAnswersLowerF1) {
    testutil::TempDir dir;
    auto c = small_perturbation(dir / "run");
    c.groups = {"trend_modify"};
    const auto plan = plan_perturbation(c);
    MockBackend backend;
    std::size_t flipped = 0;
    for (const auto& p : plan) {
        Label l = *p.record.label;
        if (l == Label::Unreasonable && flipped < 3) {
            l = Label::Reasonable;
            ++flipped;
        }
        backend.add(p.record.case_id, answer(l));
    }
    const auto s = run_experiment(c, backend);
    const auto& g = group(s.report, "trend_modify");
    // 30 unreasonable (27 caught), 10 reasonable plus 3 false reasonable.
    EXPECT_EQ(g.confusion[Label::Unreasonable].tp, 27u);
    EXPECT_EQ(g.confusion[Label::Reasonable].fp, 3u);
    EXPECT_NEAR(g.f1.unreasonable, 2.0 * 27 / (2.0 * 27 + 3), 1e-12);
    EXPECT_NEAR(g.f1.reasonable, 2.0 * 10 / (2.0 * 10 + 3), 1e-12);
}

TEST(RunExperiment, ResumeNeverAsksTwice) {
    testutil::TempDir dir;
    const auto c = small_perturbation(dir / "run");
    MockBackend backend;
    script_oracle(backend, plan_perturbation(c));
    RunOptions stop;
    stop.stop_after = 37;
    const auto first = run_experiment(c, backend, stop);
    EXPECT_FALSE(first.complete);
    EXPECT_EQ(first.processed, 37u);
    EXPECT_EQ(backend.calls(), 37u);

    const auto second = run_experiment(c, backend);
    EXPECT_TRUE(second.complete);
    EXPECT_EQ(second.resumed, 37u);
    EXPECT_EQ(second.processed, 163u);
    for (const auto& p : plan_perturbation(c)) EXPECT_EQ(backend.calls_for(p.record.case_id), 1u);

    const auto third = run_experiment(c, backend);
    EXPECT_EQ(third.processed, 0u);
    EXPECT_EQ(backend.calls(), 200u);
}

TEST(RunExperiment, ResumedReportMatchesUninterrupted) {
    testutil::TempDir dir;
    auto c = small_perturbation(dir / "straight");
    auto script = [&](MockBackend& m) {
        const auto plan = plan_perturbation(c);
        for (std::size_t i = 0; i < plan.size(); ++i) {
            const Label l = *plan[i].record.label;
            m.add(plan[i].record.case_id, answer(i % 7 == 0 ? (l == Label::Reasonable ? Label::Unreasonable : Label::Reasonable) : l));
        }
    };
    MockBackend straight;
    script(straight);
    run_experiment(c, straight);

    c.output_dir = dir / "resumed";
    MockBackend resumed;
    script(resumed);
    RunOptions stop;
    stop.stop_after = 50;
    run_experiment(c, resumed, stop);
    stop.stop_after = 70;
    run_experiment(c, resumed, stop);
    run_experiment(c, resumed);
    EXPECT_EQ(resumed.calls(), 200u);
    for (const char* f : {"report.json", "report.csv"})
        EXPECT_EQ(testutil::slurp(dir / "straight" / f), testutil::slurp(dir / "resumed" / f)) << f;
}

TEST(RunExperiment, ConfigMismatchRejected) {
    testutil::TempDir dir;
    auto c = small_perturbation(dir / "run");
    auto backend = MockBackend::always("<answer>1</answer>");
    RunOptions plan_only;
    plan_only.plan_only = true;
    run_experiment(c, *backend, plan_only);
    c.seed = 99;
    EXPECT_THROW(run_experiment(c, *backend, plan_only), ConfigError);
    c.seed = 17;
    c.max_parallel = 1;
    EXPECT_NO_THROW(run_experiment(c, *backend, plan_only));
}

TEST(RunExperiment, PlanOnlyRendersWithoutAsking) {
    testutil::TempDir dir;
    const auto c = small_perturbation(dir / "run");
    auto backend = MockBackend::always("<answer>1</answer>");
    RunOptions o;
    o.plan_only = true;
    const auto s = run_experiment(c, *backend, o);
    EXPECT_EQ(backend->calls(), 0u);
    EXPECT_EQ(s.processed, 0u);
    EXPECT_FALSE(fs::exists(dir / "run" / "report.json"));
    EXPECT_EQ(read_plan(dir / "run" / "cases.jsonl").size(), 200u);
    EXPECT_EQ(std::distance(fs::directory_iterator(dir / "run" / "images"), fs::directory_iterator{}), 200);
}

TEST(RunExperiment, UnparseableRepliesBecomeErrors) {
    testutil::TempDir dir;
    auto c = small_perturbation(dir / "run");
    c.groups = {"random_spikes"};
    const auto plan = plan_perturbation(c);
    MockBackend backend;
    backend.add("*", "<answer>2</answer>");
    for (std::size_t i = 0; i < 4; ++i) backend.add(plan[i].record.case_id, "I cannot tell");
    const auto s = run_experiment(c, backend);
    EXPECT_EQ(s.errors, 4u);
    EXPECT_TRUE(s.complete);
    const auto& g = group(s.report, "random_spikes");
    EXPECT_EQ(g.errors, 4u);
    EXPECT_EQ(g.confusion.total(), 36u);
    for (const auto& r : RecordStore(dir / "run").records())
        if (r.error) {
            EXPECT_EQ(r.error->kind, "unparseable");
            EXPECT_EQ(r.error->raw, "I cannot tell");
            EXPECT_EQ(r.retries, 1);
        }
}

TEST(RunExperiment, PromoAlwaysReasonable) {
    testutil::TempDir dir;
    ExperimentConfig c;
    c.experiment = ExperimentKind::Promo;
    c.cases_per_scenario = 12;
    c.style.width_px = 200;
    c.style.height_px = 120;
    c.style.test_mode = true;
    c.output_dir = dir / "promo";
    auto backend = MockBackend::always("<answer>1</answer>");
    const auto s = run_promo_experiment(c, *backend);
    EXPECT_DOUBLE_EQ(group(s.report, "A").accuracy, 1.0);
    EXPECT_DOUBLE_EQ(group(s.report, "B").accuracy, 0.0);
    EXPECT_DOUBLE_EQ(group(s.report, "C").accuracy, 0.0);
    EXPECT_DOUBLE_EQ(group(s.report, "D").accuracy, 1.0);
    ASSERT_TRUE(s.report.overall.has_value());
    EXPECT_DOUBLE_EQ(s.report.overall->accuracy, 0.5);
    const auto prompt = backend->last_prompt("promo-C-0003");
    EXPECT_NE(prompt.find("t="), std::string::npos);
    EXPECT_THROW(run_perturbation_experiment(c, *backend), ConfigError);
}

namespace {

RealWorldCase rw_case(const std::string& id, double level, bool with_actuals = true) {
    std::vector<double> hist(20);
    for (std::size_t i = 0; i < hist.size(); ++i) hist[i] = 5.0 + std::sin(0.5 * static_cast<double>(i));
    std::vector<std::vector<double>> paths;
    std::vector<double> levels;
    for (int q = 1; q <= 9; ++q) {
        levels.push_back(q / 10.0);
        paths.emplace_back(7, level + 0.2 * (q - 5));
    }
    RealWorldCase c{id, hist, QuantileForecast(levels, paths), std::nullopt};
    if (with_actuals) c.actuals = std::vector<double>(7, 5.0);
    return c;
}

}  // namespace

TEST(RealWorld, JsonRoundTripAndErrors) {
    const auto c = rw_case("FOODS_1_001_CA_1", 5.0);
    const auto back = realworld_from_json(realworld_to_json(c));
    EXPECT_EQ(back.id, c.id);
    EXPECT_EQ(back.forecast.level_count(), 9u);
    EXPECT_EQ(*back.actuals, *c.actuals);
    EXPECT_THROW(realworld_from_json(nlohmann::json::parse(R"({"id":"x","history":[],"quantiles":{"0.5":[1]}})")),
                 ParameterError);
    EXPECT_THROW(realworld_from_json(nlohmann::json::parse(R"({"id":"x","history":[1],"quantiles":{"mid":[1]}})")),
                 ParameterError);
    EXPECT_THROW(
        realworld_from_json(nlohmann::json::parse(R"({"id":"x","history":[1],"quantiles":{"0.5":[1]},"actuals":[1,2]})")),
        ParameterError);

    testutil::TempDir dir;
    testutil::spit(dir / "in.jsonl", realworld_to_json(c).dump() + "\n\n" + "{bad\n");
    try {
        read_realworld_jsonl((dir / "in.jsonl").string());
        FAIL();
    } catch (const ParameterError& e) {
        EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos);
    }
}

TEST(RealWorld, PlanScoresAndNotes) {
    ExperimentConfig c;
    c.experiment = ExperimentKind::RealWorld;
    auto zero = rw_case("zero", 0.0);
    zero.actuals = std::vector<double>(7, 0.0);
    auto partial = rw_case("partial", 5.0);
    partial.forecast = QuantileForecast({0.1, 0.5, 0.9}, {std::vector<double>(7, 4.0), std::vector<double>(7, 5.0),
                                                          std::vector<double>(7, 6.0)});
    const auto plan = plan_realworld(c, {rw_case("a/b", 5.0), rw_case("none", 5.0, false), zero, partial});
    ASSERT_EQ(plan.size(), 4u);
    EXPECT_EQ(plan[0].record.image, "images/a_b.png");
    // Pinball losses over the deciles sum to 0.8 at every step; the scale is 5 per step.
    EXPECT_NEAR(plan[0].record.scores.at("scrps"), 2.0 * 0.8 / 9.0 / 5.0, 1e-12);
    EXPECT_EQ(plan[1].record.score_note, "no_actuals");
    EXPECT_EQ(plan[2].record.score_note, "zero_scale");
    EXPECT_EQ(plan[3].record.score_note, "missing_deciles");
    EXPECT_EQ(plan[0].prompt_template, TemplateId::ProbabilisticM5);
    EXPECT_THROW(plan_realworld(c, {rw_case("x", 1.0), rw_case("x", 2.0)}), ParameterError);
    EXPECT_THROW(plan_realworld(c, {rw_case("a/b", 1.0), rw_case("a_b", 2.0)}), ParameterError);
}

TEST(RealWorld, PartitionBySCRPS) {
    testutil::TempDir dir;
    ExperimentConfig c;
    c.experiment = ExperimentKind::RealWorld;
    c.style.test_mode = true;
    c.style.width_px = 200;
    c.style.height_px = 120;
    c.output_dir = dir / "rw";
    std::vector<RealWorldCase> cases;
    MockBackend backend;
    for (int i = 0; i < 10; ++i) {
        const bool bad = i >= 6;
        const auto id = "s" + std::to_string(i);
        cases.push_back(rw_case(id, bad ? 8.0 + i : 5.0 + 0.05 * i));
        backend.add(id, answer(bad ? Label::Unreasonable : Label::Reasonable));
    }
    cases.push_back(rw_case("unscored", 5.0, false));
    backend.add("unscored", answer(Label::Unreasonable));
    cases.push_back(rw_case("broken", 5.0));
    backend.add("broken", "???");

    const auto s = run_realworld_experiment(c, backend, cases);
    ASSERT_TRUE(s.report.partition.has_value());
    const auto& p = *s.report.partition;
    EXPECT_EQ(p.flagged_reasonable, 6u);
    EXPECT_EQ(p.flagged_unreasonable, 5u);
    EXPECT_EQ(p.errors, 1u);
    EXPECT_EQ(p.excluded, 1u);
    ASSERT_TRUE(p.stats_available());
    EXPECT_EQ(p.reasonable->n, 6u);
    EXPECT_EQ(p.unreasonable->n, 4u);
    EXPECT_GT(p.unreasonable->median, p.reasonable->median);
    EXPECT_GT(*p.pct_diff_median, 0.0);
    EXPECT_DOUBLE_EQ(p.mann_whitney->u_stat, 24.0);
    EXPECT_EQ(p.flagged_reasonable + p.flagged_unreasonable, s.report.total - s.report.errors);
    EXPECT_TRUE(s.report.groups.empty());
}

TEST(RealWorld, OnePartitionMeansNoStats) {
    testutil::TempDir dir;
    ExperimentConfig c;
    c.experiment = ExperimentKind::RealWorld;
    c.style.test_mode = true;
    c.style.width_px = 200;
    c.style.height_px = 120;
    c.output_dir = dir / "rw";
    const std::vector<RealWorldCase> cases{rw_case("a", 5.0), rw_case("b", 6.0)};
    auto backend = MockBackend::always("<answer>1</answer>");
    const auto s = run_realworld_experiment(c, *backend, cases);
    EXPECT_FALSE(s.report.partition->stats_available());
    EXPECT_FALSE(s.report.partition->unreasonable.has_value());
    const auto j = nlohmann::json::parse(testutil::slurp(dir / "rw" / "report.json"));
    EXPECT_EQ(j["partition"]["stats_available"], false);
    EXPECT_TRUE(j["partition"]["p_value"].is_null());
    EXPECT_EQ(j["partition"]["flag_counts"], "R:2|U:0");
}
