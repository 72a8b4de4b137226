#include "fcritic/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fcritic/error.hpp"

namespace fcritic {

namespace {

GroupScore score_group(std::string name, const std::vector<const CaseRecord*>& members) {
    GroupScore g;
    g.group = std::move(name);
    g.cases = members.size();
    std::vector<Label> labels;
    std::vector<Label> predictions;
    for (const CaseRecord* r : members) {
        if (r->error) ++g.errors;
        if (r->verdict && r->label) {
            labels.push_back(*r->label);
            predictions.push_back(r->verdict->label);
        }
    }
    g.confusion = Confusion::from(labels, predictions);
    g.f1 = f1_per_class(g.confusion);
    if (!labels.empty()) {
        g.weighted_f1 = weighted_f1(g.confusion);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) correct += labels[i] == predictions[i];
        g.accuracy = static_cast<double>(correct) / static_cast<double>(labels.size());
    }
    return g;
}

PartitionReport partition_records(const std::vector<CaseRecord>& records, StdFlavor flavor) {
    PartitionReport p;
    std::vector<double> r_scores;
    std::vector<double> u_scores;
    for (const auto& rec : records) {
        if (rec.error) {
            ++p.errors;
            continue;
        }
        if (!rec.verdict) continue;
        const bool unreasonable = rec.verdict->label == Label::Unreasonable;
        ++(unreasonable ? p.flagged_unreasonable : p.flagged_reasonable);
        const auto it = rec.scores.find("scrps");
        if (it == rec.scores.end()) {
            ++p.excluded;
            continue;
        }
        (unreasonable ? u_scores : r_scores).push_back(it->second);
    }
    if (!r_scores.empty()) p.reasonable = summary_stats(r_scores, flavor);
    if (!u_scores.empty()) p.unreasonable = summary_stats(u_scores, flavor);
    if (p.reasonable && p.unreasonable) {
        p.mann_whitney = mann_whitney_u(u_scores, r_scores);
        try {
            p.pct_diff_median = pct_diff(p.unreasonable->median, p.reasonable->median);
        } catch (const UndefinedScaleError&) {
        }
        try {
            p.pct_diff_mean = pct_diff(p.unreasonable->mean, p.reasonable->mean);
        } catch (const UndefinedScaleError&) {
        }
    }
    return p;
}

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

nlohmann::json group_json(const GroupScore& g) {
    const auto& r = g.confusion[Label::Reasonable];
    const auto& u = g.confusion[Label::Unreasonable];
    return {{"group", g.group},
            {"cases", g.cases},
            {"errors", g.errors},
            {"scored", g.confusion.total()},
            {"reasonable", {{"tp", r.tp}, {"fp", r.fp}, {"fn", r.fn}, {"f1", g.f1.reasonable}}},
            {"unreasonable", {{"tp", u.tp}, {"fp", u.fp}, {"fn", u.fn}, {"f1", g.f1.unreasonable}}},
            {"weighted_f1", g.weighted_f1},
            {"accuracy", g.accuracy}};
}

std::string fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string fixed_or_na(const std::optional<double>& v) { return v ? fixed(*v) : "n/a"; }

}  // namespace

Report build_report(ExperimentKind kind, const std::vector<CaseRecord>& records, const nlohmann::json& config_echo,
                    const std::vector<std::string>& group_order, StdFlavor flavor) {
    Report rep;
    rep.experiment = kind;
    rep.config = config_echo;
    rep.std_flavor = flavor;
    rep.total = records.size();
    for (const auto& r : records) rep.errors += r.error.has_value();

    if (kind == ExperimentKind::RealWorld) {
        rep.partition = partition_records(records, flavor);
        return rep;
    }

    std::map<std::string, std::vector<const CaseRecord*>> by_group;
    for (const auto& r : records) by_group[r.group].push_back(&r);
    std::vector<std::string> order;
    std::set<std::string> listed;
    for (const auto& g : group_order)
        if (listed.insert(g).second) order.push_back(g);
    for (const auto& [g, members] : by_group)
        if (listed.insert(g).second) order.push_back(g);
    for (const auto& g : order) rep.groups.push_back(score_group(g, by_group[g]));

    if (kind == ExperimentKind::Promo) {
        std::vector<const CaseRecord*> all;
        for (const auto& r : records) all.push_back(&r);
        rep.overall = score_group("overall", all);
    }
    return rep;
}

nlohmann::json report_to_json(const Report& report) {
    nlohmann::json j{{"experiment", experiment_name(report.experiment)},
                     {"total", report.total},
                     {"errors", report.errors},
                     {"no_cases", report.total == 0},
                     {"std_flavor", report.std_flavor == StdFlavor::Sample ? "sample" : "population"},
                     {"config", report.config}};
    if (report.experiment != ExperimentKind::RealWorld) {
        nlohmann::json groups = nlohmann::json::array();
        for (const auto& g : report.groups) groups.push_back(group_json(g));
        j["groups"] = std::move(groups);
        if (report.overall) j["overall"] = group_json(*report.overall);
    }
    if (report.partition) {
        const auto& p = *report.partition;
        auto stat = [](const std::optional<SummaryStats>& s, double SummaryStats::*field) {
            return s ? nlohmann::json(*s.*field) : nlohmann::json(nullptr);
        };
        j["partition"] = {
            {"flag_counts", "R:" + std::to_string(p.flagged_reasonable) + "|U:" + std::to_string(p.flagged_unreasonable)},
            {"flagged_reasonable", p.flagged_reasonable},
            {"flagged_unreasonable", p.flagged_unreasonable},
            {"errors", p.errors},
            {"excluded", p.excluded},
            {"stats_available", p.stats_available()},
            {"n_r", p.reasonable ? p.reasonable->n : 0},
            {"n_u", p.unreasonable ? p.unreasonable->n : 0},
            {"median_r", stat(p.reasonable, &SummaryStats::median)},
            {"median_u", stat(p.unreasonable, &SummaryStats::median)},
            {"mean_r", stat(p.reasonable, &SummaryStats::mean)},
            {"mean_u", stat(p.unreasonable, &SummaryStats::mean)},
            {"std_r", stat(p.reasonable, &SummaryStats::std)},
            {"std_u", stat(p.unreasonable, &SummaryStats::std)},
            {"pct_diff_median", opt(p.pct_diff_median)},
            {"pct_diff_mean", opt(p.pct_diff_mean)},
            {"u_stat", p.mann_whitney ? nlohmann::json(p.mann_whitney->u_stat) : nlohmann::json(nullptr)},
            {"p_value", p.mann_whitney ? nlohmann::json(p.mann_whitney->p_value) : nlohmann::json(nullptr)}};
    }
    return j;
}

std::string report_to_csv(const Report& report) {
    std::ostringstream out;
    out << "section,group,metric,value\n";
    out << "summary,all,total," << report.total << '\n';
    out << "summary,all,errors," << report.errors << '\n';
    if (report.total == 0) out << "summary,all,no_cases,1\n";
    auto group_rows = [&](const GroupScore& g) {
        const auto& r = g.confusion[Label::Reasonable];
        const auto& u = g.confusion[Label::Unreasonable];
        const std::string prefix = "f1," + g.group + ",";
        out << prefix << "cases," << g.cases << '\n';
        out << prefix << "errors," << g.errors << '\n';
        out << prefix << "tp_reasonable," << r.tp << '\n';
        out << prefix << "fp_reasonable," << r.fp << '\n';
        out << prefix << "fn_reasonable," << r.fn << '\n';
        out << prefix << "tp_unreasonable," << u.tp << '\n';
        out << prefix << "fp_unreasonable," << u.fp << '\n';
        out << prefix << "fn_unreasonable," << u.fn << '\n';
        out << prefix << "f1_reasonable," << fixed(g.f1.reasonable) << '\n';
        out << prefix << "f1_unreasonable," << fixed(g.f1.unreasonable) << '\n';
        out << prefix << "weighted_f1," << fixed(g.weighted_f1) << '\n';
        out << prefix << "accuracy," << fixed(g.accuracy) << '\n';
    };
    for (const auto& g : report.groups) group_rows(g);
    if (report.overall) group_rows(*report.overall);
    if (report.partition) {
        const auto& p = *report.partition;
        out << "partition,all,flagged_reasonable," << p.flagged_reasonable << '\n';
        out << "partition,all,flagged_unreasonable," << p.flagged_unreasonable << '\n';
        out << "partition,all,excluded," << p.excluded << '\n';
        out << "partition,all,stats_available," << (p.stats_available() ? 1 : 0) << '\n';
        auto stats_rows = [&](const char* name, const std::optional<SummaryStats>& s) {
            out << "partition," << name << ",n," << (s ? s->n : 0) << '\n';
            if (!s) return;
            out << "partition," << name << ",median," << fixed(s->median) << '\n';
            out << "partition," << name << ",mean," << fixed(s->mean) << '\n';
            out << "partition," << name << ",std," << fixed(s->std) << '\n';
        };
        stats_rows("reasonable", p.reasonable);
        stats_rows("unreasonable", p.unreasonable);
        if (p.pct_diff_median) out << "partition,all,pct_diff_median," << fixed(*p.pct_diff_median) << '\n';
        if (p.pct_diff_mean) out << "partition,all,pct_diff_mean," << fixed(*p.pct_diff_mean) << '\n';
        if (p.mann_whitney) {
            out << "partition,all,u_stat," << fixed(p.mann_whitney->u_stat) << '\n';
            out << "partition,all,p_value," << fixed(p.mann_whitney->p_value) << '\n';
        }
    }
    return out.str();
}

std::string report_to_markdown(const Report& report) {
    std::ostringstream out;
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);

    out << "# " << experiment_name(report.experiment) << " experiment\n\n";
    out << "Generated " << stamp << ". Cases: " << report.total << ", errors: " << report.errors << ".\n\n";
    if (report.total == 0) out << "No cases were processed.\n\n";

    auto group_table = [&](const std::vector<GroupScore>& groups) {
        out << "| group | cases | errors | F1 reasonable | F1 unreasonable | weighted F1 | accuracy |\n";
        out << "|---|---|---|---|---|---|---|\n";
        for (const auto& g : groups)
            out << "| " << g.group << " | " << g.cases << " | " << g.errors << " | " << fixed(g.f1.reasonable)
                << " | " << fixed(g.f1.unreasonable) << " | " << fixed(g.weighted_f1) << " | " << fixed(g.accuracy)
                << " |\n";
        out << '\n';
    };
    if (!report.groups.empty()) group_table(report.groups);
    if (report.overall) {
        out << "## Overall\n\n";
        group_table({*report.overall});
    }
    if (report.partition) {
        const auto& p = *report.partition;
        out << "## sCRPS by verdict\n\n";
        out << "Flags: R:" << p.flagged_reasonable << "|U:" << p.flagged_unreasonable << " (errors " << p.errors
            << ", unscored " << p.excluded << ")\n\n";
        if (!p.stats_available()) {
            out << "Statistics unavailable: both verdict partitions need scored cases.\n\n";
        } else {
            out << "| partition | n | median | mean | std |\n|---|---|---|---|---|\n";
            for (auto [name, s] : {std::pair{"reasonable", &p.reasonable}, std::pair{"unreasonable", &p.unreasonable}})
                out << "| " << name << " | " << (*s)->n << " | " << fixed((*s)->median) << " | " << fixed((*s)->mean)
                    << " | " << fixed((*s)->std) << " |\n";
            out << "\nMedian difference: " << fixed_or_na(p.pct_diff_median) << "%, mean difference "
                << fixed_or_na(p.pct_diff_mean) << "%.\n";
            out << "Mann-Whitney U = " << fixed(p.mann_whitney->u_stat) << ", p = " << fixed(p.mann_whitney->p_value)
                << ".\n\n";
        }
    }
    out << "## Configuration\n\n```json\n" << report.config.dump(2) << "\n```\n";
    return out.str();
}

void emit_report(const Report& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto write = [&](const char* name, const std::string& text) {
        std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
        out << text;
    };
    write("report.json", report_to_json(report).dump(2) + "\n");
    write("report.csv", report_to_csv(report));
    write("report.md", report_to_markdown(report));
}

}  // namespace fcritic
