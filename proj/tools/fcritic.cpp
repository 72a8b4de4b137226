// fcritic command-line entry point.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fcritic/annotate.hpp"
#include "fcritic/backend.hpp"
#include "fcritic/basis.hpp"
#include "fcritic/config.hpp"
#include "fcritic/critic.hpp"
#include "fcritic/error.hpp"
#include "fcritic/harness.hpp"
#include "fcritic/perturbation.hpp"
#include "fcritic/promo.hpp"
#include "fcritic/prompt.hpp"
#include "fcritic/records.hpp"
#include "fcritic/report.hpp"
#include "fcritic/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fcritic;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitProcessing = 1;
constexpr int kExitConfig = 2;

const char* const kSeriesSchema = R"(
Series JSONL (generate output; accepted by perturb and render):
  {"id": str, "spec": {"seed": int, "components": [{"basis": 1-14, "w", "s", "delta"}]},
   "t0": num, "dt": num, "split_index": int, "values": [num...]}
  split_index is the index of the last history point.)";

const char* const kPerturbSchema = R"(
Perturbed series JSONL (perturb output; accepted by render):
  series fields plus {"perturbation": {"type": name, <params>}, "smape": num})";

const char* const kScenarioSchema = R"(
Scenario JSONL (scenario output; accepted by render):
  series fields plus {"scenario": {"kind": "A"-"D", "hist_holiday_t", "fcst_holiday_t",
   "hist_spike", "fcst_spike", "spike_width", "label", "spec"}})";

const char* const kRealWorldSchema = R"(
Real-world JSONL (run --experiment realworld --input; accepted by render):
  {"id": str, "history": [num...], "quantiles": {"0.1": [num...], ..., "0.9": [num...]},
   "actuals": [num...] | null}
  Every quantile path has the horizon length. sCRPS needs all nine deciles and actuals;
  other cases are critiqued but left out of the statistics.)";

const char* const kScriptSchema = R"(
Mock script JSONL (--script):
  {"case_id": str, "response": str}
  Repeated ids queue responses; the last one repeats. case_id "*" answers any unscripted case.
  The response "!transient" simulates a retryable backend failure.)";

const char* const kRecordSchema = R"(
Run directory:
  config.json      configuration echo (checked on resume)
  cases.jsonl      case plan, one record skeleton per line
  images/*.png     rendered plots
  records.jsonl    processed records; records.idx lists completed case ids
  report.{md,csv,json}
Record JSONL:
  {"case_id", "experiment", "group", "label": "reasonable"|"unreasonable"|null, "source", "image",
   "scores": {"smape"|"scrps": num}, "score_note"?, "retries",
   "verdict": {"label", "rationale", "raw", "latency_ms", "backend_id"}
   | "error": {"kind": "backend"|"unparseable", "message", "raw"}})";

const char* const kSettingsHelp = R"(
Settings: --config FILE (JSON object, // comments allowed), then --set key=value (repeatable),
then dedicated flags; later sources win. Values are parsed as JSON when possible.
Backend keys: backend (mock|http), script, mock_default, endpoint, model, api_key_env
  (default FC_API_KEY), auth_header, auth_prefix, timeout_s, max_retries, max_parallel,
  backoff_initial_s, response_pointer, request_overrides.
Plot keys: width_px, height_px, background, history_color, forecast_color, band_color,
  actuals_color, axis_color, band_opacity, line_width, draw_legend, test_mode.
Grid keys: t0, dt, n_points, split_time.)";

struct Common {
    std::string config;
    std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Common& common) {
    cmd->add_option("--config", common.config, "JSON settings file")->check(CLI::ExistingFile);
    cmd->add_option("--set", common.sets, "Override a setting, key=value (repeatable)");
}

Settings settings_from(const Common& common) {
    Settings s = common.config.empty() ? Settings{} : Settings::load(common.config);
    for (const auto& assignment : common.sets) s.apply_override(assignment);
    return s;
}

template <typename T>
void set_if(Settings& s, const std::string& key, const std::optional<T>& value) {
    if (value) s.set(key, json(*value));
}

/// Writes JSONL to a file, or stdout for "-" / empty.
class LineSink {
public:
    explicit LineSink(const std::string& path) {
        if (!path.empty() && path != "-") {
            if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_) throw ConfigError("cannot write " + path);
        }
    }
    void write(const json& j) { (file_.is_open() ? file_ : std::cout) << j.dump() << '\n'; }

private:
    std::ofstream file_;
};

std::vector<json> read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path);
    std::vector<json> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(json::parse(line));
        } catch (const json::exception& e) {
            throw ParameterError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

std::string numbered_id(const std::string& prefix, std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04zu", i);
    return prefix + buf;
}

json series_line(const std::string& id, const TimeSeries& series) {
    json j = series;
    j["id"] = id;
    return j;
}

std::unique_ptr<Backend> make_backend(const Settings& s) {
    const auto kind = s.get<std::string>("backend", "mock");
    if (kind == "mock") {
        if (s.has("script")) return MockBackend::from_jsonl(s.get<std::string>("script", ""));
        if (s.has("mock_default")) return MockBackend::always(s.get<std::string>("mock_default", ""));
        throw ConfigError("mock backend needs --script or the mock_default setting");
    }
    if (kind == "http") {
        auto config = backend_config_from(s);
        if (config.endpoint.empty()) throw ConfigError("http backend needs the endpoint setting");
        return std::make_unique<HttpBackend>(std::move(config));
    }
    throw ConfigError("unknown backend '" + kind + "' (expected mock or http)");
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
    Common common;
    std::optional<std::uint64_t> seed;
    std::size_t count = 1;
    std::string out = "-";
};

int cmd_generate(const GenerateArgs& a) {
    Settings s = settings_from(a.common);
    set_if(s, "seed", a.seed);
    const ExperimentConfig config = experiment_config_from(s);
    const TimeGrid grid = config.grid();
    LineSink sink(a.out);
    for (std::size_t i = 0; i < a.count; ++i) {
        const SeriesSpec spec = sample_spec(derive_seed(config.seed, "generate", i));
        json line = series_line(numbered_id("series-", i), generate(spec, grid));
        line["spec"] = spec;
        sink.write(line);
    }
    return kExitOk;
}

struct PerturbArgs {
    Common common;
    std::string input;
    std::string type;
    std::optional<double> omega, beta, alpha, gamma;
    std::optional<std::size_t> n_max;
    std::optional<std::uint64_t> seed;
    std::string out = "-";
};

int cmd_perturb(const PerturbArgs& a) {
    Settings s = settings_from(a.common);
    set_if(s, "omega", a.omega);
    set_if(s, "beta", a.beta);
    set_if(s, "alpha", a.alpha);
    set_if(s, "gamma", a.gamma);
    set_if(s, "n_max", a.n_max);
    set_if(s, "seed", a.seed);
    const ExperimentConfig config = experiment_config_from(s);
    PerturbType type;
    try {
        type = perturb_type_from_name(a.type);
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    const auto lines = read_jsonl(a.input);
    LineSink sink(a.out);
    std::size_t i = 0;
    for (const auto& line : lines) {
        const std::string id = line.contains("id") ? line.at("id").get<std::string>() : numbered_id("series-", i);
        const TimeSeries base = series_from_json(line);
        std::optional<SeriesSpec> spec;
        if (line.contains("spec")) spec = spec_from_json(line.at("spec"));
        if (type == PerturbType::TimeStretch && !spec)
            throw ParameterError(id + ": time stretch needs the generating spec");
        const PerturbKind kind = perturbation_for(config, type, derive_seed(config.seed, "perturb/" + id, i));
        const TimeSeries perturbed = apply_perturbation(kind, base, spec ? *spec : SeriesSpec{});
        json out = series_line(id, perturbed);
        if (spec) out["spec"] = *spec;
        out["perturbation"] = perturbation_to_json(kind);
        out["smape"] = smape(base.forecast().values, perturbed.forecast().values);
        sink.write(out);
        ++i;
    }
    return kExitOk;
}

struct ScenarioArgs {
    Common common;
    std::string kind = "all";
    std::size_t count = 1;
    std::optional<std::uint64_t> seed;
    std::string out = "-";
};

int cmd_scenario(const ScenarioArgs& a) {
    Settings s = settings_from(a.common);
    set_if(s, "seed", a.seed);
    const ExperimentConfig config = experiment_config_from(s);
    const TimeGrid grid = config.grid();
    std::vector<ScenarioKind> kinds;
    if (a.kind == "all") {
        kinds.assign(kAllScenarioKinds.begin(), kAllScenarioKinds.end());
    } else {
        try {
            kinds.push_back(scenario_from_name(a.kind));
        } catch (const ParameterError& e) {
            throw ConfigError(e.what());
        }
    }
    LineSink sink(a.out);
    for (ScenarioKind kind : kinds) {
        const std::string name(scenario_name(kind));
        for (std::size_t i = 0; i < a.count; ++i) {
            const SeriesSpec spec = sample_spec(derive_seed(config.seed, "scenario/" + name + "/spec", i));
            const ScenarioCase sc =
                build_scenario(kind, spec, grid, derive_seed(config.seed, "scenario/" + name, i), config.scenario);
            json line = series_line(numbered_id("scenario-" + name + "-", i), sc.series);
            line["scenario"] = sc.scenario;
            sink.write(line);
        }
    }
    return kExitOk;
}

struct RenderArgs {
    Common common;
    std::string input;
    std::string out_dir;
};

int cmd_render(const RenderArgs& a) {
    const Settings s = settings_from(a.common);
    const PlotStyle style = plot_style_from(s);
    try {
        style.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    std::size_t i = 0;
    for (const auto& line : read_jsonl(a.input)) {
        std::string id = line.contains("id") ? (line.at("id").is_string() ? line.at("id").get<std::string>()
                                                                          : line.at("id").dump())
                                             : numbered_id("series-", i);
        std::vector<std::uint8_t> png;
        if (line.contains("quantiles")) {
            const RealWorldCase c = realworld_from_json(line);
            const TimeGrid grid =
                TimeGrid::from_split_index(0.0, 1.0, c.history.size() + c.forecast.horizon(), c.history.size() - 1);
            png = render_probabilistic(SeriesView{&grid, 0, c.history}, c.forecast, style);
        } else {
            const TimeSeries series = series_from_json(line);
            png = render_point(series.history(), series.forecast(), style);
        }
        const fs::path target = fs::path(a.out_dir) / fs::path(image_path_for(id)).filename();
        fs::create_directories(target.parent_path());
        write_file(target.string(), png);
        std::cout << target.string() << '\n';
        ++i;
    }
    return kExitOk;
}

struct CritiqueArgs {
    Common common;
    std::string image;
    std::string template_name = "point-synthetic";
    std::optional<double> hist_holiday_t, fcst_holiday_t;
    std::string case_id;
    std::optional<std::string> backend, script;
};

int cmd_critique(const CritiqueArgs& a) {
    Settings s = settings_from(a.common);
    set_if(s, "backend", a.backend);
    set_if(s, "script", a.script);
    TemplateId id;
    try {
        id = template_from_name(a.template_name);
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    std::map<std::string, double> params;
    if (a.hist_holiday_t) params[std::string(kHistHolidayKey)] = *a.hist_holiday_t;
    if (a.fcst_holiday_t) params[std::string(kFcstHolidayKey)] = *a.fcst_holiday_t;
    std::string prompt;
    try {
        prompt = build_prompt(prompt_template(id), params);
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    const auto png = read_file(a.image);
    auto backend = make_backend(s);
    const auto retry = retry_policy_from(backend_config_from(s));
    const std::string case_id = a.case_id.empty() ? fs::path(a.image).stem().string() : a.case_id;
    const CritiqueOutcome outcome = critique(*backend, {case_id, prompt, png}, retry);
    json out{{"case_id", case_id}, {"retries", outcome.retries}};
    if (outcome.ok()) {
        const auto& v = *outcome.verdict;
        out["verdict"] = {{"label", label_name(v.label)},
                          {"rationale", v.rationale},
                          {"raw", v.raw},
                          {"latency_ms", v.latency_ms},
                          {"backend_id", v.backend_id}};
    } else {
        out["error"] = {{"kind", outcome.error_kind}, {"message", outcome.error_message}, {"raw", outcome.error_raw}};
    }
    std::cout << out.dump() << '\n';
    return outcome.ok() ? kExitOk : kExitProcessing;
}

struct RunArgs {
    Common common;
    std::optional<std::string> experiment, backend, script, input, out_dir;
    std::optional<std::uint64_t> seed;
    bool plan_only = false;
};

int cmd_run(const RunArgs& a) {
    Settings s = settings_from(a.common);
    set_if(s, "experiment", a.experiment);
    set_if(s, "backend", a.backend);
    set_if(s, "script", a.script);
    set_if(s, "input", a.input);
    set_if(s, "output_dir", a.out_dir);
    set_if(s, "seed", a.seed);
    const ExperimentConfig config = experiment_config_from(s);
    if (config.experiment == ExperimentKind::RealWorld && config.input_path.empty())
        throw ConfigError("the realworld experiment needs --input FILE (see --help for the JSONL schema)");
    config.validate();

    std::unique_ptr<Backend> backend;
    if (a.plan_only) backend = MockBackend::always("<answer>1</answer>");
    else backend = make_backend(s);

    RunOptions options;
    options.plan_only = a.plan_only;
    const RunSummary summary = run_experiment(config, *backend, options);
    std::cerr << "planned " << summary.planned << ", resumed " << summary.resumed << ", processed "
              << summary.processed << ", errors " << summary.errors << " -> " << config.output_dir.string() << '\n';
    return summary.errors > 0 ? kExitProcessing : kExitOk;
}

struct AnnotateArgs {
    std::string run_dir;
    std::string viewer;
    std::string annotator = "human";
};

int cmd_annotate(const AnnotateArgs& a) {
    const AnnotateSummary summary = annotate_human({a.run_dir, a.viewer, a.annotator}, std::cin, std::cout);
    std::cerr << "labeled " << summary.labeled_now << " now, " << summary.already_labeled << " earlier, of "
              << summary.total << (summary.finished ? " (done)" : " (stopped)") << '\n';
    return kExitOk;
}

struct ReportArgs {
    std::string run_dir;
    std::string records = ".";
};

int cmd_report(const ReportArgs& a) {
    const fs::path run_dir = a.run_dir;
    std::ifstream in(run_dir / "config.json");
    if (!in) throw ConfigError("no config.json in " + run_dir.string());
    json echo;
    try {
        echo = json::parse(in);
    } catch (const json::exception&) {
        throw ConfigError("config.json in " + run_dir.string() + " is not valid JSON");
    }
    const ExperimentKind kind = experiment_from_name(echo.value("experiment", "perturbation"));
    const StdFlavor flavor = echo.value("std_flavor", "sample") == "population" ? StdFlavor::Population : StdFlavor::Sample;
    std::vector<std::string> order;
    if (kind == ExperimentKind::Perturbation) order = echo.value("groups", std::vector<std::string>{});
    if (kind == ExperimentKind::Promo)
        for (ScenarioKind k : kAllScenarioKinds) order.emplace_back(scenario_name(k));

    const fs::path records_dir = run_dir / a.records;
    if (!fs::exists(records_dir / "records.idx")) throw ConfigError("no records in " + records_dir.string());
    const RecordStore store(records_dir);
    const Report report = build_report(kind, store.records(), echo, order, flavor);
    emit_report(report, records_dir);
    std::cout << report_to_json(report).dump(2) << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic forecast plots, perturbations and multimodal critique runs"};
    app.require_subcommand(1);
    app.footer(kSettingsHelp);

    GenerateArgs gen;
    auto* generate_cmd = app.add_subcommand("generate", "Sample random synthetic series as JSONL");
    add_common(generate_cmd, gen.common);
    generate_cmd->add_option("--seed", gen.seed, "Master seed");
    generate_cmd->add_option("--count", gen.count, "Number of series")->check(CLI::PositiveNumber);
    generate_cmd->add_option("--out", gen.out, "Output JSONL file (- for stdout)");
    generate_cmd->footer(std::string(kSeriesSchema) + kSettingsHelp);

    PerturbArgs pert;
    auto* perturb_cmd = app.add_subcommand("perturb", "Apply one perturbation to the forecast of each series");
    add_common(perturb_cmd, pert.common);
    perturb_cmd->add_option("--input", pert.input, "Series JSONL")->required()->check(CLI::ExistingFile);
    perturb_cmd->add_option("--type", pert.type, "vertical_shift | trend_modify | time_stretch | random_spikes")
        ->required();
    perturb_cmd->add_option("--omega", pert.omega, "Vertical shift fraction of the forecast mean");
    perturb_cmd->add_option("--beta", pert.beta, "Trend slope multiplier");
    perturb_cmd->add_option("--alpha", pert.alpha, "Time stretch factor");
    perturb_cmd->add_option("--gamma", pert.gamma, "Spike height as a fraction of the forecast maximum");
    perturb_cmd->add_option("--n-max", pert.n_max, "Maximum number of spikes");
    perturb_cmd->add_option("--seed", pert.seed, "Master seed for spike placement");
    perturb_cmd->add_option("--out", pert.out, "Output JSONL file (- for stdout)");
    perturb_cmd->footer(std::string(kSeriesSchema) + kPerturbSchema + kSettingsHelp);

    ScenarioArgs scen;
    auto* scenario_cmd = app.add_subcommand("scenario", "Build promotional-holiday scenarios A-D as JSONL");
    add_common(scenario_cmd, scen.common);
    scenario_cmd->add_option("--kind", scen.kind, "A | B | C | D | all");
    scenario_cmd->add_option("--count", scen.count, "Scenarios per kind")->check(CLI::PositiveNumber);
    scenario_cmd->add_option("--seed", scen.seed, "Master seed");
    scenario_cmd->add_option("--out", scen.out, "Output JSONL file (- for stdout)");
    scenario_cmd->footer(std::string(kScenarioSchema) + kSettingsHelp);

    RenderArgs rend;
    auto* render_cmd = app.add_subcommand("render", "Render series or probabilistic cases to PNG");
    add_common(render_cmd, rend.common);
    render_cmd->add_option("--input", rend.input, "Series, perturbed, scenario or real-world JSONL")
        ->required()
        ->check(CLI::ExistingFile);
    render_cmd->add_option("--out-dir", rend.out_dir, "Directory for <id>.png files")->required();
    render_cmd->footer(std::string(kSeriesSchema) + kPerturbSchema + kScenarioSchema + kRealWorldSchema +
                       kSettingsHelp);

    CritiqueArgs crit;
    auto* critique_cmd = app.add_subcommand("critique", "Ask a backend for a verdict on one plot");
    add_common(critique_cmd, crit.common);
    critique_cmd->add_option("--image", crit.image, "PNG plot")->required()->check(CLI::ExistingFile);
    critique_cmd->add_option("--template", crit.template_name, "point-synthetic | holiday | probabilistic-m5");
    critique_cmd->add_option("--hist-holiday-t", crit.hist_holiday_t, "Historical holiday time (holiday template)");
    critique_cmd->add_option("--fcst-holiday-t", crit.fcst_holiday_t, "Forecast holiday time (holiday template)");
    critique_cmd->add_option("--case-id", crit.case_id, "Case id sent to the backend (default: image stem)");
    critique_cmd->add_option("--backend", crit.backend, "mock | http");
    critique_cmd->add_option("--script", crit.script, "Mock script JSONL");
    critique_cmd->footer(std::string(R"(
Output (stdout): {"case_id", "retries", "verdict": {...}} or {"case_id", "retries", "error": {...}})") +
                         kScriptSchema + kSettingsHelp);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run an experiment end to end (resumable)");
    add_common(run_cmd, run.common);
    run_cmd->add_option("--experiment", run.experiment, "perturbation | promo | realworld");
    run_cmd->add_option("--backend", run.backend, "mock | http");
    run_cmd->add_option("--script", run.script, "Mock script JSONL");
    run_cmd->add_option("--input", run.input, "Real-world JSONL (realworld experiment)");
    run_cmd->add_option("--out-dir", run.out_dir, "Run directory (default: out)");
    run_cmd->add_option("--seed", run.seed, "Master seed");
    run_cmd->add_flag("--plan-only", run.plan_only, "Write the case plan and images without critiquing");
    run_cmd->footer(std::string(R"(
Experiment keys: experiment, seed, generated, retain_fraction, clean, groups, omega, beta, alpha,
  gamma, n_max, cases_per_scenario, spike_magnitude_scale, spike_width, d_ratio_lo, d_ratio_hi,
  input, std_flavor (sample|population), output_dir.)") +
                    kRealWorldSchema + kScriptSchema + kRecordSchema + kSettingsHelp);

    AnnotateArgs ann;
    auto* annotate_cmd = app.add_subcommand("annotate", "Label a planned run by hand (1, 2 or q per case)");
    annotate_cmd->add_option("--run-dir", ann.run_dir, "Run directory created with run --plan-only")->required();
    annotate_cmd->add_option("--viewer", ann.viewer, "Command that opens an image; the path is appended");
    annotate_cmd->add_option("--annotator", ann.annotator, "Name stored as the verdict backend id");
    annotate_cmd->footer(std::string(R"(
Labels are stored as records under <run-dir>/annotations/; score them with
  fcritic report --run-dir <run-dir> --records annotations)") +
                         kRecordSchema);

    ReportArgs rep;
    auto* report_cmd = app.add_subcommand("report", "Rebuild report.{md,csv,json} from stored records");
    report_cmd->add_option("--run-dir", rep.run_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
    report_cmd->add_option("--records", rep.records, "Records subdirectory, e.g. annotations (default: .)");
    report_cmd->footer(kRecordSchema);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*generate_cmd) return cmd_generate(gen);
        if (*perturb_cmd) return cmd_perturb(pert);
        if (*scenario_cmd) return cmd_scenario(scen);
        if (*render_cmd) return cmd_render(rend);
        if (*critique_cmd) return cmd_critique(crit);
        if (*run_cmd) return cmd_run(run);
        if (*annotate_cmd) return cmd_annotate(ann);
        if (*report_cmd) return cmd_report(rep);
    } catch (const ConfigError& e) {
        std::cerr << "fcritic: configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ParameterError& e) {
        std::cerr << "fcritic: " << e.what() << '\n';
        return kExitProcessing;
    } catch (const std::exception& e) {
        std::cerr << "fcritic: " << e.what() << '\n';
        return kExitProcessing;
    }
    return kExitConfig;
}
