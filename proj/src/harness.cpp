#include "fcritic/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <string>

#include "fcritic/critic.hpp"
#include "fcritic/error.hpp"
#include "fcritic/rng.hpp"

namespace fcritic {

namespace fs = std::filesystem;

TimeGrid ExperimentConfig::grid() const {
    try {
        return TimeGrid::make(t0, dt, n_points, split_time);
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
}

void ExperimentConfig::validate() const {
    const auto g = grid();
    if (experiment == ExperimentKind::Perturbation) {
        if (generated == 0 || clean == 0) throw ConfigError("generated and clean counts must be > 0");
        if (!(retain_fraction > 0.0 && retain_fraction <= 1.0)) throw ConfigError("retain_fraction must lie in (0, 1]");
        if (std::floor(retain_fraction * static_cast<double>(generated)) < 1.0)
            throw ConfigError("retain_fraction * generated keeps no cases");
        if (groups.empty()) throw ConfigError("no perturbation groups configured");
        std::set<std::string> seen;
        for (const auto& grp : groups) {
            if (grp != kMixtureGroup) {
                try {
                    if (perturb_type_name(perturb_type_from_name(grp)) != grp)
                        throw ConfigError("use canonical perturbation names in groups: '" + grp + "'");
                } catch (const ParameterError& e) {
                    throw ConfigError(e.what());
                }
            }
            if (!seen.insert(grp).second) throw ConfigError("duplicate group '" + grp + "'");
        }
        if (n_max < 1 || n_max > g.forecast_size()) throw ConfigError("n_max must lie in [1, forecast length]");
        if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
        if (g.forecast_size() < 2) throw ConfigError("trend modification needs a forecast of at least 2 points");
    }
    if (experiment == ExperimentKind::Promo) {
        if (cases_per_scenario == 0) throw ConfigError("cases_per_scenario must be > 0");
        if (scenario.spike_width < 1) throw ConfigError("spike_width must be >= 1");
        if (!(scenario.d_ratio_lo <= scenario.d_ratio_hi)) throw ConfigError("d_ratio_lo must not exceed d_ratio_hi");
    }
    if (max_parallel < 1) throw ConfigError("max_parallel must be >= 1");
    try {
        style.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
}

nlohmann::json ExperimentConfig::echo() const {
    nlohmann::json j{{"experiment", experiment_name(experiment)},
                     {"seed", seed},
                     {"rng", kRngAlgorithm},
                     {"grid", {{"t0", t0}, {"dt", dt}, {"n_points", n_points}, {"split_time", split_time}}},
                     {"std_flavor", std_flavor == StdFlavor::Sample ? "sample" : "population"}};
    switch (experiment) {
        case ExperimentKind::Perturbation:
            j["generated"] = generated;
            j["retain_fraction"] = retain_fraction;
            j["clean"] = clean;
            j["groups"] = groups;
            j["params"] = {{"omega", omega}, {"beta", beta}, {"alpha", alpha}, {"gamma", gamma}, {"n_max", n_max}};
            break;
        case ExperimentKind::Promo:
            j["cases_per_scenario"] = cases_per_scenario;
            j["scenario"] = {{"magnitude_scale", scenario.magnitude_scale},
                             {"spike_width", scenario.spike_width},
                             {"d_ratio_lo", scenario.d_ratio_lo},
                             {"d_ratio_hi", scenario.d_ratio_hi}};
            break;
        case ExperimentKind::RealWorld:
            j.erase("grid");
            j["input"] = fs::path(input_path).filename().string();
            break;
    }
    j["style"] = {{"width_px", style.width_px},
                  {"height_px", style.height_px},
                  {"history_color", format_rgb(style.history_color)},
                  {"forecast_color", format_rgb(style.forecast_color)},
                  {"band_color", format_rgb(style.band_color)},
                  {"actuals_color", format_rgb(style.actuals_color)},
                  {"band_opacity", style.band_opacity},
                  {"test_mode", style.test_mode}};
    return j;
}

const std::set<std::string>& known_config_keys() {
    static const std::set<std::string> keys{
        // experiment
        "experiment", "seed", "generated", "retain_fraction", "clean", "groups", "omega", "beta", "alpha",
        "gamma", "n_max", "cases_per_scenario", "spike_magnitude_scale", "spike_width", "d_ratio_lo",
        "d_ratio_hi", "t0", "dt", "n_points", "split_time", "input", "std_flavor", "output_dir",
        // backend
        "backend", "script", "mock_default", "endpoint", "model", "api_key_env", "auth_header", "auth_prefix",
        "timeout_s", "max_retries", "max_parallel", "backoff_initial_s", "response_pointer", "request_overrides",
        // plot style
        "width_px", "height_px", "background", "history_color", "forecast_color", "band_color", "actuals_color",
        "axis_color", "band_opacity", "line_width", "draw_legend", "test_mode"};
    return keys;
}

PlotStyle plot_style_from(const Settings& s) {
    PlotStyle st;
    st.width_px = s.get("width_px", st.width_px);
    st.height_px = s.get("height_px", st.height_px);
    try {
        auto color = [&](const char* key, Rgb fallback) {
            return s.has(key) ? parse_rgb(s.get<std::string>(key, "")) : fallback;
        };
        st.background = color("background", st.background);
        st.history_color = color("history_color", st.history_color);
        st.forecast_color = color("forecast_color", st.forecast_color);
        st.band_color = color("band_color", st.band_color);
        st.actuals_color = color("actuals_color", st.actuals_color);
        st.axis_color = color("axis_color", st.axis_color);
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    st.band_opacity = s.get("band_opacity", st.band_opacity);
    st.line_width = s.get("line_width", st.line_width);
    st.draw_legend = s.get("draw_legend", st.draw_legend);
    st.test_mode = s.get("test_mode", st.test_mode);
    return st;
}

BackendConfig backend_config_from(const Settings& s) {
    BackendConfig b;
    b.endpoint = s.get("endpoint", b.endpoint);
    b.model = s.get("model", b.model);
    b.api_key_env = s.get("api_key_env", b.api_key_env);
    b.auth_header = s.get("auth_header", b.auth_header);
    b.auth_prefix = s.get("auth_prefix", b.auth_prefix);
    b.timeout_s = s.get("timeout_s", b.timeout_s);
    b.max_retries = s.get("max_retries", b.max_retries);
    b.max_parallel = s.get("max_parallel", b.max_parallel);
    b.backoff_initial_s = s.get("backoff_initial_s", b.backoff_initial_s);
    b.response_pointer = s.get("response_pointer", b.response_pointer);
    if (s.has("request_overrides")) b.request_overrides = s.raw().at("request_overrides");
    b.validate();
    return b;
}

ExperimentConfig experiment_config_from(const Settings& s) {
    s.require_known(known_config_keys());
    ExperimentConfig c;
    c.experiment = experiment_from_name(s.get<std::string>("experiment", "perturbation"));
    c.seed = s.get("seed", c.seed);
    c.generated = s.get("generated", c.generated);
    c.retain_fraction = s.get("retain_fraction", c.retain_fraction);
    c.clean = s.get("clean", c.clean);
    c.groups = s.get("groups", c.groups);
    c.omega = s.get("omega", c.omega);
    c.beta = s.get("beta", c.beta);
    c.alpha = s.get("alpha", c.alpha);
    c.gamma = s.get("gamma", c.gamma);
    c.n_max = s.get("n_max", c.n_max);
    c.cases_per_scenario = s.get("cases_per_scenario", c.cases_per_scenario);
    c.scenario.magnitude_scale = s.get("spike_magnitude_scale", c.scenario.magnitude_scale);
    c.scenario.spike_width = s.get("spike_width", c.scenario.spike_width);
    c.scenario.d_ratio_lo = s.get("d_ratio_lo", c.scenario.d_ratio_lo);
    c.scenario.d_ratio_hi = s.get("d_ratio_hi", c.scenario.d_ratio_hi);
    c.t0 = s.get("t0", c.t0);
    c.dt = s.get("dt", c.dt);
    c.n_points = s.get("n_points", c.n_points);
    c.split_time = s.get("split_time", c.split_time);
    c.input_path = s.get("input", c.input_path);
    const auto flavor = s.get<std::string>("std_flavor", "sample");
    if (flavor != "sample" && flavor != "population") throw ConfigError("std_flavor must be sample or population");
    c.std_flavor = flavor == "sample" ? StdFlavor::Sample : StdFlavor::Population;
    c.output_dir = s.get<std::string>("output_dir", c.output_dir.string());
    c.style = plot_style_from(s);
    const auto backend = backend_config_from(s);
    c.max_parallel = static_cast<std::size_t>(backend.max_parallel);
    c.retry = retry_policy_from(backend);
    return c;
}

// ---------------------------------------------------------------------------
// Real-world cases

RealWorldCase realworld_from_json(const nlohmann::json& j) {
    try {
        RealWorldCase c{j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump(),
                        j.at("history").get<std::vector<double>>(),
                        QuantileForecast({0.5}, {{0.0}}),
                        std::nullopt};
        if (c.history.empty()) throw ParameterError("realworld case " + c.id + ": empty history");
        std::vector<std::pair<double, std::vector<double>>> levels;
        for (const auto& [key, path] : j.at("quantiles").items()) {
            std::size_t used = 0;
            double level = 0.0;
            try {
                level = std::stod(key, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != key.size()) throw ParameterError("realworld case " + c.id + ": bad quantile key '" + key + "'");
            levels.emplace_back(level, path.get<std::vector<double>>());
        }
        std::sort(levels.begin(), levels.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<double> lv;
        std::vector<std::vector<double>> paths;
        for (auto& [l, p] : levels) {
            lv.push_back(l);
            paths.push_back(std::move(p));
        }
        c.forecast = QuantileForecast(std::move(lv), std::move(paths));
        if (j.contains("actuals") && !j.at("actuals").is_null()) {
            c.actuals = j.at("actuals").get<std::vector<double>>();
            if (c.actuals->size() != c.forecast.horizon())
                throw ParameterError("realworld case " + c.id + ": actuals length != horizon");
        }
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("realworld case json: ") + e.what());
    }
}

nlohmann::json realworld_to_json(const RealWorldCase& c) {
    nlohmann::json q = nlohmann::json::object();
    for (std::size_t i = 0; i < c.forecast.level_count(); ++i) {
        char key[32];
        std::snprintf(key, sizeof key, "%g", c.forecast.levels()[i]);
        q[key] = c.forecast.path(i);
    }
    nlohmann::json j{{"id", c.id}, {"history", c.history}, {"quantiles", std::move(q)}};
    if (c.actuals) j["actuals"] = *c.actuals;
    return j;
}

std::vector<RealWorldCase> read_realworld_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read realworld input " + path);
    std::vector<RealWorldCase> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(realworld_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw ParameterError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Plans

std::string image_path_for(const std::string& case_id) {
    std::string name = case_id;
    for (char& ch : name)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.')) ch = '_';
    return "images/" + name + ".png";
}

PerturbKind perturbation_for(const ExperimentConfig& c, PerturbType type, std::uint64_t spike_seed) {
    switch (type) {
        case PerturbType::VerticalShift: return VerticalShift{c.omega};
        case PerturbType::TrendModify: return TrendModify{c.beta};
        case PerturbType::TimeStretch: return TimeStretch{c.alpha};
        case PerturbType::RandomSpikes: return RandomSpikes{c.gamma, c.n_max, spike_seed};
    }
    throw ParameterError("unknown perturbation type");
}

nlohmann::json perturbation_to_json(const PerturbKind& kind) {
    return std::visit(
        [](const auto& p) -> nlohmann::json {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, VerticalShift>) return {{"type", "vertical_shift"}, {"omega", p.omega}};
            else if constexpr (std::is_same_v<P, TrendModify>) return {{"type", "trend_modify"}, {"beta", p.beta}};
            else if constexpr (std::is_same_v<P, TimeStretch>) return {{"type", "time_stretch"}, {"alpha", p.alpha}};
            else return {{"type", "random_spikes"}, {"gamma", p.gamma}, {"n_max", p.n_max}, {"seed", p.seed}};
        },
        kind);
}

std::vector<std::uint8_t> CasePlan::render(const PlotStyle& style) const {
    return std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, PointPlot>) {
                return render_point(p.series.history(), p.series.forecast(), style);
            } else {
                const SeriesView history{&p.grid, 0, p.history};
                return render_probabilistic(history, p.forecast, style);
            }
        },
        plot);
}

std::string CasePlan::prompt() const {
    return build_prompt(fcritic::prompt_template(prompt_template), prompt_params);
}

namespace {

std::string numbered(std::string_view prefix, std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04zu", i);
    return std::string(prefix) + buf;
}

struct Candidate {
    SeriesSpec spec;
    PerturbKind kind;
    TimeSeries perturbed;
    double smape;
};

Candidate make_candidate(const ExperimentConfig& c, const TimeGrid& grid, PerturbType type, const std::string& stream,
                         std::size_t i) {
    SeriesSpec spec = sample_spec(derive_seed(c.seed, stream + "/candidate", i));
    const TimeSeries base = generate(spec, grid);
    PerturbKind kind = perturbation_for(c, type, derive_seed(c.seed, stream + "/spikes", i));
    TimeSeries perturbed = apply_perturbation(kind, base, spec);
    const double score = smape(base.forecast().values, perturbed.forecast().values);
    return {std::move(spec), std::move(kind), std::move(perturbed), score};
}

/// Filter a pool of candidates for one type; returns kept pool indices.
std::vector<std::size_t> retained_indices(const std::vector<Candidate>& pool, double fraction) {
    std::vector<double> scores;
    scores.reserve(pool.size());
    for (const auto& cand : pool) scores.push_back(cand.smape);
    return select_worst(scores, fraction);
}

CasePlan perturbed_plan(const Candidate& cand, std::string case_id, const std::string& group) {
    CasePlan p{{}, TemplateId::PointSynthetic, {}, PointPlot{cand.perturbed}};
    p.record.case_id = std::move(case_id);
    p.record.experiment = ExperimentKind::Perturbation;
    p.record.group = group;
    p.record.label = Label::Unreasonable;
    p.record.source = {{"spec", cand.spec}, {"perturbation", perturbation_to_json(cand.kind)}};
    p.record.scores["smape"] = cand.smape;
    p.record.image = image_path_for(p.record.case_id);
    return p;
}

/// Smallest pool size whose floor(fraction * n) reaches quota.
std::size_t pool_size_for(std::size_t quota, double fraction) {
    if (quota == 0) return 0;
    auto n = static_cast<std::size_t>(std::ceil(static_cast<double>(quota) / fraction));
    auto kept = [&](std::size_t m) { return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(m))); };
    while (kept(n) < quota) ++n;
    while (n > 1 && kept(n - 1) >= quota) --n;
    return n;
}

void shuffle_plan(std::vector<CasePlan>& plan, std::uint64_t seed) {
    Rng rng(seed);
    for (std::size_t i = plan.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(0, i - 1));
        std::swap(plan[i - 1], plan[j]);
    }
}

}  // namespace

std::vector<CasePlan> plan_perturbation(const ExperimentConfig& config) {
    config.validate();
    const TimeGrid grid = config.grid();
    std::vector<CasePlan> plan;

    for (const auto& group : config.groups) {
        if (group != kMixtureGroup) {
            const PerturbType type = perturb_type_from_name(group);
            std::vector<Candidate> pool;
            pool.reserve(config.generated);
            for (std::size_t i = 0; i < config.generated; ++i) pool.push_back(make_candidate(config, grid, type, group, i));
            for (std::size_t idx : retained_indices(pool, config.retain_fraction))
                plan.push_back(perturbed_plan(pool[idx], numbered(group + "-p", idx), group));
        } else {
            // Type per retained slot, then one candidate pool per type.
            const auto target = static_cast<std::size_t>(
                std::floor(config.retain_fraction * static_cast<double>(config.generated)));
            Rng type_rng(derive_seed(config.seed, "mixture/types"));
            std::array<std::size_t, 4> quota{};
            for (std::size_t i = 0; i < target; ++i) ++quota[type_rng.uniform_int(0, 3)];
            for (std::size_t t = 0; t < 4; ++t) {
                const PerturbType type = kAllPerturbTypes[t];
                const std::string stream = "mixture/" + std::string(perturb_type_name(type));
                std::vector<Candidate> pool;
                const std::size_t n = pool_size_for(quota[t], config.retain_fraction);
                for (std::size_t i = 0; i < n; ++i) pool.push_back(make_candidate(config, grid, type, stream, i));
                if (pool.empty()) continue;
                for (std::size_t idx : retained_indices(pool, config.retain_fraction))
                    plan.push_back(perturbed_plan(
                        pool[idx], numbered("mixture-" + std::string(perturb_type_name(type)) + "-p", idx), group));
            }
        }

        for (std::size_t i = 0; i < config.clean; ++i) {
            SeriesSpec spec = sample_spec(derive_seed(config.seed, group + "/clean", i));
            CasePlan p{{}, TemplateId::PointSynthetic, {}, PointPlot{generate(spec, grid)}};
            p.record.case_id = numbered(group + "-c", i);
            p.record.experiment = ExperimentKind::Perturbation;
            p.record.group = group;
            p.record.label = Label::Reasonable;
            p.record.source = {{"spec", spec}, {"perturbation", nullptr}};
            p.record.scores["smape"] = 0.0;
            p.record.image = image_path_for(p.record.case_id);
            plan.push_back(std::move(p));
        }
    }
    shuffle_plan(plan, derive_seed(config.seed, "perturbation/order"));
    return plan;
}

std::vector<CasePlan> plan_promo(const ExperimentConfig& config) {
    config.validate();
    const TimeGrid grid = config.grid();
    std::vector<CasePlan> plan;
    for (ScenarioKind kind : kAllScenarioKinds) {
        const std::string name(scenario_name(kind));
        for (std::size_t i = 0; i < config.cases_per_scenario; ++i) {
            const SeriesSpec spec = sample_spec(derive_seed(config.seed, "promo/" + name + "/spec", i));
            ScenarioCase sc =
                build_scenario(kind, spec, grid, derive_seed(config.seed, "promo/" + name + "/scenario", i), config.scenario);
            CasePlan p{{}, TemplateId::Holiday, {}, PointPlot{std::move(sc.series)}};
            p.record.case_id = numbered("promo-" + name + "-", i);
            p.record.experiment = ExperimentKind::Promo;
            p.record.group = name;
            p.record.label = sc.scenario.label;
            p.record.source = sc.scenario;
            p.record.image = image_path_for(p.record.case_id);
            p.prompt_params = {{std::string(kHistHolidayKey), sc.scenario.history_holiday_t},
                               {std::string(kFcstHolidayKey), sc.scenario.forecast_holiday_t}};
            plan.push_back(std::move(p));
        }
    }
    shuffle_plan(plan, derive_seed(config.seed, "promo/order"));
    return plan;
}

std::vector<CasePlan> plan_realworld(const ExperimentConfig& config, const std::vector<RealWorldCase>& cases) {
    std::vector<CasePlan> plan;
    std::set<std::string> ids;
    std::set<std::string> images;
    for (const auto& c : cases) {
        if (!ids.insert(c.id).second) throw ParameterError("duplicate realworld case id '" + c.id + "'");
        const std::size_t hist = c.history.size();
        if (hist == 0) throw ParameterError("realworld case " + c.id + ": empty history");
        const TimeGrid grid = TimeGrid::from_split_index(0.0, 1.0, hist + c.forecast.horizon(), hist - 1);
        CasePlan p{{}, TemplateId::ProbabilisticM5, {}, ProbabilisticPlot{grid, c.history, c.forecast}};
        p.record.case_id = c.id;
        p.record.experiment = ExperimentKind::RealWorld;
        p.record.group = "realworld";
        p.record.source = {{"series_id", c.id}};
        p.record.image = image_path_for(c.id);
        if (!images.insert(p.record.image).second)
            throw ParameterError("realworld ids '" + c.id + "' collide after file-name sanitizing");
        if (!c.actuals) {
            p.record.score_note = "no_actuals";
        } else {
            try {
                p.record.scores["scrps"] = scrps(*c.actuals, c.forecast);
            } catch (const UndefinedScaleError&) {
                p.record.score_note = "zero_scale";
            } catch (const ParameterError&) {
                p.record.score_note = "missing_deciles";
            }
        }
        plan.push_back(std::move(p));
    }
    (void)config;
    return plan;
}

// ---------------------------------------------------------------------------
// Runs

namespace {

void check_or_write_config(const fs::path& dir, const nlohmann::json& echo) {
    const fs::path path = dir / "config.json";
    if (fs::exists(path)) {
        std::ifstream in(path);
        nlohmann::json existing;
        try {
            existing = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(path.string() + " is not valid JSON");
        }
        if (existing != echo)
            throw ConfigError("output directory " + dir.string() + " holds a run with a different configuration");
        return;
    }
    std::ofstream out(path);
    out << echo.dump(2) << '\n';
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& config, Backend& backend, const RunOptions& options,
                          const std::vector<RealWorldCase>* realworld) {
    config.validate();
    std::vector<CasePlan> plan;
    switch (config.experiment) {
        case ExperimentKind::Perturbation: plan = plan_perturbation(config); break;
        case ExperimentKind::Promo: plan = plan_promo(config); break;
        case ExperimentKind::RealWorld: {
            if (realworld != nullptr) {
                plan = plan_realworld(config, *realworld);
            } else {
                if (config.input_path.empty()) throw ConfigError("realworld experiment needs an input file");
                plan = plan_realworld(config, read_realworld_jsonl(config.input_path));
            }
            break;
        }
    }

    const fs::path dir = config.output_dir;
    fs::create_directories(dir / "images");
    const nlohmann::json echo = config.echo();
    check_or_write_config(dir, echo);

    std::vector<CaseRecord> skeletons;
    skeletons.reserve(plan.size());
    for (const auto& p : plan) skeletons.push_back(p.record);
    write_plan(dir / "cases.jsonl", skeletons);

    RecordStore store(dir);
    RunSummary summary;
    summary.planned = plan.size();

    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        if (store.contains(plan[i].record.case_id)) ++summary.resumed;
        else todo.push_back(i);
    }

    std::atomic<std::size_t> claimed{0};
    std::atomic<std::size_t> processed{0};
    const std::size_t limit = options.stop_after.value_or(todo.size());

    parallel_for(todo.size(), config.max_parallel, [&](std::size_t k) {
        if (claimed++ >= limit) return;
        const CasePlan& p = plan[todo[k]];
        const fs::path image_path = dir / p.record.image;
        std::vector<std::uint8_t> png;
        if (fs::exists(image_path)) {
            png = read_file(image_path.string());
        } else {
            png = p.render(config.style);
            write_file(image_path.string(), png);
        }
        if (options.plan_only) return;

        const std::string prompt = p.prompt();
        CritiqueOutcome outcome = critique(backend, {p.record.case_id, prompt, png}, config.retry);
        CaseRecord rec = p.record;
        rec.retries = outcome.retries;
        if (outcome.ok()) rec.verdict = std::move(outcome.verdict);
        else rec.error = CaseError{outcome.error_kind, outcome.error_message, outcome.error_raw};
        store.append(rec);
        ++processed;
    });

    summary.processed = processed.load();
    std::set<std::string> plan_ids;
    for (const auto& p : plan) plan_ids.insert(p.record.case_id);
    std::vector<CaseRecord> records;
    for (auto& r : store.records())
        if (plan_ids.contains(r.case_id)) records.push_back(std::move(r));
    for (const auto& r : records)
        if (r.error) ++summary.errors;
    summary.complete = records.size() == plan.size();

    std::vector<std::string> order;
    if (config.experiment == ExperimentKind::Perturbation) order = config.groups;
    if (config.experiment == ExperimentKind::Promo)
        for (ScenarioKind kind : kAllScenarioKinds) order.emplace_back(scenario_name(kind));
    summary.report = build_report(config.experiment, records, echo, order, config.std_flavor);
    if (!options.plan_only) emit_report(summary.report, dir);
    return summary;
}

RunSummary run_perturbation_experiment(const ExperimentConfig& config, Backend& backend, const RunOptions& options) {
    if (config.experiment != ExperimentKind::Perturbation) throw ConfigError("config is not a perturbation experiment");
    return run_experiment(config, backend, options);
}

RunSummary run_promo_experiment(const ExperimentConfig& config, Backend& backend, const RunOptions& options) {
    if (config.experiment != ExperimentKind::Promo) throw ConfigError("config is not a promo experiment");
    return run_experiment(config, backend, options);
}

RunSummary run_realworld_experiment(const ExperimentConfig& config, Backend& backend,
                                    const std::vector<RealWorldCase>& cases, const RunOptions& options) {
    if (config.experiment != ExperimentKind::RealWorld) throw ConfigError("config is not a realworld experiment");
    return run_experiment(config, backend, options, &cases);
}

}  // namespace fcritic
