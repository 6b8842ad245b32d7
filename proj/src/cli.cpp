#include "corrcast/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "corrcast/analysis.hpp"
#include "corrcast/ensemble.hpp"
#include "corrcast/error.hpp"
#include "corrcast/log.hpp"
#include "corrcast/metrics.hpp"
#include "corrcast/parallel.hpp"
#include "csv.hpp"

namespace corrcast::cli {

namespace {

/// Missing or inconsistent command-line input; maps to exit code 2.
class UsageError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

const std::filesystem::path& require(const std::optional<std::filesystem::path>& p, const char* flag) {
    if (!p) throw UsageError(std::string("missing required input: ") + flag);
    return *p;
}

bool parse_bool(const std::string& key, const std::string& value) {
    auto v = detail::lower(detail::trim(value));
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config key " + key + ": expected a boolean, got '" + value + "'");
}

double parse_real(const std::string& key, const std::string& value) {
    auto v = detail::parse_double(value);
    if (!v) throw ConfigError("config key " + key + ": expected a number, got '" + value + "'");
    return *v;
}

Index parse_index(const std::string& key, const std::string& value) {
    auto v = detail::parse_int(value);
    if (!v) throw ConfigError("config key " + key + ": expected an integer, got '" + value + "'");
    return static_cast<Index>(*v);
}

std::optional<double> parse_ratio(const std::string& key, const std::string& value) {
    auto v = detail::lower(detail::trim(value));
    if (v == "none" || v == "off" || v == "-" || v == "disabled") return std::nullopt;
    return parse_real(key, value);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    for (auto& cell : detail::split_csv_line(value))
        if (!cell.empty()) out.push_back(cell);
    return out;
}

std::string timestamp_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream f(dir / name);
    if (!f) throw Error("cannot write " + (dir / name).string());
    return f;
}

Dataset load_dataset(const RunConfig& cfg) {
    Dataset d = load_m4_values(require(cfg.data, "--data"));
    if (cfg.info) d.attach_meta(load_m4_info(*cfg.info));
    return d;
}

PipelineConfig make_pipeline(const RunConfig& cfg) {
    PipelineConfig p;
    if (cfg.correlator_enabled) p.correlator = cfg.correlator;
    else p.correlator.reset();
    for (const auto& m : cfg.members) p.members.push_back(make_builtin_forecaster(m));
    for (const auto& path : cfg.external_forecast_paths) p.members.push_back(ExternalForecaster::from_file(path));
    p.horizon = cfg.horizon;
    p.threads = cfg.threads;
    return p;
}

std::map<std::string, Vector> test_values(const std::filesystem::path& path) {
    std::map<std::string, Vector> out;
    for (const auto& s : load_m4_values(path)) out.emplace(s.id, s.values);
    return out;
}

std::string id_list(const std::vector<std::string>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size() && i < 20; ++i) s += (i ? ", " : "") + ids[i];
    if (ids.size() > 20) s += ", ... (" + std::to_string(ids.size()) + " total)";
    return s;
}

void print_summary(std::ostream& out, const MetricReport& r) {
    out << "series " << r.per_series.size() << "  MASE " << format_value(r.aggregate_mase) << "  sMAPE "
        << format_value(r.aggregate_smape) << "  OWA " << format_value(r.owa) << '\n';
}

void write_report(const RunConfig& cfg, const MetricReport& report) {
    auto json = open_output(cfg.out, "report.json");
    write_report_json(json, report);
    auto csv = open_output(cfg.out, "report.csv");
    write_report_csv(csv, report);
}

void write_forecast_outputs(const RunConfig& cfg, const PipelineResult& result) {
    auto f = open_output(cfg.out, "forecasts.csv");
    write_forecast_csv(f, result.forecasts);
    auto p = open_output(cfg.out, "provenance.csv");
    write_provenance_csv(p, result.forecasts);
    auto m = open_output(cfg.out, "matches.csv");
    write_match_csv(m, result.correlator);
}

} // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "data",        "info",          "out",       "test",       "forecasts",      "provenance",
        "benchmark",   "exclusions",    "correlator", "window",    "horizon",        "r_threshold",
        "std_ratio",   "bug1",          "bug2",      "past_only",  "include_self",   "members",
        "external_forecast_paths",      "seasonality", "threads",  "audit_threshold", "bin_width",
        "edge",        "r_thresholds",  "std_ratios", "only_method", "no_timestamp"};
    return keys;
}

void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "data") cfg.data = value;
    else if (key == "info") cfg.info = value;
    else if (key == "out") cfg.out = value;
    else if (key == "test") cfg.test = value;
    else if (key == "forecasts") cfg.forecasts = value;
    else if (key == "provenance") cfg.provenance = value;
    else if (key == "benchmark") cfg.benchmark = value;
    else if (key == "exclusions") cfg.exclusions = value;
    else if (key == "correlator") cfg.correlator_enabled = parse_bool(key, value);
    else if (key == "window") cfg.correlator.window = parse_index(key, value);
    else if (key == "horizon") cfg.horizon = parse_index(key, value);
    else if (key == "r_threshold") cfg.correlator.r_threshold = parse_real(key, value);
    else if (key == "std_ratio") cfg.correlator.std_ratio = parse_ratio(key, value);
    else if (key == "bug1") cfg.correlator.bug1 = parse_bool(key, value);
    else if (key == "bug2") cfg.correlator.bug2 = parse_bool(key, value);
    else if (key == "past_only") cfg.correlator.past_only = parse_bool(key, value);
    else if (key == "include_self") cfg.correlator.include_self = parse_bool(key, value);
    else if (key == "members") cfg.members = split_list(value);
    else if (key == "external_forecast_paths") {
        cfg.external_forecast_paths.clear();
        for (auto& p : split_list(value)) cfg.external_forecast_paths.emplace_back(p);
    } else if (key == "seasonality") cfg.seasonality = parse_index(key, value);
    else if (key == "threads") cfg.threads = static_cast<unsigned>(parse_index(key, value));
    else if (key == "audit_threshold") cfg.audit_threshold = parse_real(key, value);
    else if (key == "bin_width") cfg.bin_width = parse_index(key, value);
    else if (key == "edge") cfg.edge = parse_index(key, value);
    else if (key == "r_thresholds") {
        cfg.r_thresholds.clear();
        for (auto& v : split_list(value)) cfg.r_thresholds.push_back(parse_real(key, v));
    } else if (key == "std_ratios") {
        cfg.std_ratios.clear();
        for (auto& v : split_list(value)) cfg.std_ratios.push_back(parse_ratio(key, v));
    } else if (key == "only_method") {
        auto m = parse_method(value);
        if (!m) throw ConfigError("config key only_method: unknown method '" + value + "'");
        cfg.only_method = m;
    } else if (key == "no_timestamp") cfg.no_timestamp = parse_bool(key, value);
    else {
        std::string valid;
        for (const auto& k : config_keys()) valid += (valid.empty() ? "" : ", ") + k;
        throw ConfigError("unknown config key '" + key + "'; valid keys: " + valid);
    }
}

void apply_config_text(RunConfig& cfg, std::istream& in, const std::string& source) {
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto text = detail::trim(line);
        if (text.empty()) continue;
        auto eq = text.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(source + ":" + std::to_string(row) + ": expected 'key = value'");
        }
        apply_config_value(cfg, std::string(detail::trim(text.substr(0, eq))),
                           std::string(detail::trim(text.substr(eq + 1))));
    }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path.string());
    apply_config_text(cfg, in, path.string());
}

int cmd_forecast(const RunConfig& cfg, std::ostream& out) {
    const Dataset d = load_dataset(cfg);
    const PipelineResult result = pipeline_forecast(d, make_pipeline(cfg));
    write_forecast_outputs(cfg, result);
    out << "forecast " << d.size() << " series, correlator used on " << result.correlator.size() << '\n';
    return kOk;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
    HoldoutSplit split;
    split.train = load_dataset(cfg);
    split.test = test_values(require(cfg.test, "--test"));
    ForecastTable forecasts = read_forecast_csv(require(cfg.forecasts, "--forecasts"));

    if (cfg.only_method) {
        const auto prov = read_provenance_csv(require(cfg.provenance, "--provenance"));
        std::erase_if(forecasts, [&](const auto& kv) {
            auto it = prov.find(kv.first);
            return it == prov.end() || it->second != *cfg.only_method;
        });
    } else {
        std::vector<std::string> missing;
        for (const auto& [id, v] : split.test)
            if (!forecasts.count(id)) missing.push_back(id);
        if (!missing.empty()) throw Error("test ids without a forecast: " + id_list(missing));
    }
    std::vector<std::string> unknown;
    for (const auto& [id, v] : forecasts)
        if (!split.test.count(id)) unknown.push_back(id);
    if (!unknown.empty()) throw Error("forecast ids missing from the test set: " + id_list(unknown));

    const ForecastTable benchmark = cfg.benchmark ? read_forecast_csv(*cfg.benchmark) : naive_benchmark(split);
    const MetricReport report = owa_report(forecasts, benchmark, split, cfg.seasonality);
    write_report(cfg, report);
    print_summary(out, report);
    return kOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    if (cfg.r_thresholds.empty() || cfg.std_ratios.empty()) throw UsageError("sweep needs non-empty r_thresholds and std_ratios grids");
    HoldoutSplit split;
    split.train = load_dataset(cfg);
    split.test = test_values(require(cfg.test, "--test"));
    const Dataset& d = split.train;

    struct Cell {
        CorrelatorParams params;
        std::vector<std::optional<Vector>> forecasts;
    };
    std::vector<Cell> cells;
    for (double thr : cfg.r_thresholds) {
        for (const auto& ratio : cfg.std_ratios) {
            Cell c;
            c.params = cfg.correlator;
            c.params.r_threshold = thr;
            c.params.std_ratio = ratio;
            if (cfg.horizon && c.params.horizon == 0) c.params.horizon = *cfg.horizon;
            c.params.validate();
            c.forecasts.resize(d.size());
            cells.push_back(std::move(c));
        }
    }

    CorrelatorParams scan = cfg.correlator;
    scan.r_threshold = *std::min_element(cfg.r_thresholds.begin(), cfg.r_thresholds.end());
    if (cfg.horizon && scan.horizon == 0) scan.horizon = *cfg.horizon;
    scan.validate();
    const CorrelatorIndex index(d, scan.window, cfg.threads);
    parallel_for(d.size(), cfg.threads, [&](std::size_t j) {
        if (scan.bug1 && j >= scan.bug1_cutoff) return;
        const auto stream = candidate_stream(j, d, index, scan);
        for (auto& c : cells) {
            if (auto m = select_candidate(j, d, index, c.params, stream)) {
                c.forecasts[j] = m->forecast.cwiseMax(0.0);
            }
        }
    });

    const ForecastTable all_naive = naive_benchmark(split);
    auto csv = open_output(cfg.out, "sweep.csv");
    csv << "r_threshold,std_ratio,accepted,accepted_pct,mase,smape,owa\n";
    for (const auto& c : cells) {
        ForecastTable subset;
        for (std::size_t j = 0; j < d.size(); ++j)
            if (c.forecasts[j]) subset.emplace(d[j].id, *c.forecasts[j]);
        const double pct = d.empty() ? 0.0 : 100.0 * static_cast<double>(subset.size()) / static_cast<double>(d.size());
        csv << format_value(c.params.r_threshold) << ','
            << (c.params.std_ratio ? format_value(*c.params.std_ratio) : std::string("none")) << ','
            << subset.size() << ',' << format_value(pct);
        if (subset.empty()) {
            csv << ",,,\n";
        } else {
            const MetricReport r = owa_report(subset, all_naive, split, cfg.seasonality);
            csv << ',' << format_value(r.aggregate_mase) << ',' << format_value(r.aggregate_smape) << ','
                << format_value(r.owa) << '\n';
        }
    }
    out << "sweep: " << cells.size() << " settings written to " << (cfg.out / "sweep.csv").string() << '\n';
    return kOk;
}

int cmd_audit(const RunConfig& cfg, std::ostream& out) {
    const Dataset d = load_dataset(cfg);
    GlobalScanOptions opts;
    opts.edge = cfg.edge;
    opts.threads = cfg.threads;
    const auto best = best_global_matches(d, opts);

    LeakageReport report;
    report.threshold = cfg.audit_threshold;
    report.before_exclusions = filter_matches(best, d, cfg.audit_threshold).size();
    const ExclusionList exclusions = cfg.exclusions ? load_exclusions(*cfg.exclusions) : ExclusionList{};
    report.set_c = filter_matches(best, d, cfg.audit_threshold, exclusions);
    report.categories = categorize(report.set_c, d);
    report.histogram = overlap_histogram(report.set_c, cfg.bin_width);
    if (d.has_dates() && cfg.correlator_enabled) {
        report.future_use_fraction = future_use_stats(run_correlator(d, cfg.correlator, cfg.threads), d);
    } else if (!d.has_dates()) {
        warn("no start dates available: T3/T4 reported as date_unknown and future-use fraction omitted");
    }

    auto m = open_output(cfg.out, "audit_matches.csv");
    write_matches_csv(m, report, d);
    auto h = open_output(cfg.out, "audit_histogram.csv");
    write_histogram_csv(h, report.histogram);
    auto s = open_output(cfg.out, "audit_summary.json");
    write_summary_json(s, report, cfg.no_timestamp ? std::nullopt : std::optional<std::string>(timestamp_now()));

    const auto counts = report.category_counts();
    out << "audit: " << report.before_exclusions << " matches >= " << format_value(cfg.audit_threshold) << ", |C| = "
        << report.set_c.size() << " (T1 " << counts[0] << ", T2 " << counts[1] << ", T3 " << counts[2] << ", T4 "
        << counts[3] << ", date unknown " << counts[4] << ")\n";
    return kOk;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
    const Dataset d = load_dataset(cfg);
    if (d.empty()) throw Error("dataset is empty");
    const Index h = cfg.horizon.value_or(d[0].horizon);
    const HoldoutSplit split = holdout_split(d, h);

    PipelineConfig p = make_pipeline(cfg);
    p.horizon = h;
    const PipelineResult result = pipeline_forecast(split.train, p);
    write_forecast_outputs(cfg, result);

    const MetricReport report = owa_report(to_table(result.forecasts), naive_benchmark(split), split, cfg.seasonality);
    write_report(cfg, report);
    out << "validate: holdout " << h << ", correlator used on " << result.correlator.size() << ", ";
    print_summary(out, report);
    return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Correlator forecasting and dataset leakage audit toolkit", "corrcast"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::string> config_path, data, info, out_dir, test, forecasts, provenance, benchmark, exclusions,
        std_ratio, members, external, only_method;
    std::optional<Index> window, horizon, seasonality, bin_width;
    std::optional<double> r_threshold, audit_threshold;
    std::optional<unsigned> threads;
    bool bug1 = false, bug2 = false, past_only = false, no_timestamp = false, no_correlator = false;

    app.add_option("--config", config_path, "key = value run configuration file");
    app.add_option("--data", data, "M4 values CSV (training part)");
    app.add_option("--info", info, "M4 info CSV with horizons and start dates");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--test", test, "M4 values CSV with the actual future values");
    app.add_option("--forecasts", forecasts, "forecast CSV to evaluate");
    app.add_option("--provenance", provenance, "provenance CSV written by forecast");
    app.add_option("--only-method", only_method, "evaluate only series whose provenance is this method");
    app.add_option("--benchmark", benchmark, "benchmark forecast CSV (default: naive)");
    app.add_option("--exclusions", exclusions, "CSV of (j, k) id pairs excluded from the audit");
    app.add_option("--threads", threads, "worker threads (0 = all cores)");
    app.add_option("--window", window, "correlator window length");
    app.add_option("--horizon", horizon, "forecast horizon for every series");
    app.add_option("--r-threshold", r_threshold, "minimum correlation for a correlator match");
    app.add_option("--std-ratio", std_ratio, "forecast std ratio limit, or 'none'");
    app.add_option("--members", members, "comma-separated ensemble members (naive, ses, ses:<alpha>, custom)");
    app.add_option("--external", external, "comma-separated forecast CSVs used as extra ensemble members");
    app.add_option("--seasonality", seasonality, "MASE seasonality (0 = per-frequency default)");
    app.add_option("--audit-threshold", audit_threshold, "minimum global correlation for the audit");
    app.add_option("--bin-width", bin_width, "overlap histogram bin width");
    app.add_flag("--bug1", bug1, "reproduce the first-2138-series defect");
    app.add_flag("--bug2", bug2, "reproduce the source-window std defect");
    app.add_flag("--past-only", past_only, "forbid correlator sources from the target's future");
    app.add_flag("--no-correlator", no_correlator, "ensemble only");
    app.add_flag("--no-timestamp", no_timestamp, "omit the timestamp from summary JSON");

    app.add_subcommand("forecast", "run the forecasting pipeline");
    app.add_subcommand("evaluate", "score forecasts with MASE, sMAPE and OWA");
    app.add_subcommand("sweep", "correlator threshold / std-ratio grid");
    app.add_subcommand("audit", "global cross-correlation leakage audit");
    app.add_subcommand("validate", "holdout split, forecast and evaluate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }

    RunConfig cfg;
    try {
        cfg.command = app.get_subcommands().front()->get_name();
        if (config_path) apply_config_file(cfg, *config_path);
        auto set = [&](const char* key, const std::optional<std::string>& v) {
            if (v) apply_config_value(cfg, key, *v);
        };
        set("data", data);
        set("info", info);
        set("out", out_dir);
        set("test", test);
        set("forecasts", forecasts);
        set("provenance", provenance);
        set("only_method", only_method);
        set("benchmark", benchmark);
        set("exclusions", exclusions);
        set("std_ratio", std_ratio);
        set("members", members);
        set("external_forecast_paths", external);
        if (threads) cfg.threads = *threads;
        if (window) cfg.correlator.window = *window;
        if (horizon) cfg.horizon = *horizon;
        if (r_threshold) cfg.correlator.r_threshold = *r_threshold;
        if (seasonality) cfg.seasonality = *seasonality;
        if (audit_threshold) cfg.audit_threshold = *audit_threshold;
        if (bin_width) cfg.bin_width = *bin_width;
        if (bug1) cfg.correlator.bug1 = true;
        if (bug2) cfg.correlator.bug2 = true;
        if (past_only) cfg.correlator.past_only = true;
        if (no_correlator) cfg.correlator_enabled = false;
        if (no_timestamp) cfg.no_timestamp = true;
        cfg.correlator.validate();
        if (cfg.horizon && *cfg.horizon < 1) throw ConfigError("horizon must be positive");
        if (cfg.only_method && !cfg.provenance) throw UsageError("--only-method needs --provenance");
        if (!cfg.data) throw UsageError("missing required input: --data");
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }

    try {
        if (cfg.command == "forecast") return cmd_forecast(cfg, out);
        if (cfg.command == "evaluate") return cmd_evaluate(cfg, out);
        if (cfg.command == "sweep") return cmd_sweep(cfg, out);
        if (cfg.command == "audit") return cmd_audit(cfg, out);
        return cmd_validate(cfg, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
}

} // namespace corrcast::cli
