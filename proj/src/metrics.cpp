#include "corrcast/metrics.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "corrcast/error.hpp"
#include "corrcast/log.hpp"

namespace corrcast {

double mase(const Eigen::Ref<const Vector>& train, const Eigen::Ref<const Vector>& actual,
            const Eigen::Ref<const Vector>& forecast, Index m) {
    if (m < 1) throw Error("mase: seasonality must be at least 1");
    if (actual.size() != forecast.size()) throw Error("mase: actual and forecast lengths differ");
    if (actual.size() == 0) throw Error("mase: empty horizon");
    const Index n = train.size();
    if (n <= m) throw UndefinedMetric("mase: training series not longer than the seasonality");
    const double scale = (train.tail(n - m) - train.head(n - m)).cwiseAbs().mean();
    if (!(scale > 0.0)) throw UndefinedMetric("mase: in-sample seasonal naive error is zero");
    return (actual - forecast).cwiseAbs().mean() / scale;
}

double smape(const Eigen::Ref<const Vector>& actual, const Eigen::Ref<const Vector>& forecast) {
    if (actual.size() != forecast.size()) throw Error("smape: actual and forecast lengths differ");
    if (actual.size() == 0) throw Error("smape: empty horizon");
    double sum = 0.0;
    for (Index i = 0; i < actual.size(); ++i) {
        const double denom = std::abs(actual[i]) + std::abs(forecast[i]);
        if (denom > 0.0) sum += std::abs(forecast[i] - actual[i]) / denom;
    }
    return 200.0 * sum / static_cast<double>(actual.size());
}

ForecastTable naive_benchmark(const HoldoutSplit& split) {
    ForecastTable out;
    for (const auto& s : split.train) {
        auto it = split.test.find(s.id);
        if (it == split.test.end()) continue;
        out.emplace(s.id, Vector::Constant(it->second.size(), s.values[s.size() - 1]));
    }
    return out;
}

MetricReport owa_report(const ForecastTable& forecasts, const ForecastTable& benchmark,
                        const HoldoutSplit& split, Index m) {
    std::vector<std::string> missing;
    for (const auto& [id, f] : forecasts) {
        if (!split.train.find(id) || !split.test.count(id) || !benchmark.count(id)) missing.push_back(id);
    }
    if (!missing.empty()) {
        std::string list;
        for (std::size_t i = 0; i < missing.size() && i < 20; ++i) list += (i ? ", " : "") + missing[i];
        if (missing.size() > 20) list += ", ...";
        throw Error("ids without test values or benchmark forecast (" + std::to_string(missing.size()) + "): " + list);
    }
    if (forecasts.empty()) throw Error("owa_report: no series to evaluate");

    MetricReport r;
    double sum_mase = 0.0, sum_smape = 0.0, sum_bmase = 0.0, sum_bsmape = 0.0;
    std::size_t mase_count = 0;
    for (const auto& s : split.train) {
        auto f = forecasts.find(s.id);
        if (f == forecasts.end()) continue;
        const Vector& actual = split.test.at(s.id);
        const Vector& bench = benchmark.at(s.id);
        if (f->second.size() != actual.size() || bench.size() != actual.size()) {
            throw Error("forecast length for " + s.id + " does not match the test horizon " +
                        std::to_string(actual.size()));
        }
        const Index season = m > 0 ? m : default_seasonality(s.frequency);

        SeriesScore score;
        score.id = s.id;
        score.smape = smape(actual, f->second);
        score.benchmark_smape = smape(actual, bench);
        try {
            score.mase = mase(s.values, actual, f->second, season);
            score.benchmark_mase = mase(s.values, actual, bench, season);
        } catch (const UndefinedMetric& e) {
            score.mase.reset();
            score.benchmark_mase.reset();
            r.undefined_mase.push_back(s.id);
            warn("series " + s.id + ": " + e.what() + "; excluded from MASE aggregates");
        }
        sum_smape += score.smape;
        sum_bsmape += score.benchmark_smape;
        if (score.mase) {
            sum_mase += *score.mase;
            sum_bmase += *score.benchmark_mase;
            ++mase_count;
        }
        r.per_series.push_back(std::move(score));
    }

    constexpr double kInf = std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(r.per_series.size());
    r.aggregate_smape = sum_smape / n;
    r.benchmark_smape = sum_bsmape / n;
    if (mase_count > 0) {
        r.aggregate_mase = sum_mase / static_cast<double>(mase_count);
        r.benchmark_mase = sum_bmase / static_cast<double>(mase_count);
    }
    r.relative_mase = r.benchmark_mase > 0.0 ? r.aggregate_mase / r.benchmark_mase
                                             : (r.aggregate_mase > 0.0 ? kInf : 1.0);
    r.relative_smape = r.benchmark_smape > 0.0 ? r.aggregate_smape / r.benchmark_smape
                                               : (r.aggregate_smape > 0.0 ? kInf : 1.0);
    r.owa = 0.5 * (r.relative_mase + r.relative_smape);
    return r;
}

void write_report_json(std::ostream& out, const MetricReport& report) {
    nlohmann::ordered_json j;
    j["aggregate"] = {{"series", report.per_series.size()},
                      {"mase", report.aggregate_mase},
                      {"smape", report.aggregate_smape},
                      {"benchmark_mase", report.benchmark_mase},
                      {"benchmark_smape", report.benchmark_smape},
                      {"relative_mase", report.relative_mase},
                      {"relative_smape", report.relative_smape},
                      {"owa", report.owa}};
    j["undefined_mase"] = report.undefined_mase;
    auto& rows = j["per_series"] = nlohmann::ordered_json::array();
    for (const auto& s : report.per_series) {
        nlohmann::ordered_json row;
        row["id"] = s.id;
        row["mase"] = s.mase ? nlohmann::ordered_json(*s.mase) : nlohmann::ordered_json(nullptr);
        row["smape"] = s.smape;
        row["benchmark_mase"] =
            s.benchmark_mase ? nlohmann::ordered_json(*s.benchmark_mase) : nlohmann::ordered_json(nullptr);
        row["benchmark_smape"] = s.benchmark_smape;
        rows.push_back(std::move(row));
    }
    out << j.dump(2) << '\n';
}

void write_report_csv(std::ostream& out, const MetricReport& report) {
    out << "series,mase,smape,benchmark_mase,benchmark_smape,relative_mase,relative_smape,owa\n";
    out << report.per_series.size() << ',' << format_value(report.aggregate_mase) << ','
        << format_value(report.aggregate_smape) << ',' << format_value(report.benchmark_mase) << ','
        << format_value(report.benchmark_smape) << ',' << format_value(report.relative_mase) << ','
        << format_value(report.relative_smape) << ',' << format_value(report.owa) << '\n';
}

} // namespace corrcast
