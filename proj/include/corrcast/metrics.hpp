#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "corrcast/dataset.hpp"
#include "corrcast/forecast.hpp"

namespace corrcast {

/// Mean absolute error scaled by the in-sample seasonal-naive error at lag m.
/// Throws UndefinedMetric when that scale is zero.
double mase(const Eigen::Ref<const Vector>& train, const Eigen::Ref<const Vector>& actual,
            const Eigen::Ref<const Vector>& forecast, Index m);

/// Symmetric MAPE in percent, range [0, 200]. Terms with |Y| + |F| = 0 count as 0.
double smape(const Eigen::Ref<const Vector>& actual, const Eigen::Ref<const Vector>& forecast);

struct SeriesScore {
    std::string id;
    std::optional<double> mase; ///< absent when undefined
    double smape = 0.0;
    std::optional<double> benchmark_mase;
    double benchmark_smape = 0.0;
};

struct MetricReport {
    std::vector<SeriesScore> per_series;
    /// Series whose MASE (forecast or benchmark) is undefined; left out of MASE aggregates.
    std::vector<std::string> undefined_mase;
    double aggregate_mase = 0.0;
    double aggregate_smape = 0.0;
    double benchmark_mase = 0.0;
    double benchmark_smape = 0.0;
    double relative_mase = 0.0;
    double relative_smape = 0.0;
    double owa = 0.0;
};

/// Scores `forecasts` on the series of `split` they cover, against the
/// benchmark. Aggregates are means over series; relative metrics are
/// ratios of aggregates; OWA is their mean. Seasonality m <= 0 selects the
/// per-series frequency default.
MetricReport owa_report(const ForecastTable& forecasts, const ForecastTable& benchmark,
                        const HoldoutSplit& split, Index m = 0);

/// Naive (last value) forecasts for every training series.
ForecastTable naive_benchmark(const HoldoutSplit& split);

void write_report_json(std::ostream& out, const MetricReport& report);
/// Single-row aggregate summary.
void write_report_csv(std::ostream& out, const MetricReport& report);

} // namespace corrcast
