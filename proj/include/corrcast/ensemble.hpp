#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "corrcast/correlator.hpp"
#include "corrcast/forecast.hpp"
#include "corrcast/forecasters.hpp"

namespace corrcast {

/// Pointwise median; even counts take the midpoint of the two central values.
Vector median_combine(const std::vector<Vector>& members);
Forecast median_combine(const std::vector<Forecast>& members);

/// max(value, 0) pointwise.
Forecast clip_negative(Forecast f);

struct PipelineConfig {
    /// Absent disables the correlator.
    std::optional<CorrelatorParams> correlator = CorrelatorParams{};
    std::vector<std::shared_ptr<const Forecaster>> members;
    /// Fixed horizon for every series; absent uses each series' own horizon.
    std::optional<Index> horizon;
    unsigned threads = 1;

    void validate() const;
};

struct PipelineResult {
    /// One forecast per input series, in file order, tagged Correlator or Ensemble.
    std::vector<Forecast> forecasts;
    CorrelatorRun correlator;
};

/// Correlator forecast where one is accepted, median of the members
/// elsewhere, negative values clipped last.
PipelineResult pipeline_forecast(const Dataset& d, const PipelineConfig& cfg);

} // namespace corrcast
