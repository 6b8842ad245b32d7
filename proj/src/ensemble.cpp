#include "corrcast/ensemble.hpp"

#include <algorithm>

#include "corrcast/error.hpp"
#include "corrcast/log.hpp"
#include "corrcast/parallel.hpp"

namespace corrcast {

Vector median_combine(const std::vector<Vector>& members) {
    if (members.empty()) throw Error("median_combine: no members");
    const Index h = members.front().size();
    for (const auto& m : members)
        if (m.size() != h) throw Error("median_combine: member forecasts differ in length");

    const std::size_t count = members.size();
    Vector out(h);
    std::vector<double> column(count);
    for (Index t = 0; t < h; ++t) {
        for (std::size_t i = 0; i < count; ++i) column[i] = members[i][t];
        std::sort(column.begin(), column.end());
        out[t] = count % 2 == 1 ? column[count / 2] : 0.5 * (column[count / 2 - 1] + column[count / 2]);
    }
    return out;
}

Forecast median_combine(const std::vector<Forecast>& members) {
    if (members.empty()) throw Error("median_combine: no members");
    std::vector<Vector> values;
    values.reserve(members.size());
    for (const auto& m : members) values.push_back(m.values);
    return {members.front().id, median_combine(values), Method::Ensemble};
}

Forecast clip_negative(Forecast f) {
    f.values = f.values.cwiseMax(0.0);
    return f;
}

void PipelineConfig::validate() const {
    if (!correlator && members.empty()) throw ConfigError("pipeline needs ensemble members when the correlator is disabled");
    if (horizon && *horizon < 1) throw ConfigError("horizon must be positive");
    if (correlator) correlator->validate();
}

PipelineResult pipeline_forecast(const Dataset& d, const PipelineConfig& cfg) {
    cfg.validate();
    PipelineResult result;

    if (cfg.correlator) {
        CorrelatorParams p = *cfg.correlator;
        if (cfg.horizon && p.horizon == 0) p.horizon = *cfg.horizon;
        result.correlator = run_correlator(d, p, cfg.threads);
    }

    std::vector<const CorrelatorMatch*> by_series(d.size(), nullptr);
    for (const auto& m : result.correlator.matches) by_series[m.target] = &m;

    result.forecasts.resize(d.size());
    parallel_for(d.size(), cfg.threads, [&](std::size_t j) {
        const TimeSeries& s = d[j];
        const Index h = cfg.horizon.value_or(s.horizon);

        if (const CorrelatorMatch* m = by_series[j]) {
            if (m->forecast.size() == h) {
                result.forecasts[j] = clip_negative({s.id, m->forecast, Method::Correlator});
                return;
            }
            warn("series " + s.id + ": correlator continuation length " + std::to_string(m->forecast.size()) +
                 " differs from horizon " + std::to_string(h) + ", using the ensemble");
        }

        std::vector<Forecast> members;
        for (const auto& member : cfg.members) {
            try {
                Forecast f = member->forecast(s, h);
                if (f.values.size() != h || !f.values.allFinite()) {
                    throw Error("produced " + std::to_string(f.values.size()) + " values or non-finite output");
                }
                members.push_back(std::move(f));
            } catch (const std::exception& e) {
                warn("series " + s.id + ": member " + member->name() + " failed (" + e.what() + "), excluded");
            }
        }
        Forecast combined;
        if (members.empty()) {
            if (!cfg.members.empty()) warn("series " + s.id + ": all ensemble members failed, using naive forecast");
            combined = {s.id, naive_forecast(s.values, h), Method::Ensemble};
        } else {
            combined = median_combine(members);
        }
        combined.method = Method::Ensemble;
        result.forecasts[j] = clip_negative(std::move(combined));
    });
    return result;
}

} // namespace corrcast
