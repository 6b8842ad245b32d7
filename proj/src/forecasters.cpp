#include "corrcast/forecasters.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "corrcast/error.hpp"
#include "corrcast/log.hpp"
#include "corrcast/metrics.hpp"
#include "csv.hpp"

namespace corrcast {

Vector naive_forecast(const Eigen::Ref<const Vector>& y, Index h) {
    if (y.size() == 0) throw Error("naive forecast of an empty series");
    return Vector::Constant(h, y[y.size() - 1]);
}

SesFit ses_fit(const Eigen::Ref<const Vector>& y, double alpha) {
    if (y.size() == 0) throw Error("exponential smoothing of an empty series");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("smoothing weight must lie in (0, 1]");
    SesFit fit;
    fit.alpha = alpha;
    double level = y[0];
    double sse = 0.0;
    for (Index t = 1; t < y.size(); ++t) {
        const double e = y[t] - level;
        sse += e * e;
        level = alpha * y[t] + (1.0 - alpha) * level;
    }
    fit.level = level;
    fit.sse = sse;
    return fit;
}

SesFit ses_fit_auto(const Eigen::Ref<const Vector>& y) {
    SesFit best = ses_fit(y, 0.05);
    for (int k = 2; k <= 19; ++k) {
        SesFit fit = ses_fit(y, k / 20.0);
        if (fit.sse < best.sse) best = fit;
    }
    return best;
}

Vector ses_forecast(const Eigen::Ref<const Vector>& y, Index h, double alpha) {
    return Vector::Constant(h, ses_fit(y, alpha).level);
}

Vector ses_forecast(const Eigen::Ref<const Vector>& y, Index h) {
    return Vector::Constant(h, ses_fit_auto(y).level);
}

Decomposition decompose_classical(const Eigen::Ref<const Vector>& y) {
    const Index n = y.size();
    if (n < 4) throw Error("classical decomposition needs at least 4 values");
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();

    Decomposition dec;
    dec.first_defined = 1;
    dec.last_defined = n - 2;
    dec.trend = Vector::Constant(n, nan);
    dec.trend.segment(1, n - 2) =
        0.25 * y.head(n - 2) + 0.5 * y.segment(1, n - 2) + 0.25 * y.tail(n - 2);

    std::array<double, 2> phase_sum{0.0, 0.0};
    std::array<int, 2> phase_count{0, 0};
    for (Index i = 1; i <= n - 2; ++i) {
        phase_sum[i % 2] += y[i] - dec.trend[i];
        ++phase_count[i % 2];
    }
    std::array<double, 2> phase{phase_sum[0] / phase_count[0], phase_sum[1] / phase_count[1]};
    const double centre = 0.5 * (phase[0] + phase[1]);
    phase[0] -= centre;
    phase[1] -= centre;

    dec.seasonal.resize(n);
    for (Index i = 0; i < n; ++i) dec.seasonal[i] = phase[i % 2];
    dec.residual = y - dec.trend - dec.seasonal;
    return dec;
}

Vector linear_extrapolate(const Eigen::Ref<const Vector>& tail, Index h, Index gap) {
    const Index w = tail.size();
    if (w < 2) throw Error("linear extrapolation needs at least two values");
    const Vector x = Vector::LinSpaced(w, 1.0, static_cast<double>(w));
    const double x_mean = x.mean();
    const double y_mean = tail.mean();
    const Vector xc = x.array() - x_mean;
    const double slope = xc.dot(tail) / xc.squaredNorm();
    const Vector at = Vector::LinSpaced(h, static_cast<double>(w + gap + 1), static_cast<double>(w + gap + h));
    return ((at.array() - x_mean) * slope + y_mean).matrix();
}

namespace {

Vector tile(const Eigen::Ref<const Vector>& block, Index h) {
    Vector out(h);
    for (Index t = 0; t < h; ++t) out[t] = block[t % block.size()];
    return out;
}

Vector component_forecast(const Decomposition& dec, const Vector& component, ComponentStrategy strategy,
                          Index h, Index window) {
    const Index defined = dec.last_defined - dec.first_defined + 1;
    const Index len = std::min(window, defined);
    const Vector tail = component.segment(dec.last_defined - len + 1, len);
    const Index gap = component.size() - 1 - dec.last_defined;
    if (strategy == ComponentStrategy::Linear) return linear_extrapolate(tail, h, gap);
    return tile(tail, h);
}

Vector decomposition_forecast(const Eigen::Ref<const Vector>& y, Index h, ComponentStrategy trend,
                              ComponentStrategy residual, Index window) {
    const Decomposition dec = decompose_classical(y);
    const Index n = y.size();
    // seasonal naive: same phase one period back
    Vector seasonal(h);
    for (Index t = 0; t < h; ++t) seasonal[t] = dec.seasonal[n - 2 + t % 2];
    return component_forecast(dec, dec.trend, trend, h, window) +
           component_forecast(dec, dec.residual, residual, h, window) + seasonal;
}

} // namespace

CustomForecast custom_forecast(const Eigen::Ref<const Vector>& y, Index h, Index window) {
    if (h < 1) throw Error("custom forecast needs a positive horizon");
    CustomForecast out;
    if (y.size() < 2 * h + 4) {
        warn("custom method: series of length " + std::to_string(y.size()) + " too short for horizon " +
             std::to_string(h) + ", using naive forecast");
        out.values = naive_forecast(y, h);
        out.fell_back = true;
        return out;
    }

    const Index inner = y.size() - h;
    const Vector train = y.head(inner);
    const Vector valid = y.tail(h);
    double best = std::numeric_limits<double>::infinity();
    for (auto trend : {ComponentStrategy::Linear, ComponentStrategy::Repeat}) {
        for (auto residual : {ComponentStrategy::Linear, ComponentStrategy::Repeat}) {
            const Vector f = decomposition_forecast(train, h, trend, residual, window);
            double score = 0.0;
            try {
                score = mase(train, valid, f, 1);
            } catch (const UndefinedMetric&) {
                // constant training part: the MASE scale is shared, so MAE ranks the same
                score = (valid - f).cwiseAbs().mean();
            }
            if (score < best) {
                best = score;
                out.trend = trend;
                out.residual = residual;
            }
        }
    }
    out.values = decomposition_forecast(y, h, out.trend, out.residual, window);
    return out;
}

Forecast NaiveForecaster::forecast(const TimeSeries& series, Index h) const {
    return {series.id, naive_forecast(series.values, h), Method::Naive};
}

Forecast SesForecaster::forecast(const TimeSeries& series, Index h) const {
    Vector v = alpha_ ? ses_forecast(series.values, h, *alpha_) : ses_forecast(series.values, h);
    return {series.id, std::move(v), Method::SES};
}

Forecast CustomForecaster::forecast(const TimeSeries& series, Index h) const {
    return {series.id, custom_forecast(series.values, h).values, Method::Custom};
}

ExternalForecaster::ExternalForecaster(std::string name, ForecastTable table)
    : name_(std::move(name)), table_(std::move(table)) {}

std::shared_ptr<ExternalForecaster> ExternalForecaster::from_file(const std::filesystem::path& path) {
    return std::make_shared<ExternalForecaster>(path.stem().string(), read_forecast_csv(path));
}

Forecast ExternalForecaster::forecast(const TimeSeries& series, Index h) const {
    auto it = table_.find(series.id);
    if (it == table_.end()) throw Error(name_ + ": no forecast for " + series.id);
    if (it->second.size() < h) {
        throw Error(name_ + ": forecast for " + series.id + " has " + std::to_string(it->second.size()) +
                    " values, horizon is " + std::to_string(h));
    }
    return {series.id, it->second.head(h), Method::External};
}

std::shared_ptr<const Forecaster> make_builtin_forecaster(std::string_view spec) {
    auto text = detail::lower(detail::trim(spec));
    if (text == "naive") return std::make_shared<NaiveForecaster>();
    if (text == "ses") return std::make_shared<SesForecaster>();
    if (text == "custom") return std::make_shared<CustomForecaster>();
    if (text.rfind("ses:", 0) == 0) {
        auto alpha = detail::parse_double(std::string_view(text).substr(4));
        if (!alpha || !(*alpha > 0.0 && *alpha <= 1.0)) {
            throw ConfigError("invalid smoothing weight in member '" + std::string(spec) + "'");
        }
        return std::make_shared<SesForecaster>(*alpha);
    }
    throw ConfigError("unknown ensemble member '" + std::string(spec) + "' (valid: naive, ses, ses:<alpha>, custom)");
}

} // namespace corrcast
