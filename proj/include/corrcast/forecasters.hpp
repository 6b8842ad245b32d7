#pragma once

#include <memory>
#include <string>

#include "corrcast/dataset.hpp"
#include "corrcast/forecast.hpp"

namespace corrcast {

/// h copies of the last value.
Vector naive_forecast(const Eigen::Ref<const Vector>& y, Index h);

struct SesFit {
    double alpha = 1.0;
    double level = 0.0; ///< final level
    double sse = 0.0;   ///< in-sample one-step squared error
};

/// Level recursion l_t = alpha * y_t + (1 - alpha) * l_{t-1}, l_1 = y_1.
SesFit ses_fit(const Eigen::Ref<const Vector>& y, double alpha);
/// Grid search over alpha in {0.05, 0.10, ..., 0.95}; ties keep the smaller alpha.
SesFit ses_fit_auto(const Eigen::Ref<const Vector>& y);

Vector ses_forecast(const Eigen::Ref<const Vector>& y, Index h, double alpha);
Vector ses_forecast(const Eigen::Ref<const Vector>& y, Index h);

/// Classical additive decomposition with period 2. Trend and residual are NaN
/// at the first and last position.
struct Decomposition {
    Vector trend;
    Vector seasonal;
    Vector residual;
    Index first_defined = 1;
    Index last_defined = 0; ///< inclusive
};

Decomposition decompose_classical(const Eigen::Ref<const Vector>& y);

/// Least-squares line through (1, tail_1) ... (w, tail_w), evaluated at
/// w + gap + 1 ... w + gap + h. `gap` skips positions between the tail and
/// the first forecast point.
Vector linear_extrapolate(const Eigen::Ref<const Vector>& tail, Index h, Index gap = 0);

enum class ComponentStrategy { Linear, Repeat };

struct CustomForecast {
    Vector values;
    ComponentStrategy trend = ComponentStrategy::Linear;
    ComponentStrategy residual = ComponentStrategy::Linear;
    bool fell_back = false; ///< series too short, naive used instead
};

/// Decomposition-based method: trend and residual are each forecast by
/// linear extrapolation or by repeating their last `window` defined values;
/// the combination with the lowest MASE on an internal holdout of the last h
/// points is refit on the full series. Seasonal part is seasonal-naive.
CustomForecast custom_forecast(const Eigen::Ref<const Vector>& y, Index h, Index window = 14);

/// Uniform forecaster interface used by the ensemble.
class Forecaster {
public:
    virtual ~Forecaster() = default;
    virtual std::string name() const = 0;
    virtual Method method() const = 0;
    /// Throws on failure; the ensemble excludes failing members per series.
    virtual Forecast forecast(const TimeSeries& series, Index h) const = 0;
};

class NaiveForecaster final : public Forecaster {
public:
    std::string name() const override { return "naive"; }
    Method method() const override { return Method::Naive; }
    Forecast forecast(const TimeSeries& series, Index h) const override;
};

class SesForecaster final : public Forecaster {
public:
    SesForecaster() = default;
    explicit SesForecaster(double alpha) : alpha_(alpha) {}
    std::string name() const override { return "ses"; }
    Method method() const override { return Method::SES; }
    Forecast forecast(const TimeSeries& series, Index h) const override;

private:
    std::optional<double> alpha_;
};

class CustomForecaster final : public Forecaster {
public:
    std::string name() const override { return "custom"; }
    Method method() const override { return Method::Custom; }
    Forecast forecast(const TimeSeries& series, Index h) const override;
};

/// Forecasts read from a forecast CSV produced elsewhere.
class ExternalForecaster final : public Forecaster {
public:
    ExternalForecaster(std::string name, ForecastTable table);
    static std::shared_ptr<ExternalForecaster> from_file(const std::filesystem::path& path);

    std::string name() const override { return name_; }
    Method method() const override { return Method::External; }
    Forecast forecast(const TimeSeries& series, Index h) const override;

private:
    std::string name_;
    ForecastTable table_;
};

/// Builds a built-in forecaster from "naive", "ses", "ses:<alpha>" or "custom".
std::shared_ptr<const Forecaster> make_builtin_forecaster(std::string_view spec);

} // namespace corrcast
