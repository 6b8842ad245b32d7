#include "corrcast/stats.hpp"

#include <string>

namespace corrcast {

RollingStats rolling_stats(const Eigen::Ref<const Eigen::VectorXd>& series, Eigen::Index w) {
    if (w < 1) throw Error("rolling_stats: window must be positive");
    if (series.size() < w) {
        throw Error("rolling_stats: series of length " + std::to_string(series.size()) +
                    " is shorter than the window " + std::to_string(w));
    }
    const Eigen::Index count = series.size() - w + 1;
    RollingStats out;
    out.window = w;
    out.mean.resize(count);
    out.std.resize(count);
    out.valid.resize(count);
    const double inv_w = 1.0 / static_cast<double>(w);
    const double* x = series.data();
    for (Eigen::Index i = 0; i < count; ++i) {
        double sum = 0.0;
        for (Eigen::Index t = 0; t < w; ++t) sum += x[i + t];
        const double mu = sum * inv_w;
        double ss = 0.0;
        for (Eigen::Index t = 0; t < w; ++t) {
            const double dev = x[i + t] - mu;
            ss += dev * dev;
        }
        const double sd = std::sqrt(ss * inv_w);
        out.mean[i] = mu;
        out.std[i] = sd;
        out.valid[i] = sd > std_epsilon(mu);
    }
    return out;
}

CorrelationQuery::CorrelationQuery(const Eigen::Ref<const Eigen::VectorXd>& query) {
    if (query.size() < 2) throw Error("correlation query needs at least two points");
    mean_ = corrcast::mean(query);
    std_ = population_std(query);
    if (std_ <= std_epsilon(mean_)) throw UndefinedCorrelation("correlation query is constant");
    weights_ = (query.array() - mean_) / (static_cast<double>(query.size()) * std_);
}

std::vector<ShiftCorrelation> sliding_correlations(const Eigen::Ref<const Eigen::VectorXd>& query,
                                                   const Eigen::Ref<const Eigen::VectorXd>& series,
                                                   const RollingStats& stats) {
    CorrelationQuery q(query);
    if (stats.window != q.size() || stats.count() != series.size() - q.size() + 1) {
        throw Error("sliding_correlations: rolling stats do not match the query window and series");
    }
    std::vector<ShiftCorrelation> out;
    out.reserve(static_cast<std::size_t>(stats.count()));
    for (Eigen::Index i = 0; i < stats.count(); ++i) {
        if (!stats.valid[i]) continue;
        out.push_back({i + q.size(), q.correlate(series, i, stats.mean[i], stats.std[i])});
    }
    return out;
}

} // namespace corrcast
