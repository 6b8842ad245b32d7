#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "corrcast/error.hpp"

namespace corrcast {

/// Threshold below which a window's population std counts as zero.
inline double std_epsilon(double mean) { return 1e-12 * (1.0 + std::abs(mean)); }

template <typename Derived>
typename Derived::Scalar mean(const Eigen::DenseBase<Derived>& a) {
    return a.derived().sum() / static_cast<typename Derived::Scalar>(a.size());
}

/// Population standard deviation (divisor n), two-pass.
template <typename Derived>
typename Derived::Scalar population_std(const Eigen::DenseBase<Derived>& a) {
    using Scalar = typename Derived::Scalar;
    const Scalar mu = mean(a);
    return std::sqrt((a.derived().array() - mu).square().sum() / static_cast<Scalar>(a.size()));
}

inline double clamp_correlation(double r) { return std::clamp(r, -1.0, 1.0); }

/// Pearson correlation of two equal-length vectors, clamped to [-1, 1].
/// Throws UndefinedCorrelation when either input is constant.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar pearson(const Eigen::DenseBase<DerivedA>& a, const Eigen::DenseBase<DerivedB>& b) {
    using Scalar = typename DerivedA::Scalar;
    if (a.size() != b.size()) throw Error("pearson: length mismatch");
    if (a.size() < 2) throw Error("pearson: need at least two points");
    const Scalar n = static_cast<Scalar>(a.size());
    const Scalar mean_a = mean(a);
    const Scalar mean_b = mean(b);
    const auto ca = (a.derived().array() - mean_a).eval();
    const auto cb = (b.derived().array() - mean_b).eval();
    const Scalar std_a = std::sqrt(ca.square().sum() / n);
    const Scalar std_b = std::sqrt(cb.square().sum() / n);
    if (std_a <= std_epsilon(mean_a) || std_b <= std_epsilon(mean_b)) {
        throw UndefinedCorrelation("pearson: constant input");
    }
    return clamp_correlation((ca * cb).sum() / (n * std_a * std_b));
}

/// Mean and population std of every length-w window of a series.
/// Entry i describes the window starting at 0-based position i, which
/// ends at 1-based position i + w.
struct RollingStats {
    Eigen::Index window = 0;
    Eigen::VectorXd mean;
    Eigen::VectorXd std;
    Eigen::Array<bool, Eigen::Dynamic, 1> valid;

    Eigen::Index count() const { return mean.size(); }
};

/// Each window is evaluated two-pass, so results match the direct formula
/// to rounding for any magnitude (w is small for the correlator).
RollingStats rolling_stats(const Eigen::Ref<const Eigen::VectorXd>& series, Eigen::Index w);

/// A query window pre-centred and pre-scaled for repeated correlation against
/// windows of other series.
class CorrelationQuery {
public:
    /// Throws UndefinedCorrelation when the query is constant.
    explicit CorrelationQuery(const Eigen::Ref<const Eigen::VectorXd>& query);

    Eigen::Index size() const { return weights_.size(); }
    double mean() const { return mean_; }
    double std() const { return std_; }

    /// r against the window of `series` starting at 0-based `start`, whose
    /// mean and std are given. Caller guarantees the window is valid.
    double correlate(const Eigen::Ref<const Eigen::VectorXd>& series, Eigen::Index start, double window_mean,
                     double window_std) const {
        const double* x = series.data() + start;
        const double* q = weights_.data();
        double acc = 0.0;
        for (Eigen::Index i = 0; i < weights_.size(); ++i) acc += q[i] * (x[i] - window_mean);
        return clamp_correlation(acc / window_std);
    }

private:
    // (q - mean) / (w * std)
    Eigen::VectorXd weights_;
    double mean_ = 0.0;
    double std_ = 0.0;
};

struct ShiftCorrelation {
    Eigen::Index tau; ///< 1-based end position of the matched window
    double r;
};

/// Correlation of `query` against every valid window of `series`.
/// `stats` must come from rolling_stats(series, query.size()).
std::vector<ShiftCorrelation> sliding_correlations(const Eigen::Ref<const Eigen::VectorXd>& query,
                                                   const Eigen::Ref<const Eigen::VectorXd>& series,
                                                   const RollingStats& stats);

} // namespace corrcast
