#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "corrcast/dataset.hpp"
#include "corrcast/stats.hpp"

namespace corrcast {

struct CorrelatorParams {
    Index window = 14;
    /// Length of the copied continuation; 0 means equal to `window`.
    Index horizon = 0;
    double r_threshold = 0.9999;
    /// Forecast std must not exceed std_ratio times the reference std. Absent disables the check.
    std::optional<double> std_ratio = 2.5;
    /// Submission defect: only targets at file positions 1..bug1_cutoff are forecast.
    bool bug1 = false;
    /// Submission defect: the std check uses the source window instead of the target tail.
    bool bug2 = false;
    /// Skip candidates whose source window reaches the target's forecast dates.
    bool past_only = false;
    /// Whether the target's own non-terminal windows are candidates.
    bool include_self = true;
    std::size_t bug1_cutoff = 2138;

    Index continuation() const { return horizon > 0 ? horizon : window; }

    /// Throws ConfigError on out-of-range values.
    void validate() const;
};

/// One (source, window end) pair from the candidate scan.
struct Candidate {
    std::size_t source;
    Index tau; ///< 1-based end position of the source window
    double r;
};

struct CorrelatorMatch {
    std::size_t target = 0;
    std::size_t source = 0;
    std::string target_id;
    std::string source_id;
    Index tau = 0;
    double r = 0.0;
    Vector forecast;
    std::optional<Date> source_first_date;
    std::optional<Date> source_last_date;
    /// True iff the source window holds a date on or after the target's first forecast date.
    std::optional<bool> used_future;
};

/// Rolling window statistics for every series, built once per window length
/// and shared read-only by all targets.
class CorrelatorIndex {
public:
    CorrelatorIndex(const Dataset& d, Index window, unsigned threads = 1);

    Index window() const { return window_; }
    const RollingStats& stats(std::size_t k) const { return stats_[k]; }
    bool usable(std::size_t k) const { return stats_[k].count() > 0; }

private:
    Index window_;
    std::vector<RollingStats> stats_;
};

/// All candidates for target j with r >= r_threshold and w <= tau <= n_k - continuation,
/// sorted by r descending, then source ascending, then tau ascending.
/// Empty when the target tail is constant or shorter than the window.
std::vector<Candidate> candidate_stream(std::size_t j, const Dataset& d, const CorrelatorIndex& index,
                                        const CorrelatorParams& p);
std::vector<Candidate> candidate_stream(std::size_t j, const Dataset& d, const CorrelatorParams& p);

/// (x - source_mean) * target_std / source_std + target_mean, elementwise.
Vector affine_map(const Eigen::Ref<const Vector>& source_values, double source_mean, double source_std,
                  double target_mean, double target_std);

/// Date-based leakage test for a target/source/tau triple. Absent without dates.
std::optional<bool> source_uses_future(const TimeSeries& target, const TimeSeries& source, Index tau);

/// Walks an already computed candidate stream and returns the first candidate
/// passing the acceptance rules of `p`. Candidates below p.r_threshold are
/// ignored, so one stream at a low threshold can serve several settings.
std::optional<CorrelatorMatch> select_candidate(std::size_t j, const Dataset& d, const CorrelatorIndex& index,
                                                const CorrelatorParams& p,
                                                const std::vector<Candidate>& stream);

std::optional<CorrelatorMatch> correlator_forecast(std::size_t j, const Dataset& d,
                                                   const CorrelatorIndex& index, const CorrelatorParams& p);
std::optional<CorrelatorMatch> correlator_forecast(std::size_t j, const Dataset& d, const CorrelatorParams& p);

struct CorrelatorRun {
    /// Accepted matches in file order of the target.
    std::vector<CorrelatorMatch> matches;

    const CorrelatorMatch* find(std::string_view target_id) const;
    std::size_t size() const { return matches.size(); }
};

CorrelatorRun run_correlator(const Dataset& d, const CorrelatorParams& p, unsigned threads = 1);

/// Match report CSV: `target_id,source_id,tau,r,used_future`.
void write_match_csv(std::ostream& out, const CorrelatorRun& run);

} // namespace corrcast
