#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "corrcast/correlator.hpp"
#include "corrcast/dataset.hpp"

namespace corrcast {

/// Best whole-overlap alignment of series j's end against series k.
struct GlobalMatch {
    std::size_t j = 0;
    std::size_t k = 0;
    Index tau = 0;      ///< 1-based end position of the aligned region in series k
    double r_prime = 0; ///< Pearson correlation over the overlap
    Index overlap = 0;  ///< min(n_j, tau)
};

enum class LeakCategory {
    T1, ///< self-correlation, j == k
    T2, ///< mutual: (j, k) and (k, j) both retained
    T3, ///< synchronised: both regions cover the same dates
    T4, ///< unsynchronised: regions cover different dates
    DateUnknown,
};

std::string_view to_string(LeakCategory c);

enum class CrossBackend { Auto, Direct, Fft };

struct GlobalScanOptions {
    /// tau ranges over {edge, ..., n_k - edge}.
    Index edge = 14;
    unsigned threads = 1;
    CrossBackend backend = CrossBackend::Auto;
    /// Approximate scores within this margin of the running best are rescored exactly.
    double refine_margin = 1e-4;
    std::size_t refine_limit = 256;
};

/// Pearson correlation of the last min(n_j, tau) values of series j with
/// the equally long segment of series k ending at tau. Throws
/// UndefinedCorrelation on a constant segment.
double global_cross_correlation(std::size_t j, std::size_t k, Index tau, const Dataset& d, Index edge = 14);

/// For every series j, the (k, tau) maximising the global correlation
/// (ties: k, then tau ascending). Series without any defined alignment are
/// omitted. No threshold is applied.
std::vector<GlobalMatch> best_global_matches(const Dataset& d, const GlobalScanOptions& opts = {});

/// Ordered (j_id, k_id) pairs to discard.
using ExclusionList = std::set<std::pair<std::string, std::string>>;

/// Two-column CSV with header.
ExclusionList load_exclusions(const std::filesystem::path& path);

/// Keeps matches with r' >= threshold whose (j, k) pair is not excluded.
std::vector<GlobalMatch> filter_matches(const std::vector<GlobalMatch>& best, const Dataset& d, double threshold,
                                        const ExclusionList& exclusions = {});

std::vector<GlobalMatch> find_global_matches(const Dataset& d, double threshold = 0.995,
                                             const ExclusionList& exclusions = {},
                                             const GlobalScanOptions& opts = {});

/// One category per match. T1 and T2 take precedence over T3/T4; without
/// start dates the T3/T4 split degrades to DateUnknown.
std::vector<LeakCategory> categorize(const std::vector<GlobalMatch>& matches, const Dataset& d);

struct OverlapHistogram {
    Index bin_width = 100;
    /// counts[b] covers overlaps in [b * bin_width, (b + 1) * bin_width)
    std::vector<std::size_t> counts;
};

OverlapHistogram overlap_histogram(const std::vector<GlobalMatch>& matches, Index bin_width);

/// Fraction of accepted correlator matches whose source window reaches the
/// target's forecast dates. Throws when dates are missing.
double future_use_stats(const CorrelatorRun& run, const Dataset& d);

struct LeakageReport {
    double threshold = 0.995;
    std::size_t before_exclusions = 0;
    std::vector<GlobalMatch> set_c;
    std::vector<LeakCategory> categories; ///< parallel to set_c
    OverlapHistogram histogram;
    std::optional<double> future_use_fraction;

    std::array<std::size_t, 5> category_counts() const;
    Index max_overlap() const;
};

/// matches CSV: `j,k,tau,r,overlap,category` with series ids for j and k.
void write_matches_csv(std::ostream& out, const LeakageReport& report, const Dataset& d);
/// `bin_start,bin_end,count`
void write_histogram_csv(std::ostream& out, const OverlapHistogram& histogram);
void write_summary_json(std::ostream& out, const LeakageReport& report, const std::optional<std::string>& timestamp);

} // namespace corrcast
