#include "corrcast/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>

#include <json.hpp>
#include <unsupported/Eigen/FFT>

#include "corrcast/error.hpp"
#include "corrcast/parallel.hpp"
#include "corrcast/stats.hpp"
#include "csv.hpp"

namespace corrcast {

std::string_view to_string(LeakCategory c) {
    switch (c) {
    case LeakCategory::T1: return "T1";
    case LeakCategory::T2: return "T2";
    case LeakCategory::T3: return "T3";
    case LeakCategory::T4: return "T4";
    case LeakCategory::DateUnknown: return "date_unknown";
    }
    return "?";
}

double global_cross_correlation(std::size_t j, std::size_t k, Index tau, const Dataset& d, Index edge) {
    const Vector& yj = d[j].values;
    const Vector& yk = d[k].values;
    if (tau < edge || tau > yk.size() - edge) {
        throw Error("global_cross_correlation: tau " + std::to_string(tau) + " outside {" + std::to_string(edge) +
                    ", ..., " + std::to_string(yk.size() - edge) + "}");
    }
    const Index overlap = std::min(yj.size(), tau);
    if (overlap < 2) throw Error("global_cross_correlation: overlap shorter than two points");
    return pearson(yj.tail(overlap), yk.segment(tau - overlap, overlap));
}

namespace {

/// Globally centred copy of a series with long-double prefix sums of the
/// values and their squares.
struct PrefixedSeries {
    Vector centred;
    std::vector<long double> sum;
    std::vector<long double> sum_sq;

    explicit PrefixedSeries(const Vector& y) : centred(y.array() - y.mean()), sum(y.size() + 1), sum_sq(y.size() + 1) {
        sum[0] = sum_sq[0] = 0.0L;
        for (Index i = 0; i < centred.size(); ++i) {
            const long double v = centred[i];
            sum[i + 1] = sum[i] + v;
            sum_sq[i + 1] = sum_sq[i] + v * v;
        }
    }

    Index size() const { return centred.size(); }
    long double range_sum(Index begin, Index end) const { return sum[end] - sum[begin]; }
    long double range_sum_sq(Index begin, Index end) const { return sum_sq[end] - sum_sq[begin]; }
};

struct Scored {
    std::size_t k;
    Index tau;
    double r;
};

bool better(const Scored& a, const Scored& b) {
    if (a.r != b.r) return a.r > b.r;
    if (a.k != b.k) return a.k < b.k;
    return a.tau < b.tau;
}

/// Keeps every approximate score close to the running maximum.
class NearBest {
public:
    NearBest(double margin, std::size_t limit) : margin_(margin), limit_(std::max<std::size_t>(limit, 1)) {}

    void offer(std::size_t k, Index tau, double r) {
        if (r < best_ - margin_) return;
        best_ = std::max(best_, r);
        items_.push_back({k, tau, r});
        if (items_.size() > 4 * limit_) prune();
    }

    const std::vector<Scored>& finish() {
        prune();
        return items_;
    }

private:
    void prune() {
        const double floor = best_ - margin_;
        std::erase_if(items_, [&](const Scored& s) { return s.r < floor; });
        if (items_.size() > limit_) {
            std::stable_sort(items_.begin(), items_.end(), better);
            items_.resize(limit_);
        }
    }

    double margin_;
    std::size_t limit_;
    double best_ = -std::numeric_limits<double>::infinity();
    std::vector<Scored> items_;
};

constexpr Index kDirectOverlap = 128;

Index next_pow2(Index n) {
    Index p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// Cross terms for one target; caches the reversed target spectrum per FFT size.
class CrossTerms {
public:
    explicit CrossTerms(const PrefixedSeries& target) : target_(target) {
        fft_.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    }

    /// X(tau) = sum_i a_i b_i over the aligned overlap, written to out[tau].
    void direct(const PrefixedSeries& source, Index tau_lo, Index tau_hi, std::vector<double>& out) const {
        const Index nj = target_.size();
        const double* a = target_.centred.data();
        const double* b = source.centred.data();
        for (Index tau = tau_lo; tau <= tau_hi; ++tau) {
            const Index len = std::min(nj, tau);
            const double* pa = a + (nj - len);
            const double* pb = b + (tau - len);
            double acc = 0.0;
            for (Index i = 0; i < len; ++i) acc += pa[i] * pb[i];
            out[static_cast<std::size_t>(tau)] = acc;
        }
    }

    /// Same via convolution of the reversed target with the source:
    /// X(tau) = conv[tau - 1]. Returns an absolute error scale for the values.
    double fft(const PrefixedSeries& source, Index tau_lo, Index tau_hi, std::vector<double>& out) {
        const Index nj = target_.size();
        const Index nk = source.size();
        const Index n = next_pow2(nj + nk - 1);

        auto& target_spec = target_spectrum(n);
        padded_.assign(static_cast<std::size_t>(n), 0.0);
        std::copy(source.centred.data(), source.centred.data() + nk, padded_.begin());
        fft_.fwd(spec_, padded_);
        for (std::size_t i = 0; i < spec_.size(); ++i) spec_[i] *= target_spec[i];
        fft_.inv(conv_, spec_, n);
        for (Index tau = tau_lo; tau <= tau_hi; ++tau) out[static_cast<std::size_t>(tau)] = conv_[tau - 1];

        const double norm = std::sqrt(static_cast<double>(target_.sum_sq.back() * source.sum_sq.back()));
        return 1e-15 * std::log2(static_cast<double>(n)) * norm;
    }

private:
    const std::vector<std::complex<double>>& target_spectrum(Index n) {
        auto it = spectra_.find(n);
        if (it != spectra_.end()) return it->second;
        std::vector<double> rev(static_cast<std::size_t>(n), 0.0);
        const Index nj = target_.size();
        for (Index i = 0; i < nj; ++i) rev[static_cast<std::size_t>(i)] = target_.centred[nj - 1 - i];
        std::vector<std::complex<double>> spec;
        fft_.fwd(spec, rev);
        return spectra_.emplace(n, std::move(spec)).first->second;
    }

    const PrefixedSeries& target_;
    Eigen::FFT<double> fft_;
    std::map<Index, std::vector<std::complex<double>>> spectra_;
    std::vector<double> padded_;
    std::vector<std::complex<double>> spec_;
    std::vector<double> conv_;
};

bool use_direct(CrossBackend backend, Index nj, Index nk, Index tau_lo, Index tau_hi) {
    if (backend == CrossBackend::Direct) return true;
    if (backend == CrossBackend::Fft) return false;
    // direct work is sum over tau of min(nj, tau)
    double work = 0.0;
    const Index split = std::clamp(nj, tau_lo - 1, tau_hi);
    work += 0.5 * static_cast<double>(split + tau_lo) * static_cast<double>(split - tau_lo + 1);
    work += static_cast<double>(nj) * static_cast<double>(tau_hi - split);
    const double n = static_cast<double>(next_pow2(nj + nk - 1));
    return work <= 16.0 * n * std::log2(n);
}

std::optional<GlobalMatch> scan_target(std::size_t j, const Dataset& d, const std::vector<PrefixedSeries>& prefixed,
                                       const GlobalScanOptions& opts) {
    const PrefixedSeries& a = prefixed[j];
    const Index nj = a.size();
    if (nj < 2) return std::nullopt;

    NearBest near(opts.refine_margin, opts.refine_limit);
    CrossTerms cross(a);
    std::vector<double> x;

    auto exact = [&](std::size_t k, Index tau) -> std::optional<double> {
        try {
            return global_cross_correlation(j, k, tau, d, opts.edge);
        } catch (const UndefinedCorrelation&) {
            return std::nullopt;
        }
    };

    for (std::size_t k = 0; k < d.size(); ++k) {
        const PrefixedSeries& b = prefixed[k];
        const Index nk = b.size();
        const Index tau_lo = std::max<Index>(opts.edge, 2);
        const Index tau_hi = nk - opts.edge;
        if (tau_hi < tau_lo) continue;

        x.assign(static_cast<std::size_t>(tau_hi + 1), 0.0);
        double x_error = 0.0;
        if (use_direct(opts.backend, nj, nk, tau_lo, tau_hi)) {
            cross.direct(b, tau_lo, tau_hi, x);
        } else {
            x_error = cross.fft(b, tau_lo, tau_hi, x);
            // short overlaps are cheap and the most sensitive to FFT round-off
            const Index short_hi = nj <= kDirectOverlap ? tau_hi : std::min(tau_hi, kDirectOverlap);
            if (short_hi >= tau_lo) cross.direct(b, tau_lo, short_hi, x);
        }

        for (Index tau = tau_lo; tau <= tau_hi; ++tau) {
            const Index len = std::min(nj, tau);
            const long double l = static_cast<long double>(len);
            const long double sa = a.range_sum(nj - len, nj);
            const long double saa = a.range_sum_sq(nj - len, nj);
            const long double sb = b.range_sum(tau - len, tau);
            const long double sbb = b.range_sum_sq(tau - len, tau);
            const long double va = saa - sa * sa / l;
            const long double vb = sbb - sb * sb / l;
            const double err = len > kDirectOverlap ? x_error : 0.0;

            const bool reliable = va > 1e-8L * saa && vb > 1e-8L * sbb &&
                                  std::sqrt(static_cast<double>(va * vb)) > 1e6 * err;
            if (reliable) {
                const long double cov = static_cast<long double>(x[static_cast<std::size_t>(tau)]) - sa * sb / l;
                near.offer(k, tau, clamp_correlation(static_cast<double>(cov / std::sqrt(va * vb))));
            } else if (auto r = exact(k, tau)) {
                near.offer(k, tau, *r);
            }
        }
    }

    std::optional<Scored> best;
    for (const Scored& s : near.finish()) {
        auto r = exact(s.k, s.tau);
        if (!r) continue;
        Scored cand{s.k, s.tau, *r};
        if (!best || better(cand, *best)) best = cand;
    }
    if (!best) return std::nullopt;
    return GlobalMatch{j, best->k, best->tau, best->r, std::min(nj, best->tau)};
}

} // namespace

std::vector<GlobalMatch> best_global_matches(const Dataset& d, const GlobalScanOptions& opts) {
    if (opts.edge < 1) throw ConfigError("edge must be positive");
    std::vector<PrefixedSeries> prefixed;
    prefixed.reserve(d.size());
    for (const auto& s : d) prefixed.emplace_back(s.values);

    std::vector<std::optional<GlobalMatch>> slots(d.size());
    parallel_for(d.size(), opts.threads, [&](std::size_t j) { slots[j] = scan_target(j, d, prefixed, opts); });

    std::vector<GlobalMatch> out;
    for (auto& s : slots)
        if (s) out.push_back(*s);
    return out;
}

ExclusionList load_exclusions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open " + path.string());
    ExclusionList out;
    std::string line;
    std::getline(in, line);
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (detail::trim(line).empty()) continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() < 2 || cells[0].empty() || cells[1].empty()) {
            throw LoadError(path.string() + ": row " + std::to_string(row) + " needs two series ids");
        }
        out.emplace(cells[0], cells[1]);
    }
    return out;
}

std::vector<GlobalMatch> filter_matches(const std::vector<GlobalMatch>& best, const Dataset& d, double threshold,
                                        const ExclusionList& exclusions) {
    std::vector<GlobalMatch> out;
    for (const auto& m : best) {
        if (m.r_prime < threshold) continue;
        if (exclusions.count({d[m.j].id, d[m.k].id})) continue;
        out.push_back(m);
    }
    return out;
}

std::vector<GlobalMatch> find_global_matches(const Dataset& d, double threshold, const ExclusionList& exclusions,
                                             const GlobalScanOptions& opts) {
    return filter_matches(best_global_matches(d, opts), d, threshold, exclusions);
}

std::vector<LeakCategory> categorize(const std::vector<GlobalMatch>& matches, const Dataset& d) {
    std::set<std::pair<std::size_t, std::size_t>> present;
    for (const auto& m : matches) present.emplace(m.j, m.k);

    std::vector<LeakCategory> out;
    out.reserve(matches.size());
    for (const auto& m : matches) {
        if (m.j == m.k) {
            out.push_back(LeakCategory::T1);
        } else if (present.count({m.k, m.j})) {
            out.push_back(LeakCategory::T2);
        } else {
            // equal-length regions: same dates iff the end dates agree
            auto end_j = d[m.j].date_at(d[m.j].size() - 1);
            auto end_k = d[m.k].date_at(m.tau - 1);
            if (!end_j || !end_k) {
                out.push_back(LeakCategory::DateUnknown);
            } else {
                out.push_back(*end_j == *end_k ? LeakCategory::T3 : LeakCategory::T4);
            }
        }
    }
    return out;
}

OverlapHistogram overlap_histogram(const std::vector<GlobalMatch>& matches, Index bin_width) {
    if (bin_width < 1) throw ConfigError("histogram bin width must be at least 1");
    OverlapHistogram h;
    h.bin_width = bin_width;
    for (const auto& m : matches) {
        const auto bin = static_cast<std::size_t>(m.overlap / bin_width);
        if (h.counts.size() <= bin) h.counts.resize(bin + 1, 0);
        ++h.counts[bin];
    }
    return h;
}

double future_use_stats(const CorrelatorRun& run, const Dataset& d) {
    if (!d.has_dates()) throw Error("future-use statistics need start dates; supply the info file (--info)");
    if (run.matches.empty()) return 0.0;
    std::size_t used = 0;
    for (const auto& m : run.matches) {
        auto future = source_uses_future(d[m.target], d[m.source], m.tau);
        if (!future) throw Error("missing start date for " + m.target_id + " or " + m.source_id);
        used += *future ? 1 : 0;
    }
    return static_cast<double>(used) / static_cast<double>(run.matches.size());
}

std::array<std::size_t, 5> LeakageReport::category_counts() const {
    std::array<std::size_t, 5> counts{};
    for (auto c : categories) ++counts[static_cast<std::size_t>(c)];
    return counts;
}

Index LeakageReport::max_overlap() const {
    Index best = 0;
    for (const auto& m : set_c) best = std::max(best, m.overlap);
    return best;
}

void write_matches_csv(std::ostream& out, const LeakageReport& report, const Dataset& d) {
    out << "j,k,tau,r,overlap,category\n";
    for (std::size_t i = 0; i < report.set_c.size(); ++i) {
        const auto& m = report.set_c[i];
        out << d[m.j].id << ',' << d[m.k].id << ',' << m.tau << ',' << format_value(m.r_prime) << ','
            << m.overlap << ',' << to_string(report.categories[i]) << '\n';
    }
}

void write_histogram_csv(std::ostream& out, const OverlapHistogram& histogram) {
    out << "bin_start,bin_end,count\n";
    for (std::size_t b = 0; b < histogram.counts.size(); ++b) {
        const Index lo = static_cast<Index>(b) * histogram.bin_width;
        out << lo << ',' << lo + histogram.bin_width << ',' << histogram.counts[b] << '\n';
    }
}

void write_summary_json(std::ostream& out, const LeakageReport& report, const std::optional<std::string>& timestamp) {
    const auto counts = report.category_counts();
    nlohmann::ordered_json j;
    j["threshold"] = report.threshold;
    j["matches_before_exclusions"] = report.before_exclusions;
    j["set_c"] = report.set_c.size();
    j["categories"] = {{"T1", counts[0]}, {"T2", counts[1]}, {"T3", counts[2]}, {"T4", counts[3]},
                       {"date_unknown", counts[4]}};
    j["max_overlap"] = report.max_overlap();
    j["histogram_bin_width"] = report.histogram.bin_width;
    j["future_use_fraction"] = report.future_use_fraction ? nlohmann::ordered_json(*report.future_use_fraction)
                                                          : nlohmann::ordered_json(nullptr);
    if (timestamp) j["generated_at"] = *timestamp;
    out << j.dump(2) << '\n';
}

} // namespace corrcast
