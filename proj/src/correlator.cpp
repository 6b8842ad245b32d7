#include "corrcast/correlator.hpp"

#include <algorithm>
#include <ostream>

#include "corrcast/error.hpp"
#include "corrcast/parallel.hpp"

namespace corrcast {

void CorrelatorParams::validate() const {
    if (window < 2) throw ConfigError("correlator window must be at least 2");
    if (horizon < 0) throw ConfigError("correlator horizon must be non-negative");
    if (!(r_threshold > 0.0 && r_threshold <= 1.0)) throw ConfigError("r_threshold must lie in (0, 1]");
    if (std_ratio && !(*std_ratio > 0.0)) throw ConfigError("std_ratio must be positive");
}

CorrelatorIndex::CorrelatorIndex(const Dataset& d, Index window, unsigned threads)
    : window_(window), stats_(d.size()) {
    parallel_for(d.size(), threads, [&](std::size_t k) {
        if (d[k].size() >= window_) stats_[k] = rolling_stats(d[k].values, window_);
    });
}

namespace {

bool candidate_order(const Candidate& a, const Candidate& b) {
    if (a.r != b.r) return a.r > b.r;
    if (a.source != b.source) return a.source < b.source;
    return a.tau < b.tau;
}

} // namespace

std::vector<Candidate> candidate_stream(std::size_t j, const Dataset& d, const CorrelatorIndex& index,
                                        const CorrelatorParams& p) {
    p.validate();
    const Index w = p.window;
    if (index.window() != w) throw Error("candidate_stream: index built for a different window");
    const TimeSeries& target = d[j];
    std::vector<Candidate> out;
    if (target.size() < w) return out;

    const Vector tail = target.values.tail(w);
    const double tail_mean = mean(tail);
    if (population_std(tail) <= std_epsilon(tail_mean)) return out;
    const CorrelationQuery query(tail);
    const Index cont = p.continuation();

    for (std::size_t k = 0; k < d.size(); ++k) {
        if (k == j && !p.include_self) continue;
        if (!index.usable(k)) continue;
        const RollingStats& rs = index.stats(k);
        const Vector& y = d[k].values;
        // window start s covers 1-based end tau = s + w; need tau <= n_k - cont
        const Index last_start = y.size() - cont - w;
        for (Index s = 0; s <= last_start; ++s) {
            if (!rs.valid[s]) continue;
            const double r = query.correlate(y, s, rs.mean[s], rs.std[s]);
            if (r >= p.r_threshold) out.push_back({k, s + w, r});
        }
    }
    std::sort(out.begin(), out.end(), candidate_order);
    return out;
}

std::vector<Candidate> candidate_stream(std::size_t j, const Dataset& d, const CorrelatorParams& p) {
    return candidate_stream(j, d, CorrelatorIndex(d, p.window), p);
}

Vector affine_map(const Eigen::Ref<const Vector>& source_values, double source_mean, double source_std,
                  double target_mean, double target_std) {
    if (!(source_std > 0.0)) throw Error("affine_map: source std must be positive");
    return ((source_values.array() - source_mean) * (target_std / source_std) + target_mean).matrix();
}

std::optional<bool> source_uses_future(const TimeSeries& target, const TimeSeries& source, Index tau) {
    auto first_forecast = target.date_at(target.size());
    auto window_last = source.date_at(tau - 1);
    if (!first_forecast || !window_last) return std::nullopt;
    return *window_last >= *first_forecast;
}

std::optional<CorrelatorMatch> select_candidate(std::size_t j, const Dataset& d, const CorrelatorIndex& index,
                                                const CorrelatorParams& p,
                                                const std::vector<Candidate>& stream) {
    if (p.bug1 && j >= p.bug1_cutoff) return std::nullopt;
    const Index w = p.window;
    const TimeSeries& target = d[j];
    if (target.size() < w) return std::nullopt;

    const Vector tail = target.values.tail(w);
    const double target_mean = mean(tail);
    const double target_std = population_std(tail);
    const Index cont = p.continuation();

    for (const Candidate& c : stream) {
        if (c.r < p.r_threshold) break;
        const TimeSeries& source = d[c.source];
        const std::optional<bool> future = source_uses_future(target, source, c.tau);
        if (p.past_only && future.value_or(false)) continue;

        const RollingStats& rs = index.stats(c.source);
        const Index start = c.tau - w;
        const double source_mean = rs.mean[start];
        const double source_std = rs.std[start];
        Vector forecast = affine_map(source.values.segment(c.tau, cont), source_mean, source_std, target_mean,
                                     target_std);

        if (p.std_ratio) {
            const double reference = p.bug2 ? source_std : target_std;
            if (population_std(forecast) > *p.std_ratio * reference) continue;
        }

        CorrelatorMatch m;
        m.target = j;
        m.source = c.source;
        m.target_id = target.id;
        m.source_id = source.id;
        m.tau = c.tau;
        m.r = c.r;
        m.forecast = std::move(forecast);
        m.source_first_date = source.date_at(start);
        m.source_last_date = source.date_at(c.tau - 1);
        m.used_future = future;
        return m;
    }
    return std::nullopt;
}

std::optional<CorrelatorMatch> correlator_forecast(std::size_t j, const Dataset& d,
                                                   const CorrelatorIndex& index, const CorrelatorParams& p) {
    p.validate();
    if (p.bug1 && j >= p.bug1_cutoff) return std::nullopt;
    return select_candidate(j, d, index, p, candidate_stream(j, d, index, p));
}

std::optional<CorrelatorMatch> correlator_forecast(std::size_t j, const Dataset& d, const CorrelatorParams& p) {
    return correlator_forecast(j, d, CorrelatorIndex(d, p.window), p);
}

const CorrelatorMatch* CorrelatorRun::find(std::string_view target_id) const {
    for (const auto& m : matches)
        if (m.target_id == target_id) return &m;
    return nullptr;
}

CorrelatorRun run_correlator(const Dataset& d, const CorrelatorParams& p, unsigned threads) {
    p.validate();
    CorrelatorRun run;
    if (d.empty()) return run;
    const CorrelatorIndex index(d, p.window, threads);
    std::vector<std::optional<CorrelatorMatch>> slots(d.size());
    parallel_for(d.size(), threads, [&](std::size_t j) { slots[j] = correlator_forecast(j, d, index, p); });
    for (auto& s : slots)
        if (s) run.matches.push_back(std::move(*s));
    return run;
}

void write_match_csv(std::ostream& out, const CorrelatorRun& run) {
    out << "target_id,source_id,tau,r,used_future\n";
    for (const auto& m : run.matches) {
        out << m.target_id << ',' << m.source_id << ',' << m.tau << ',' << format_value(m.r) << ',';
        if (m.used_future) out << (*m.used_future ? "true" : "false");
        out << '\n';
    }
}

} // namespace corrcast
