#include <gtest/gtest.h>

#include <sstream>

#include <json.hpp>

#include "corrcast/analysis.hpp"
#include "corrcast/error.hpp"
#include "test_support.hpp"

namespace corrcast {
namespace {

using testing::make_series;
using testing::pearson_oracle;

Dataset random_dataset(std::mt19937_64& rng, int count, Index lo, Index hi, double step = 1.0) {
    std::uniform_int_distribution<Index> len(lo, hi);
    std::vector<TimeSeries> s;
    for (int i = 0; i < count; ++i) s.push_back(make_series("D" + std::to_string(i + 1), testing::random_walk(rng, len(rng), 100, step)));
    return Dataset(std::move(s));
}

/// Straight from the definition: every (k, tau), keep the max.
std::optional<GlobalMatch> brute_best(std::size_t j, const Dataset& d, Index edge) {
    std::optional<GlobalMatch> best;
    const Vector& yj = d[j].values;
    for (std::size_t k = 0; k < d.size(); ++k) {
        const Vector& yk = d[k].values;
        for (Index tau = edge; tau <= yk.size() - edge; ++tau) {
            const Index len = std::min(yj.size(), tau);
            if (len < 2) continue;
            const Vector a = yj.tail(len);
            const Vector b = yk.segment(tau - len, len);
            if ((a.array() == a[0]).all() || (b.array() == b[0]).all()) continue;
            const double r = pearson_oracle(a, b);
            if (!best || r > best->r_prime) best = GlobalMatch{j, k, tau, r, len};
        }
    }
    return best;
}

TEST(GlobalCorrelation, MatchesSegmentOracle) {
    std::mt19937_64 rng(71);
    const Dataset d = random_dataset(rng, 3, 40, 300);
    for (std::size_t j = 0; j < d.size(); ++j) {
        for (std::size_t k = 0; k < d.size(); ++k) {
            for (Index tau = 14; tau <= d[k].size() - 14; tau += 7) {
                const Index len = std::min(d[j].size(), tau);
                const double expect = pearson_oracle(d[j].values.tail(len), d[k].values.segment(tau - len, len));
                EXPECT_NEAR(global_cross_correlation(j, k, tau, d), expect, 1e-10);
            }
        }
    }
}

TEST(GlobalCorrelation, OutOfRangeTauIsError) {
    std::mt19937_64 rng(72);
    const Dataset d = random_dataset(rng, 2, 50, 50);
    EXPECT_THROW(global_cross_correlation(0, 1, 13, d), Error);
    EXPECT_THROW(global_cross_correlation(0, 1, 37, d), Error);
}

TEST(BestGlobal, AgreesWithBruteForce) {
    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 4; ++trial) {
        const Dataset d = random_dataset(rng, 6, 30, 400);
        for (CrossBackend backend : {CrossBackend::Direct, CrossBackend::Fft, CrossBackend::Auto}) {
            GlobalScanOptions opts;
            opts.backend = backend;
            const auto best = best_global_matches(d, opts);
            ASSERT_EQ(best.size(), d.size());
            for (const auto& m : best) {
                const auto oracle = brute_best(m.j, d, 14);
                ASSERT_TRUE(oracle);
                EXPECT_NEAR(m.r_prime, oracle->r_prime, 1e-9);
                EXPECT_EQ(m.k, oracle->k);
                EXPECT_EQ(m.tau, oracle->tau);
                EXPECT_EQ(m.overlap, std::min(d[m.j].size(), m.tau));
            }
        }
    }
}

TEST(BestGlobal, DirectAndFftAgreeOnLongSeries) {
    std::mt19937_64 rng(74);
    const Dataset d = random_dataset(rng, 5, 1500, 4000);
    GlobalScanOptions direct, fft;
    direct.backend = CrossBackend::Direct;
    fft.backend = CrossBackend::Fft;
    fft.threads = 4;
    const auto a = best_global_matches(d, direct);
    const auto b = best_global_matches(d, fft);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].k, b[i].k);
        EXPECT_EQ(a[i].tau, b[i].tau);
        EXPECT_NEAR(a[i].r_prime, b[i].r_prime, 1e-12);
    }
}

TEST(BestGlobal, FindsPlantedFullCopyAtLargeOffset) {
    std::mt19937_64 rng(75);
    Vector base = testing::random_walk(rng, 3000, 1e6, 50.0);
    const Vector a = base.segment(1000, 800);
    Vector b = testing::random_walk(rng, 2500, 0, 1.0);
    b.segment(1200, 800) = a * 0.5 + Vector::Constant(800, 42.0);
    Dataset d(std::vector<TimeSeries>{make_series("A", a), make_series("B", b)});
    const auto best = best_global_matches(d);
    ASSERT_EQ(best[0].j, 0u);
    EXPECT_EQ(best[0].k, 1u);
    EXPECT_EQ(best[0].tau, 2000);
    EXPECT_EQ(best[0].overlap, 800);
    EXPECT_NEAR(best[0].r_prime, 1.0, 1e-9);
}

TEST(FilterMatches, ThresholdMonotoneAndExclusions) {
    std::mt19937_64 rng(76);
    const Dataset d = random_dataset(rng, 12, 30, 200);
    const auto best = best_global_matches(d);
    std::size_t prev = best.size() + 1;
    for (double thr : {-1.0, 0.5, 0.9, 0.99, 0.999, 1.0}) {
        const auto kept = filter_matches(best, d, thr);
        EXPECT_LE(kept.size(), prev);
        for (const auto& m : kept) EXPECT_GE(m.r_prime, thr);
        prev = kept.size();
    }
    const auto all = filter_matches(best, d, -1.0);
    ExclusionList ex{{d[all[0].j].id, d[all[0].k].id}};
    const auto fewer = filter_matches(best, d, -1.0, ex);
    EXPECT_EQ(fewer.size(), all.size() - 1);
    // reversed pair does not exclude
    ExclusionList rev{{d[all[0].k].id + "x", d[all[0].j].id}};
    EXPECT_EQ(filter_matches(best, d, -1.0, rev).size(), all.size());
}

TEST(Exclusions, LoadCsv) {
    testing::TempDir dir;
    testing::write_file(dir / "ex.csv", "j,k\nD1,D2\n\"D5\",D3\n");
    const ExclusionList ex = load_exclusions(dir / "ex.csv");
    EXPECT_EQ(ex.size(), 2u);
    EXPECT_TRUE(ex.count({"D1", "D2"}));
    EXPECT_TRUE(ex.count({"D5", "D3"}));
    EXPECT_FALSE(ex.count({"D2", "D1"}));
    EXPECT_THROW(load_exclusions(dir / "missing.csv"), LoadError);
}

TEST(Categorize, AllFourAndDateUnknown) {
    // Series lengths and dates arranged so each match lands in a known category.
    std::vector<TimeSeries> s;
    for (int i = 0; i < 6; ++i) s.push_back(make_series("D" + std::to_string(i), Vector::LinSpaced(100, 0, 99)));
    for (auto& x : s) x.start_date = parse_date("2000-01-01");
    const Dataset d(s);
    std::vector<GlobalMatch> m{
        {0, 0, 60, 1.0, 60},  // T1
        {1, 2, 80, 1.0, 80},  // T2 (reverse present)
        {2, 1, 80, 1.0, 80},  // T2
        {3, 4, 100, 1.0, 100}, // T3: both end on the same date
        {4, 5, 90, 1.0, 90},  // T4: source region ends 10 days earlier
    };
    const auto c = categorize(m, d);
    EXPECT_EQ(c, (std::vector<LeakCategory>{LeakCategory::T1, LeakCategory::T2, LeakCategory::T2, LeakCategory::T3,
                                           LeakCategory::T4}));

    s[5].start_date = parse_date("2000-01-11"); // shift k so that its tau=90 lands on j's last date
    const Dataset shifted(s);
    EXPECT_EQ(categorize({m[4]}, shifted)[0], LeakCategory::T3);

    s[5].start_date.reset();
    const Dataset undated(s);
    const auto c2 = categorize(m, undated);
    EXPECT_EQ(c2[0], LeakCategory::T1);
    EXPECT_EQ(c2[3], LeakCategory::T3);
    EXPECT_EQ(c2[4], LeakCategory::DateUnknown);
    EXPECT_EQ(to_string(LeakCategory::DateUnknown), "date_unknown");
}

TEST(Histogram, BinsByOverlap) {
    std::vector<GlobalMatch> m(5);
    m[0].overlap = 0;
    m[1].overlap = 99;
    m[2].overlap = 100;
    m[3].overlap = 450;
    m[4].overlap = 499;
    const auto h = overlap_histogram(m, 100);
    EXPECT_EQ(h.counts, (std::vector<std::size_t>{2, 1, 0, 0, 2}));
    EXPECT_THROW(overlap_histogram(m, 0), ConfigError);
    std::ostringstream out;
    write_histogram_csv(out, h);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n', 24)), "bin_start,bin_end,count\n0,100,2");
}

TEST(FutureUse, HandEnumeration) {
    std::vector<TimeSeries> s{make_series("A", Vector::LinSpaced(30, 0, 29)), make_series("B", Vector::LinSpaced(60, 0, 59))};
    s[0].start_date = parse_date("2000-01-01"); // first forecast date 2000-01-31
    s[1].start_date = parse_date("2000-01-01");
    const Dataset d(s);
    CorrelatorRun run;
    auto add = [&](Index tau) {
        CorrelatorMatch m;
        m.target = 0;
        m.source = 1;
        m.target_id = "A";
        m.source_id = "B";
        m.tau = tau;
        run.matches.push_back(m);
    };
    add(30); // window ends 2000-01-30: past
    add(31); // ends 2000-01-31: future
    add(45); // future
    add(14); // past
    EXPECT_DOUBLE_EQ(future_use_stats(run, d), 0.5);
    EXPECT_DOUBLE_EQ(future_use_stats(CorrelatorRun{}, d), 0.0);

    s[1].start_date.reset();
    EXPECT_THROW(future_use_stats(run, Dataset(s)), Error);
}

TEST(Report, WritersAndCounts) {
    std::mt19937_64 rng(77);
    const Dataset d = random_dataset(rng, 5, 30, 60);
    LeakageReport rep;
    rep.set_c = filter_matches(best_global_matches(d), d, -1.0);
    rep.before_exclusions = rep.set_c.size();
    rep.categories = categorize(rep.set_c, d);
    rep.histogram = overlap_histogram(rep.set_c, 100);
    std::size_t total = 0;
    for (auto n : rep.category_counts()) total += n;
    EXPECT_EQ(total, rep.set_c.size());

    std::ostringstream csv, js;
    write_matches_csv(csv, rep, d);
    EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "j,k,tau,r,overlap,category");
    write_summary_json(js, rep, std::nullopt);
    const auto j = nlohmann::json::parse(js.str());
    EXPECT_FALSE(j.contains("timestamp"));
    EXPECT_EQ(j["set_c"].get<std::size_t>(), rep.set_c.size());
}

} // namespace
} // namespace corrcast
