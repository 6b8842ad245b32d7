#include <gtest/gtest.h>

#include "corrcast/stats.hpp"
#include "test_support.hpp"

namespace corrcast {
namespace {

using testing::pearson_oracle;

TEST(Pearson, HandExample) {
    const Vector a = (Vector(4) << 1, 2, 3, 5).finished();
    const Vector b = (Vector(4) << 1, 2, 2, 4).finished();
    // 6.25 / sqrt(8.75 * 4.75), evaluated independently
    EXPECT_NEAR(pearson(a, b), 0.9694584179118516, 1e-15);
    EXPECT_NEAR(pearson(a, b), pearson_oracle(a, b), 1e-15);
}

TEST(Pearson, AffineInvariance) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100; ++i) {
        const Vector a = testing::random_vector(rng, 14);
        EXPECT_NEAR(pearson(a, (2.0 * a.array() + 3.0).matrix()), 1.0, 1e-12);
        EXPECT_NEAR(pearson(a, (-a).eval()), -1.0, 1e-12);
    }
}

TEST(Pearson, ConstantInputIsUndefined) {
    const Vector c = Vector::Constant(5, 3.0);
    const Vector a = Vector::LinSpaced(5, 0, 4);
    EXPECT_THROW(pearson(c, a), UndefinedCorrelation);
    EXPECT_THROW(pearson(a, c), UndefinedCorrelation);
    EXPECT_THROW(pearson(a, a.head(4)), Error);
}

TEST(Pearson, ClampedAndMatchesOracle) {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 1000; ++i) {
        const Vector a = testing::random_vector(rng, 2 + i % 40, -1e3, 1e3);
        const Vector b = testing::random_vector(rng, a.size(), -1e3, 1e3);
        const double r = pearson(a, b);
        EXPECT_LE(std::abs(r), 1.0);
        EXPECT_NEAR(r, pearson_oracle(a, b), 1e-9);
    }
}

TEST(RollingStats, HandExampleAndDegenerate) {
    const Vector s = (Vector(3) << 1, 2, 3).finished();
    RollingStats rs = rolling_stats(s, 2);
    ASSERT_EQ(rs.count(), 2);
    EXPECT_DOUBLE_EQ(rs.mean[0], 1.5);
    EXPECT_DOUBLE_EQ(rs.mean[1], 2.5);
    EXPECT_DOUBLE_EQ(rs.std[0], 0.5);

    RollingStats flat = rolling_stats(Vector::Constant(10, 4.2), 3);
    EXPECT_EQ(flat.count(), 8);
    EXPECT_TRUE((flat.std.array() == 0.0).all());
    EXPECT_FALSE(flat.valid.any());

    EXPECT_THROW(rolling_stats(s, 4), Error);
}

TEST(RollingStats, MatchesDirectPerWindowOracle) {
    std::mt19937_64 rng(3);
    for (double magnitude : {1.0, 1e9}) {
        Vector s = testing::random_walk(rng, 1000, magnitude, 1.0);
        for (Index w : {2, 13, 14, 50}) {
            RollingStats rs = rolling_stats(s, w);
            ASSERT_EQ(rs.count(), s.size() - w + 1);
            for (Index i = 0; i < rs.count(); ++i) {
                long double m = 0;
                for (Index t = 0; t < w; ++t) m += s[i + t];
                m /= w;
                long double v = 0;
                for (Index t = 0; t < w; ++t) v += (s[i + t] - m) * (s[i + t] - m);
                const double sd = static_cast<double>(std::sqrt(v / w));
                EXPECT_NEAR(rs.mean[i], static_cast<double>(m), 1e-9 * std::abs(static_cast<double>(m)) + 1e-12);
                EXPECT_NEAR(rs.std[i], sd, 1e-9 * sd);
            }
        }
    }
}

TEST(SlidingCorrelations, SelfMatchAndRange) {
    std::mt19937_64 rng(4);
    const Vector s = testing::random_walk(rng, 300);
    const Index w = 14;
    const RollingStats rs = rolling_stats(s, w);
    const Vector q = s.segment(100, w);
    auto out = sliding_correlations(q, s, rs);
    ASSERT_EQ(static_cast<Index>(out.size()), rs.count());
    EXPECT_EQ(out.front().tau, w);
    bool found = false;
    for (const auto& sc : out) {
        EXPECT_LE(std::abs(sc.r), 1.0);
        if (sc.tau == 100 + w) {
            EXPECT_NEAR(sc.r, 1.0, 1e-12);
            found = true;
        }
    }
    EXPECT_TRUE(found);
}

TEST(SlidingCorrelations, MatchesBruteForcePerShift) {
    std::mt19937_64 rng(5);
    for (double magnitude : {0.0, 1e9}) {
        const Vector s = testing::random_walk(rng, 500, magnitude, 1.0);
        const Vector q = testing::random_vector(rng, 14, -5, 5);
        const RollingStats rs = rolling_stats(s, 14);
        for (const auto& sc : sliding_correlations(q, s, rs)) {
            const Vector window = s.segment(sc.tau - 14, 14);
            EXPECT_NEAR(sc.r, pearson_oracle(q, window), 1e-9);
        }
    }
}

TEST(SlidingCorrelations, SkipsConstantWindows) {
    Vector s(40);
    s.setConstant(5.0);
    s.segment(20, 20) = Vector::LinSpaced(20, 1, 20);
    const RollingStats rs = rolling_stats(s, 5);
    const Vector q = Vector::LinSpaced(5, 0, 4);
    auto out = sliding_correlations(q, s, rs);
    for (const auto& sc : out) EXPECT_GT(sc.tau, 20);
    EXPECT_EQ(out.size(), 36u - 16u);
}

TEST(SlidingCorrelations, ConstantQueryIsError) {
    const Vector s = Vector::LinSpaced(30, 0, 29);
    EXPECT_THROW(sliding_correlations(Vector::Constant(14, 1.0), s, rolling_stats(s, 14)), UndefinedCorrelation);
}

TEST(SlidingCorrelations, AffineInvarianceOfQuery) {
    std::mt19937_64 rng(6);
    const Vector s = testing::random_walk(rng, 400);
    const Vector q = testing::random_vector(rng, 14);
    const RollingStats rs = rolling_stats(s, 14);
    auto base = sliding_correlations(q, s, rs);
    auto scaled = sliding_correlations((3.5 * q.array() - 7.0).matrix(), s, rs);
    auto negated = sliding_correlations((-0.25 * q.array() + 1.0).matrix(), s, rs);
    ASSERT_EQ(base.size(), scaled.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        EXPECT_NEAR(base[i].r, scaled[i].r, 1e-9);
        EXPECT_NEAR(base[i].r, -negated[i].r, 1e-9);
    }
}

} // namespace
} // namespace corrcast
