#include <gtest/gtest.h>

#include <sstream>

#include "corrcast/dataset.hpp"
#include "corrcast/error.hpp"
#include "corrcast/forecast.hpp"
#include "test_support.hpp"

namespace corrcast {
namespace {

using testing::CaptureWarnings;

Dataset parse(const std::string& text) {
    std::istringstream in(text);
    return parse_m4_values(in, "test.csv");
}

TEST(LoadValues, RaggedRowsKeepFileOrder) {
    Dataset d = parse("V1,V2,V3,V4\nD1,1,2,3\nD2,5,4,,\n");
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(d[0].id, "D1");
    EXPECT_EQ(d[0].size(), 3);
    EXPECT_EQ(d[1].id, "D2");
    EXPECT_EQ(d[1].size(), 2);
    EXPECT_DOUBLE_EQ(d[1].values[0], 5.0);
    EXPECT_EQ(d.find("D2"), std::optional<std::size_t>(1));
    EXPECT_EQ(d[0].frequency, Frequency::Daily);
    EXPECT_EQ(d[0].horizon, 14);
}

TEST(LoadValues, QuotedCellsAsInM4Files) {
    Dataset d = parse("\"V1\",\"V2\",\"V3\"\n\"D7\",\"1017.1\",\"1019.3\",\"\"\n");
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].id, "D7");
    EXPECT_EQ(d[0].size(), 2);
    EXPECT_DOUBLE_EQ(d[0].values[1], 1019.3);
}

TEST(LoadValues, NonNumericCellNamesRowAndColumn) {
    try {
        parse("V1,V2,V3,V4\nD1,1,x,3\n");
        FAIL() << "expected LoadError";
    } catch (const LoadError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("row D1"), std::string::npos) << msg;
        EXPECT_NE(msg.find("column 3"), std::string::npos) << msg;
    }
}

TEST(LoadValues, InteriorEmptyCellIsAnError) {
    EXPECT_THROW(parse("V\nD1,1,,3\n"), LoadError);
}

TEST(LoadValues, DuplicateIdIsAnError) {
    EXPECT_THROW(parse("V\nD1,1,2\nD1,3,4\n"), LoadError);
}

TEST(LoadValues, NonFiniteValueRejected) {
    EXPECT_THROW(parse("V\nD1,1,inf,3\n"), LoadError);
}

TEST(LoadValues, MissingFileIsLoadError) {
    EXPECT_THROW(load_m4_values("/nonexistent/corrcast/values.csv"), LoadError);
}

TEST(LoadValues, FileLoaderWarnsOnUnusualDailyLength) {
    testing::TempDir dir;
    testing::write_file(dir / "v.csv", "V\nD1,1,2,3\n");
    CaptureWarnings w;
    Dataset d = load_m4_values(dir / "v.csv");
    EXPECT_EQ(d.size(), 1u);
    ASSERT_EQ(w.messages.size(), 1u);
    EXPECT_NE(w.messages[0].find("93..9919"), std::string::npos);
}

TEST(RoundTrip, WriteThenParseIsBitExact) {
    std::mt19937_64 rng(7);
    std::vector<TimeSeries> series;
    for (int i = 0; i < 20; ++i) {
        std::uniform_int_distribution<Index> len(1, 50);
        Vector v = testing::random_vector(rng, len(rng), -1e9, 1e9);
        if (i % 3 == 0) v *= 1e-7;
        series.push_back(testing::make_series("D" + std::to_string(i + 1), v));
    }
    Dataset d(std::move(series));
    std::stringstream buf;
    write_m4_values(buf, d);
    Dataset back = parse_m4_values(buf);
    ASSERT_EQ(back.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        EXPECT_EQ(back[i].id, d[i].id);
        ASSERT_EQ(back[i].size(), d[i].size());
        for (Index t = 0; t < d[i].size(); ++t) EXPECT_EQ(back[i].values[t], d[i].values[t]);
    }
}

TEST(LoadInfo, ParsesHorizonLabelAndDate) {
    std::istringstream in("M4id,category,Frequency,Horizon,SP,StartingDate\n"
                          "D1,Macro,1,14,Daily,1994-01-01 12:00\n"
                          "D2,Micro,1,14,Daily,01-07-07 12:00\n");
    MetaTable meta = parse_m4_info(in);
    ASSERT_EQ(meta.size(), 2u);
    const SeriesMeta& d1 = meta.at("D1");
    EXPECT_EQ(d1.horizon, std::optional<Index>(14));
    EXPECT_EQ(d1.frequency, std::optional<Frequency>(Frequency::Daily));
    EXPECT_EQ(d1.seasonal_period, std::optional<Index>(1));
    ASSERT_TRUE(d1.start_date);
    EXPECT_EQ(format_date(*d1.start_date), "1994-01-01");
    ASSERT_TRUE(meta.at("D2").start_date);
    EXPECT_EQ(format_date(*meta.at("D2").start_date), "2007-07-01");
}

TEST(LoadInfo, UnparseableDateWarnsAndIsAbsent) {
    std::istringstream in("M4id,Horizon,StartingDate\nD1,14,soon\n");
    CaptureWarnings w;
    MetaTable meta = parse_m4_info(in);
    EXPECT_FALSE(meta.at("D1").start_date);
    EXPECT_EQ(meta.at("D1").horizon, std::optional<Index>(14));
    EXPECT_EQ(w.messages.size(), 1u);
}

TEST(LoadInfo, AttachMetaSetsDatesAndHorizon) {
    Dataset d = parse("V\nD1,1,2,3\nD2,4,5\n");
    std::istringstream in("M4id,Horizon,StartingDate\nD1,7,2001-02-03\n");
    d.attach_meta(parse_m4_info(in));
    EXPECT_EQ(d[0].horizon, 7);
    ASSERT_TRUE(d[0].start_date);
    EXPECT_EQ(format_date(*d[0].date_at(2)), "2001-02-05");
    EXPECT_FALSE(d[1].start_date);
    EXPECT_FALSE(d.has_dates());
}

TEST(Dates, RejectsInvalidCalendarDates) {
    EXPECT_FALSE(parse_date("2001-02-30"));
    EXPECT_FALSE(parse_date(""));
    EXPECT_FALSE(parse_date("12/2001"));
    EXPECT_TRUE(parse_date("2000-02-29"));
}

TEST(Holdout, MovesLastValuesToTest) {
    Dataset d = parse("V\nD1,1,2,3,4,5\n");
    HoldoutSplit s = holdout_split(d, 2);
    EXPECT_EQ(s.train[0].values, (Vector(3) << 1, 2, 3).finished());
    EXPECT_EQ(s.test.at("D1"), (Vector(2) << 4, 5).finished());
}

TEST(Holdout, SeriesNotLongerThanHorizonIsError) {
    Dataset d(std::vector<TimeSeries>{testing::make_series("D1", Vector::LinSpaced(14, 1, 14))});
    try {
        holdout_split(d, 14);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("D1"), std::string::npos);
    }
}

TEST(Holdout, ConcatenationIsIdentity) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        std::uniform_int_distribution<Index> len(15, 80);
        std::uniform_int_distribution<Index> hd(1, 14);
        std::vector<TimeSeries> series;
        for (int i = 0; i < 5; ++i) series.push_back(testing::make_series("D" + std::to_string(i), testing::random_walk(rng, len(rng))));
        Dataset d(std::move(series));
        const Index h = hd(rng);
        HoldoutSplit s = holdout_split(d, h);
        for (std::size_t i = 0; i < d.size(); ++i) {
            const Vector& test = s.test.at(d[i].id);
            ASSERT_EQ(test.size(), h);
            ASSERT_EQ(s.train[i].size() + h, d[i].size());
            Vector joined(d[i].size());
            joined << s.train[i].values, test;
            EXPECT_EQ(joined, d[i].values);
        }
    }
}

TEST(ForecastCsv, HeaderAndRoundTrip) {
    std::vector<Forecast> f{{"D1", (Vector(3) << 1.5, 2, 1e-12).finished(), Method::Naive},
                            {"D2", (Vector(3) << 0.1, 0.2, 0.3).finished(), Method::Correlator}};
    std::stringstream buf;
    write_forecast_csv(buf, f);
    EXPECT_EQ(buf.str().substr(0, buf.str().find('\n')), "id,F1,F2,F3");
    ForecastTable t = read_forecast_csv(buf);
    EXPECT_EQ(t.at("D1"), f[0].values);
    EXPECT_EQ(t.at("D2"), f[1].values);

    std::stringstream prov;
    write_provenance_csv(prov, f);
    EXPECT_EQ(prov.str(), "id,method\nD1,Naive\nD2,Correlator\n");
}

TEST(FormatValue, ShortestRoundTrip) {
    EXPECT_EQ(format_value(0.1), "0.1");
    EXPECT_EQ(format_value(1017.1), "1017.1");
    EXPECT_EQ(std::stod(format_value(1.0 / 3.0)), 1.0 / 3.0);
}

} // namespace
} // namespace corrcast
