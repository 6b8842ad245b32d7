#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace corrcast {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;

/// Calendar date, one tick per day.
using Date = std::chrono::sys_days;

enum class Frequency { Hourly, Daily, Weekly, Monthly, Quarterly, Yearly };

std::optional<Frequency> parse_frequency(std::string_view text);
std::string_view to_string(Frequency f);

/// M4 competitors'-guide seasonality: 24, 1, 1, 12, 4, 1.
Index default_seasonality(Frequency f);
/// M4 horizons: 48, 14, 13, 18, 8, 6.
Index default_horizon(Frequency f);

struct TimeSeries {
    std::string id;
    Vector values;
    std::optional<Date> start_date;
    Frequency frequency = Frequency::Daily;
    Index horizon = 14;

    Index size() const { return values.size(); }

    /// Date of the value at 0-based position `i`, assuming one value per day.
    std::optional<Date> date_at(Index i) const {
        if (!start_date) return std::nullopt;
        return *start_date + std::chrono::days{i};
    }
};

/// Per-series metadata from the M4 info file.
struct SeriesMeta {
    std::optional<Frequency> frequency;
    std::optional<Index> horizon;
    std::optional<Index> seasonal_period;
    std::optional<Date> start_date;
};

using MetaTable = std::unordered_map<std::string, SeriesMeta>;

/// Ordered, id-indexed collection of series. Iteration order is file order.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::vector<TimeSeries> series);

    /// Throws LoadError on a duplicate id.
    void add(TimeSeries series);

    std::size_t size() const { return series_.size(); }
    bool empty() const { return series_.empty(); }

    const TimeSeries& operator[](std::size_t i) const { return series_[i]; }
    TimeSeries& operator[](std::size_t i) { return series_[i]; }

    std::optional<std::size_t> find(std::string_view id) const;
    const TimeSeries& at(std::string_view id) const;

    auto begin() const { return series_.begin(); }
    auto end() const { return series_.end(); }

    /// Copies horizon, frequency and start date onto matching series.
    /// Ids absent from `meta` are left untouched.
    void attach_meta(const MetaTable& meta);

    /// True when every series carries a start date.
    bool has_dates() const;

private:
    std::vector<TimeSeries> series_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct HoldoutSplit {
    Dataset train;
    std::map<std::string, Vector> test;
};

/// M4 values CSV: header row, then `id,v1,v2,...` with ragged trailing cells.
Dataset load_m4_values(const std::filesystem::path& path);
Dataset parse_m4_values(std::istream& in, std::string_view source = "<stream>");
void write_m4_values(std::ostream& out, const Dataset& d);

/// M4 info CSV. Columns are located by header name (M4id/id, Horizon,
/// SP or category label, Frequency, StartingDate). Unparseable dates are
/// warned about and treated as absent.
MetaTable load_m4_info(const std::filesystem::path& path);
MetaTable parse_m4_info(std::istream& in, std::string_view source = "<stream>");

/// Splits the last h values of each series off as the test set.
HoldoutSplit holdout_split(const Dataset& d, Index h);

/// Accepts `YYYY-MM-DD` and the M4 `dd-mm-yy` form, each optionally
/// followed by a time of day (ignored).
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date d);

/// Shortest decimal text that reads back to the same double.
std::string format_value(double v);

/// Warns when a Daily series falls outside the 93..9919 length range.
void check_daily_lengths(const Dataset& d);

} // namespace corrcast
