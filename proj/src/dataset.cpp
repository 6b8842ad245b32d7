#include "corrcast/dataset.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "corrcast/error.hpp"
#include "corrcast/log.hpp"
#include "csv.hpp"

namespace corrcast {

namespace {

constexpr std::array<std::string_view, 6> kFrequencyNames{"Hourly", "Daily", "Weekly",
                                                          "Monthly", "Quarterly", "Yearly"};

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open " + path.string());
    return in;
}

} // namespace

std::optional<Frequency> parse_frequency(std::string_view text) {
    auto want = detail::lower(detail::trim(text));
    for (std::size_t i = 0; i < kFrequencyNames.size(); ++i) {
        if (detail::lower(kFrequencyNames[i]) == want) return static_cast<Frequency>(i);
    }
    return std::nullopt;
}

std::string_view to_string(Frequency f) { return kFrequencyNames[static_cast<std::size_t>(f)]; }

Index default_seasonality(Frequency f) {
    switch (f) {
    case Frequency::Hourly: return 24;
    case Frequency::Monthly: return 12;
    case Frequency::Quarterly: return 4;
    default: return 1;
    }
}

Index default_horizon(Frequency f) {
    switch (f) {
    case Frequency::Hourly: return 48;
    case Frequency::Daily: return 14;
    case Frequency::Weekly: return 13;
    case Frequency::Monthly: return 18;
    case Frequency::Quarterly: return 8;
    case Frequency::Yearly: return 6;
    }
    return 14;
}

Dataset::Dataset(std::vector<TimeSeries> series) {
    series_.reserve(series.size());
    for (auto& s : series) add(std::move(s));
}

void Dataset::add(TimeSeries series) {
    auto [it, inserted] = index_.emplace(series.id, series_.size());
    if (!inserted) throw LoadError("duplicate series id " + series.id);
    series_.push_back(std::move(series));
}

std::optional<std::size_t> Dataset::find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const TimeSeries& Dataset::at(std::string_view id) const {
    auto pos = find(id);
    if (!pos) throw Error("unknown series id " + std::string(id));
    return series_[*pos];
}

void Dataset::attach_meta(const MetaTable& meta) {
    for (auto& s : series_) {
        auto it = meta.find(s.id);
        if (it == meta.end()) continue;
        const SeriesMeta& m = it->second;
        if (m.frequency) s.frequency = *m.frequency;
        if (m.horizon) s.horizon = *m.horizon;
        s.start_date = m.start_date;
    }
}

bool Dataset::has_dates() const {
    for (const auto& s : series_)
        if (!s.start_date) return false;
    return !series_.empty();
}

Dataset parse_m4_values(std::istream& in, std::string_view source) {
    Dataset d;
    std::string line;
    if (!std::getline(in, line)) return d; // header
    std::size_t row = 1;
    std::vector<double> buffer;
    while (std::getline(in, line)) {
        ++row;
        if (detail::trim(line).empty()) continue;
        auto cells = detail::split_csv_line(line);
        const std::string& id = cells.front();
        if (id.empty()) {
            throw LoadError(std::string(source) + ": row " + std::to_string(row) + " has an empty series id");
        }

        std::size_t last = cells.size();
        while (last > 1 && detail::is_missing_cell(cells[last - 1])) --last;
        if (last == 1) throw LoadError(std::string(source) + ": series " + id + " has no values");

        buffer.clear();
        for (std::size_t c = 1; c < last; ++c) {
            auto v = detail::parse_double(cells[c]);
            if (!v || !std::isfinite(*v)) {
                throw LoadError(std::string(source) + ": row " + id + ", column " + std::to_string(c + 1) +
                                ": invalid value '" + cells[c] + "'");
            }
            buffer.push_back(*v);
        }

        TimeSeries s;
        s.id = id;
        s.values = Eigen::Map<const Vector>(buffer.data(), static_cast<Index>(buffer.size()));
        if (id.size() > 1) {
            // M4 ids carry the frequency as their first letter.
            switch (id.front()) {
            case 'H': s.frequency = Frequency::Hourly; break;
            case 'D': s.frequency = Frequency::Daily; break;
            case 'W': s.frequency = Frequency::Weekly; break;
            case 'M': s.frequency = Frequency::Monthly; break;
            case 'Q': s.frequency = Frequency::Quarterly; break;
            case 'Y': s.frequency = Frequency::Yearly; break;
            default: break;
            }
        }
        s.horizon = default_horizon(s.frequency);
        d.add(std::move(s));
    }
    return d;
}

Dataset load_m4_values(const std::filesystem::path& path) {
    auto in = open_input(path);
    Dataset d = parse_m4_values(in, path.string());
    check_daily_lengths(d);
    return d;
}

void write_m4_values(std::ostream& out, const Dataset& d) {
    Index width = 0;
    for (const auto& s : d) width = std::max(width, s.size());
    out << "id";
    for (Index i = 1; i <= width; ++i) out << ",V" << i;
    out << '\n';
    for (const auto& s : d) {
        out << s.id;
        for (Index i = 0; i < s.size(); ++i) out << ',' << format_value(s.values[i]);
        out << '\n';
    }
}

MetaTable parse_m4_info(std::istream& in, std::string_view source) {
    MetaTable table;
    std::string line;
    if (!std::getline(in, line)) return table;
    auto header = detail::split_csv_line(line);

    std::optional<std::size_t> id_col, horizon_col, label_col, period_col, date_col;
    for (std::size_t c = 0; c < header.size(); ++c) {
        auto name = detail::lower(header[c]);
        if (name == "m4id" || name == "id") id_col = c;
        else if (name == "horizon") horizon_col = c;
        else if (name == "sp") label_col = c;
        else if (name == "frequency") period_col = c;
        else if (name == "startingdate" || name == "start_date" || name == "start") date_col = c;
    }
    if (!id_col) throw LoadError(std::string(source) + ": info file has no M4id/id column");

    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (detail::trim(line).empty()) continue;
        auto cells = detail::split_csv_line(line);
        auto cell = [&](std::optional<std::size_t> col) -> std::string_view {
            if (!col || *col >= cells.size()) return {};
            return cells[*col];
        };

        SeriesMeta m;
        if (auto h = detail::parse_int(cell(horizon_col)); h && *h > 0) m.horizon = *h;
        m.frequency = parse_frequency(cell(label_col));
        if (auto p = detail::parse_int(cell(period_col)); p && *p > 0) {
            m.seasonal_period = *p;
        } else if (!m.frequency) {
            // Some exports put the label under "Frequency".
            m.frequency = parse_frequency(cell(period_col));
        }
        if (auto text = cell(date_col); !text.empty()) {
            m.start_date = parse_date(text);
            if (!m.start_date) {
                warn(std::string(source) + ": row " + std::to_string(row) + ": unparseable date '" +
                     std::string(text) + "', treating as absent");
            }
        }
        table[std::string(cell(id_col))] = m;
    }
    return table;
}

MetaTable load_m4_info(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_m4_info(in, path.string());
}

HoldoutSplit holdout_split(const Dataset& d, Index h) {
    if (h < 1) throw ConfigError("holdout horizon must be positive");
    HoldoutSplit split;
    for (const auto& s : d) {
        if (s.size() <= h) {
            throw Error("series " + s.id + " has " + std::to_string(s.size()) +
                        " values, needs more than the holdout horizon " + std::to_string(h));
        }
        TimeSeries train = s;
        train.values = s.values.head(s.size() - h);
        split.test.emplace(s.id, s.values.tail(h));
        split.train.add(std::move(train));
    }
    return split;
}

std::optional<Date> parse_date(std::string_view text) {
    using namespace std::chrono;
    text = detail::trim(text);
    if (auto space = text.find_first_of(" T"); space != std::string_view::npos) text = text.substr(0, space);

    std::array<std::string_view, 3> parts;
    char sep = 0;
    std::size_t n = 0;
    std::size_t begin = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '-' || text[i] == '/') {
            if (n == 3) return std::nullopt;
            if (i < text.size()) {
                if (sep != 0 && text[i] != sep) return std::nullopt;
                sep = text[i];
            }
            parts[n++] = text.substr(begin, i - begin);
            begin = i + 1;
        }
    }
    if (n != 3) return std::nullopt;

    auto a = detail::parse_int(parts[0]);
    auto b = detail::parse_int(parts[1]);
    auto c = detail::parse_int(parts[2]);
    if (!a || !b || !c) return std::nullopt;

    int y = 0;
    unsigned m = 0;
    unsigned dd = 0;
    if (parts[0].size() == 4) {
        y = static_cast<int>(*a);
        m = static_cast<unsigned>(*b);
        dd = static_cast<unsigned>(*c);
    } else if (parts[2].size() == 4) {
        dd = static_cast<unsigned>(*a);
        m = static_cast<unsigned>(*b);
        y = static_cast<int>(*c);
    } else if (parts[2].size() == 2) {
        // M4-info style dd-mm-yy; years 00-29 are 20xx.
        dd = static_cast<unsigned>(*a);
        m = static_cast<unsigned>(*b);
        y = static_cast<int>(*c) < 30 ? 2000 + static_cast<int>(*c) : 1900 + static_cast<int>(*c);
    } else {
        return std::nullopt;
    }

    year_month_day ymd{year{y}, month{m}, day{dd}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd};
}

std::string format_date(Date d) {
    std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string format_value(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) return std::to_string(v);
    return std::string(buf, ptr);
}

void check_daily_lengths(const Dataset& d) {
    std::size_t outside = 0;
    const TimeSeries* first = nullptr;
    for (const auto& s : d) {
        if (s.frequency == Frequency::Daily && (s.size() < 93 || s.size() > 9919)) {
            if (!first) first = &s;
            ++outside;
        }
    }
    if (first) {
        warn(std::to_string(outside) + " Daily series outside the usual length range 93..9919 (first: " +
             first->id + ", " + std::to_string(first->size()) + " values)");
    }
}

} // namespace corrcast
