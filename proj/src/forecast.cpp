#include "corrcast/forecast.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <ostream>

#include "corrcast/error.hpp"
#include "csv.hpp"

namespace corrcast {

namespace {
constexpr std::array<std::string_view, 6> kMethodNames{"Naive", "SES", "Custom",
                                                       "Correlator", "Ensemble", "External"};
}

std::string_view to_string(Method m) { return kMethodNames[static_cast<std::size_t>(m)]; }

std::optional<Method> parse_method(std::string_view text) {
    auto want = detail::lower(detail::trim(text));
    for (std::size_t i = 0; i < kMethodNames.size(); ++i) {
        if (detail::lower(kMethodNames[i]) == want) return static_cast<Method>(i);
    }
    return std::nullopt;
}

void write_forecast_csv(std::ostream& out, const std::vector<Forecast>& forecasts) {
    Index width = 0;
    for (const auto& f : forecasts) width = std::max(width, f.values.size());
    out << "id";
    for (Index i = 1; i <= width; ++i) out << ",F" << i;
    out << '\n';
    for (const auto& f : forecasts) {
        out << f.id;
        for (Index i = 0; i < f.values.size(); ++i) out << ',' << format_value(f.values[i]);
        out << '\n';
    }
}

void write_forecast_csv(const std::filesystem::path& path, const std::vector<Forecast>& forecasts) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    write_forecast_csv(out, forecasts);
}

ForecastTable read_forecast_csv(std::istream& in, std::string_view source) {
    // Same ragged layout as the values file.
    Dataset d = parse_m4_values(in, source);
    ForecastTable table;
    for (const auto& s : d) table.emplace(s.id, s.values);
    return table;
}

ForecastTable read_forecast_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open " + path.string());
    return read_forecast_csv(in, path.string());
}

void write_provenance_csv(std::ostream& out, const std::vector<Forecast>& forecasts) {
    out << "id,method\n";
    for (const auto& f : forecasts) out << f.id << ',' << to_string(f.method) << '\n';
}

std::map<std::string, Method> read_provenance_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open " + path.string());
    std::map<std::string, Method> out;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() < 2) throw LoadError(path.string() + ": malformed provenance row '" + line + "'");
        auto m = parse_method(cells[1]);
        if (!m) throw LoadError(path.string() + ": unknown method '" + cells[1] + "'");
        out[cells[0]] = *m;
    }
    return out;
}

ForecastTable to_table(const std::vector<Forecast>& forecasts) {
    ForecastTable t;
    for (const auto& f : forecasts) t.emplace(f.id, f.values);
    return t;
}

} // namespace corrcast
