#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corrcast/dataset.hpp"

namespace corrcast {

enum class Method { Naive, SES, Custom, Correlator, Ensemble, External };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view text);

struct Forecast {
    std::string id;
    Vector values;
    Method method = Method::Ensemble;
};

/// id -> forecast values, as read from a forecast CSV.
using ForecastTable = std::map<std::string, Vector>;

/// Forecast CSV: header `id,F1,...,Fh` (h = longest forecast), one row per
/// series, values printed in shortest round-trip form.
void write_forecast_csv(std::ostream& out, const std::vector<Forecast>& forecasts);
void write_forecast_csv(const std::filesystem::path& path, const std::vector<Forecast>& forecasts);

ForecastTable read_forecast_csv(const std::filesystem::path& path);
ForecastTable read_forecast_csv(std::istream& in, std::string_view source = "<stream>");

/// Provenance CSV: `id,method`.
void write_provenance_csv(std::ostream& out, const std::vector<Forecast>& forecasts);
std::map<std::string, Method> read_provenance_csv(const std::filesystem::path& path);

ForecastTable to_table(const std::vector<Forecast>& forecasts);

} // namespace corrcast
