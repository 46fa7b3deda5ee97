#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cgeom/chart.hpp"

namespace cgeom {

using json = nlohmann::ordered_json;

// %.17g: round-trips every double, byte-stable across runs.
std::string fmt(double v);

json chart_header(const Chart& c);

// Columnar CSV: chart coordinates, then one column per component.
std::string field_csv(const GridField& f, const std::vector<std::string>& names = {});

// Generic table: header row then rows of numbers.
std::string table_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);
std::string sha256_hex(const std::string& bytes);

}  // namespace cgeom
