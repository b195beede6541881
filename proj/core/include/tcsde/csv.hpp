#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tcsde/calculus.hpp"
#include "tcsde/grid_path.hpp"
#include "tcsde/sde.hpp"
#include "tcsde/stability.hpp"

namespace tcsde {

// Numeric table with '#'-prefixed metadata lines. All values render with
// %.17g, so emitted doubles round-trip exactly.
struct CsvTable {
  std::vector<std::string> metadata;  // key=value, '#' prepended on write
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string format_double(double v);

std::string csv_to_string(const CsvTable& table);

// Writes via a temp file in the same directory plus rename, so readers
// never observe a partial file.
void write_text_atomic(const std::filesystem::path& path,
                       std::string_view content);

std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

CsvTable grid_path_table(const GridPath& path, const std::string& value_name);
CsvTable vector_path_table(const VectorPath& path);
CsvTable moment_curve_table(const MomentCurve& curve);
CsvTable residual_report_table(const ResidualReport& report);

}  // namespace tcsde
