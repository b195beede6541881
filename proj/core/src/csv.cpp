#include "tcsde/csv.hpp"

#include <unistd.h>

#include <cstdio>
#include <fstream>

#include "tcsde/errors.hpp"

namespace tcsde {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_to_string(const CsvTable& table) {
  std::string out;
  for (const auto& m : table.metadata) {
    out += "# ";
    out += m;
    out += '\n';
  }
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c > 0) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw ParameterError("CSV row width does not match the header");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

void write_text_atomic(const std::filesystem::path& path,
                       std::string_view content) {
  std::error_code ec;
  const auto parent = path.parent_path();
  if (!parent.empty()) {
    std::filesystem::create_directories(parent, ec);
    if (ec) {
      throw IoError("cannot create directory " + parent.string() + ": " +
                    ec.message());
    }
  }
  const auto tmp = path.string() + ".tmp." +
                   std::to_string(static_cast<unsigned long>(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("short write to " + tmp);
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move " + tmp + " into place: " + ec.message());
  }
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char b : bytes) {
    hash ^= b;
    hash *= 0x00000100000001B3ULL;
  }
  return hash;
}

std::string fnv1a64_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

CsvTable grid_path_table(const GridPath& path, const std::string& value_name) {
  CsvTable t;
  t.metadata.push_back("t0=" + format_double(path.t0));
  t.metadata.push_back("dt=" + format_double(path.dt));
  t.columns = {"time", value_name};
  t.rows.reserve(path.size());
  for (std::size_t k = 0; k < path.size(); ++k) {
    t.rows.push_back({path.time_at(k), path.values[k]});
  }
  return t;
}

CsvTable vector_path_table(const VectorPath& path) {
  CsvTable t;
  t.metadata.push_back("t0=" + format_double(path.t0));
  t.metadata.push_back("dt=" + format_double(path.dt));
  t.columns.push_back("time");
  for (Eigen::Index d = 0; d < path.values.rows(); ++d) {
    t.columns.push_back("x" + std::to_string(d));
  }
  t.rows.reserve(path.size());
  for (std::size_t k = 0; k < path.size(); ++k) {
    std::vector<double> row{path.time_at(k)};
    for (Eigen::Index d = 0; d < path.values.rows(); ++d) {
      row.push_back(path.values(d, static_cast<Eigen::Index>(k)));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable moment_curve_table(const MomentCurve& curve) {
  CsvTable t;
  t.metadata.push_back("p=" + format_double(curve.p));
  t.metadata.push_back("n_paths=" + std::to_string(curve.n_paths));
  t.columns = {"time", "estimate", "std_error"};
  t.rows.reserve(curve.times.size());
  for (std::size_t k = 0; k < curve.times.size(); ++k) {
    t.rows.push_back({curve.times[k], curve.estimates[k], curve.std_errors[k]});
  }
  return t;
}

CsvTable residual_report_table(const ResidualReport& report) {
  CsvTable t;
  t.metadata.push_back(std::string("check=") + check_kind_name(report.kind));
  if (report.fitted_order) {
    t.metadata.push_back("fitted_order=" + format_double(*report.fitted_order));
  }
  t.columns = {"calendar_step", "operational_step", "max_abs_residual"};
  for (std::size_t r = 0; r < report.grid_steps.size(); ++r) {
    t.rows.push_back({report.grid_steps[r].first, report.grid_steps[r].second,
                      report.max_abs_residual[r]});
  }
  return t;
}

}  // namespace tcsde
