#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tcsde::test {

// Directory holding checked-in reference tables (TCSDE_TEST_DATA_DIR).
std::filesystem::path data_dir();

// Creates and returns a unique scratch directory under the system temp
// root; callers own cleanup (or leave it for the OS).
std::filesystem::path fresh_temp_dir(const std::string& tag);

struct MlReferenceRow {
  double beta = 0.0;
  double z = 0.0;
  double value = 0.0;
};

// Parses tests/data/ml_reference.csv (beta,z,value rows, '#' comments).
std::vector<MlReferenceRow> load_ml_reference();

double rel_err(double got, double want);

// Convenience runner so CLI tests can pass argv as an initializer list.
int run_cli_args(const std::vector<std::string>& args);

}  // namespace tcsde::test
