#include "helpers.hpp"

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tcsde/commands.hpp"

#ifndef TCSDE_TEST_DATA_DIR
#error "TCSDE_TEST_DATA_DIR must be defined by the build"
#endif

namespace tcsde::test {

std::filesystem::path data_dir() { return TCSDE_TEST_DATA_DIR; }

std::filesystem::path fresh_temp_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto dir = std::filesystem::temp_directory_path() /
                   ("tcsde_test_" + tag + "_" +
                    std::to_string(static_cast<long>(::getpid())) + "_" +
                    std::to_string(counter.fetch_add(1)));
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<MlReferenceRow> load_ml_reference() {
  const auto path = data_dir() / "ml_reference.csv";
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::vector<MlReferenceRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("beta", 0) == 0) continue;  // header
    std::istringstream ss(line);
    MlReferenceRow row;
    char comma = 0;
    if (!(ss >> row.beta >> comma >> row.z >> comma >> row.value)) {
      throw std::runtime_error("malformed row in " + path.string() + ": " +
                               line);
    }
    rows.push_back(row);
  }
  return rows;
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

int run_cli_args(const std::vector<std::string>& args) {
  // argv[0] is the program name, which the parser skips
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("tcsde");
  for (const auto& a : args) argv.push_back(a.c_str());
  return tcsde::run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace tcsde::test
