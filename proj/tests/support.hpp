#pragma once

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "loadsched/io.hpp"
#include "loadsched/timegrid.hpp"

namespace test {

inline std::filesystem::path data_dir() { return LOADSCHED_DATA_DIR; }

inline std::vector<loadsched::Appliance> table1() {
  return loadsched::io::load_catalog(data_dir() / "table1_catalog.csv");
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("loadsched_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Random start for every shiftable run, inside its window.
inline loadsched::Schedule random_schedule(const std::vector<loadsched::Appliance>& appliances, std::mt19937_64& rng) {
  auto s = loadsched::Schedule::baseline(appliances);
  for (const auto& a : appliances) {
    if (!a.shiftable()) continue;
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
      const auto& r = a.runs[i];
      s.assignments[a.id][i] = std::uniform_int_distribution<int>(r.allowed_start_min, r.allowed_start_max)(rng);
    }
  }
  return s;
}

}  // namespace test
