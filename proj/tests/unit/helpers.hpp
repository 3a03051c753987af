#pragma once

#include <string>

#include "cyclo/bench.hpp"
#include "cyclo/netlist.hpp"

namespace testing {

inline std::string data_path(const std::string& file) { return std::string(CYCLO_TEST_DATA) + "/" + file; }
inline std::string bench_path(const std::string& name) {
  return std::string(CYCLO_BENCH_DIR) + "/" + name + ".bench";
}

inline cyclo::Netlist load(const std::string& file) { return cyclo::read_bench_file(data_path(file)); }
inline cyclo::Netlist load_bench(const std::string& name) {
  return cyclo::read_bench_file(bench_path(name));
}

}  // namespace testing
