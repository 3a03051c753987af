#pragma once

#include <string>
#include <string_view>

#include "cyclo/netlist.hpp"

namespace cyclo {

struct BenchOptions {
  std::string key_prefix = "keyinput";
  std::string name = "top";
};

/// Parses ISCAS bench text. INPUT lines whose name starts with the key prefix
/// become key inputs. Gate order and wire names are kept verbatim.
Netlist parse_bench(std::string_view text, const BenchOptions& opts = {});
Netlist read_bench_file(const std::string& path, const BenchOptions& opts = {});

std::string serialize_bench(const Netlist& n);
void write_bench_file(const Netlist& n, const std::string& path);

}  // namespace cyclo
