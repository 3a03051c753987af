#include "cyclo/bench.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "cyclo/error.hpp"

namespace cyclo {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if (std::isspace(u) || c == '(' || c == ')' || c == ',' || c == '=' || c == '#') return false;
  }
  return true;
}

[[noreturn]] void syntax(int line, const std::string& what) {
  throw Error(ErrorCode::SyntaxError, "line " + std::to_string(line) + ": " + what);
}

// Splits "KIND(a, b, c)" into the kind token and argument list.
std::pair<std::string_view, std::vector<std::string>> call(std::string_view s, int line) {
  auto open = s.find('(');
  auto close = s.rfind(')');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open ||
      !trim(s.substr(close + 1)).empty())
    syntax(line, "expected KIND(args)");
  std::string_view head = trim(s.substr(0, open));
  std::vector<std::string> args;
  std::string_view body = s.substr(open + 1, close - open - 1);
  if (!trim(body).empty()) {
    std::size_t pos = 0;
    while (true) {
      auto comma = body.find(',', pos);
      std::string_view tok =
          trim(body.substr(pos, comma == std::string_view::npos ? body.npos : comma - pos));
      if (!valid_identifier(tok)) syntax(line, "bad wire name '" + std::string(tok) + "'");
      args.emplace_back(tok);
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
  }
  return {head, std::move(args)};
}

}  // namespace

Netlist parse_bench(std::string_view text, const BenchOptions& opts) {
  NetlistBuilder b(opts.name);
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::string_view line = trim(raw);
    if (line.empty()) continue;

    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      auto [head, args] = call(line, line_no);
      if (args.size() != 1) syntax(line_no, "INPUT/OUTPUT take exactly one wire");
      std::string up(head);
      for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      if (up == "INPUT") {
        if (args[0].rfind(opts.key_prefix, 0) == 0 && !opts.key_prefix.empty())
          b.add_key_input(args[0], line_no);
        else
          b.add_input(args[0], line_no);
      } else if (up == "OUTPUT") {
        b.add_output(args[0], line_no);
      } else {
        syntax(line_no, "unknown declaration '" + std::string(head) + "'");
      }
      continue;
    }

    std::string_view lhs = trim(line.substr(0, eq));
    if (!valid_identifier(lhs)) syntax(line_no, "bad wire name '" + std::string(lhs) + "'");
    auto [head, args] = call(trim(line.substr(eq + 1)), line_no);
    auto kind = parse_gate_kind(head);
    if (!kind) {
      std::string h(head);
      std::string hint = (h == "DFF" || h == "dff") ? " (sequential elements are not supported)" : "";
      throw Error(ErrorCode::UnsupportedGate, "line " + std::to_string(line_no) + ": gate kind '" +
                                                  h + "'" + hint);
    }
    b.add_gate(std::string(lhs), *kind, std::move(args), line_no);
  }
  return b.build();
}

Netlist read_bench_file(const std::string& path, const BenchOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  BenchOptions o = opts;
  if (o.name == "top") {
    auto slash = path.find_last_of('/');
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    if (auto dot = base.rfind('.'); dot != std::string::npos) base.resize(dot);
    o.name = base;
  }
  return parse_bench(ss.str(), o);
}

std::string serialize_bench(const Netlist& n) {
  std::ostringstream out;
  out << "# " << n.name() << "\n";
  out << "# " << n.inputs().size() << " inputs, " << n.key_inputs().size() << " key inputs, "
      << n.outputs().size() << " outputs, " << n.gate_count() << " gates\n\n";
  for (WireId w : n.declared_inputs()) out << "INPUT(" << n.wire_name(w) << ")\n";
  out << "\n";
  for (WireId w : n.outputs()) out << "OUTPUT(" << n.wire_name(w) << ")\n";
  out << "\n";
  for (const Gate& g : n.gates()) {
    out << n.wire_name(g.output) << " = " << to_string(g.kind) << "(";
    for (std::size_t i = 0; i < g.inputs.size(); ++i)
      out << (i ? ", " : "") << n.wire_name(g.inputs[i]);
    out << ")\n";
  }
  return out.str();
}

void write_bench_file(const Netlist& n, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  out << serialize_bench(n);
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

}  // namespace cyclo
