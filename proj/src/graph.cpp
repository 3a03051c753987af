#include "cyclo/graph.hpp"

#include <algorithm>

namespace cyclo {

Adjacency gate_successors(const Netlist& n) {
  Adjacency succ(n.gate_count());
  for (std::size_t g = 0; g < n.gate_count(); ++g) succ[g] = n.fanout(n.gates()[g].output);
  return succ;
}

Adjacency gate_predecessors(const Netlist& n) {
  Adjacency pred(n.gate_count());
  for (std::size_t g = 0; g < n.gate_count(); ++g) {
    for (WireId w : n.gates()[g].inputs)
      if (int d = n.driver(w); d != kNoGate) pred[g].push_back(d);
    std::sort(pred[g].begin(), pred[g].end());
    pred[g].erase(std::unique(pred[g].begin(), pred[g].end()), pred[g].end());
  }
  return pred;
}

std::vector<int> strongly_connected_components(const Adjacency& succ, int* count) {
  const int n = static_cast<int>(succ.size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  std::vector<std::pair<int, std::size_t>> call;
  int next_index = 0, next_comp = 0;

  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, pos] = call.back();
      if (pos < succ[v].size()) {
        int w = succ[v][pos++];
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      int done = v;
      call.pop_back();
      if (low[done] == index[done]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = next_comp;
        } while (w != done);
        ++next_comp;
      }
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
    }
  }
  if (count) *count = next_comp;
  return comp;
}

std::vector<char> cyclic_vertices(const Adjacency& succ) {
  int count = 0;
  auto comp = strongly_connected_components(succ, &count);
  std::vector<int> size(count, 0);
  for (int c : comp) ++size[c];
  std::vector<char> out(succ.size(), 0);
  for (std::size_t v = 0; v < succ.size(); ++v) {
    if (size[comp[v]] > 1) out[v] = 1;
    for (int w : succ[v])
      if (w == static_cast<int>(v)) out[v] = 1;
  }
  return out;
}

std::vector<char> fanin_cone(const Netlist& n, WireId w) {
  std::vector<char> mask(n.gate_count(), 0);
  std::vector<int> todo;
  if (int d = n.driver(w); d != kNoGate) todo.push_back(d);
  while (!todo.empty()) {
    int g = todo.back();
    todo.pop_back();
    if (mask[g]) continue;
    mask[g] = 1;
    for (WireId in : n.gates()[g].inputs)
      if (int d = n.driver(in); d != kNoGate && !mask[d]) todo.push_back(d);
  }
  return mask;
}

std::vector<char> fanout_cone(const Netlist& n, WireId w) {
  std::vector<char> mask(n.gate_count(), 0);
  std::vector<int> todo(n.fanout(w).begin(), n.fanout(w).end());
  while (!todo.empty()) {
    int g = todo.back();
    todo.pop_back();
    if (mask[g]) continue;
    mask[g] = 1;
    for (int s : n.fanout(n.gates()[g].output))
      if (!mask[s]) todo.push_back(s);
  }
  return mask;
}

}  // namespace cyclo
