#include <algorithm>
#include <functional>
#include <map>

#include "silc/frontend.hpp"

namespace silc {

namespace {

void collect_callees(const Block& b, std::vector<std::string>& out) {
  for (const auto& s : b) {
    if (s.kind == Stmt::Kind::Call && !is_builtin(s.callee) &&
        std::find(out.begin(), out.end(), s.callee) == out.end())
      out.push_back(s.callee);
    collect_callees(s.then_block, out);
    collect_callees(s.else_block, out);
  }
}

}  // namespace

const std::vector<std::string>* CallGraph::scc_of(const std::string& fn) const {
  for (const auto& c : sccs)
    if (std::find(c.begin(), c.end(), fn) != c.end()) return &c;
  return nullptr;
}

// Tarjan's algorithm; it emits components callees-first.
CallGraph build_call_graph(const Program& p) {
  CallGraph g;
  std::map<std::string, std::vector<std::string>> succ;
  for (const auto& f : p.functions) {
    g.nodes.push_back(f.name);
    auto& out = succ[f.name];
    collect_callees(f.body, out);
    for (const auto& c : out) g.edges.emplace_back(f.name, c);
  }

  std::map<std::string, int> index, low;
  std::map<std::string, bool> on_stack;
  std::vector<std::string> stack;
  int counter = 0;

  std::function<void(const std::string&)> visit = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (const auto& w : succ[v]) {
      if (!succ.count(w)) continue;
      if (!index.count(w)) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::string> comp;
      std::string w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      g.sccs.push_back(std::move(comp));
    }
  };

  for (const auto& n : g.nodes)
    if (!index.count(n)) visit(n);
  return g;
}

}  // namespace silc
