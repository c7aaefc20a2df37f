#include <deque>

#include "silc/executor.hpp"
#include "silc/pure_solver.hpp"

namespace silc {

std::vector<LeakFinding> detect_leaks_at_exit(const SymbolicState& q, const std::vector<Term>& roots,
                                              const std::set<std::string>& pre_vocab) {
  Conj pure = q.path;
  pure.insert(pure.end(), q.pure.begin(), q.pure.end());
  CongruenceState cs(pure);
  auto key = [&](const Term& t) { return cs.canonical(t).str(); };

  std::set<std::string> invalid;
  for (const auto& a : q.heap)
    if (a.kind == Atom::Kind::Invalid) invalid.insert(key(a.loc));

  std::map<std::string, std::vector<Term>> edges;
  for (const auto& a : q.heap) {
    if (a.kind == Atom::Kind::PointsToLoc) edges[key(a.loc)].push_back(a.value);
    if (a.kind == Atom::Kind::PointsToField && !invalid.count(key(a.loc))) edges[key(a.loc)].push_back(a.value);
  }

  std::set<std::string> reached;
  std::deque<Term> work(roots.begin(), roots.end());
  while (!work.empty()) {
    Term t = work.front();
    work.pop_front();
    if (!reached.insert(key(t)).second) continue;
    for (const auto& v : edges[key(t)]) work.push_back(v);
  }

  auto blame_on = [&](const Term& t) -> std::optional<Atom> {
    for (const auto& a : q.heap)
      if (a.kind == Atom::Kind::Blame && a.ref == BugRef::MemLeak && key(a.loc) == key(t)) return a;
    return std::nullopt;
  };

  std::vector<LeakFinding> out;
  for (const auto& a : q.heap) {
    if (a.kind != Atom::Kind::PointsToLoc || reached.count(key(a.loc))) continue;
    LeakFinding f;
    f.cell = a.loc;
    f.latent = a.loc.is_var() && pre_vocab.count(a.loc.name);
    for (const auto& b : q.heap) {
      if (b.kind == Atom::Kind::PointsToField && invalid.count(key(b.loc)) && key(b.value) == key(a.loc)) {
        f.parent = b.loc;
        f.parent_field = b.field;
        break;
      }
    }
    f.blame = blame_on(f.parent ? *f.parent : a.loc);
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace silc
