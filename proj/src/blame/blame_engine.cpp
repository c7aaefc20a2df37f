#include <tuple>

#include "silc/blame.hpp"
#include "silc/pure_solver.hpp"

namespace silc {

std::string to_string(FindingStatus s) {
  switch (s) {
    case FindingStatus::SameWorld: return "same_world";
    case FindingStatus::Integration: return "integration";
    case FindingStatus::MissingBlame: return "missing_blame";
  }
  return "?";
}

BugDef BugCatalog::default_def(BugRef r) {
  BugDef d;
  d.ref = r;
  Term x = Term::var(d.param);
  switch (r) {
    case BugRef::NPD:
      d.body.pure.push_back(Literal::eq(x, Term::nil()));
      d.text = "X = nil";
      break;
    case BugRef::UAF:
      d.body.heap.push_back(Atom::invalid(x));
      d.text = "X!";
      break;
    case BugRef::MemLeak:
      d.body.heap.push_back(Atom::loc_pt(x, Term::var("_")));
      d.text = "X |-> _ unreachable";
      break;
  }
  return d;
}

BugCatalog BugCatalog::from_config(const AnalysisConfig& cfg) {
  BugCatalog c;
  c.enabled = cfg.bugs;
  for (BugRef r : {BugRef::NPD, BugRef::MemLeak, BugRef::UAF}) {
    c.defs[r] = default_def(r);
    auto it = cfg.protocols.find(r);
    Sanitization s;
    s.tmpl = it != cfg.protocols.end() ? it->second : (r == BugRef::MemLeak ? SanTemplate::NoLeak : SanTemplate::Stop);
    s.sign = flow_sign_for(r);
    c.policy[r] = s;
  }
  return c;
}

SymbolicState init_worlds(const FuncDef& f, const BugCatalog& catalog) {
  std::map<BugRef, SanTemplate> protocols;
  for (const auto& [r, s] : catalog.policy) protocols[r] = s.tmpl;
  return initial_worlds(f, catalog.enabled, protocols);
}

bool bug_holds(const BugCatalog& catalog, BugRef ref, const Term& t, const SymbolicState& q) {
  auto it = catalog.defs.find(ref);
  BugDef def = it != catalog.defs.end() ? it->second : BugCatalog::default_def(ref);
  Conj pure = q.path;
  pure.insert(pure.end(), q.pure.begin(), q.pure.end());
  CongruenceState cs(pure);
  auto same = [&](const Term& a, const Term& b) { return cs.canonical(a) == cs.canonical(b); };
  auto inst = [&](const Term& u) { return u.is_var() && u.name == def.param ? t : u; };

  Conj want;
  for (const auto& l : def.body.pure) want.push_back({l.positive, inst(l.lhs), inst(l.rhs)});
  if (!want.empty() && !entails_pure(pure, want)) return false;

  for (const auto& a : def.body.heap) {
    bool found = false;
    for (const auto& b : q.heap) {
      if (b.kind != a.kind) continue;
      if (!same(b.loc, inst(a.loc))) continue;
      if (a.kind == Atom::Kind::PointsToField && a.field != b.field) continue;
      found = true;
      break;
    }
    if (!found) return false;
  }
  return true;
}

namespace {

std::optional<Atom> blame_for(const SymbolicState& q, BugRef ref, const Term& resource) {
  Conj pure = q.path;
  pure.insert(pure.end(), q.pure.begin(), q.pure.end());
  for (const auto& a : q.heap)
    if (a.kind == Atom::Kind::Blame && a.ref == ref && a.loc == resource) return a;
  CongruenceState cs(pure);
  for (const auto& a : q.heap)
    if (a.kind == Atom::Kind::Blame && a.ref == ref && cs.canonical(a.loc) == cs.canonical(resource)) return a;
  return std::nullopt;
}

FindingStatus status_of(const Entity& manifest, const std::optional<Entity>& blamed) {
  if (!blamed || !blamed->known() || !manifest.known()) return FindingStatus::MissingBlame;
  return blamed->kind == manifest.kind ? FindingStatus::SameWorld : FindingStatus::Integration;
}

using Key = std::tuple<std::string, int, std::string, std::string, int, std::string, int, std::string>;

Key key_of(const IntegrationFinding& f) {
  std::string callee = f.culprit ? f.culprit->callee : "";
  int cl = f.culprit ? f.culprit->loc.line : 0;
  std::string blamed = f.blamed ? f.blamed->describe() : "";
  std::string where = f.leak ? f.leak->parent_field : (f.triple.fault ? f.triple.fault->function : "");
  return {f.function, static_cast<int>(f.ref), where, callee, cl, blamed, f.manifest_loc.line, to_string(f.status)};
}

}  // namespace

std::vector<IntegrationFinding> classify(const std::map<std::string, Summary>& summaries, const Program& program,
                                         const BugCatalog& catalog) {
  std::vector<IntegrationFinding> out;
  std::set<Key> seen;
  auto push = [&](IntegrationFinding f) {
    if (seen.insert(key_of(f)).second) out.push_back(std::move(f));
  };

  for (const auto& fn : program.functions) {
    auto it = summaries.find(fn.name);
    if (it == summaries.end()) continue;
    for (const auto& st : it->second.triples) {
      if (st.triple.exit == ExitKind::Err) {
        if (st.latent || !st.fault || !catalog.enabled.count(st.fault->ref)) continue;
        IntegrationFinding f;
        f.ref = st.fault->ref;
        f.function = fn.name;
        f.manifest_loc = st.fault->loc;
        f.manifest_world = st.triple.world;
        f.triple = st;
        auto b = blame_for(st.triple.post, f.ref, st.fault->resource);
        if (b) {
          f.blamed = b->entity;
          f.blame = b;
        }
        f.status = status_of(f.manifest_world, f.blamed);
        if (b && !bug_holds(catalog, f.ref, b->loc, st.triple.post)) {
          f.status = FindingStatus::MissingBlame;
          f.detail = "bug condition does not hold for the blamed resource";
        } else if (!b) {
          f.detail = "no blame on " + st.fault->resource.str();
        }
        f.culprit = st.culprit ? st.culprit : (b ? b->via : nullptr);
        push(std::move(f));
        continue;
      }
      if (!catalog.enabled.count(BugRef::MemLeak)) continue;
      for (const auto& lk : st.leaks) {
        if (lk.latent) continue;
        IntegrationFinding f;
        f.ref = BugRef::MemLeak;
        f.function = fn.name;
        f.manifest_loc = st.exit_loc;
        f.manifest_world = world_entity(fn, st.exit_loc.line);
        f.triple = st;
        f.leak = lk;
        if (lk.blame) {
          f.blamed = lk.blame->entity;
          f.blame = lk.blame;
          f.culprit = lk.blame->via;
        } else {
          f.detail = "no blame on leaked cell " + lk.cell.str();
        }
        f.status = status_of(f.manifest_world, f.blamed);
        push(std::move(f));
      }
    }
  }
  return out;
}

}  // namespace silc
