#include <algorithm>
#include <functional>

#include "silc/biabduction.hpp"
#include "silc/pure_solver.hpp"

namespace silc {

namespace {

bool owns_location(const Atom& a) { return a.kind == Atom::Kind::PointsToLoc || a.kind == Atom::Kind::Invalid; }

Conj all_pure(const SymbolicState& s) {
  Conj c = s.path;
  c.insert(c.end(), s.pure.begin(), s.pure.end());
  auto facts = spatial_facts(s.heap);
  c.insert(c.end(), facts.begin(), facts.end());
  return c;
}

// Same constructor and same resource name, ignoring the terms.
bool same_shape(const Atom& a, const Atom& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Atom::Kind::PointsToVar: return a.pvar == b.pvar;
    case Atom::Kind::PointsToField: return a.field == b.field;
    case Atom::Kind::Blame:
    case Atom::Kind::World: return a.ref == b.ref;
    default: return true;
  }
}

class Matcher {
 public:
  Matcher(std::set<std::string> bindable, CongruenceState& cs) : bindable_(std::move(bindable)), cs_(cs) {}

  // Binds t (from the instantiable side) against u, or checks they are equal.
  bool term(const Term& t, const Term& u) {
    if (t.is_var() && bindable_.count(t.name)) {
      auto it = subst.terms.find(t.name);
      if (it == subst.terms.end()) {
        subst.terms.emplace(t.name, u);
        return true;
      }
      return cs_.equal(it->second, u);
    }
    return cs_.equal(t, u);
  }

  bool entity(const Entity& e, const Entity& f) {
    if (!e.known() && bindable_.count(e.var)) {
      auto it = subst.entities.find(e.var);
      if (it == subst.entities.end()) {
        subst.entities.emplace(e.var, f);
        return true;
      }
      return it->second.kind == f.kind && it->second.var == f.var;
    }
    return e.kind == f.kind && e.var == f.var;
  }

  bool atom(const Atom& a, const Atom& b) {
    if (!same_shape(a, b)) return false;
    switch (a.kind) {
      case Atom::Kind::PointsToVar: return term(a.value, b.value);
      case Atom::Kind::PointsToLoc:
      case Atom::Kind::PointsToField: return term(a.loc, b.loc) && term(a.value, b.value);
      case Atom::Kind::Invalid: return term(a.loc, b.loc);
      case Atom::Kind::Blame: return term(a.loc, b.loc) && entity(a.entity, b.entity);
      case Atom::Kind::World: return entity(a.entity, b.entity);
    }
    return false;
  }

  Subst subst;

 private:
  std::set<std::string> bindable_;
  CongruenceState& cs_;
};

}  // namespace

Conj spatial_facts(const std::vector<Atom>& heap) {
  Conj out;
  std::vector<const Atom*> cells;
  for (const auto& a : heap) {
    if (!owns_location(a) && a.kind != Atom::Kind::PointsToField) continue;
    out.push_back(Literal::ne(a.loc, Term::nil()));
    cells.push_back(&a);
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t j = i + 1; j < cells.size(); ++j) {
      const Atom& a = *cells[i];
      const Atom& b = *cells[j];
      bool clash = (owns_location(a) && owns_location(b)) ||
                   (a.kind == Atom::Kind::PointsToField && b.kind == Atom::Kind::PointsToField && a.field == b.field);
      if (clash) out.push_back(Literal::ne(a.loc, b.loc));
    }
  }
  return out;
}

SymbolicState star(const SymbolicState& a, const SymbolicState& b) {
  SymbolicState out = a;
  out.heap.insert(out.heap.end(), b.heap.begin(), b.heap.end());
  out.path.insert(out.path.end(), b.path.begin(), b.path.end());
  out.pure.insert(out.pure.end(), b.pure.begin(), b.pure.end());
  out.existentials.insert(b.existentials.begin(), b.existentials.end());
  return normalize(out);
}

bool entails(const SymbolicState& p, const SymbolicState& q) {
  Conj q_pure = all_pure(q);
  CongruenceState cq(q_pure);
  if (!cq.consistent()) return true;  // q has no models
  if (p.heap.size() != q.heap.size()) return false;

  std::set<std::string> bindable;
  auto qv = vars_of(q);
  for (const auto& v : vars_of(p))
    if (!qv.count(v)) bindable.insert(v);

  Conj p_pure = p.path;
  p_pure.insert(p_pure.end(), p.pure.begin(), p.pure.end());

  std::vector<bool> used(q.heap.size(), false);
  std::function<bool(std::size_t, const Subst&)> go = [&](std::size_t i, const Subst& sofar) {
    if (i == p.heap.size()) {
      Conj need = sofar.apply(p_pure);
      std::set<std::string> keep;
      for (const auto& v : vars_of(need))
        if (!bindable.count(v) || sofar.terms.count(v)) keep.insert(v);
      // Literals over still-unbound variables are existential; keep only what
      // they imply about the rest.
      Conj residual = project(need, keep);
      return entails_pure(q_pure, residual);
    }
    for (std::size_t j = 0; j < q.heap.size(); ++j) {
      if (used[j]) continue;
      Matcher m(bindable, cq);
      m.subst = sofar;
      if (!m.atom(p.heap[i], q.heap[j])) continue;
      used[j] = true;
      bool ok = go(i + 1, m.subst);
      used[j] = false;
      if (ok) return true;
    }
    return false;
  };
  return go(0, Subst{});
}

BiabductionResult biabduce(const SymbolicState& p, const SymbolicState& q) {
  Conj p_pure = all_pure(p);
  CongruenceState cp(p_pure);
  if (!cp.consistent()) throw Inconsistent("state is unsatisfiable");

  std::set<std::string> schematic;
  auto pv = vars_of(p);
  for (const auto& v : vars_of(q))
    if (!pv.count(v)) schematic.insert(v);

  Matcher m(schematic, cp);
  BiabductionResult r;
  std::vector<bool> used(p.heap.size(), false);
  std::vector<Atom> pending = q.heap;
  std::sort(pending.begin(), pending.end(), atom_less);
  std::vector<Atom> missing;
  Conj extra;  // equalities forced by matching cells with distinct values

  auto resolved = [&](const Atom& a) {
    if (a.kind == Atom::Kind::PointsToVar || a.kind == Atom::Kind::World) return true;
    return !(a.loc.is_var() && schematic.count(a.loc.name) && !m.subst.terms.count(a.loc.name));
  };

  bool progress = true;
  while (progress && !pending.empty()) {
    progress = false;
    for (std::size_t k = 0; k < pending.size(); ++k) {
      const Atom a = pending[k];
      if (!resolved(a)) continue;
      Term loc = m.subst.apply(a.loc);
      std::optional<std::size_t> hit;
      for (std::size_t i = 0; i < p.heap.size() && !hit; ++i) {
        if (used[i]) continue;
        const Atom& b = p.heap[i];
        bool same_loc = a.kind == Atom::Kind::PointsToVar || a.kind == Atom::Kind::World || cp.equal(loc, b.loc);
        if (!same_loc) continue;
        if (owns_location(a) && owns_location(b) && a.kind != b.kind)
          throw Inconsistent("cell " + loc.str() + " is " + (b.kind == Atom::Kind::Invalid ? "freed" : "allocated"));
        if (a.kind == Atom::Kind::PointsToField && b.kind == Atom::Kind::Invalid)
          throw Inconsistent("field base " + loc.str() + " is freed");
        if (same_shape(a, b)) hit = i;
      }
      if (hit) {
        const Atom& b = p.heap[*hit];
        used[*hit] = true;
        if (a.kind == Atom::Kind::PointsToVar || a.kind == Atom::Kind::PointsToLoc ||
            a.kind == Atom::Kind::PointsToField) {
          Term v = m.subst.apply(a.value);
          if (v.is_var() && schematic.count(v.name) && !m.subst.terms.count(v.name))
            m.subst.terms.emplace(v.name, b.value);
          else if (!cp.equal(v, b.value))
            extra.push_back(Literal::eq(v, b.value));
        }
        if ((a.kind == Atom::Kind::Blame || a.kind == Atom::Kind::World) && !m.entity(a.entity, b.entity))
          throw Inconsistent("entity mismatch on " + b.str());
        r.matched.emplace_back(m.subst.apply(a), b);
      } else {
        missing.push_back(a);
      }
      pending.erase(pending.begin() + static_cast<long>(k));
      progress = true;
      break;
    }
  }
  missing.insert(missing.end(), pending.begin(), pending.end());
  for (auto& a : missing) a = m.subst.apply(a);

  Conj required = m.subst.apply(q.path);
  Conj qp = m.subst.apply(q.pure);
  required.insert(required.end(), qp.begin(), qp.end());
  required.insert(required.end(), extra.begin(), extra.end());

  std::vector<Atom> combined;
  for (std::size_t i = 0; i < p.heap.size(); ++i) combined.push_back(p.heap[i]);
  combined.insert(combined.end(), missing.begin(), missing.end());
  Conj everything = p_pure;
  everything.insert(everything.end(), required.begin(), required.end());
  auto facts = spatial_facts(combined);
  everything.insert(everything.end(), facts.begin(), facts.end());
  if (!is_satisfiable(everything)) throw Inconsistent("required pure part contradicts the state");

  for (const auto& lit : normalize_conj(required))
    if (!entails_pure(p_pure, {lit})) r.missing.pure.push_back(lit);
  r.missing.heap = missing;
  try {
    r.missing = normalize(r.missing);
  } catch (const SeparationViolation& e) {
    throw Inconsistent(e.what());
  }

  r.frame.path = p.path;
  r.frame.pure = p.pure;
  r.frame.existentials = p.existentials;
  for (std::size_t i = 0; i < p.heap.size(); ++i)
    if (!used[i]) r.frame.heap.push_back(p.heap[i]);
  r.frame = normalize(r.frame);
  r.subst = m.subst;
  return r;
}

}  // namespace silc
