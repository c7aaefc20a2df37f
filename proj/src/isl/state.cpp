#include <algorithm>
#include <tuple>

#include "silc/isl.hpp"

namespace silc {

Atom Atom::var_pt(std::string x, Term v) {
  Atom a;
  a.kind = Kind::PointsToVar;
  a.pvar = std::move(x);
  a.value = std::move(v);
  return a;
}

Atom Atom::loc_pt(Term l, Term v) {
  Atom a;
  a.kind = Kind::PointsToLoc;
  a.loc = std::move(l);
  a.value = std::move(v);
  return a;
}

Atom Atom::field_pt(Term l, std::string f, Term v) {
  Atom a;
  a.kind = Kind::PointsToField;
  a.loc = std::move(l);
  a.field = std::move(f);
  a.value = std::move(v);
  return a;
}

Atom Atom::invalid(Term l) {
  Atom a;
  a.kind = Kind::Invalid;
  a.loc = std::move(l);
  return a;
}

Atom Atom::blame(Term x, Entity e, BugRef r, Sanitization s, std::string ctx) {
  Atom a;
  a.kind = Kind::Blame;
  a.loc = std::move(x);
  a.entity = std::move(e);
  a.ref = r;
  a.san = std::move(s);
  a.ctx = std::move(ctx);
  return a;
}

Atom Atom::world(Entity e, BugRef r, Sanitization s, std::string ctx) {
  Atom a;
  a.kind = Kind::World;
  a.entity = std::move(e);
  a.ref = r;
  a.san = std::move(s);
  a.ctx = std::move(ctx);
  return a;
}

std::string Atom::head() const {
  switch (kind) {
    case Kind::PointsToVar: return "v:" + pvar;
    case Kind::PointsToLoc:
    case Kind::Invalid: return "l:" + loc.str();
    case Kind::PointsToField: return "f:" + loc.str() + "." + field;
    case Kind::Blame: return "b:" + loc.str() + "#" + to_string(ref);
    case Kind::World: return "w:" + to_string(ref);
  }
  return "?";
}

bool operator==(const Atom& a, const Atom& b) {
  return a.kind == b.kind && a.pvar == b.pvar && a.loc == b.loc && a.field == b.field && a.value == b.value &&
         a.entity == b.entity && a.ref == b.ref && a.san == b.san && a.ctx == b.ctx && a.via == b.via;
}

bool atom_less(const Atom& a, const Atom& b) {
  auto key = [](const Atom& x) {
    return std::make_tuple(static_cast<int>(x.kind), x.pvar, x.loc.str(), x.field, x.value.str(),
                           static_cast<int>(x.ref), x.entity.str(), x.ctx);
  };
  return key(a) < key(b);
}

Term Subst::apply(const Term& t) const {
  if (!t.is_var()) return t;
  auto it = terms.find(t.name);
  return it == terms.end() ? t : it->second;
}

Entity Subst::apply(const Entity& e) const {
  if (e.known()) return e;
  auto it = entities.find(e.var);
  return it == entities.end() ? e : it->second;
}

Literal Subst::apply(const Literal& l) const { return {l.positive, apply(l.lhs), apply(l.rhs)}; }

Conj Subst::apply(const Conj& c) const {
  Conj out;
  out.reserve(c.size());
  for (const auto& l : c) out.push_back(apply(l));
  return out;
}

Atom Subst::apply(const Atom& a) const {
  Atom out = a;
  out.loc = apply(a.loc);
  out.value = apply(a.value);
  out.entity = apply(a.entity);
  out.san.path = normalize_conj(apply(a.san.path));
  return out;
}

void add_vars(const Term& t, std::set<std::string>& out) {
  if (t.is_var()) out.insert(t.name);
}

std::set<std::string> vars_of(const Conj& c) {
  std::set<std::string> out;
  for (const auto& l : c) {
    add_vars(l.lhs, out);
    add_vars(l.rhs, out);
  }
  return out;
}

std::set<std::string> vars_of(const Atom& a) {
  std::set<std::string> out;
  add_vars(a.loc, out);
  add_vars(a.value, out);
  if (a.kind == Atom::Kind::Blame || a.kind == Atom::Kind::World) {
    if (!a.entity.known()) out.insert(a.entity.var);
    auto p = vars_of(a.san.path);
    out.insert(p.begin(), p.end());
  }
  return out;
}

std::set<std::string> vars_of(const SymbolicState& s) {
  std::set<std::string> out = vars_of(s.path);
  auto p = vars_of(s.pure);
  out.insert(p.begin(), p.end());
  for (const auto& a : s.heap) {
    auto v = vars_of(a);
    out.insert(v.begin(), v.end());
  }
  return out;
}

SymbolicState normalize(const SymbolicState& s) {
  SymbolicState out;
  out.path = normalize_conj(s.path);
  out.pure = normalize_conj(s.pure);
  out.heap = s.heap;
  std::sort(out.heap.begin(), out.heap.end(), atom_less);
  for (std::size_t i = 1; i < out.heap.size(); ++i) {
    if (out.heap[i - 1].head() == out.heap[i].head())
      throw SeparationViolation("two atoms own " + out.heap[i].head().substr(2) + ": " + out.heap[i - 1].str() +
                                " and " + out.heap[i].str());
  }
  // Invalid and points-to share a location head but sort apart.
  std::set<std::string> cells;
  for (const auto& a : out.heap) {
    if (a.kind != Atom::Kind::PointsToLoc && a.kind != Atom::Kind::Invalid) continue;
    if (!cells.insert(a.head()).second)
      throw SeparationViolation("location " + a.loc.str() + " is both allocated and invalid");
  }
  auto used = vars_of(out);
  for (const auto& e : s.existentials)
    if (used.count(e)) out.existentials.insert(e);
  return out;
}

SymbolicState substitute(const SymbolicState& s, const Subst& m) {
  for (const auto& [from, to] : m.terms) {
    if (s.existentials.count(from)) throw CaptureError("substitution maps bound variable " + from);
    if (to.is_var() && to.name != from && s.existentials.count(to.name))
      throw CaptureError("substitution target " + to.name + " is bound in the state");
  }
  for (const auto& [from, to] : m.entities) {
    if (s.existentials.count(from)) throw CaptureError("substitution maps bound variable " + from);
    if (!to.known() && s.existentials.count(to.var)) throw CaptureError("substitution target " + to.var + " is bound");
  }
  SymbolicState out;
  out.path = m.apply(s.path);
  out.pure = m.apply(s.pure);
  for (const auto& a : s.heap) out.heap.push_back(m.apply(a));
  out.existentials = s.existentials;
  return normalize(out);
}

std::string FreshNames::fresh_name(const std::string& hint) { return hint + std::to_string(next_++); }

Term FreshNames::fresh_var(const std::string& hint) { return Term::var(fresh_name(hint)); }

}  // namespace silc
