#include <algorithm>
#include <map>

#include "silc/pure_solver.hpp"

namespace silc {

std::size_t CongruenceState::id(const Term& t) {
  for (std::size_t i = 0; i < terms_.size(); ++i)
    if (terms_[i] == t) return i;
  terms_.push_back(t);
  parent_.push_back(parent_.size());
  return terms_.size() - 1;
}

std::size_t CongruenceState::find(std::size_t i) {
  while (parent_[i] != i) {
    parent_[i] = parent_[parent_[i]];
    i = parent_[i];
  }
  return i;
}

void CongruenceState::check() {
  if (!consistent_) return;
  std::map<std::size_t, Term> ground;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!terms_[i].is_ground()) continue;
    auto [it, fresh] = ground.emplace(find(i), terms_[i]);
    if (!fresh && it->second != terms_[i]) {
      consistent_ = false;
      return;
    }
  }
  for (const auto& [a, b] : diseq_) {
    if (find(id(a)) == find(id(b))) {
      consistent_ = false;
      return;
    }
  }
}

bool CongruenceState::add(const Literal& lit) {
  std::size_t a = id(lit.lhs);
  std::size_t b = id(lit.rhs);
  if (lit.positive) {
    std::size_t ra = find(a), rb = find(b);
    if (ra != rb) parent_[std::max(ra, rb)] = std::min(ra, rb);
  } else {
    diseq_.emplace_back(lit.lhs, lit.rhs);
  }
  check();
  return consistent_;
}

bool CongruenceState::add_all(const Conj& c) {
  for (const auto& l : c)
    if (!add(l)) return false;
  return consistent_;
}

bool CongruenceState::equal(const Term& a, const Term& b) {
  if (a == b) return true;
  return find(id(a)) == find(id(b));
}

bool CongruenceState::distinct(const Term& a, const Term& b) {
  std::size_t ra = find(id(a)), rb = find(id(b));
  if (ra == rb) return false;
  Term ga = canonical(a), gb = canonical(b);
  if (ga.is_ground() && gb.is_ground() && ga != gb) return true;
  for (const auto& [x, y] : diseq_) {
    std::size_t rx = find(id(x)), ry = find(id(y));
    if ((rx == ra && ry == rb) || (rx == rb && ry == ra)) return true;
  }
  return false;
}

Term CongruenceState::canonical(const Term& t) {
  std::size_t r = find(id(t));
  std::optional<Term> best;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (find(i) != r) continue;
    if (terms_[i].is_ground()) return terms_[i];
    if (!best || terms_[i] < *best) best = terms_[i];
  }
  return *best;
}

std::vector<std::vector<Term>> CongruenceState::classes() {
  std::map<std::size_t, std::vector<Term>> by_root;
  for (std::size_t i = 0; i < terms_.size(); ++i) by_root[find(i)].push_back(terms_[i]);
  std::vector<std::vector<Term>> out;
  for (auto& [r, members] : by_root) {
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool is_satisfiable(const Conj& c) { return CongruenceState(c).consistent(); }

bool is_satisfiable(const PureTerm& p) { return is_satisfiable(to_literals(p)); }

bool entails_pure(const Conj& lhs, const Conj& rhs) {
  for (const auto& lit : rhs) {
    Conj probe = lhs;
    probe.push_back(lit.negated());
    if (is_satisfiable(probe)) return false;
  }
  return true;
}

bool entails_pure(const PureTerm& lhs, const PureTerm& rhs) { return entails_pure(to_literals(lhs), to_literals(rhs)); }

Conj project(const Conj& c, const std::set<std::string>& keep) {
  CongruenceState cs(c);
  if (!cs.consistent()) return {Literal::falsum()};
  auto kept = [&](const Term& t) { return t.is_ground() || (t.is_var() && keep.count(t.name)); };

  Conj out;
  std::map<std::string, Term> rep;  // any class member -> kept representative
  for (const auto& cls : cs.classes()) {
    std::vector<Term> members;
    for (const auto& t : cls)
      if (kept(t)) members.push_back(t);
    if (members.empty()) continue;
    // Prefer a ground representative so X = c is emitted directly.
    auto g = std::find_if(members.begin(), members.end(), [](const Term& t) { return t.is_ground(); });
    Term r = g != members.end() ? *g : members.front();
    for (const auto& t : members)
      if (t != r) out.push_back(Literal::eq(t, r));
    for (const auto& t : cls) rep[t.str() + "#" + std::to_string(static_cast<int>(t.kind))] = r;
  }
  auto rep_of = [&](const Term& t) -> std::optional<Term> {
    auto it = rep.find(t.str() + "#" + std::to_string(static_cast<int>(t.kind)));
    if (it == rep.end()) return std::nullopt;
    return it->second;
  };
  for (const auto& [a, b] : cs.disequalities()) {
    auto ra = rep_of(a), rb = rep_of(b);
    if (ra && rb) out.push_back(Literal::ne(*ra, *rb));
  }
  return normalize_conj(std::move(out));
}

}  // namespace silc
