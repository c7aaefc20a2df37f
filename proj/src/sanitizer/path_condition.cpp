#include <algorithm>
#include <deque>

#include "silc/pure_solver.hpp"
#include "silc/sanitizer.hpp"

namespace silc {

AccessPath AccessPath::parent() const {
  AccessPath p = *this;
  if (!p.steps.empty()) p.steps.pop_back();
  return p;
}

AccessPath AccessPath::then(std::string step) const {
  AccessPath p = *this;
  p.steps.push_back(std::move(step));
  return p;
}

std::string AccessPath::str() const {
  std::string s = base;
  bool starred = false;
  for (const auto& st : steps) {
    if (st.empty()) {
      s = "*" + s;
      starred = true;
    } else {
      s = (starred ? "(" + s + ")" : s) + "->" + st;
      starred = false;
    }
  }
  return s;
}

std::string Operand::str() const { return path ? path->str() : constant.str(); }

std::string ProgramLiteral::str() const { return lhs.str() + (positive ? " == " : " != ") + rhs.str(); }

std::string render(const ProgramCondition& c) {
  if (c.empty()) return "true";
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += " && ";
    out += c[i].str();
  }
  return out;
}

ProgramCondition collapse_to_program_condition(const Conj& pi, const SymbolicState& state) {
  // Variable aliasing only: ground classes would conflate unrelated nil values.
  Conj aliases;
  for (const auto& l : normalize_conj(state.path))
    if (l.positive && l.lhs.is_var() && l.rhs.is_var()) aliases.push_back(l);
  for (const auto& l : state.pure)
    if (l.positive && l.lhs.is_var() && l.rhs.is_var()) aliases.push_back(l);
  CongruenceState cs(aliases);
  auto key = [&](const Term& t) { return cs.canonical(t).str(); };

  std::map<std::string, AccessPath> paths;
  std::deque<std::pair<Term, AccessPath>> work;
  for (const auto& a : state.heap)
    if (a.kind == Atom::Kind::PointsToVar && !a.pvar.starts_with("$")) work.emplace_back(a.value, AccessPath{a.pvar, {}});
  while (!work.empty()) {
    auto [t, path] = work.front();
    work.pop_front();
    if (!paths.emplace(key(t), path).second) continue;
    for (const auto& a : state.heap) {
      if (a.kind == Atom::Kind::PointsToLoc && key(a.loc) == key(t)) work.emplace_back(a.value, path.then(""));
      if (a.kind == Atom::Kind::PointsToField && key(a.loc) == key(t)) work.emplace_back(a.value, path.then(a.field));
    }
  }

  auto operand = [&](const Term& t) {
    Operand o;
    switch (t.kind) {
      case Term::Kind::Nil: o.constant = Expr::null(); return o;
      case Term::Kind::Const: o.constant = Expr::integer(t.value); return o;
      default: break;
    }
    auto it = paths.find(key(t));
    if (it == paths.end()) throw UnscopedCondition("no program variable denotes " + t.str());
    o.path = it->second;
    return o;
  };

  ProgramCondition out;
  for (const auto& l : normalize_conj(pi)) {
    ProgramLiteral pl{l.positive, operand(l.lhs), operand(l.rhs)};
    if (!pl.lhs.path && pl.rhs.path) std::swap(pl.lhs, pl.rhs);
    if (pl.positive && pl.lhs == pl.rhs) continue;
    if (std::find(out.begin(), out.end(), pl) == out.end()) out.push_back(std::move(pl));
  }
  return out;
}

ProgramCondition collapse_to_program_condition(const PureTerm& pi, const SymbolicState& state) {
  return collapse_to_program_condition(to_literals(pi), state);
}

namespace {

std::string guards_text(const std::vector<ProgramCondition>& guards) {
  if (guards.empty()) return "false";
  std::string out;
  for (std::size_t i = 0; i < guards.size(); ++i) {
    if (i) out += " || ";
    out += guards.size() > 1 && guards[i].size() > 1 ? "(" + render(guards[i]) + ")" : render(guards[i]);
  }
  return out;
}

const Atom* var_cell(const SymbolicState& s, const std::string& x) {
  for (const auto& a : s.heap)
    if (a.kind == Atom::Kind::PointsToVar && a.pvar == x) return &a;
  return nullptr;
}

// Formal whose cell the callee frees while leaving field f behind.
std::optional<AccessPath> orphan_holder(const Summary& callee, const Program& program, const std::string& field) {
  for (const auto& x : callee.formals) {
    for (const auto& st : callee.triples) {
      if (st.triple.exit != ExitKind::Ok) continue;
      const Atom* v = var_cell(st.triple.pre, x);
      if (!v) continue;
      bool freed = false;
      bool holds = false;
      for (const auto& a : st.triple.post.heap) {
        if (a.kind == Atom::Kind::Invalid && a.loc == v->value) freed = true;
        if (a.kind == Atom::Kind::PointsToField && a.loc == v->value && a.field == field) holds = true;
      }
      if (freed && holds) return AccessPath{x, {field}};
    }
  }
  if (const FuncDef* f = program.find_function(callee.function)) {
    for (const auto& prm : f->params) {
      if (prm.type.kind != TypeKind::Struct) continue;
      const StructDef* sd = program.find_struct(prm.type.struct_name);
      if (!sd) continue;
      for (const auto& fld : sd->fields)
        if (fld.name == field) return AccessPath{prm.name, {field}};
    }
  }
  return std::nullopt;
}

}  // namespace

SanitizerPlan extract_path_condition(const IntegrationFinding& finding, const std::map<std::string, Summary>& summaries,
                                     const Program& program) {
  if (finding.status != FindingStatus::Integration) throw std::invalid_argument("not an integration finding");
  if (!finding.culprit) throw UnscopedCondition("no vendor call recorded for the finding");
  const CallSite& site = *finding.culprit;

  SanitizerPlan plan;
  plan.caller = site.caller;
  plan.callee = site.callee;
  plan.loc = site.loc;
  plan.args = site.args;
  plan.ref = finding.ref;
  plan.direction = flow_sign_for(finding.ref);
  plan.tmpl = finding.ref == BugRef::MemLeak ? SanTemplate::NoLeak : SanTemplate::Stop;
  if (finding.blame) {
    plan.direction = finding.blame->san.sign;
    plan.tmpl = finding.blame->san.tmpl;
  }

  if (plan.direction == FlowSign::Plus) {
    Conj pi = site.callee_pre.path;
    pi.insert(pi.end(), site.callee_pre.pure.begin(), site.callee_pre.pure.end());
    // Points-to facts survive only as validity checks.
    for (const auto& a : site.callee_pre.heap)
      if ((a.kind == Atom::Kind::PointsToLoc || a.kind == Atom::Kind::PointsToField) && a.loc.is_var())
        pi.push_back(Literal::ne(a.loc, Term::nil()));
    plan.pi0 = normalize_conj(pi);
  } else {
    plan.pi0 = normalize_conj(site.callee_post_path);
    plan.caller_path = normalize_conj(site.caller_state.path);
    try {
      plan.caller_condition = render(collapse_to_program_condition(plan.caller_path, site.caller_state));
    } catch (const UnscopedCondition&) {
      // Only shown in reports; the logical form is the best available.
      for (const auto& l : plan.caller_path)
        plan.caller_condition += (plan.caller_condition.empty() ? "" : " /\\ ") + l.str();
    }
  }
  if (is_falsum(plan.pi0)) throw UnscopedCondition("path condition of the vendor call is unsatisfiable");
  plan.guards.push_back(collapse_to_program_condition(plan.pi0, site.callee_pre));

  if (plan.tmpl == SanTemplate::NoLeak) {
    auto it = summaries.find(site.callee);
    if (!finding.leak || finding.leak->parent_field.empty() || it == summaries.end())
      throw UnscopedCondition("leaked cell is not reachable through a field of the call arguments");
    auto holder = orphan_holder(it->second, program, finding.leak->parent_field);
    if (!holder) throw UnscopedCondition("no argument of " + site.callee + " holds field " + finding.leak->parent_field);
    plan.rescues.push_back(*holder);
  }
  plan.condition_text = guards_text(plan.guards);
  return plan;
}

std::vector<SanitizerPlan> merge_plans(const std::vector<SanitizerPlan>& plans) {
  std::vector<SanitizerPlan> out;
  for (const auto& p : plans) {
    auto it = std::find_if(out.begin(), out.end(), [&](const SanitizerPlan& q) {
      return q.caller == p.caller && q.callee == p.callee && q.loc.file == p.loc.file && q.loc.line == p.loc.line &&
             q.loc.column == p.loc.column && q.tmpl == p.tmpl;
    });
    if (it == out.end()) {
      out.push_back(p);
      continue;
    }
    for (const auto& g : p.guards)
      if (std::find(it->guards.begin(), it->guards.end(), g) == it->guards.end()) it->guards.push_back(g);
    for (const auto& r : p.rescues)
      if (std::find(it->rescues.begin(), it->rescues.end(), r) == it->rescues.end()) it->rescues.push_back(r);
    it->condition_text = guards_text(it->guards);
  }
  return out;
}

}  // namespace silc
