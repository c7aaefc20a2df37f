#include <algorithm>
#include <cctype>
#include <functional>

#include "internal.hpp"
#include "silc/pure_solver.hpp"

namespace silc {

namespace detail {

const Atom* find_var(const SymbolicState& s, const std::string& x) {
  for (const auto& a : s.heap)
    if (a.kind == Atom::Kind::PointsToVar && a.pvar == x) return &a;
  return nullptr;
}

void set_var(SymbolicState& s, const std::string& x, const Term& v) {
  for (auto& a : s.heap) {
    if (a.kind == Atom::Kind::PointsToVar && a.pvar == x) {
      a.value = v;
      return;
    }
  }
  s.heap.push_back(Atom::var_pt(x, v));
  std::sort(s.heap.begin(), s.heap.end(), atom_less);
}

void drop_var(SymbolicState& s, const std::string& x) {
  std::erase_if(s.heap, [&](const Atom& a) { return a.kind == Atom::Kind::PointsToVar && a.pvar == x; });
}

std::map<BugRef, Atom> worlds_of(const SymbolicState& s) {
  std::map<BugRef, Atom> out;
  for (const auto& a : s.heap)
    if (a.kind == Atom::Kind::World) out.emplace(a.ref, a);
  return out;
}

Entity running_entity(const FunctionContext& ctx, int line) { return world_entity(*ctx.function, line); }

std::vector<Atom> stamp_blames(const SymbolicState& s, const Term& t, const FunctionContext& ctx, int line,
                               const std::set<BugRef>& kinds) {
  auto worlds = worlds_of(s);
  std::vector<Atom> out;
  for (BugRef r : kinds) {
    auto it = worlds.find(r);
    Sanitization san = it != worlds.end() ? it->second.san : Sanitization{};
    std::string tag = it != worlds.end() ? it->second.ctx : ctx.function->name;
    out.push_back(Atom::blame(t, running_entity(ctx, line), r, san, tag));
  }
  return out;
}

bool feasible(const SymbolicState& s) {
  Conj all = s.path;
  all.insert(all.end(), s.pure.begin(), s.pure.end());
  auto facts = spatial_facts(s.heap);
  all.insert(all.end(), facts.begin(), facts.end());
  return is_satisfiable(all);
}

std::string hint_of(const std::string& name) {
  std::string h = name;
  while (!h.empty() && (std::isdigit(static_cast<unsigned char>(h.back())) || h.back() == '_')) h.pop_back();
  return h.empty() ? "X" : h;
}

std::string formal_value_name(const std::string& formal) {
  std::string n;
  for (char c : formal) n += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (!n.empty() && std::isdigit(static_cast<unsigned char>(n.back()))) n += "_";
  return n;
}

}  // namespace detail

using namespace detail;

Entity world_entity(const FuncDef& f, int line) {
  return f.world_tag == WorldTag::Vendor ? Entity::vendor(f.loc.file, f.name, line)
                                         : Entity::client(f.loc.file, f.name, line);
}

namespace {

void report(const FunctionContext& ctx, const std::string& msg) {
  if (ctx.diagnostics) ctx.diagnostics->push_back(ctx.function->name + ": " + msg);
}

void observe(const FunctionContext& ctx, const std::string& kind, const SymbolicState& p, const EvalOutcome& o,
             std::vector<Term> shifted) {
  if (!ctx.config || !ctx.config->observer) return;
  StepRecord rec;
  rec.function = ctx.function->name;
  rec.kind = kind;
  rec.world = running_entity(ctx, 0);
  try {
    rec.before = star(p, o.missing);
  } catch (const SeparationViolation&) {
    rec.before = p;
  }
  rec.outcome = o;
  rec.shifted = std::move(shifted);
  ctx.config->observer(rec);
}

std::vector<EvalOutcome> apply_rules(const SymbolicState& p, const std::vector<Rule>& rules, const std::string& kind,
                                     const Stmt& s, FunctionContext& ctx) {
  std::vector<EvalOutcome> out;
  bool any = false;
  const auto& kinds = ctx.config->bugs;
  for (const auto& rule : rules) {
    BiabductionResult br;
    try {
      br = biabduce(p, rule.pre);
    } catch (const Inconsistent&) {
      continue;
    }
    any = true;
    const Subst& sg = br.subst;
    SymbolicState post;
    post.path = p.path;
    post.pure = p.pure;
    post.pure.insert(post.pure.end(), br.missing.pure.begin(), br.missing.pure.end());
    for (const auto& l : sg.apply(rule.post.pure)) post.pure.push_back(l);
    post.heap = br.frame.heap;
    for (const auto& a : rule.post.heap) post.heap.push_back(sg.apply(a));
    std::vector<Term> shifted;
    if (rule.exit == ExitKind::Ok) {
      for (const auto& t : rule.shifted) shifted.push_back(sg.apply(t));
      std::vector<Term> blamed = shifted;
      for (const auto& t : rule.blamed) blamed.push_back(sg.apply(t));
      for (const auto& t : blamed)
        for (auto& b : stamp_blames(p, t, ctx, s.loc.line, kinds)) post.heap.push_back(std::move(b));
    }
    try {
      post = normalize(post);
    } catch (const SeparationViolation& e) {
      report(ctx, std::string("dropped ") + rule.name + " outcome: " + e.what());
      continue;
    }
    if (!feasible(post)) continue;
    EvalOutcome o;
    o.exit = rule.exit;
    o.world = running_entity(ctx, s.loc.line);
    o.missing = br.missing;
    o.post = std::move(post);
    if (rule.fault)
      o.fault = FaultInfo{*rule.fault, sg.apply(rule.resource), ctx.function->name, s.loc,
                          s.kind == Stmt::Kind::Call ? s.callee : kind};
    observe(ctx, kind, p, o, shifted);
    out.push_back(std::move(o));
  }
  if (!any) throw NoRuleApplies("no " + kind + " rule applies at line " + std::to_string(s.loc.line));
  return out;
}

using Step = std::function<std::vector<EvalOutcome>(const SymbolicState&)>;

// Runs steps in sequence, accumulating missing resources along each path.
std::vector<EvalOutcome> chain(const SymbolicState& p, const std::vector<Step>& steps) {
  EvalOutcome start;
  start.post = p;
  std::vector<EvalOutcome> frontier{start};
  std::vector<EvalOutcome> done;
  for (const auto& step : steps) {
    std::vector<EvalOutcome> next;
    for (const auto& o : frontier) {
      for (auto& r : step(o.post)) {
        r.missing = star(o.missing, r.missing);
        (r.exit == ExitKind::Err ? done : next).push_back(std::move(r));
      }
    }
    frontier = std::move(next);
  }
  done.insert(done.end(), frontier.begin(), frontier.end());
  return done;
}

std::vector<EvalOutcome> eval_builtin(const SymbolicState& p, const Stmt& s, const RuleTable& rules,
                                      FunctionContext& ctx) {
  FreshNames& fn = *ctx.names;
  std::vector<Step> steps;
  std::vector<std::string> names;
  std::vector<std::string> temps;
  for (std::size_t i = 0; i < s.args.size(); ++i) {
    const Expr& e = s.args[i];
    if (e.kind == Expr::Kind::Var) {
      names.push_back(e.name);
      continue;
    }
    std::string t = "$t" + std::to_string(i);
    names.push_back(t);
    temps.push_back(t);
    steps.push_back([&, t, e](const SymbolicState& q) { return apply_rules(q, rules.assign_rules(t, e, fn), "assign", s, ctx); });
  }
  auto access = [&](const std::string& y) {
    steps.push_back([&, y](const SymbolicState& q) { return apply_rules(q, rules.access_rules(y, s.callee, fn), "access", s, ctx); });
  };
  if (s.callee == "memcpy") {
    access(names.at(0));
    access(names.at(1));
  } else {
    access(names.at(0));
  }
  if (!s.target.empty()) {
    if (s.callee == "memcpy") {
      Expr dst = Expr::var(names.at(0));
      steps.push_back([&, dst](const SymbolicState& q) { return apply_rules(q, rules.assign_rules(s.target, dst, fn), "assign", s, ctx); });
    } else {
      steps.push_back([&](const SymbolicState& q) {
        EvalOutcome o;
        o.post = q;
        set_var(o.post, s.target, fn.fresh_var("N"));
        return std::vector<EvalOutcome>{o};
      });
    }
  }
  auto out = chain(p, steps);
  for (auto& o : out) {
    for (const auto& t : temps) drop_var(o.post, t);
    o.post = normalize(o.post);
  }
  return out;
}

// Renames every logical variable of a callee triple apart from the caller.
Subst renaming(const SummaryTriple& t, FreshNames& fn) {
  std::set<std::string> vars = vars_of(t.triple.pre);
  auto post = vars_of(t.triple.post);
  vars.insert(post.begin(), post.end());
  if (t.fault) add_vars(t.fault->resource, vars);
  for (const auto& l : t.leaks) add_vars(l.cell, vars);
  Subst ren;
  for (const auto& v : vars) {
    std::string n = fn.fresh_name(hint_of(v));
    ren.terms.emplace(v, Term::var(n));
    ren.entities.emplace(v, Entity::unknown(n));
  }
  return ren;
}

SymbolicState apply_plain(const Subst& m, const SymbolicState& s) {
  SymbolicState out;
  out.path = m.apply(s.path);
  out.pure = m.apply(s.pure);
  for (const auto& a : s.heap) out.heap.push_back(m.apply(a));
  return out;
}

const Atom* same_head(const SymbolicState& s, const Atom& a) {
  for (const auto& b : s.heap)
    if (b.kind == a.kind && b.head() == a.head()) return &b;
  return nullptr;
}

}  // namespace

std::vector<EvalOutcome> apply_summary(const SymbolicState& p0, const Stmt& call, const Summary& callee,
                                       const Entity& caller_world, FunctionContext& ctx) {
  FreshNames& fn = *ctx.names;
  const auto& kinds = ctx.config->bugs;
  bool vendor_caller = caller_world.kind == EntityKind::Vendor;
  bool crossing = !vendor_caller && callee.world == WorldTag::Vendor;

  // Actual values, materializing uninitialized locals and constants.
  SymbolicState p = p0;
  std::vector<Term> actuals;
  for (const auto& e : call.args) {
    if (e.kind == Expr::Kind::Var) {
      if (const Atom* v = find_var(p, e.name)) {
        actuals.push_back(v->value);
      } else {
        Term t = fn.fresh_var(formal_value_name(e.name));
        set_var(p, e.name, t);
        actuals.push_back(t);
      }
      continue;
    }
    Term v = fn.fresh_var("V");
    p.pure.push_back(Literal::eq(v, e.kind == Expr::Kind::Null ? Term::nil() : Term::constant(e.value)));
    for (auto& b : stamp_blames(p, v, ctx, call.loc.line, kinds)) p.heap.push_back(std::move(b));
    actuals.push_back(v);
  }
  p = normalize(p);

  std::vector<EvalOutcome> out;
  for (const auto& t : callee.triples) {
    if (t.triple.exit == ExitKind::Err && !t.latent) continue;  // reported where it manifests
    Subst ren = renaming(t, fn);
    SymbolicState pre = apply_plain(ren, t.triple.pre);
    SymbolicState post = apply_plain(ren, t.triple.post);

    auto site = std::make_shared<CallSite>();
    site->caller = ctx.function->name;
    site->callee = callee.function;
    site->loc = call.loc;
    site->args = call.args;
    site->formals = callee.formals;
    site->actuals = actuals;
    site->callee_pre = pre;
    site->callee_post_path = post.path;
    site->caller_state = p;

    Subst bind;
    for (std::size_t i = 0; i < callee.formals.size() && i < actuals.size(); ++i) {
      const Atom* v = find_var(pre, callee.formals[i]);
      if (v && v->value.is_var()) {
        bind.terms.emplace(v->value.name, actuals[i]);
        site->formal_values.emplace(v->value.name, callee.formals[i]);
      }
    }

    SymbolicState q;
    std::optional<Term> ret;
    SymbolicState effect;
    for (const auto& a : pre.heap)
      if (a.kind != Atom::Kind::PointsToVar && a.kind != Atom::Kind::World) q.heap.push_back(bind.apply(a));
    q.pure = bind.apply(pre.pure);
    q.path = bind.apply(pre.path);
    for (const auto& a : post.heap) {
      if (a.kind == Atom::Kind::PointsToVar) {
        if (a.pvar == "$ret") ret = bind.apply(a.value);
        continue;
      }
      if (a.kind != Atom::Kind::World) effect.heap.push_back(bind.apply(a));
    }
    effect.pure = bind.apply(post.pure);
    if (t.triple.exit == ExitKind::Ok) {
      for (const auto& leak : t.leaks) {
        if (leak.latent) continue;
        Term cell = bind.apply(ren.apply(leak.cell));
        std::erase_if(effect.heap, [&](const Atom& a) {
          return (a.kind == Atom::Kind::PointsToLoc || a.kind == Atom::Kind::PointsToField) && a.loc == cell;
        });
      }
    }

    BiabductionResult br;
    try {
      q = normalize(q);
      br = biabduce(p, q);
    } catch (const Inconsistent&) {
      continue;
    } catch (const SeparationViolation& e) {
      report(ctx, "call to " + callee.function + " aliases separated cells: " + e.what());
      continue;
    }
    const Subst& sg = br.subst;

    SymbolicState next;
    next.path = p.path;
    next.pure = p.pure;
    next.pure.insert(next.pure.end(), br.missing.pure.begin(), br.missing.pure.end());
    for (const auto& l : sg.apply(effect.pure)) next.pure.push_back(l);
    next.heap = br.frame.heap;
    SymbolicState before = star(p, br.missing);
    for (const auto& a0 : effect.heap) {
      Atom a = sg.apply(a0);
      if (a.kind == Atom::Kind::Blame) {
        if (vendor_caller && a.entity.kind == EntityKind::Client) {
          // Vendor-sticky: responsibility stays with the vendor world.
          a.entity = running_entity(ctx, call.loc.line);
        }
        const Atom* old = same_head(before, a);
        if (old && old->entity == a.entity && !a.via) a.via = old->via;
        if (crossing && a.entity.kind == EntityKind::Vendor && !a.via) a.via = site;
      }
      next.heap.push_back(std::move(a));
    }
    if (!call.target.empty()) {
      Term v = ret ? sg.apply(*ret) : fn.fresh_var("R");
      set_var(next, call.target, v);
    }
    try {
      next = normalize(next);
    } catch (const SeparationViolation& e) {
      report(ctx, "dropped outcome of call to " + callee.function + ": " + e.what());
      continue;
    }
    if (!feasible(next)) continue;

    EvalOutcome o;
    o.exit = t.triple.exit;
    o.world = t.triple.exit == ExitKind::Err ? t.triple.world : running_entity(ctx, call.loc.line);
    o.missing = br.missing;
    o.post = std::move(next);
    if (t.fault) {
      FaultInfo f = *t.fault;
      f.resource = sg.apply(bind.apply(ren.apply(f.resource)));
      o.fault = f;
    }
    o.culprit = t.culprit;
    if (o.exit == ExitKind::Err && !o.culprit && crossing) o.culprit = site;
    observe(ctx, "call", p, o, {});
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<EvalOutcome> eval_stmt(const SymbolicState& p, const Stmt& s, const RuleTable& rules,
                                   FunctionContext& ctx) {
  FreshNames& fn = *ctx.names;
  switch (s.kind) {
    case Stmt::Kind::Malloc: return apply_rules(p, rules.malloc_rules(s.target, fn), "malloc", s, ctx);
    case Stmt::Kind::Free: return apply_rules(p, rules.free_rules(s.target, fn), "free", s, ctx);
    case Stmt::Kind::Store: return apply_rules(p, rules.store_rules(s.target, s.value, fn), "store", s, ctx);
    case Stmt::Kind::Load: return apply_rules(p, rules.load_rules(s.target, s.source, fn), "load", s, ctx);
    case Stmt::Kind::FieldStore:
      return apply_rules(p, rules.field_store_rules(s.target, s.field, s.value, fn), "field_store", s, ctx);
    case Stmt::Kind::FieldLoad:
      return apply_rules(p, rules.field_load_rules(s.target, s.source, s.field, fn), "field_load", s, ctx);
    case Stmt::Kind::Assign: return apply_rules(p, rules.assign_rules(s.target, s.value, fn), "assign", s, ctx);
    case Stmt::Kind::Return: {
      if (!s.has_value) {
        EvalOutcome o;
        o.post = p;
        return {o};
      }
      return apply_rules(p, rules.assign_rules("$ret", s.value, fn), "assign", s, ctx);
    }
    case Stmt::Kind::Call: {
      if (is_builtin(s.callee)) return eval_builtin(p, s, rules, ctx);
      auto it = ctx.env ? ctx.env->find(s.callee) : decltype(ctx.env->end()){};
      if (ctx.recursive.count(s.callee) || !ctx.env || it == ctx.env->end()) {
        report(ctx, "recursive call to " + s.callee + " at line " + std::to_string(s.loc.line) + " skipped");
        EvalOutcome o;
        o.post = p;
        if (!s.target.empty()) set_var(o.post, s.target, fn.fresh_var("R"));
        return {o};
      }
      return apply_summary(p, s, it->second, running_entity(ctx, s.loc.line), ctx);
    }
    case Stmt::Kind::Decl:
    case Stmt::Kind::If:
    case Stmt::Kind::While: break;
  }
  throw std::logic_error("eval_stmt on a structured statement");
}

}  // namespace silc
