#include <algorithm>

#include "internal.hpp"
#include "silc/pure_solver.hpp"

namespace silc {

using namespace detail;

SymbolicState initial_worlds(const FuncDef& f, const std::set<BugRef>& kinds,
                             const std::map<BugRef, SanTemplate>& protocols) {
  SymbolicState s;
  for (BugRef r : kinds) {
    Sanitization san;
    auto it = protocols.find(r);
    san.tmpl = it != protocols.end() ? it->second : (r == BugRef::MemLeak ? SanTemplate::NoLeak : SanTemplate::Stop);
    san.sign = flow_sign_for(r);
    s.heap.push_back(Atom::world(world_entity(f, f.loc.line), r, san, f.name));
  }
  return normalize(s);
}

namespace {

struct Path {
  SymbolicState cur;
  std::vector<Atom> pre_heap;  // back-propagated missing resources
  std::set<std::string> vocab;  // logical variables of the precondition
  bool returned = false;
  SourceLoc exit_loc;
};

void collect_decls(const Block& b, std::map<std::string, MiniType>& types) {
  for (const auto& s : b) {
    if (s.kind == Stmt::Kind::Decl) types.emplace(s.target, s.decl_type);
    collect_decls(s.then_block, types);
    collect_decls(s.else_block, types);
  }
}

class FunctionRun {
 public:
  FunctionRun(const FuncDef& f, FunctionContext& ctx) : f_(f), ctx_(ctx), rules_(ctx.config->bugs) {
    init_ = initial_worlds(f, ctx.config->bugs, ctx.config->protocols);
    for (const auto& prm : f.params) {
      Term v = Term::var(formal_value_name(prm.name));
      init_.heap.push_back(Atom::var_pt(prm.name, v));
      roots_.push_back(v);
      types_.emplace(prm.name, prm.type);
      formals_.insert(prm.name);
    }
    init_ = normalize(init_);
    collect_decls(f.body, types_);
  }

  Summary run() {
    Path start;
    start.cur = init_;
    start.vocab = vars_of(init_);
    start.exit_loc = f_.end_loc;
    auto ends = block({start}, f_.body);
    for (auto& p : ends) finish_ok(p);

    Summary s;
    s.function = f_.name;
    s.world = f_.world_tag;
    for (const auto& prm : f_.params) s.formals.push_back(prm.name);
    s.triples = std::move(triples_);
    if (s.triples.empty()) {
      // Nothing reachable within the bounds: a vacuous triple.
      SummaryTriple t;
      t.triple.pre = init_;
      t.triple.code = f_.name;
      t.triple.post = init_;
      t.triple.post.pure = {Literal::falsum()};
      t.exit_loc = f_.end_loc;
      s.triples.push_back(std::move(t));
    }
    return s;
  }

 private:
  const FuncDef& f_;
  FunctionContext& ctx_;
  RuleTable rules_;
  SymbolicState init_;
  std::vector<Term> roots_;
  std::map<std::string, MiniType> types_;
  std::set<std::string> formals_;
  std::vector<SummaryTriple> triples_;
  std::set<std::string> seen_;
  bool unroll_noted_ = false;

  void note(const std::string& msg) {
    if (ctx_.diagnostics) ctx_.diagnostics->push_back(f_.name + ": " + msg);
  }

  // Missing atoms about precondition variables flow back into the
  // precondition; the rest describe locals and are simply materialized.
  void absorb(Path& p, const SymbolicState& m) {
    std::vector<const Atom*> todo;
    for (const auto& a : m.heap)
      if (a.kind != Atom::Kind::PointsToVar && a.kind != Atom::Kind::World) todo.push_back(&a);
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto it = todo.begin(); it != todo.end(); ++it) {
        const Atom& a = **it;
        if (!a.loc.is_var() || !p.vocab.count(a.loc.name)) continue;
        p.pre_heap.push_back(a);
        auto vs = vars_of(a);
        p.vocab.insert(vs.begin(), vs.end());
        todo.erase(it);
        changed = true;
        break;
      }
    }
  }

  Term value_of(Path& p, const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Null: return Term::nil();
      case Expr::Kind::Int: return Term::constant(e.value);
      case Expr::Kind::Var: break;
    }
    if (const Atom* a = find_var(p.cur, e.name)) return a->value;
    Term t = ctx_.names->fresh_var(formal_value_name(e.name));
    set_var(p.cur, e.name, t);
    return t;
  }

  Literal literal(Path& p, const Cond& c) {
    Term l = value_of(p, c.lhs);
    switch (c.kind) {
      case Cond::Kind::Eq: return Literal::eq(l, value_of(p, c.rhs));
      case Cond::Kind::Ne: return Literal::ne(l, value_of(p, c.rhs));
      case Cond::Kind::Truthy: break;
    }
    auto it = types_.find(c.lhs.name);
    bool is_int = it != types_.end() && !it->second.is_pointer();
    return Literal::ne(l, is_int ? Term::constant(0) : Term::nil());
  }

  std::optional<Path> assume(Path p, const Literal& lit) {
    p.cur.path.push_back(lit);
    p.cur.pure.push_back(lit);
    p.cur.path = normalize_conj(p.cur.path);
    p.cur.pure = normalize_conj(p.cur.pure);
    if (!feasible(p.cur)) return std::nullopt;
    return p;
  }

  void cap(std::vector<Path>& paths) {
    std::set<std::string> keys;
    std::vector<Path> kept;
    for (auto& p : paths) {
      std::string k = p.cur.str() + "|" + std::to_string(p.returned);
      for (const auto& a : p.pre_heap) k += "|" + a.str();
      if (!keys.insert(k).second) continue;
      kept.push_back(std::move(p));
    }
    if (kept.size() > ctx_.config->max_disjuncts) {
      note("disjunct budget exceeded: dropped " + std::to_string(kept.size() - ctx_.config->max_disjuncts) +
           " states");
      kept.resize(ctx_.config->max_disjuncts);
    }
    paths = std::move(kept);
  }

  std::vector<Path> block(std::vector<Path> paths, const Block& b) {
    for (const auto& s : b) {
      std::vector<Path> next;
      for (auto& p : paths) {
        if (p.returned) {
          next.push_back(std::move(p));
          continue;
        }
        for (auto& q : stmt(std::move(p), s)) next.push_back(std::move(q));
      }
      cap(next);
      paths = std::move(next);
    }
    return paths;
  }

  std::vector<Path> stmt(Path p, const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Decl: return {std::move(p)};
      case Stmt::Kind::If: {
        Literal lit = literal(p, s.cond);
        std::vector<Path> out;
        if (auto t = assume(p, lit)) out = block({std::move(*t)}, s.then_block);
        if (auto e = assume(p, lit.negated())) {
          auto rest = s.has_else ? block({std::move(*e)}, s.else_block) : std::vector<Path>{std::move(*e)};
          for (auto& r : rest) out.push_back(std::move(r));
        }
        return out;
      }
      case Stmt::Kind::While: return loop(std::move(p), s);
      default: break;
    }
    std::vector<EvalOutcome> outcomes;
    try {
      outcomes = eval_stmt(p.cur, s, rules_, ctx_);
    } catch (const NoRuleApplies& e) {
      note(e.what());
      return {};
    }
    std::vector<Path> out;
    for (auto& o : outcomes) {
      Path np = p;
      np.cur = std::move(o.post);
      absorb(np, o.missing);
      if (o.exit == ExitKind::Err) {
        record_err(np, o);
        continue;
      }
      if (s.kind == Stmt::Kind::Return) {
        np.returned = true;
        np.exit_loc = s.loc;
      }
      out.push_back(std::move(np));
    }
    return out;
  }

  std::vector<Path> loop(Path p, const Stmt& s) {
    std::vector<Path> out;
    std::vector<Path> live{std::move(p)};
    for (int i = 0; i <= ctx_.config->unroll_bound && !live.empty(); ++i) {
      std::vector<Path> body;
      for (auto& q : live) {
        if (q.returned) {
          out.push_back(std::move(q));
          continue;
        }
        Literal lit = literal(q, s.cond);
        if (auto e = assume(q, lit.negated())) out.push_back(std::move(*e));
        if (auto t = assume(q, lit)) {
          if (i == ctx_.config->unroll_bound) {
            if (!unroll_noted_) note("loop at line " + std::to_string(s.loc.line) + " cut at the unroll bound");
            unroll_noted_ = true;
            continue;
          }
          body.push_back(std::move(*t));
        }
      }
      live = body.empty() ? std::vector<Path>{} : block(std::move(body), s.then_block);
    }
    return out;
  }

  SymbolicState pre_of(const Path& p) {
    SymbolicState pre = init_;
    pre.heap.insert(pre.heap.end(), p.pre_heap.begin(), p.pre_heap.end());
    pre.pure = project(p.cur.pure, p.vocab);
    pre.path = project(p.cur.path, p.vocab);
    return normalize(pre);
  }

  SymbolicState post_of(const Path& p) {
    SymbolicState post = p.cur;
    std::erase_if(post.heap, [&](const Atom& a) {
      return a.kind == Atom::Kind::PointsToVar && a.pvar != "$ret" && !formals_.count(a.pvar);
    });
    return normalize(post);
  }

  bool latent(const FaultInfo& f, const SymbolicState& pre, const Path& p) const {
    const Term& r = f.resource;
    if (!r.is_var() || !p.vocab.count(r.name)) return false;
    if (f.ref == BugRef::UAF) {
      return std::any_of(pre.heap.begin(), pre.heap.end(),
                         [&](const Atom& a) { return a.kind == Atom::Kind::Invalid && a.loc == r; });
    }
    Conj pure = pre.pure;
    pure.insert(pure.end(), pre.path.begin(), pre.path.end());
    return entails_pure(pure, {Literal::eq(r, Term::nil())});
  }

  void add(SummaryTriple t) {
    std::string k = t.triple.str();
    if (t.fault) k += "@" + std::to_string(t.fault->loc.line) + t.fault->function;
    if (!seen_.insert(k).second) return;
    triples_.push_back(std::move(t));
  }

  void record_err(const Path& p, const EvalOutcome& o) {
    SummaryTriple t;
    try {
      t.triple.pre = pre_of(p);
      t.triple.post = post_of(p);
    } catch (const SeparationViolation& e) {
      note(std::string("dropped error path: ") + e.what());
      return;
    }
    t.triple.code = f_.name;
    t.triple.exit = ExitKind::Err;
    t.triple.world = o.world;
    t.fault = o.fault;
    t.culprit = o.culprit;
    t.latent = o.fault && latent(*o.fault, t.triple.pre, p);
    t.exit_loc = o.fault ? o.fault->loc : f_.end_loc;
    add(std::move(t));
  }

  void finish_ok(Path& p) {
    SummaryTriple t;
    try {
      t.triple.pre = pre_of(p);
      t.triple.post = post_of(p);
    } catch (const SeparationViolation& e) {
      note(std::string("dropped exit path: ") + e.what());
      return;
    }
    t.triple.code = f_.name;
    t.triple.exit = ExitKind::Ok;
    t.exit_loc = p.exit_loc;
    if (ctx_.config->bugs.count(BugRef::MemLeak)) {
      std::vector<Term> roots = roots_;
      if (const Atom* r = find_var(p.cur, "$ret")) roots.push_back(r->value);
      t.leaks = detect_leaks_at_exit(p.cur, roots, p.vocab);
    }
    add(std::move(t));
  }
};

bool self_recursive(const CallGraph& cg, const std::string& f) {
  return std::find(cg.edges.begin(), cg.edges.end(), std::make_pair(f, f)) != cg.edges.end();
}

}  // namespace

Summary analyze_function(const FuncDef& f, const std::map<std::string, Summary>& env, const AnalysisConfig& cfg,
                         const Program& program, FreshNames& names, const std::set<std::string>& recursive) {
  std::vector<std::string> diags;
  FunctionContext ctx;
  ctx.program = &program;
  ctx.function = &f;
  ctx.env = &env;
  ctx.recursive = recursive;
  ctx.config = &cfg;
  ctx.names = &names;
  ctx.diagnostics = &diags;
  Summary s = FunctionRun(f, ctx).run();
  s.diagnostics = std::move(diags);
  return s;
}

std::map<std::string, Summary> analyze_program(const Program& p, const AnalysisConfig& cfg) {
  std::map<std::string, Summary> env;
  FreshNames names(cfg.seed);
  CallGraph cg = build_call_graph(p);
  for (const auto& scc : cg.sccs) {
    std::set<std::string> recursive;
    if (scc.size() > 1 || self_recursive(cg, scc.front())) recursive.insert(scc.begin(), scc.end());
    for (const auto& name : scc) {
      const FuncDef* f = p.find_function(name);
      if (!f) continue;
      try {
        env[name] = analyze_function(*f, env, cfg, p, names, recursive);
      } catch (const std::exception& e) {
        Summary s;
        s.function = name;
        s.world = f->world_tag;
        for (const auto& prm : f->params) s.formals.push_back(prm.name);
        s.diagnostics.push_back(name + ": analysis failed: " + e.what());
        env[name] = std::move(s);
      }
    }
  }
  return env;
}

}  // namespace silc
