#include "silc/executor.hpp"

namespace silc {

namespace {

// Builder for one rule: program-variable cells are shared between pre and
// post so aliasing statements like x = [x] stay well formed.
struct Shape {
  SymbolicState pre;
  SymbolicState post;
  std::map<std::string, Term> vars;

  Term var(const std::string& x, FreshNames& fn) {
    auto it = vars.find(x);
    if (it != vars.end()) return it->second;
    Term t = fn.fresh_var("X");
    vars.emplace(x, t);
    pre.heap.push_back(Atom::var_pt(x, t));
    return t;
  }
  // Post value of each variable defaults to its pre value.
  void finish(const std::map<std::string, Term>& assigned) {
    for (const auto& [x, t] : vars) {
      auto it = assigned.find(x);
      post.heap.push_back(Atom::var_pt(x, it == assigned.end() ? t : it->second));
    }
  }
};

Rule make(std::string name, ExitKind exit, Shape&& s, Term resource) {
  Rule r;
  r.name = std::move(name);
  r.exit = exit;
  r.pre = std::move(s.pre);
  r.post = std::move(s.post);
  r.resource = std::move(resource);
  return r;
}

Term constant_term(const Expr& e) { return e.kind == Expr::Kind::Null ? Term::nil() : Term::constant(e.value); }

}  // namespace

void RuleTable::add_blame_requirements(SymbolicState& s, const Term& t, FreshNames& fn) const {
  for (BugRef r : kinds_) {
    Sanitization san{r == BugRef::MemLeak ? SanTemplate::NoLeak : SanTemplate::Stop, {}, flow_sign_for(r)};
    s.heap.push_back(Atom::blame(t, Entity::unknown(fn.fresh_name("W")), r, san, ""));
  }
}

Term RuleTable::bind_constant(const Expr& e, SymbolicState& post, Rule& r, FreshNames& fn) const {
  Term v = fn.fresh_var("V");
  post.pure.push_back(Literal::eq(v, constant_term(e)));
  r.blamed.push_back(v);
  return v;
}

// Err rules shared by every dereferencing primitive on variable x.
static void add_deref_errors(std::vector<Rule>& out, const std::string& prim, const std::string& x, FreshNames& fn) {
  {
    Shape s;
    Term X = s.var(x, fn);
    s.pre.pure.push_back(Literal::eq(X, Term::nil()));
    s.finish({});
    s.post.pure = s.pre.pure;
    Rule r = make(prim + ".err.nil", ExitKind::Err, std::move(s), X);
    r.fault = BugRef::NPD;
    out.push_back(std::move(r));
  }
  {
    Shape s;
    Term X = s.var(x, fn);
    s.pre.heap.push_back(Atom::invalid(X));
    s.finish({});
    s.post.heap.push_back(Atom::invalid(X));
    Rule r = make(prim + ".err.invalid", ExitKind::Err, std::move(s), X);
    r.fault = BugRef::UAF;
    out.push_back(std::move(r));
  }
}

std::vector<Rule> RuleTable::malloc_rules(const std::string& x, FreshNames& fn) const {
  std::vector<Rule> out;
  {
    Shape s;
    s.var(x, fn);
    Term L = fn.fresh_var("L"), V = fn.fresh_var("V");
    s.finish({{x, L}});
    s.post.heap.push_back(Atom::loc_pt(L, V));
    Rule r = make("malloc.ok", ExitKind::Ok, std::move(s), L);
    r.blamed = {L, V};
    out.push_back(std::move(r));
  }
  {
    Shape s;
    s.var(x, fn);
    Term L = fn.fresh_var("L");
    s.finish({{x, L}});
    s.post.pure.push_back(Literal::eq(L, Term::nil()));
    Rule r = make("malloc.nil", ExitKind::Ok, std::move(s), L);
    r.blamed = {L};
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Rule> RuleTable::free_rules(const std::string& x, FreshNames& fn) const {
  std::vector<Rule> out;
  Shape s;
  Term X = s.var(x, fn);
  s.pre.heap.push_back(Atom::loc_pt(X, fn.fresh_var("V")));
  add_blame_requirements(s.pre, X, fn);
  s.finish({});
  s.post.heap.push_back(Atom::invalid(X));
  Rule r = make("free.ok", ExitKind::Ok, std::move(s), X);
  r.shifted = {X};
  out.push_back(std::move(r));
  add_deref_errors(out, "free", x, fn);
  return out;
}

std::vector<Rule> RuleTable::store_rules(const std::string& x, const Expr& e, FreshNames& fn) const {
  std::vector<Rule> out;
  Shape s;
  Rule r;
  Term X = s.var(x, fn);
  s.pre.heap.push_back(Atom::loc_pt(X, fn.fresh_var("W")));
  add_blame_requirements(s.pre, X, fn);
  Term Y = e.kind == Expr::Kind::Var ? s.var(e.name, fn) : bind_constant(e, s.post, r, fn);
  s.finish({});
  s.post.heap.push_back(Atom::loc_pt(X, Y));
  Rule ok = make("store.ok", ExitKind::Ok, std::move(s), X);
  ok.shifted = {X};
  ok.blamed = r.blamed;
  out.push_back(std::move(ok));
  add_deref_errors(out, "store", x, fn);
  return out;
}

std::vector<Rule> RuleTable::load_rules(const std::string& x, const std::string& y, FreshNames& fn) const {
  std::vector<Rule> out;
  Shape s;
  Term Y = s.var(y, fn);
  s.var(x, fn);
  Term V = fn.fresh_var("V");
  s.pre.heap.push_back(Atom::loc_pt(Y, V));
  add_blame_requirements(s.pre, Y, fn);
  s.finish({{x, V}});
  s.post.heap.push_back(Atom::loc_pt(Y, V));
  Rule ok = make("load.ok", ExitKind::Ok, std::move(s), Y);
  ok.shifted = {Y};
  out.push_back(std::move(ok));
  add_deref_errors(out, "load", y, fn);
  return out;
}

std::vector<Rule> RuleTable::field_store_rules(const std::string& x, const std::string& f, const Expr& e,
                                               FreshNames& fn) const {
  std::vector<Rule> out;
  Shape s;
  Rule r;
  Term X = s.var(x, fn);
  Term B = fn.fresh_var("B");
  s.pre.heap.push_back(Atom::loc_pt(X, B));
  s.pre.heap.push_back(Atom::field_pt(X, f, fn.fresh_var("W")));
  add_blame_requirements(s.pre, X, fn);
  Term Y = e.kind == Expr::Kind::Var ? s.var(e.name, fn) : bind_constant(e, s.post, r, fn);
  s.finish({});
  s.post.heap.push_back(Atom::loc_pt(X, B));
  s.post.heap.push_back(Atom::field_pt(X, f, Y));
  Rule ok = make("field_store.ok", ExitKind::Ok, std::move(s), X);
  ok.shifted = {X};
  ok.blamed = r.blamed;
  out.push_back(std::move(ok));
  add_deref_errors(out, "field_store", x, fn);
  return out;
}

std::vector<Rule> RuleTable::field_load_rules(const std::string& x, const std::string& y, const std::string& f,
                                              FreshNames& fn) const {
  std::vector<Rule> out;
  Shape s;
  Term Y = s.var(y, fn);
  s.var(x, fn);
  Term B = fn.fresh_var("B"), V = fn.fresh_var("V");
  s.pre.heap.push_back(Atom::loc_pt(Y, B));
  s.pre.heap.push_back(Atom::field_pt(Y, f, V));
  add_blame_requirements(s.pre, Y, fn);
  s.finish({{x, V}});
  s.post.heap.push_back(Atom::loc_pt(Y, B));
  s.post.heap.push_back(Atom::field_pt(Y, f, V));
  Rule ok = make("field_load.ok", ExitKind::Ok, std::move(s), Y);
  ok.shifted = {Y};
  out.push_back(std::move(ok));
  add_deref_errors(out, "field_load", y, fn);
  return out;
}

std::vector<Rule> RuleTable::assign_rules(const std::string& x, const Expr& e, FreshNames& fn) const {
  Shape s;
  Rule r;
  s.var(x, fn);
  Term V = e.kind == Expr::Kind::Var ? s.var(e.name, fn) : bind_constant(e, s.post, r, fn);
  s.finish({{x, V}});
  Rule ok = make("assign.ok", ExitKind::Ok, std::move(s), V);
  ok.blamed = r.blamed;
  return {std::move(ok)};
}

std::vector<Rule> RuleTable::access_rules(const std::string& y, const std::string& what, FreshNames& fn) const {
  std::vector<Rule> out;
  Shape s;
  Term Y = s.var(y, fn);
  Term V = fn.fresh_var("V");
  s.pre.heap.push_back(Atom::loc_pt(Y, V));
  add_blame_requirements(s.pre, Y, fn);
  s.finish({});
  s.post.heap.push_back(Atom::loc_pt(Y, V));
  Rule ok = make(what + ".ok", ExitKind::Ok, std::move(s), Y);
  ok.shifted = {Y};
  out.push_back(std::move(ok));
  add_deref_errors(out, what, y, fn);
  return out;
}

}  // namespace silc
