#include <algorithm>
#include <functional>

#include "internal.hpp"
#include "silc/sanitizer.hpp"

namespace silc {

std::string SanitizerSource::diff_pair() const {
  return "--- " + original_line + "\n+++ " + replacement_line + "\n";
}

std::string fresh_wrapper_name(const std::string& callee, std::set<std::string>& taken) {
  for (int n = 1;; ++n) {
    std::string name = "sanitise_" + callee + "_" + std::to_string(n);
    if (taken.insert(name).second) return name;
  }
}

namespace {

Stmt make(Stmt::Kind k) {
  Stmt s;
  s.kind = k;
  return s;
}

Stmt decl(const MiniType& t, const std::string& x) {
  Stmt s = make(Stmt::Kind::Decl);
  s.decl_type = t;
  s.target = x;
  return s;
}

Stmt assign(const std::string& x, Expr e) {
  Stmt s = make(Stmt::Kind::Assign);
  s.target = x;
  s.value = std::move(e);
  return s;
}

Stmt ret(std::optional<Expr> e) {
  Stmt s = make(Stmt::Kind::Return);
  if (e) {
    s.has_value = true;
    s.value = *e;
  }
  return s;
}

Stmt if_then(Cond c, Block then_b) {
  Stmt s = make(Stmt::Kind::If);
  s.cond = std::move(c);
  s.then_block = std::move(then_b);
  return s;
}

Cond cond(bool positive, Expr l, Expr r) { return {positive ? Cond::Kind::Eq : Cond::Kind::Ne, std::move(l), std::move(r)}; }

Expr error_value(const MiniType& t, const AnalysisConfig& cfg) {
  auto it = cfg.error_returns.find(t.kind == TypeKind::Int ? "int" : "ptr");
  std::string v = it != cfg.error_returns.end() ? it->second : (t.kind == TypeKind::Int ? "0" : "NULL");
  if (v == "NULL") return Expr::null();
  try {
    return Expr::integer(std::stoll(v));
  } catch (const std::exception&) {
    return t.kind == TypeKind::Int ? Expr::integer(0) : Expr::null();
  }
}

// Emits guard tests as nested ifs, loading each access path into a
// temporary only under a non-nil test of its base.
class GuardBuilder {
 public:
  GuardBuilder(const Program& program, const FuncDef& callee, std::vector<Stmt>& decls, int& counter)
      : program_(program), decls_(decls), counter_(counter) {
    for (const auto& p : callee.params) types_[AccessPath{p.name, {}}] = p.type;
  }

  void require(const AccessPath& p) {
    if (p.depth() == 0) return;
    AccessPath base = p.parent();
    require(base);
    test({false, {base, {}}, {std::nullopt, Expr::null()}});
    if (std::find_if(items_.begin(), items_.end(), [&](const Item& i) { return i.load && i.path == p; }) ==
        items_.end())
      items_.push_back({true, {}, p});
  }

  void test(const ProgramLiteral& l) {
    if (l.lhs.path) require(*l.lhs.path);
    if (l.rhs.path) require(*l.rhs.path);
    if (std::find_if(items_.begin(), items_.end(), [&](const Item& i) { return !i.load && i.lit == l; }) ==
        items_.end())
      items_.push_back({false, l, {}});
  }

  /// innermost runs once every load is in place.
  Block build(const std::function<Block()>& innermost) { return build_from(0, innermost); }
  Block build(const Block& innermost) {
    return build_from(0, [&] { return innermost; });
  }

  /// Statement loading p into x; p's base must have been required.
  Stmt load_into(const std::string& x, const AccessPath& p) {
    const std::string& src = var_of(p.parent());
    if (p.steps.back().empty()) {
      Stmt s = make(Stmt::Kind::Load);
      s.target = x;
      s.source = src;
      return s;
    }
    Stmt s = make(Stmt::Kind::FieldLoad);
    s.target = x;
    s.source = src;
    s.field = p.steps.back();
    return s;
  }

  MiniType type_of(const AccessPath& p) {
    auto it = types_.find(p);
    if (it != types_.end()) return it->second;
    MiniType t{TypeKind::Ptr, {}};
    if (p.depth() > 0 && !p.steps.back().empty()) {
      MiniType base = type_of(p.parent());
      if (const StructDef* sd = base.kind == TypeKind::Struct ? program_.find_struct(base.struct_name) : nullptr)
        for (const auto& f : sd->fields)
          if (f.name == p.steps.back()) t = f.type;
    }
    types_[p] = t;
    return t;
  }

  bool trivial() const { return items_.size() == 1 && !items_.front().load; }

 private:
  struct Item {
    bool load = false;
    ProgramLiteral lit;
    AccessPath path;
  };

  const Program& program_;
  std::vector<Stmt>& decls_;
  int& counter_;
  std::vector<Item> items_;
  std::map<AccessPath, std::string> vars_;
  std::map<AccessPath, MiniType> types_;

  const std::string& var_of(const AccessPath& p) {
    if (p.depth() == 0) vars_.emplace(p, p.base);
    return vars_.at(p);
  }

  Expr expr_of(const Operand& o) { return o.path ? Expr::var(var_of(*o.path)) : o.constant; }

  Block build_from(std::size_t i, const std::function<Block()>& innermost) {
    if (i == items_.size()) return innermost();
    const Item& it = items_[i];
    Block out;
    if (it.load) {
      std::string x = "san_v" + std::to_string(counter_++);
      decls_.push_back(decl(type_of(it.path), x));
      out.push_back(load_into(x, it.path));
      vars_[it.path] = x;
      Block rest = build_from(i + 1, innermost);
      out.insert(out.end(), rest.begin(), rest.end());
      return out;
    }
    Cond c = cond(it.lit.positive, expr_of(it.lit.lhs), expr_of(it.lit.rhs));
    out.push_back(if_then(std::move(c), build_from(i + 1, innermost)));
    return out;
  }
};

}  // namespace

SanitizerSource generate_sanitizer(const SanitizerPlan& plan, const Program& program, const AnalysisConfig& cfg,
                                   const std::string& name) {
  const FuncDef* callee = program.find_function(plan.callee);
  const FuncDef* caller = program.find_function(plan.caller);
  if (!callee || !caller) throw std::invalid_argument("unknown function in sanitizer plan");

  FuncDef w;
  w.name = name;
  w.params = callee->params;
  w.return_type = callee->return_type;
  w.world_tag = WorldTag::Client;
  bool is_void = callee->return_type.kind == TypeKind::Void;

  Stmt call = make(Stmt::Kind::Call);
  call.callee = plan.callee;
  for (const auto& p : callee->params) call.args.push_back(Expr::var(p.name));
  if (!is_void) call.target = "san_ret";

  std::vector<Stmt> decls;
  Block body;
  int counter = 1;
  if (!is_void) decls.push_back(decl(callee->return_type, "san_ret"));

  if (plan.tmpl == SanTemplate::Stop) {
    Block stop{ret(is_void ? std::nullopt : std::optional<Expr>(error_value(callee->return_type, cfg)))};
    Block forward{call};
    if (!is_void) forward.push_back(ret(Expr::var("san_ret")));
    bool unconditional = std::any_of(plan.guards.begin(), plan.guards.end(), [](const auto& g) { return g.empty(); });
    if (unconditional) {
      body = stop;
    } else if (plan.guards.size() == 1) {
      GuardBuilder gb(program, *callee, decls, counter);
      for (const auto& l : plan.guards.front()) gb.test(l);
      body = gb.build(stop);
      if (gb.trivial()) {
        body.front().has_else = true;
        body.front().else_block = forward;
      } else {
        body.insert(body.end(), forward.begin(), forward.end());
      }
    } else {
      for (const auto& g : plan.guards) {
        GuardBuilder gb(program, *callee, decls, counter);
        for (const auto& l : g) gb.test(l);
        Block b = gb.build(stop);
        body.insert(body.end(), b.begin(), b.end());
      }
      body.insert(body.end(), forward.begin(), forward.end());
    }
  } else {
    std::vector<std::string> tmps;
    GuardBuilder typer(program, *callee, decls, counter);
    for (std::size_t j = 0; j < plan.rescues.size(); ++j) {
      tmps.push_back("san_tmp" + std::to_string(j + 1));
      decls.push_back(decl(typer.type_of(plan.rescues[j]), tmps.back()));
      body.push_back(assign(tmps.back(), Expr::null()));
    }
    for (const auto& g : plan.guards) {
      GuardBuilder gb(program, *callee, decls, counter);
      for (const auto& l : g) gb.test(l);
      for (const auto& r : plan.rescues) gb.test({false, {r.parent(), {}}, {std::nullopt, Expr::null()}});
      Block b = gb.build([&] {
        Block save;
        for (std::size_t j = 0; j < plan.rescues.size(); ++j) save.push_back(gb.load_into(tmps[j], plan.rescues[j]));
        return save;
      });
      body.insert(body.end(), b.begin(), b.end());
    }
    body.push_back(call);
    for (const auto& t : tmps) {
      Stmt f = make(Stmt::Kind::Free);
      f.target = t;
      body.push_back(if_then(cond(false, Expr::var(t), Expr::null()), {f}));
    }
    if (!is_void) body.push_back(ret(Expr::var("san_ret")));
  }
  w.body = decls;
  w.body.insert(w.body.end(), body.begin(), body.end());

  SanitizerSource src;
  src.name = name;
  src.wrapper = w;
  src.wrapper_text = pretty_print(w);
  src.caller = plan.caller;
  src.callee = plan.callee;
  src.file = caller->loc.file;
  src.call_line = plan.loc.line;
  src.call_column = plan.loc.column;
  src.caller_line = caller->loc.line;
  auto text = program.sources.find(src.file);
  if (text != program.sources.end()) {
    src.original_line = detail::line_at(text->second, src.call_line);
    src.replacement_line = src.original_line;
    detail::replace_call_token(src.replacement_line, src.call_column, src.callee, src.name);
  }
  return src;
}

}  // namespace silc
