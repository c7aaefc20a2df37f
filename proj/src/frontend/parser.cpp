#include <algorithm>
#include <map>
#include <set>

#include "silc/frontend.hpp"

namespace silc {

namespace {

const std::set<std::string> kKeywords = {"int",    "void", "ptr",  "struct", "if",     "else",
                                         "while",  "return", "free", "malloc", "NULL"};

class Parser {
 public:
  Parser(LexResult lexed, std::string filename) : lx_(std::move(lexed)), file_(std::move(filename)) {}

  Program run() {
    Program p;
    while (!at_end()) {
      if (is("struct") && peek(2).text == "{") {
        p.structs.push_back(struct_def());
      } else {
        p.functions.push_back(func_def());
      }
    }
    return p;
  }

 private:
  LexResult lx_;
  std::string file_;
  std::size_t pos_ = 0;

  const Token& cur() const { return lx_.tokens[pos_]; }
  const Token& peek(std::size_t k) const {
    return lx_.tokens[std::min(pos_ + k, lx_.tokens.size() - 1)];
  }
  bool at_end() const { return cur().kind == Token::Kind::End; }
  bool is(const std::string& text) const {
    return cur().kind != Token::Kind::End && cur().kind != Token::Kind::Int && cur().text == text;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    std::string got = at_end() ? "end of input" : "'" + cur().text + "'";
    throw SyntaxError(cur().loc, msg + ", got " + got);
  }

  Token expect(const std::string& text) {
    if (!is(text)) fail("expected '" + text + "'");
    return lx_.tokens[pos_++];
  }

  std::string ident() {
    if (cur().kind != Token::Kind::Ident || kKeywords.count(cur().text)) fail("expected identifier");
    return lx_.tokens[pos_++].text;
  }

  bool at_type() const { return is("int") || is("void") || is("ptr") || is("struct"); }

  MiniType type() {
    MiniType t;
    if (is("int")) {
      t.kind = TypeKind::Int;
    } else if (is("void")) {
      t.kind = TypeKind::Void;
    } else if (is("ptr")) {
      t.kind = TypeKind::Ptr;
    } else if (is("struct")) {
      ++pos_;
      t.kind = TypeKind::Struct;
      t.struct_name = ident();
      expect("*");
      return t;
    } else {
      fail("expected type");
    }
    ++pos_;
    return t;
  }

  StructDef struct_def() {
    StructDef s;
    s.loc = cur().loc;
    expect("struct");
    s.name = ident();
    expect("{");
    do {
      Param f;
      f.type = type();
      f.name = ident();
      expect(";");
      s.fields.push_back(f);
    } while (!is("}"));
    expect("}");
    expect(";");
    return s;
  }

  FuncDef func_def() {
    FuncDef f;
    f.loc = cur().loc;
    if (lx_.vendor_lines.count(f.loc.line - 1)) f.world_tag = WorldTag::Vendor;
    f.return_type = type();
    f.name = ident();
    expect("(");
    if (!is(")")) {
      do {
        Param prm;
        prm.type = type();
        if (prm.type.kind == TypeKind::Void) throw SyntaxError(cur().loc, "parameter of type void");
        prm.name = ident();
        f.params.push_back(prm);
      } while (is(",") && (++pos_, true));
    }
    expect(")");
    f.body = block(&f.end_loc);
    return f;
  }

  Block block(SourceLoc* close = nullptr) {
    expect("{");
    Block b;
    while (!is("}")) {
      if (at_end()) fail("expected '}'");
      b.push_back(stmt());
    }
    if (close) *close = cur().loc;
    expect("}");
    return b;
  }

  Expr expr() {
    if (cur().kind == Token::Kind::Int) return Expr::integer(lx_.tokens[pos_++].value);
    if (is("NULL")) {
      ++pos_;
      return Expr::null();
    }
    return Expr::var(ident());
  }

  Cond cond() {
    Cond c;
    c.lhs = expr();
    if (is("==") || is("!=")) {
      c.kind = is("==") ? Cond::Kind::Eq : Cond::Kind::Ne;
      ++pos_;
      c.rhs = expr();
    } else {
      if (c.lhs.kind != Expr::Kind::Var) fail("expected comparison");
      c.kind = Cond::Kind::Truthy;
    }
    return c;
  }

  std::vector<Expr> call_args() {
    std::vector<Expr> args;
    expect("(");
    if (!is(")")) {
      do {
        args.push_back(expr());
      } while (is(",") && (++pos_, true));
    }
    expect(")");
    return args;
  }

  Stmt stmt() {
    Stmt s;
    s.loc = cur().loc;
    if (is("if")) {
      ++pos_;
      s.kind = Stmt::Kind::If;
      expect("(");
      s.cond = cond();
      expect(")");
      s.then_block = block();
      if (is("else")) {
        ++pos_;
        s.has_else = true;
        s.else_block = block();
      }
      return s;
    }
    if (is("while")) {
      ++pos_;
      s.kind = Stmt::Kind::While;
      expect("(");
      s.cond = cond();
      expect(")");
      s.then_block = block();
      return s;
    }
    if (is("return")) {
      ++pos_;
      s.kind = Stmt::Kind::Return;
      if (!is(";")) {
        s.value = expr();
        s.has_value = true;
      }
      expect(";");
      return s;
    }
    if (is("free")) {
      ++pos_;
      s.kind = Stmt::Kind::Free;
      expect("(");
      s.target = ident();
      expect(")");
      expect(";");
      return s;
    }
    if (is("[")) {
      ++pos_;
      s.kind = Stmt::Kind::Store;
      s.target = ident();
      expect("]");
      expect("=");
      s.value = expr();
      expect(";");
      return s;
    }
    if (at_type()) {
      s.kind = Stmt::Kind::Decl;
      s.decl_type = type();
      if (s.decl_type.kind == TypeKind::Void) throw SyntaxError(s.loc, "variable of type void");
      s.target = ident();
      expect(";");
      return s;
    }
    std::string first = ident();
    if (is("(")) {
      s.kind = Stmt::Kind::Call;
      s.callee = first;
      s.args = call_args();
      expect(";");
      return s;
    }
    if (is("->")) {
      ++pos_;
      s.kind = Stmt::Kind::FieldStore;
      s.target = first;
      s.field = ident();
      expect("=");
      s.value = expr();
      expect(";");
      return s;
    }
    expect("=");
    s.target = first;
    if (is("malloc")) {
      ++pos_;
      expect("(");
      expect(")");
      expect(";");
      s.kind = Stmt::Kind::Malloc;
      return s;
    }
    if (is("[")) {
      ++pos_;
      s.kind = Stmt::Kind::Load;
      s.source = ident();
      expect("]");
      expect(";");
      return s;
    }
    if (cur().kind == Token::Kind::Ident && !kKeywords.count(cur().text)) {
      if (peek(1).text == "->") {
        s.kind = Stmt::Kind::FieldLoad;
        s.source = ident();
        expect("->");
        s.field = ident();
        expect(";");
        return s;
      }
      if (peek(1).text == "(") {
        s.kind = Stmt::Kind::Call;
        s.callee = ident();
        s.args = call_args();
        expect(";");
        return s;
      }
    }
    s.kind = Stmt::Kind::Assign;
    s.value = expr();
    expect(";");
    return s;
  }
};

// Name resolution and the typing constraints on dereferences.
class Resolver {
 public:
  explicit Resolver(const Program& p) : p_(p) {}

  void run() {
    std::set<std::string> seen;
    for (const auto& s : p_.structs) {
      if (!seen.insert(s.name).second) throw ResolveError(s.loc, "duplicate struct '" + s.name + "'");
      std::set<std::string> fields;
      for (const auto& f : s.fields) {
        if (!fields.insert(f.name).second)
          throw ResolveError(s.loc, "duplicate field '" + f.name + "' in struct '" + s.name + "'");
        all_fields_.insert(f.name);
      }
    }
    for (const auto& s : p_.structs)
      for (const auto& f : s.fields) check_type(f.type, s.loc);

    seen.clear();
    for (const auto& f : p_.functions) {
      if (is_builtin(f.name) || f.name == "malloc" || f.name == "free")
        throw ResolveError(f.loc, "function '" + f.name + "' shadows a builtin");
      if (!seen.insert(f.name).second) throw ResolveError(f.loc, "duplicate function '" + f.name + "'");
    }
    for (const auto& f : p_.functions) function(f);
  }

 private:
  const Program& p_;
  std::set<std::string> all_fields_;
  std::map<std::string, MiniType> vars_;

  void check_type(const MiniType& t, const SourceLoc& loc) const {
    if (t.kind == TypeKind::Struct && !p_.find_struct(t.struct_name))
      throw ResolveError(loc, "unknown struct '" + t.struct_name + "'");
  }

  void function(const FuncDef& f) {
    vars_.clear();
    check_type(f.return_type, f.loc);
    for (const auto& prm : f.params) {
      check_type(prm.type, f.loc);
      if (!vars_.emplace(prm.name, prm.type).second)
        throw ResolveError(f.loc, "duplicate parameter '" + prm.name + "'");
    }
    collect_decls(f.body);
    block(f.body);
  }

  void collect_decls(const Block& b) {
    for (const auto& s : b) {
      if (s.kind == Stmt::Kind::Decl) {
        check_type(s.decl_type, s.loc);
        auto [it, fresh] = vars_.emplace(s.target, s.decl_type);
        if (!fresh && !(it->second == s.decl_type))
          throw ResolveError(s.loc, "conflicting declaration of '" + s.target + "'");
      }
      collect_decls(s.then_block);
      collect_decls(s.else_block);
    }
  }

  void deref(const std::string& var, const SourceLoc& loc) const {
    auto it = vars_.find(var);
    if (it != vars_.end() && !it->second.is_pointer())
      throw ResolveError(loc, "dereference of non-pointer variable '" + var + "'");
  }

  void field(const std::string& var, const std::string& name, const SourceLoc& loc) const {
    deref(var, loc);
    auto it = vars_.find(var);
    if (it != vars_.end() && it->second.kind == TypeKind::Struct) {
      const StructDef* sd = p_.find_struct(it->second.struct_name);
      bool found = std::any_of(sd->fields.begin(), sd->fields.end(),
                               [&](const Param& f) { return f.name == name; });
      if (!found) throw ResolveError(loc, "struct '" + sd->name + "' has no field '" + name + "'");
    } else if (!all_fields_.count(name)) {
      throw ResolveError(loc, "unknown field '" + name + "'");
    }
  }

  void block(const Block& b) {
    for (const auto& s : b) stmt(s);
  }

  void stmt(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Free:
        deref(s.target, s.loc);
        break;
      case Stmt::Kind::Store:
        deref(s.target, s.loc);
        break;
      case Stmt::Kind::Load:
        deref(s.source, s.loc);
        break;
      case Stmt::Kind::FieldStore:
        field(s.target, s.field, s.loc);
        break;
      case Stmt::Kind::FieldLoad:
        field(s.source, s.field, s.loc);
        break;
      case Stmt::Kind::Call: {
        std::size_t arity;
        if (s.callee == "memcpy") {
          arity = 3;
        } else if (s.callee == "strlen") {
          arity = 1;
        } else if (s.callee == "malloc" || s.callee == "free") {
          throw ResolveError(s.loc, "'" + s.callee + "' used outside its statement form");
        } else {
          const FuncDef* f = p_.find_function(s.callee);
          if (!f) throw ResolveError(s.loc, "unknown function '" + s.callee + "'");
          arity = f->params.size();
        }
        if (s.args.size() != arity)
          throw ResolveError(s.loc, "call to '" + s.callee + "' with " + std::to_string(s.args.size()) +
                                        " arguments, expected " + std::to_string(arity));
        if (s.callee == "memcpy") {
          for (std::size_t i = 0; i < 2; ++i)
            if (s.args[i].kind == Expr::Kind::Var) deref(s.args[i].name, s.loc);
        }
        break;
      }
      case Stmt::Kind::If:
      case Stmt::Kind::While:
        block(s.then_block);
        block(s.else_block);
        break;
      default:
        break;
    }
  }
};

}  // namespace

bool is_builtin(const std::string& name) { return name == "memcpy" || name == "strlen"; }

const FuncDef* Program::find_function(const std::string& name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

const StructDef* Program::find_struct(const std::string& name) const {
  for (const auto& s : structs)
    if (s.name == name) return &s;
  return nullptr;
}

Program parse_unresolved(const std::string& source_text, const std::string& filename) {
  Program p = Parser(lex(source_text, filename), filename).run();
  p.sources[filename] = source_text;
  return p;
}

void resolve(const Program& p) { Resolver(p).run(); }

Program parse(const std::string& source_text, const std::string& filename) {
  Program p = parse_unresolved(source_text, filename);
  resolve(p);
  return p;
}

Program link(std::vector<Program> units) {
  Program out;
  for (auto& u : units) {
    for (auto& s : u.structs) out.structs.push_back(std::move(s));
    for (auto& f : u.functions) out.functions.push_back(std::move(f));
    for (auto& [name, text] : u.sources) out.sources[name] = std::move(text);
  }
  resolve(out);
  return out;
}

}  // namespace silc
