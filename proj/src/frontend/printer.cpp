#include <sstream>

#include "silc/frontend.hpp"

namespace silc {

std::string MiniType::str() const {
  switch (kind) {
    case TypeKind::Int: return "int";
    case TypeKind::Void: return "void";
    case TypeKind::Ptr: return "ptr";
    case TypeKind::Struct: return "struct " + struct_name + "*";
  }
  return "?";
}

std::string Expr::str() const {
  switch (kind) {
    case Kind::Var: return name;
    case Kind::Int: return std::to_string(value);
    case Kind::Null: return "NULL";
  }
  return "?";
}

std::string Cond::str() const {
  switch (kind) {
    case Kind::Eq: return lhs.str() + " == " + rhs.str();
    case Kind::Ne: return lhs.str() + " != " + rhs.str();
    case Kind::Truthy: return lhs.str();
  }
  return "?";
}

namespace {

std::string args_str(const std::vector<Expr>& args) {
  std::string out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += args[i].str();
  }
  return out;
}

void print_block(std::ostringstream& os, const Block& b, int depth);

void print_stmt(std::ostringstream& os, const Stmt& s, int depth) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  os << pad;
  switch (s.kind) {
    case Stmt::Kind::Decl: os << s.decl_type.str() << " " << s.target << ";\n"; break;
    case Stmt::Kind::Assign: os << s.target << " = " << s.value.str() << ";\n"; break;
    case Stmt::Kind::Malloc: os << s.target << " = malloc();\n"; break;
    case Stmt::Kind::Free: os << "free(" << s.target << ");\n"; break;
    case Stmt::Kind::Store: os << "[" << s.target << "] = " << s.value.str() << ";\n"; break;
    case Stmt::Kind::Load: os << s.target << " = [" << s.source << "];\n"; break;
    case Stmt::Kind::FieldStore: os << s.target << "->" << s.field << " = " << s.value.str() << ";\n"; break;
    case Stmt::Kind::FieldLoad: os << s.target << " = " << s.source << "->" << s.field << ";\n"; break;
    case Stmt::Kind::Call:
      if (!s.target.empty()) os << s.target << " = ";
      os << s.callee << "(" << args_str(s.args) << ");\n";
      break;
    case Stmt::Kind::If:
      os << "if (" << s.cond.str() << ") {\n";
      print_block(os, s.then_block, depth + 1);
      os << pad << "}";
      if (s.has_else) {
        os << " else {\n";
        print_block(os, s.else_block, depth + 1);
        os << pad << "}";
      }
      os << "\n";
      break;
    case Stmt::Kind::While:
      os << "while (" << s.cond.str() << ") {\n";
      print_block(os, s.then_block, depth + 1);
      os << pad << "}\n";
      break;
    case Stmt::Kind::Return:
      os << "return";
      if (s.has_value) os << " " << s.value.str();
      os << ";\n";
      break;
  }
}

void print_block(std::ostringstream& os, const Block& b, int depth) {
  for (const auto& s : b) print_stmt(os, s, depth);
}

bool same_block(const Block& a, const Block& b);

bool same_stmt(const Stmt& a, const Stmt& b) {
  return a.kind == b.kind && a.target == b.target && a.source == b.source && a.field == b.field &&
         a.has_value == b.has_value && a.value == b.value && a.callee == b.callee && a.args == b.args &&
         a.cond == b.cond && a.has_else == b.has_else && a.decl_type == b.decl_type &&
         same_block(a.then_block, b.then_block) && same_block(a.else_block, b.else_block);
}

bool same_block(const Block& a, const Block& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_stmt(a[i], b[i])) return false;
  return true;
}

}  // namespace

std::string pretty_print(const FuncDef& f) {
  std::ostringstream os;
  if (f.world_tag == WorldTag::Vendor) os << "// @vendor\n";
  os << f.return_type.str() << " " << f.name << "(";
  for (std::size_t i = 0; i < f.params.size(); ++i) {
    if (i) os << ", ";
    os << f.params[i].type.str() << " " << f.params[i].name;
  }
  os << ") {\n";
  print_block(os, f.body, 1);
  os << "}\n";
  return os.str();
}

std::string pretty_print(const Program& p) {
  std::ostringstream os;
  for (const auto& s : p.structs) {
    os << "struct " << s.name << " {\n";
    for (const auto& f : s.fields) os << "  " << f.type.str() << " " << f.name << ";\n";
    os << "};\n\n";
  }
  for (const auto& f : p.functions) os << pretty_print(f) << "\n";
  return os.str();
}

bool structurally_equal(const Program& a, const Program& b) {
  if (a.structs.size() != b.structs.size() || a.functions.size() != b.functions.size()) return false;
  for (std::size_t i = 0; i < a.structs.size(); ++i)
    if (a.structs[i].name != b.structs[i].name || a.structs[i].fields != b.structs[i].fields) return false;
  for (std::size_t i = 0; i < a.functions.size(); ++i) {
    const auto& x = a.functions[i];
    const auto& y = b.functions[i];
    if (x.name != y.name || x.params != y.params || !(x.return_type == y.return_type) ||
        x.world_tag != y.world_tag || !same_block(x.body, y.body))
      return false;
  }
  return true;
}

}  // namespace silc
