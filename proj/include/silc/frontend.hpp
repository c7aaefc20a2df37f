#pragma once

// MiniC: the small pointer language the analyzer consumes.
//
//   program    := (structdef | funcdef)*
//   structdef  := "struct" ID "{" (type ID ";")+ "}" ";"
//   type       := "int" | "void" | "ptr" | "struct" ID "*"
//   funcdef    := ["// @vendor" NEWLINE] type ID "(" params ")" block
//   stmt       := assignments, malloc/free, [x] loads and stores, x->f
//                 loads and stores, calls, if/else, while, return, and
//                 local declarations "type ID ;"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace silc {

struct SourceLoc {
  std::string file;
  int line = 0;
  int column = 0;
  std::size_t offset = 0;
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const SourceLoc& loc, const std::string& msg);
  SourceLoc loc;
};

class ResolveError : public std::runtime_error {
 public:
  ResolveError(const SourceLoc& loc, const std::string& msg);
  SourceLoc loc;
};

enum class TypeKind { Int, Void, Ptr, Struct };

struct MiniType {
  TypeKind kind = TypeKind::Int;
  std::string struct_name;  // only for Struct (always a pointer to it)

  bool is_pointer() const { return kind == TypeKind::Ptr || kind == TypeKind::Struct; }
  std::string str() const;
  friend bool operator==(const MiniType&, const MiniType&) = default;
};

enum class WorldTag { Client, Vendor };

struct Expr {
  enum class Kind { Var, Int, Null };
  Kind kind = Kind::Null;
  std::string name;
  long long value = 0;

  static Expr var(std::string n) { return {Kind::Var, std::move(n), 0}; }
  static Expr integer(long long v) { return {Kind::Int, {}, v}; }
  static Expr null() { return {Kind::Null, {}, 0}; }
  std::string str() const;
  friend bool operator==(const Expr&, const Expr&) = default;
};

struct Cond {
  enum class Kind { Eq, Ne, Truthy };
  Kind kind = Kind::Truthy;
  Expr lhs;
  Expr rhs;
  std::string str() const;
  friend bool operator==(const Cond&, const Cond&) = default;
};

struct Stmt;
using Block = std::vector<Stmt>;

struct Stmt {
  enum class Kind {
    Decl,        // type x;
    Assign,      // x = e;
    Malloc,      // x = malloc();
    Free,        // free(x);
    Store,       // [x] = e;
    Load,        // x = [y];
    FieldStore,  // x->f = e;
    FieldLoad,   // x = y->f;
    Call,        // [x =] f(args);
    If,
    While,
    Return,
  };

  Kind kind = Kind::Assign;
  std::string target;  // assigned / stored-through variable
  std::string source;  // y in Load and FieldLoad
  std::string field;
  Expr value;          // rhs of Assign/Store/FieldStore, Return value
  bool has_value = false;
  std::string callee;
  std::vector<Expr> args;
  Cond cond;
  Block then_block;
  Block else_block;
  bool has_else = false;
  MiniType decl_type;
  SourceLoc loc;
};

struct Param {
  std::string name;
  MiniType type;
  friend bool operator==(const Param&, const Param&) = default;
};

struct StructDef {
  std::string name;
  std::vector<Param> fields;
  SourceLoc loc;
};

struct FuncDef {
  std::string name;
  std::vector<Param> params;
  MiniType return_type;
  Block body;
  WorldTag world_tag = WorldTag::Client;
  SourceLoc loc;
  SourceLoc end_loc;  // closing brace
};

struct Program {
  std::vector<StructDef> structs;
  std::vector<FuncDef> functions;
  // file name -> original text; locations index into these.
  std::map<std::string, std::string> sources;

  const FuncDef* find_function(const std::string& name) const;
  const StructDef* find_struct(const std::string& name) const;
};

/// Names with fixed built-in summaries. malloc and free are statements of
/// their own; memcpy and strlen go through the ordinary call syntax.
bool is_builtin(const std::string& name);

/// Parses one translation unit. Throws SyntaxError or ResolveError.
Program parse(const std::string& source_text, const std::string& filename);

/// Parses without name resolution; used when several files are linked.
Program parse_unresolved(const std::string& source_text, const std::string& filename);

/// Checks names, arities and dereference typing. Throws ResolveError.
void resolve(const Program& p);

/// Concatenates parsed units and resolves the result.
Program link(std::vector<Program> units);

/// Renders a Program back to MiniC source.
std::string pretty_print(const Program& p);
std::string pretty_print(const FuncDef& f);

/// Structural equality ignoring source locations.
bool structurally_equal(const Program& a, const Program& b);

struct CallGraph {
  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> edges;  // caller -> callee
  // Strongly connected components, callees before callers.
  std::vector<std::vector<std::string>> sccs;

  const std::vector<std::string>* scc_of(const std::string& fn) const;
};

CallGraph build_call_graph(const Program& p);

// Lexer is exposed for the parser and tests.
struct Token {
  enum class Kind { Ident, Int, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  long long value = 0;
  SourceLoc loc;
};

struct LexResult {
  std::vector<Token> tokens;
  std::set<int> vendor_lines;  // lines holding a "// @vendor" comment
};

LexResult lex(const std::string& text, const std::string& filename);

}  // namespace silc
