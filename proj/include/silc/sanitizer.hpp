#pragma once

// Path-condition extraction, wrapper synthesis and call-site patching for
// integration findings.

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "silc/blame.hpp"

namespace silc {

class UnscopedCondition : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PatchConflict : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Program-variable access path: a base variable followed by dereferences
/// (empty step) and field selections.
struct AccessPath {
  std::string base;
  std::vector<std::string> steps;

  std::size_t depth() const { return steps.size(); }
  AccessPath parent() const;
  AccessPath then(std::string step) const;
  std::string str() const;  // x, *x, x->f, (*x)->f
  friend bool operator==(const AccessPath&, const AccessPath&) = default;
  friend auto operator<=>(const AccessPath&, const AccessPath&) = default;
};

struct Operand {
  std::optional<AccessPath> path;  // else a constant
  Expr constant;
  std::string str() const;
  friend bool operator==(const Operand&, const Operand&) = default;
};

struct ProgramLiteral {
  bool positive = true;
  Operand lhs;
  Operand rhs;
  std::string str() const;
  friend bool operator==(const ProgramLiteral&, const ProgramLiteral&) = default;
};

/// Conjunction; empty means true.
using ProgramCondition = std::vector<ProgramLiteral>;
std::string render(const ProgramCondition& c);

/// Rewrites pi over the program variables of state, following x |-> X,
/// X |-> Y and X.f |-> Y chains.
ProgramCondition collapse_to_program_condition(const Conj& pi, const SymbolicState& state);
ProgramCondition collapse_to_program_condition(const PureTerm& pi, const SymbolicState& state);

struct SanitizerPlan {
  std::string caller;
  std::string callee;
  SourceLoc loc;  // culprit call
  std::vector<Expr> args;
  FlowSign direction = FlowSign::Plus;
  SanTemplate tmpl = SanTemplate::Stop;
  BugRef ref = BugRef::NPD;
  Conj pi0;          // over callee logical variables
  Conj caller_path;  // Minus: path of the caller at the call
  /// Disjunction of guards, each over the callee's formals.
  std::vector<ProgramCondition> guards;
  std::string condition_text;    // over the callee's formals
  std::string caller_condition;  // Minus: caller path over the caller's variables
  std::vector<AccessPath> rescues;
};

SanitizerPlan extract_path_condition(const IntegrationFinding& finding, const std::map<std::string, Summary>& summaries,
                                     const Program& program);

/// Combines plans that target the same call with the same template.
std::vector<SanitizerPlan> merge_plans(const std::vector<SanitizerPlan>& plans);

struct SanitizerSource {
  std::string name;
  FuncDef wrapper;
  std::string wrapper_text;
  std::string caller;
  std::string callee;
  std::string file;
  int call_line = 0;
  int call_column = 0;
  int caller_line = 0;
  std::string original_line;
  std::string replacement_line;
  std::string diff_pair() const;  // "--- original\n+++ replacement\n"
};

/// Name of the form sanitise_<callee>_<n> not yet taken in taken.
std::string fresh_wrapper_name(const std::string& callee, std::set<std::string>& taken);

SanitizerSource generate_sanitizer(const SanitizerPlan& plan, const Program& program, const AnalysisConfig& cfg,
                                   const std::string& name);

/// Accumulates wrapper insertions and call replacements against the
/// original text of one file.
class SourcePatcher {
 public:
  SourcePatcher(std::string file, const std::string& text);
  /// Raises PatchConflict if the call is no longer at its location.
  void apply(const SanitizerSource& src);
  std::string text() const;
  std::string diff() const;
  const std::string& file() const { return file_; }

 private:
  std::string file_;
  std::string original_;
  std::vector<std::string> lines_;
  std::map<int, std::string> inserts_;  // before original line
  std::set<std::pair<int, std::string>> done_;
};

struct PatchResult {
  std::string text;
  std::string diff;
};

PatchResult rewrite_call_site(const Program& p, const SanitizerSource& src);

std::string unified_diff(const std::string& from_name, const std::string& to_name, const std::string& a,
                         const std::string& b, int context = 3);

}  // namespace silc
