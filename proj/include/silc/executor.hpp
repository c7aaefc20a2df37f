#pragma once

// Symbolic execution over blame-carrying ISL: predefined rules, statement
// evaluation, call summaries and per-function specification inference.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "silc/biabduction.hpp"
#include "silc/frontend.hpp"
#include "silc/isl.hpp"

namespace silc {

class NoRuleApplies : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Where and how a faulting primitive went wrong.
struct FaultInfo {
  BugRef ref = BugRef::NPD;
  Term resource;
  std::string function;  // function containing the primitive
  SourceLoc loc;
  std::string primitive;  // free, store, load, memcpy, ...
};

/// A call whose summary was applied, as seen from the caller.
struct CallSite {
  std::string caller;
  std::string callee;
  SourceLoc loc;
  std::vector<Expr> args;
  std::vector<std::string> formals;
  std::vector<Term> actuals;  // caller values bound to the formals
  SymbolicState callee_pre;   // renamed, formals still as callee variables
  Conj callee_post_path;      // renamed
  std::map<std::string, std::string> formal_values;  // callee logical formal -> formal name
  SymbolicState caller_state;  // state right before the call
};

struct Rule {
  std::string name;
  ExitKind exit = ExitKind::Ok;
  SymbolicState pre;
  SymbolicState post;
  std::optional<BugRef> fault;  // set on Err rules
  Term resource;                // faulting (Err) or accessed (Ok) resource
  std::vector<Term> shifted;    // Ok: blame moves to the world entity
  std::vector<Term> blamed;     // Ok: fresh resources blamed on the world
};

/// Predefined summaries, instantiated per statement with fresh schematic
/// variables. World atoms stay out of the rule shapes: the evaluator reads
/// the world from the state and stamps shifted and fresh Blame atoms itself.
class RuleTable {
 public:
  explicit RuleTable(std::set<BugRef> kinds) : kinds_(std::move(kinds)) {}

  std::vector<Rule> malloc_rules(const std::string& x, FreshNames& fn) const;
  std::vector<Rule> free_rules(const std::string& x, FreshNames& fn) const;
  std::vector<Rule> store_rules(const std::string& x, const Expr& e, FreshNames& fn) const;
  std::vector<Rule> load_rules(const std::string& x, const std::string& y, FreshNames& fn) const;
  std::vector<Rule> field_store_rules(const std::string& x, const std::string& f, const Expr& e,
                                      FreshNames& fn) const;
  std::vector<Rule> field_load_rules(const std::string& x, const std::string& y, const std::string& f,
                                     FreshNames& fn) const;
  std::vector<Rule> assign_rules(const std::string& x, const Expr& e, FreshNames& fn) const;
  /// Dereference check used by builtins: y must point to a live cell.
  std::vector<Rule> access_rules(const std::string& y, const std::string& what, FreshNames& fn) const;

  const std::set<BugRef>& kinds() const { return kinds_; }

 private:
  std::set<BugRef> kinds_;

  void add_blame_requirements(SymbolicState& s, const Term& t, FreshNames& fn) const;
  // Fresh value equal to a constant expression, blamed on the world.
  Term bind_constant(const Expr& e, SymbolicState& post, Rule& r, FreshNames& fn) const;
};

struct EvalOutcome {
  ExitKind exit = ExitKind::Ok;
  Entity world;  // Err: manifestation world
  SymbolicState missing;
  SymbolicState post;
  std::optional<FaultInfo> fault;
  std::shared_ptr<const CallSite> culprit;  // vendor call the error came through
  std::vector<std::string> diagnostics;
};

struct LeakFinding {
  Term cell;
  std::optional<Atom> blame;  // on the severed parent, else on the cell
  std::optional<Term> parent;
  std::string parent_field;
  bool latent = false;
};

struct SummaryTriple {
  Triple triple;
  bool latent = false;
  std::optional<FaultInfo> fault;
  std::shared_ptr<const CallSite> culprit;
  std::vector<LeakFinding> leaks;  // Ok triples only
  SourceLoc exit_loc;
};

struct Summary {
  std::string function;
  WorldTag world = WorldTag::Client;
  std::vector<std::string> formals;
  std::vector<SummaryTriple> triples;
  std::vector<std::string> diagnostics;
};

/// One evaluated primitive or call, for auditing the blame laws.
struct StepRecord {
  std::string function;
  std::string kind;  // malloc, free, store, load, field_store, field_load, assign, access, call
  Entity world;
  SymbolicState before;  // p * m
  EvalOutcome outcome;
  std::vector<Term> shifted;
};

struct AnalysisConfig {
  std::set<BugRef> bugs{BugRef::NPD, BugRef::MemLeak, BugRef::UAF};
  std::map<BugRef, SanTemplate> protocols{
      {BugRef::NPD, SanTemplate::Stop}, {BugRef::MemLeak, SanTemplate::NoLeak}, {BugRef::UAF, SanTemplate::Stop}};
  std::map<std::string, std::string> error_returns{{"int", "0"}, {"ptr", "NULL"}};
  int unroll_bound = 2;
  std::size_t max_disjuncts = 64;
  std::uint64_t seed = 0;
  std::function<void(const StepRecord&)> observer;
};

/// Evaluation context for one function.
struct FunctionContext {
  const Program* program = nullptr;
  const FuncDef* function = nullptr;
  const std::map<std::string, Summary>* env = nullptr;
  std::set<std::string> recursive;  // callees treated as skipped calls
  const AnalysisConfig* config = nullptr;
  FreshNames* names = nullptr;
  std::vector<std::string>* diagnostics = nullptr;
};

Entity world_entity(const FuncDef& f, int line);

/// One World atom per enabled bug kind, owned by f's world.
SymbolicState initial_worlds(const FuncDef& f, const std::set<BugRef>& kinds,
                             const std::map<BugRef, SanTemplate>& protocols);

/// Applies the predefined rules for a primitive statement.
std::vector<EvalOutcome> eval_stmt(const SymbolicState& p, const Stmt& s, const RuleTable& rules,
                                   FunctionContext& ctx);

/// Applies every callee triple to the caller state.
std::vector<EvalOutcome> apply_summary(const SymbolicState& p, const Stmt& call, const Summary& callee,
                                       const Entity& caller_world, FunctionContext& ctx);

Summary analyze_function(const FuncDef& f, const std::map<std::string, Summary>& env, const AnalysisConfig& cfg,
                         const Program& program, FreshNames& names, const std::set<std::string>& recursive = {});

/// Allocated cells unreachable from the roots.
std::vector<LeakFinding> detect_leaks_at_exit(const SymbolicState& q, const std::vector<Term>& roots,
                                              const std::set<std::string>& pre_vocab);

std::map<std::string, Summary> analyze_program(const Program& p, const AnalysisConfig& cfg);

}  // namespace silc
