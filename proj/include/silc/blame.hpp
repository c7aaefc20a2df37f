#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "silc/executor.hpp"

namespace silc {

class MissingBlame : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// P(X) := body, with X the parameter.
struct BugDef {
  BugRef ref = BugRef::NPD;
  std::string param = "X";
  SymbolicState body;
  std::string text;
};

struct BugCatalog {
  std::set<BugRef> enabled;
  std::map<BugRef, BugDef> defs;
  std::map<BugRef, Sanitization> policy;

  static BugCatalog from_config(const AnalysisConfig& cfg);
  static BugDef default_def(BugRef r);
};

/// World atoms for f, one per enabled kind.
SymbolicState init_worlds(const FuncDef& f, const BugCatalog& catalog);

/// Instantiated bug condition P(t) holds in state q.
bool bug_holds(const BugCatalog& catalog, BugRef ref, const Term& t, const SymbolicState& q);

enum class FindingStatus { SameWorld, Integration, MissingBlame };
std::string to_string(FindingStatus s);

struct IntegrationFinding {
  BugRef ref = BugRef::NPD;
  FindingStatus status = FindingStatus::MissingBlame;
  std::string function;  // where the bug manifests
  SourceLoc manifest_loc;
  Entity manifest_world;  // E'
  std::optional<Entity> blamed;  // E
  std::optional<Atom> blame;
  std::shared_ptr<const CallSite> culprit;
  SummaryTriple triple;
  std::optional<LeakFinding> leak;
  std::string detail;
};

/// Manifest errors and leaks of every summary, with blame resolved.
std::vector<IntegrationFinding> classify(const std::map<std::string, Summary>& summaries, const Program& program,
                                         const BugCatalog& catalog);

}  // namespace silc
