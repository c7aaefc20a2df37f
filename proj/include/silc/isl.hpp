#pragma once

// Blame-carrying incorrectness separation logic: terms, pure and spatial
// assertions, symbolic states and triples, plus their structural algebra.

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace silc {

class CaptureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SeparationViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedAtom : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Term {
  enum class Kind { ProgVar, LogVar, Const, Nil };
  Kind kind = Kind::Nil;
  std::string name;
  long long value = 0;

  static Term var(std::string n) { return {Kind::LogVar, std::move(n), 0}; }
  static Term prog(std::string n) { return {Kind::ProgVar, std::move(n), 0}; }
  static Term constant(long long v) { return {Kind::Const, {}, v}; }
  static Term nil() { return {}; }

  bool is_var() const { return kind == Kind::LogVar; }
  bool is_ground() const { return kind == Kind::Const || kind == Kind::Nil; }
  std::string str() const;

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;
};

// lhs = rhs (positive) or lhs != rhs.
struct Literal {
  bool positive = true;
  Term lhs;
  Term rhs;

  static Literal eq(Term a, Term b) { return {true, std::move(a), std::move(b)}; }
  static Literal ne(Term a, Term b) { return {false, std::move(a), std::move(b)}; }
  static Literal falsum() { return ne(Term::nil(), Term::nil()); }
  Literal negated() const { return {!positive, lhs, rhs}; }
  std::string str() const;

  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal&, const Literal&) = default;
};

/// A conjunction of literals. Normalized form is oriented, sorted and
/// duplicate free; a trivially false conjunction is the single literal
/// nil != nil.
using Conj = std::vector<Literal>;

Conj normalize_conj(Conj c);
bool is_falsum(const Conj& c);

/// Pure formulas as written: True | B | t = t | p /\ p | !p.
struct PureTerm {
  enum class Kind { True, Bool, Eq, And, Not };
  Kind kind = Kind::True;
  bool value = true;
  Term lhs;
  Term rhs;
  std::vector<PureTerm> kids;

  static PureTerm truth() { return {}; }
  static PureTerm boolean(bool b) { return {Kind::Bool, b, {}, {}, {}}; }
  static PureTerm eq(Term a, Term b) { return {Kind::Eq, true, std::move(a), std::move(b), {}}; }
  static PureTerm ne(Term a, Term b) { return negate(eq(std::move(a), std::move(b))); }
  static PureTerm conj(std::vector<PureTerm> ks) { return {Kind::And, true, {}, {}, std::move(ks)}; }
  static PureTerm negate(PureTerm p) { return {Kind::Not, true, {}, {}, {std::move(p)}}; }
};

/// Flattens to literal normal form. Negation over a conjunction has no
/// literal form and raises UnsupportedAtom.
Conj to_literals(const PureTerm& p);
PureTerm from_literals(const Conj& c);

enum class EntityKind { Client, Vendor, Unknown };

struct Entity {
  EntityKind kind = EntityKind::Unknown;
  std::string var;  // Unknown entities are logical variables
  std::string file;
  std::string function;
  int line = 0;

  static Entity unknown(std::string v) { return {EntityKind::Unknown, std::move(v), {}, {}, 0}; }
  static Entity client(std::string file, std::string fn, int line) {
    return {EntityKind::Client, {}, std::move(file), std::move(fn), line};
  }
  static Entity vendor(std::string file, std::string fn, int line) {
    return {EntityKind::Vendor, {}, std::move(file), std::move(fn), line};
  }
  bool known() const { return kind != EntityKind::Unknown; }
  bool has_meta() const { return !file.empty() && !function.empty() && line > 0; }
  std::string str() const;  // kind (or variable) only
  std::string describe() const;  // with metadata

  friend bool operator==(const Entity&, const Entity&) = default;
};

enum class BugRef { NPD, MemLeak, UAF };
enum class SanTemplate { Stop, NoLeak };
enum class FlowSign { Plus, Minus };

std::string to_string(BugRef r);
std::string to_string(SanTemplate t);
std::string to_string(FlowSign s);
std::optional<BugRef> parse_bug_ref(const std::string& s);
std::optional<SanTemplate> parse_template(const std::string& s);

/// Flow direction is a property of the bug kind: NPD and UAF come from
/// resources flowing into the vendor call, leaks flow out of it.
FlowSign flow_sign_for(BugRef r);

struct Sanitization {
  SanTemplate tmpl = SanTemplate::Stop;
  Conj path;
  FlowSign sign = FlowSign::Plus;
  std::string str() const;
  friend bool operator==(const Sanitization&, const Sanitization&) = default;
};

/// Bug condition carried by a Blame atom: the bug reference applied to the
/// blamed resource.
struct BugCond {
  BugRef ref = BugRef::NPD;
  Term arg;
  std::string str() const;
};

struct CallSite;  // executor.hpp

struct Atom {
  enum class Kind { PointsToVar, PointsToLoc, PointsToField, Invalid, Blame, World };
  Kind kind = Kind::PointsToLoc;
  std::string pvar;
  Term loc;  // location, Invalid target, Blame resource
  std::string field;
  Term value;
  Entity entity;
  BugRef ref = BugRef::NPD;
  Sanitization san;
  std::string ctx;
  // For Blame atoms that entered a caller through a vendor call: that call.
  std::shared_ptr<const CallSite> via;

  static Atom var_pt(std::string x, Term v);
  static Atom loc_pt(Term l, Term v);
  static Atom field_pt(Term l, std::string f, Term v);
  static Atom invalid(Term l);
  static Atom blame(Term x, Entity e, BugRef r, Sanitization s, std::string ctx);
  static Atom world(Entity e, BugRef r, Sanitization s, std::string ctx);

  bool is_spatial_cell() const { return kind <= Kind::Invalid; }
  BugCond bug_cond() const { return {ref, loc}; }
  /// Resource key: two atoms with the same head cannot be separated.
  std::string head() const;
  std::string str() const;

  friend bool operator==(const Atom& a, const Atom& b);
};

/// Fixed total order: constructor rank, then names.
bool atom_less(const Atom& a, const Atom& b);

struct SymbolicState {
  Conj path;
  std::vector<Atom> heap;
  Conj pure;
  std::set<std::string> existentials;

  std::string str() const;
  friend bool operator==(const SymbolicState&, const SymbolicState&) = default;
};

enum class ExitKind { Ok, Err };

struct Triple {
  SymbolicState pre;
  std::string code;
  ExitKind exit = ExitKind::Ok;
  Entity world;  // manifestation world of Err triples
  SymbolicState post;
  std::string str() const;
};

struct Subst {
  std::map<std::string, Term> terms;
  std::map<std::string, Entity> entities;

  bool empty() const { return terms.empty() && entities.empty(); }
  Term apply(const Term& t) const;
  Entity apply(const Entity& e) const;
  Literal apply(const Literal& l) const;
  Conj apply(const Conj& c) const;
  Atom apply(const Atom& a) const;
};

/// Simultaneous substitution over path, pure and heap, then normalization.
/// Mapping a bound existential, or onto one, raises CaptureError.
SymbolicState substitute(const SymbolicState& s, const Subst& m);

/// Flattens, drops trivial literals, sorts atoms, and checks separation.
SymbolicState normalize(const SymbolicState& s);

/// Logical variables mentioned anywhere in the state (terms and entities).
std::set<std::string> vars_of(const SymbolicState& s);
std::set<std::string> vars_of(const Atom& a);
std::set<std::string> vars_of(const Conj& c);
void add_vars(const Term& t, std::set<std::string>& out);

/// Fresh logical variable supply. Names are hint + counter; the sequence is
/// a pure function of the seed.
class FreshNames {
 public:
  explicit FreshNames(std::uint64_t seed = 0) : seed_(seed), next_(1 + seed % 1000) {}
  Term fresh_var(const std::string& hint);
  std::string fresh_name(const std::string& hint);
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t next_;
};

}  // namespace silc
