#pragma once

#include <set>
#include <string>
#include <vector>

#include "silc/isl.hpp"

namespace silc {

/// Union-find over terms plus disequality edges. Without function symbols
/// this decides conjunctions of (dis)equalities over variables, integer
/// constants and nil. nil and distinct integers are pairwise distinct.
class CongruenceState {
 public:
  CongruenceState() = default;
  explicit CongruenceState(const Conj& c) { add_all(c); }

  /// Returns false once the constraints are unsatisfiable.
  bool add(const Literal& lit);
  bool add_all(const Conj& c);
  bool consistent() const { return consistent_; }

  bool equal(const Term& a, const Term& b);
  /// Provably distinct: separated by a disequality edge or distinct constants.
  bool distinct(const Term& a, const Term& b);
  /// Ground member of the class, else a deterministic representative.
  Term canonical(const Term& t);

  /// Equivalence classes of every term seen so far, each sorted.
  std::vector<std::vector<Term>> classes();
  const std::vector<std::pair<Term, Term>>& disequalities() const { return diseq_; }

 private:
  std::vector<Term> terms_;
  std::vector<std::size_t> parent_;
  std::vector<std::pair<Term, Term>> diseq_;
  bool consistent_ = true;

  std::size_t id(const Term& t);
  std::size_t find(std::size_t i);
  void check();
};

bool is_satisfiable(const Conj& c);
bool is_satisfiable(const PureTerm& p);

/// True iff every model of lhs satisfies each literal of rhs.
bool entails_pure(const Conj& lhs, const Conj& rhs);
bool entails_pure(const PureTerm& lhs, const PureTerm& rhs);

/// Strongest conjunction over the kept variables (and constants) implied by c.
Conj project(const Conj& c, const std::set<std::string>& keep);

}  // namespace silc
