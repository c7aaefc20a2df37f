#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "silc/isl.hpp"

namespace silc {

/// The rule's precondition cannot be reconciled with the current state.
class Inconsistent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BiabductionResult {
  SymbolicState missing;  // m
  SymbolicState frame;    // f, carrying the full pure part of p
  std::vector<std::pair<Atom, Atom>> matched;  // (required, owned)
  Subst subst;  // bindings of q's schematic variables
};

/// Pure facts implied by a well-formed heap: every location head is not
/// nil and distinct cells have distinct heads.
Conj spatial_facts(const std::vector<Atom>& heap);

/// Entailment in the direction p |- q: every model of q is a model of p.
/// Variables of p that q does not mention may be instantiated.
bool entails(const SymbolicState& p, const SymbolicState& q);

/// Finds (m, f) with p * m |- q * f. Variables of q absent from p are
/// schematic and get bound by matching. Throws Inconsistent when q cannot
/// hold together with p.
BiabductionResult biabduce(const SymbolicState& p, const SymbolicState& q);

/// Separating conjunction of two states (union of heaps, conjunction of
/// pure parts and paths).
SymbolicState star(const SymbolicState& a, const SymbolicState& b);

}  // namespace silc
