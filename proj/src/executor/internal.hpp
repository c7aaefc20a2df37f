#pragma once

#include <map>
#include <string>

#include "silc/executor.hpp"

namespace silc::detail {

const Atom* find_var(const SymbolicState& s, const std::string& x);

/// Rebinds program variable x, adding its cell when absent.
void set_var(SymbolicState& s, const std::string& x, const Term& v);

/// Drops the cell of program variable x.
void drop_var(SymbolicState& s, const std::string& x);

std::map<BugRef, Atom> worlds_of(const SymbolicState& s);

/// The entity whose code is running, stamped with a statement line.
Entity running_entity(const FunctionContext& ctx, int line);

/// Blame atoms making the running entity responsible for t, one per kind.
std::vector<Atom> stamp_blames(const SymbolicState& s, const Term& t, const FunctionContext& ctx, int line,
                               const std::set<BugRef>& kinds);

/// Pure part plus heap facts is satisfiable.
bool feasible(const SymbolicState& s);

/// Variable name with its numeric suffix removed, used as a fresh-name hint.
std::string hint_of(const std::string& name);

/// Logical variable naming the entry value of a formal parameter.
std::string formal_value_name(const std::string& formal);

}  // namespace silc::detail
