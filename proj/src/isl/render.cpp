#include <sstream>

#include "silc/isl.hpp"

namespace silc {

namespace {

std::string conj_str(const Conj& c) {
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i) out += (i ? " /\\ " : "") + c[i].str();
  return out;
}

}  // namespace

std::string Atom::str() const {
  switch (kind) {
    case Kind::PointsToVar: return pvar + "|->" + value.str();
    case Kind::PointsToLoc: return loc.str() + "|->" + value.str();
    case Kind::PointsToField: return loc.str() + "." + field + "|->" + value.str();
    case Kind::Invalid: return loc.str() + "!";
    case Kind::Blame:
      return "Blame(" + loc.str() + ", " + entity.str() + ", " + bug_cond().str() + ", " + san.str() + ", " + ctx +
             ")";
    case Kind::World:
      return "World(" + entity.str() + ", " + to_string(ref) + ", " + san.str() + ", " + ctx + ")";
  }
  return "?";
}

std::string SymbolicState::str() const {
  std::ostringstream os;
  if (!existentials.empty()) {
    os << "exists";
    for (const auto& e : existentials) os << " " << e;
    os << ". ";
  }
  if (!path.empty()) os << "(" << conj_str(path) << "; ";
  if (heap.empty()) {
    os << "emp";
  } else {
    for (std::size_t i = 0; i < heap.size(); ++i) os << (i ? " * " : "") << heap[i].str();
  }
  if (!pure.empty()) os << " /\\ " << conj_str(pure);
  if (!path.empty()) os << ")";
  return os.str();
}

std::string Triple::str() const {
  std::string tag = exit == ExitKind::Ok ? "ok" : world.str() + ":err";
  return "[" + pre.str() + "] " + code + " [" + tag + ": " + post.str() + "]";
}

}  // namespace silc
