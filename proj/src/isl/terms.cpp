#include <algorithm>

#include "silc/isl.hpp"

namespace silc {

std::string Term::str() const {
  switch (kind) {
    case Kind::ProgVar:
    case Kind::LogVar: return name;
    case Kind::Const: return std::to_string(value);
    case Kind::Nil: return "nil";
  }
  return "?";
}

std::string Literal::str() const { return lhs.str() + (positive ? " = " : " != ") + rhs.str(); }

namespace {

bool distinct_ground(const Term& a, const Term& b) { return a.is_ground() && b.is_ground() && a != b; }

}  // namespace

Conj normalize_conj(Conj c) {
  Conj out;
  for (auto lit : c) {
    if (lit.rhs < lit.lhs) std::swap(lit.lhs, lit.rhs);
    if (lit.lhs == lit.rhs) {
      if (lit.positive) continue;
      return {Literal::falsum()};
    }
    if (distinct_ground(lit.lhs, lit.rhs)) {
      if (!lit.positive) continue;
      return {Literal::falsum()};
    }
    out.push_back(std::move(lit));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (const auto& lit : out)
    if (std::binary_search(out.begin(), out.end(), lit.negated())) return {Literal::falsum()};
  return out;
}

bool is_falsum(const Conj& c) { return c.size() == 1 && c.front() == Literal::falsum(); }

namespace {

void literals_into(const PureTerm& p, bool negated, Conj& out) {
  switch (p.kind) {
    case PureTerm::Kind::True:
      if (negated) out.push_back(Literal::falsum());
      return;
    case PureTerm::Kind::Bool:
      if (p.value == negated) out.push_back(Literal::falsum());
      return;
    case PureTerm::Kind::Eq:
      out.push_back(negated ? Literal::ne(p.lhs, p.rhs) : Literal::eq(p.lhs, p.rhs));
      return;
    case PureTerm::Kind::Not:
      if (p.kids.size() != 1) throw UnsupportedAtom("negation needs exactly one operand");
      literals_into(p.kids.front(), !negated, out);
      return;
    case PureTerm::Kind::And:
      if (negated) {
        // !(a /\ b) is a disjunction unless at most one conjunct is non-trivial.
        if (p.kids.size() == 1) {
          literals_into(p.kids.front(), true, out);
          return;
        }
        if (p.kids.empty()) {
          out.push_back(Literal::falsum());
          return;
        }
        throw UnsupportedAtom("negated conjunction has no literal normal form");
      }
      for (const auto& k : p.kids) literals_into(k, false, out);
      return;
  }
}

}  // namespace

Conj to_literals(const PureTerm& p) {
  Conj out;
  literals_into(p, false, out);
  return normalize_conj(std::move(out));
}

PureTerm from_literals(const Conj& c) {
  if (c.empty()) return PureTerm::truth();
  std::vector<PureTerm> kids;
  for (const auto& lit : c) kids.push_back(lit.positive ? PureTerm::eq(lit.lhs, lit.rhs) : PureTerm::ne(lit.lhs, lit.rhs));
  if (kids.size() == 1) return kids.front();
  return PureTerm::conj(std::move(kids));
}

std::string Entity::str() const {
  switch (kind) {
    case EntityKind::Client: return "Client";
    case EntityKind::Vendor: return "Vendor";
    case EntityKind::Unknown: return var;
  }
  return "?";
}

std::string Entity::describe() const {
  if (!known()) return str();
  return str() + "@" + file + ":" + function + ":" + std::to_string(line);
}

std::string to_string(BugRef r) {
  switch (r) {
    case BugRef::NPD: return "NPD";
    case BugRef::MemLeak: return "MemLeak";
    case BugRef::UAF: return "UAF";
  }
  return "?";
}

std::string to_string(SanTemplate t) { return t == SanTemplate::Stop ? "stop" : "noLeak"; }
std::string to_string(FlowSign s) { return s == FlowSign::Plus ? "+" : "-"; }

std::optional<BugRef> parse_bug_ref(const std::string& s) {
  if (s == "NPD") return BugRef::NPD;
  if (s == "MemLeak") return BugRef::MemLeak;
  if (s == "UAF") return BugRef::UAF;
  return std::nullopt;
}

std::optional<SanTemplate> parse_template(const std::string& s) {
  if (s == "stop") return SanTemplate::Stop;
  if (s == "noLeak") return SanTemplate::NoLeak;
  return std::nullopt;
}

FlowSign flow_sign_for(BugRef r) { return r == BugRef::MemLeak ? FlowSign::Minus : FlowSign::Plus; }

std::string Sanitization::str() const {
  std::string p;
  for (std::size_t i = 0; i < path.size(); ++i) p += (i ? " /\\ " : "") + path[i].str();
  if (p.empty()) p = "True";
  return to_string(tmpl) + to_string(sign) + "(" + p + ")";
}

std::string BugCond::str() const { return to_string(ref) + "(" + arg.str() + ")"; }

}  // namespace silc
