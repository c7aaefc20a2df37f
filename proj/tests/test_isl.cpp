#include <doctest.h>

#include <random>

#include "silc/isl.hpp"
#include "silc/pure_solver.hpp"

using namespace silc;

namespace {

const Term X = Term::var("X"), Y = Term::var("Y"), L = Term::var("L"), V = Term::var("V");

Sanitization stop_plus() { return {SanTemplate::Stop, {}, FlowSign::Plus}; }

}  // namespace

TEST_CASE("substitute renames through heap and pure parts") {
  SymbolicState s;
  s.heap = {Atom::var_pt("x", X)};
  s.pure = {Literal::eq(X, Term::nil())};
  Subst m;
  m.terms["X"] = L;
  SymbolicState r = substitute(s, m);
  CHECK(r.heap == std::vector<Atom>{Atom::var_pt("x", L)});
  CHECK(r.pure == Conj{Literal::eq(L, Term::nil())});
}

TEST_CASE("substitute refuses to capture an existential") {
  SymbolicState s;
  s.heap = {Atom::var_pt("x", L)};
  s.existentials = {"L"};
  Subst m;
  m.terms["L"] = Y;
  CHECK_THROWS_AS(substitute(s, m), CaptureError);
  Subst onto;
  onto.terms["Z"] = L;
  SymbolicState t = s;
  t.heap.push_back(Atom::var_pt("z", Term::var("Z")));
  CHECK_THROWS_AS(substitute(t, onto), CaptureError);
}

TEST_CASE("substitute reaches every constructor") {
  Entity vendor = Entity::vendor("v.mc", "f", 3);
  SymbolicState s;
  s.heap = {Atom::var_pt("x", X),
            Atom::loc_pt(X, V),
            Atom::field_pt(Y, "f", X),
            Atom::invalid(Term::var("Z")),
            Atom::blame(X, vendor, BugRef::NPD, stop_plus(), "c"),
            Atom::blame(Y, Entity::unknown("W"), BugRef::UAF, stop_plus(), "c"),
            Atom::world(Entity::client("c.mc", "g", 1), BugRef::NPD, stop_plus(), "g")};
  s.pure = {Literal::ne(X, Y)};
  s.path = {Literal::eq(V, Term::constant(1))};
  Subst m;
  m.terms = {{"X", L}, {"Y", Term::var("M")}, {"V", Term::var("N")}, {"Z", Term::var("K")}};
  m.entities = {{"W", Entity::client("c.mc", "g", 9)}};
  SymbolicState r = substitute(s, m);
  std::set<std::string> vs = vars_of(r);
  for (const char* gone : {"X", "Y", "V", "Z", "W"}) CHECK_FALSE(vs.count(gone));
  bool blame_l = false, blame_m = false;
  for (const auto& a : r.heap)
    if (a.kind == Atom::Kind::Blame) {
      if (a.loc == L) {
        blame_l = true;
        CHECK(a.entity == vendor);
        CHECK(a.bug_cond().arg == L);
      }
      if (a.loc == Term::var("M")) {
        blame_m = true;
        CHECK(a.entity.kind == EntityKind::Client);
      }
    }
  CHECK(blame_l);
  CHECK(blame_m);
  CHECK(r.path == Conj{Literal::eq(Term::var("N"), Term::constant(1))});
}

TEST_CASE("normalize: unit law and separation") {
  SymbolicState s;
  s.heap = {Atom::var_pt("x", X)};
  CHECK(normalize(s).heap == s.heap);
  SymbolicState bad;
  bad.heap = {Atom::var_pt("x", X), Atom::var_pt("x", Y)};
  CHECK_THROWS_AS(normalize(bad), SeparationViolation);
  SymbolicState mixed;
  mixed.heap = {Atom::loc_pt(X, V), Atom::invalid(X)};
  CHECK_THROWS_AS(normalize(mixed), SeparationViolation);
  SymbolicState fields;
  fields.heap = {Atom::field_pt(X, "a", V), Atom::field_pt(X, "b", V), Atom::invalid(X)};
  CHECK_NOTHROW(normalize(fields));
  SymbolicState blames;
  blames.heap = {Atom::blame(X, Entity::unknown("W"), BugRef::NPD, stop_plus(), ""),
                 Atom::blame(X, Entity::unknown("U"), BugRef::NPD, stop_plus(), "")};
  CHECK_THROWS_AS(normalize(blames), SeparationViolation);
}

TEST_CASE("normalize: literals are oriented, deduplicated and trivial ones dropped") {
  SymbolicState s;
  s.pure = {Literal::eq(Term::nil(), X), Literal::eq(X, Term::nil()), Literal::eq(Y, Y)};
  SymbolicState n = normalize(s);
  CHECK(n.pure.size() == 1);
  CHECK(normalize(n) == n);
}

TEST_CASE("to_literals flattens and rejects negated conjunctions") {
  PureTerm p = PureTerm::conj({PureTerm::eq(X, Term::nil()), PureTerm::conj({PureTerm::ne(Y, X), PureTerm::truth()}),
                               PureTerm::negate(PureTerm::negate(PureTerm::eq(V, Y)))});
  Conj c = to_literals(p);
  CHECK(c.size() == 3);
  CHECK_THROWS_AS(to_literals(PureTerm::negate(PureTerm::conj({PureTerm::eq(X, Y), PureTerm::eq(X, V)}))),
                  UnsupportedAtom);
  CHECK(is_falsum(to_literals(PureTerm::boolean(false))));
}

namespace {

Term random_term(std::mt19937& rng) {
  switch (rng() % 5) {
    case 0: return Term::nil();
    case 1: return Term::constant(static_cast<long long>(rng() % 2));
    default: return Term::var(std::string(1, static_cast<char>('A' + rng() % 4)));
  }
}

SymbolicState random_state(std::mt19937& rng) {
  SymbolicState s;
  std::vector<std::string> heads{"A", "B", "C", "D"};
  std::shuffle(heads.begin(), heads.end(), rng);
  std::size_t cells = rng() % 4;
  for (std::size_t i = 0; i < cells; ++i) {
    Term h = Term::var(heads[i]);
    switch (rng() % 4) {
      case 0: s.heap.push_back(Atom::loc_pt(h, random_term(rng))); break;
      case 1: s.heap.push_back(Atom::invalid(h)); break;
      case 2: s.heap.push_back(Atom::field_pt(h, "f", random_term(rng))); break;
      default:
        s.heap.push_back(Atom::blame(h, Entity::unknown("W" + heads[i]), BugRef::NPD, stop_plus(), "c"));
    }
  }
  const char* pvars[] = {"x", "y", "z"};
  for (const char* x : pvars)
    if (rng() % 2) s.heap.push_back(Atom::var_pt(x, Term::var(heads[rng() % 4])));
  std::shuffle(s.heap.begin(), s.heap.end(), rng);
  std::size_t lits = rng() % 4;
  for (std::size_t i = 0; i < lits; ++i) s.pure.push_back({rng() % 2 == 0, random_term(rng), random_term(rng)});
  return s;
}

}  // namespace

TEST_CASE("normalize is idempotent on random states") {
  std::mt19937 rng(11);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    SymbolicState s = random_state(rng);
    SymbolicState n;
    try {
      n = normalize(s);
    } catch (const SeparationViolation&) {
      continue;
    }
    ++checked;
    CHECK(normalize(n) == n);
    CHECK(std::is_sorted(n.heap.begin(), n.heap.end(), atom_less));
  }
  CHECK(checked > 1000);
}

TEST_CASE("substitute by a renaming is invertible on random states") {
  std::mt19937 rng(5);
  for (int i = 0; i < 500; ++i) {
    SymbolicState s;
    try {
      s = normalize(random_state(rng));
    } catch (const SeparationViolation&) {
      continue;
    }
    Subst fwd, back;
    for (const char* v : {"A", "B", "C", "D"}) {
      fwd.terms[v] = Term::var(std::string("R") + v);
      back.terms[std::string("R") + v] = Term::var(v);
      fwd.entities[std::string("W") + v] = Entity::unknown(std::string("RW") + v);
      back.entities[std::string("RW") + v] = Entity::unknown(std::string("W") + v);
    }
    CHECK(substitute(substitute(s, fwd), back) == s);
  }
}

TEST_CASE("fresh_var: numbering, distinctness and replay") {
  FreshNames a;
  CHECK(a.fresh_var("L").name == "L1");
  CHECK(a.fresh_var("L").name == "L2");
  FreshNames b(42), c(42);
  std::vector<std::string> xs, ys;
  for (int i = 0; i < 20; ++i) {
    xs.push_back(b.fresh_name(i % 2 ? "L" : "V"));
    ys.push_back(c.fresh_name(i % 2 ? "L" : "V"));
  }
  CHECK(xs == ys);
  CHECK(std::set<std::string>(xs.begin(), xs.end()).size() == xs.size());
}

TEST_CASE("text rendering of atoms and triples") {
  CHECK(Atom::var_pt("x", X).str() == "x|->X");
  CHECK(Atom::field_pt(X, "f", V).str() == "X.f|->V");
  CHECK(Atom::invalid(X).str() == "X!");
  SymbolicState s;
  s.heap = {Atom::var_pt("x", X), Atom::loc_pt(X, V)};
  s.pure = {Literal::ne(X, Term::nil())};
  std::string text = normalize(s).str();
  CHECK(text.find(" * ") != std::string::npos);
  CHECK(text.find("/\\") != std::string::npos);
  CHECK(text.find("!=") != std::string::npos);
  Triple t;
  t.pre = s;
  t.code = "f";
  t.exit = ExitKind::Err;
  t.world = Entity::vendor("v.mc", "f", 2);
  t.post = s;
  CHECK(t.str().find("Vendor:err") != std::string::npos);
}
