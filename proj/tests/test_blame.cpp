#include <doctest.h>

#include "silc/blame.hpp"
#include "support.hpp"

using namespace silc;

namespace {

std::vector<IntegrationFinding> classify_source(const std::string& src, AnalysisConfig cfg = {}) {
  Program p = parse(src, "t.mc");
  auto env = analyze_program(p, cfg);
  return classify(env, p, BugCatalog::from_config(cfg));
}

std::vector<IntegrationFinding> classify_scenario(const std::string& name) {
  auto run = analyze_sources(support::scenario_sources(name), AnalysisConfig{});
  std::vector<IntegrationFinding> out;
  for (const auto& r : run.findings) out.push_back(r.finding);
  return out;
}

}  // namespace

TEST_CASE("init_worlds: one World per enabled kind, entity from the tag") {
  Program p = parse("void c(){}\n// @vendor\nvoid v(){}", "t.mc");
  AnalysisConfig all;
  SymbolicState s = init_worlds(*p.find_function("c"), BugCatalog::from_config(all));
  REQUIRE(s.heap.size() == 3);
  for (const auto& a : s.heap) {
    CHECK(a.kind == Atom::Kind::World);
    CHECK(a.entity.kind == EntityKind::Client);
    CHECK(a.entity.has_meta());
    CHECK(a.ctx == "c");
  }
  AnalysisConfig npd;
  npd.bugs = {BugRef::NPD};
  SymbolicState v = init_worlds(*p.find_function("v"), BugCatalog::from_config(npd));
  REQUIRE(v.heap.size() == 1);
  CHECK(v.heap[0].entity.kind == EntityKind::Vendor);
  CHECK(v.heap[0].ref == BugRef::NPD);
  AnalysisConfig none;
  none.bugs = {};
  CHECK(init_worlds(*p.find_function("c"), BugCatalog::from_config(none)).heap.empty());
}

TEST_CASE("catalog: default definitions mention their parameter and carry the fixed flow signs") {
  BugCatalog c = BugCatalog::from_config(AnalysisConfig{});
  for (BugRef r : {BugRef::NPD, BugRef::MemLeak, BugRef::UAF}) {
    const BugDef& d = c.defs.at(r);
    CHECK(vars_of(d.body).count(d.param) + vars_of(d.body.pure).count(d.param) > 0);
    CHECK(c.policy.at(r).sign == flow_sign_for(r));
  }
  CHECK(flow_sign_for(BugRef::NPD) == FlowSign::Plus);
  CHECK(flow_sign_for(BugRef::UAF) == FlowSign::Plus);
  CHECK(flow_sign_for(BugRef::MemLeak) == FlowSign::Minus);
  CHECK(c.policy.at(BugRef::MemLeak).tmpl == SanTemplate::NoLeak);
}

TEST_CASE("bug_holds instantiates the definitions") {
  BugCatalog c = BugCatalog::from_config(AnalysisConfig{});
  Term X = Term::var("L");
  SymbolicState nil;
  nil.pure = {Literal::eq(X, Term::nil())};
  CHECK(bug_holds(c, BugRef::NPD, X, nil));
  CHECK_FALSE(bug_holds(c, BugRef::NPD, X, SymbolicState{}));
  SymbolicState freed;
  freed.heap = {Atom::invalid(X)};
  CHECK(bug_holds(c, BugRef::UAF, X, freed));
  CHECK_FALSE(bug_holds(c, BugRef::UAF, X, nil));
}

TEST_CASE("classify: leak blamed on the vendor free routine is an integration bug") {
  auto fs = classify_scenario("leak_free_node");
  REQUIRE(fs.size() == 1);
  const auto& f = fs[0];
  CHECK(f.ref == BugRef::MemLeak);
  CHECK(f.status == FindingStatus::Integration);
  CHECK(f.manifest_world.kind == EntityKind::Client);
  REQUIRE(f.blamed);
  CHECK(f.blamed->kind == EntityKind::Vendor);
  CHECK(f.blamed->function == "client_free_node");
  REQUIRE(f.culprit);
  CHECK(f.culprit->callee == "client_free_node");
}

TEST_CASE("classify: nil written by the client faults inside the vendor copy") {
  auto fs = classify_scenario("npd_swf_loop");
  REQUIRE(fs.size() == 1);
  const auto& f = fs[0];
  CHECK(f.ref == BugRef::NPD);
  CHECK(f.status == FindingStatus::Integration);
  CHECK(f.manifest_world.kind == EntityKind::Vendor);
  CHECK(f.manifest_world.function == "add_iso_sample");
  REQUIRE(f.blamed);
  CHECK(f.blamed->kind == EntityKind::Client);
  CHECK(f.blamed->function == "show_frame");
  REQUIRE(f.triple.fault);
  CHECK(f.triple.fault->primitive == "memcpy");
  REQUIRE(f.blame);
  CHECK(f.blame->san.sign == FlowSign::Plus);
}

TEST_CASE("classify: a client freeing its own cell twice is same-world") {
  auto fs = classify_source("void twice(){ x = malloc(); if (x != NULL) { free(x); free(x); } }");
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].ref == BugRef::UAF);
  CHECK(fs[0].status == FindingStatus::SameWorld);
  CHECK(fs[0].blamed->kind == EntityKind::Client);
}

TEST_CASE("classify: latent bugs are never reported") {
  auto fs = classify_source("void set(ptr x, int v){ [x] = v; }");
  CHECK(fs.empty());
}

TEST_CASE("classify: a fault on a resource nobody touched has no blame") {
  auto fs = classify_source("void g(){ x = NULL; y = [x]; }");
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].ref == BugRef::NPD);
  CHECK(fs[0].status != FindingStatus::Integration);
}

TEST_CASE("every integration finding names a culprit call and a located blamed entity") {
  for (const auto& sc : support::scenarios()) {
    CAPTURE(sc);
    for (const auto& f : classify_scenario(sc)) {
      if (f.status != FindingStatus::Integration) continue;
      REQUIRE(f.culprit);
      CHECK_FALSE(f.culprit->callee.empty());
      CHECK(f.culprit->loc.line > 0);
      REQUIRE(f.blamed);
      CHECK(f.blamed->known());
      CHECK(f.blamed->has_meta());
      CHECK(f.blamed->kind != f.manifest_world.kind);
    }
  }
}

TEST_CASE("classify is a pure function of its inputs") {
  auto files = support::scenario_sources("leak_session_fields");
  std::vector<Program> units;
  for (const auto& f : files) units.push_back(parse_unresolved(f.text, f.name));
  Program p = link(units);
  AnalysisConfig cfg;
  auto env = analyze_program(p, cfg);
  auto cat = BugCatalog::from_config(cfg);
  auto a = classify(env, p, cat), b = classify(env, p, cat);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].ref == b[i].ref);
    CHECK(a[i].status == b[i].status);
    CHECK(a[i].manifest_loc.line == b[i].manifest_loc.line);
    CHECK(a[i].triple.triple.str() == b[i].triple.triple.str());
  }
}
