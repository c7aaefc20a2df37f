#include <doctest.h>

#include "silc/sanitizer.hpp"
#include "support.hpp"

using namespace silc;

namespace {

const Term X = Term::var("X"), Y = Term::var("Y"), V = Term::var("V");

SymbolicState st(std::vector<Atom> heap) {
  SymbolicState s;
  s.heap = std::move(heap);
  return normalize(s);
}

AnalysisRun sanitized(const std::string& scenario) {
  AnalysisConfig cfg;
  AnalysisRun run = analyze_sources(support::scenario_sources(scenario), cfg);
  sanitize_run(run, cfg);
  return run;
}

}  // namespace

TEST_CASE("collapse follows points-to chains to dereference expressions") {
  SymbolicState s = st({Atom::var_pt("x", X), Atom::loc_pt(X, Y), Atom::loc_pt(Y, V)});
  CHECK(render(collapse_to_program_condition(Conj{Literal::ne(Y, Term::nil())}, s)) == "*x != NULL");
  CHECK(render(collapse_to_program_condition(Conj{Literal::ne(V, Term::nil())}, s)) == "**x != NULL");
}

TEST_CASE("collapse of a direct binding") {
  SymbolicState s = st({Atom::var_pt("x", X)});
  CHECK(render(collapse_to_program_condition(Conj{Literal::eq(X, Term::nil())}, s)) == "x == NULL");
  CHECK(render(collapse_to_program_condition(PureTerm::eq(X, Term::nil()), s)) == "x == NULL");
  CHECK(render(collapse_to_program_condition(Conj{}, s)).empty() == false);
}

TEST_CASE("collapse through fields and aliases") {
  SymbolicState s = st({Atom::var_pt("s", X), Atom::field_pt(X, "buf", Y), Atom::var_pt("t", V)});
  s.pure = {Literal::eq(V, X)};
  auto c = collapse_to_program_condition(Conj{Literal::eq(Y, Term::nil())}, s);
  REQUIRE(c.size() == 1);
  CHECK(c[0].str() == "s->buf == NULL");
}

TEST_CASE("collapse of an unreachable variable is unscoped") {
  SymbolicState s = st({Atom::var_pt("x", X), Atom::loc_pt(Y, V)});
  CHECK_THROWS_AS(collapse_to_program_condition(Conj{Literal::eq(V, Term::nil())}, s), UnscopedCondition);
  CHECK_THROWS_AS(collapse_to_program_condition(Conj{Literal::eq(Term::var("Z"), Term::nil())}, s), UnscopedCondition);
}

TEST_CASE("access path rendering") {
  CHECK(AccessPath{"x", {}}.str() == "x");
  CHECK(AccessPath{"x", {""}}.str() == "*x");
  CHECK(AccessPath{"x", {"f"}}.str() == "x->f");
  CHECK(AccessPath{"x", {"", "f"}}.str() == "(*x)->f");
  CHECK(AccessPath{"x", {"f", ""}}.parent() == AccessPath{"x", {"f"}});
}

TEST_CASE("NPD plan: plus direction, nil guard, stop wrapper with else branch") {
  AnalysisRun run = sanitized("npd_swf_loop");
  REQUIRE(run.plans.size() == 1);
  const SanitizerPlan& p = run.plans[0];
  CHECK(p.direction == FlowSign::Plus);
  CHECK(p.tmpl == SanTemplate::Stop);
  CHECK(p.callee == "add_iso_sample");
  CHECK(p.caller == "show_frame");
  CHECK(p.condition_text == "data == NULL");
  REQUIRE(run.sources.size() == 1);
  const SanitizerSource& s = run.sources[0];
  CHECK(s.name == "sanitise_add_iso_sample_1");
  CHECK(s.wrapper_text.find("if (data == NULL) {\n    return 0;\n  } else {") != std::string::npos);
  CHECK(s.wrapper_text.find("san_ret = add_iso_sample(user, data, length);") != std::string::npos);
  CHECK(s.original_line == "  add_iso_sample(u, d, n);");
  CHECK(s.replacement_line == "  sanitise_add_iso_sample_1(u, d, n);");
  CHECK(s.diff_pair() == "---   add_iso_sample(u, d, n);\n+++   sanitise_add_iso_sample_1(u, d, n);\n");
}

TEST_CASE("leak plan: minus direction saves and frees the orphaned field") {
  AnalysisRun run = sanitized("leak_free_node");
  REQUIRE(run.plans.size() == 1);
  const SanitizerPlan& p = run.plans[0];
  CHECK(p.direction == FlowSign::Minus);
  CHECK(p.tmpl == SanTemplate::NoLeak);
  REQUIRE(p.rescues.size() == 1);
  CHECK(p.rescues[0].str() == "c->cpi_query");
  CHECK(p.caller_condition.find("blocked == 1") != std::string::npos);
  const std::string& w = run.sources.at(0).wrapper_text;
  auto save = w.find("san_tmp1 = c->cpi_query;");
  auto call = w.find("client_free_node(c);");
  auto release = w.find("free(san_tmp1);");
  REQUIRE(save != std::string::npos);
  REQUIRE(call != std::string::npos);
  REQUIRE(release != std::string::npos);
  CHECK(save < call);
  CHECK(call < release);
  CHECK(run.sources[0].replacement_line == "    sanitise_client_free_node_1(c);");
}

TEST_CASE("stop plan on a void callee returns bare") {
  Program prog = parse("void sink(ptr p){ [p] = 1; }\nint use(ptr q){\n  sink(q);\n  return 0;\n}\n", "v.mc");
  SanitizerPlan plan;
  plan.caller = "use";
  plan.callee = "sink";
  plan.loc = prog.find_function("use")->body[0].loc;
  plan.tmpl = SanTemplate::Stop;
  plan.guards = {{ProgramLiteral{true, {AccessPath{"p", {}}, {}}, {std::nullopt, Expr::null()}}}};
  SanitizerSource src = generate_sanitizer(plan, prog, AnalysisConfig{}, "sanitise_sink_1");
  CHECK(src.wrapper_text.find("return;") != std::string::npos);
  CHECK(src.wrapper_text.find("san_ret") == std::string::npos);
  PatchResult r = rewrite_call_site(prog, src);
  CHECK_NOTHROW(parse(r.text, "v.mc"));
  CHECK(r.diff.find("-  sink(q);\n+  sanitise_sink_1(q);") != std::string::npos);
}

TEST_CASE("configured error values are used by stop wrappers") {
  Program prog = parse("int get(ptr p){ v = [p]; return v; }\nint use(ptr q){\n  r = get(q);\n  return r;\n}\n", "g.mc");
  SanitizerPlan plan;
  plan.caller = "use";
  plan.callee = "get";
  plan.loc = prog.find_function("use")->body[0].loc;
  plan.guards = {{ProgramLiteral{true, {AccessPath{"p", {}}, {}}, {std::nullopt, Expr::null()}}}};
  AnalysisConfig cfg;
  cfg.error_returns["int"] = "-22";
  SanitizerSource src = generate_sanitizer(plan, prog, cfg, "sanitise_get_1");
  CHECK(src.wrapper_text.find("return -22;") != std::string::npos);
  CHECK_NOTHROW(parse(rewrite_call_site(prog, src).text, "g.mc"));
}

TEST_CASE("nested guards load through checked bases only") {
  AnalysisRun run = sanitized("npd_deref_slot");
  REQUIRE(run.sources.size() == 1);
  const std::string& w = run.sources[0].wrapper_text;
  auto test_base = w.find("if (slot != NULL)");
  auto load = w.find("= [slot];");
  REQUIRE(test_base != std::string::npos);
  REQUIRE(load != std::string::npos);
  CHECK(test_base < load);
}

TEST_CASE("a second application of the same sanitizer conflicts") {
  AnalysisRun run = sanitized("npd_swf_loop");
  const SanitizerSource& src = run.sources.at(0);
  SourcePatcher patcher(src.file, run.program.sources.at(src.file));
  patcher.apply(src);
  CHECK_THROWS_AS(patcher.apply(src), PatchConflict);
  SanitizerSource moved = src;
  moved.call_line = src.call_line + 1;
  SourcePatcher other(src.file, run.program.sources.at(src.file));
  CHECK_THROWS_AS(other.apply(moved), PatchConflict);
}

TEST_CASE("wrapper names are fresh per program") {
  std::set<std::string> taken{"sanitise_f_1"};
  CHECK(fresh_wrapper_name("f", taken) == "sanitise_f_2");
  CHECK(fresh_wrapper_name("f", taken) == "sanitise_f_3");
  CHECK(fresh_wrapper_name("g", taken) == "sanitise_g_1");
}

TEST_CASE("unified diff format") {
  CHECK(unified_diff("a/x", "b/x", "a\nb\nc\n", "a\nb\nc\n").empty());
  std::string d = unified_diff("a/x", "b/x", "1\n2\n3\n4\n5\n6\n7\n8\n", "1\n2\n3\n4\nfour\n6\n7\n8\n");
  CHECK(d == "--- a/x\n+++ b/x\n@@ -2,7 +2,7 @@\n 2\n 3\n 4\n-5\n+four\n 6\n 7\n 8\n");
  std::string ins = unified_diff("a/x", "b/x", "1\n2\n", "0\n1\n2\n");
  CHECK(ins == "--- a/x\n+++ b/x\n@@ -1,2 +1,3 @@\n+0\n 1\n 2\n");
}

TEST_CASE("every patched corpus file reparses and re-analyzes clean") {
  AnalysisConfig cfg;
  for (const auto& sc : support::scenarios()) {
    CAPTURE(sc);
    AnalysisRun run = analyze_sources(support::scenario_sources(sc), cfg);
    sanitize_run(run, cfg);
    std::vector<Program> units;
    for (const auto& f : support::scenario_sources(sc)) {
      auto it = run.patched.find(f.name);
      units.push_back(parse_unresolved(it != run.patched.end() ? it->second : f.text, f.name));
    }
    CHECK_NOTHROW(link(units));
    for (const auto& s : run.sources) CHECK_NOTHROW(parse_unresolved(pretty_print(s.wrapper), "w.mc"));
    CHECK(residual_integration(run, cfg) == 0);
  }
}

TEST_CASE("merged plans guard each call site once") {
  AnalysisRun run = sanitized("leak_session_fields");
  REQUIRE(run.sources.size() == 1);
  REQUIRE(run.plans.size() == 1);
  std::set<std::string> rescues;
  for (const auto& r : run.plans[0].rescues) rescues.insert(r.str());
  CHECK(rescues == std::set<std::string>{"s->rx", "s->tx"});
}
