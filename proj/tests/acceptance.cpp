// Acceptance criteria 1-8. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "blame_laws.hpp"
#include "grid.hpp"
#include "oracles.hpp"
#include "silc/report.hpp"
#include "support.hpp"

using namespace silc;

namespace {

constexpr double kSetBudgetMs = 1000;
constexpr double kExampleBudgetMs = 5000;
constexpr double kCorpusBudgetMs = 60000;
constexpr std::size_t kPureSamples = 10000;
constexpr int kPureVars = 4;
constexpr int kPureLits = 6;
constexpr std::size_t kMinScenarios = 10;
constexpr const char* kSeed = "1234";

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Verdict {
  bool ok = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [" << what << "]";
    }
  }
};

SymbolicState plain(const SymbolicState& s) {
  SymbolicState out = s;
  std::erase_if(out.heap, [](const Atom& a) { return a.kind == Atom::Kind::Blame || a.kind == Atom::Kind::World; });
  return normalize(out);
}

std::string shape(ExitKind exit, const SymbolicState& pre, const SymbolicState& post) {
  auto [p, q] = support::canonical(plain(pre), plain(post), {"X", "V"});
  return std::string(exit == ExitKind::Ok ? "ok" : "err") + " " + p.str() + " => " + q.str();
}

std::vector<SourceFile> patched_sources(const AnalysisRun& run) {
  std::vector<SourceFile> out;
  for (const auto& [name, text] : run.program.sources) {
    auto it = run.patched.find(name);
    out.push_back({name, it != run.patched.end() ? it->second : text});
  }
  return out;
}

Verdict golden_summary() {
  Verdict v;
  const Term X = Term::var("X"), V = Term::var("V"), W = Term::var("W");
  auto state = [](std::vector<Atom> heap, Conj pure = {}) {
    SymbolicState s;
    s.heap = std::move(heap);
    s.pure = std::move(pure);
    return normalize(s);
  };
  std::vector<Atom> frame{Atom::var_pt("x", X), Atom::var_pt("v", V)};
  auto with = [&](Atom a) {
    auto h = frame;
    h.push_back(a);
    return h;
  };
  std::multiset<std::string> want{
      shape(ExitKind::Ok, state(with(Atom::loc_pt(X, W))), state(with(Atom::loc_pt(X, V)))),
      shape(ExitKind::Err, state(frame, {Literal::eq(X, Term::nil())}), state(frame, {Literal::eq(X, Term::nil())})),
      shape(ExitKind::Err, state(with(Atom::invalid(X))), state(with(Atom::invalid(X)))),
  };

  auto t0 = Clock::now();
  Program p = parse("void set(ptr x, int v) {\n  [x] = v;\n}\n", "set.mc");
  auto env = analyze_program(p, AnalysisConfig{});
  double ms = ms_since(t0);
  const Summary& s = env.at("set");
  std::multiset<std::string> got;
  for (const auto& t : s.triples) got.insert(shape(t.triple.exit, t.triple.pre, t.triple.post));
  v.require(s.triples.size() == 3, "triples=" + std::to_string(s.triples.size()));
  v.require(got == want, "shapes differ");
  for (const auto& t : s.triples)
    if (t.triple.exit == ExitKind::Err) v.require(t.latent, "err triple not latent");
  v.require(ms < kSetBudgetMs, "runtime");
  v.detail << " " << s.triples.size() << " triples in " << ms << " ms";
  if (got != want)
    for (const auto& g : got) v.detail << "\n    got " << g;
  return v;
}

Verdict leak_example() {
  Verdict v;
  AnalysisConfig cfg;
  auto t0 = Clock::now();
  AnalysisRun run = analyze_sources(support::scenario_sources("leak_free_node"), cfg);
  sanitize_run(run, cfg);
  AnalysisRun again = analyze_sources(patched_sources(run), cfg);
  double ms = ms_since(t0);

  std::size_t leaks = 0;
  for (const auto& r : run.findings) {
    const auto& f = r.finding;
    if (f.ref != BugRef::MemLeak) continue;
    ++leaks;
    v.require(f.status == FindingStatus::Integration, "not integration");
    v.require(f.blamed && f.blamed->kind == EntityKind::Vendor && f.blamed->function == "client_free_node",
              "blame not on the vendor free routine");
    v.require(r.plan.has_value(), "no sanitizer");
    if (!r.plan) continue;
    const SanitizerSource& src = run.sources[*r.plan];
    const std::string& w = src.wrapper_text;
    auto save = w.find("= c->cpi_query;"), call = w.find("client_free_node(c);"), release = w.find("free(san_tmp");
    v.require(save != std::string::npos && call != std::string::npos && release != std::string::npos &&
                  save < call && call < release,
              "wrapper does not save and free the orphaned field");
  }
  v.require(leaks == 1 && run.findings.size() == 1, "findings=" + std::to_string(run.findings.size()));
  std::size_t residual = 0;
  for (const auto& r : again.findings)
    if (r.finding.ref == BugRef::MemLeak) ++residual;
  v.require(!again.input_error && residual == 0, "patched file still leaks");
  v.require(ms < kExampleBudgetMs, "runtime");
  v.detail << " blamed vendor free, " << residual << " leaks after patching, " << ms << " ms";
  return v;
}

Verdict npd_example() {
  Verdict v;
  AnalysisConfig cfg;
  cfg.unroll_bound = 2;
  auto t0 = Clock::now();
  AnalysisRun run = analyze_sources(support::scenario_sources("npd_swf_loop"), cfg);
  sanitize_run(run, cfg);
  AnalysisRun again = analyze_sources(patched_sources(run), cfg);
  double ms = ms_since(t0);

  v.require(run.findings.size() == 1, "findings=" + std::to_string(run.findings.size()));
  std::string guard;
  for (const auto& r : run.findings) {
    const auto& f = r.finding;
    v.require(f.ref == BugRef::NPD && f.status == FindingStatus::Integration, "not an NPD integration finding");
    v.require(f.manifest_world.kind == EntityKind::Vendor && f.triple.fault && f.triple.fault->primitive == "memcpy",
              "not manifest in the vendor builtin");
    v.require(f.blamed && f.blamed->kind == EntityKind::Client && f.blamed->function == "show_frame",
              "not blamed on the client write");
    v.require(r.plan.has_value(), "no sanitizer");
    if (!r.plan) continue;
    for (const auto& p : run.plans)
      if (p.callee == run.sources[*r.plan].callee) {
        v.require(p.direction == FlowSign::Plus, "not a Plus sanitizer");
        guard = p.condition_text;
      }
  }
  v.require(guard == "data == NULL", "guard '" + guard + "'");
  std::size_t residual = 0;
  for (const auto& r : again.findings)
    if (r.finding.status == FindingStatus::Integration) ++residual;
  v.require(!again.input_error && residual == 0, "re-analysis not clean");
  v.require(ms < kExampleBudgetMs, "runtime");
  v.detail << " guard '" << guard << "', " << ms << " ms";
  return v;
}

Verdict biabduction_grid() {
  Verdict v;
  auto t0 = Clock::now();
  grid::Stats st = grid::run(1);
  v.require(st.unsound == 0, "unsound=" + std::to_string(st.unsound));
  v.require(st.entails_rejected == 0, "entails rejected=" + std::to_string(st.entails_rejected));
  v.require(st.incomplete == 0, "incomplete=" + std::to_string(st.incomplete));
  v.require(st.solved > 0, "nothing solved");
  v.detail << " " << st.pairs << " pairs, " << st.solved << " solved, " << st.unsound + st.entails_rejected + st.incomplete
           << " violations, " << ms_since(t0) << " ms";
  for (const auto& e : st.examples) v.detail << "\n    " << e;
  return v;
}

Verdict pure_solver() {
  Verdict v;
  std::mt19937 rng(20240);
  std::size_t disagree = 0, sat = 0;
  for (std::size_t i = 0; i < kPureSamples; ++i) {
    Conj c = oracle::random_conj(rng, kPureVars, kPureLits);
    bool want = oracle::brute_force_sat(c);
    sat += want;
    if (is_satisfiable(c) != want) {
      if (disagree == 0) {
        SymbolicState shown;
        shown.pure = c;
        v.detail << " first: " << shown.str();
      }
      ++disagree;
    }
  }
  v.require(disagree == 0, "disagreements=" + std::to_string(disagree));
  v.require(sat > 0 && sat < kPureSamples, "degenerate sample");
  v.detail << " " << kPureSamples << " conjunctions (" << sat << " sat), " << disagree << " disagreements";
  return v;
}

Verdict blame_laws() {
  Verdict v;
  laws::Audit audit;
  AnalysisConfig cfg;
  cfg.observer = [&](const StepRecord& r) { laws::record(audit, r); };
  for (const auto& sc : support::scenarios()) {
    AnalysisRun run = analyze_sources(support::scenario_sources(sc), cfg);
    sanitize_run(run, cfg);
    analyze_sources(patched_sources(run), cfg);
  }
  v.require(audit.violations() == 0, "violations=" + std::to_string(audit.violations()));
  v.require(audit.err_steps > 0 && audit.shift_steps > 0 && audit.vendor_steps > 0, "laws not exercised");
  v.detail << " " << audit.steps << " steps, " << audit.err_steps << " err, " << audit.shift_steps << " shifts, "
           << audit.vendor_steps << " vendor; preservation=" << audit.preservation << " shift=" << audit.shift
           << " sticky=" << audit.sticky << " world=" << audit.world;
  for (const auto& e : audit.examples) v.detail << "\n    " << e;
  return v;
}

Verdict corpus() {
  Verdict v;
  CorpusResult r = run_corpus(support::corpus_dir, AnalysisConfig{});
  std::size_t integration = 0, sanitized = 0, clean = 0, with_integration = 0;
  for (const auto& s : r.scenarios) {
    integration += s.integration;
    sanitized += s.sanitized;
    if (s.integration > 0) {
      ++with_integration;
      clean += s.reanalysis_clean;
    }
    v.require(s.passed, s.name + " failed");
  }
  std::set<BugRef> kinds;
  std::set<FlowSign> signs;
  for (const auto& sc : support::scenarios()) {
    AnalysisConfig cfg;
    AnalysisRun run = analyze_sources(support::scenario_sources(sc), cfg);
    sanitize_run(run, cfg);
    for (const auto& p : run.plans) signs.insert(p.direction);
    for (const auto& f : run.findings)
      if (f.finding.status == FindingStatus::Integration) kinds.insert(f.finding.ref);
  }
  v.require(with_integration >= kMinScenarios, "integration scenarios=" + std::to_string(with_integration));
  v.require(sanitized == integration, "sanitized " + std::to_string(sanitized) + "/" + std::to_string(integration));
  v.require(clean == with_integration, "re-analysis not clean");
  v.require(kinds == std::set<BugRef>{BugRef::NPD, BugRef::MemLeak, BugRef::UAF}, "bug kinds not covered");
  v.require(signs == std::set<FlowSign>{FlowSign::Plus, FlowSign::Minus}, "flow directions not covered");
  v.require(r.total_ms < kCorpusBudgetMs, "runtime");
  v.detail << " " << r.scenarios.size() << " scenarios (" << with_integration << " with integration bugs), "
           << sanitized << "/" << integration << " sanitized, " << r.total_ms << " ms";
  return v;
}

Verdict determinism() {
  Verdict v;
  ::setenv("SILC_SEED", kSeed, 1);
  auto once = [] {
    AnalysisConfig cfg;
    cfg.seed = seed_from_env().value_or(0);
    std::string out;
    for (const auto& sc : support::scenarios()) {
      AnalysisRun run = analyze_sources(support::scenario_sources(sc), cfg);
      sanitize_run(run, cfg);
      out += report_json(run, cfg, false).dump(2);
      for (const auto& [f, d] : run.diffs) out += d;
    }
    return out + corpus_json(run_corpus(support::corpus_dir, cfg), false).dump(2);
  };
  std::string a = once(), b = once();
  ::unsetenv("SILC_SEED");
  v.require(!a.empty() && a == b, "reports differ");
  v.detail << " " << a.size() << " bytes identical across two runs";
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> run;
  };
  std::vector<Criterion> all{
      {"1 golden summary of set", golden_summary},
      {"2 leak example", leak_example},
      {"3 NPD example", npd_example},
      {"4 biabduction vs model enumerator", biabduction_grid},
      {"5 pure solver vs brute force", pure_solver},
      {"6 blame laws", blame_laws},
      {"7 corpus sanitization", corpus},
      {"8 determinism", determinism},
  };
  int failed = 0;
  for (const auto& c : all) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.ok = false;
      v.detail << " exception: " << e.what();
    }
    std::cout << (v.ok ? "PASS" : "FAIL") << "  " << c.name << ":" << v.detail.str() << "\n" << std::flush;
    failed += !v.ok;
  }
  return failed == 0 ? 0 : 1;
}
