#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "silc/report.hpp"

namespace silc {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string conj_text(const Conj& c) {
  if (c.empty()) return "True";
  std::string out;
  for (const auto& l : c) out += (out.empty() ? "" : " /\\ ") + l.str();
  return out;
}

ojson entity_json(const Entity& e) {
  ojson j;
  j["entity"] = e.str();
  j["file"] = e.file;
  j["function"] = e.function;
  j["line"] = e.line;
  return j;
}

bool same_target(const SanitizerPlan& a, const SanitizerPlan& b) {
  return a.caller == b.caller && a.callee == b.callee && a.loc.file == b.loc.file && a.loc.line == b.loc.line &&
         a.loc.column == b.loc.column && a.tmpl == b.tmpl;
}

std::string read_file(const std::filesystem::path& p, bool& ok) {
  std::ifstream in(p, std::ios::binary);
  ok = static_cast<bool>(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<SourceFile> read_sources(const std::vector<std::string>& paths, std::vector<std::string>& errors) {
  std::vector<SourceFile> out;
  for (const auto& p : paths) {
    bool ok = false;
    std::string text = std::filesystem::is_regular_file(p) ? read_file(p, ok) : std::string();
    if (!ok) {
      errors.push_back(p + ": cannot read file");
      continue;
    }
    out.push_back({p, std::move(text)});
  }
  return out;
}

AnalysisRun analyze_sources(const std::vector<SourceFile>& files, const AnalysisConfig& cfg) {
  auto t0 = Clock::now();
  AnalysisRun run;
  std::vector<Program> units;
  for (const auto& f : files) {
    try {
      units.push_back(parse_unresolved(f.text, f.name));
    } catch (const std::exception& e) {
      run.diagnostics.push_back(e.what());
      run.input_error = true;
    }
  }
  try {
    run.program = link(std::move(units));
  } catch (const std::exception& e) {
    run.diagnostics.push_back(e.what());
    run.input_error = true;
    run.program = Program{};
  }

  auto ta = Clock::now();
  run.summaries = analyze_program(run.program, cfg);
  run.timings.analysis_ms = ms_since(ta);
  for (const auto& fn : run.program.functions) {
    auto it = run.summaries.find(fn.name);
    if (it == run.summaries.end()) continue;
    for (const auto& d : it->second.diagnostics) run.diagnostics.push_back(d);
  }

  auto tb = Clock::now();
  BugCatalog catalog = BugCatalog::from_config(cfg);
  for (auto& f : classify(run.summaries, run.program, catalog)) {
    FindingRecord r;
    r.path_condition = conj_text(f.triple.triple.post.path);
    r.finding = std::move(f);
    run.findings.push_back(std::move(r));
  }
  run.timings.blame_ms = ms_since(tb);
  run.timings.total_ms = ms_since(t0);
  return run;
}

void sanitize_run(AnalysisRun& run, const AnalysisConfig& cfg) {
  auto t0 = Clock::now();
  std::vector<SanitizerPlan> raw;
  std::vector<std::size_t> raw_owner;
  for (std::size_t i = 0; i < run.findings.size(); ++i) {
    auto& rec = run.findings[i];
    if (rec.finding.status != FindingStatus::Integration) continue;
    try {
      raw.push_back(extract_path_condition(rec.finding, run.summaries, run.program));
      raw_owner.push_back(i);
    } catch (const std::exception& e) {
      rec.unsanitizable = e.what();
    }
  }
  run.plans = merge_plans(raw);

  std::set<std::string> taken;
  for (const auto& f : run.program.functions) taken.insert(f.name);
  std::map<std::string, SourcePatcher> patchers;
  for (std::size_t k = 0; k < run.plans.size(); ++k) {
    const auto& plan = run.plans[k];
    std::vector<std::size_t> owners;
    for (std::size_t r = 0; r < raw.size(); ++r)
      if (same_target(raw[r], plan)) owners.push_back(raw_owner[r]);
    try {
      SanitizerSource src = generate_sanitizer(plan, run.program, cfg, fresh_wrapper_name(plan.callee, taken));
      auto text = run.program.sources.find(src.file);
      if (text == run.program.sources.end()) throw PatchConflict("no source text for " + src.file);
      auto it = patchers.try_emplace(src.file, src.file, text->second).first;
      it->second.apply(src);
      run.sources.push_back(std::move(src));
      for (auto o : owners) {
        run.findings[o].plan = run.sources.size() - 1;
        run.findings[o].path_condition = plan.condition_text;
        if (plan.direction == FlowSign::Minus && !plan.caller_condition.empty())
          run.findings[o].path_condition += " [caller: " + plan.caller_condition + "]";
      }
    } catch (const std::exception& e) {
      for (auto o : owners) run.findings[o].unsanitizable = e.what();
    }
  }
  for (const auto& [file, p] : patchers) {
    run.patched[file] = p.text();
    run.diffs[file] = p.diff();
  }
  run.timings.sanitizer_ms = ms_since(t0);
  run.timings.total_ms += run.timings.sanitizer_ms;
}

std::size_t residual_integration(const AnalysisRun& run, const AnalysisConfig& cfg) {
  std::set<std::pair<BugRef, std::string>> sanitized;
  for (const auto& r : run.findings)
    if (r.plan && r.finding.culprit) sanitized.insert({r.finding.ref, r.finding.culprit->callee});
  std::vector<SourceFile> files;
  for (const auto& [name, text] : run.program.sources) {
    auto it = run.patched.find(name);
    files.push_back({name, it != run.patched.end() ? it->second : text});
  }
  AnalysisRun again = analyze_sources(files, cfg);
  if (again.input_error) return run.findings.size() + 1;
  std::size_t n = 0;
  for (const auto& r : again.findings)
    if (r.finding.status == FindingStatus::Integration && r.finding.culprit &&
        sanitized.count({r.finding.ref, r.finding.culprit->callee}))
      ++n;
  return n;
}

ojson report_json(const AnalysisRun& run, const AnalysisConfig& cfg, bool include_timings) {
  ojson j;
  j["tool"] = "silc";
  j["seed"] = cfg.seed;
  j["config"] = config_to_json(cfg);
  j["files"] = ojson::array();
  for (const auto& [name, text] : run.program.sources) j["files"].push_back(name);

  std::size_t integration = 0, same = 0, missing = 0, sanitized = 0;
  j["findings"] = ojson::array();
  for (std::size_t i = 0; i < run.findings.size(); ++i) {
    const auto& r = run.findings[i];
    const auto& f = r.finding;
    ojson o;
    o["id"] = i + 1;
    o["bug_kind"] = to_string(f.ref);
    o["status"] = "manifest";
    o["integration"] = f.status == FindingStatus::Integration;
    o["classification"] = to_string(f.status);
    o["function"] = f.function;
    ojson loc;
    loc["file"] = f.manifest_loc.file;
    loc["function"] = f.leak ? f.function : (f.triple.fault ? f.triple.fault->function : f.function);
    loc["line"] = f.manifest_loc.line;
    o["location"] = loc;
    if (f.triple.fault) o["primitive"] = f.triple.fault->primitive;
    o["world"] = entity_json(f.manifest_world);
    o["blame"] = f.blamed ? entity_json(*f.blamed) : ojson(nullptr);
    if (f.culprit) {
      ojson c;
      c["caller"] = f.culprit->caller;
      c["callee"] = f.culprit->callee;
      c["file"] = f.culprit->loc.file;
      c["line"] = f.culprit->loc.line;
      o["culprit"] = c;
    } else {
      o["culprit"] = nullptr;
    }
    if (f.leak && !f.leak->parent_field.empty()) o["orphaned_field"] = f.leak->parent_field;
    o["path_condition"] = r.path_condition;
    if (r.plan) {
      const auto& s = run.sources[*r.plan];
      ojson san;
      san["name"] = s.name;
      san["diff"] = s.diff_pair();
      o["sanitizer"] = san;
    } else {
      o["sanitizer"] = nullptr;
    }
    o["sanitized"] = r.plan.has_value();
    o["unsanitizable"] = r.unsanitizable.empty() ? ojson(nullptr) : ojson(r.unsanitizable);
    o["diagnostics"] = ojson::array();
    if (!f.detail.empty()) o["diagnostics"].push_back(f.detail);
    j["findings"].push_back(o);

    integration += f.status == FindingStatus::Integration;
    same += f.status == FindingStatus::SameWorld;
    missing += f.status == FindingStatus::MissingBlame;
    sanitized += r.plan.has_value();
  }

  j["sanitizers"] = ojson::array();
  for (std::size_t k = 0; k < run.sources.size(); ++k) {
    const auto& s = run.sources[k];
    const SanitizerPlan* plan = nullptr;
    for (const auto& p : run.plans)
      if (p.callee == s.callee && p.caller == s.caller && p.loc.line == s.call_line && p.loc.file == s.file) plan = &p;
    ojson o;
    o["name"] = s.name;
    o["caller"] = s.caller;
    o["callee"] = s.callee;
    o["file"] = s.file;
    o["line"] = s.call_line;
    if (plan) {
      o["template"] = to_string(plan->tmpl);
      o["direction"] = to_string(plan->direction);
      o["pi0"] = conj_text(plan->pi0);
      o["condition"] = plan->condition_text;
      if (plan->direction == FlowSign::Minus) o["caller_condition"] = plan->caller_condition;
      o["rescues"] = ojson::array();
      for (const auto& r : plan->rescues) o["rescues"].push_back(r.str());
    }
    o["wrapper"] = s.wrapper_text;
    o["diff"] = s.diff_pair();
    j["sanitizers"].push_back(o);
  }
  j["patches"] = ojson::object();
  for (const auto& [file, d] : run.diffs) j["patches"][file] = d;

  j["diagnostics"] = run.diagnostics;
  ojson sum;
  sum["manifest"] = run.findings.size();
  sum["integration"] = integration;
  sum["same_world"] = same;
  sum["missing_blame"] = missing;
  sum["sanitized"] = sanitized;
  sum["input_error"] = run.input_error;
  j["summary"] = sum;
  if (include_timings) {
    ojson t;
    t["total"] = run.timings.total_ms;
    t["analysis"] = run.timings.analysis_ms;
    t["blame"] = run.timings.blame_ms;
    t["sanitizer"] = run.timings.sanitizer_ms;
    j["timings_ms"] = t;
  }
  return j;
}

std::string report_text(const AnalysisRun& run) {
  std::ostringstream os;
  for (const auto& d : run.diagnostics) os << "note: " << d << "\n";
  for (std::size_t i = 0; i < run.findings.size(); ++i) {
    const auto& r = run.findings[i];
    const auto& f = r.finding;
    os << "#" << i + 1 << " " << to_string(f.ref) << " [" << to_string(f.status) << "] in " << f.function << " at "
       << f.manifest_loc.file << ":" << f.manifest_loc.line << "\n";
    os << "  world:   " << f.manifest_world.describe() << "\n";
    os << "  blame:   " << (f.blamed ? f.blamed->describe() : "none") << "\n";
    if (f.culprit)
      os << "  culprit: call to " << f.culprit->callee << " in " << f.culprit->caller << " at " << f.culprit->loc.file
         << ":" << f.culprit->loc.line << "\n";
    os << "  path:    " << r.path_condition << "\n";
    if (r.plan) {
      const auto& s = run.sources[*r.plan];
      os << "  sanitizer " << s.name << "\n";
      std::istringstream d(s.diff_pair());
      for (std::string l; std::getline(d, l);) os << "    " << l << "\n";
    } else if (!r.unsanitizable.empty()) {
      os << "  unsanitizable: " << r.unsanitizable << "\n";
    }
  }
  if (run.findings.empty()) os << "no manifest bugs\n";
  os << "time: " << run.timings.total_ms << " ms\n";
  return os.str();
}

int exit_code_analyze(const AnalysisRun& run) {
  if (run.input_error) return 2;
  return run.findings.empty() ? 0 : 1;
}

int exit_code_sanitize(const AnalysisRun& run) {
  if (run.input_error) return 2;
  for (const auto& r : run.findings)
    if (!r.plan) return 1;
  return 0;
}

bool CorpusResult::ok() const {
  return std::all_of(scenarios.begin(), scenarios.end(), [](const ScenarioResult& s) { return s.passed; });
}

namespace {

bool matches(const ojson& want, const FindingRecord& r, const AnalysisRun& run) {
  const auto& f = r.finding;
  auto str = [&](const char* k) { return want.contains(k) ? want[k].get<std::string>() : std::string(); };
  if (want.contains("bug_kind") && str("bug_kind") != to_string(f.ref)) return false;
  if (want.contains("classification") && str("classification") != to_string(f.status)) return false;
  if (want.contains("function") && str("function") != f.function) return false;
  if (want.contains("blamed_entity") && (!f.blamed || str("blamed_entity") != f.blamed->str())) return false;
  if (want.contains("blamed_function") && (!f.blamed || str("blamed_function") != f.blamed->function)) return false;
  if (want.contains("world") && str("world") != f.manifest_world.str()) return false;
  if (want.contains("culprit_callee") && (!f.culprit || str("culprit_callee") != f.culprit->callee)) return false;
  if (want.contains("direction")) {
    std::string d = to_string(flow_sign_for(f.ref));
    if (r.plan)
      for (const auto& p : run.plans)
        if (p.callee == run.sources[*r.plan].callee && p.loc.line == run.sources[*r.plan].call_line)
          d = to_string(p.direction);
    if (str("direction") != d) return false;
  }
  if (want.contains("condition")) {
    if (!r.plan) return false;
    bool hit = false;
    for (const auto& p : run.plans)
      if (p.callee == run.sources[*r.plan].callee && p.loc.line == run.sources[*r.plan].call_line)
        hit = hit || p.condition_text == str("condition");
    if (!hit) return false;
  }
  return true;
}

ScenarioResult run_scenario(const std::filesystem::path& dir, const AnalysisConfig& base) {
  auto t0 = Clock::now();
  ScenarioResult res;
  res.name = dir.filename().string();
  ojson expected;
  bool ok = false;
  std::string text = read_file(dir / "expected.json", ok);
  if (!ok) {
    res.notes.push_back("missing expected.json");
    return res;
  }
  AnalysisConfig cfg = base;
  try {
    expected = ojson::parse(text);
    if (expected.contains("config")) {
      ojson merged = config_to_json(base);
      for (const auto& [k, v] : expected["config"].items()) merged[k] = v;
      cfg = config_from_json(merged);
      cfg.seed = base.seed;
      cfg.observer = base.observer;
    }
  } catch (const std::exception& e) {
    res.notes.push_back(std::string("bad expected.json: ") + e.what());
    return res;
  }

  std::vector<std::filesystem::path> mc;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".mc") mc.push_back(e.path());
  std::sort(mc.begin(), mc.end());
  std::vector<SourceFile> files;
  for (const auto& p : mc) files.push_back({p.filename().string(), read_file(p, ok)});

  AnalysisRun run = analyze_sources(files, cfg);
  sanitize_run(run, cfg);
  if (run.input_error)
    for (const auto& d : run.diagnostics) res.notes.push_back(d);

  const ojson want = expected.value("findings", ojson::array());
  res.expected = want.size();
  res.found = run.findings.size();
  std::vector<bool> used(run.findings.size(), false);
  std::size_t hits = 0;
  for (const auto& w : want) {
    bool hit = false;
    for (std::size_t i = 0; i < run.findings.size() && !hit; ++i) {
      if (used[i] || !matches(w, run.findings[i], run)) continue;
      used[i] = hit = true;
    }
    if (hit) {
      ++hits;
    } else {
      res.notes.push_back("expected finding not produced: " + w.dump());
    }
  }
  for (std::size_t i = 0; i < run.findings.size(); ++i) {
    if (used[i]) continue;
    const auto& f = run.findings[i].finding;
    res.notes.push_back("unexpected finding: " + to_string(f.ref) + " " + to_string(f.status) + " in " + f.function);
  }
  res.matched = !run.input_error && hits == res.expected && res.found == res.expected;

  for (const auto& r : run.findings) {
    if (r.finding.status != FindingStatus::Integration) continue;
    ++res.integration;
    if (r.plan) ++res.sanitized;
    if (!r.unsanitizable.empty()) {
      ++res.unsanitizable;
      res.notes.push_back("unsanitizable: " + r.unsanitizable);
    }
  }
  res.expect_sanitizable = expected.value("sanitizable", true);
  std::size_t residual = run.sources.empty() ? 0 : residual_integration(run, cfg);
  res.reanalysis_clean = residual == 0;
  if (!res.reanalysis_clean) res.notes.push_back(std::to_string(residual) + " integration findings survive patching");
  res.passed = res.matched && res.reanalysis_clean &&
               (res.expect_sanitizable ? res.sanitized == res.integration : res.unsanitizable > 0);
  res.timings = run.timings;
  res.timings.total_ms = ms_since(t0);
  return res;
}

}  // namespace

CorpusResult run_corpus(const std::filesystem::path& dir, const AnalysisConfig& cfg) {
  auto t0 = Clock::now();
  CorpusResult out;
  std::vector<std::filesystem::path> dirs;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_directory()) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  for (const auto& d : dirs) out.scenarios.push_back(run_scenario(d, cfg));
  out.total_ms = ms_since(t0);
  return out;
}

ojson corpus_json(const CorpusResult& r, bool include_timings) {
  ojson j;
  j["scenarios"] = ojson::array();
  for (const auto& s : r.scenarios) {
    ojson o;
    o["name"] = s.name;
    o["found"] = s.found;
    o["expected"] = s.expected;
    o["matched"] = s.matched;
    o["integration"] = s.integration;
    o["sanitized"] = s.sanitized;
    o["unsanitizable"] = s.unsanitizable;
    o["reanalysis_clean"] = s.reanalysis_clean;
    o["passed"] = s.passed;
    o["notes"] = s.notes;
    if (include_timings) o["time_ms"] = s.timings.total_ms;
    j["scenarios"].push_back(o);
  }
  j["ok"] = r.ok();
  if (include_timings) j["total_ms"] = r.total_ms;
  return j;
}

std::string corpus_text(const CorpusResult& r) {
  std::ostringstream os;
  os << std::left << std::setw(28) << "scenario" << std::right << std::setw(10) << "found/exp" << std::setw(7)
     << "integ" << std::setw(7) << "sanit" << std::setw(7) << "clean" << std::setw(8) << "result" << std::setw(8)
     << "ms" << "\n";
  for (const auto& s : r.scenarios) {
    os << std::left << std::setw(28) << s.name << std::right << std::setw(10)
       << (std::to_string(s.found) + "/" + std::to_string(s.expected)) << std::setw(7) << s.integration
       << std::setw(7) << s.sanitized << std::setw(7) << (s.reanalysis_clean ? "yes" : "no") << std::setw(8)
       << (s.passed ? "PASS" : "FAIL") << std::setw(8) << static_cast<long long>(s.timings.total_ms) << "\n";
    for (const auto& n : s.notes) os << "    " << n << "\n";
  }
  os << (r.ok() ? "all scenarios passed" : "corpus mismatches") << " in " << static_cast<long long>(r.total_ms)
     << " ms\n";
  return os.str();
}

}  // namespace silc
