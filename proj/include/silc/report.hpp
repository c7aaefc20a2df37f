#pragma once

// Configuration, end-to-end drivers and JSON reports.

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "silc/sanitizer.hpp"

namespace silc {

using ojson = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

AnalysisConfig config_from_json(const ojson& j);
AnalysisConfig load_config(const std::filesystem::path& path);
ojson config_to_json(const AnalysisConfig& cfg);

/// SILC_SEED, if set and numeric.
std::optional<std::uint64_t> seed_from_env();

struct SourceFile {
  std::string name;
  std::string text;
};

struct Timings {
  double total_ms = 0;
  double analysis_ms = 0;
  double blame_ms = 0;
  double sanitizer_ms = 0;
};

struct FindingRecord {
  IntegrationFinding finding;
  std::string path_condition;
  std::optional<std::size_t> plan;  // index into AnalysisRun::sources
  std::string unsanitizable;
};

struct AnalysisRun {
  Program program;
  std::map<std::string, Summary> summaries;
  std::vector<FindingRecord> findings;
  std::vector<std::string> diagnostics;
  std::vector<SanitizerPlan> plans;
  std::vector<SanitizerSource> sources;
  std::map<std::string, std::string> patched;  // file -> patched text
  std::map<std::string, std::string> diffs;    // file -> unified diff
  bool input_error = false;
  Timings timings;
};

/// Parses and links the files, analyzes, classifies. Unparsable files are
/// reported and skipped.
AnalysisRun analyze_sources(const std::vector<SourceFile>& files, const AnalysisConfig& cfg);

/// Plans, generates and applies sanitizers for every Integration finding.
void sanitize_run(AnalysisRun& run, const AnalysisConfig& cfg);

/// Integration findings of the run that are still present after
/// re-analysing the patched text.
std::size_t residual_integration(const AnalysisRun& run, const AnalysisConfig& cfg);

ojson report_json(const AnalysisRun& run, const AnalysisConfig& cfg, bool include_timings = true);
std::string report_text(const AnalysisRun& run);

/// Reads files; a missing file is an input error.
std::vector<SourceFile> read_sources(const std::vector<std::string>& paths, std::vector<std::string>& errors);

int exit_code_analyze(const AnalysisRun& run);
int exit_code_sanitize(const AnalysisRun& run);

struct ScenarioResult {
  std::string name;
  std::size_t found = 0;
  std::size_t expected = 0;
  bool matched = false;
  std::size_t integration = 0;
  std::size_t sanitized = 0;
  std::size_t unsanitizable = 0;
  bool expect_sanitizable = true;
  bool reanalysis_clean = true;
  bool passed = false;
  std::vector<std::string> notes;
  Timings timings;
};

struct CorpusResult {
  std::vector<ScenarioResult> scenarios;
  double total_ms = 0;
  bool ok() const;
};

/// Each subdirectory holding .mc files and an expected.json is a scenario.
CorpusResult run_corpus(const std::filesystem::path& dir, const AnalysisConfig& cfg);
ojson corpus_json(const CorpusResult& r, bool include_timings = true);
std::string corpus_text(const CorpusResult& r);

}  // namespace silc
