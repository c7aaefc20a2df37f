#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "silc/report.hpp"

namespace fs = std::filesystem;
using namespace silc;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "Write the report here instead of stdout");
  cmd->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"json", "text"}));
}

AnalysisConfig make_config(const Common& c) {
  AnalysisConfig cfg = c.config.empty() ? AnalysisConfig{} : load_config(c.config);
  if (auto s = seed_from_env()) cfg.seed = *s;
  return cfg;
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + c.out);
  f << text;
}

std::string render(const AnalysisRun& run, const AnalysisConfig& cfg, const Common& c) {
  return c.format == "json" ? report_json(run, cfg).dump(2) + "\n" : report_text(run);
}

AnalysisRun load_and_analyze(const std::vector<std::string>& paths, const AnalysisConfig& cfg) {
  std::vector<std::string> errors;
  auto files = read_sources(paths, errors);
  AnalysisRun run = analyze_sources(files, cfg);
  if (!errors.empty()) {
    run.input_error = true;
    run.diagnostics.insert(run.diagnostics.begin(), errors.begin(), errors.end());
  }
  return run;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"silc: blame-carrying incorrectness analysis and sanitizer synthesis for MiniC"};
  app.require_subcommand(1);

  Common ac;
  std::vector<std::string> analyze_files;
  auto* analyze = app.add_subcommand("analyze", "Report manifest bugs with blame");
  analyze->add_option("files", analyze_files, "MiniC sources")->required();
  add_common(analyze, ac);

  Common sc;
  std::vector<std::string> sanitize_files;
  std::string out_dir;
  auto* sanitize = app.add_subcommand("sanitize", "Synthesize sanitizers and write patched sources");
  sanitize->add_option("files", sanitize_files, "MiniC sources")->required();
  sanitize->add_option("--out-dir", out_dir, "Directory for patched sources and diffs")->required();
  add_common(sanitize, sc);

  Common cc;
  std::string corpus_dir;
  auto* corpus = app.add_subcommand("corpus", "Run every scenario of a corpus directory");
  corpus->add_option("dir", corpus_dir, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  add_common(corpus, cc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*analyze) {
      AnalysisConfig cfg = make_config(ac);
      AnalysisRun run = load_and_analyze(analyze_files, cfg);
      emit(ac, render(run, cfg, ac));
      return exit_code_analyze(run);
    }
    if (*sanitize) {
      AnalysisConfig cfg = make_config(sc);
      AnalysisRun run = load_and_analyze(sanitize_files, cfg);
      if (!run.input_error) sanitize_run(run, cfg);
      fs::create_directories(out_dir);
      for (const auto& [file, text] : run.patched) {
        fs::path name = fs::path(file).filename();
        std::ofstream(fs::path(out_dir) / name, std::ios::binary) << text;
        std::ofstream(fs::path(out_dir) / (name.string() + ".diff"), std::ios::binary) << run.diffs.at(file);
      }
      std::string report = render(run, cfg, sc);
      std::ofstream(fs::path(out_dir) / (sc.format == "json" ? "report.json" : "report.txt"), std::ios::binary)
          << report;
      emit(sc, report);
      return exit_code_sanitize(run);
    }
    if (*corpus) {
      AnalysisConfig cfg = make_config(cc);
      CorpusResult r = run_corpus(corpus_dir, cfg);
      emit(cc, cc.format == "json" ? corpus_json(r).dump(2) + "\n" : corpus_text(r));
      return r.ok() ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "silc: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "silc: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
