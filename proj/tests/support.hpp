#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "silc/report.hpp"

namespace support {

inline const std::filesystem::path corpus_dir{SILC_CORPUS_DIR};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::filesystem::path> scenario_files(const std::string& scenario) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(corpus_dir / scenario))
    if (e.path().extension() == ".mc") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<silc::SourceFile> scenario_sources(const std::string& scenario) {
  std::vector<silc::SourceFile> out;
  for (const auto& p : scenario_files(scenario)) out.push_back({p.filename().string(), slurp(p)});
  return out;
}

inline std::vector<std::string> scenarios() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(corpus_dir))
    if (e.is_directory()) out.push_back(e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

/// Renames logical variables outside keep to canonical names in order of
/// first appearance, iterating until the rendering is stable.
inline std::pair<silc::SymbolicState, silc::SymbolicState> canonical(silc::SymbolicState pre, silc::SymbolicState post,
                                                                    const std::set<std::string>& keep) {
  for (int round = 0; round < 4; ++round) {
    std::string text = pre.str() + " " + post.str();
    std::vector<std::pair<std::size_t, std::string>> pos;
    std::set<std::string> all = silc::vars_of(pre);
    for (const auto& v : silc::vars_of(post)) all.insert(v);
    for (const auto& v : all) {
      if (keep.count(v)) continue;
      std::size_t at = std::string::npos;
      for (std::size_t i = text.find(v); i != std::string::npos; i = text.find(v, i + 1)) {
        bool left = i == 0 || !std::isalnum(static_cast<unsigned char>(text[i - 1]));
        bool right = i + v.size() >= text.size() || !std::isalnum(static_cast<unsigned char>(text[i + v.size()]));
        if (left && right) {
          at = i;
          break;
        }
      }
      pos.emplace_back(at, v);
    }
    std::sort(pos.begin(), pos.end());
    silc::Subst s;
    for (std::size_t i = 0; i < pos.size(); ++i) {
      std::string to = "_" + std::to_string(i);
      s.terms[pos[i].second] = silc::Term::var(to);
      s.entities[pos[i].second] = silc::Entity::unknown(to);
    }
    auto npre = silc::substitute(pre, s), npost = silc::substitute(post, s);
    if (npre == pre && npost == post) break;
    pre = npre;
    post = npost;
  }
  return {pre, post};
}

}  // namespace support
