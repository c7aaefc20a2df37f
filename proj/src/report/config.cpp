#include <cstdlib>
#include <fstream>

#include "silc/report.hpp"

namespace silc {

AnalysisConfig config_from_json(const ojson& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  AnalysisConfig cfg;
  for (const auto& [key, v] : j.items()) {
    if (key == "bugs") {
      if (!v.is_array()) throw ConfigError("bugs: expected an array of bug kinds");
      cfg.bugs.clear();
      for (const auto& b : v) {
        auto r = b.is_string() ? parse_bug_ref(b.get<std::string>()) : std::nullopt;
        if (!r) throw ConfigError("bugs: unknown bug kind " + b.dump());
        cfg.bugs.insert(*r);
      }
    } else if (key == "protocols") {
      if (!v.is_object()) throw ConfigError("protocols: expected an object");
      for (const auto& [kind, t] : v.items()) {
        auto r = parse_bug_ref(kind);
        auto tmpl = t.is_string() ? parse_template(t.get<std::string>()) : std::nullopt;
        if (!r) throw ConfigError("protocols: unknown bug kind " + kind);
        if (!tmpl) throw ConfigError("protocols: unknown template " + t.dump());
        cfg.protocols[*r] = *tmpl;
      }
    } else if (key == "error_returns") {
      if (!v.is_object()) throw ConfigError("error_returns: expected an object");
      for (const auto& [type, text] : v.items()) {
        if (type != "int" && type != "ptr") throw ConfigError("error_returns: unknown type " + type);
        if (!text.is_string()) throw ConfigError("error_returns: expected constant text for " + type);
        cfg.error_returns[type] = text.get<std::string>();
      }
    } else if (key == "unroll_bound") {
      if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError("unroll_bound: expected a count");
      cfg.unroll_bound = v.get<int>();
    } else if (key == "max_disjuncts") {
      if (!v.is_number_integer() || v.get<long long>() < 1) throw ConfigError("max_disjuncts: expected a positive count");
      cfg.max_disjuncts = v.get<std::size_t>();
    } else {
      throw ConfigError("unknown config key " + key);
    }
  }
  return cfg;
}

AnalysisConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  try {
    return config_from_json(ojson::parse(in));
  } catch (const ojson::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ojson config_to_json(const AnalysisConfig& cfg) {
  ojson j;
  j["bugs"] = ojson::array();
  for (BugRef r : cfg.bugs) j["bugs"].push_back(to_string(r));
  j["protocols"] = ojson::object();
  for (const auto& [r, t] : cfg.protocols) j["protocols"][to_string(r)] = to_string(t);
  j["error_returns"] = ojson::object();
  for (const auto& [k, v] : cfg.error_returns) j["error_returns"][k] = v;
  j["unroll_bound"] = cfg.unroll_bound;
  j["max_disjuncts"] = cfg.max_disjuncts;
  return j;
}

std::optional<std::uint64_t> seed_from_env() {
  const char* s = std::getenv("SILC_SEED");
  if (!s || !*s) return std::nullopt;
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(s, &used);
    if (used != std::string(s).size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace silc
