#include <fstream>
#include <set>
#include <sstream>

#include "sprec/error.hpp"
#include "sprec/harness.hpp"

namespace sprec {

namespace {

using nlohmann::json;

struct Location {
  std::size_t line = 1, column = 1;
};

Location locate(const std::string& text, std::size_t offset) {
  Location loc;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++loc.line;
      loc.column = 1;
    } else {
      ++loc.column;
    }
  }
  return loc;
}

// Position of the first occurrence of "key" used as an object key.
Location locate_key(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  return locate(text, pos == std::string::npos ? 0 : pos);
}

[[noreturn]] void fail_at(Location loc, const std::string& msg) {
  throw ValidationError("config: line " + std::to_string(loc.line) +
                        ", column " + std::to_string(loc.column) + ": " + msg);
}

const std::set<std::string> kKeys = {"n",          "k_values", "m_values",
                                     "scenarios",  "estimators", "trials",
                                     "seed",       "ml_guard", "output",
                                     "sign_rule"};
const std::set<std::string> kRequired = {"n",         "k_values",   "m_values",
                                         "scenarios", "estimators", "trials"};

template <typename T>
T get_as(const json& j, const std::string& key, const std::string& text) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail_at(locate_key(text, key), "key '" + key + "' has the wrong type");
  }
}

std::uint64_t get_count(const json& j, const std::string& key,
                        const std::string& text) {
  const json& v = j.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 0 &&
                                 !v.is_number_unsigned()))
    fail_at(locate_key(text, key), "key '" + key +
                                       "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

std::vector<Index> get_index_list(const json& j, const std::string& key,
                                  const std::string& text) {
  const json& v = j.at(key);
  if (!v.is_array())
    fail_at(locate_key(text, key), "key '" + key + "' must be an array of integers");
  std::vector<Index> out;
  for (const auto& e : v) {
    if (!e.is_number_integer())
      fail_at(locate_key(text, key), "key '" + key + "' must contain integers only");
    out.push_back(e.get<Index>());
  }
  return out;
}

}  // namespace

SweepConfig parse_sweep_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    if (auto p = msg.find(": "); p != std::string::npos) msg = msg.substr(p + 2);
    fail_at(locate(text, e.byte > 0 ? e.byte - 1 : 0), "malformed JSON: " + msg);
  }
  if (!j.is_object()) fail_at({}, "top level must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!kKeys.count(key)) fail_at(locate_key(text, key), "unknown key '" + key + "'");
  for (const auto& key : kRequired)
    if (!j.contains(key)) fail_at({}, "missing required key '" + key + "'");

  SweepConfig c;
  c.n = Index(get_count(j, "n", text));
  c.k_values = get_index_list(j, "k_values", text);
  c.m_values = get_index_list(j, "m_values", text);
  c.trials = get_count(j, "trials", text);

  const json& sc = j.at("scenarios");
  if (!sc.is_array()) fail_at(locate_key(text, "scenarios"), "'scenarios' must be an array");
  for (const auto& s : sc) {
    try {
      if (s.is_array() && s.size() == 2) {
        c.scenarios.push_back({s[0].get<double>(), s[1].get<double>()});
      } else if (s.is_object() && s.size() == 2 && s.contains("snr") &&
                 s.contains("mar")) {
        c.scenarios.push_back({s.at("snr").get<double>(), s.at("mar").get<double>()});
      } else {
        throw std::invalid_argument("shape");
      }
    } catch (const std::exception&) {
      fail_at(locate_key(text, "scenarios"),
              "each scenario must be {\"snr\": x, \"mar\": y} or [snr, mar]");
    }
  }

  const json& est = j.at("estimators");
  if (!est.is_array()) fail_at(locate_key(text, "estimators"), "'estimators' must be an array");
  for (const auto& e : est) {
    if (!e.is_string())
      fail_at(locate_key(text, "estimators"), "estimators must be \"ML\" or \"MC\"");
    try {
      c.estimators.push_back(parse_estimator(e.get<std::string>()));
    } catch (const ValidationError& err) {
      fail_at(locate_key(text, "estimators"), err.what());
    }
  }

  if (j.contains("seed")) c.seed = get_count(j, "seed", text);
  if (j.contains("ml_guard")) c.ml_guard = get_count(j, "ml_guard", text);
  if (j.contains("output")) c.output = get_as<std::string>(j, "output", text);
  if (j.contains("sign_rule")) {
    const auto rule = get_as<std::string>(j, "sign_rule", text);
    if (rule == "random") c.sign_rule = SignRule::random;
    else if (rule == "all_positive") c.sign_rule = SignRule::all_positive;
    else fail_at(locate_key(text, "sign_rule"),
                 "sign_rule must be \"random\" or \"all_positive\"");
  }
  return c;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_sweep_config(ss.str());
}

nlohmann::json to_json(const SweepConfig& c) {
  json scenarios = json::array();
  for (const auto& s : c.scenarios) scenarios.push_back({{"snr", s.snr}, {"mar", s.mar}});
  json estimators = json::array();
  for (auto e : c.estimators) estimators.push_back(std::string(to_string(e)));
  json j = {{"n", c.n},
            {"k_values", c.k_values},
            {"m_values", c.m_values},
            {"scenarios", scenarios},
            {"estimators", estimators},
            {"trials", c.trials},
            {"seed", c.seed},
            {"ml_guard", c.ml_guard},
            {"sign_rule", c.sign_rule == SignRule::random ? "random" : "all_positive"}};
  if (!c.output.empty()) j["output"] = c.output;
  return j;
}

}  // namespace sprec
