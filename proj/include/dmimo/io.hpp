#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "dmimo/errors.hpp"
#include "dmimo/experiment.hpp"
#include "dmimo/scenario.hpp"

namespace dmimo {

inline constexpr std::string_view kToolVersion = "0.1.0";

namespace detail {

inline std::string normalize_minus(std::string_view text) {
  // Accept the typographic minus sign (U+2212) as '-'.
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.compare(i, 3, "\xE2\x88\x92") == 0) {
      out.push_back('-');
      i += 2;
    } else {
      out.push_back(text[i]);
    }
  }
  const auto first = out.find_first_not_of(" \t");
  const auto last = out.find_last_not_of(" \t");
  return first == std::string::npos ? std::string{} : out.substr(first, last - first + 1);
}

inline double parse_real(const std::string& key, std::string_view raw) {
  const std::string text = normalize_minus(raw);
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    throw ConfigError(key, "expected a finite number, got '" + std::string(raw) + "'");
  }
  return v;
}

inline int parse_int(const std::string& key, std::string_view raw) {
  const std::string text = normalize_minus(raw);
  long long v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || v < -1'000'000'000LL || v > 1'000'000'000LL) {
    throw ConfigError(key, "expected an integer, got '" + std::string(raw) + "'");
  }
  return static_cast<int>(v);
}

inline bool parse_bool(const std::string& key, std::string_view raw) {
  const std::string text = normalize_minus(raw);
  if (text == "true" || text == "on" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "off" || text == "no" || text == "0") return false;
  throw ConfigError(key, "expected on/off, got '" + std::string(raw) + "'");
}

template <typename Enum>
Enum parse_choice(const std::string& key, std::string_view raw,
                  std::initializer_list<std::pair<std::string_view, Enum>> choices) {
  const std::string text = normalize_minus(raw);
  std::string expected;
  for (const auto& [name, value] : choices) {
    if (text == name) return value;
    expected += expected.empty() ? std::string(name) : "|" + std::string(name);
  }
  throw ConfigError(key, "expected one of " + expected + ", got '" + std::string(raw) + "'");
}

using Setter = std::function<void(ScenarioConfig&, const std::string&, std::string_view)>;
using Getter = std::function<nlohmann::json(const ScenarioConfig&)>;

struct ConfigKey {
  Setter set;
  Getter get;
};

inline const std::map<std::string, ConfigKey>& config_keys() {
  static const std::map<std::string, ConfigKey> keys = [] {
    std::map<std::string, ConfigKey> k;
    auto real = [&k](const char* name, double ScenarioConfig::*field) {
      k[name] = {[field](ScenarioConfig& c, const std::string& key, std::string_view v) {
                   c.*field = parse_real(key, v);
                 },
                 [field](const ScenarioConfig& c) { return nlohmann::json(c.*field); }};
    };
    auto integer = [&k](const char* name, int ScenarioConfig::*field) {
      k[name] = {[field](ScenarioConfig& c, const std::string& key, std::string_view v) {
                   c.*field = parse_int(key, v);
                 },
                 [field](const ScenarioConfig& c) { return nlohmann::json(c.*field); }};
    };
    integer("nodes", &ScenarioConfig::nodes);
    real("radius", &ScenarioConfig::radius_m);
    real("node_height_min", &ScenarioConfig::node_height_min_m);
    real("node_height_max", &ScenarioConfig::node_height_max_m);
    real("bs_height", &ScenarioConfig::bs_height_m);
    real("ue_height", &ScenarioConfig::ue_height_m);
    real("d_bs_ue", &ScenarioConfig::d_bs_ue_m);
    real("p_bs", &ScenarioConfig::p_bs_dbm);
    real("p_node", &ScenarioConfig::p_node_dbm);
    integer("n_t_bs", &ScenarioConfig::n_t_bs);
    integer("n_t_node", &ScenarioConfig::n_t_node);
    integer("n_r_node", &ScenarioConfig::n_r_node);
    integer("n_r_ue", &ScenarioConfig::n_r_ue);
    real("b1", &ScenarioConfig::b1_hz);
    real("b2", &ScenarioConfig::b2_hz);
    real("fc", &ScenarioConfig::fc_ghz);
    real("nf", &ScenarioConfig::nf_db);
    real("sigma_sf", &ScenarioConfig::sigma_sf_db);
    real("t1", &ScenarioConfig::t1_s);
    k["shadow_fading"] = {[](ScenarioConfig& c, const std::string& key, std::string_view v) {
                            c.shadow_fading = parse_bool(key, v);
                          },
                          [](const ScenarioConfig& c) { return nlohmann::json(c.shadow_fading ? "on" : "off"); }};
    k["nlos_model"] = {[](ScenarioConfig& c, const std::string& key, std::string_view v) {
                         c.nlos_model = parse_choice<NlosModel>(
                             key, v, {{"max", NlosModel::max_rule}, {"simplified", NlosModel::simplified}});
                       },
                       [](const ScenarioConfig& c) { return nlohmann::json(to_string(c.nlos_model)); }};
    k["placement"] = {[](ScenarioConfig& c, const std::string& key, std::string_view v) {
                        c.placement = parse_choice<PlacementMode>(
                            key, v, {{"disc", PlacementMode::disc}, {"ring", PlacementMode::ring}});
                      },
                      [](const ScenarioConfig& c) { return nlohmann::json(to_string(c.placement)); }};
    k["phase1_policy"] = {[](ScenarioConfig& c, const std::string& key, std::string_view v) {
                            c.phase1_policy = parse_choice<Phase1Policy>(key, v,
                                                                         {{"min", Phase1Policy::min},
                                                                          {"median", Phase1Policy::median},
                                                                          {"max", Phase1Policy::max}});
                          },
                          [](const ScenarioConfig& c) { return nlohmann::json(to_string(c.phase1_policy)); }};
    k["normalization"] = {[](ScenarioConfig& c, const std::string& key, std::string_view v) {
                            c.normalization = parse_choice<ZfNormalization>(
                                key, v,
                                {{"paper-literal", ZfNormalization::paper_literal},
                                 {"power-exact", ZfNormalization::power_exact}});
                          },
                          [](const ScenarioConfig& c) { return nlohmann::json(to_string(c.normalization)); }};
    return k;
  }();
  return keys;
}

}  // namespace detail

/// Sets one config key from its textual value. Unknown keys are rejected.
inline void apply_config_value(ScenarioConfig& cfg, const std::string& key, std::string_view value) {
  const auto& keys = detail::config_keys();
  const auto it = keys.find(key);
  if (it == keys.end()) throw ConfigError(key, "unknown key");
  it->second.set(cfg, key, value);
}

/// Parses flat `key: value` YAML text on top of the defaults and validates.
inline ScenarioConfig parse_config_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("", std::string("malformed config: ") + e.what());
  }
  ScenarioConfig cfg;
  if (root.IsNull()) {
    cfg.validate();
    return cfg;
  }
  if (!root.IsMap()) throw ConfigError("", "config must be a flat mapping of key: value");
  for (const auto& entry : root) {
    const std::string key = entry.first.as<std::string>();
    if (!entry.second.IsScalar()) throw ConfigError(key, "value must be a scalar");
    apply_config_value(cfg, key, entry.second.Scalar());
  }
  cfg.validate();
  return cfg;
}

inline ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

inline nlohmann::json config_to_json(const ScenarioConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, entry] : detail::config_keys()) j[key] = entry.get(cfg);
  return j;
}

inline ScenarioConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("", "config echo must be a JSON object");
  ScenarioConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (value.is_string()) {
      apply_config_value(cfg, key, value.get<std::string>());
    } else if (value.is_number_float()) {
      char buf[64];
      auto res = std::to_chars(buf, buf + sizeof buf, value.get<double>());
      apply_config_value(cfg, key, std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
    } else {
      apply_config_value(cfg, key, value.dump());
    }
  }
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// CSV

/// Shortest decimal that round-trips to the same double; "nan" for NaN.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_number(std::string_view text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw DomainError("CSV: bad number '" + std::string(text) + "'");
  }
  return v;
}

inline std::vector<std::string> csv_header(SweepAxis axis) {
  std::vector<std::string> cols{std::string(to_string(axis)), "trials"};
  for (const auto name : kMetricNames) {
    for (const char* stat : {"mean", "se", "p05", "p50", "p95"}) cols.push_back(std::string(name) + "_" + stat);
  }
  for (const char* extra : {"rel_gain_phase2", "rel_gain_phase2_se", "rel_gain_combined",
                            "rel_gain_combined_se", "zf_resamples", "clamped_links"}) {
    cols.emplace_back(extra);
  }
  return cols;
}

inline void write_csv(const SweepTable& table, std::ostream& out) {
  const auto header = csv_header(table.axis);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& p : table.points) {
    out << format_number(p.axis_value) << ',' << p.trials;
    for (const auto& m : p.metrics) {
      for (double v : {m.mean, m.se, m.p05, m.p50, m.p95}) out << ',' << format_number(v);
    }
    out << ',' << format_number(p.rel_gain_phase2.value) << ',' << format_number(p.rel_gain_phase2.se) << ','
        << format_number(p.rel_gain_combined.value) << ',' << format_number(p.rel_gain_combined.se) << ','
        << p.zf_resamples << ',' << p.clamped_links << '\n';
  }
}

inline SweepTable read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("CSV: missing header");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.empty()) throw DomainError("CSV: empty header");
  SweepTable table{parse_axis(header.front()), {}};
  if (header != csv_header(table.axis)) throw DomainError("CSV: unexpected columns");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size()) throw DomainError("CSV: row has wrong column count");
    SweepPoint p;
    std::size_t c = 0;
    p.axis_value = parse_number(cells[c++]);
    p.trials = static_cast<std::size_t>(std::stoull(cells[c++]));
    for (auto& m : p.metrics) {
      for (double* field : {&m.mean, &m.se, &m.p05, &m.p50, &m.p95}) *field = parse_number(cells[c++]);
    }
    p.rel_gain_phase2.value = parse_number(cells[c++]);
    p.rel_gain_phase2.se = parse_number(cells[c++]);
    p.rel_gain_combined.value = parse_number(cells[c++]);
    p.rel_gain_combined.se = parse_number(cells[c++]);
    p.zf_resamples = std::stoll(cells[c++]);
    p.clamped_links = std::stoll(cells[c++]);
    table.points.push_back(p);
  }
  return table;
}

/// Writes `content` via a temporary sibling file so a failed run never
/// leaves a partial output behind.
inline void write_file_atomically(const std::filesystem::path& path,
                                  const std::function<void(std::ostream&)>& content) {
  const std::filesystem::path tmp = path.string() + ".partial";
  try {
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot write '" + path.string() + "'");
      content(out);
      out.flush();
      if (!out) throw Error("write to '" + path.string() + "' failed");
    }
    std::filesystem::rename(tmp, path);
  } catch (...) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw;
  }
}

inline void emit_csv(const SweepTable& table, const std::filesystem::path& path) {
  if (table.points.empty()) throw DomainError("emit_csv: table has no points");
  write_file_atomically(path, [&](std::ostream& out) { write_csv(table, out); });
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json trial_to_json(const TrialRecord& r) {
  using nlohmann::json;
  json j;
  j["master_seed"] = r.master_seed;
  j["trial_index"] = r.trial_index;
  json nodes = json::array();
  for (const auto& n : r.nodes) nodes.push_back({{"x", n.x_m}, {"y", n.y_m}, {"height", n.height_m}});
  j["nodes"] = nodes;
  if (r.phase1) {
    j["phase1"] = {{"policy", to_string(r.phase1->policy)},
                   {"node_rates", r.phase1->node_rates},
                   {"rate", r.phase1->rate},
                   {"c1", r.phase1->c1},
                   {"participating", r.phase1->participating}};
  } else {
    j["phase1"] = nullptr;
  }
  j["phase2"] = {{"normalization", to_string(r.phase2.precoders.normalization)},
                 {"c2_closed", r.phase2.c2_closed},
                 {"c2_logdet", r.phase2.c2_logdet},
                 {"rate", r.phase2.rate},
                 {"c2", r.phase2.c2},
                 {"baseline_rate", r.phase2.baseline_rate},
                 {"c_baseline", r.phase2.c_baseline},
                 {"per_entity_gain_terms", r.phase2.per_entity_gain_terms}};
  if (r.timing) {
    j["timing"] = {{"t1", r.timing->t1},
                   {"t2", r.timing->t2},
                   {"dmimo_bits", r.timing->dmimo_bits},
                   {"dmimo_duration", r.timing->dmimo_duration},
                   {"baseline_bits_corrected", r.timing->baseline_bits_corrected},
                   {"gain_ratio", r.timing->gain_ratio},
                   {"dmimo_throughput", r.timing->dmimo_throughput()}};
  } else {
    j["timing"] = nullptr;
  }
  j["diagnostics"] = {{"zf_resamples", r.diagnostics.zf_resamples},
                      {"clamped_links", r.diagnostics.clamped_links}};
  return j;
}

/// Everything needed to reproduce a sweep output.
struct RunManifest {
  ScenarioConfig config;
  std::uint64_t master_seed = 0;
  SweepAxis axis = SweepAxis::radius;
  std::vector<double> values;
  std::size_t trials = 0;
  std::string tool_version{kToolVersion};
  std::string timestamp;
  std::vector<std::string> outputs;
};

inline nlohmann::json manifest_to_json(const RunManifest& m) {
  return {{"config", config_to_json(m.config)},
          {"master_seed", m.master_seed},
          {"axis", to_string(m.axis)},
          {"values", m.values},
          {"trials", m.trials},
          {"tool_version", m.tool_version},
          {"timestamp", m.timestamp},
          {"outputs", m.outputs}};
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
  try {
    RunManifest m;
    m.config = config_from_json(j.at("config"));
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    m.axis = parse_axis(j.at("axis").get<std::string>());
    m.values = j.at("values").get<std::vector<double>>();
    m.trials = j.at("trials").get<std::size_t>();
    m.tool_version = j.value("tool_version", std::string{});
    m.timestamp = j.value("timestamp", std::string{});
    m.outputs = j.value("outputs", std::vector<std::string>{});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest", e.what());
  }
}

}  // namespace dmimo
