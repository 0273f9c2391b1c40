#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "decotrans/ensemble.hpp"

namespace decotrans {

/// Config parse failure with 1-based line/column diagnostics.
struct ConfigError : std::runtime_error {
  int line = 0;
  int column = 0;
  ConfigError(int l, int c, const std::string& msg)
      : std::runtime_error("config error at line " + std::to_string(l) + ", column " +
                           std::to_string(c) + ": " + msg),
        line(l),
        column(c) {}
};

/// Declarative experiment description: sweeps the Cartesian product of the
/// sigma, model-parameter and N lists through the ensemble engine.
struct ExperimentConfig {
  std::string name = "experiment";

  std::vector<int> n_list{100};
  int m = 1;

  std::vector<double> sigma_list{1.0};
  DisorderShape shape = DisorderShape::gaussian;

  ModelKind model = ModelKind::bernoulli;
  std::vector<double> param_list{0.5};  // p / ell_phi / gamma, by model kind
  int j_max = 1;
  ProbeMode placement = ProbeMode::bond_replacing;

  long samples = 1000;
  std::uint64_t seed = 1;
  Averaging averaging = Averaging::resistance;
  DisorderPath disorder_path = DisorderPath::analytic;
  DecoherencePath decoherence_path = DecoherencePath::sampled;
  double energy = 0.0;
  double probe_eta = -1.0;
  double probe_nu = 0.0;

  std::string out_dir = "out";
  bool write_csv = true;
  bool write_json = true;
  bool write_svg = false;

  /// Name of the model parameter column in outputs.
  const char* param_name() const {
    switch (model) {
      case ModelKind::homogeneous:
        return "ell_phi";
      case ModelKind::power_law:
        return "gamma";
      default:
        return "p";
    }
  }
};

namespace detail {

struct RawEntry {
  std::string value;
  int line = 0;
  int column = 0;
};

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(s);
  while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
  return out;
}

inline double parse_double(const RawEntry& e) {
  try {
    std::size_t pos = 0;
    double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(e.line, e.column, "expected a number, got '" + e.value + "'");
  }
}

inline long parse_long(const RawEntry& e) {
  try {
    std::size_t pos = 0;
    long v = std::stol(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(e.line, e.column, "expected an integer, got '" + e.value + "'");
  }
}

}  // namespace detail

/// Parses the plain-text `[section]` / `key = value` experiment format.
/// Lists are comma-separated. '#' starts a comment.
inline ExperimentConfig parse_config(const std::string& text) {
  using detail::RawEntry;
  std::map<std::string, RawEntry> entries;
  std::string section;
  std::istringstream stream(text);
  std::string line;
  int lineno = 0;
  while (std::getline(stream, line)) {
    ++lineno;
    std::string body = line.substr(0, line.find('#'));
    std::string t = detail::trim(body);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError(lineno, static_cast<int>(line.find('[')) + 1, "unterminated section header");
      section = detail::trim(t.substr(1, t.size() - 2));
      continue;
    }
    std::size_t eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(lineno, 1, "expected 'key = value'");
    std::string key = detail::trim(body.substr(0, eq));
    std::string value = detail::trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError(lineno, 1, "empty key");
    int col = static_cast<int>(body.find_first_not_of(" \t")) + 1;
    entries[section + "." + key] = RawEntry{value, lineno, col};
  }

  ExperimentConfig cfg;
  auto take = [&entries](const std::string& key) -> const RawEntry* {
    auto it = entries.find(key);
    if (it == entries.end()) return nullptr;
    return &it->second;
  };
  auto enum_error = [](const RawEntry& e, const std::string& what) -> ConfigError {
    return ConfigError(e.line, e.column, "unknown " + what + " '" + e.value + "'");
  };

  if (auto* e = take("experiment.name")) cfg.name = e->value;
  if (auto* e = take("lattice.N")) {
    cfg.n_list.clear();
    for (const auto& item : detail::split_list(e->value))
      cfg.n_list.push_back(static_cast<int>(detail::parse_long(RawEntry{item, e->line, e->column})));
    if (cfg.n_list.empty()) throw ConfigError(e->line, e->column, "empty N list");
  }
  if (auto* e = take("lattice.M")) cfg.m = static_cast<int>(detail::parse_long(*e));
  if (auto* e = take("disorder.sigma")) {
    cfg.sigma_list.clear();
    for (const auto& item : detail::split_list(e->value))
      cfg.sigma_list.push_back(detail::parse_double(RawEntry{item, e->line, e->column}));
    if (cfg.sigma_list.empty()) throw ConfigError(e->line, e->column, "empty sigma list");
  }
  if (auto* e = take("disorder.shape")) {
    if (e->value == "gaussian")
      cfg.shape = DisorderShape::gaussian;
    else if (e->value == "uniform")
      cfg.shape = DisorderShape::uniform;
    else
      throw enum_error(*e, "disorder shape");
  }
  if (auto* e = take("decoherence.model")) {
    if (e->value == "bernoulli")
      cfg.model = ModelKind::bernoulli;
    else if (e->value == "homogeneous")
      cfg.model = ModelKind::homogeneous;
    else if (e->value == "cutoff")
      cfg.model = ModelKind::cutoff;
    else if (e->value == "power_law")
      cfg.model = ModelKind::power_law;
    else
      throw enum_error(*e, "decoherence model");
  }
  {
    const char* keys[] = {"decoherence.p", "decoherence.ell_phi", "decoherence.gamma"};
    for (const char* key : keys) {
      if (auto* e = take(key)) {
        cfg.param_list.clear();
        for (const auto& item : detail::split_list(e->value))
          cfg.param_list.push_back(detail::parse_double(RawEntry{item, e->line, e->column}));
        if (cfg.param_list.empty()) throw ConfigError(e->line, e->column, "empty parameter list");
      }
    }
  }
  if (auto* e = take("decoherence.j_max")) cfg.j_max = static_cast<int>(detail::parse_long(*e));
  if (auto* e = take("decoherence.placement")) {
    if (e->value == "bond_replacing")
      cfg.placement = ProbeMode::bond_replacing;
    else if (e->value == "site_attached")
      cfg.placement = ProbeMode::site_attached;
    else
      throw enum_error(*e, "placement");
  }
  if (auto* e = take("engine.samples")) cfg.samples = detail::parse_long(*e);
  if (auto* e = take("engine.seed")) cfg.seed = static_cast<std::uint64_t>(detail::parse_long(*e));
  if (auto* e = take("engine.averaging")) {
    if (e->value == "resistance")
      cfg.averaging = Averaging::resistance;
    else if (e->value == "conductance")
      cfg.averaging = Averaging::conductance;
    else
      throw enum_error(*e, "averaging mode");
  }
  if (auto* e = take("engine.disorder_path")) {
    if (e->value == "analytic")
      cfg.disorder_path = DisorderPath::analytic;
    else if (e->value == "sampled")
      cfg.disorder_path = DisorderPath::sampled;
    else
      throw enum_error(*e, "disorder path");
  }
  if (auto* e = take("engine.decoherence_path")) {
    if (e->value == "sampled")
      cfg.decoherence_path = DecoherencePath::sampled;
    else if (e->value == "exact_census")
      cfg.decoherence_path = DecoherencePath::exact_census;
    else
      throw enum_error(*e, "decoherence path");
  }
  if (auto* e = take("engine.energy")) cfg.energy = detail::parse_double(*e);
  if (auto* e = take("engine.probe_eta")) cfg.probe_eta = detail::parse_double(*e);
  if (auto* e = take("engine.probe_nu")) cfg.probe_nu = detail::parse_double(*e);
  if (auto* e = take("output.dir")) cfg.out_dir = e->value;
  if (auto* e = take("output.formats")) {
    cfg.write_csv = cfg.write_json = cfg.write_svg = false;
    for (const auto& f : detail::split_list(e->value)) {
      if (f == "csv")
        cfg.write_csv = true;
      else if (f == "json")
        cfg.write_json = true;
      else if (f == "svg")
        cfg.write_svg = true;
      else
        throw enum_error(*e, "output format");
    }
  }
  return cfg;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

/// Canonical serialization; parse(serialize(parse(text))) == parse(text).
inline std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  auto list_d = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
    return s;
  };
  auto list_i = [](const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
    return s;
  };
  out << "[experiment]\nname = " << cfg.name << "\n\n";
  out << "[lattice]\nN = " << list_i(cfg.n_list) << "\nM = " << cfg.m << "\n\n";
  out << "[disorder]\nsigma = " << list_d(cfg.sigma_list)
      << "\nshape = " << (cfg.shape == DisorderShape::gaussian ? "gaussian" : "uniform")
      << "\n\n";
  out << "[decoherence]\nmodel = ";
  switch (cfg.model) {
    case ModelKind::bernoulli: out << "bernoulli"; break;
    case ModelKind::homogeneous: out << "homogeneous"; break;
    case ModelKind::cutoff: out << "cutoff"; break;
    case ModelKind::power_law: out << "power_law"; break;
  }
  out << "\n" << cfg.param_name() << " = " << list_d(cfg.param_list);
  if (cfg.model == ModelKind::cutoff) out << "\nj_max = " << cfg.j_max;
  out << "\nplacement = "
      << (cfg.placement == ProbeMode::bond_replacing ? "bond_replacing" : "site_attached")
      << "\n\n";
  out << "[engine]\nsamples = " << cfg.samples << "\nseed = " << cfg.seed << "\naveraging = "
      << (cfg.averaging == Averaging::resistance ? "resistance" : "conductance")
      << "\ndisorder_path = "
      << (cfg.disorder_path == DisorderPath::analytic ? "analytic" : "sampled")
      << "\ndecoherence_path = "
      << (cfg.decoherence_path == DecoherencePath::sampled ? "sampled" : "exact_census")
      << "\nenergy = " << format_double(cfg.energy)
      << "\nprobe_eta = " << format_double(cfg.probe_eta)
      << "\nprobe_nu = " << format_double(cfg.probe_nu) << "\n\n";
  out << "[output]\ndir = " << cfg.out_dir << "\nformats =";
  std::string sep = " ";
  if (cfg.write_csv) {
    out << sep << "csv";
    sep = ", ";
  }
  if (cfg.write_json) {
    out << sep << "json";
    sep = ", ";
  }
  if (cfg.write_svg) out << sep << "svg";
  out << "\n";
  return out.str();
}

}  // namespace decotrans
