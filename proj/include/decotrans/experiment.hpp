#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "decotrans/config.hpp"
#include "decotrans/ensemble.hpp"
#include "decotrans/svg.hpp"
#include "decotrans/version.hpp"
#include "json.hpp"

namespace decotrans {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDivergence = 3;

struct RunOptions {
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool dry_run = false;
  /// When set, a diverging estimate is recorded as an infinite row and the
  /// sweep continues; otherwise the run aborts with kExitDivergence.
  bool expect_localized = false;
};

struct ResultRow {
  double sigma = 0.0;
  double param = 0.0;
  int n = 0;
  Observable observable = Observable::resistivity_R;
  LogReal mean;
  LogReal stderr_of_mean;
  long samples_used = 0;
  bool diverged = false;
};

namespace detail {

inline const char* observable_name(Observable obs) {
  return obs == Observable::resistivity_R ? "resistivity_R" : "resistivity_G";
}

inline std::string log10_field(const ResultRow& row, bool stderr_field) {
  if (row.diverged) return "inf";
  double v = stderr_field ? row.stderr_of_mean.log10() : row.mean.log10();
  return format_double(v);
}

inline void write_results_csv(std::ostream& out, const ExperimentConfig& cfg,
                              const std::vector<ResultRow>& rows) {
  out << "sigma," << cfg.param_name() << ",N,observable,mean_log10,stderr_log10,samples\n";
  for (const auto& row : rows) {
    out << format_double(row.sigma) << ',' << format_double(row.param) << ',' << row.n << ','
        << observable_name(row.observable) << ',' << log10_field(row, false) << ','
        << log10_field(row, true) << ',' << row.samples_used << '\n';
  }
}

inline void write_results_json(std::ostream& out, const ExperimentConfig& cfg,
                               std::uint64_t seed, int threads, double wall_seconds,
                               const std::vector<ResultRow>& rows) {
  nlohmann::json doc;
  doc["tool"] = kToolName;
  doc["version"] = kVersion;
  doc["name"] = cfg.name;
  doc["seed"] = seed;
  doc["threads"] = threads;
  doc["wall_seconds"] = wall_seconds;
  doc["config"] = serialize_config(cfg);
  nlohmann::json jrows = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json j;
    j["sigma"] = row.sigma;
    j[cfg.param_name()] = row.param;
    j["N"] = row.n;
    j["observable"] = observable_name(row.observable);
    j["mean_log10"] = row.diverged ? std::numeric_limits<double>::infinity() : row.mean.log10();
    j["stderr_log10"] =
        row.diverged ? std::numeric_limits<double>::infinity() : row.stderr_of_mean.log10();
    j["samples"] = row.samples_used;
    j["diverged"] = row.diverged;
    jrows.push_back(std::move(j));
  }
  doc["rows"] = std::move(jrows);
  out << doc.dump(2) << '\n';
}

inline void write_results_svg(std::ostream& out, const ExperimentConfig& cfg,
                              const std::vector<ResultRow>& rows) {
  std::vector<SvgSeries> series;
  for (const auto& row : rows) {
    std::string label = "sigma=" + format_double(row.sigma) + ", " + cfg.param_name() + "=" +
                        format_double(row.param);
    if (series.empty() || series.back().label != label)
      series.push_back(SvgSeries{label, {}, false});
    double y = row.diverged ? std::numeric_limits<double>::quiet_NaN() : row.mean.log10();
    series.back().points.emplace_back(static_cast<double>(row.n), y);
  }
  write_svg_plot(out, cfg.name, "N", "log10 rho", series);
}

inline EnsembleSpec spec_for(const ExperimentConfig& cfg, double sigma, double param,
                             int threads) {
  EnsembleSpec spec;
  spec.m = cfg.m;
  spec.energy = cfg.energy;
  spec.disorder.sigma = sigma;
  spec.disorder.shape = cfg.shape;
  spec.model.kind = cfg.model;
  spec.model.placement = cfg.placement;
  spec.model.j_max = cfg.j_max;
  switch (cfg.model) {
    case ModelKind::homogeneous:
      spec.model.ell_phi = param;
      break;
    case ModelKind::power_law:
      spec.model.gamma = param;
      break;
    default:
      spec.model.p = param;
      break;
  }
  spec.samples = cfg.samples;
  spec.averaging = cfg.averaging;
  spec.disorder_path = cfg.disorder_path;
  spec.decoherence_path = cfg.decoherence_path;
  spec.probe_gamma = {cfg.probe_nu, cfg.probe_eta};
  spec.threads = threads;
  return spec;
}

}  // namespace detail

/// Runs the full (sigma, parameter, N) sweep of a configuration and writes
/// the requested output files. CSV output is byte-identical for a fixed seed
/// at any thread count. Returns a process exit code.
inline int run_experiment(const ExperimentConfig& cfg, const RunOptions& opt,
                          std::ostream& log) {
  const std::uint64_t master = opt.seed.value_or(cfg.seed);
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<ResultRow> rows;
  std::uint64_t cell = 0;
  for (double sigma : cfg.sigma_list) {
    for (double param : cfg.param_list) {
      EnsembleSpec spec = detail::spec_for(cfg, sigma, param, opt.threads);
      const std::uint64_t sweep_seed = substream_seed(master, cell++);
      for (int n : cfg.n_list) {
        spec.n = n;
        spec.seed = substream_seed(sweep_seed, 0x9e3779b9ULL + static_cast<std::uint64_t>(n));
        if (opt.dry_run) {
          try {
            spec.validate();
          } catch (const std::invalid_argument& err) {
            log << "invalid sweep cell (sigma=" << format_double(sigma) << ", "
                << cfg.param_name() << "=" << format_double(param) << ", N=" << n
                << "): " << err.what() << '\n';
            return kExitConfig;
          }
          continue;
        }
        ResultRow row;
        row.sigma = sigma;
        row.param = param;
        row.n = n;
        try {
          EnsembleEstimate est = estimate_resistivity(spec);
          row.observable = est.observable;
          row.mean = est.mean;
          row.stderr_of_mean = est.stderr_of_mean;
          row.samples_used = est.samples_used;
        } catch (const EngineDivergence& err) {
          row.observable = spec.averaging == Averaging::resistance ? Observable::resistivity_R
                                                                   : Observable::resistivity_G;
          row.diverged = true;
          row.samples_used = spec.samples;
          if (!opt.expect_localized) {
            log << "divergence at sigma=" << format_double(sigma) << ", " << cfg.param_name()
                << "=" << format_double(param) << ", N=" << n << ": " << err.what() << '\n';
            return kExitDivergence;
          }
        }
        rows.push_back(row);
      }
    }
  }

  if (opt.dry_run) {
    log << "dry run: " << cfg.sigma_list.size() * cfg.param_list.size() * cfg.n_list.size()
        << " sweep cells, " << cfg.samples << " samples each, seed " << master << '\n';
    return kExitOk;
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::filesystem::create_directories(cfg.out_dir);
  const std::string base = cfg.out_dir + "/" + cfg.name;
  if (cfg.write_csv) {
    std::ofstream out(base + ".csv");
    detail::write_results_csv(out, cfg, rows);
    log << "wrote " << base << ".csv\n";
  }
  if (cfg.write_json) {
    std::ofstream out(base + ".json");
    detail::write_results_json(out, cfg, master, opt.threads, wall, rows);
    log << "wrote " << base << ".json\n";
  }
  if (cfg.write_svg) {
    std::ofstream out(base + ".svg");
    detail::write_results_svg(out, cfg, rows);
    log << "wrote " << base << ".svg\n";
  }
  return kExitOk;
}

/// Localization length inverse and critical decoherence density over a range
/// of disorder strengths: columns sigma, xi_inv, p_star.
inline void write_phase_diagram(std::ostream& out, const std::vector<double>& sigmas) {
  out << "sigma,xi_inv,p_star\n";
  char buf[64];
  for (double s : sigmas) {
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f\n", format_double(s).c_str(), xi_inverse(s),
                  critical_decoherence(s));
    out << buf;
  }
}

namespace detail {

/// Infinite-chain resistivity curves: closed form for randomly placed
/// decoherence next to the regularly spaced reference at the same mean
/// density, with divergence markers at p*.
inline int preset_density_curves(const std::string& out_dir, std::ostream& log) {
  std::filesystem::create_directories(out_dir);
  const double sigmas[] = {0.5, 1.0};
  std::ofstream csv(out_dir + "/density_curves.csv");
  csv << "sigma,p,rho_random_log10,rho_homogeneous_log10\n";
  std::vector<SvgSeries> series;
  std::vector<double> vlines;
  for (double sigma : sigmas) {
    vlines.push_back(critical_decoherence(sigma));
    SvgSeries random{"random, sigma=" + format_double(sigma), {}, false};
    SvgSeries homog{"regular, sigma=" + format_double(sigma), {}, true};
    for (int i = 1; i <= 199; ++i) {
      double p = i / 200.0;
      Resistivity r = resistivity_random(p, sigma);
      double rr = r.ohmic ? std::log10(r.value) : std::numeric_limits<double>::infinity();
      double rh = resistivity_homogeneous(1.0 / p, sigma).log10();
      csv << format_double(sigma) << ',' << format_double(p) << ','
          << (r.ohmic ? format_double(rr) : "inf") << ',' << format_double(rh) << '\n';
      if (r.ohmic) random.points.emplace_back(p, rr);
      homog.points.emplace_back(p, rh);
    }
    series.push_back(std::move(random));
    series.push_back(std::move(homog));
  }
  std::ofstream svg(out_dir + "/density_curves.svg");
  write_svg_plot(svg, "infinite-chain resistivity vs decoherence density", "p", "log10 rho",
                 series, vlines);
  log << "wrote " << out_dir << "/density_curves.csv\n";
  log << "wrote " << out_dir << "/density_curves.svg\n";
  return kExitOk;
}

}  // namespace detail

/// Named presets reproducing the library's reference experiments.
inline int run_preset(const std::string& name, RunOptions opt, std::ostream& log) {
  const std::string out_root = "out/" + name;
  if (name == "fig1") {
    if (opt.dry_run) {
      log << "dry run: analytic density curves, nothing to simulate\n";
      return kExitOk;
    }
    return detail::preset_density_curves(out_root, log);
  }
  if (name == "phase") {
    if (opt.dry_run) {
      log << "dry run: analytic phase diagram, nothing to simulate\n";
      return kExitOk;
    }
    std::filesystem::create_directories(out_root);
    std::vector<double> sigmas;
    for (int i = 1; i <= 20; ++i) sigmas.push_back(i * 0.1);
    std::ofstream out(out_root + "/phase.csv");
    write_phase_diagram(out, sigmas);
    log << "wrote " << out_root << "/phase.csv\n";
    return kExitOk;
  }
  if (name == "fig3") {
    // Attached probes (Monte Carlo over disorder) against bond-replacing
    // probes with the exact decoherence census.
    ExperimentConfig attached;
    attached.name = "attached";
    attached.n_list = {10, 20, 30, 40};
    attached.sigma_list = {1.0};
    attached.param_list = {0.2, 0.8};
    attached.placement = ProbeMode::site_attached;
    attached.disorder_path = DisorderPath::sampled;
    attached.samples = 500;
    attached.out_dir = out_root;
    attached.write_svg = true;
    int rc = run_experiment(attached, opt, log);
    if (rc != kExitOk) return rc;

    ExperimentConfig census;
    census.name = "bond_replacing_census";
    census.n_list = attached.n_list;
    census.sigma_list = attached.sigma_list;
    census.param_list = attached.param_list;
    census.decoherence_path = DecoherencePath::exact_census;
    census.out_dir = out_root;
    census.write_svg = true;
    return run_experiment(census, opt, log);
  }
  if (name == "fig4") {
    ExperimentConfig ribbon;
    ribbon.name = "ribbon";
    ribbon.n_list = {20, 40, 60, 80, 100};
    ribbon.m = 5;
    ribbon.sigma_list = {1.0};
    ribbon.param_list = {0.15};
    ribbon.disorder_path = DisorderPath::sampled;
    ribbon.samples = 100;
    ribbon.out_dir = out_root;
    ribbon.write_svg = true;
    return run_experiment(ribbon, opt, log);
  }
  if (name == "fig5") {
    // Resistance averaging against conductance averaging of the same
    // ensembles around the Ohmic-localized threshold.
    ExperimentConfig base;
    base.n_list = {250, 500, 1000, 2000};
    base.sigma_list = {1.0};
    base.param_list = {0.5, 0.6, 0.8};
    base.samples = 10000;
    base.out_dir = out_root;
    base.write_svg = true;

    ExperimentConfig res = base;
    res.name = "avg_resistance";
    opt.expect_localized = true;
    int rc = run_experiment(res, opt, log);
    if (rc != kExitOk) return rc;

    ExperimentConfig cond = base;
    cond.name = "avg_conductance";
    cond.averaging = Averaging::conductance;
    return run_experiment(cond, opt, log);
  }
  log << "unknown preset '" << name << "' (expected fig1, fig3, fig4, fig5 or phase)\n";
  return kExitConfig;
}

}  // namespace decotrans
