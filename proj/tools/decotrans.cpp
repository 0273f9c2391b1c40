#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "decotrans/experiment.hpp"

namespace {

int cmd_run(const std::string& path, const decotrans::RunOptions& opt) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot open config file '" << path << "'\n";
    return decotrans::kExitConfig;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  decotrans::ExperimentConfig cfg;
  try {
    cfg = decotrans::parse_config(buf.str());
  } catch (const decotrans::ConfigError& err) {
    std::cerr << path << ": " << err.what() << '\n';
    return decotrans::kExitConfig;
  }
  return decotrans::run_experiment(cfg, opt, std::cerr);
}

bool parse_sigma_range(const std::string& text, std::vector<double>& out) {
  double lo = 0, hi = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream ss(text);
  if (!(ss >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !ss.eof())
    return false;
  if (step <= 0.0 || hi < lo) return false;
  for (int i = 0;; ++i) {
    double s = lo + i * step;
    if (s > hi + step * 1e-9) break;
    out.push_back(s);
  }
  return !out.empty();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum transport through disordered chains with dephasing probes"};
  app.set_version_flag("--version",
                       std::string(decotrans::kToolName) + " " + decotrans::kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  decotrans::RunOptions opt;
  std::uint64_t seed_value = 0;
  bool seed_set = false;
  app.add_option_function<std::uint64_t>(
         "--seed", [&](std::uint64_t v) { seed_value = v; seed_set = true; },
         "override the config seed")
      ->expected(1);
  app.add_option("--threads", opt.threads, "worker thread count")->check(CLI::PositiveNumber);
  app.add_flag("--dry-run", opt.dry_run, "validate and report the sweep plan without running");
  app.add_flag("--expect-localized", opt.expect_localized,
               "record diverging estimates as infinite rows instead of aborting");

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "experiment config file")->required();

  std::string preset_name;
  CLI::App* preset = app.add_subcommand("preset", "run a named reference experiment");
  preset->add_option("name", preset_name, "fig1, fig3, fig4, fig5 or phase")->required();

  std::string sigma_range = "0.1:2.0:0.1";
  std::string phase_out = "phase.csv";
  CLI::App* phase = app.add_subcommand("phase", "localization phase diagram table");
  phase->add_option("--sigma", sigma_range, "disorder range lo:hi:step");
  phase->add_option("--out", phase_out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : decotrans::kExitConfig;
  }
  if (seed_set) opt.seed = seed_value;

  if (run->parsed()) return cmd_run(config_path, opt);
  if (preset->parsed()) return decotrans::run_preset(preset_name, opt, std::cerr);

  std::vector<double> sigmas;
  if (!parse_sigma_range(sigma_range, sigmas)) {
    std::cerr << "invalid --sigma range '" << sigma_range << "' (expected lo:hi:step)\n";
    return decotrans::kExitConfig;
  }
  if (opt.dry_run) {
    std::cerr << "dry run: " << sigmas.size() << " sigma values\n";
    return decotrans::kExitOk;
  }
  std::ofstream out(phase_out);
  if (!out) {
    std::cerr << "cannot open '" << phase_out << "' for writing\n";
    return decotrans::kExitConfig;
  }
  decotrans::write_phase_diagram(out, sigmas);
  std::cerr << "wrote " << phase_out << '\n';
  return decotrans::kExitOk;
}
