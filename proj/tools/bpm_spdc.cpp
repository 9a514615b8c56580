// bpm-spdc: phase-matching design, SHG spectra, SPDC source simulation and
// time-tag analysis. Run `bpm-spdc --help` for the subcommands.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bpm/cli/commands.hpp"
#include "bpm/error.hpp"

namespace {

using namespace bpm::cli;

template <class T>
std::optional<T> given(const CLI::Option* opt, const T& value) {
  return opt->count() ? std::optional<T>(value) : std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Birefringent phase-matched waveguide design and SPDC photon statistics", "bpm-spdc"};
  app.set_version_flag("--version", std::string(BPM_SPDC_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "Run configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides source.seed)");

  double theta = 0, lambda_p = 0, temperature = 0, length = 0, lmin = 0, lmax = 0, step = 0.005, tau_ns = 0,
         duration = 0;
  std::string mode = "wavelength";
  std::string tag_file;

  auto* pm = app.add_subcommand("pm-solve", "Solve degenerate type-1 phase matching");
  pm->add_option("--mode", mode, "wavelength (solve pump at fixed theta) or angle (solve theta at fixed pump)")
      ->check(CLI::IsMember({"wavelength", "angle"}));
  auto* pm_theta = pm->add_option("--theta-deg", theta, "Propagation angle to the optical axis");
  auto* pm_lambda = pm->add_option("--lambda-p-nm", lambda_p, "Pump wavelength for angle mode");
  auto* pm_temp = pm->add_option("--temperature-k", temperature, "Temperature");

  auto* shg = app.add_subcommand("shg", "Normalized SHG spectrum over a fundamental-wavelength grid");
  auto* shg_min = shg->add_option("--lambda-min-nm", lmin, "Grid start");
  auto* shg_max = shg->add_option("--lambda-max-nm", lmax, "Grid end");
  shg->add_option("--step-nm", step, "Grid step")->capture_default_str();
  auto* shg_theta = shg->add_option("--theta-deg", theta, "Propagation angle");
  auto* shg_temp = shg->add_option("--temperature-k", temperature, "Temperature");
  auto* shg_len = shg->add_option("--length-mm", length, "Waveguide length");

  auto* sim = app.add_subcommand("simulate", "Simulate time tags and analyze them");
  auto* sim_tau = sim->add_option("--tau-ns", tau_ns, "Coincidence window");
  auto* sim_dur = sim->add_option("--duration-s", duration, "Acquisition time");

  auto* an = app.add_subcommand("analyze", "Analyze a tag file");
  an->add_option("tags", tag_file, "Tag file")->required()->check(CLI::ExistingFile);
  auto* an_tau = an->add_option("--tau-ns", tau_ns, "Coincidence window");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  return run_guarded(
      [&]() -> int {
        std::optional<RunConfig> config;
        if (!config_path.empty()) config = load_config(config_path);
        if (config && !out_dir.empty()) config->output_dir = out_dir;
        const auto need_config = [&]() -> RunConfig& {
          if (!config) throw bpm::ArgumentError("this subcommand needs --config");
          if (seed_opt->count()) config->source.seed = seed;
          return *config;
        };

        if (*pm) {
          PmSolveOptions o;
          o.mode = mode == "angle" ? PmMode::angle : PmMode::wavelength;
          o.theta_deg = given(pm_theta, theta);
          o.lambda_p_nm = given(pm_lambda, lambda_p);
          o.temperature_K = given(pm_temp, temperature);
          return cmd_pm_solve(need_config(), o, std::cout);
        }
        if (*shg) {
          ShgOptions o;
          o.lambda_min_nm = given(shg_min, lmin);
          o.lambda_max_nm = given(shg_max, lmax);
          o.step_nm = step;
          o.theta_deg = given(shg_theta, theta);
          o.temperature_K = given(shg_temp, temperature);
          o.length_mm = given(shg_len, length);
          return cmd_shg(need_config(), o, std::cout);
        }
        if (*sim) {
          SimulateOptions o;
          o.seed = given(seed_opt, seed);
          o.duration_s = given(sim_dur, duration);
          o.tau_ns = given(sim_tau, tau_ns);
          return cmd_simulate(need_config(), o, std::cout);
        }
        AnalyzeOptions o;
        o.tag_file = tag_file;
        o.tau_ns = given(an_tau, tau_ns);
        if (config && seed_opt->count()) config->source.seed = seed;
        const std::filesystem::path dir = !out_dir.empty() ? std::filesystem::path(out_dir)
                                          : config          ? config->output_dir
                                                            : std::filesystem::path(".");
        return cmd_analyze(config, dir, o, std::cout);
      },
      std::cerr);
}
