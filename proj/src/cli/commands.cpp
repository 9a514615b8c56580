#include "bpm/cli/commands.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "bpm/error.hpp"
#include "bpm/io.hpp"

namespace bpm::cli {

namespace fs = std::filesystem;

namespace {

fs::path prepare_dir(const fs::path& dir) {
  fs::create_directories(dir);
  return dir;
}

void write_output(const fs::path& dir, std::string_view name, const std::string& content, std::ostream& out) {
  const auto path = prepare_dir(dir) / name;
  write_file_atomic(path, content);
  fmt::print(out, "wrote {}\n", path.string());
}

MetricOptions metric_options(const RunConfig* config) {
  MetricOptions o;
  if (!config) return o;
  const auto& m = config->source;
  o.eta_d_signal = m.loss.eta_d[index(Channel::S)];
  o.eta_d_idler = m.splitter_ratio * m.loss.eta_d[index(Channel::I1)] +
                  (1.0 - m.splitter_ratio) * m.loss.eta_d[index(Channel::I2)];
  o.pump_mW = config->pump_mW;
  o.splitter_ratio = m.splitter_ratio;
  o.pair_splitter_ratio = m.pair_splitter_ratio;
  return o;
}

void print_metrics(const SpdcMetrics& m, const CountRates& r, std::ostream& out) {
  const auto row = [&](std::string_view name, Estimate e, std::string_view unit) {
    fmt::print(out, "  {:<14} {:>14.6g} +/- {:<12.3g} {}\n", name, e.value, e.sigma, unit);
  };
  fmt::print(out, "  {:<14} {:>14.6g} Hz\n  {:<14} {:>14.6g} Hz\n  {:<14} {:>14.6g} Hz\n", "C_s", r.C_s, "C_i", r.C_i,
             "C_si", r.C_si);
  row("PGR", m.pgr, "Hz");
  row("brightness", m.brightness, "Hz/mW");
  row(m.car_lower_bound ? "CAR (>=)" : "CAR", m.car, "");
  row("eta_H signal", m.eta_H_signal, "");
  row("eta_H idler", m.eta_H_idler, "");
  row("g2_H(0)", m.g2h_zero, "");
  row("purity", m.purity, "");
}

std::pair<std::string, std::string> analysis_outputs(const StreamAnalysis& a, const RunConfig* config,
                                                     const std::string& comment, std::ostream& out) {
  const SpdcMetrics metrics = compute_metrics(a.rates, a.car, metric_options(config));
  print_metrics(metrics, a.rates, out);
  return {metrics_csv(metrics, a.rates, comment), histogram_csv(a.histogram, comment)};
}

std::string solution_csv(const PhaseMatchSolution& s, const std::string& comment) {
  return fmt::format("{}\ntheta_deg,lambda_p_nm,lambda_s_nm,residual\n{:.17g},{:.17g},{:.17g},{:.17g}\n", comment,
                     s.theta_deg, s.lambda_p_nm, s.lambda_s_nm, s.residual_delta_k);
}

}  // namespace

std::string csv_comment(std::uint64_t config_hash, std::uint64_t seed) {
  return fmt::format("# bpm-spdc {} config_hash={:016x} seed={}", BPM_SPDC_VERSION, config_hash, seed);
}

std::string metrics_csv(const SpdcMetrics& m, const CountRates& r, const std::string& comment) {
  fmt::memory_buffer b;
  auto it = std::back_inserter(b);
  fmt::format_to(it, "{}\nmetric,value,sigma\n", comment);
  const auto rate = [&](std::string_view name, double v) {
    fmt::format_to(it, "{},{:.17g},{:.17g}\n", name, v, std::sqrt(v * r.duration_s) / r.duration_s);
  };
  const auto est = [&](std::string_view name, Estimate e) {
    fmt::format_to(it, "{},{:.17g},{:.17g}\n", name, e.value, e.sigma);
  };
  rate("C_s_Hz", r.C_s);
  rate("C_i_Hz", r.C_i);
  rate("C_si_Hz", r.C_si);
  rate("C_si1_Hz", r.C_si1);
  rate("C_si2_Hz", r.C_si2);
  rate("C_si1i2_Hz", r.C_si1i2);
  est("pgr_Hz", m.pgr);
  est("brightness_Hz_per_mW", m.brightness);
  est("car", m.car);
  fmt::format_to(it, "car_lower_bound,{},0\n", m.car_lower_bound ? 1 : 0);
  est("eta_H_signal", m.eta_H_signal);
  est("eta_H_idler", m.eta_H_idler);
  est("g2h_zero", m.g2h_zero);
  est("purity", m.purity);
  return fmt::to_string(b);
}

std::string histogram_csv(const CoincidenceHistogram& h, const std::string& comment) {
  fmt::memory_buffer b;
  auto it = std::back_inserter(b);
  fmt::format_to(it, "{}\ndelay_ps,counts\n", comment);
  for (std::size_t i = 0; i < h.counts.size(); ++i) fmt::format_to(it, "{},{}\n", h.center_ps(i), h.counts[i]);
  return fmt::to_string(b);
}

int cmd_pm_solve(const RunConfig& config, const PmSolveOptions& options, std::ostream& out) {
  WaveguideConfig wg = config.waveguide;
  if (options.temperature_K) wg.temperature_K = *options.temperature_K;
  if (options.theta_deg) wg.theta = PropagationAngle(*options.theta_deg);

  PhaseMatchSolution s{};
  if (options.mode == PmMode::wavelength) {
    if (!options.theta_deg && !config.theta_given)
      throw ArgumentError("wavelength mode needs --theta-deg or waveguide.theta_deg");
    s = solve_pm_wavelength(wg);
  } else {
    if (!options.lambda_p_nm) throw ArgumentError("angle mode needs --lambda-p-nm");
    s = solve_pm_angle(wg, *options.lambda_p_nm);
  }
  fmt::print(out, "material {}  T = {} K\n  theta   = {:.6f} deg\n  lambda_p = {:.6f} nm\n  lambda_s = {:.6f} nm\n"
                  "  residual dk = {:.3e} rad/mm\n",
             wg.material->name(), s.temperature_K, s.theta_deg, s.lambda_p_nm, s.lambda_s_nm, s.residual_delta_k);
  write_output(config.output_dir, "pm_solution.csv", solution_csv(s, csv_comment(config.hash, config.source.seed)),
               out);
  return kExitOk;
}

int cmd_shg(const RunConfig& config, const ShgOptions& options, std::ostream& out) {
  WaveguideConfig wg = config.waveguide;
  if (options.theta_deg) wg.theta = PropagationAngle(*options.theta_deg);
  if (options.temperature_K) wg.temperature_K = *options.temperature_K;
  if (options.length_mm) wg.length_mm = *options.length_mm;

  double lo = 0.0, hi = 0.0;
  if (options.lambda_min_nm && options.lambda_max_nm) {
    lo = *options.lambda_min_nm;
    hi = *options.lambda_max_nm;
  } else if (!options.lambda_min_nm && !options.lambda_max_nm) {
    const double fh = 2.0 * solve_pm_wavelength(wg).lambda_p_nm;
    lo = fh - 5.0;
    hi = fh + 5.0;
  } else {
    throw ArgumentError("give both --lambda-min-nm and --lambda-max-nm, or neither");
  }
  if (!(lo < hi)) throw ArgumentError(fmt::format("inverted wavelength range [{}, {}] nm", lo, hi));

  const auto grid = wavelength_grid(lo, hi, options.step_nm);
  const auto spectrum = shg_spectrum(wg, grid);
  fmt::print(out, "SHG peak at {:.4f} nm (T = {} K, L = {} mm, {} points, FWHM {:.4f} nm)\n", spectrum.peak_lambda_nm,
             wg.temperature_K, wg.length_mm, grid.size(), main_lobe_fwhm(spectrum));

  fmt::memory_buffer b;
  auto it = std::back_inserter(b);
  fmt::format_to(it, "{}\nlambda_nm,efficiency\n", csv_comment(config.hash, config.source.seed));
  for (const auto& p : spectrum.points) fmt::format_to(it, "{:.17g},{:.17g}\n", p.lambda_nm, p.efficiency);
  write_output(config.output_dir, "shg_spectrum.csv", fmt::to_string(b), out);
  return kExitOk;
}

int cmd_simulate(const RunConfig& config, const SimulateOptions& options, std::ostream& out) {
  RunConfig c = config;
  if (options.seed) c.source.seed = *options.seed;
  if (options.duration_s) c.source.duration_s = *options.duration_s;
  if (options.tau_ns) {
    c.source.window_s = *options.tau_ns * 1e-9;
    c.analysis.window_s = c.source.window_s;
  }
  fmt::print(out, "simulating mu = {:.6g} Hz for {} s, seed {}\n", c.source.pair_rate_Hz, c.source.duration_s,
             c.source.seed);
  const Simulation sim = generate_tags(c.source, {c.threads});
  const StreamAnalysis a = analyze_stream(sim.stream, c.analysis);
  const std::string comment = csv_comment(c.hash, c.source.seed);
  const auto [metrics, histogram] = analysis_outputs(a, &c, comment, out);
  write_output(c.output_dir, "tags.txt", format_tags(sim.stream), out);
  write_output(c.output_dir, "metrics.csv", metrics, out);
  write_output(c.output_dir, "histogram.csv", histogram, out);
  return kExitOk;
}

int cmd_analyze(const std::optional<RunConfig>& config, const fs::path& output_dir, const AnalyzeOptions& options,
                std::ostream& out) {
  const TagStream stream = read_tags(options.tag_file);
  AnalysisOptions analysis = config ? config->analysis : AnalysisOptions{};
  if (options.tau_ns) {
    analysis.window_s = *options.tau_ns * 1e-9;
    if (!config) analysis.histogram_span_s = 100.0 * analysis.window_s;
  }
  fmt::print(out, "analyzing {} events over {} s\n", stream.events.size(), stream.duration_s);
  const StreamAnalysis a = analyze_stream(stream, analysis);
  const std::string comment = csv_comment(config ? config->hash : 0, config ? config->source.seed : 0);
  const auto [metrics, histogram] = analysis_outputs(a, config ? &*config : nullptr, comment, out);
  write_output(output_dir, "metrics.csv", metrics, out);
  write_output(output_dir, "histogram.csv", histogram, out);
  return kExitOk;
}

int run_guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const NoCrossing& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitNoSolution;
  } catch (const MultipleRoots& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitNoSolution;
  } catch (const ResourceError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitResource;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  }
}

}  // namespace bpm::cli
