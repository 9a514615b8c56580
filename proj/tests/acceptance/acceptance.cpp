// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "bpm/cli/commands.hpp"
#include "bpm/error.hpp"
#include "bpm/montecarlo.hpp"
#include "bpm/photonstats.hpp"
#include "fixtures.hpp"

using namespace bpm;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string pass_fail(bool ok) { return ok ? "ok" : "FAILED"; }

// 1. Index-ellipsoid endpoints, bounds and monotonicity.
Outcome endpoint_identities() {
  const auto m = fixtures::material("ln_bpm_waveguide.mat");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lam(650.0, 1800.0), dt(-100.0, 100.0), th(0.0, 90.0);
  double worst = 0.0;
  int bound_fail = 0, mono_fail = 0;
  for (int i = 0; i < 10000; ++i) {
    const double l = lam(rng), t = m->reference_temperature() + dt(rng), a = th(rng);
    const double no = index_ordinary(*m, l, t), ne = index_extraordinary_principal(*m, l, t);
    worst = std::max(worst, std::abs(index_extraordinary_at_angle(*m, l, t, PropagationAngle(90.0)) - ne) / ne);
    worst = std::max(worst, std::abs(index_extraordinary_at_angle(*m, l, t, PropagationAngle(0.0)) - no) / no);
    const double n = index_extraordinary_at_angle(*m, l, t, PropagationAngle(a));
    bound_fail += n < std::min(no, ne) || n > std::max(no, ne);
    const double b = std::min(90.0, a + 0.5);
    const double n2 = index_extraordinary_at_angle(*m, l, t, PropagationAngle(b));
    // n(θ) moves monotonically from n_o toward n_e.
    mono_fail += (ne < no) ? n2 > n : n2 < n;
  }
  return {worst <= 1e-12 && bound_fail == 0 && mono_fail == 0,
          fmt::format("max endpoint error {:.1e} rel, bound violations {}, monotonicity violations {} / 1e4", worst,
                      bound_fail, mono_fail)};
}

// 2. Heralding efficiency from loss against the reported percentages.
Outcome heralding_from_loss() {
  const double idler = 100.0 * heralding_efficiency_from_loss(8.85);
  const double signal = 100.0 * heralding_efficiency_from_loss(8.58);
  const double di = std::abs(idler - 13.0), ds = std::abs(signal - 13.8);
  return {di <= 0.05 && ds <= 0.05,
          fmt::format("8.85 dB -> {:.3f}% (|d| = {:.3f} pp, {}), 8.58 dB -> {:.3f}% (|d| = {:.3f} pp vs 13.8%, {}); "
                      "tolerance 0.05 pp",
                      idler, di, pass_fail(di <= 0.05), signal, ds, pass_fail(ds <= 0.05))};
}

// 3. Solvers against exhaustive scans on the synthetic crystal.
Outcome solver_vs_scan() {
  const fixtures::Cauchy oracle;
  const auto m = fixtures::parsed(oracle.material_text());
  double worst_l = 0.0, worst_a = 0.0, worst_trip = 0.0;
  for (double theta : {42.0, 48.5, 55.0}) {
    const auto w = solve_pm_wavelength(fixtures::waveguide(m, theta));
    const double ref_l =
        fixtures::scan_root([&](double l) { return oracle.mismatch(l, oracle.t_ref, theta); }, 600.0, 1000.0, 1e-4);
    worst_l = std::max(worst_l, std::abs(w.lambda_p_nm - ref_l));
    const auto a = solve_pm_angle(fixtures::waveguide(m, 90.0), w.lambda_p_nm);
    worst_trip = std::max(worst_trip, std::abs(a.theta_deg - theta));
  }
  for (double lp : {700.0, 775.0, 850.0}) {
    const auto a = solve_pm_angle(fixtures::waveguide(m, 90.0), lp);
    const double ref_a =
        fixtures::scan_root([&](double t) { return oracle.mismatch(lp, oracle.t_ref, t); }, 0.0, 90.0, 1e-4);
    worst_a = std::max(worst_a, std::abs(a.theta_deg - ref_a));
    const auto w = solve_pm_wavelength(fixtures::waveguide(m, a.theta_deg));
    worst_trip = std::max(worst_trip, std::abs(w.lambda_p_nm - lp));
  }
  return {worst_l <= 0.01 && worst_a <= 0.01 && worst_trip <= 0.01,
          fmt::format("max |d lambda_p| {:.2e} nm, max |d theta| {:.2e} deg, round trip {:.2e}", worst_l, worst_a,
                      worst_trip)};
}

// 4. Quoted crossing indices.
Outcome crossing_anchor() {
  auto c = fixtures::waveguide(fixtures::paper_crossing_tables(false), 53.5);
  const double dk = delta_k(c, 775.0, 1550.0, 1550.0);
  c.material = fixtures::paper_crossing_tables(true);
  const double root = solve_pm_wavelength(c).lambda_p_nm;
  const bool ok_dk = std::abs(dk / -0.324 - 1.0) <= 0.01;
  const bool ok_root = std::abs(root - 775.0) <= 0.01;
  return {ok_dk && ok_root, fmt::format("delta_k = {:.5f} rad/mm (target -0.324 +/- 1%), equalized root {:.6f} nm",
                                        dk, root)};
}

// 5. Thermal tuning.
Outcome thermal_tuning() {
  fixtures::Cauchy oracle;
  oracle.dn_o = 3.0e-6;
  oracle.dn_e = 3.3e-5;
  const auto m = fixtures::parsed(oracle.material_text());
  const double theta = 48.5, t = oracle.t_ref;
  const auto rate = tuning_rate(fixtures::waveguide(m, theta), 1.0);
  const double lp = rate.lambda_fh_nm / 2.0;
  const double r = theta * std::numbers::pi / 180.0;
  const double s = std::sin(r) * std::sin(r), c = std::cos(r) * std::cos(r);
  const double no = oracle.n_o(lp, t), ne = oracle.n_e(lp, t), n = fixtures::Cauchy::mix(no, ne, theta);
  const double a = n * n * n * s / (ne * ne * ne), b = n * n * n * c / (no * no * no);
  const double f_t = a * oracle.dn_e + b * oracle.dn_o - oracle.dn_o;
  const double f_l = a * oracle.dn_e_dl(lp) + b * oracle.dn_o_dl(lp) - 2.0 * oracle.dn_o_dl(2.0 * lp);
  const double expected = -2.0 * f_t / f_l;
  const double rel = std::abs(rate.nm_per_K / expected - 1.0);

  const auto ln = tuning_rate(fixtures::waveguide(fixtures::material("ln_bpm_waveguide.mat"), 53.5), 1.0);
  const bool band = ln.nm_per_K >= 0.1 && ln.nm_per_K <= 2.0;
  return {rel <= 0.01 && band,
          fmt::format("linear fixture {:.5f} vs closed form {:.5f} nm/K ({:.2e} rel); LN fixture {:.4f} nm/K "
                      "(band [0.1, 2.0], reported 0.617)",
                      rate.nm_per_K, expected, rel, ln.nm_per_K)};
}

// 6. SHG spectrum peak and width scaling.
Outcome shg_checks() {
  const auto m = fixtures::material("ln_bpm_waveguide.mat");
  const auto c = fixtures::waveguide(m, 53.5);
  const double fh = 2.0 * solve_pm_wavelength(c).lambda_p_nm;
  std::vector<double> grid;
  for (int k = -400; k <= 400; ++k) grid.push_back(fh + 0.005 * k);
  const auto spec = shg_spectrum(c, grid);
  const double at_pm = spec.points[400].efficiency;

  const double slope = 0.8;
  const auto lin = wavelength_grid(1530.0, 1570.0, 0.0002);
  std::vector<double> dk(lin.size());
  for (std::size_t i = 0; i < lin.size(); ++i) dk[i] = slope * (lin[i] - 1550.0);
  const double w1 = main_lobe_fwhm(shg_from_mismatch(lin, dk, 10.0));
  const double w2 = main_lobe_fwhm(shg_from_mismatch(lin, dk, 20.0));
  const double ratio = w1 / w2;
  return {at_pm == 1.0 && spec.peak_lambda_nm == grid[400] && std::abs(ratio / 2.0 - 1.0) <= 0.02,
          fmt::format("efficiency at PM {:.17g}, peak at {:.4f} nm; FWHM(L)/FWHM(2L) = {:.5f}", at_pm,
                      spec.peak_lambda_nm, ratio)};
}

SourceModel paper_source(double mu, double duration_s, std::uint64_t seed) {
  SourceModel m;
  m.pair_rate_Hz = mu;
  m.duration_s = duration_s;
  m.seed = seed;
  return m;
}

AnalysisOptions wide_analysis(double span_s) {
  AnalysisOptions a;
  a.histogram_span_s = span_s;
  return a;
}

// 7. Simulation against the forward model.
Outcome mc_vs_analytic() {
  const auto model = paper_source(1e6, 30.0, 7001);
  const auto e = analytic_forward(model);
  const auto a = analyze_stream(generate_tags(model).stream, wide_analysis(100e-9));
  const double d = model.duration_s;
  const auto z_rate = [&](double measured, double expected) {
    return (measured - expected) * d / std::sqrt(expected * d);
  };
  const double z_s = z_rate(a.rates.C_s, e.rates.C_s);
  const double z_i = z_rate(a.rates.C_i, e.rates.C_i);
  const double z_si = z_rate(a.rates.C_si, e.rates.C_si);
  const auto p = pgr(a.rates);
  const double z_pgr = (p.value - e.pgr) / p.sigma;
  const double z_mu = (p.value - model.pair_rate_Hz) / p.sigma;
  const double z_car = a.car ? (a.car->car - e.car) / a.car->sigma : INFINITY;
  const bool ok = std::max({std::abs(z_s), std::abs(z_i), std::abs(z_si), std::abs(z_pgr), std::abs(z_mu),
                            std::abs(z_car)}) <= 3.0;
  return {ok, fmt::format("z-scores: C_s {:+.2f}, C_i {:+.2f}, C_si {:+.2f}, PGR {:+.2f}, CAR {:+.2f} "
                          "(CAR {:.1f} vs {:.1f}); PGR {:.5g} vs mu 1e6: {:+.2f} sigma",
                          z_s, z_i, z_si, z_pgr, z_car, a.car ? a.car->car : NAN, e.car, p.value, z_mu)};
}

// 8. CAR x PGR across pair rates.
Outcome car_pgr_invariance() {
  std::vector<double> products;
  std::string values;
  for (double mu : {1e5, 3e5, 1e6, 3e6, 1e7}) {
    const double duration = std::max(8e11 / (mu * mu), 0.2);
    const auto a = analyze_stream(generate_tags(paper_source(mu, duration, 8000 + static_cast<std::uint64_t>(mu / 1e5)))
                                      .stream,
                                  wide_analysis(500e-9));
    const double prod = a.car->car * pgr(a.rates).value;
    products.push_back(prod);
    values += fmt::format("{}{:.3e}", values.empty() ? "" : ", ", prod);
  }
  const auto [lo, hi] = std::minmax_element(products.begin(), products.end());
  double mean = 0.0;
  for (double p : products) mean += p / static_cast<double>(products.size());
  const double spread = (*hi - *lo) / mean;

  double worst_analytic = 0.0;
  for (double mu : {1e5, 3e5, 1e6, 3e6, 1e7}) {
    auto m = paper_source(mu, 1.0, 0);
    m.dark_rate_Hz = {0.0, 0.0, 0.0};
    const auto f = analytic_forward(m);
    worst_analytic = std::max(worst_analytic, std::abs(f.car * f.pgr * 2.0 * m.window_s - 1.0));
  }
  return {spread <= 0.15 && worst_analytic <= 1e-9,
          fmt::format("simulated CAR x PGR [{}] Hz, spread {:.1f}%; dark-free analytic 1/(2 tau) = {:.3e} Hz to {:.1e}; "
                      "reported 4.4e9 Hz corresponds to a {:.0f} ps effective bin",
                      values, 100.0 * spread, 0.5 / 1e-9, worst_analytic, 1e12 / (2.0 * 4.4e9))};
}

// 9. Heralded antibunching and its growth with pump.
Outcome antibunching() {
  struct Point {
    double mu;
    double duration;
    int runs;
  };
  const Point sweep[] = {{1.8e6, 10.0, 3}, {5.7e6, 5.0, 1}, {1.8e7, 1.0, 1}};
  std::vector<Estimate> g2;
  for (const auto& pt : sweep) {
    TripleCounts total;
    for (int r = 0; r < pt.runs; ++r) {
      const auto model = paper_source(pt.mu, pt.duration, 9000 + static_cast<std::uint64_t>(r) * 17 +
                                                              static_cast<std::uint64_t>(pt.mu / 1e5));
      total += triple_coincidences(generate_tags(model).stream, model.window_s);
    }
    g2.push_back(g2h_zero(rates_from_counts(total, pt.duration * pt.runs, 1e-9)));
  }
  const bool low = g2[0].value < 0.05;
  const bool rising = g2[0].value < g2[1].value && g2[1].value < g2[2].value;
  return {low && rising, fmt::format("g2_H(0) = {:.4f} +/- {:.4f} at 1.8 MHz (paper 0.013 +/- 0.006), "
                                     "{:.4f} +/- {:.4f} at 5.7 MHz, {:.4f} +/- {:.4f} at 18 MHz",
                                     g2[0].value, g2[0].sigma, g2[1].value, g2[1].sigma, g2[2].value, g2[2].sigma)};
}

// 10. Determinism and lossless tag files.
Outcome determinism_io() {
  auto model = paper_source(4e6, 1.0, 10);
  model.dark_rate_Hz = {2e3, 2e3, 2e3};
  const auto a = generate_tags(model);
  const auto b = generate_tags(model, {4});
  const auto text_a = format_tags(a.stream);
  const bool same_tags = text_a == format_tags(b.stream);

  const std::string comment = cli::csv_comment(1, model.seed);
  const auto an_a = analyze_stream(a.stream), an_b = analyze_stream(b.stream);
  const bool same_csv =
      cli::metrics_csv(compute_metrics(an_a.rates, an_a.car), an_a.rates, comment) ==
          cli::metrics_csv(compute_metrics(an_b.rates, an_b.car), an_b.rates, comment) &&
      cli::histogram_csv(an_a.histogram, comment) == cli::histogram_csv(an_b.histogram, comment);

  const auto path = std::filesystem::temp_directory_path() / fmt::format("bpm_spdc_acceptance_{}.txt", ::getpid());
  write_tags(a.stream, path);
  const auto back = read_tags(path);
  std::filesystem::remove(path);
  const bool round_trip = back.events == a.stream.events && format_tags(back) == text_a;
  return {same_tags && same_csv && round_trip && a.stream.events.size() >= 1'000'000,
          fmt::format("{} events; identical tags {}, identical CSVs {}, round trip {}", a.stream.events.size(),
                      same_tags ? "yes" : "no", same_csv ? "yes" : "no", round_trip ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "index-ellipsoid endpoints and bounds", 1.0, endpoint_identities},
      {2, "heralding efficiency from loss", 1.0, heralding_from_loss},
      {3, "phase-matching solvers vs exhaustive scan", 5.0, solver_vs_scan},
      {4, "crossing-index anchor", 1.0, crossing_anchor},
      {5, "thermal tuning rate", 5.0, thermal_tuning},
      {6, "SHG peak and FWHM scaling", 2.0, shg_checks},
      {7, "Monte Carlo vs forward model", 60.0, mc_vs_analytic},
      {8, "CAR x PGR invariance", 180.0, car_pgr_invariance},
      {9, "heralded antibunching", 180.0, antibunching},
      {10, "determinism and tag-file I/O", 30.0, determinism_io},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_s;
    const bool ok = o.pass && in_time;
    failures += !ok;
    fmt::print("criterion {:>2} {}: {} | {} | {:.2f} s (budget {:.0f} s{})\n", c.id, ok ? "PASS" : "FAIL", c.name,
               o.detail, secs, c.budget_s, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  auto operating = paper_source(SourceModel::pair_rate_from_pump(2.2e6, 2.17), 1.0, 0);
  const auto op = analytic_forward(operating);
  fmt::print("note: forward model at 2.17 mW (mu {:.3e} Hz): CAR {:.1f}, PGR {:.3e} Hz, g2_H(0) {:.4f}\n",
             operating.pair_rate_Hz, op.car, op.pgr, op.g2h_zero);
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}
