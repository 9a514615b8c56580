#pragma once

// Material fixtures and closed-form references shared by the unit tests and
// the acceptance suite.

#include <cmath>
#include <filesystem>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "bpm/dispersion.hpp"
#include "bpm/phasematch.hpp"

namespace fixtures {

inline std::filesystem::path data_path(const std::string& relative) {
  return std::filesystem::path(BPM_SPDC_DATA_DIR) / relative;
}

inline std::shared_ptr<const bpm::MaterialDispersion> material(const std::string& file) {
  return std::make_shared<const bpm::MaterialDispersion>(bpm::load_material(data_path("materials/" + file)));
}

inline std::shared_ptr<const bpm::MaterialDispersion> parsed(const std::string& text) {
  return std::make_shared<const bpm::MaterialDispersion>(bpm::parse_material(text));
}

inline bpm::WaveguideConfig waveguide(std::shared_ptr<const bpm::MaterialDispersion> m, double theta_deg,
                                      double length_mm = 20.0) {
  bpm::WaveguideConfig c;
  c.temperature_K = m->reference_temperature();
  c.material = std::move(m);
  c.theta = bpm::PropagationAngle(theta_deg);
  c.length_mm = length_mm;
  return c;
}

// Synthetic Cauchy crystal of data/materials/synthetic_cauchy.mat, restated
// in closed form so oracles never go through the library.
struct Cauchy {
  double a_o = 2.20, b_o = 4.0e4;
  double a_e = 2.12, b_e = 3.6e4;
  double dn_o = 0.0, dn_e = 0.0;  // per kelvin
  double t_ref = 293.15;

  double n_o(double l, double t) const { return a_o + b_o / (l * l) + dn_o * (t - t_ref); }
  double n_e(double l, double t) const { return a_e + b_e / (l * l) + dn_e * (t - t_ref); }
  double dn_o_dl(double l) const { return -2.0 * b_o / (l * l * l); }
  double dn_e_dl(double l) const { return -2.0 * b_e / (l * l * l); }

  static double mix(double no, double ne, double theta_deg) {
    const double r = theta_deg * std::numbers::pi / 180.0;
    const double s = std::sin(r) * std::sin(r), c = std::cos(r) * std::cos(r);
    return 1.0 / std::sqrt(s / (ne * ne) + c / (no * no));
  }
  double n_theta(double l, double t, double theta_deg) const { return mix(n_o(l, t), n_e(l, t), theta_deg); }
  double mismatch(double lp, double t, double theta_deg) const { return n_theta(lp, t, theta_deg) - n_o(2 * lp, t); }

  std::string material_text() const {
    return fmt::format(
        "name = synthetic_cauchy\nlambda_min_nm = 600\nlambda_max_nm = 2000\nt_ref_K = {}\n"
        "[ordinary]\nform = poly_inverse_lambda2\ncoefficients = {}, {}\ndn_dT = {}\n"
        "[extraordinary]\nform = poly_inverse_lambda2\ncoefficients = {}, {}\ndn_dT = {}\n",
        t_ref, a_o, b_o, dn_o, a_e, b_e, dn_e);
  }
};

/// Root of `f` on [lo, hi] by a uniform scan at `step`; midpoint of the first sign-change cell.
template <class F>
double scan_root(F f, double lo, double hi, double step) {
  double x0 = lo, f0 = f(lo);
  const long n = static_cast<long>(std::ceil((hi - lo) / step));
  for (long k = 1; k <= n; ++k) {
    const double x1 = std::min(lo + static_cast<double>(k) * step, hi);
    const double f1 = f(x1);
    if (f0 == 0.0) return x0;
    if ((f0 < 0.0) != (f1 < 0.0)) return 0.5 * (x0 + x1);
    x0 = x1;
    f0 = f1;
  }
  return std::nan("");
}

/// Tabulated branches reproducing the quoted indices at the 53.5 deg crossing:
/// n_o(1550) = 2.20401 and n_e(53.5 deg; 775) = 2.20405 (or 2.20401 when `equalize`).
inline std::shared_ptr<const bpm::MaterialDispersion> paper_crossing_tables(bool equalize) {
  constexpr double kTheta = 53.5;
  constexpr double kNo1550 = 2.20401;
  const double target = equalize ? kNo1550 : 2.20405;
  // Smooth a + b/λ² curves; node values at 775 and 1550 are exact by construction.
  const double b_o = 36830.0, b_e = 33000.0;
  const double a_o = kNo1550 - b_o / (1550.0 * 1550.0);
  const auto no = [&](double l) { return a_o + b_o / (l * l); };
  const double r = kTheta * std::numbers::pi / 180.0;
  const double s = std::sin(r) * std::sin(r), c = std::cos(r) * std::cos(r);
  const double ne775 = std::sqrt(s / (1.0 / (target * target) - c / (no(775.0) * no(775.0))));
  const double a_e = ne775 - b_e / (775.0 * 775.0);
  const auto ne = [&](double l) { return l == 775.0 ? ne775 : a_e + b_e / (l * l); };

  std::string o_table, e_table;
  for (double l = 650.0; l <= 1800.0; l += 25.0) {
    o_table += fmt::format("{}{}:{:.17g}", o_table.empty() ? "" : ", ", l, l == 1550.0 ? kNo1550 : no(l));
    e_table += fmt::format("{}{}:{:.17g}", e_table.empty() ? "" : ", ", l, ne(l));
  }
  return parsed(fmt::format("name = paper_crossing\nlambda_min_nm = 650\nlambda_max_nm = 1800\nt_ref_K = 294.15\n"
                            "[ordinary]\ntable = {}\n[extraordinary]\ntable = {}\n",
                            o_table, e_table));
}

}  // namespace fixtures
