#include <doctest.h>

#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "bpm/error.hpp"
#include "fixtures.hpp"

using namespace bpm;
using boost::multiprecision::cpp_bin_float_50;

namespace {

// Sellmeier closed form in 50-digit arithmetic, λ in nm.
double sellmeier_oracle(const std::vector<double>& k, double lambda_nm, double shift) {
  const cpp_bin_float_50 l = cpp_bin_float_50(lambda_nm) / 1000;
  const cpp_bin_float_50 l2 = l * l;
  cpp_bin_float_50 sum = k[0];
  for (std::size_t j = 1; j + 1 < k.size(); j += 2) sum += cpp_bin_float_50(k[j]) * l2 / (l2 - k[j + 1]);
  return static_cast<double>(sqrt(sum) + shift);
}

double angle_oracle(double n_o, double n_e, double theta_deg) {
  const cpp_bin_float_50 r = cpp_bin_float_50(theta_deg) * boost::math::constants::pi<cpp_bin_float_50>() / 180;
  const cpp_bin_float_50 s = sin(r), c = cos(r);
  const cpp_bin_float_50 no = n_o, ne = n_e;
  return static_cast<double>(1 / sqrt(s * s / (ne * ne) + c * c / (no * no)));
}

std::string constant_table(double n) {
  return fmt::format("1000:{0}, 1500:{0}, 2000:{0}, 2500:{0}", n);
}

MaterialDispersion constant_material(double n_o, double n_e, double dn_dT = 0.0) {
  return parse_material(fmt::format("name = c\nlambda_min_nm = 1000\nlambda_max_nm = 2500\nt_ref_K = 300\n"
                                    "[ordinary]\ntable = {}\ndn_dT = {}\n[extraordinary]\ntable = {}\ndn_dT = {}\n",
                                    constant_table(n_o), dn_dT, constant_table(n_e), dn_dT));
}

}  // namespace

TEST_CASE("constant tables") {
  const auto m = constant_material(2.0, 2.1);
  CHECK(index_ordinary(m, 1500.0, 300.0) == 2.0);
  CHECK(index_ordinary(m, 1234.5, 300.0) == 2.0);
  CHECK(index_extraordinary_principal(m, 1777.0, 300.0) == 2.1);
}

TEST_CASE("linear thermo-optic shift") {
  const auto m = constant_material(2.0, 2.1, 1e-5);
  CHECK(index_extraordinary_principal(m, 1500.0, 310.0) == doctest::Approx(2.1 + 1e-4).epsilon(1e-15));
  CHECK(index_ordinary(m, 1500.0, 290.0) == doctest::Approx(2.0 - 1e-4).epsilon(1e-15));
}

TEST_CASE("table nodes are returned exactly, endpoints included") {
  const auto m = parse_material(
      "name = t\nlambda_min_nm = 1000\nlambda_max_nm = 1600\nt_ref_K = 300\n"
      "[ordinary]\ntable = 1000:2.31, 1200:2.27, 1400:2.251, 1600:2.2433\n"
      "[extraordinary]\ntable = 1000:2.2, 1200:2.19, 1400:2.185, 1600:2.18\ninterpolation = linear\n");
  CHECK(index_ordinary(m, 1000.0, 300.0) == 2.31);
  CHECK(index_ordinary(m, 1400.0, 300.0) == 2.251);
  CHECK(index_ordinary(m, 1600.0, 300.0) == 2.2433);
  CHECK(index_extraordinary_principal(m, 1100.0, 300.0) == doctest::Approx(2.195));
  const double mid = index_ordinary(m, 1300.0, 300.0);
  CHECK(mid < 2.27);
  CHECK(mid > 2.251);
}

TEST_CASE("Sellmeier closed form matches a 50-digit evaluation") {
  const auto m = fixtures::material("congruent_ln_bulk.mat");
  const double t = m->reference_temperature();
  const auto& ko = m->ordinary().coefficients();
  const auto& ke = m->extraordinary().coefficients();
  for (double l : {650.0, 775.0, 1064.0, 1550.0, 1800.0}) {
    CHECK(index_ordinary(*m, l, t) == doctest::Approx(sellmeier_oracle(ko, l, 0.0)).epsilon(1e-14));
    CHECK(index_extraordinary_principal(*m, l, t) == doctest::Approx(sellmeier_oracle(ke, l, 0.0)).epsilon(1e-14));
  }
  // Published congruent LN values (Zelmon 1997) to 4 decimals.
  CHECK(index_ordinary(*m, 1550.0, t) == doctest::Approx(2.2111).epsilon(5e-5));
  CHECK(index_extraordinary_principal(*m, 775.0, t) == doctest::Approx(2.1784).epsilon(5e-5));
  CHECK(index_ordinary(*m, m->valid_range().min_nm, t) == sellmeier_oracle(ko, 650.0, 0.0));
}

TEST_CASE("angle-resolved index") {
  const auto m = constant_material(2.2, 2.0);
  const double n45 = index_extraordinary_at_angle(m, 1500.0, 300.0, PropagationAngle(45.0));
  CHECK(n45 == doctest::Approx(2.09287).epsilon(1e-5 / 2.09287));
  CHECK(n45 == doctest::Approx(angle_oracle(2.2, 2.0, 45.0)).epsilon(1e-15));
}

TEST_CASE("endpoint identities hold exactly") {
  const auto m = fixtures::material("ln_bpm_waveguide.mat");
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lam(650.0, 1800.0), dt(-100.0, 100.0);
  for (int i = 0; i < 500; ++i) {
    const double l = lam(rng), t = m->reference_temperature() + dt(rng);
    CHECK(index_extraordinary_at_angle(*m, l, t, PropagationAngle(90.0)) == index_extraordinary_principal(*m, l, t));
    CHECK(index_extraordinary_at_angle(*m, l, t, PropagationAngle(0.0)) == index_ordinary(*m, l, t));
  }
}

TEST_CASE("bounded between principal indices and monotone in theta") {
  const auto m = fixtures::material("ln_bpm_waveguide.mat");
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> lam(650.0, 1800.0), dt(-100.0, 100.0), th(0.0, 89.0);
  int failures = 0;
  for (int i = 0; i < 2000; ++i) {
    const double l = lam(rng), t = m->reference_temperature() + dt(rng), a = th(rng);
    const double no = index_ordinary(*m, l, t), ne = index_extraordinary_principal(*m, l, t);
    const double n1 = index_extraordinary_at_angle(*m, l, t, PropagationAngle(a));
    const double n2 = index_extraordinary_at_angle(*m, l, t, PropagationAngle(a + 1.0));
    failures += n1 < std::min(no, ne) || n1 > std::max(no, ne);
    // LN is negative uniaxial: n_e < n_o, so n(θ) decreases.
    failures += !(ne < no) || !(n2 < n1);
  }
  CHECK(failures == 0);
}

TEST_CASE("range and argument errors") {
  const auto m = fixtures::material("congruent_ln_bulk.mat");
  try {
    (void)index_ordinary(*m, 2000.0, 294.15);
    FAIL("expected RangeError");
  } catch (const RangeError& e) {
    CHECK(e.value() == 2000.0);
    CHECK(std::string(e.what()).find("2000") != std::string::npos);
  }
  CHECK_THROWS_AS((void)index_ordinary(*m, 1550.0, 294.15 + 150.0), RangeError);
  CHECK_THROWS_AS(PropagationAngle(-1.0), ArgumentError);
  CHECK_THROWS_AS(PropagationAngle(90.5), ArgumentError);
  std::vector<double> grid{700.0, 1900.0}, out(2);
  CHECK_THROWS_AS(index_batch(*m, Polarization::ordinary, grid, 294.15, out), RangeError);
}

TEST_CASE("material file validation") {
  const std::string head = "name = x\nlambda_min_nm = 1000\nlambda_max_nm = 1600\nt_ref_K = 300\n";
  const std::string e_ok = "[extraordinary]\ntable = 1000:2.2, 1200:2.19, 1400:2.185, 1600:2.18\n";

  SUBCASE("decreasing grid names the field") {
    try {
      parse_material(head + "[ordinary]\ntable = 1000:2.3, 1400:2.27, 1200:2.25, 1600:2.24\n" + e_ok);
      FAIL("expected ValidationError");
    } catch (const ValidationError& v) {
      CHECK(v.field() == "ordinary.table");
    }
  }
  SUBCASE("too few nodes") {
    CHECK_THROWS_AS(parse_material(head + "[ordinary]\ntable = 1000:2.3, 1200:2.27, 1600:2.24\n" + e_ok),
                    ValidationError);
  }
  SUBCASE("table must cover the range") {
    CHECK_THROWS_AS(parse_material(head + "[ordinary]\ntable = 1100:2.3, 1200:2.27, 1400:2.25, 1600:2.24\n" + e_ok),
                    ValidationError);
  }
  SUBCASE("Sellmeier pole inside the range") {
    CHECK_THROWS_AS(parse_material(head + "[ordinary]\nform = sellmeier_um\ncoefficients = 1, 2, 1.44\n" + e_ok),
                    ValidationError);
  }
  SUBCASE("index must stay above one") {
    CHECK_THROWS_AS(parse_material(head + "[ordinary]\nform = poly_inverse_lambda2\ncoefficients = 0.9\n" + e_ok),
                    ValidationError);
  }
  SUBCASE("inverted range") {
    CHECK_THROWS_AS(parse_material("name = x\nlambda_min_nm = 1600\nlambda_max_nm = 1000\nt_ref_K = 300\n"
                                   "[ordinary]\nform = poly_inverse_lambda2\ncoefficients = 2.2\n" +
                                   std::string("[extraordinary]\nform = poly_inverse_lambda2\ncoefficients = 2.1\n")),
                    ValidationError);
  }
  SUBCASE("malformed number carries its line") {
    try {
      parse_material(head + "[ordinary]\nform = poly_inverse_lambda2\ncoefficients = 2.2, oops\n" + e_ok);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 7);
    }
  }
  SUBCASE("unknown key") {
    CHECK_THROWS_AS(parse_material(head + "[ordinary]\nform = poly_inverse_lambda2\ncoefficients = 2.2\nfoo = 1\n" +
                                   e_ok),
                    ParseError);
  }
}

TEST_CASE("loaded model echoes the file and its valid range") {
  const auto m = parse_material(
      "name = sweep\nlambda_min_nm = 1350\nlambda_max_nm = 1750\nt_ref_K = 298.15\n"
      "[ordinary]\nform = sellmeier_um\ncoefficients = 1, 2.6734, 0.01764, 1.2290, 0.05914, 12.614, 474.60\n"
      "dn_dT = 3e-6\n"
      "[extraordinary]\nform = sellmeier_um\ncoefficients = 1, 2.9804, 0.02047, 0.5981, 0.0666, 8.9543, 416.08\n");
  CHECK(m.valid_range().min_nm == 1350.0);
  CHECK(m.valid_range().max_nm == 1750.0);
  CHECK(m.name() == "sweep");
  CHECK(m.ordinary().coefficients() == std::vector<double>{1, 2.6734, 0.01764, 1.2290, 0.05914, 12.614, 474.60});
  CHECK(m.ordinary().dn_dT() == 3e-6);
  CHECK(m.extraordinary().form() == DispersionForm::sellmeier_um);
}

TEST_CASE("missing material file") {
  try {
    load_material("/no/such/material.mat");
    FAIL("expected Error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("/no/such/material.mat") != std::string::npos);
  }
}

TEST_CASE("batch evaluation agrees with pointwise evaluation") {
  const auto m = fixtures::material("ln_bpm_waveguide.mat");
  const auto grid = wavelength_grid(650.0, 1800.0, 0.37);
  std::vector<double> batch(grid.size());
  const double t = 320.0;
  const PropagationAngle a(53.5);
  for (const auto* k : {&simd::scalar_kernels(), simd::avx2_kernels()}) {
    if (!k) continue;
    index_extraordinary_at_angle_batch(*m, grid, t, a, batch, *k);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      worst = std::max(worst, std::abs(batch[i] - index_extraordinary_at_angle(*m, grid[i], t, a)));
    CHECK(worst <= 4e-15);
  }
}
