#include "bpm/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "bpm/error.hpp"
#include "bpm/keyvalue.hpp"
#include "bpm/simd/scalar_math.hpp"

namespace bpm {

std::string_view to_string(DispersionForm form) {
  switch (form) {
    case DispersionForm::sellmeier_um: return "sellmeier_um";
    case DispersionForm::poly_inverse_lambda2: return "poly_inverse_lambda2";
    case DispersionForm::table: return "table";
  }
  return "?";
}

std::string_view to_string(Interpolation interpolation) {
  return interpolation == Interpolation::linear ? "linear" : "cubic";
}

PropagationAngle::PropagationAngle(double degrees) : degrees_(degrees) {
  if (!std::isfinite(degrees) || degrees < 0.0 || degrees > 90.0)
    throw ArgumentError(fmt::format("propagation angle {} deg outside [0, 90]", degrees));
  if (degrees == 90.0) {
    sin2_ = 1.0;
    cos2_ = 0.0;
  } else if (degrees == 0.0) {
    sin2_ = 0.0;
    cos2_ = 1.0;
  } else {
    const double rad = degrees * std::numbers::pi / 180.0;
    const double s = std::sin(rad);
    const double c = std::cos(rad);
    sin2_ = s * s;
    cos2_ = c * c;
  }
}

// ---------------------------------------------------------------------------
// IndexBranch

IndexBranch IndexBranch::formula(DispersionForm form, std::vector<double> coefficients, double dn_dT, double offset) {
  if (form == DispersionForm::table) throw ArgumentError("use IndexBranch::tabulated for tables");
  if (coefficients.empty()) throw ValidationError("coefficients", "at least one coefficient is required");
  if (form == DispersionForm::sellmeier_um && coefficients.size() % 2 == 0)
    throw ValidationError("coefficients", "sellmeier_um expects A followed by (B, C) pairs");
  for (double c : coefficients)
    if (!std::isfinite(c)) throw ValidationError("coefficients", "non-finite coefficient");
  if (!std::isfinite(dn_dT)) throw ValidationError("dn_dT", "must be finite");
  if (!std::isfinite(offset)) throw ValidationError("offset", "must be finite");
  IndexBranch b;
  b.form_ = form;
  b.coefficients_ = std::move(coefficients);
  b.dn_dT_ = dn_dT;
  b.offset_ = offset;
  return b;
}

IndexBranch IndexBranch::tabulated(std::vector<TableNode> nodes, Interpolation interpolation, double dn_dT,
                                   double offset) {
  if (nodes.size() < 4) throw ValidationError("table", "at least 4 nodes are required");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!std::isfinite(nodes[i].lambda_nm) || !std::isfinite(nodes[i].index))
      throw ValidationError("table", fmt::format("non-finite node {}", i));
    if (i > 0 && !(nodes[i].lambda_nm > nodes[i - 1].lambda_nm))
      throw ValidationError("table", fmt::format("wavelength grid not strictly increasing at {} nm",
                                                 nodes[i].lambda_nm));
  }
  if (!std::isfinite(dn_dT)) throw ValidationError("dn_dT", "must be finite");
  if (!std::isfinite(offset)) throw ValidationError("offset", "must be finite");
  IndexBranch b;
  b.form_ = DispersionForm::table;
  b.nodes_ = std::move(nodes);
  b.interpolation_ = interpolation;
  b.dn_dT_ = dn_dT;
  b.offset_ = offset;
  if (interpolation == Interpolation::cubic) {
    std::vector<double> x, y;
    x.reserve(b.nodes_.size());
    y.reserve(b.nodes_.size());
    for (const auto& n : b.nodes_) {
      x.push_back(n.lambda_nm);
      y.push_back(n.index);
    }
    b.spline_.emplace(std::move(x), std::move(y));
  }
  return b;
}

double IndexBranch::interpolate(double lambda_nm) const {
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), lambda_nm,
                                   [](const TableNode& n, double l) { return n.lambda_nm < l; });
  // Grid nodes return their tabulated value exactly.
  if (it != nodes_.end() && it->lambda_nm == lambda_nm) return it->index;
  if (spline_) return (*spline_)(lambda_nm);
  if (it == nodes_.begin()) return it->index;
  if (it == nodes_.end()) return nodes_.back().index;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double t = (lambda_nm - lo.lambda_nm) / (hi.lambda_nm - lo.lambda_nm);
  return lo.index + t * (hi.index - lo.index);
}

double IndexBranch::evaluate(double lambda_nm, double shift) const {
  const double total_shift = offset_ + shift;
  switch (form_) {
    case DispersionForm::sellmeier_um: return simd::sellmeier_point(lambda_nm, coefficients_, total_shift);
    case DispersionForm::poly_inverse_lambda2: return simd::cauchy_point(lambda_nm, coefficients_, total_shift);
    case DispersionForm::table: break;
  }
  return interpolate(lambda_nm) + total_shift;
}

void IndexBranch::evaluate(std::span<const double> lambda_nm, double shift, std::span<double> out,
                           const simd::Kernels& kernels) const {
  const double total_shift = offset_ + shift;
  switch (form_) {
    case DispersionForm::sellmeier_um: kernels.sellmeier(lambda_nm, coefficients_, total_shift, out); return;
    case DispersionForm::poly_inverse_lambda2: kernels.cauchy(lambda_nm, coefficients_, total_shift, out); return;
    case DispersionForm::table: break;
  }
  for (std::size_t i = 0; i < lambda_nm.size(); ++i) out[i] = interpolate(lambda_nm[i]) + total_shift;
}

// ---------------------------------------------------------------------------
// MaterialDispersion

namespace {

void validate_branch(const IndexBranch& branch, const WavelengthRange& range, double t_ref, std::string_view label) {
  const std::string field(label);
  if (branch.form() == DispersionForm::sellmeier_um) {
    const double l2_min = std::pow(range.min_nm * 1e-3, 2);
    const double l2_max = std::pow(range.max_nm * 1e-3, 2);
    const auto& c = branch.coefficients();
    for (std::size_t j = 2; j < c.size(); j += 2) {
      if (c[j] >= l2_min && c[j] <= l2_max)
        throw ValidationError(field + ".coefficients",
                              fmt::format("Sellmeier pole C={} um^2 lies inside the valid wavelength range", c[j]));
    }
  }
  if (branch.form() == DispersionForm::table) {
    const auto& nodes = branch.nodes();
    if (nodes.front().lambda_nm > range.min_nm || nodes.back().lambda_nm < range.max_nm)
      throw ValidationError(field + ".table", fmt::format("table spans [{}, {}] nm but the valid range is [{}, {}] nm",
                                                          nodes.front().lambda_nm, nodes.back().lambda_nm,
                                                          range.min_nm, range.max_nm));
  }
  constexpr int kProbe = 257;
  for (double dT : {-MaterialDispersion::kThermalBandK, 0.0, MaterialDispersion::kThermalBandK}) {
    const double shift = branch.dn_dT() * dT;
    for (int k = 0; k < kProbe; ++k) {
      const double l = range.min_nm + (range.max_nm - range.min_nm) * k / (kProbe - 1);
      const double n = branch.evaluate(l, shift);
      if (!std::isfinite(n) || n <= 1.0)
        throw ValidationError(field, fmt::format("index {} at {} nm, T = {} K is not a finite value above 1", n, l,
                                                 t_ref + dT));
    }
  }
}

double thermal_shift(const IndexBranch& b, const MaterialDispersion& m, double temperature_K) {
  return b.dn_dT() * (temperature_K - m.reference_temperature());
}

}  // namespace

MaterialDispersion::MaterialDispersion(std::string name, IndexBranch ordinary, IndexBranch extraordinary,
                                       WavelengthRange range, double reference_temperature_K)
    : name_(std::move(name)),
      ordinary_(std::move(ordinary)),
      extraordinary_(std::move(extraordinary)),
      range_(range),
      t_ref_(reference_temperature_K) {
  if (!(range_.min_nm > 0.0) || !std::isfinite(range_.max_nm))
    throw ValidationError("lambda_min_nm", "wavelength bounds must be positive and finite");
  if (!(range_.min_nm < range_.max_nm)) throw ValidationError("lambda_max_nm", "must exceed lambda_min_nm");
  if (!(t_ref_ > 0.0) || !std::isfinite(t_ref_)) throw ValidationError("t_ref_K", "must be a positive temperature");
  validate_branch(ordinary_, range_, t_ref_, "ordinary");
  validate_branch(extraordinary_, range_, t_ref_, "extraordinary");
}

void MaterialDispersion::check_temperature(double temperature_K) const {
  if (!std::isfinite(temperature_K) || std::abs(temperature_K - t_ref_) > kThermalBandK)
    throw RangeError(fmt::format("temperature {} K outside the validated band {} +/- {} K of material '{}'",
                                 temperature_K, t_ref_, kThermalBandK, name_),
                     temperature_K);
}

void MaterialDispersion::check(double lambda_nm, double temperature_K) const {
  if (!range_.contains(lambda_nm))
    throw RangeError(fmt::format("wavelength {} nm outside valid range [{}, {}] nm of material '{}'", lambda_nm,
                                 range_.min_nm, range_.max_nm, name_),
                     lambda_nm);
  check_temperature(temperature_K);
}

double index_ordinary(const MaterialDispersion& model, double lambda_nm, double temperature_K) {
  model.check(lambda_nm, temperature_K);
  const auto& b = model.ordinary();
  return b.evaluate(lambda_nm, thermal_shift(b, model, temperature_K));
}

double index_extraordinary_principal(const MaterialDispersion& model, double lambda_nm, double temperature_K) {
  model.check(lambda_nm, temperature_K);
  const auto& b = model.extraordinary();
  return b.evaluate(lambda_nm, thermal_shift(b, model, temperature_K));
}

double index_extraordinary_at_angle(const MaterialDispersion& model, double lambda_nm, double temperature_K,
                                    PropagationAngle theta) {
  const double n_e = index_extraordinary_principal(model, lambda_nm, temperature_K);
  const double n_o = index_ordinary(model, lambda_nm, temperature_K);
  return simd::angle_mix_point(n_o, n_e, theta.sin2(), theta.cos2());
}

void index_batch(const MaterialDispersion& model, Polarization polarization, std::span<const double> lambda_nm,
                 double temperature_K, std::span<double> out, const simd::Kernels& kernels) {
  if (out.size() != lambda_nm.size()) throw ArgumentError("index_batch: output size mismatch");
  for (double l : lambda_nm) model.check(l, temperature_K);
  const auto& b = model.branch(polarization);
  b.evaluate(lambda_nm, thermal_shift(b, model, temperature_K), out, kernels);
}

void index_extraordinary_at_angle_batch(const MaterialDispersion& model, std::span<const double> lambda_nm,
                                        double temperature_K, PropagationAngle theta, std::span<double> out,
                                        const simd::Kernels& kernels) {
  if (out.size() != lambda_nm.size()) throw ArgumentError("index_extraordinary_at_angle_batch: output size mismatch");
  std::vector<double> n_o(lambda_nm.size());
  index_batch(model, Polarization::ordinary, lambda_nm, temperature_K, n_o, kernels);
  index_batch(model, Polarization::extraordinary, lambda_nm, temperature_K, out, kernels);
  kernels.angle_mix(n_o, out, theta.sin2(), theta.cos2(), out);
}

// ---------------------------------------------------------------------------
// Material files

namespace {

IndexBranch parse_branch(const kv::Section& s) {
  s.expect_only({"form", "coefficients", "dn_dT", "offset", "table", "interpolation"});
  const double dn_dT = s.number_or("dn_dT").value_or(0.0);
  const double offset = s.number_or("offset").value_or(0.0);
  const std::string form = s.text_or("form").value_or(s.has("table") ? "table" : "");

  if (form == "table") {
    if (s.has("coefficients"))
      throw ParseError(fmt::format("[{}] has both a table and coefficients", s.name()), s.find("coefficients")->line);
    const kv::Entry* e = s.find("table");
    if (!e) throw ValidationError(s.name() + ".table", "form = table requires a table key");
    std::vector<TableNode> nodes;
    for (auto pair : kv::split(e->value, ',')) {
      const auto colon = pair.find(':');
      const auto l = colon == std::string_view::npos ? std::nullopt : kv::parse_number(pair.substr(0, colon));
      const auto n = colon == std::string_view::npos ? std::nullopt : kv::parse_number(pair.substr(colon + 1));
      if (!l || !n) throw ParseError(fmt::format("[{}] table entry '{}' is not lambda:n", s.name(), pair), e->line);
      nodes.push_back({*l, *n});
    }
    Interpolation interp = Interpolation::cubic;
    if (auto mode = s.text_or("interpolation")) {
      if (*mode == "linear")
        interp = Interpolation::linear;
      else if (*mode != "cubic")
        throw ParseError(fmt::format("[{}] interpolation must be linear or cubic", s.name()),
                         s.find("interpolation")->line);
    }
    try {
      return IndexBranch::tabulated(std::move(nodes), interp, dn_dT, offset);
    } catch (const ValidationError& v) {
      throw ValidationError(s.name() + "." + v.field(), v.reason());
    }
  }

  if (form.empty()) throw ValidationError(s.name() + ".form", "required key is missing");
  if (s.has("table"))
    throw ParseError(fmt::format("[{}] table given with form = {}", s.name(), form), s.find("table")->line);
  DispersionForm f;
  if (form == "sellmeier_um")
    f = DispersionForm::sellmeier_um;
  else if (form == "poly_inverse_lambda2")
    f = DispersionForm::poly_inverse_lambda2;
  else
    throw ParseError(fmt::format("[{}] unknown form '{}'", s.name(), form), s.find("form")->line);
  try {
    return IndexBranch::formula(f, s.numbers("coefficients"), dn_dT, offset);
  } catch (const ValidationError& v) {
    throw ValidationError(s.name() + "." + v.field(), v.reason());
  }
}

MaterialDispersion from_document(const kv::Document& doc) {
  doc.expect_sections({"ordinary", "extraordinary"});
  const auto& root = doc.root();
  root.expect_only({"name", "lambda_min_nm", "lambda_max_nm", "t_ref_K"});
  const kv::Section* o = doc.section("ordinary");
  const kv::Section* e = doc.section("extraordinary");
  if (!o) throw ValidationError("ordinary", "section is missing");
  if (!e) throw ValidationError("extraordinary", "section is missing");
  return MaterialDispersion(root.text("name"), parse_branch(*o), parse_branch(*e),
                            WavelengthRange{root.number("lambda_min_nm"), root.number("lambda_max_nm")},
                            root.number("t_ref_K"));
}

}  // namespace

MaterialDispersion parse_material(std::string_view text) { return from_document(kv::Document::parse(text)); }

MaterialDispersion load_material(const std::filesystem::path& path) {
  const auto doc = kv::Document::load(path);
  try {
    return from_document(doc);
  } catch (const ParseError& e) {
    throw e.prefixed(path.string());
  } catch (const ValidationError& v) {
    throw ValidationError(v.field(), fmt::format("{} (in {})", v.reason(), path.string()));
  }
}

}  // namespace bpm
