#pragma once

// Temperature-dependent refractive indices of a uniaxial crystal (or of the two
// polarization modes of a waveguide), including the index seen by an
// extraordinary wave propagating at angle θ to the optical axis.
//
// Wavelengths are vacuum wavelengths in nm, temperatures in kelvin. Models are
// immutable once constructed and every evaluation is a pure function.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/math/interpolators/makima.hpp>

#include "bpm/simd/kernels.hpp"

namespace bpm {

enum class Polarization { ordinary, extraordinary };

enum class DispersionForm {
  sellmeier_um,          ///< n² = A + Σ B_j λ²/(λ² − C_j), λ in µm; coefficients A, B1, C1, B2, C2, ...
  poly_inverse_lambda2,  ///< n = c0 + c1/λ² + c2/λ⁴ + ..., λ in nm
  table,                 ///< interpolated (λ nm, n) nodes
};

enum class Interpolation { linear, cubic };

std::string_view to_string(DispersionForm form);
std::string_view to_string(Interpolation interpolation);

/// Angle between propagation direction and optical (z) axis, degrees in [0, 90].
class PropagationAngle {
public:
  /// Throws ArgumentError outside [0, 90] or for non-finite input.
  explicit PropagationAngle(double degrees);

  double degrees() const noexcept { return degrees_; }
  /// sin²θ and cos²θ, exact (1 and 0) at the endpoints.
  double sin2() const noexcept { return sin2_; }
  double cos2() const noexcept { return cos2_; }

private:
  double degrees_;
  double sin2_;
  double cos2_;
};

struct WavelengthRange {
  double min_nm;
  double max_nm;

  bool contains(double lambda_nm) const noexcept { return lambda_nm >= min_nm && lambda_nm <= max_nm; }
};

struct TableNode {
  double lambda_nm;
  double index;
};

/// One polarization branch: closed form or table, plus a constant offset and a
/// linear thermo-optic coefficient. n(λ, T) = n_form(λ) + offset + dn_dT·(T − T_ref).
class IndexBranch {
public:
  static IndexBranch formula(DispersionForm form, std::vector<double> coefficients, double dn_dT,
                             double offset = 0.0);
  static IndexBranch tabulated(std::vector<TableNode> nodes, Interpolation interpolation, double dn_dT,
                               double offset = 0.0);

  DispersionForm form() const noexcept { return form_; }
  const std::vector<double>& coefficients() const noexcept { return coefficients_; }
  const std::vector<TableNode>& nodes() const noexcept { return nodes_; }
  Interpolation interpolation() const noexcept { return interpolation_; }
  double dn_dT() const noexcept { return dn_dT_; }
  double offset() const noexcept { return offset_; }

  /// Unchecked evaluation; `shift` is added on top of the branch offset.
  double evaluate(double lambda_nm, double shift) const;
  void evaluate(std::span<const double> lambda_nm, double shift, std::span<double> out,
                const simd::Kernels& kernels) const;

private:
  IndexBranch() = default;
  double interpolate(double lambda_nm) const;

  DispersionForm form_ = DispersionForm::table;
  std::vector<double> coefficients_;
  std::vector<TableNode> nodes_;
  Interpolation interpolation_ = Interpolation::cubic;
  double dn_dT_ = 0.0;
  double offset_ = 0.0;
  std::optional<boost::math::interpolators::makima<std::vector<double>>> spline_;
};

class MaterialDispersion {
public:
  /// Temperatures are accepted within ±kThermalBandK of the reference.
  static constexpr double kThermalBandK = 100.0;

  /// Validates every invariant; throws ValidationError naming the field.
  MaterialDispersion(std::string name, IndexBranch ordinary, IndexBranch extraordinary, WavelengthRange range,
                     double reference_temperature_K);

  const std::string& name() const noexcept { return name_; }
  const IndexBranch& branch(Polarization p) const noexcept {
    return p == Polarization::ordinary ? ordinary_ : extraordinary_;
  }
  const IndexBranch& ordinary() const noexcept { return ordinary_; }
  const IndexBranch& extraordinary() const noexcept { return extraordinary_; }
  const WavelengthRange& valid_range() const noexcept { return range_; }
  double reference_temperature() const noexcept { return t_ref_; }

  /// Throws RangeError for λ outside valid_range() or T outside the thermal band.
  void check(double lambda_nm, double temperature_K) const;
  void check_temperature(double temperature_K) const;

private:
  std::string name_;
  IndexBranch ordinary_;
  IndexBranch extraordinary_;
  WavelengthRange range_;
  double t_ref_;
};

double index_ordinary(const MaterialDispersion& model, double lambda_nm, double temperature_K);

/// Extraordinary index for propagation perpendicular to the optical axis (θ = 90°).
double index_extraordinary_principal(const MaterialDispersion& model, double lambda_nm, double temperature_K);

/// 1/n² = sin²θ/n_e(90°)² + cos²θ/n_o², both evaluated at (λ, T).
double index_extraordinary_at_angle(const MaterialDispersion& model, double lambda_nm, double temperature_K,
                                    PropagationAngle theta);

// Batch forms over a wavelength grid; every λ is range-checked first.
void index_batch(const MaterialDispersion& model, Polarization polarization, std::span<const double> lambda_nm,
                 double temperature_K, std::span<double> out,
                 const simd::Kernels& kernels = simd::active_kernels());
void index_extraordinary_at_angle_batch(const MaterialDispersion& model, std::span<const double> lambda_nm,
                                        double temperature_K, PropagationAngle theta, std::span<double> out,
                                        const simd::Kernels& kernels = simd::active_kernels());

/// Parses the material-file grammar (see data/materials/README.md).
MaterialDispersion parse_material(std::string_view text);
MaterialDispersion load_material(const std::filesystem::path& path);

}  // namespace bpm
