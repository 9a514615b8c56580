#pragma once

// Run configuration: the sectioned key-value grammar of material files, with
// units in key suffixes.
//
//   material_path = ln_bpm_waveguide.mat
//   [waveguide]   theta_deg, length_mm, temperature_K, top_width_um, etch_depth_um,
//                 film_thickness_um, sidewall_angle_deg
//   [source]      brightness_Hz_per_mW, pump_mW, pair_rate_Hz, loss_on_chip_dB,
//                 loss_off_chip_signal_dB, loss_off_chip_idler_dB, eta_d, eta_d_s,
//                 eta_d_i1, eta_d_i2, jitter_s, dark_rate_Hz, dead_time_s, tau_s,
//                 duration_s, seed, splitter_ratio, pair_splitter_ratio, max_events, threads
//   [analysis]    histogram_span_s, histogram_bin_s, baseline_exclusion_s
//   [output]      dir
//
// Relative material paths resolve against the config file's directory, then
// against each entry of BPM_SPDC_MATERIAL_DIR (':'-separated).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "bpm/montecarlo.hpp"
#include "bpm/phasematch.hpp"
#include "bpm/photonstats.hpp"

namespace bpm::cli {

struct RunConfig {
  std::filesystem::path material_path;
  WaveguideConfig waveguide;
  bool theta_given = false;
  SourceModel source;
  double brightness_Hz_per_mW = 2.2e6;
  std::optional<double> pump_mW;
  unsigned threads = 1;
  AnalysisOptions analysis;
  std::filesystem::path output_dir = ".";
  std::uint64_t hash = 0;  ///< FNV-1a of the config text
};

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Finds a material file; throws bpm::Error naming the file and the places searched.
std::filesystem::path resolve_material(const std::string& name, const std::filesystem::path& base_dir);

/// `base_dir` anchors relative paths. Throws ParseError / ValidationError.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace bpm::cli
