#include "bpm/cli/config.hpp"

#include <cstdlib>
#include <memory>

#include <fmt/core.h>

#include "bpm/error.hpp"
#include "bpm/io.hpp"
#include "bpm/keyvalue.hpp"

namespace bpm::cli {

namespace fs = std::filesystem;

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

fs::path resolve_material(const std::string& name, const fs::path& base_dir) {
  const fs::path p(name);
  std::vector<fs::path> tried;
  if (p.is_absolute()) {
    tried.push_back(p);
  } else {
    tried.push_back(base_dir / p);
    if (const char* env = std::getenv("BPM_SPDC_MATERIAL_DIR"))
      for (auto dir : kv::split(env, ':'))
        if (!dir.empty()) tried.push_back(fs::path(std::string(dir)) / p);
  }
  for (const auto& candidate : tried)
    if (fs::is_regular_file(candidate)) return candidate;
  std::string where;
  for (const auto& t : tried) where += (where.empty() ? "" : ", ") + t.string();
  throw Error(fmt::format("material file '{}' not found (looked in: {})", name, where));
}

RunConfig parse_config(std::string_view text, const fs::path& base_dir) {
  const auto doc = kv::Document::parse(text);
  doc.expect_sections({"", "waveguide", "source", "analysis", "output"});
  RunConfig c;
  c.hash = fnv1a64(text);

  const auto& root = doc.root();
  root.expect_only({"material_path"});
  c.material_path = resolve_material(root.text("material_path"), base_dir);
  c.waveguide.material = std::make_shared<const MaterialDispersion>(load_material(c.material_path));

  const auto& wg = doc.section_or_empty("waveguide");
  wg.expect_only({"theta_deg", "length_mm", "temperature_K", "top_width_um", "etch_depth_um", "film_thickness_um",
                  "sidewall_angle_deg"});
  if (auto theta = wg.number_or("theta_deg")) {
    c.waveguide.theta = PropagationAngle(*theta);
    c.theta_given = true;
  }
  c.waveguide.length_mm = wg.number_or("length_mm").value_or(c.waveguide.length_mm);
  c.waveguide.temperature_K =
      wg.number_or("temperature_K").value_or(c.waveguide.material->reference_temperature());
  auto& g = c.waveguide.geometry;
  g.top_width_um = wg.number_or("top_width_um").value_or(g.top_width_um);
  g.etch_depth_um = wg.number_or("etch_depth_um").value_or(g.etch_depth_um);
  g.film_thickness_um = wg.number_or("film_thickness_um").value_or(g.film_thickness_um);
  g.sidewall_angle_deg = wg.number_or("sidewall_angle_deg").value_or(g.sidewall_angle_deg);

  const auto& src = doc.section_or_empty("source");
  src.expect_only({"brightness_Hz_per_mW", "pump_mW", "pair_rate_Hz", "loss_on_chip_dB", "loss_off_chip_signal_dB",
                   "loss_off_chip_idler_dB", "eta_d", "eta_d_s", "eta_d_i1", "eta_d_i2", "jitter_s", "dark_rate_Hz",
                   "dead_time_s", "tau_s", "duration_s", "seed", "splitter_ratio", "pair_splitter_ratio",
                   "max_events", "threads"});
  SourceModel& m = c.source;
  c.brightness_Hz_per_mW = src.number_or("brightness_Hz_per_mW").value_or(c.brightness_Hz_per_mW);
  c.pump_mW = src.number_or("pump_mW");
  if (auto rate = src.number_or("pair_rate_Hz"))
    m.pair_rate_Hz = *rate;
  else
    m.pair_rate_Hz = SourceModel::pair_rate_from_pump(c.brightness_Hz_per_mW, c.pump_mW.value_or(1.0));
  m.loss.on_chip_dB = src.number_or("loss_on_chip_dB").value_or(m.loss.on_chip_dB);
  m.loss.off_chip_signal_dB = src.number_or("loss_off_chip_signal_dB").value_or(m.loss.off_chip_signal_dB);
  m.loss.off_chip_idler_dB = src.number_or("loss_off_chip_idler_dB").value_or(m.loss.off_chip_idler_dB);
  const double eta = src.number_or("eta_d").value_or(1.0);
  m.loss.eta_d = {src.number_or("eta_d_s").value_or(eta), src.number_or("eta_d_i1").value_or(eta),
                  src.number_or("eta_d_i2").value_or(eta)};
  if (auto j = src.number_or("jitter_s")) m.jitter_sigma_s.fill(*j);
  if (auto d = src.number_or("dark_rate_Hz")) m.dark_rate_Hz.fill(*d);
  if (auto d = src.number_or("dead_time_s")) m.dead_time_s.fill(*d);
  m.window_s = src.number_or("tau_s").value_or(m.window_s);
  m.duration_s = src.number_or("duration_s").value_or(m.duration_s);
  m.seed = src.integer_or("seed").value_or(m.seed);
  m.splitter_ratio = src.number_or("splitter_ratio").value_or(m.splitter_ratio);
  m.pair_splitter_ratio = src.number_or("pair_splitter_ratio").value_or(m.pair_splitter_ratio);
  m.max_events = src.integer_or("max_events").value_or(m.max_events);
  c.threads = static_cast<unsigned>(src.integer_or("threads").value_or(1));
  try {
    m.validate();
  } catch (const ArgumentError& e) {
    throw ValidationError("source", e.what());
  }

  const auto& an = doc.section_or_empty("analysis");
  an.expect_only({"histogram_span_s", "histogram_bin_s", "baseline_exclusion_s"});
  c.analysis.window_s = m.window_s;
  c.analysis.histogram_span_s = an.number_or("histogram_span_s").value_or(100.0 * m.window_s);
  c.analysis.histogram_bin_s = an.number_or("histogram_bin_s").value_or(0.0);
  c.analysis.baseline.exclusion_half_width_s = an.number_or("baseline_exclusion_s").value_or(0.0);

  const auto& out = doc.section_or_empty("output");
  out.expect_only({"dir"});
  if (auto dir = out.text_or("dir")) {
    const fs::path d(*dir);
    c.output_dir = d.is_absolute() ? d : base_dir / d;
  }
  return c;
}

RunConfig load_config(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return parse_config(text, path.parent_path().empty() ? fs::path(".") : path.parent_path());
  } catch (const ParseError& e) {
    throw e.prefixed(path.string());
  } catch (const ValidationError& e) {
    throw ValidationError(e.field(), path.string() + ": " + e.reason());
  }
}

}  // namespace bpm::cli
