#pragma once

// Subcommand implementations behind the bpm-spdc executable. Each returns a
// process exit code and writes its CSV artifacts atomically into the output
// directory; human-readable summaries go to `out`.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "bpm/cli/config.hpp"

namespace bpm::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNoSolution = 2, kExitResource = 3 };

/// `# bpm-spdc <version> config_hash=<16 hex digits> seed=<n>`
std::string csv_comment(std::uint64_t config_hash, std::uint64_t seed);

enum class PmMode { wavelength, angle };

struct PmSolveOptions {
  PmMode mode = PmMode::wavelength;
  std::optional<double> theta_deg;
  std::optional<double> lambda_p_nm;
  std::optional<double> temperature_K;
};

struct ShgOptions {
  std::optional<double> lambda_min_nm;
  std::optional<double> lambda_max_nm;
  double step_nm = 0.005;
  std::optional<double> theta_deg;
  std::optional<double> temperature_K;
  std::optional<double> length_mm;
};

struct SimulateOptions {
  std::optional<std::uint64_t> seed;
  std::optional<double> duration_s;
  std::optional<double> tau_ns;
};

struct AnalyzeOptions {
  std::filesystem::path tag_file;
  std::optional<double> tau_ns;
};

int cmd_pm_solve(const RunConfig& config, const PmSolveOptions& options, std::ostream& out);
int cmd_shg(const RunConfig& config, const ShgOptions& options, std::ostream& out);
int cmd_simulate(const RunConfig& config, const SimulateOptions& options, std::ostream& out);
/// Without a config file, detector efficiencies default to 1 and no pump power is known.
int cmd_analyze(const std::optional<RunConfig>& config, const std::filesystem::path& output_dir,
                const AnalyzeOptions& options, std::ostream& out);

/// Runs `body`, mapping library errors to exit codes with a message on `err`:
/// NoCrossing / MultipleRoots → 2, ResourceError → 3, anything else → 1.
int run_guarded(const std::function<int()>& body, std::ostream& err);

/// CSV bodies, exposed for tests.
std::string metrics_csv(const SpdcMetrics& metrics, const CountRates& rates, const std::string& comment);
std::string histogram_csv(const CoincidenceHistogram& histogram, const std::string& comment);

}  // namespace bpm::cli
