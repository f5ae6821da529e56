#pragma once
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ghostspec/harness.hpp"
#include "ghostspec/simulate.hpp"
#include "ghostspec/spectra.hpp"

namespace ghostspec::io {

/// All text formats begin with a versioned schema line, `# <kind> v<N>`,
/// followed by `# key: value` metadata lines, then data rows. Reals are
/// written with 12 significant digits and integers verbatim, so every
/// writer/reader pair round-trips integers bit-for-bit and reals to 12
/// significant digits. Writers are atomic: content goes to a temporary
/// sibling file which is renamed into place.
inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kSpectrumKind = "ghostspec-spectrum";
inline constexpr std::string_view kImageKind = "ghostspec-image";
inline constexpr std::string_view kSweepKind = "ghostspec-sweep";
inline constexpr std::string_view kBatchKind = "ghostspec-batch";
inline constexpr std::string_view kTableKind = "ghostspec-table";
inline constexpr std::string_view kScenarioKind = "ghostspec-scenario";

using Metadata = std::map<std::string, std::string>;

/// Two-column wavelength/count spectrum file.
BinnedSpectrum load_spectrum(const std::filesystem::path& path, Metadata* metadata = nullptr);
void save_spectrum(const BinnedSpectrum& spectrum, const std::filesystem::path& path,
                   const Metadata& metadata = {});

struct LoadedImage {
  CountImage image;
  WavelengthGrid grid;
};

/// Rectangular count image with a wavelength calibration block
/// (wavelength-start, wavelength-step metadata keys).
LoadedImage load_count_image(const std::filesystem::path& path);
void save_count_image(const CountImage& image, double wavelength_start_nm,
                      double wavelength_step_nm, const std::filesystem::path& path,
                      const Metadata& metadata = {});

/// Sweep table: one CSV row per cell with the rejection rates and p-value
/// box statistics, plus seed/RNG/trial-count/grid metadata.
void write_sweep(const SweepResult& result, const std::filesystem::path& path);
SweepResult read_sweep(const std::filesystem::path& path);

/// Batch table: one CSV row per trial (p-value, statistic, detected total).
void write_batch(const TrialBatch& batch, std::uint64_t seed,
                 const std::filesystem::path& path);
TrialBatch read_batch(const std::filesystem::path& path, Metadata* metadata = nullptr);

/// Archival single-document form of a batch (JSON): scenario descriptor,
/// seed, RNG name, and all per-trial results in one file.
void write_batch_archive(const TrialBatch& batch, std::uint64_t seed,
                         const std::filesystem::path& path);

/// Two-column wavelength/transmittance table for tabulated objects.
void load_transmittance_table(const std::filesystem::path& path,
                              std::vector<double>& wavelengths_nm,
                              std::vector<double>& transmittance);
void save_transmittance_table(const std::vector<double>& wavelengths_nm,
                              const std::vector<double>& transmittance,
                              const std::filesystem::path& path);

/// Human-readable scenario description, `key: value` per line.
/// Keys: family (broad | dip | supergaussian | tabulated), alpha, sigma,
/// nt, nr (optional override of the family default), seed, table (path to
/// a transmittance table, tabulated family only).
struct ScenarioConfig {
  std::string family;
  double alpha = 0.0;
  double sigma = 0.0;
  std::int64_t n_t = 0;
  std::optional<std::int64_t> n_r;
  std::uint64_t seed = 0;
  std::string table_path;
};

ScenarioConfig load_scenario_config(const std::filesystem::path& path);
void save_scenario_config(const ScenarioConfig& config, const std::filesystem::path& path);

/// Build the scenario a config describes. Relative table paths resolve
/// against the config file's own directory when base_dir is given.
Scenario make_scenario(const ScenarioConfig& config,
                       const std::filesystem::path& base_dir = {});

}  // namespace ghostspec::io
