#include "ghostspec/simulate.hpp"

#include <cmath>

namespace ghostspec {

namespace {

// Substream tags so the reference and signal arms of one scenario never
// share a random stream.
constexpr std::uint64_t kReferenceArm = 0;
constexpr std::uint64_t kSignalArm = 1;

constexpr std::int64_t kBroadReferenceResources = 350000;
constexpr std::int64_t kDipReferenceResources = 600000;

void check_resources(std::int64_t n) {
  if (n < 1) throw invalid_parameter_error("resource count must be >= 1");
}

BinnedSpectrum sample_counts_from_means(const WavelengthGrid& grid,
                                        const std::vector<double>& means, std::uint64_t seed) {
  Philox4x32 rng(seed);
  std::vector<std::int64_t> counts(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) counts[i] = sample_poisson(rng, means[i]);
  return BinnedSpectrum(grid, std::move(counts));
}

}  // namespace

WavelengthGrid default_simulation_grid() { return WavelengthGrid::uniform(790.0, 0.25, 120); }

WavelengthGrid wide_flat_grid() { return WavelengthGrid::uniform(780.0, 0.25, 200); }

WavelengthGrid experiment_grid() { return WavelengthGrid::uniform(790.0, 0.25, 160); }

BinnedSpectrum sample_poisson_counts(const SpectralDensity& density, std::int64_t n_resources,
                                     std::uint64_t seed) {
  check_resources(n_resources);
  std::vector<double> means = density.normalized_shape();
  for (double& m : means) m *= static_cast<double>(n_resources);
  return sample_counts_from_means(density.grid(), means, seed);
}

BinnedSpectrum simulate_reference(const Scenario& scenario) {
  check_resources(scenario.n_reference_resources);
  return sample_poisson_counts(scenario.reference, scenario.n_reference_resources,
                               derive_seed(scenario.seed, kReferenceArm));
}

BinnedSpectrum simulate_signal(const Scenario& scenario) {
  check_resources(scenario.n_signal_resources);
  if (!scenario.object.covers(scenario.reference.grid()))
    throw coverage_error("object profile does not cover the scenario grid");
  std::vector<double> means = scenario.reference.normalized_shape();
  const WavelengthGrid& grid = scenario.reference.grid();
  for (std::size_t i = 0; i < means.size(); ++i)
    means[i] *= static_cast<double>(scenario.n_signal_resources) *
                scenario.object.transmittance_at(grid[i]);
  return sample_counts_from_means(grid, means, derive_seed(scenario.seed, kSignalArm));
}

double expected_detected_fraction(const SpectralDensity& reference,
                                  const TransmissionProfile& object) {
  const std::vector<double> shape = reference.normalized_shape();
  double fraction = 0.0;
  for (std::size_t i = 0; i < shape.size(); ++i)
    fraction += shape[i] * object.transmittance_at(reference.grid()[i]);
  return fraction;
}

Scenario scenario_broad_absorber(double alpha_per_nm, std::int64_t n_signal_resources,
                                 std::uint64_t seed) {
  if (!(alpha_per_nm >= 0.0 && alpha_per_nm <= 0.02))
    throw invalid_parameter_error("broad-absorber alpha must lie in [0, 0.02] /nm, got " +
                                  format_real(alpha_per_nm));
  check_resources(n_signal_resources);
  WavelengthGrid grid = default_simulation_grid();
  const double anchor = grid.front();
  return Scenario{make_gaussian_reference(grid, 805.0, 4.0),
                  TransmissionProfile::linear_slope(alpha_per_nm, anchor),
                  kBroadReferenceResources,
                  n_signal_resources,
                  seed,
                  "broad-absorber alpha=" + format_real(alpha_per_nm)};
}

Scenario scenario_narrow_dip(double sigma_nm, std::int64_t n_signal_resources,
                             std::uint64_t seed) {
  if (!(sigma_nm >= 0.0 && sigma_nm <= 10.0))
    throw invalid_parameter_error("narrow-dip sigma must lie in [0, 10] nm, got " +
                                  format_real(sigma_nm));
  check_resources(n_signal_resources);
  WavelengthGrid grid = wide_flat_grid();
  const double center = grid.center();
  return Scenario{make_flat_reference(grid),
                  TransmissionProfile::gaussian_dip(0.2, center, sigma_nm),
                  kDipReferenceResources,
                  n_signal_resources,
                  seed,
                  "narrow-dip sigma=" + format_real(sigma_nm)};
}

Scenario scenario_supergaussian_filter(std::int64_t n_signal_resources, std::uint64_t seed) {
  check_resources(n_signal_resources);
  WavelengthGrid grid = experiment_grid();
  return Scenario{make_gaussian_reference(grid, 810.0, 5.0),
                  TransmissionProfile::super_gaussian(807.0, 7.5, 4),
                  kBroadReferenceResources,
                  n_signal_resources,
                  seed,
                  "supergaussian-filter"};
}

Scenario scenario_tabulated(std::vector<double> table_wavelengths_nm,
                            std::vector<double> table_transmittance,
                            std::int64_t n_signal_resources, std::uint64_t seed) {
  check_resources(n_signal_resources);
  WavelengthGrid grid = experiment_grid();
  TransmissionProfile object =
      TransmissionProfile::tabulated(std::move(table_wavelengths_nm), std::move(table_transmittance));
  if (!object.covers(grid))
    throw coverage_error("tabulated object does not cover the experiment grid " +
                         format_real(grid.front()) + "-" + format_real(grid.back()) + " nm");
  return Scenario{make_gaussian_reference(grid, 810.0, 5.0),
                  object,
                  kBroadReferenceResources,
                  n_signal_resources,
                  seed,
                  "tabulated-object"};
}

}  // namespace ghostspec
