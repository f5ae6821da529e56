#pragma once
#include <cstdint>
#include <string>

#include "ghostspec/rng.hpp"
#include "ghostspec/spectra.hpp"

namespace ghostspec {

/// Default wavelength window for the broad-absorber simulations:
/// 790-820 nm, 120 uniform bins (0.25 nm spacing). 805 nm is on-grid.
WavelengthGrid default_simulation_grid();

/// Wider flat-reference window for the narrow-dip simulations:
/// 780-830 nm, 200 bins. At 600k reference resources this gives the same
/// average counts per bin as 350k resources on the Gaussian default grid,
/// and it contains a 6 nm dip together with its recovery flanks.
WavelengthGrid wide_flat_grid();

/// Window for the experiment-shaped scenarios: 790-830 nm, 160 bins,
/// covering the 810 nm reference band out to +-4 sigma.
WavelengthGrid experiment_grid();

/// One simulated measurement configuration: a reference shape, a spectral
/// object, resource budgets for the reference and signal arms, and a seed.
struct Scenario {
  SpectralDensity reference;
  TransmissionProfile object;
  std::int64_t n_reference_resources;  ///< N_R
  std::int64_t n_signal_resources;     ///< N_T
  std::uint64_t seed;
  std::string label;  ///< short description for output metadata
};

/// Independent Poisson counts per bin with mean n_resources * p_i, where
/// p_i is the density shape normalized to sum 1 (so n_resources is the
/// expected total). Deterministic given the seed.
BinnedSpectrum sample_poisson_counts(const SpectralDensity& density, std::int64_t n_resources,
                                     std::uint64_t seed);

/// Reference-arm measurement: Poisson counts from the bare reference shape
/// with N_R resources, on a substream derived from the scenario seed.
BinnedSpectrum simulate_reference(const Scenario& scenario);

/// Signal-arm measurement: Poisson counts with per-bin mean
/// N_T * p_i * T(lambda_i). The expected detected total is N_T times the
/// mean transmittance under the reference shape, strictly below N_T when
/// the object absorbs.
BinnedSpectrum simulate_signal(const Scenario& scenario);

/// Expected fraction of signal resources surviving the object:
/// sum_i p_i * T(lambda_i). Multiplied by N_T this is the expected
/// detected-photon total a sweep reports alongside the resource budget.
double expected_detected_fraction(const SpectralDensity& reference,
                                  const TransmissionProfile& object);

/// Broad absorption on a structured reference: Gaussian(805 nm, sigma 4 nm)
/// on the default grid, linear-slope object anchored at the grid start,
/// N_R = 350000. alpha must lie in [0, 0.02] /nm.
Scenario scenario_broad_absorber(double alpha_per_nm, std::int64_t n_signal_resources,
                                 std::uint64_t seed);

/// Narrow absorption on a flat reference: flat shape on the wide window,
/// Gaussian dip of fixed depth 0.2 at the grid center, N_R = 600000.
/// sigma must lie in [0, 10] nm; sigma = 0 is the no-object null.
Scenario scenario_narrow_dip(double sigma_nm, std::int64_t n_signal_resources,
                             std::uint64_t seed);

/// The experiment's first spectral object: 4th-order super-Gaussian
/// bandpass, center 807 nm, FWHM 7.5 nm, against a Gaussian 810 nm band
/// reference on the experiment grid, N_R = 350000.
Scenario scenario_supergaussian_filter(std::int64_t n_signal_resources, std::uint64_t seed);

/// The experiment's second spectral object: a measured transmittance table
/// (nanorod-style shallow slope), against the same 810 nm band reference.
/// The table must cover the experiment grid.
Scenario scenario_tabulated(std::vector<double> table_wavelengths_nm,
                            std::vector<double> table_transmittance,
                            std::int64_t n_signal_resources, std::uint64_t seed);

}  // namespace ghostspec
