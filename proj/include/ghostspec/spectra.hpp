#pragma once
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ghostspec/errors.hpp"

namespace ghostspec {

/// Format a real with 12 significant digits, the normalization used for
/// grid comparison and for all text serialization of reals.
std::string format_real(double value);

/// Ordered wavelength bin centers (nm) defining a spectral axis.
///
/// Strictly increasing, at least 2 bins. Spacing need not be uniform;
/// is_uniform() reports whether it is.
class WavelengthGrid {
 public:
  explicit WavelengthGrid(std::vector<double> bin_centers);

  /// Uniform grid: centers start_nm, start_nm + step_nm, ...
  static WavelengthGrid uniform(double start_nm, double step_nm, std::size_t bins);

  std::size_t size() const { return centers_.size(); }
  double operator[](std::size_t i) const { return centers_[i]; }
  const std::vector<double>& bin_centers() const { return centers_; }
  double front() const { return centers_.front(); }
  double back() const { return centers_.back(); }
  double span() const { return centers_.back() - centers_.front(); }
  double center() const { return 0.5 * (centers_.front() + centers_.back()); }
  bool is_uniform() const { return uniform_; }

  /// True when both grids have the same bin centers after normalization
  /// to 12 significant digits. Spectra from different sources must match
  /// under this test before they may be compared; nothing is resampled.
  bool matches(const WavelengthGrid& other) const;

 private:
  std::vector<double> centers_;
  bool uniform_;
};

/// Non-negative integer photon counts per bin; the unit of measurement data.
class BinnedSpectrum {
 public:
  BinnedSpectrum(WavelengthGrid grid, std::vector<std::int64_t> counts);

  const WavelengthGrid& grid() const { return grid_; }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  std::int64_t total() const { return total_; }
  std::size_t size() const { return counts_.size(); }

 private:
  WavelengthGrid grid_;
  std::vector<std::int64_t> counts_;
  std::int64_t total_;
};

/// Non-negative expected relative intensity per bin; the Poisson means
/// before resource scaling. At least one entry must be positive.
class SpectralDensity {
 public:
  SpectralDensity(WavelengthGrid grid, std::vector<double> intensity);

  const WavelengthGrid& grid() const { return grid_; }
  const std::vector<double>& intensity() const { return intensity_; }
  std::size_t size() const { return intensity_.size(); }
  double total_intensity() const { return total_; }

  /// Shape normalized to sum 1 over the grid.
  std::vector<double> normalized_shape() const;

 private:
  WavelengthGrid grid_;
  std::vector<double> intensity_;
  double total_;
};

/// Spectral object models mapping wavelength to transmittance in [0,1].
namespace profiles {

/// T = clamp(1 - alpha * (lambda - lambda_ref), 0, 1).
struct LinearSlope {
  double alpha_per_nm;
  double lambda_ref_nm;
};

/// T = 1 - depth * exp(-(lambda - center)^2 / (2 sigma^2)).
/// sigma = 0 is the degenerate no-dip case, T == 1 everywhere.
struct GaussianDip {
  double depth;
  double center_nm;
  double sigma_nm;
};

/// Bandpass T = exp(-ln2 * ((lambda - center)^2 * 4 / fwhm^2)^order),
/// so T(center +- fwhm/2) = 1/2 for every order.
struct SuperGaussian {
  double center_nm;
  double fwhm_nm;
  int order;
};

/// Measured transmittance samples, linearly interpolated. Querying outside
/// the tabulated range is an error; no extrapolation.
struct Tabulated {
  std::vector<double> wavelengths_nm;
  std::vector<double> transmittance;
};

/// T == 1 everywhere (no object).
struct Identity {};

}  // namespace profiles

class TransmissionProfile {
 public:
  static TransmissionProfile linear_slope(double alpha_per_nm, double lambda_ref_nm);
  static TransmissionProfile gaussian_dip(double depth, double center_nm, double sigma_nm);
  static TransmissionProfile super_gaussian(double center_nm, double fwhm_nm, int order);
  static TransmissionProfile tabulated(std::vector<double> wavelengths_nm,
                                       std::vector<double> transmittance);
  static TransmissionProfile identity();

  /// Transmittance at a wavelength, always in [0,1].
  double transmittance_at(double lambda_nm) const;

  /// True when the profile can be evaluated at every point of the grid.
  bool covers(const WavelengthGrid& grid) const;

  /// Short human-readable description, used in output metadata.
  std::string describe() const;

 private:
  using Model = std::variant<profiles::LinearSlope, profiles::GaussianDip,
                             profiles::SuperGaussian, profiles::Tabulated, profiles::Identity>;
  explicit TransmissionProfile(Model model) : model_(std::move(model)) {}
  Model model_;
};

/// Free-function form mirroring the member call.
inline double transmittance_at(const TransmissionProfile& profile, double lambda_nm) {
  return profile.transmittance_at(lambda_nm);
}

/// Cumulative fraction of counts per bin; nondecreasing, ends at 1.
class EmpiricalCDF {
 public:
  EmpiricalCDF(WavelengthGrid grid, std::vector<double> values);

  const WavelengthGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

 private:
  WavelengthGrid grid_;
  std::vector<double> values_;
};

/// Gaussian reference shape exp(-(lambda - lambda0)^2 / (2 sigma^2)), peak 1
/// when lambda0 is on the grid.
SpectralDensity make_gaussian_reference(const WavelengthGrid& grid, double lambda0_nm,
                                        double sigma_nm);

/// Flat reference shape, every bin 1.
SpectralDensity make_flat_reference(const WavelengthGrid& grid);

/// Per-bin product density_i * T(lambda_i); never increases any bin.
SpectralDensity apply_transmission(const SpectralDensity& density,
                                   const TransmissionProfile& profile);

/// Empirical CDF of a counted spectrum. Requires total > 0.
EmpiricalCDF empirical_cdf(const BinnedSpectrum& spectrum);

/// Rectangular non-negative count image: rows are the spatial axis,
/// columns the spectral axis.
class CountImage {
 public:
  CountImage(std::size_t rows, std::size_t cols, std::vector<std::int64_t> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::int64_t at(std::size_t row, std::size_t col) const { return data_[row * cols_ + col]; }
  const std::vector<std::int64_t>& data() const { return data_; }

 private:
  std::size_t rows_, cols_;
  std::vector<std::int64_t> data_;
};

/// Half-open spatial row range [begin, end).
struct Roi {
  std::size_t row_begin;
  std::size_t row_end;
};

/// Sum image rows over the ROI, producing a spectrum on the caller's grid.
/// The grid length must equal the image's spectral width.
BinnedSpectrum integrate_roi(const CountImage& image, const Roi& roi, const WavelengthGrid& grid);

}  // namespace ghostspec
