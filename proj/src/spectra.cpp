#include "ghostspec/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace ghostspec {

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

namespace {

bool spacing_is_uniform(const std::vector<double>& centers) {
  const double first = centers[1] - centers[0];
  for (std::size_t i = 2; i < centers.size(); ++i) {
    const double step = centers[i] - centers[i - 1];
    if (std::abs(step - first) > 1e-9 * std::max(1.0, std::abs(first))) return false;
  }
  return true;
}

}  // namespace

WavelengthGrid::WavelengthGrid(std::vector<double> bin_centers) : centers_(std::move(bin_centers)) {
  if (centers_.size() < 2)
    throw invalid_parameter_error("wavelength grid needs at least 2 bins, got " +
                                  std::to_string(centers_.size()));
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    if (!std::isfinite(centers_[i]))
      throw invalid_parameter_error("wavelength grid contains a non-finite value at bin " +
                                    std::to_string(i));
    if (i > 0 && centers_[i] <= centers_[i - 1])
      throw invalid_parameter_error("wavelength grid must be strictly increasing; violated at bin " +
                                    std::to_string(i));
  }
  uniform_ = spacing_is_uniform(centers_);
}

WavelengthGrid WavelengthGrid::uniform(double start_nm, double step_nm, std::size_t bins) {
  if (step_nm <= 0) throw invalid_parameter_error("grid step must be positive");
  std::vector<double> centers(bins);
  for (std::size_t i = 0; i < bins; ++i) centers[i] = start_nm + step_nm * static_cast<double>(i);
  return WavelengthGrid(std::move(centers));
}

bool WavelengthGrid::matches(const WavelengthGrid& other) const {
  if (centers_.size() != other.centers_.size()) return false;
  for (std::size_t i = 0; i < centers_.size(); ++i)
    if (centers_[i] != other.centers_[i] &&
        format_real(centers_[i]) != format_real(other.centers_[i]))
      return false;
  return true;
}

BinnedSpectrum::BinnedSpectrum(WavelengthGrid grid, std::vector<std::int64_t> counts)
    : grid_(std::move(grid)), counts_(std::move(counts)) {
  if (counts_.size() != grid_.size())
    throw invalid_parameter_error("counts length " + std::to_string(counts_.size()) +
                                  " does not match grid length " + std::to_string(grid_.size()));
  total_ = 0;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (counts_[i] < 0)
      throw invalid_parameter_error("negative count at bin " + std::to_string(i));
    total_ += counts_[i];
  }
}

SpectralDensity::SpectralDensity(WavelengthGrid grid, std::vector<double> intensity)
    : grid_(std::move(grid)), intensity_(std::move(intensity)) {
  if (intensity_.size() != grid_.size())
    throw invalid_parameter_error("intensity length " + std::to_string(intensity_.size()) +
                                  " does not match grid length " + std::to_string(grid_.size()));
  total_ = 0.0;
  for (std::size_t i = 0; i < intensity_.size(); ++i) {
    if (!(intensity_[i] >= 0) || !std::isfinite(intensity_[i]))
      throw invalid_parameter_error("intensity must be finite and >= 0 at bin " + std::to_string(i));
    total_ += intensity_[i];
  }
  if (total_ <= 0) throw invalid_parameter_error("spectral density is zero everywhere");
}

std::vector<double> SpectralDensity::normalized_shape() const {
  std::vector<double> shape(intensity_);
  for (double& v : shape) v /= total_;
  return shape;
}

TransmissionProfile TransmissionProfile::linear_slope(double alpha_per_nm, double lambda_ref_nm) {
  if (!std::isfinite(alpha_per_nm) || !std::isfinite(lambda_ref_nm))
    throw invalid_parameter_error("linear slope parameters must be finite");
  return TransmissionProfile(profiles::LinearSlope{alpha_per_nm, lambda_ref_nm});
}

TransmissionProfile TransmissionProfile::gaussian_dip(double depth, double center_nm,
                                                      double sigma_nm) {
  if (!(depth >= 0.0 && depth <= 1.0))
    throw invalid_parameter_error("gaussian dip depth must be in [0,1], got " + format_real(depth));
  if (!(sigma_nm >= 0.0))
    throw invalid_parameter_error("gaussian dip sigma must be >= 0, got " + format_real(sigma_nm));
  return TransmissionProfile(profiles::GaussianDip{depth, center_nm, sigma_nm});
}

TransmissionProfile TransmissionProfile::super_gaussian(double center_nm, double fwhm_nm,
                                                        int order) {
  if (!(fwhm_nm > 0)) throw invalid_parameter_error("super-gaussian FWHM must be positive");
  if (order < 1) throw invalid_parameter_error("super-gaussian order must be >= 1");
  return TransmissionProfile(profiles::SuperGaussian{center_nm, fwhm_nm, order});
}

TransmissionProfile TransmissionProfile::tabulated(std::vector<double> wavelengths_nm,
                                                   std::vector<double> transmittance) {
  if (wavelengths_nm.size() != transmittance.size() || wavelengths_nm.size() < 2)
    throw invalid_parameter_error("tabulated profile needs >= 2 matched samples");
  for (std::size_t i = 1; i < wavelengths_nm.size(); ++i)
    if (wavelengths_nm[i] <= wavelengths_nm[i - 1])
      throw invalid_parameter_error("tabulated wavelengths must be strictly increasing");
  for (double t : transmittance)
    if (!(t >= 0.0 && t <= 1.0))
      throw invalid_parameter_error("tabulated transmittance must lie in [0,1]");
  return TransmissionProfile(
      profiles::Tabulated{std::move(wavelengths_nm), std::move(transmittance)});
}

TransmissionProfile TransmissionProfile::identity() {
  return TransmissionProfile(profiles::Identity{});
}

namespace {

struct Evaluate {
  double lambda;

  double operator()(const profiles::LinearSlope& m) const {
    return std::clamp(1.0 - m.alpha_per_nm * (lambda - m.lambda_ref_nm), 0.0, 1.0);
  }
  double operator()(const profiles::GaussianDip& m) const {
    if (m.sigma_nm == 0.0) return 1.0;
    const double z = (lambda - m.center_nm) / m.sigma_nm;
    return 1.0 - m.depth * std::exp(-0.5 * z * z);
  }
  double operator()(const profiles::SuperGaussian& m) const {
    const double d = lambda - m.center_nm;
    const double base = d * d * 4.0 / (m.fwhm_nm * m.fwhm_nm);
    double arg = 1.0;
    for (int k = 0; k < m.order; ++k) arg *= base;
    constexpr double kLn2 = 0.6931471805599453;
    return std::exp(-kLn2 * arg);
  }
  double operator()(const profiles::Tabulated& m) const {
    if (lambda < m.wavelengths_nm.front() || lambda > m.wavelengths_nm.back())
      throw coverage_error("wavelength " + format_real(lambda) +
                           " nm outside tabulated range [" +
                           format_real(m.wavelengths_nm.front()) + ", " +
                           format_real(m.wavelengths_nm.back()) + "]");
    auto it = std::upper_bound(m.wavelengths_nm.begin(), m.wavelengths_nm.end(), lambda);
    if (it == m.wavelengths_nm.end()) return m.transmittance.back();
    const std::size_t hi = static_cast<std::size_t>(it - m.wavelengths_nm.begin());
    if (hi == 0) return m.transmittance.front();
    const std::size_t lo = hi - 1;
    const double w = (lambda - m.wavelengths_nm[lo]) / (m.wavelengths_nm[hi] - m.wavelengths_nm[lo]);
    return m.transmittance[lo] + w * (m.transmittance[hi] - m.transmittance[lo]);
  }
  double operator()(const profiles::Identity&) const { return 1.0; }
};

struct Describe {
  std::string operator()(const profiles::LinearSlope& m) const {
    return "linear-slope alpha=" + format_real(m.alpha_per_nm) +
           " lambda_ref=" + format_real(m.lambda_ref_nm);
  }
  std::string operator()(const profiles::GaussianDip& m) const {
    return "gaussian-dip depth=" + format_real(m.depth) + " center=" + format_real(m.center_nm) +
           " sigma=" + format_real(m.sigma_nm);
  }
  std::string operator()(const profiles::SuperGaussian& m) const {
    return "super-gaussian center=" + format_real(m.center_nm) +
           " fwhm=" + format_real(m.fwhm_nm) + " order=" + std::to_string(m.order);
  }
  std::string operator()(const profiles::Tabulated& m) const {
    return "tabulated n=" + std::to_string(m.wavelengths_nm.size()) + " range=[" +
           format_real(m.wavelengths_nm.front()) + ", " + format_real(m.wavelengths_nm.back()) +
           "]";
  }
  std::string operator()(const profiles::Identity&) const { return "identity"; }
};

}  // namespace

double TransmissionProfile::transmittance_at(double lambda_nm) const {
  if (!std::isfinite(lambda_nm))
    throw invalid_parameter_error("wavelength must be finite");
  return std::visit(Evaluate{lambda_nm}, model_);
}

bool TransmissionProfile::covers(const WavelengthGrid& grid) const {
  if (const auto* tab = std::get_if<profiles::Tabulated>(&model_))
    return grid.front() >= tab->wavelengths_nm.front() && grid.back() <= tab->wavelengths_nm.back();
  return true;
}

std::string TransmissionProfile::describe() const { return std::visit(Describe{}, model_); }

EmpiricalCDF::EmpiricalCDF(WavelengthGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw invalid_parameter_error("CDF length does not match grid length");
  double prev = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= prev - 1e-15) || values_[i] > 1.0 + 1e-15)
      throw invalid_parameter_error("CDF values must be nondecreasing within [0,1]");
    prev = values_[i];
  }
  if (std::abs(values_.back() - 1.0) > 1e-12)
    throw invalid_parameter_error("CDF must end at 1, ends at " + format_real(values_.back()));
}

SpectralDensity make_gaussian_reference(const WavelengthGrid& grid, double lambda0_nm,
                                        double sigma_nm) {
  if (!(sigma_nm > 0)) throw invalid_parameter_error("gaussian reference sigma must be positive");
  if (!std::isfinite(lambda0_nm)) throw invalid_parameter_error("gaussian center must be finite");
  std::vector<double> intensity(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double z = (grid[i] - lambda0_nm) / sigma_nm;
    intensity[i] = std::exp(-0.5 * z * z);
  }
  return SpectralDensity(grid, std::move(intensity));
}

SpectralDensity make_flat_reference(const WavelengthGrid& grid) {
  return SpectralDensity(grid, std::vector<double>(grid.size(), 1.0));
}

SpectralDensity apply_transmission(const SpectralDensity& density,
                                   const TransmissionProfile& profile) {
  std::vector<double> out(density.size());
  for (std::size_t i = 0; i < density.size(); ++i)
    out[i] = density.intensity()[i] * profile.transmittance_at(density.grid()[i]);
  return SpectralDensity(density.grid(), std::move(out));
}

EmpiricalCDF empirical_cdf(const BinnedSpectrum& spectrum) {
  if (spectrum.total() <= 0)
    throw empty_measurement_error("cannot build an empirical CDF from zero total counts");
  std::vector<double> values(spectrum.size());
  const double total = static_cast<double>(spectrum.total());
  std::int64_t running = 0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    running += spectrum.counts()[i];
    values[i] = static_cast<double>(running) / total;
  }
  values.back() = 1.0;  // running == total here; force the exact representation
  return EmpiricalCDF(spectrum.grid(), std::move(values));
}

CountImage::CountImage(std::size_t rows, std::size_t cols, std::vector<std::int64_t> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows_ == 0 || cols_ == 0) throw invalid_parameter_error("count image must be non-empty");
  if (data_.size() != rows_ * cols_)
    throw invalid_parameter_error("count image data size does not match rows*cols");
  for (std::int64_t v : data_)
    if (v < 0) throw invalid_parameter_error("count image contains a negative count");
}

BinnedSpectrum integrate_roi(const CountImage& image, const Roi& roi, const WavelengthGrid& grid) {
  if (roi.row_begin >= roi.row_end)
    throw invalid_roi_error("empty ROI [" + std::to_string(roi.row_begin) + ", " +
                            std::to_string(roi.row_end) + ")");
  if (roi.row_end > image.rows())
    throw invalid_roi_error("ROI end " + std::to_string(roi.row_end) + " exceeds image rows " +
                            std::to_string(image.rows()));
  if (grid.size() != image.cols())
    throw grid_mismatch_error("grid length " + std::to_string(grid.size()) +
                              " does not match image spectral width " +
                              std::to_string(image.cols()));
  std::vector<std::int64_t> counts(image.cols(), 0);
  for (std::size_t r = roi.row_begin; r < roi.row_end; ++r)
    for (std::size_t c = 0; c < image.cols(); ++c) counts[c] += image.at(r, c);
  return BinnedSpectrum(grid, std::move(counts));
}

}  // namespace ghostspec
