#pragma once
#include <cstdint>
#include <utility>
#include <vector>

#include "ghostspec/spectra.hpp"

namespace ghostspec {

/// Result of a Kolmogorov-Smirnov comparison between a signal spectrum and
/// a reference spectrum.
struct KsOutcome {
  double statistic = 0.0;        ///< max_lambda |F_s - F_r|, in [0,1]
  std::int64_t n_signal = 0;     ///< total signal counts
  std::int64_t n_reference = 0;  ///< total reference counts
  double effective_n = 0.0;      ///< n*m/(n+m)
  double p_value = 1.0;
  bool reject_at_005 = false;    ///< p < 0.05
  bool reject_at_001 = false;    ///< p < 0.01
  /// Decision per requested significance level, in request order.
  std::vector<std::pair<double, bool>> decisions;
};

/// Maximum absolute difference between two cumulative distributions on the
/// same grid. Depends only on bin order and counts, not on the wavelength
/// values themselves.
double ks_statistic(const EmpiricalCDF& f_signal, const EmpiricalCDF& f_reference);

/// Survival function of the Kolmogorov limiting distribution,
/// Q(x) = 2 * sum_{k>=1} (-1)^(k-1) exp(-2 k^2 x^2), with Q(0) = 1.
/// Terms are accumulated until one falls below 1e-12 in magnitude.
double kolmogorov_sf(double x);

/// Two-sample KS test on binned spectra. The statistic is computed on the
/// binned empirical CDFs; heavy ties make the asymptotic p-value
/// conservative, which matches the sub-nominal null rejection rates this
/// kind of data shows. p = Q(sqrt(n*m/(n+m)) * statistic).
KsOutcome two_sample_test(const BinnedSpectrum& signal, const BinnedSpectrum& reference,
                          const std::vector<double>& significance_levels = {0.05, 0.01});

/// One-sample variant: the reference is treated as an exact model rather
/// than a measurement, so the effective sample size is the signal total
/// alone. Useful as the idealized limit when the reference has far more
/// counts than the signal.
KsOutcome one_sample_test(const BinnedSpectrum& signal, const SpectralDensity& model,
                          const std::vector<double>& significance_levels = {0.05, 0.01});

/// True = reject the null = object present. Strict inequality: a p-value
/// exactly equal to the significance accepts.
bool decide(const KsOutcome& outcome, double significance);

}  // namespace ghostspec
