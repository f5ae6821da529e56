#include <doctest.h>

#include <cmath>

#include "ghostspec/rng.hpp"
#include "ghostspec/simulate.hpp"
#include "ghostspec/spectra.hpp"

using namespace ghostspec;

TEST_CASE("wavelength grid invariants") {
  CHECK_THROWS_AS(WavelengthGrid({805.0}), invalid_parameter_error);
  CHECK_THROWS_AS(WavelengthGrid({805.0, 805.0}), invalid_parameter_error);
  CHECK_THROWS_AS(WavelengthGrid({806.0, 805.0}), invalid_parameter_error);

  const WavelengthGrid uniform = WavelengthGrid::uniform(790.0, 0.25, 120);
  CHECK(uniform.size() == 120);
  CHECK(uniform.front() == doctest::Approx(790.0));
  CHECK(uniform.back() == doctest::Approx(819.75));
  CHECK(uniform.is_uniform());

  const WavelengthGrid irregular({790.0, 791.0, 793.5});
  CHECK_FALSE(irregular.is_uniform());

  CHECK(uniform.matches(WavelengthGrid::uniform(790.0, 0.25, 120)));
  CHECK_FALSE(uniform.matches(WavelengthGrid::uniform(790.0, 0.25, 119)));
  CHECK_FALSE(uniform.matches(WavelengthGrid::uniform(790.1, 0.25, 120)));
}

TEST_CASE("binned spectrum validates counts against its grid") {
  const WavelengthGrid grid = WavelengthGrid::uniform(800.0, 1.0, 4);
  const BinnedSpectrum s(grid, {1, 0, 2, 3});
  CHECK(s.total() == 6);
  CHECK_THROWS_AS(BinnedSpectrum(grid, {1, 2, 3}), invalid_parameter_error);
  CHECK_THROWS_AS(BinnedSpectrum(grid, {1, -1, 2, 3}), invalid_parameter_error);
}

TEST_CASE("spectral density rejects all-zero and negative intensity") {
  const WavelengthGrid grid = WavelengthGrid::uniform(800.0, 1.0, 3);
  CHECK_THROWS_AS(SpectralDensity(grid, {0.0, 0.0, 0.0}), invalid_parameter_error);
  CHECK_THROWS_AS(SpectralDensity(grid, {1.0, -0.5, 0.0}), invalid_parameter_error);
  const SpectralDensity d(grid, {0.0, 2.0, 0.0});
  CHECK(d.total_intensity() == doctest::Approx(2.0));
  CHECK(d.normalized_shape()[1] == doctest::Approx(1.0));
}

TEST_CASE("gaussian reference shape") {
  const WavelengthGrid grid = WavelengthGrid::uniform(790.0, 0.25, 121);  // 805 on-grid
  const SpectralDensity ref = make_gaussian_reference(grid, 805.0, 4.0);

  // peak exactly 1 when the center sits on the grid
  const std::size_t center_bin = 60;
  CHECK(grid[center_bin] == doctest::Approx(805.0));
  CHECK(ref.intensity()[center_bin] == doctest::Approx(1.0).epsilon(1e-15));

  // value at one sigma off center
  const std::size_t sigma_bin = center_bin + 16;  // +4 nm
  CHECK(ref.intensity()[sigma_bin] == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));

  // bell shape: strictly increasing to the peak, decreasing after
  for (std::size_t i = 1; i <= center_bin; ++i)
    CHECK(ref.intensity()[i] > ref.intensity()[i - 1]);
  for (std::size_t i = center_bin + 1; i < grid.size(); ++i)
    CHECK(ref.intensity()[i] < ref.intensity()[i - 1]);

  CHECK_THROWS_AS(make_gaussian_reference(grid, 805.0, 0.0), invalid_parameter_error);
  CHECK_THROWS_AS(make_gaussian_reference(grid, 805.0, -1.0), invalid_parameter_error);
}

TEST_CASE("gaussian reference symmetry about on-grid center") {
  const WavelengthGrid grid = WavelengthGrid::uniform(800.0, 0.5, 21);  // symmetric about 805
  const SpectralDensity ref = make_gaussian_reference(grid, 805.0, 2.0);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(ref.intensity()[i] == doctest::Approx(ref.intensity()[grid.size() - 1 - i]).epsilon(1e-14));
}

TEST_CASE("flat reference") {
  const WavelengthGrid grid = WavelengthGrid::uniform(780.0, 0.25, 100);
  const SpectralDensity flat = make_flat_reference(grid);
  CHECK(flat.size() == 100);
  for (double v : flat.intensity()) CHECK(v == 1.0);

  // identity transmission leaves it unchanged
  const SpectralDensity same = apply_transmission(flat, TransmissionProfile::identity());
  for (std::size_t i = 0; i < flat.size(); ++i) CHECK(same.intensity()[i] == flat.intensity()[i]);
}

TEST_CASE("flat reference: large sample CDF is nearly linear in bin index") {
  const WavelengthGrid grid = WavelengthGrid::uniform(780.0, 0.25, 100);
  const SpectralDensity flat = make_flat_reference(grid);
  const BinnedSpectrum sample = sample_poisson_counts(flat, 1000000, 20250711);
  const EmpiricalCDF cdf = empirical_cdf(sample);
  double worst = 0.0;
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    const double linear = static_cast<double>(i + 1) / static_cast<double>(cdf.size());
    worst = std::max(worst, std::abs(cdf.values()[i] - linear));
  }
  CHECK(worst < 0.005);
}

TEST_CASE("transmittance_at per variant") {
  SUBCASE("gaussian dip center") {
    const auto dip = TransmissionProfile::gaussian_dip(0.2, 805.0, 3.0);
    CHECK(dip.transmittance_at(805.0) == doctest::Approx(0.8).epsilon(1e-14));
  }
  SUBCASE("linear slope with alpha=0 is the no-object case") {
    const auto none = TransmissionProfile::linear_slope(0.0, 790.0);
    for (double lam : {700.0, 805.0, 900.0}) CHECK(none.transmittance_at(lam) == 1.0);
  }
  SUBCASE("linear slope clamps into [0,1]") {
    const auto steep = TransmissionProfile::linear_slope(0.1, 800.0);
    CHECK(steep.transmittance_at(790.0) == 1.0);   // above the anchor -> clamped high
    CHECK(steep.transmittance_at(900.0) == 0.0);   // far below -> clamped low
    CHECK(steep.transmittance_at(805.0) == doctest::Approx(0.5));
  }
  SUBCASE("super-gaussian half maximum at center +- fwhm/2") {
    const auto sg = TransmissionProfile::super_gaussian(807.0, 7.5, 4);
    CHECK(sg.transmittance_at(807.0 + 3.75) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sg.transmittance_at(807.0 - 3.75) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sg.transmittance_at(807.0) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("gaussian dip with sigma=0 degenerates to identity") {
    const auto null_dip = TransmissionProfile::gaussian_dip(0.2, 805.0, 0.0);
    for (double lam : {790.0, 805.0, 820.0}) CHECK(null_dip.transmittance_at(lam) == 1.0);
  }
  SUBCASE("tabulated interpolates linearly and refuses extrapolation") {
    const auto tab = TransmissionProfile::tabulated({800.0, 810.0}, {0.4, 0.8});
    CHECK(tab.transmittance_at(805.0) == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(tab.transmittance_at(800.0) == doctest::Approx(0.4));
    CHECK(tab.transmittance_at(810.0) == doctest::Approx(0.8));
    CHECK_THROWS_AS(tab.transmittance_at(799.9), coverage_error);
    CHECK_THROWS_AS(tab.transmittance_at(810.1), coverage_error);
  }
  SUBCASE("parameter validation") {
    CHECK_THROWS_AS(TransmissionProfile::gaussian_dip(1.2, 805.0, 1.0), invalid_parameter_error);
    CHECK_THROWS_AS(TransmissionProfile::gaussian_dip(-0.1, 805.0, 1.0), invalid_parameter_error);
    CHECK_THROWS_AS(TransmissionProfile::gaussian_dip(0.2, 805.0, -1.0), invalid_parameter_error);
    CHECK_THROWS_AS(TransmissionProfile::super_gaussian(807.0, 0.0, 4), invalid_parameter_error);
    CHECK_THROWS_AS(TransmissionProfile::super_gaussian(807.0, 7.5, 0), invalid_parameter_error);
    CHECK_THROWS_AS(TransmissionProfile::tabulated({800.0, 810.0}, {0.4, 1.2}),
                    invalid_parameter_error);
  }
}

TEST_CASE("property: every variant stays inside [0,1] over random wavelengths") {
  const std::vector<TransmissionProfile> variants = {
      TransmissionProfile::linear_slope(0.016, 790.0),
      TransmissionProfile::linear_slope(-0.05, 805.0),
      TransmissionProfile::gaussian_dip(1.0, 805.0, 2.0),
      TransmissionProfile::super_gaussian(807.0, 7.5, 4),
      TransmissionProfile::tabulated({780.0, 800.0, 830.0}, {0.9, 0.2, 1.0}),
      TransmissionProfile::identity()};
  Philox4x32 rng(99);
  for (int i = 0; i < 10000; ++i) {
    const double lam = 780.0 + 50.0 * rng.uniform01();
    for (const auto& profile : variants) {
      const double t = profile.transmittance_at(lam);
      CHECK(t >= 0.0);
      CHECK(t <= 1.0);
    }
  }
}

TEST_CASE("apply_transmission") {
  const WavelengthGrid grid = WavelengthGrid::uniform(790.0, 0.25, 120);
  const SpectralDensity flat = make_flat_reference(grid);

  SUBCASE("full absorption at a narrow dip center empties that bin only") {
    const double center = grid[60];
    const auto dip = TransmissionProfile::gaussian_dip(1.0, center, 0.02);
    const SpectralDensity out = apply_transmission(flat, dip);
    CHECK(out.intensity()[60] < 1e-30);
    CHECK(out.intensity()[59] > 0.99999);
    CHECK(out.intensity()[61] > 0.99999);
  }
  SUBCASE("slope over 30 nm: last bin at 88% of the first (alpha=0.004)") {
    const auto slope = TransmissionProfile::linear_slope(0.004, grid.front());
    const SpectralDensity out = apply_transmission(flat, slope);
    // direct evaluation: 1 - 0.004 * 30 = 0.88 at the 820 nm edge
    const double lam_last = grid.back();
    CHECK(out.intensity().back() ==
          doctest::Approx(1.0 - 0.004 * (lam_last - grid.front())).epsilon(1e-12));
    CHECK(1.0 - 0.004 * 30.0 == doctest::Approx(0.88));
  }
  SUBCASE("never increases any bin") {
    const SpectralDensity ref = make_gaussian_reference(grid, 805.0, 4.0);
    const std::vector<TransmissionProfile> variants = {
        TransmissionProfile::linear_slope(0.01, 790.0),
        TransmissionProfile::gaussian_dip(0.7, 805.0, 3.0),
        TransmissionProfile::super_gaussian(805.0, 10.0, 2)};
    for (const auto& profile : variants) {
      const SpectralDensity out = apply_transmission(ref, profile);
      for (std::size_t i = 0; i < ref.size(); ++i)
        CHECK(out.intensity()[i] <= ref.intensity()[i] + 1e-18);
    }
  }
}

TEST_CASE("empirical_cdf") {
  const WavelengthGrid grid = WavelengthGrid::uniform(800.0, 1.0, 4);

  SUBCASE("uniform counts") {
    const EmpiricalCDF cdf = empirical_cdf(BinnedSpectrum(grid, {1, 1, 1, 1}));
    CHECK(cdf.values()[0] == doctest::Approx(0.25));
    CHECK(cdf.values()[1] == doctest::Approx(0.5));
    CHECK(cdf.values()[2] == doctest::Approx(0.75));
    CHECK(cdf.values()[3] == 1.0);
  }
  SUBCASE("single occupied bin") {
    const EmpiricalCDF cdf = empirical_cdf(BinnedSpectrum(grid, {0, 0, 5, 0}));
    CHECK(cdf.values()[0] == 0.0);
    CHECK(cdf.values()[1] == 0.0);
    CHECK(cdf.values()[2] == 1.0);
    CHECK(cdf.values()[3] == 1.0);
  }
  SUBCASE("empty measurement is an error") {
    CHECK_THROWS_AS(empirical_cdf(BinnedSpectrum(grid, {0, 0, 0, 0})), empty_measurement_error);
  }
  SUBCASE("property: nondecreasing and ends at 1 for random spectra") {
    Philox4x32 rng(7);
    for (int rep = 0; rep < 200; ++rep) {
      std::vector<std::int64_t> counts(grid.size());
      std::int64_t total = 0;
      for (auto& c : counts) {
        c = static_cast<std::int64_t>(rng.next_below(50));
        total += c;
      }
      if (total == 0) counts[rng.next_below(counts.size())] = 1;
      const EmpiricalCDF cdf = empirical_cdf(BinnedSpectrum(grid, counts));
      for (std::size_t i = 1; i < cdf.size(); ++i) CHECK(cdf.values()[i] >= cdf.values()[i - 1]);
      CHECK(cdf.values().back() == 1.0);
    }
  }
}

TEST_CASE("sampled gaussian CDF tracks the analytic binned CDF (350k resources)") {
  const WavelengthGrid grid = WavelengthGrid::uniform(790.0, 0.25, 120);
  const SpectralDensity ref = make_gaussian_reference(grid, 805.0, 4.0);
  const BinnedSpectrum sample = sample_poisson_counts(ref, 350000, 424242);
  const EmpiricalCDF cdf = empirical_cdf(sample);

  // analytic binned CDF computed independently of the library helpers
  std::vector<double> shape(grid.size());
  double total = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double z = (grid[i] - 805.0) / 4.0;
    shape[i] = std::exp(-0.5 * z * z);
    total += shape[i];
  }
  double running = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    running += shape[i] / total;
    worst = std::max(worst, std::abs(cdf.values()[i] - running));
  }
  CHECK(worst < 0.01);
}

TEST_CASE("integrate_roi") {
  // 3 rows x 4 columns, row-major
  const CountImage image(3, 4, {1, 2, 3, 4, 10, 20, 30, 40, 100, 200, 300, 400});
  const WavelengthGrid grid = WavelengthGrid::uniform(800.0, 1.0, 4);

  SUBCASE("single-row roi is that row verbatim") {
    const BinnedSpectrum s = integrate_roi(image, Roi{1, 2}, grid);
    CHECK(s.counts() == std::vector<std::int64_t>{10, 20, 30, 40});
  }
  SUBCASE("full-image roi on all-ones image") {
    const CountImage ones(10, 4, std::vector<std::int64_t>(40, 1));
    const BinnedSpectrum s = integrate_roi(ones, Roi{0, 10}, grid);
    for (auto c : s.counts()) CHECK(c == 10);
  }
  SUBCASE("counts are conserved inside the roi") {
    const BinnedSpectrum s = integrate_roi(image, Roi{0, 2}, grid);
    CHECK(s.total() == 1 + 2 + 3 + 4 + 10 + 20 + 30 + 40);
  }
  SUBCASE("separable image recovers the spectral profile") {
    // outer product of a spatial envelope and a spectral profile
    const std::vector<std::int64_t> envelope = {2, 5, 3};
    const std::vector<std::int64_t> profile = {1, 4, 2, 8};
    std::vector<std::int64_t> data;
    for (auto e : envelope)
      for (auto p : profile) data.push_back(e * p);
    const CountImage separable(3, 4, data);
    const BinnedSpectrum s = integrate_roi(separable, Roi{0, 3}, grid);
    const std::int64_t envelope_sum = 2 + 5 + 3;
    for (std::size_t i = 0; i < 4; ++i) CHECK(s.counts()[i] == envelope_sum * profile[i]);
  }
  SUBCASE("bad rois") {
    CHECK_THROWS_AS(integrate_roi(image, Roi{2, 2}, grid), invalid_roi_error);
    CHECK_THROWS_AS(integrate_roi(image, Roi{0, 4}, grid), invalid_roi_error);
  }
  SUBCASE("grid length must match the spectral width") {
    CHECK_THROWS_AS(integrate_roi(image, Roi{0, 1}, WavelengthGrid::uniform(800.0, 1.0, 3)),
                    grid_mismatch_error);
  }
}
