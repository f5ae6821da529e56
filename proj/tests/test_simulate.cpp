#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ghostspec/ks.hpp"
#include "ghostspec/simulate.hpp"

using namespace ghostspec;

TEST_CASE("sample_poisson_counts: law of large numbers on a flat density") {
  const WavelengthGrid grid = WavelengthGrid::uniform(780.0, 0.5, 100);
  const SpectralDensity flat = make_flat_reference(grid);

  double total_sum = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const BinnedSpectrum s = sample_poisson_counts(flat, 1000000, derive_seed(900, rep));
    total_sum += static_cast<double>(s.total());
    if (rep == 0)
      for (auto c : s.counts()) CHECK(std::abs(static_cast<double>(c) - 1e4) < 3.0 * 100.0 * 3.0);
  }
  CHECK(std::abs(total_sum / 100.0 - 1e6) / 1e6 < 0.005);
}

TEST_CASE("sample_poisson_counts: 350k gaussian realization") {
  const WavelengthGrid grid = WavelengthGrid::uniform(790.0, 0.25, 120);
  const SpectralDensity ref = make_gaussian_reference(grid, 805.0, 4.0);
  const BinnedSpectrum s = sample_poisson_counts(ref, 350000, 101);
  // total within 3 sigma of the resource budget
  CHECK(std::abs(static_cast<double>(s.total()) - 350000.0) < 3.0 * std::sqrt(350000.0));
  // peak region carries the most counts
  const auto& c = s.counts();
  std::size_t argmax = 0;
  for (std::size_t i = 1; i < c.size(); ++i)
    if (c[i] > c[argmax]) argmax = i;
  CHECK(std::abs(grid[argmax] - 805.0) < 2.0);
}

TEST_CASE("sample_poisson_counts: same seed, same spectrum") {
  const WavelengthGrid grid = WavelengthGrid::uniform(790.0, 0.25, 120);
  const SpectralDensity ref = make_gaussian_reference(grid, 805.0, 4.0);
  const BinnedSpectrum a = sample_poisson_counts(ref, 50000, 12345);
  const BinnedSpectrum b = sample_poisson_counts(ref, 50000, 12345);
  CHECK(a.counts() == b.counts());
  const BinnedSpectrum c = sample_poisson_counts(ref, 50000, 12346);
  CHECK(a.counts() != c.counts());
}

TEST_CASE("sample_poisson_counts rejects bad resource counts") {
  const SpectralDensity flat = make_flat_reference(WavelengthGrid::uniform(790.0, 1.0, 10));
  CHECK_THROWS_AS(sample_poisson_counts(flat, 0, 1), invalid_parameter_error);
}

TEST_CASE("simulate_signal with identity object behaves like plain sampling") {
  Scenario s = scenario_broad_absorber(0.0, 10000, 77);
  const BinnedSpectrum signal = simulate_signal(s);
  CHECK(std::abs(static_cast<double>(signal.total()) - 10000.0) < 5.0 * 100.0);
  // alpha = 0 means every bin transmits fully
  CHECK(expected_detected_fraction(s.reference, s.object) == doctest::Approx(1.0));
}

TEST_CASE("simulate_signal: full absorption at a narrow dip leaves that bin empty") {
  const WavelengthGrid grid = wide_flat_grid();
  const std::size_t dip_bin = grid.size() / 2;  // 805.0 nm, on-grid
  Scenario s{make_flat_reference(grid),
             TransmissionProfile::gaussian_dip(1.0, grid[dip_bin], 0.05),
             600000,
             20000,
             0,
             "test"};
  for (int rep = 0; rep < 100; ++rep) {
    s.seed = derive_seed(4000, rep);
    const BinnedSpectrum signal = simulate_signal(s);
    // dip sigma 0.05 nm on 0.25 nm bins: the dip bin mean is exactly 0 and
    // the neighbours (5 sigma away) are barely touched
    CHECK(signal.counts()[dip_bin] == 0);
    CHECK(signal.counts()[dip_bin - 1] > 0);
    CHECK(signal.counts()[dip_bin + 1] > 0);
  }
}

TEST_CASE("scenario_broad_absorber") {
  SUBCASE("alpha range honours the paper's sweep and rejects beyond it") {
    for (std::int64_t n_t : {300, 1000, 3000, 10000, 30000}) CHECK_NOTHROW(scenario_broad_absorber(0.016, n_t, 1));
    CHECK_NOTHROW(scenario_broad_absorber(0.0, 300, 1));
    CHECK_THROWS_AS(scenario_broad_absorber(-0.001, 300, 1), invalid_parameter_error);
    CHECK_THROWS_AS(scenario_broad_absorber(0.021, 300, 1), invalid_parameter_error);
  }
  SUBCASE("alpha=0 object is equivalent to identity on the grid") {
    const Scenario s = scenario_broad_absorber(0.0, 1000, 1);
    for (std::size_t i = 0; i < s.reference.size(); ++i)
      CHECK(s.object.transmittance_at(s.reference.grid()[i]) == 1.0);
  }
  SUBCASE("alpha=0.016 spans about [0.52, 1.0] over the 30 nm window") {
    const Scenario s = scenario_broad_absorber(0.016, 1000, 1);
    const WavelengthGrid& grid = s.reference.grid();
    CHECK(s.object.transmittance_at(grid.front()) == doctest::Approx(1.0));
    // clamp(1 - 0.016 * 29.75) at the last bin center; 0.52 at the 820 nm edge
    CHECK(s.object.transmittance_at(grid.back()) == doctest::Approx(0.524));
    CHECK(s.object.transmittance_at(grid.front() + 30.0) == doctest::Approx(0.52));
    CHECK(s.n_reference_resources == 350000);
  }
}

TEST_CASE("scenario_narrow_dip") {
  SUBCASE("sigma=0 is the null scenario") {
    const Scenario s = scenario_narrow_dip(0.0, 15000, 1);
    for (std::size_t i = 0; i < s.reference.size(); ++i)
      CHECK(s.object.transmittance_at(s.reference.grid()[i]) == 1.0);
    CHECK(s.n_reference_resources == 600000);
  }
  SUBCASE("dip center transmits 0.8 for every positive sigma") {
    for (double sigma : {0.5, 2.0, 6.0}) {
      const Scenario s = scenario_narrow_dip(sigma, 15000, 1);
      CHECK(s.object.transmittance_at(s.reference.grid().center()) ==
            doctest::Approx(0.8).epsilon(1e-12));
    }
  }
  SUBCASE("sigma bounds") {
    CHECK_THROWS_AS(scenario_narrow_dip(-0.1, 100, 1), invalid_parameter_error);
    CHECK_THROWS_AS(scenario_narrow_dip(10.5, 100, 1), invalid_parameter_error);
  }
  SUBCASE("sigma=6 at N_T=15k rejects in every one of 100 trials") {
    const BinnedSpectrum reference =
        simulate_reference(scenario_narrow_dip(6.0, 15000, 60001));
    int rejected = 0;
    for (int t = 0; t < 100; ++t) {
      Scenario s = scenario_narrow_dip(6.0, 15000, derive_seed(60002, t));
      if (two_sample_test(simulate_signal(s), reference).reject_at_005) ++rejected;
    }
    CHECK(rejected == 100);
  }
}

TEST_CASE("experiment-shaped scenarios") {
  SUBCASE("supergaussian filter against the 810 nm band") {
    const Scenario s = scenario_supergaussian_filter(492, 9);
    CHECK(s.reference.grid().size() == 160);
    // detected fraction computed from the shapes; 492 resources target ~228 detected
    const double fraction = expected_detected_fraction(s.reference, s.object);
    CHECK(fraction == doctest::Approx(0.4636).epsilon(1e-3));
    CHECK(492.0 * fraction == doctest::Approx(228.0).epsilon(0.01));
  }
  SUBCASE("228-photon filter signal rejects hard against the band reference") {
    const Scenario proto = scenario_supergaussian_filter(492, 0);
    const BinnedSpectrum reference = simulate_reference(scenario_supergaussian_filter(492, 31));
    Scenario s = proto;
    s.seed = 32;
    const KsOutcome out = two_sample_test(simulate_signal(s), reference);
    CHECK(out.p_value < 1e-10);
  }
  SUBCASE("flat table behaves like identity") {
    const Scenario s =
        scenario_tabulated({700.0, 900.0}, {1.0, 1.0}, 1000, 1);
    CHECK(expected_detected_fraction(s.reference, s.object) == doctest::Approx(1.0));
  }
  SUBCASE("table must cover the grid") {
    CHECK_THROWS_AS(scenario_tabulated({795.0, 810.0}, {0.9, 1.0}, 1000, 1), coverage_error);
  }
}

TEST_CASE("expected detected counts never exceed the budget; identity keeps the mean") {
  Scenario s = scenario_broad_absorber(0.016, 20000, 0);
  const double fraction = expected_detected_fraction(s.reference, s.object);
  CHECK(fraction < 1.0);
  double mean_total = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    s.seed = derive_seed(7100, rep);
    mean_total += static_cast<double>(simulate_signal(s).total());
  }
  mean_total /= 200.0;
  CHECK(mean_total < 20000.0);
  CHECK(std::abs(mean_total - 20000.0 * fraction) < 5.0 * std::sqrt(20000.0 * fraction / 200.0));

  // identity object: mean total within 3 standard errors of N_T
  Scenario id = scenario_broad_absorber(0.0, 20000, 0);
  double id_total = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    id.seed = derive_seed(7200, rep);
    id_total += static_cast<double>(simulate_signal(id).total());
  }
  id_total /= 200.0;
  CHECK(std::abs(id_total - 20000.0) < 3.0 * std::sqrt(20000.0 / 200.0));
}

TEST_CASE("determinism: identical scenario gives identical spectra") {
  const Scenario a = scenario_narrow_dip(3.0, 5000, 987654321);
  const Scenario b = scenario_narrow_dip(3.0, 5000, 987654321);
  CHECK(simulate_signal(a).counts() == simulate_signal(b).counts());
  CHECK(simulate_reference(a).counts() == simulate_reference(b).counts());
  // reference and signal arms use distinct substreams
  CHECK(simulate_reference(a).counts() != simulate_signal(a).counts());
}

TEST_CASE("thinning consistency: per-bin mean and variance match Poisson thinning") {
  // small grid so 10^4 repetitions stay fast
  const WavelengthGrid grid = WavelengthGrid::uniform(800.0, 1.0, 8);
  const std::vector<double> intensity = {1.0, 2.0, 4.0, 8.0, 8.0, 4.0, 2.0, 1.0};
  const SpectralDensity density(grid, intensity);
  const auto dip = TransmissionProfile::gaussian_dip(0.5, 804.0, 1.5);

  Scenario s{density, dip, 1000, 1000, 0, "thinning"};
  const int reps = 10000;
  std::vector<double> sum(8, 0.0), sum_sq(8, 0.0);
  for (int rep = 0; rep < reps; ++rep) {
    s.seed = derive_seed(31337, rep);
    const BinnedSpectrum out = simulate_signal(s);
    for (std::size_t i = 0; i < 8; ++i) {
      const double c = static_cast<double>(out.counts()[i]);
      sum[i] += c;
      sum_sq[i] += c * c;
    }
  }
  const std::vector<double> shape = density.normalized_shape();
  for (std::size_t i = 0; i < 8; ++i) {
    const double expected = 1000.0 * shape[i] * dip.transmittance_at(grid[i]);
    const double mean = sum[i] / reps;
    const double var = sum_sq[i] / reps - mean * mean;
    const double se_mean = std::sqrt(expected / reps);
    const double se_var = std::sqrt((expected + 2.0 * expected * expected) / reps);
    CHECK(std::abs(mean - expected) < 5.0 * se_mean);
    CHECK(std::abs(var - expected) < 5.0 * se_var);
  }
}

TEST_CASE("monotonicity: median KS statistic grows with alpha at N_T=10000") {
  const std::vector<double> alphas = {0.0, 0.004, 0.008, 0.012, 0.016};
  std::vector<double> medians;
  for (double alpha : alphas) {
    const BinnedSpectrum reference =
        simulate_reference(scenario_broad_absorber(alpha, 10000, 787878));
    std::vector<double> stats;
    for (int t = 0; t < 100; ++t) {
      Scenario s = scenario_broad_absorber(alpha, 10000, derive_seed(787879, t));
      stats.push_back(two_sample_test(simulate_signal(s), reference).statistic);
    }
    std::sort(stats.begin(), stats.end());
    medians.push_back(0.5 * (stats[49] + stats[50]));
  }
  for (std::size_t i = 1; i < medians.size(); ++i) CHECK(medians[i] >= medians[i - 1]);
}
