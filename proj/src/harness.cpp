#include "ghostspec/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>
#include <unordered_set>

namespace ghostspec {

TrialBatch run_trials(const Scenario& scenario, int n_trials, std::uint64_t master_seed,
                      const std::vector<double>& significance_levels,
                      const TrialOptions& options) {
  if (n_trials < 1) throw invalid_parameter_error("n_trials must be >= 1");

  TrialBatch batch;
  batch.descriptor = scenario.label;
  batch.n_trials = n_trials;
  batch.p_values.resize(n_trials);
  batch.statistics.resize(n_trials);
  batch.realized_totals.resize(n_trials);

  // Trial substream 0 is reserved for the batch reference; trials use 1..n.
  Scenario ref_scenario = scenario;
  ref_scenario.seed = master_seed;
  BinnedSpectrum reference = simulate_reference(ref_scenario);

  for (int t = 0; t < n_trials; ++t) {
    Scenario trial = scenario;
    trial.seed = derive_seed(master_seed, static_cast<std::uint64_t>(t) + 1);
    if (options.resample_reference) reference = simulate_reference(trial);
    const BinnedSpectrum signal = simulate_signal(trial);
    const KsOutcome outcome = two_sample_test(signal, reference, significance_levels);
    batch.p_values[t] = outcome.p_value;
    batch.statistics[t] = outcome.statistic;
    batch.realized_totals[t] = signal.total();
  }
  return batch;
}

double rejection_rate(const TrialBatch& batch, double significance) {
  if (batch.n_trials < 1) throw invalid_parameter_error("rejection_rate of an empty batch");
  int rejected = 0;
  for (double p : batch.p_values)
    if (p < significance) ++rejected;
  return static_cast<double>(rejected) / static_cast<double>(batch.n_trials);
}

namespace {

double percentile_linear(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = p * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

PValueStats pvalue_stats(const TrialBatch& batch) {
  if (batch.p_values.empty()) throw invalid_parameter_error("pvalue_stats of an empty batch");
  std::vector<double> sorted = batch.p_values;
  std::sort(sorted.begin(), sorted.end());
  PValueStats stats;
  stats.min = sorted.front();
  stats.max = sorted.back();
  stats.q25 = percentile_linear(sorted, 0.25);
  stats.q75 = percentile_linear(sorted, 0.75);
  double sum = 0.0;
  for (double p : sorted) sum += p;
  stats.mean = sum / static_cast<double>(sorted.size());
  return stats;
}

SweepResult sweep(const SweepRequest& request) {
  if (!request.factory) throw invalid_parameter_error("sweep needs a scenario factory");
  if (request.axis1_values.empty() || request.n_t_values.empty())
    throw invalid_parameter_error("sweep axes must be non-empty");
  if (request.jobs < 1) throw invalid_parameter_error("jobs must be >= 1");

  SweepResult result;
  result.axis1_name = request.axis1_name;
  result.axis1_values = request.axis1_values;
  result.n_t_values = request.n_t_values;
  result.significances = request.significances;
  result.n_trials = request.n_trials;
  result.master_seed = request.master_seed;
  result.rng_name = std::string(kRngName);

  const std::size_t n1 = request.axis1_values.size();
  const std::size_t n2 = request.n_t_values.size();
  const std::size_t n_cells = n1 * n2;
  result.cells.resize(n_cells);

  {
    // Descriptors come from a probe cell; cheap, no sampling involved.
    Scenario probe = request.factory(request.axis1_values[0], request.n_t_values[0], 0);
    result.scenario_label = probe.label;
    const WavelengthGrid& g = probe.reference.grid();
    result.grid_descriptor = format_real(g.front()) + ":" +
                             format_real(g.size() > 1 ? g[1] - g[0] : 0.0) + ":" +
                             std::to_string(g.size());
  }

  std::atomic<std::size_t> next_cell{0};
  std::atomic<std::size_t> finished{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next_cell.fetch_add(1);
      if (idx >= n_cells) return;
      try {
        const std::size_t i1 = idx / n2;
        const std::size_t i2 = idx % n2;
        const std::uint64_t cell_seed =
            derive_seed(derive_seed(request.master_seed, i1), i2);
        Scenario scenario =
            request.factory(request.axis1_values[i1], request.n_t_values[i2], cell_seed);
        TrialBatch batch = run_trials(scenario, request.n_trials, cell_seed,
                                      request.significances, request.trial_options);
        SweepCell& cell = result.cells[idx];
        cell.axis1 = request.axis1_values[i1];
        cell.n_t = request.n_t_values[i2];
        cell.rejection_rates.reserve(request.significances.size());
        for (double level : request.significances)
          cell.rejection_rates.push_back(rejection_rate(batch, level));
        cell.p_stats = pvalue_stats(batch);
        double total_sum = 0.0;
        for (std::int64_t t : batch.realized_totals) total_sum += static_cast<double>(t);
        cell.mean_realized_total = total_sum / static_cast<double>(batch.n_trials);
        if (request.progress) request.progress(finished.fetch_add(1) + 1, n_cells);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next_cell.store(n_cells);  // stop all workers
        return;
      }
    }
  };

  const int jobs = std::min<int>(request.jobs, static_cast<int>(n_cells));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return result;
}

double permutation_oracle(const BinnedSpectrum& signal, const BinnedSpectrum& reference,
                          int n_permutations, std::uint64_t seed) {
  if (n_permutations < 100)
    throw invalid_parameter_error("permutation oracle needs >= 100 permutations");
  if (!signal.grid().matches(reference.grid()))
    throw grid_mismatch_error("signal and reference are on different wavelength grids");
  if (signal.total() <= 0 || reference.total() <= 0)
    throw empty_measurement_error("permutation oracle needs non-empty spectra");

  const std::size_t n_bins = signal.size();
  const std::int64_t n_s = signal.total();
  const std::int64_t n_r = reference.total();
  const std::int64_t n_pool = n_s + n_r;

  // Pooled photon positions: photon j (0-based) lies in the bin whose
  // cumulative pooled count first exceeds j.
  std::vector<std::int64_t> pooled_cum(n_bins);
  std::int64_t running = 0;
  for (std::size_t i = 0; i < n_bins; ++i) {
    running += signal.counts()[i] + reference.counts()[i];
    pooled_cum[i] = running;
  }

  const double observed =
      ks_statistic(empirical_cdf(signal), empirical_cdf(reference));

  Philox4x32 rng(seed);
  // Sample a uniform subset (of the smaller group's size) of the pooled
  // photons with Floyd's algorithm, then bin the chosen indices; the
  // complement is the other permuted group. The statistic is symmetric in
  // the two groups, so cost is O(min(n,m) log bins) per permutation.
  const std::int64_t n_small = std::min<std::int64_t>(n_s, n_r);

  int count_ge = 0;
  std::unordered_set<std::int64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(n_small) * 2);
  std::vector<std::int64_t> subset_counts(n_bins);
  for (int perm = 0; perm < n_permutations; ++perm) {
    chosen.clear();
    for (std::int64_t j = n_pool - n_small; j < n_pool; ++j) {
      const std::int64_t r =
          static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(j + 1)));
      if (!chosen.insert(r).second) chosen.insert(j);
    }
    std::fill(subset_counts.begin(), subset_counts.end(), 0);
    for (std::int64_t photon : chosen) {
      const auto it = std::upper_bound(pooled_cum.begin(), pooled_cum.end(), photon);
      ++subset_counts[static_cast<std::size_t>(it - pooled_cum.begin())];
    }
    // KS statistic between the subset and its complement, via cumulative
    // fractions; identical to building the two binned ECDFs.
    double max_diff = 0.0;
    std::int64_t cum_subset = 0;
    std::int64_t cum_pool = 0;
    const double inv_small = 1.0 / static_cast<double>(n_small);
    const double inv_large = 1.0 / static_cast<double>(n_pool - n_small);
    for (std::size_t i = 0; i < n_bins; ++i) {
      cum_subset += subset_counts[i];
      cum_pool = pooled_cum[i];
      const double f_small = static_cast<double>(cum_subset) * inv_small;
      const double f_large = static_cast<double>(cum_pool - cum_subset) * inv_large;
      max_diff = std::max(max_diff, std::abs(f_small - f_large));
    }
    if (max_diff >= observed - 1e-12) ++count_ge;
  }
  return static_cast<double>(count_ge) / static_cast<double>(n_permutations);
}

}  // namespace ghostspec
