#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ghostspec/ks.hpp"
#include "ghostspec/simulate.hpp"

namespace ghostspec {

/// One Monte Carlo batch: repeated signal draws tested against a single
/// sampled reference, mirroring the one-calibration-many-measurements
/// protocol.
struct TrialBatch {
  std::string descriptor;
  int n_trials = 0;
  std::vector<double> p_values;
  std::vector<double> statistics;
  std::vector<std::int64_t> realized_totals;  ///< detected photons per trial
};

/// Five-number p-value summary: box center is the mean, box edges the
/// 25th/75th percentiles, whiskers the extremes.
struct PValueStats {
  double mean = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct SweepCell {
  double axis1 = 0.0;
  std::int64_t n_t = 0;
  std::vector<double> rejection_rates;  ///< parallel to SweepResult::significances
  PValueStats p_stats;
  double mean_realized_total = 0.0;
};

/// Full Cartesian sweep over an object parameter and the signal resource
/// budget. Cells are row-major: axis1 outer, N_T inner.
struct SweepResult {
  std::string axis1_name;
  std::string scenario_label;
  std::string grid_descriptor;
  std::vector<double> axis1_values;
  std::vector<std::int64_t> n_t_values;
  std::vector<double> significances;
  int n_trials = 0;
  std::uint64_t master_seed = 0;
  std::string rng_name;
  std::vector<SweepCell> cells;

  const SweepCell& cell(std::size_t i_axis1, std::size_t i_nt) const {
    return cells[i_axis1 * n_t_values.size() + i_nt];
  }
};

struct TrialOptions {
  /// When true, a fresh reference is sampled for every trial instead of one
  /// per batch.
  bool resample_reference = false;
};

/// Run n_trials independent signal simulations of the scenario and KS-test
/// each against one reference sampled once per batch from N_R resources.
/// The scenario's own seed is ignored; all randomness derives from
/// master_seed. Deterministic.
TrialBatch run_trials(const Scenario& scenario, int n_trials, std::uint64_t master_seed,
                      const std::vector<double>& significance_levels = {0.05, 0.01},
                      const TrialOptions& options = {});

/// Fraction of trials with p < significance.
double rejection_rate(const TrialBatch& batch, double significance);

/// Percentiles by linear interpolation of the sorted sample; min/max exact.
PValueStats pvalue_stats(const TrialBatch& batch);

/// Builds the scenario for one sweep cell. The seed it receives is the
/// per-cell seed; run_trials re-derives per-trial substreams from it.
using ScenarioFactory =
    std::function<Scenario(double axis1_value, std::int64_t n_t, std::uint64_t seed)>;

struct SweepRequest {
  ScenarioFactory factory;
  std::string axis1_name;
  std::vector<double> axis1_values;
  std::vector<std::int64_t> n_t_values;
  int n_trials = 100;
  std::vector<double> significances = {0.05, 0.01};
  std::uint64_t master_seed = 0;
  int jobs = 1;
  TrialOptions trial_options;
  /// Called after each finished cell with (finished, total). May be empty.
  /// Invoked from worker threads; keep it cheap and thread-safe.
  std::function<void(std::size_t, std::size_t)> progress;
};

/// Evaluate the full axis1 x N_T grid. Per-cell seeds derive from
/// (master_seed, axis indices), so any cell can be reproduced in isolation
/// and the result is byte-identical regardless of the job count.
SweepResult sweep(const SweepRequest& request);

/// Permutation-test calibration oracle for the asymptotic p-value: pools
/// the two count multisets, re-splits the photons into groups of the
/// original sizes uniformly at random, recomputes the KS statistic, and
/// returns the fraction of permuted statistics >= the observed one.
double permutation_oracle(const BinnedSpectrum& signal, const BinnedSpectrum& reference,
                          int n_permutations, std::uint64_t seed);

}  // namespace ghostspec
