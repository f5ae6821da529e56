// ghostspec command-line frontend: simulate photon-counting spectra, run
// KS discrimination tests, drive Monte Carlo sweeps, reduce count images,
// and emit plot-ready report series.
//
// Exit codes: 0 success / null accepted, 10 null rejected (test), 2 usage
// or parameter error, 3 data error (missing/malformed files, grid
// mismatch, empty spectra).
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "ghostspec/harness.hpp"
#include "ghostspec/io.hpp"
#include "ghostspec/ks.hpp"
#include "ghostspec/simulate.hpp"

namespace {

constexpr int kExitAccept = 0;
constexpr int kExitReject = 10;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

using namespace ghostspec;

std::uint64_t entropy_seed() {
  std::random_device device;
  return (static_cast<std::uint64_t>(device()) << 32) ^ device();
}

struct ScenarioFlags {
  std::string family;
  std::string config_path;
  double alpha = 0.0;
  double sigma = 0.0;
  std::string table_path;
  std::int64_t n_t = 0;
  std::int64_t n_r = 0;  // 0 = family default
  std::uint64_t seed = 0;
  bool seed_given = false;
};

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& flags) {
  cmd->add_option("--scenario", flags.family,
                  "scenario family: broad | dip | supergaussian | tabulated")
      ->check(CLI::IsMember({"broad", "dip", "supergaussian", "tabulated"}));
  cmd->add_option("--config", flags.config_path,
                  "scenario config file (alternative to --scenario and its parameters)");
  cmd->add_option("--alpha", flags.alpha, "broad family: slope in 1/nm, 0..0.02");
  cmd->add_option("--sigma", flags.sigma, "dip family: dip width in nm, 0..10");
  cmd->add_option("--table", flags.table_path, "tabulated family: transmittance table file");
  cmd->add_option("--nt", flags.n_t, "signal resources N_T");
  cmd->add_option("--nr", flags.n_r, "override the family's reference resources N_R");
  cmd->add_option_function<std::uint64_t>(
      "--seed",
      [&flags](const std::uint64_t& value) {
        flags.seed = value;
        flags.seed_given = true;
      },
      "random seed (default: OS entropy, echoed in the output)");
}

io::ScenarioConfig resolve_config(const ScenarioFlags& flags, bool nt_required) {
  io::ScenarioConfig config;
  if (!flags.config_path.empty()) {
    if (!flags.family.empty())
      throw CLI::ValidationError("--config and --scenario are mutually exclusive");
    config = io::load_scenario_config(flags.config_path);
  } else {
    if (flags.family.empty())
      throw CLI::ValidationError("one of --scenario or --config is required");
    config.family = flags.family;
    config.alpha = flags.alpha;
    config.sigma = flags.sigma;
    config.table_path = flags.table_path;
  }
  if (flags.n_t > 0) config.n_t = flags.n_t;
  if (flags.n_r > 0) config.n_r = flags.n_r;
  if (flags.seed_given) config.seed = flags.seed;
  if (nt_required && config.n_t <= 0)
    throw CLI::ValidationError("--nt must be a positive photon-resource count");
  return config;
}

std::filesystem::path config_base_dir(const ScenarioFlags& flags) {
  if (flags.config_path.empty()) return {};
  return std::filesystem::path(flags.config_path).parent_path();
}

io::Metadata common_metadata(const Scenario& scenario, std::uint64_t seed) {
  io::Metadata meta;
  meta["scenario"] = scenario.label;
  meta["object"] = scenario.object.describe();
  meta["nr"] = std::to_string(scenario.n_reference_resources);
  meta["nt"] = std::to_string(scenario.n_signal_resources);
  meta["seed"] = std::to_string(seed);
  meta["rng"] = std::string(kRngName);
  return meta;
}

int cmd_simulate(const ScenarioFlags& flags, const std::string& out_prefix,
                 bool reference_only, bool signal_only) {
  io::ScenarioConfig config = resolve_config(flags, true);
  if (!flags.seed_given && flags.config_path.empty()) config.seed = entropy_seed();
  const Scenario scenario = io::make_scenario(config, config_base_dir(flags));

  const io::Metadata meta = common_metadata(scenario, config.seed);
  const double fraction = expected_detected_fraction(scenario.reference, scenario.object);

  if (!signal_only) {
    const BinnedSpectrum reference = simulate_reference(scenario);
    io::Metadata ref_meta = meta;
    ref_meta["arm"] = "reference";
    const std::string path = out_prefix + ".reference.dat";
    io::save_spectrum(reference, path, ref_meta);
    std::cout << "reference: " << path << " total=" << reference.total() << "\n";
  }
  if (!reference_only) {
    const BinnedSpectrum signal = simulate_signal(scenario);
    io::Metadata sig_meta = meta;
    sig_meta["arm"] = "signal";
    const std::string path = out_prefix + ".signal.dat";
    io::save_spectrum(signal, path, sig_meta);
    std::cout << "signal: " << path << " total=" << signal.total()
              << " expected-fraction=" << format_real(fraction) << "\n";
  }
  std::cout << "seed: " << config.seed << " rng: " << kRngName << "\n";
  return kExitAccept;
}

int cmd_test(const std::string& signal_path, const std::string& reference_path,
             const std::vector<double>& levels, bool quiet) {
  const BinnedSpectrum signal = io::load_spectrum(signal_path);
  const BinnedSpectrum reference = io::load_spectrum(reference_path);
  const KsOutcome outcome = two_sample_test(signal, reference, levels);

  if (!quiet) {
    std::cout << "statistic:   " << format_real(outcome.statistic) << "\n";
    std::cout << "n_signal:    " << outcome.n_signal << "\n";
    std::cout << "n_reference: " << outcome.n_reference << "\n";
    std::cout << "effective_n: " << format_real(outcome.effective_n) << "\n";
    std::cout << "p_value:     " << format_real(outcome.p_value) << "\n";
    for (const auto& [level, rejected] : outcome.decisions)
      std::cout << "decision@" << format_real(level) << ": "
                << (rejected ? "reject (object present)" : "accept (no object)") << "\n";
  }
  // machine-readable line, one key=value token per field
  std::cout << "RESULT statistic=" << format_real(outcome.statistic)
            << " n_signal=" << outcome.n_signal << " n_reference=" << outcome.n_reference
            << " effective_n=" << format_real(outcome.effective_n)
            << " p_value=" << format_real(outcome.p_value);
  for (const auto& [level, rejected] : outcome.decisions)
    std::cout << " reject@" << format_real(level) << "=" << (rejected ? 1 : 0);
  std::cout << "\n";

  return outcome.decisions.front().second ? kExitReject : kExitAccept;
}

int cmd_sweep(const ScenarioFlags& flags, const std::vector<double>& axis_values,
              const std::vector<std::int64_t>& nt_values, int trials,
              const std::vector<double>& levels, int jobs, bool resample_reference,
              const std::string& out_path, bool quiet) {
  io::ScenarioConfig config = resolve_config(flags, false);
  if (!flags.seed_given && flags.config_path.empty()) config.seed = entropy_seed();
  const std::filesystem::path base_dir = config_base_dir(flags);

  SweepRequest request;
  request.n_t_values = nt_values;
  request.n_trials = trials;
  request.significances = levels;
  request.master_seed = config.seed;
  request.jobs = jobs;
  request.trial_options.resample_reference = resample_reference;

  if (config.family == "broad") {
    request.axis1_name = "alpha";
    request.axis1_values = axis_values;
    request.factory = [](double alpha, std::int64_t n_t, std::uint64_t seed) {
      return scenario_broad_absorber(alpha, n_t, seed);
    };
  } else if (config.family == "dip") {
    request.axis1_name = "sigma";
    request.axis1_values = axis_values;
    request.factory = [](double sigma, std::int64_t n_t, std::uint64_t seed) {
      return scenario_narrow_dip(sigma, n_t, seed);
    };
  } else {
    // single-object families sweep over N_T only
    if (!axis_values.empty())
      throw CLI::ValidationError("--axis applies only to the broad and dip families");
    request.axis1_name = "none";
    request.axis1_values = {0.0};
    const io::ScenarioConfig cell_config = config;
    request.factory = [cell_config, base_dir](double, std::int64_t n_t, std::uint64_t seed) {
      io::ScenarioConfig c = cell_config;
      c.n_t = n_t;
      c.seed = seed;
      return io::make_scenario(c, base_dir);
    };
  }
  if (request.axis1_values.empty())
    throw CLI::ValidationError("--axis needs at least one value for this family");

  if (!quiet)
    request.progress = [](std::size_t done, std::size_t total) {
      std::fprintf(stderr, "[%zu/%zu] cells finished\n", done, total);
    };

  const SweepResult result = sweep(request);
  io::write_sweep(result, out_path);
  std::cout << "sweep: " << out_path << " cells=" << result.cells.size()
            << " trials=" << result.n_trials << " seed=" << result.master_seed
            << " rng=" << result.rng_name << "\n";
  return kExitAccept;
}

int cmd_ingest(const std::string& image_path, const std::string& roi_spec,
               const std::string& out_path) {
  const io::LoadedImage loaded = io::load_count_image(image_path);

  Roi roi{};
  const auto colon = roi_spec.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument("missing ':'");
    roi.row_begin = std::stoul(roi_spec.substr(0, colon));
    roi.row_end = std::stoul(roi_spec.substr(colon + 1));
  } catch (const std::exception&) {
    throw CLI::ValidationError("--roi must be BEGIN:END (half-open row range), got '" +
                               roi_spec + "'");
  }

  const BinnedSpectrum reduced = integrate_roi(loaded.image, roi, loaded.grid);
  io::Metadata meta;
  meta["source-image"] = image_path;
  meta["roi"] = roi_spec;
  io::save_spectrum(reduced, out_path, meta);
  std::cout << "ingest: " << out_path << " rows=[" << roi.row_begin << "," << roi.row_end
            << ") total=" << reduced.total() << "\n";
  return kExitAccept;
}

int cmd_report(const std::string& sweep_path, const std::string& figure,
               const std::string& out_prefix) {
  const SweepResult result = io::read_sweep(sweep_path);

  io::Metadata meta;
  meta["source"] = sweep_path;
  meta["axis1"] = result.axis1_name;
  meta["scenario"] = result.scenario_label;
  meta["trials"] = std::to_string(result.n_trials);
  meta["seed"] = std::to_string(result.master_seed);
  meta["rng"] = result.rng_name;

  auto header_block = [&meta](const std::string& kind) {
    std::string out = "# " + kind + " v1\n";
    for (const auto& [k, v] : meta) out += "# " + k + ": " + v + "\n";
    return out;
  };
  auto write_out = [](const std::string& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw io_error("cannot open " + path + " for writing");
    file << content;
  };

  if (figure == "rates" || figure == "both") {
    // rejection-rate bar series, one row per cell
    std::string out = header_block("ghostspec-report-rates");
    out += "axis1,n_t";
    for (double level : result.significances) out += ",rejection_rate@" + format_real(level);
    out += ",mean_detected\n";
    for (const SweepCell& cell : result.cells) {
      out += format_real(cell.axis1) + "," + std::to_string(cell.n_t);
      for (double rate : cell.rejection_rates) out += "," + format_real(rate);
      out += "," + format_real(cell.mean_realized_total) + "\n";
    }
    const std::string path = out_prefix + ".rates.csv";
    write_out(path, out);
    std::cout << "report: " << path << "\n";
  }
  if (figure == "pbox" || figure == "both") {
    // p-value box series: mean center, quartile box edges, whisker extremes
    std::string out = header_block("ghostspec-report-pbox");
    out += "axis1,n_t,p_mean,p_q25,p_q75,p_min,p_max\n";
    for (const SweepCell& cell : result.cells) {
      out += format_real(cell.axis1) + "," + std::to_string(cell.n_t) + "," +
             format_real(cell.p_stats.mean) + "," + format_real(cell.p_stats.q25) + "," +
             format_real(cell.p_stats.q75) + "," + format_real(cell.p_stats.min) + "," +
             format_real(cell.p_stats.max) + "\n";
    }
    const std::string path = out_prefix + ".pbox.csv";
    write_out(path, out);
    std::cout << "report: " << path << "\n";
  }
  return kExitAccept;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ghost-spectrometry threat discrimination: Poisson spectrum simulation, "
               "two-sample KS testing, Monte Carlo sweeps"};
  app.require_subcommand(1);

  auto* simulate_cmd =
      app.add_subcommand("simulate", "generate reference and signal spectrum files");
  ScenarioFlags sim_flags;
  add_scenario_flags(simulate_cmd, sim_flags);
  std::string sim_prefix = "spectrum";
  bool sim_ref_only = false, sim_sig_only = false;
  simulate_cmd->add_option(
      "--out-prefix", sim_prefix,
      "output prefix; writes <prefix>.reference.dat and <prefix>.signal.dat");
  simulate_cmd->add_flag("--reference-only", sim_ref_only, "write only the reference arm");
  simulate_cmd->add_flag("--signal-only", sim_sig_only, "write only the signal arm");

  auto* test_cmd = app.add_subcommand(
      "test", "two-sample KS test between a signal and a reference spectrum file; "
              "exit 0 = accept null, 10 = reject at the first --levels entry");
  std::string test_signal, test_reference;
  std::vector<double> test_levels = {0.05, 0.01};
  bool test_quiet = false;
  test_cmd->add_option("--signal", test_signal, "signal spectrum file")->required();
  test_cmd->add_option("--reference", test_reference, "reference spectrum file")->required();
  test_cmd
      ->add_option("--levels", test_levels,
                   "significance levels; the first one drives the exit status")
      ->delimiter(',');
  test_cmd->add_flag("--quiet", test_quiet, "print only the machine-readable RESULT line");

  auto* sweep_cmd =
      app.add_subcommand("sweep", "Monte Carlo rejection-rate sweep over an object "
                                  "parameter and the signal resources N_T");
  ScenarioFlags sweep_flags;
  add_scenario_flags(sweep_cmd, sweep_flags);
  std::vector<double> sweep_axis;
  std::vector<std::int64_t> sweep_nts;
  int sweep_trials = 100;
  std::vector<double> sweep_levels = {0.05, 0.01};
  int sweep_jobs = 1;
  bool sweep_resample = false, sweep_quiet = false;
  std::string sweep_out = "sweep.csv";
  sweep_cmd
      ->add_option("--axis", sweep_axis,
                   "object-parameter values (alpha for broad, sigma for dip)")
      ->delimiter(',');
  sweep_cmd->add_option("--nt-values", sweep_nts, "signal resource values N_T")
      ->delimiter(',')
      ->required();
  sweep_cmd->add_option("--trials", sweep_trials, "trials per cell (default 100)");
  sweep_cmd->add_option("--levels", sweep_levels, "significance levels")->delimiter(',');
  sweep_cmd->add_option("--jobs", sweep_jobs,
                        "parallel workers; output is identical at any count");
  sweep_cmd->add_flag("--resample-reference", sweep_resample,
                      "sample a fresh reference every trial instead of once per cell");
  sweep_cmd->add_flag("--quiet", sweep_quiet, "suppress per-cell progress on stderr");
  sweep_cmd->add_option("--out", sweep_out, "output sweep table (CSV)");

  auto* ingest_cmd = app.add_subcommand(
      "ingest", "integrate a count image over a spatial ROI into a spectrum file");
  std::string ingest_image, ingest_roi, ingest_out = "spectrum.dat";
  ingest_cmd->add_option("--image", ingest_image, "count image file")->required();
  ingest_cmd->add_option("--roi", ingest_roi, "half-open spatial row range BEGIN:END")
      ->required();
  ingest_cmd->add_option("--out", ingest_out, "output spectrum file");

  auto* report_cmd = app.add_subcommand(
      "report",
      "emit plot-ready series (rejection-rate bars, p-value boxes) from a sweep table");
  std::string report_sweep, report_figure = "both", report_prefix = "report";
  report_cmd->add_option("--sweep", report_sweep, "sweep table produced by the sweep command")
      ->required();
  report_cmd->add_option("--figure", report_figure, "rates | pbox | both")
      ->check(CLI::IsMember({"rates", "pbox", "both"}));
  report_cmd->add_option("--out-prefix", report_prefix, "output prefix for the series files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(simulate_cmd))
      return cmd_simulate(sim_flags, sim_prefix, sim_ref_only, sim_sig_only);
    if (app.got_subcommand(test_cmd))
      return cmd_test(test_signal, test_reference, test_levels, test_quiet);
    if (app.got_subcommand(sweep_cmd))
      return cmd_sweep(sweep_flags, sweep_axis, sweep_nts, sweep_trials, sweep_levels,
                       sweep_jobs, sweep_resample, sweep_out, sweep_quiet);
    if (app.got_subcommand(ingest_cmd)) return cmd_ingest(ingest_image, ingest_roi, ingest_out);
    if (app.got_subcommand(report_cmd))
      return cmd_report(report_sweep, report_figure, report_prefix);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const invalid_parameter_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const error& e) {  // io, parse, grid, coverage, roi, empty
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
