// Python bindings for the ghostspec core: spectral data model, KS test,
// photon simulation, and the Monte Carlo harness.
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ghostspec/harness.hpp"
#include "ghostspec/io.hpp"
#include "ghostspec/ks.hpp"
#include "ghostspec/simulate.hpp"

namespace py = pybind11;
using namespace ghostspec;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Ghost-spectrometry threat discrimination: Poisson spectrum simulation and "
            "two-sample Kolmogorov-Smirnov testing";

  py::register_exception<invalid_parameter_error>(m, "InvalidParameterError", PyExc_ValueError);
  py::register_exception<grid_mismatch_error>(m, "GridMismatchError", PyExc_ValueError);
  py::register_exception<empty_measurement_error>(m, "EmptyMeasurementError", PyExc_ValueError);
  py::register_exception<coverage_error>(m, "CoverageError", PyExc_ValueError);
  py::register_exception<invalid_roi_error>(m, "InvalidRoiError", PyExc_ValueError);
  py::register_exception<parse_error>(m, "ParseError", PyExc_ValueError);
  py::register_exception<io_error>(m, "IoError", PyExc_OSError);

  py::class_<WavelengthGrid>(m, "WavelengthGrid")
      .def(py::init<std::vector<double>>(), py::arg("bin_centers"))
      .def_static("uniform", &WavelengthGrid::uniform, py::arg("start_nm"), py::arg("step_nm"),
                  py::arg("bins"))
      .def_property_readonly("bin_centers", &WavelengthGrid::bin_centers)
      .def_property_readonly("is_uniform", &WavelengthGrid::is_uniform)
      .def("matches", &WavelengthGrid::matches)
      .def("__len__", &WavelengthGrid::size)
      .def("__getitem__",
           [](const WavelengthGrid& g, std::size_t i) {
             if (i >= g.size()) throw py::index_error();
             return g[i];
           });

  py::class_<BinnedSpectrum>(m, "BinnedSpectrum")
      .def(py::init<WavelengthGrid, std::vector<std::int64_t>>(), py::arg("grid"),
           py::arg("counts"))
      .def_property_readonly("grid", &BinnedSpectrum::grid)
      .def_property_readonly("counts", &BinnedSpectrum::counts)
      .def_property_readonly("total", &BinnedSpectrum::total)
      .def("__len__", &BinnedSpectrum::size);

  py::class_<SpectralDensity>(m, "SpectralDensity")
      .def(py::init<WavelengthGrid, std::vector<double>>(), py::arg("grid"),
           py::arg("intensity"))
      .def_property_readonly("grid", &SpectralDensity::grid)
      .def_property_readonly("intensity", &SpectralDensity::intensity)
      .def("normalized_shape", &SpectralDensity::normalized_shape)
      .def("__len__", &SpectralDensity::size);

  py::class_<TransmissionProfile>(m, "TransmissionProfile")
      .def_static("linear_slope", &TransmissionProfile::linear_slope, py::arg("alpha_per_nm"),
                  py::arg("lambda_ref_nm"))
      .def_static("gaussian_dip", &TransmissionProfile::gaussian_dip, py::arg("depth"),
                  py::arg("center_nm"), py::arg("sigma_nm"))
      .def_static("super_gaussian", &TransmissionProfile::super_gaussian, py::arg("center_nm"),
                  py::arg("fwhm_nm"), py::arg("order"))
      .def_static("tabulated", &TransmissionProfile::tabulated, py::arg("wavelengths_nm"),
                  py::arg("transmittance"))
      .def_static("identity", &TransmissionProfile::identity)
      .def("transmittance_at", &TransmissionProfile::transmittance_at, py::arg("lambda_nm"))
      .def("describe", &TransmissionProfile::describe);

  py::class_<EmpiricalCDF>(m, "EmpiricalCDF")
      .def_property_readonly("grid", &EmpiricalCDF::grid)
      .def_property_readonly("values", &EmpiricalCDF::values)
      .def("__len__", &EmpiricalCDF::size);

  py::class_<KsOutcome>(m, "KsOutcome")
      .def_readonly("statistic", &KsOutcome::statistic)
      .def_readonly("n_signal", &KsOutcome::n_signal)
      .def_readonly("n_reference", &KsOutcome::n_reference)
      .def_readonly("effective_n", &KsOutcome::effective_n)
      .def_readonly("p_value", &KsOutcome::p_value)
      .def_readonly("reject_at_005", &KsOutcome::reject_at_005)
      .def_readonly("reject_at_001", &KsOutcome::reject_at_001)
      .def_readonly("decisions", &KsOutcome::decisions)
      .def("__repr__", [](const KsOutcome& o) {
        return "KsOutcome(statistic=" + format_real(o.statistic) +
               ", p_value=" + format_real(o.p_value) + ")";
      });

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("n_reference_resources", &Scenario::n_reference_resources)
      .def_readonly("n_signal_resources", &Scenario::n_signal_resources)
      .def_readwrite("seed", &Scenario::seed)
      .def_readonly("label", &Scenario::label)
      .def_property_readonly("reference", [](const Scenario& s) { return s.reference; })
      .def_property_readonly("object", [](const Scenario& s) { return s.object; });

  py::class_<PValueStats>(m, "PValueStats")
      .def_readonly("mean", &PValueStats::mean)
      .def_readonly("q25", &PValueStats::q25)
      .def_readonly("q75", &PValueStats::q75)
      .def_readonly("min", &PValueStats::min)
      .def_readonly("max", &PValueStats::max);

  py::class_<TrialBatch>(m, "TrialBatch")
      .def_readonly("descriptor", &TrialBatch::descriptor)
      .def_readonly("n_trials", &TrialBatch::n_trials)
      .def_readonly("p_values", &TrialBatch::p_values)
      .def_readonly("statistics", &TrialBatch::statistics)
      .def_readonly("realized_totals", &TrialBatch::realized_totals);

  py::class_<SweepCell>(m, "SweepCell")
      .def_readonly("axis1", &SweepCell::axis1)
      .def_readonly("n_t", &SweepCell::n_t)
      .def_readonly("rejection_rates", &SweepCell::rejection_rates)
      .def_readonly("p_stats", &SweepCell::p_stats)
      .def_readonly("mean_realized_total", &SweepCell::mean_realized_total);

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("axis1_name", &SweepResult::axis1_name)
      .def_readonly("axis1_values", &SweepResult::axis1_values)
      .def_readonly("n_t_values", &SweepResult::n_t_values)
      .def_readonly("significances", &SweepResult::significances)
      .def_readonly("n_trials", &SweepResult::n_trials)
      .def_readonly("master_seed", &SweepResult::master_seed)
      .def_readonly("rng_name", &SweepResult::rng_name)
      .def_readonly("cells", &SweepResult::cells);

  // spectra-core operations
  m.def("make_gaussian_reference", &make_gaussian_reference, py::arg("grid"),
        py::arg("lambda0_nm"), py::arg("sigma_nm"));
  m.def("make_flat_reference", &make_flat_reference, py::arg("grid"));
  m.def("apply_transmission", &apply_transmission, py::arg("density"), py::arg("profile"));
  m.def("empirical_cdf", &empirical_cdf, py::arg("spectrum"));

  // ks-test operations
  m.def("ks_statistic", &ks_statistic, py::arg("f_signal"), py::arg("f_reference"));
  m.def("kolmogorov_sf", &kolmogorov_sf, py::arg("x"));
  m.def("two_sample_test", &two_sample_test, py::arg("signal"), py::arg("reference"),
        py::arg("significance_levels") = std::vector<double>{0.05, 0.01});
  m.def("one_sample_test", &one_sample_test, py::arg("signal"), py::arg("model"),
        py::arg("significance_levels") = std::vector<double>{0.05, 0.01});
  m.def("decide", &decide, py::arg("outcome"), py::arg("significance"));

  // photon-sim operations
  m.def("default_simulation_grid", &default_simulation_grid);
  m.def("wide_flat_grid", &wide_flat_grid);
  m.def("experiment_grid", &experiment_grid);
  m.def("sample_poisson_counts", &sample_poisson_counts, py::arg("density"),
        py::arg("n_resources"), py::arg("seed"));
  m.def("simulate_reference", &simulate_reference, py::arg("scenario"));
  m.def("simulate_signal", &simulate_signal, py::arg("scenario"));
  m.def("expected_detected_fraction", &expected_detected_fraction, py::arg("reference"),
        py::arg("object"));
  m.def("scenario_broad_absorber", &scenario_broad_absorber, py::arg("alpha_per_nm"),
        py::arg("n_signal_resources"), py::arg("seed"));
  m.def("scenario_narrow_dip", &scenario_narrow_dip, py::arg("sigma_nm"),
        py::arg("n_signal_resources"), py::arg("seed"));
  m.def("scenario_supergaussian_filter", &scenario_supergaussian_filter,
        py::arg("n_signal_resources"), py::arg("seed"));
  m.def("scenario_tabulated", &scenario_tabulated, py::arg("table_wavelengths_nm"),
        py::arg("table_transmittance"), py::arg("n_signal_resources"), py::arg("seed"));

  // mc-harness operations
  m.def(
      "run_trials",
      [](const Scenario& scenario, int n_trials, std::uint64_t master_seed,
         const std::vector<double>& levels, bool resample_reference) {
        TrialOptions options;
        options.resample_reference = resample_reference;
        return run_trials(scenario, n_trials, master_seed, levels, options);
      },
      py::arg("scenario"), py::arg("n_trials"), py::arg("master_seed"),
      py::arg("significance_levels") = std::vector<double>{0.05, 0.01},
      py::arg("resample_reference") = false);
  m.def("rejection_rate", &rejection_rate, py::arg("batch"), py::arg("significance"));
  m.def("pvalue_stats", &pvalue_stats, py::arg("batch"));
  m.def("permutation_oracle", &permutation_oracle, py::arg("signal"), py::arg("reference"),
        py::arg("n_permutations"), py::arg("seed"));
  m.def(
      "sweep",
      [](const std::string& family, const std::vector<double>& axis1_values,
         const std::vector<std::int64_t>& n_t_values, int n_trials,
         const std::vector<double>& significances, std::uint64_t master_seed, int jobs) {
        SweepRequest request;
        if (family == "broad") {
          request.axis1_name = "alpha";
          request.factory = [](double a, std::int64_t nt, std::uint64_t s) {
            return scenario_broad_absorber(a, nt, s);
          };
        } else if (family == "dip") {
          request.axis1_name = "sigma";
          request.factory = [](double sg, std::int64_t nt, std::uint64_t s) {
            return scenario_narrow_dip(sg, nt, s);
          };
        } else {
          throw invalid_parameter_error("sweep family must be 'broad' or 'dip'");
        }
        request.axis1_values = axis1_values;
        request.n_t_values = n_t_values;
        request.n_trials = n_trials;
        request.significances = significances;
        request.master_seed = master_seed;
        request.jobs = jobs;
        py::gil_scoped_release release;
        return sweep(request);
      },
      py::arg("family"), py::arg("axis1_values"), py::arg("n_t_values"),
      py::arg("n_trials") = 100, py::arg("significances") = std::vector<double>{0.05, 0.01},
      py::arg("master_seed") = 0, py::arg("jobs") = 1);

  // io operations
  m.def(
      "load_spectrum",
      [](const std::string& path) { return io::load_spectrum(path); }, py::arg("path"));
  m.def(
      "save_spectrum",
      [](const BinnedSpectrum& s, const std::string& path,
         const std::map<std::string, std::string>& metadata) {
        io::save_spectrum(s, path, metadata);
      },
      py::arg("spectrum"), py::arg("path"),
      py::arg("metadata") = std::map<std::string, std::string>{});
  m.def(
      "write_sweep",
      [](const SweepResult& r, const std::string& path) { io::write_sweep(r, path); },
      py::arg("result"), py::arg("path"));
  m.def(
      "read_sweep", [](const std::string& path) { return io::read_sweep(path); },
      py::arg("path"));

  m.attr("RNG_NAME") = std::string(kRngName);
  m.attr("__version__") = "1.0.0";
}
