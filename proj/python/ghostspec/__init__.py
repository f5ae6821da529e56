"""Ghost-spectrometry threat discrimination.

Poisson-sampled binned photon spectra, two-sample Kolmogorov-Smirnov
testing at low SNR, and seeded Monte Carlo rejection-rate sweeps. The heavy
lifting lives in the compiled ``_core`` extension; this package re-exports
its public surface.
"""

from ghostspec._core import (  # noqa: F401
    RNG_NAME,
    BinnedSpectrum,
    CoverageError,
    EmptyMeasurementError,
    EmpiricalCDF,
    GridMismatchError,
    InvalidParameterError,
    InvalidRoiError,
    IoError,
    KsOutcome,
    ParseError,
    PValueStats,
    Scenario,
    SpectralDensity,
    SweepCell,
    SweepResult,
    TransmissionProfile,
    TrialBatch,
    WavelengthGrid,
    __version__,
    apply_transmission,
    decide,
    default_simulation_grid,
    empirical_cdf,
    expected_detected_fraction,
    experiment_grid,
    kolmogorov_sf,
    ks_statistic,
    load_spectrum,
    make_flat_reference,
    make_gaussian_reference,
    one_sample_test,
    permutation_oracle,
    pvalue_stats,
    read_sweep,
    rejection_rate,
    run_trials,
    sample_poisson_counts,
    save_spectrum,
    scenario_broad_absorber,
    scenario_narrow_dip,
    scenario_supergaussian_filter,
    scenario_tabulated,
    simulate_reference,
    simulate_signal,
    sweep,
    two_sample_test,
    wide_flat_grid,
    write_sweep,
)

__all__ = [name for name in dir() if not name.startswith("_")]
