"""Smoke tests for the python bindings: exercises the main operations
end to end without re-testing the numerics (the C++ suites own that)."""

import math

import pytest

import ghostspec as gs


def test_grid_and_reference_shapes():
    grid = gs.WavelengthGrid.uniform(790.0, 0.25, 121)
    ref = gs.make_gaussian_reference(grid, 805.0, 4.0)
    assert len(ref) == 121
    peak = max(ref.intensity)
    assert peak == pytest.approx(1.0)
    flat = gs.make_flat_reference(grid)
    assert all(v == 1.0 for v in flat.intensity)


def test_transmission_profiles():
    dip = gs.TransmissionProfile.gaussian_dip(0.2, 805.0, 3.0)
    assert dip.transmittance_at(805.0) == pytest.approx(0.8)
    sg = gs.TransmissionProfile.super_gaussian(807.0, 7.5, 4)
    assert sg.transmittance_at(807.0 + 3.75) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        gs.TransmissionProfile.gaussian_dip(1.5, 805.0, 3.0)


def test_ks_pipeline():
    grid = gs.WavelengthGrid.uniform(800.0, 1.0, 4)
    s = gs.BinnedSpectrum(grid, [1, 1, 1, 1])
    out = gs.two_sample_test(s, s)
    assert out.statistic == 0.0
    assert out.p_value == 1.0
    assert not out.reject_at_005
    assert gs.kolmogorov_sf(0.0) == 1.0
    assert gs.kolmogorov_sf(1.358) == pytest.approx(0.05, abs=5e-4)
    cdf = gs.empirical_cdf(s)
    assert cdf.values == pytest.approx([0.25, 0.5, 0.75, 1.0])


def test_simulation_determinism():
    scenario = gs.scenario_broad_absorber(0.016, 10000, seed=7)
    a = gs.simulate_signal(scenario)
    b = gs.simulate_signal(scenario)
    assert a.counts == b.counts
    assert a.total < 10000  # the absorber eats part of the budget
    fraction = gs.expected_detected_fraction(scenario.reference, scenario.object)
    assert 0.7 < fraction < 0.82


def test_detection_workflow():
    scenario = gs.scenario_narrow_dip(6.0, 15000, seed=0)
    reference = gs.simulate_reference(scenario)
    signal = gs.simulate_signal(scenario)
    out = gs.two_sample_test(signal, reference)
    assert gs.decide(out, 0.05)


def test_trials_and_sweep():
    scenario = gs.scenario_broad_absorber(0.0, 3000, seed=0)
    batch = gs.run_trials(scenario, 50, master_seed=11)
    assert batch.n_trials == 50
    assert gs.rejection_rate(batch, 0.05) <= 0.1
    stats = gs.pvalue_stats(batch)
    assert stats.min <= stats.q25 <= stats.q75 <= stats.max

    result = gs.sweep("broad", [0.0, 0.016], [300, 3000], n_trials=10, master_seed=3, jobs=2)
    assert len(result.cells) == 4
    assert result.rng_name == gs.RNG_NAME


def test_spectrum_file_roundtrip(tmp_path):
    grid = gs.WavelengthGrid.uniform(790.0, 0.5, 8)
    s = gs.BinnedSpectrum(grid, [0, 3, 9, 27, 9, 3, 1, 0])
    path = str(tmp_path / "s.dat")
    gs.save_spectrum(s, path, {"seed": "1"})
    loaded = gs.load_spectrum(path)
    assert loaded.counts == s.counts
    assert loaded.grid.matches(s.grid)
