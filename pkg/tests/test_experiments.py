"""Scenario presets, config grammar, artifacts, decay fits and sweeps."""

import math
import os
from dataclasses import replace

import numpy as np
import pytest

from evodom import (
    ConfigError,
    EvolutionRate,
    ModelParams,
    PulseFunction,
    SweepPathError,
    compute_index,
    estimate_decay_rate,
    get_preset,
    initial_condition,
    parse_config,
    reconstruct_physical,
    run_scenario,
    simulate,
    sweep,
)
from evodom.engine import Grid, OutputSpec
from evodom.experiments import (
    EXTINCTION,
    PERSISTENCE,
    PRESETS,
    classify,
    read_csv,
    write_csv,
)


def coarse(scenario, ny=31, steps=64, n_periods=None):
    grid = Grid.for_model(scenario.params, ny=ny, steps_per_period=steps)
    out = replace(scenario, grid=grid)
    if n_periods:
        out = replace(out, n_periods=n_periods)
    return out


class TestPresets:
    def test_all_presets_carry_benchmark_parameters(self):
        for s in PRESETS.values():
            assert s.params.d == 1.0
            assert s.params.alpha == 1.1
            assert s.params.gamma == 0.05
            assert s.params.l0 == math.pi
            assert s.params.T == 2.0
            assert s.v0_modes == {1: 0.5, 3: 0.2}

    def test_aliases_resolve(self):
        assert get_preset("4.1b") is get_preset("example-4.1-rho2")
        preset = get_preset("example-4.1-rho2")
        assert preset.rho.amplitude == +0.1
        assert preset.pulse.kind == "beverton-holt"
        assert (preset.pulse.a, preset.pulse.m) == (10.0, 8.0)

    def test_unknown_preset(self):
        with pytest.raises(KeyError):
            get_preset("definitely-not-a-preset")

    def test_harvested_variant_uses_smaller_map(self):
        s = get_preset("4.3c")
        assert s.pulse.m == 5.0
        assert compute_index(s.params, s.rho, s.pulse).r0 < 1.0
        # while the harvest-free index for the same rate exceeds 1
        assert compute_index(s.params, s.rho,
                             PulseFunction.identity()).r0 > 1.0


class TestConfigParsing:
    def test_preset_reference(self):
        s = parse_config("[scenario]\npreset = example-4.1-rho2\n")
        assert s.rho.amplitude == +0.1
        assert s.pulse.kind == "beverton-holt"

    def test_empty_pulse_section_means_no_harvest(self):
        text = """
[model]
d = 1.0
alpha = 1.1
gamma = 0.05
l0 = 3.141592653589793
T = 2.0
[rho]
kind = exp-cosine
amplitude = -0.1
[pulse]
"""
        s = parse_config(text)
        assert s.pulse.kind == "identity"

    def test_negative_gamma_rejected_with_location(self):
        text = "[model]\nd = 1\nalpha = 1.1\ngamma = -1\nl0 = 3.14\nT = 2\n"
        with pytest.raises(ConfigError) as err:
            parse_config(text)
        assert err.value.key == "gamma"
        assert err.value.line == 4

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError) as err:
            parse_config("[model]\nbogus = 1\n")
        assert err.value.key == "bogus"

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("[nonsense]\nx = 1\n")

    def test_type_mismatch_rejected(self):
        with pytest.raises(ConfigError) as err:
            parse_config("[scenario]\npreset = 4.1a\n[grid]\nny = tiny\n")
        assert err.value.key == "ny"

    def test_missing_model_keys_named(self):
        with pytest.raises(ConfigError) as err:
            parse_config("[model]\nd = 1.0\n")
        assert "alpha" in str(err.value)

    def test_mode_map_parsing(self):
        s = parse_config(
            "[scenario]\npreset = 4.1a\n[run]\nmodes = 1:0.25, 5:0.1\n")
        assert s.v0_modes == {1: 0.25, 5: 0.1}

    def test_overrides_on_preset(self):
        s = parse_config(
            "[scenario]\npreset = 4.1a\n[model]\nd = 0.5\n[grid]\nny = 31\n")
        assert s.params.d == 0.5
        assert s.grid.ny == 31
        assert s.rho.amplitude == -0.1  # inherited

    def test_exp_cosine_requires_amplitude(self):
        text = ("[model]\nd = 1\nalpha = 1.1\ngamma = 0.05\nl0 = 3.14\nT = 2\n"
                "[rho]\nkind = exp-cosine\n")
        with pytest.raises(ConfigError) as err:
            parse_config(text)
        assert err.value.key == "amplitude"


class TestClassification:
    def test_empty_is_unspecified(self):
        assert classify(np.array([])) == "unspecified"

    def test_deep_collapse(self):
        assert classify(np.array([1e-2, 1e-5, 1e-12])) == EXTINCTION

    def test_sustained_decay(self):
        s = 0.5 * 0.8 ** np.arange(12)
        assert classify(s) == EXTINCTION

    def test_plateau(self):
        s = np.concatenate((np.linspace(0.5, 2.0, 10), np.full(8, 2.0)))
        assert classify(s) == PERSISTENCE

    def test_transient_dip_then_plateau_is_persistence(self):
        # early decay must not trigger the extinction trend rule
        s = np.concatenate((0.5 * 0.7 ** np.arange(8), np.full(8, 0.03)))
        assert classify(s) == PERSISTENCE


class TestDecayEstimate:
    def test_exact_exponential(self):
        t = 2.0 * (np.arange(20) + 1)
        series = 3.7 * np.exp(-0.3 * t)
        est = estimate_decay_rate(series, 2.0)
        assert est.reliable
        assert est.rate == pytest.approx(-0.3, abs=1e-6)

    def test_growth_is_positive_rate(self):
        t = 2.0 * (np.arange(20) + 1)
        est = estimate_decay_rate(0.01 * np.exp(0.16 * t), 2.0)
        assert est.reliable
        assert est.rate == pytest.approx(0.16, abs=1e-6)

    def test_plateau_flagged_unreliable(self):
        rng = np.random.default_rng(7)
        series = 2.0 + 1e-9 * rng.standard_normal(24)
        est = estimate_decay_rate(series, 2.0)
        assert not est.reliable

    def test_needs_ten_periods(self):
        with pytest.raises(ValueError):
            estimate_decay_rate(np.ones(9), 2.0)

    def test_linearized_benchmark_run(self, params, rho_shrink, bh):
        grid = Grid.for_model(params, ny=99, steps_per_period=512)
        v0 = initial_condition({1: 0.5, 3: 0.2}, grid, params.l0)
        traj = simulate(params, rho_shrink, bh, grid, v0, 20, linearized=True)
        est = estimate_decay_rate(traj.period_sup_norms, params.T)
        rep = compute_index(params, rho_shrink, bh)
        assert est.rate == pytest.approx(rep.lambda_star, rel=0.01)


class TestPhysicalReconstruction:
    def test_initial_frame_is_identity(self, params, rho_grow, bh, coarse_grid):
        v0 = initial_condition({1: 0.5}, coarse_grid, params.l0)
        traj = simulate(params, rho_grow, bh, coarse_grid, v0, 1)
        phys = reconstruct_physical(traj, rho_grow)
        first = phys.frames[0]
        assert first.time == 0.0
        assert np.array_equal(first.x, coarse_grid.y)

    def test_peak_domain_endpoint(self, params, rho_grow, bh, coarse_grid):
        v0 = initial_condition({1: 0.5}, coarse_grid, params.l0)
        traj = simulate(params, rho_grow, bh, coarse_grid, v0, 1,
                        output=OutputSpec(stride=coarse_grid.steps_per_period // 2))
        phys = reconstruct_physical(traj, rho_grow)
        peak = [length for t, length in
                zip(phys.endpoint_times, phys.endpoint_lengths)
                if abs(t - 1.0) < 1e-12]
        # endpoint at the half period: e^{0.2} pi (direct evaluation)
        assert peak[0] == pytest.approx(3.8371499321103004, rel=1e-12)

    def test_values_are_relabelled_not_changed(self, params, rho_grow, bh,
                                               coarse_grid):
        v0 = initial_condition({1: 0.5}, coarse_grid, params.l0)
        traj = simulate(params, rho_grow, bh, coarse_grid, v0, 2)
        phys = reconstruct_physical(traj, rho_grow)
        for snap, frame in zip(traj.snapshots, phys.frames):
            assert frame.u is snap.values
            t_local = math.fmod(snap.time, params.T)
            assert np.allclose(frame.x, rho_grow.value(t_local) * coarse_grid.y,
                               rtol=1e-15)

    def test_static_domain_frames_coincide(self, params, rho_const, identity,
                                           coarse_grid):
        v0 = initial_condition({1: 0.5}, coarse_grid, params.l0)
        traj = simulate(params, rho_const, identity, coarse_grid, v0, 1)
        phys = reconstruct_physical(traj, rho_const)
        for frame in phys.frames:
            assert np.array_equal(frame.x, coarse_grid.y)


class TestRunScenario:
    def test_extinction_preset(self, tmp_path):
        rec = run_scenario(coarse(get_preset("4.1a"), ny=63, steps=256),
                           out_dir=str(tmp_path))
        assert rec.classification == EXTINCTION
        assert rec.report.r0 == pytest.approx(0.8177, abs=5e-4)
        assert rec.clamp_count == 0
        for name in ("periods.csv", "field.csv", "physical.csv",
                     "domain_endpoint.csv", "field.dat", "record.txt"):
            assert os.path.exists(tmp_path / name)

    def test_persistence_preset_with_orbit(self, tmp_path):
        rec = run_scenario(coarse(get_preset("4.1b"), ny=63, steps=256),
                           out_dir=str(tmp_path))
        assert rec.classification == PERSISTENCE
        assert rec.orbit_min is not None and rec.orbit_min > 0
        assert rec.orbit_residual < 1e-8
        assert os.path.exists(tmp_path / "orbit.csv")

    def test_expected_classification_recorded(self):
        rec = run_scenario(coarse(get_preset("4.3c"), ny=31, steps=64))
        assert rec.classification == EXTINCTION


class TestArtifacts:
    def test_csv_round_trip_exact(self, tmp_path):
        rows = [(1, 0.1 + 0.2, math.pi), (2, 1e-17, 2.0 / 3.0)]
        path = tmp_path / "x.csv"
        write_csv(path, ("a", "b", "c"), rows)
        header, back = read_csv(path)
        assert header == ["a", "b", "c"]
        for (a, b, c), row in zip(rows, back):
            assert row[0] == a
            assert row[1] == b   # bit-exact after 17 significant digits
            assert row[2] == c

    def test_line_endings_are_lf(self, tmp_path):
        path = tmp_path / "x.csv"
        write_csv(path, ("a",), [(1.0,)])
        data = open(path, "rb").read()
        assert b"\r" not in data

    def test_deterministic_artifacts(self, tmp_path):
        s = coarse(get_preset("4.1a"), ny=31, steps=64, n_periods=30)
        run_scenario(s, out_dir=str(tmp_path / "one"))
        run_scenario(s, out_dir=str(tmp_path / "two"))
        for name in ("periods.csv", "field.csv", "physical.csv",
                     "domain_endpoint.csv", "field.dat", "record.txt"):
            a = open(tmp_path / "one" / name, "rb").read()
            b = open(tmp_path / "two" / name, "rb").read()
            assert a == b, name

    def test_optional_surface_plot(self, tmp_path):
        pytest.importorskip("matplotlib")
        s = coarse(get_preset("4.1a"), ny=31, steps=64, n_periods=20)
        run_scenario(s, out_dir=str(tmp_path), surface_plot=True)
        data = open(tmp_path / "surface.svg", "rb").read()
        assert data.startswith(b"<?xml")


class TestSweep:
    def test_amplitude_sweep_monotone(self):
        base = coarse(get_preset("4.1a"), ny=31, steps=64)
        res = sweep(base, "rho.amplitude", -0.1, 0.1, 9)
        idx = [p.index for p in res.points]
        assert all(a < b for a, b in zip(idx, idx[1:]))

    def test_diffusion_sweep_decreasing_with_closed_form_crossing(self):
        params = ModelParams(d=1.0, alpha=1.1, gamma=0.05, l0=math.pi, T=2.0)
        base = coarse(get_preset("4.3b"), ny=31, steps=64)
        base = replace(base, rho=EvolutionRate.constant(params.T),
                       pulse=PulseFunction.identity())
        res = sweep(base, "model.d", 0.5, 2.0, 7)
        idx = [p.index for p in res.points]
        assert all(a > b for a, b in zip(idx, idx[1:]))
        assert len(res.crossings) == 1
        # index = alpha/(d lambda1) crosses 1 at d = alpha (lambda1 = 1)
        assert res.crossings[0] == pytest.approx(1.1, abs=1e-6)

    def test_invalid_path_lists_valid_ones(self):
        base = get_preset("4.1a")
        with pytest.raises(SweepPathError, match="rho.amplitude"):
            sweep(base, "model.alpha", 0.5, 2.0, 3)

    def test_sweep_csv(self, tmp_path):
        base = coarse(get_preset("4.1a"), ny=31, steps=64)
        sweep(base, "pulse.m", 2.0, 9.0, 4, out_dir=str(tmp_path))
        header, rows = read_csv(tmp_path / "sweep.csv")
        assert header[0] == "value"
        assert len(rows) == 4

    def test_simulation_backed_sweep_uses_worker_pool(self):
        base = coarse(get_preset("4.1a"), ny=31, steps=64, n_periods=60)
        res = sweep(base, "rho.amplitude", -0.1, 0.1, 2, do_simulate=True,
                    workers=2)
        assert [p.classification for p in res.points] == [EXTINCTION,
                                                          PERSISTENCE]

    def test_workers_env_var_honoured(self, monkeypatch):
        from evodom.experiments import resolve_workers
        monkeypatch.setenv("EVODOM_WORKERS", "3")
        assert resolve_workers() == 3
        assert resolve_workers(workers=1) == 1

    def test_classification_concordance_random_draws(self):
        # simulated outcome agrees with the index sign away from the
        # threshold, across random coefficient draws
        rng = np.random.default_rng(424242)
        checked = 0
        while checked < 50:
            d = float(rng.uniform(0.4, 2.5))
            amp = float(rng.uniform(-0.25, 0.25))
            a = float(rng.uniform(4.0, 15.0))
            m = a * float(rng.uniform(0.3, 0.95))
            params = ModelParams(d=d, alpha=1.1, gamma=0.05, l0=math.pi, T=2.0)
            rho = EvolutionRate.exp_cosine(amp, 2.0)
            pulse = PulseFunction.beverton_holt(a, m)
            rep = compute_index(params, rho, pulse)
            if abs(rep.index - 1.0) <= 0.05:
                continue
            grid = Grid.for_model(params, ny=31, steps_per_period=64)
            from evodom.experiments import Scenario
            s = Scenario(name="draw", params=params, rho=rho, pulse=pulse,
                         grid=grid, v0_modes={1: 0.5, 3: 0.2}, n_periods=200)
            rec = run_scenario(s)
            want = PERSISTENCE if rep.index > 1 else EXTINCTION
            assert rec.classification == want, (d, amp, a, m, rep.index)
            checked += 1
