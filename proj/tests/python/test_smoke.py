import math

import numpy as np
import pytest

import cevlab

STANDARD = cevlab.CevParams(k=1.0, l=1.0, sigma=1.0, a=0.75, x0=2.0)


def test_assumption_a_boundary():
    rep = cevlab.validate_assumption_a(STANDARD, 2.0 / 2.75)
    assert rep.feasible
    assert not cevlab.validate_assumption_a(STANDARD, 0.8).feasible
    assert cevlab.max_stable_step(STANDARD) == pytest.approx(2.0 / 2.75, rel=1e-15)


def test_analytic_mean():
    assert cevlab.analytic_mean(STANDARD, 1.0) == pytest.approx(1.3678794411714423216, rel=1e-15)


def test_invalid_params_raise():
    bad = cevlab.CevParams(k=1.0, l=1.0, sigma=1.0, a=1.2, x0=1.0)
    with pytest.raises(cevlab.InvalidParams):
        bad.check()
    assert issubclass(cevlab.InvalidParams, cevlab.Error)


def test_increments_reproducible_and_coarsen():
    a = cevlab.sample_increments(7, 3, 64, 1.0 / 64)
    b = cevlab.sample_increments(7, 3, 64, 1.0 / 64)
    assert np.array_equal(a, b)
    c = cevlab.coarsen(a, 1.0 / 64, 8)
    assert c.shape == (8,)
    assert c.sum() == a.sum()
    with pytest.raises(cevlab.NonDivisibleFactor):
        cevlab.coarsen(a, 1.0 / 64, 5)


def test_simulate_path_positive():
    grid = cevlab.TimeGrid(1.0, 64)
    inc = cevlab.sample_increments(1, 0, 64, grid.dt)
    path = cevlab.simulate_path(cevlab.Scheme.SEMIDISCRETE, STANDARD, grid, inc)
    assert path.values.shape == (65,)
    assert path.values[0] == 2.0
    assert np.all(path.values >= 0.0)
    assert path.times[-1] == 1.0
    with pytest.raises(cevlab.GridMismatch):
        cevlab.simulate_path(cevlab.Scheme.SEMIDISCRETE, STANDARD, grid, inc[:32])


def test_step_functions():
    value, z_negative, clamped = cevlab.semidiscrete_step(1.0, 1.0 / 16, 0.0, STANDARD)
    assert not z_negative and not clamped and value > 0.0
    zero_noise = cevlab.CevParams(k=1.0, l=1.0, sigma=0.0, a=0.75, x0=2.0)
    x = cevlab.euler_step(cevlab.Scheme.EULER_NAIVE, 2.0, 0.1, 0.3, zero_noise)
    assert x == pytest.approx(2.0 - 0.1, rel=1e-15)


def test_strong_error_small_run():
    spec = cevlab.LevelSpec(ref_exponent=8, test_exponents=[3, 4, 5], n_paths=200, master_seed=3)
    rep = cevlab.strong_error(STANDARD, cevlab.Scheme.SEMIDISCRETE, spec)
    assert [lv.exponent for lv in rep.levels] == [3, 4, 5]
    assert rep.max_coupling_discrepancy == 0.0
    assert rep.theoretical_order == pytest.approx(0.1875)
    assert math.isfinite(rep.fitted_order)


def test_fit_order_exact_power_law():
    dts = [2.0**-e for e in range(4, 10)]
    slope, _, r2 = cevlab.fit_order(dts, [0.3 * d**0.5 for d in dts])
    assert slope == pytest.approx(0.5, abs=1e-12)
    assert r2 == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(cevlab.InsufficientPoints):
        cevlab.fit_order([0.1], [0.2])


def test_thread_count_does_not_change_results():
    grid = cevlab.TimeGrid(1.0, 32)
    one = cevlab.moment_check(STANDARD, cevlab.Scheme.SEMIDISCRETE, grid, 2000, 5, threads=1)
    four = cevlab.moment_check(STANDARD, cevlab.Scheme.SEMIDISCRETE, grid, 2000, 5, threads=4)
    assert one.sample_mean == four.sample_mean
    assert one.se_second == four.se_second


def test_negativity_and_price():
    grid = cevlab.TimeGrid(1.0, 16)
    params = cevlab.CevParams(k=1.0, l=1.0, sigma=1.0, a=0.75, x0=1.0)
    stats = cevlab.negativity_stats(params, grid, 500, 9)
    assert stats.total_steps == 8000
    assert stats.z_negative_events == 0
    est = cevlab.price_payoff(STANDARD, cevlab.Payoff.EUROPEAN_PUT, 0.0, grid, 1000, 2)
    assert est.price == 0.0
    assert est.negative_terminal_fraction == 0.0


def test_run_cli_check():
    code, out, err = cevlab.run_cli(
        ["check", "--model.k=1", "--model.l=1", "--model.sigma=1", "--model.a=0.75", "--model.x0=2", "--out=-"]
    )
    assert code == 0, err
    assert out.startswith("metric,value,se")
    code, _, _ = cevlab.run_cli(["frobnicate"])
    assert code == 1
