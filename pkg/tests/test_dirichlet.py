from __future__ import annotations

import math
import os

import numpy as np
import pytest

from rescert.dirichlet import (
    derivative_bound,
    eval_DN,
    eval_R,
    grid_sup,
    resonance_guided_search,
)
from rescert.errors import ResourceLimitError
from rescert.multfn import archimedean_cmf, constant_one, steinhaus_sample
from rescert.ntcore import build_factor_table
from rescert.resonator import build_resonator, degenerate_resonator, support_elements

TABLE = build_factor_table(20_000)
RES20 = build_resonator(math.exp(20.0), TABLE)  # support {1, 61}


def test_eval_dn_at_zero():
    one = constant_one()
    assert eval_DN(one, 4, 0.0, TABLE) == pytest.approx(2.0, rel=1e-14)
    assert eval_DN(one, 2, 0.0, TABLE) == pytest.approx(math.sqrt(2.0), rel=1e-14)
    assert eval_DN(one, 1, 1.7, TABLE) == pytest.approx(1.0, rel=1e-14)


def test_eval_dn_triangle_bound():
    rng = np.random.default_rng(3)
    f = steinhaus_sample(11)
    for _ in range(20):
        t = float(rng.uniform(-100.0, 100.0))
        n = int(rng.integers(1, 300))
        assert abs(eval_DN(f, n, t, TABLE)) <= math.sqrt(n) + 1e-9


def test_eval_dn_conjugate_symmetry():
    # Real coefficients make D(-t) the conjugate of D(t).
    one = constant_one()
    for t in (0.3, 2.0, 55.5):
        assert eval_DN(one, 50, -t, TABLE) == pytest.approx(
            eval_DN(one, 50, t, TABLE).conjugate(), rel=1e-12
        )


def test_eval_dn_archimedean_shift_identity():
    # n^{i alpha} coefficients just translate the argument.
    alpha = 0.9
    arch = archimedean_cmf(alpha)
    one = constant_one()
    for t in (-3.0, 0.0, 1.2, 40.0):
        assert eval_DN(arch, 80, t, TABLE) == pytest.approx(
            eval_DN(one, 80, t + alpha, TABLE), abs=1e-12
        )


def test_eval_r():
    one = constant_one()
    support = support_elements(RES20, RES20.x)
    v0 = eval_R(RES20, one, 0.0, support, TABLE)
    assert v0 == pytest.approx(1.0 + RES20.r_p[61], rel=1e-14)
    # Triangle bound at arbitrary t; plain-integer support also accepted.
    vt = eval_R(RES20, one, 17.3, [1, 61], TABLE)
    assert abs(vt) <= abs(v0) + 1e-12
    empty = degenerate_resonator(3.0)
    assert eval_R(empty, one, 5.0, support_elements(empty, 3.0), TABLE) == 1.0


def test_grid_sup_constant_one_peaks_at_zero():
    for n in (1, 4, 16):
        result = grid_sup(constant_one(), n, 10.0, 0.05, TABLE)
        assert result.t_star == 0.0
        assert result.value == pytest.approx(math.sqrt(n), rel=1e-12)


def test_grid_sup_n1_tie_breaks():
    res = grid_sup(constant_one(), 1, 5.0, 0.1, TABLE)
    assert res.t_star == 0.0 and res.value == 1.0 and res.grid_step == 0.0
    off = grid_sup(constant_one(), 1, 5.0, 0.1, TABLE, window=(2.0, 7.0))
    assert off.t_star == 2.0


def test_grid_sup_refinement_finds_interior_peak():
    # f(n) = n^{-2i} translates the peak of the constant-one polynomial
    # to t = 2, which is generically off the grid.
    result = grid_sup(archimedean_cmf(-2.0), 16, 10.0, 0.05, TABLE)
    assert result.t_star == pytest.approx(2.0, abs=1e-8)
    assert result.value == pytest.approx(4.0, rel=1e-12)
    assert result.refinement_iterations > 0


def test_grid_sup_certified_slack():
    result = grid_sup(constant_one(), 30, 10.0, 0.05, TABLE)
    assert result.certified_slack is not None
    assert result.certified_slack <= 0.05 + 1e-15
    assert result.grid_step == pytest.approx(
        2.0 * 0.05 / derivative_bound(30), rel=1e-14
    )


def test_grid_sup_probe_property():
    # No window point may beat the reported value by more than the slack.
    f = steinhaus_sample(21)
    result = grid_sup(f, 60, 50.0, 0.1, TABLE, window=(2.5, 9.0))
    rng = np.random.default_rng(0)
    for _ in range(200):
        t = float(rng.uniform(2.5, 9.0))
        assert abs(eval_DN(f, 60, t, TABLE)) <= result.value + result.certified_slack + 1e-9


def test_grid_sup_degenerate_window():
    result = grid_sup(constant_one(), 9, 10.0, 0.05, TABLE, window=(3.0, 3.0))
    assert result.t_star == 3.0
    assert result.value == pytest.approx(abs(eval_DN(constant_one(), 9, 3.0, TABLE)), rel=1e-12)


def test_grid_sup_trace(tmp_path):
    path = os.path.join(tmp_path, "trace.csv")
    grid_sup(constant_one(), 4, 2.0, 0.05, TABLE, trace_path=path, trace_stride=10)
    with open(path) as fh:
        lines = fh.read().splitlines()
    assert lines[0] == "t,abs_dn"
    assert len(lines) > 1


def test_grid_sup_validation():
    one = constant_one()
    with pytest.raises(ValueError):
        grid_sup(one, 0, 10.0, 0.1, TABLE)
    with pytest.raises(ValueError):
        grid_sup(one, 4, -1.0, 0.1, TABLE)
    with pytest.raises(ValueError):
        grid_sup(one, 4, 10.0, 0.0, TABLE)
    with pytest.raises(ValueError):
        grid_sup(one, 4, 10.0, 0.1, TABLE, window=(2.0, 1.0))
    with pytest.raises(ResourceLimitError):
        grid_sup(one, 100, 1e6, 1e-6, TABLE, eval_budget=1000)


def test_guided_search_constant_one():
    result = resonance_guided_search(RES20, constant_one(), 25, 20.0, None, TABLE)
    assert abs(result.t_star) <= 1e-6
    assert result.value == pytest.approx(5.0, rel=1e-9)
    assert result.certified_slack is None


def test_guided_search_empty_support_degenerates():
    res = degenerate_resonator(3.0)
    result = resonance_guided_search(res, constant_one(), 16, 10.0, 0.05, TABLE)
    assert result.t_star == 0.0
    assert result.value == pytest.approx(4.0, rel=1e-12)
    # Degenerate path is a plain grid search, so the certificate survives.
    assert result.certified_slack is not None


def test_guided_never_beats_certified_grid():
    for seed in (0, 1, 2):
        f = steinhaus_sample(seed)
        grid = grid_sup(f, 120, 50.0, 0.5, TABLE)
        guided = resonance_guided_search(RES20, f, 120, 50.0, None, TABLE)
        assert guided.value <= grid.value + grid.certified_slack + 1e-9


def test_derivative_bound():
    assert derivative_bound(1) == 0.0
    assert derivative_bound(100) == pytest.approx(10.0 * math.log(100.0), rel=1e-14)
