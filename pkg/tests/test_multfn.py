from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from rescert.multfn import (
    archimedean_cmf,
    constant_one,
    eval_cmf,
    steinhaus_sample,
    values_up_to,
)
from rescert.ntcore import build_factor_table

TABLE = build_factor_table(20_000)


def test_steinhaus_reproducible():
    a = steinhaus_sample(42)
    b = steinhaus_sample(42)
    for p in (2, 3, 61, 9973):
        assert a.prime_value(p) == b.prime_value(p)


def test_steinhaus_seed_sensitivity():
    a = steinhaus_sample(1)
    b = steinhaus_sample(2)
    assert any(a.prime_value(p) != b.prime_value(p) for p in range(2, 101))


def test_unit_modulus_at_primes():
    for f in (constant_one(), archimedean_cmf(0.7), steinhaus_sample(9)):
        assert abs(abs(f.prime_value(2)) - 1.0) <= 1e-15


def test_archimedean_closed_form():
    f = archimedean_cmf(1.3)
    assert cmath.isclose(
        eval_cmf(f, 6, TABLE), cmath.exp(1.3j * math.log(6)), rel_tol=1e-14
    )


def test_archimedean_period_alignment():
    # alpha = 2*pi / log 2 makes f(2) wind exactly once.
    f = archimedean_cmf(2.0 * math.pi / math.log(2.0))
    assert abs(eval_cmf(f, 2, TABLE) - 1.0) <= 1e-12


def test_complete_multiplicativity_examples():
    f = steinhaus_sample(12345)
    f12 = eval_cmf(f, 12, TABLE)
    assert cmath.isclose(
        f12, f.prime_value(2) ** 2 * f.prime_value(3), rel_tol=1e-13
    )
    assert cmath.isclose(eval_cmf(f, 4, TABLE), eval_cmf(f, 2, TABLE) ** 2, rel_tol=1e-13)


def test_complete_multiplicativity_random_pairs():
    f = steinhaus_sample(777)
    rng = np.random.default_rng(7)
    for _ in range(500):
        m = int(rng.integers(1, 140))
        n = int(rng.integers(1, 140))
        fm, fn, fmn = (
            eval_cmf(f, m, TABLE),
            eval_cmf(f, n, TABLE),
            eval_cmf(f, m * n, TABLE),
        )
        assert abs(fmn - fm * fn) <= 1e-12


def test_unit_modulus_up_to_1e4():
    for f in (archimedean_cmf(0.3), steinhaus_sample(5)):
        vals = values_up_to(f, 10_000, TABLE)
        assert np.max(np.abs(np.abs(vals) - 1.0)) <= 1e-12


def test_values_up_to_matches_pointwise():
    for f in (constant_one(), archimedean_cmf(1.1), steinhaus_sample(3)):
        vals = values_up_to(f, 500, TABLE)
        for n in (1, 2, 17, 128, 360, 499, 500):
            assert abs(vals[n - 1] - eval_cmf(f, n, TABLE)) <= 1e-12


def test_labels():
    assert constant_one().label() == "one"
    assert steinhaus_sample(4).label() == "steinhaus(seed=4)"
    assert "archimedean" in archimedean_cmf(0.25).label()


def test_validation():
    from rescert.multfn import UnimodularCMF

    with pytest.raises(ValueError):
        UnimodularCMF(kind="bogus")
    with pytest.raises(ValueError):
        UnimodularCMF(kind="one", prime_limit=1)
    f = steinhaus_sample(1, prime_limit=100)
    with pytest.raises(ValueError):
        f.prime_value(101)
    with pytest.raises(ValueError):
        values_up_to(constant_one(), 0, TABLE)
