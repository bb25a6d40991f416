from __future__ import annotations

import json
import math

import numpy as np
import pytest

from rescert.bump import default_bump, phi_hat
from rescert.errors import ResourceLimitError
from rescert.moments import (
    alpha_shift_error_term,
    balanced_pair_bound_check,
    diagonal_lower_bound,
    diagonal_sum,
    growth_bound_from_n,
    growth_bound_from_t,
    m1_exact,
    m1_main,
    m1_offdiag_bound,
    m1_quadrature,
    m2_exact,
    m2_quadrature,
    min_offdiag_gap,
    moment_main_term,
    offdiag_bound,
    ratio_and_bounds,
    tail_truncation_check,
)
from rescert.multfn import archimedean_cmf, constant_one, steinhaus_sample
from rescert.ntcore import build_factor_table
from rescert.oracle import ToyResonator, diagonal_sum_bruteforce, random_toy_resonator
from rescert.resonator import (
    build_resonator,
    degenerate_resonator,
    support_elements,
    sum_r_squared,
    sum_t_over_sqrt,
)

TABLE = build_factor_table(20_000)
RES20 = build_resonator(math.exp(20.0), TABLE)  # support {1, 61}
R61 = RES20.r_p[61]
T61 = RES20.t_p[61]
SUPP20 = support_elements(RES20, RES20.x)
EMPTY = build_resonator(math.exp(19.0), TABLE)  # window holds no prime
PHI0 = default_bump().transform(0.0).real


# -- first moment -----------------------------------------------------------


def test_m1_trivial_resonator():
    one = constant_one()
    supp = support_elements(EMPTY, EMPTY.x)
    t_bound = 100.0
    expected = t_bound * PHI0  # |R| = 1, so M1 is just the window mass
    assert m1_quadrature(EMPTY, one, t_bound, supp, TABLE) == pytest.approx(
        expected, rel=1e-8
    )
    assert m1_exact(EMPTY, one, t_bound, supp, TABLE) == pytest.approx(
        expected, rel=1e-12
    )
    assert m1_main(EMPTY, t_bound, EMPTY.x) == pytest.approx(expected, rel=1e-12)


def test_m1_main_single_prime():
    t_bound = 1e4
    assert m1_main(RES20, t_bound, RES20.x) == pytest.approx(
        t_bound * PHI0 * (1.0 + R61 * R61), rel=1e-12
    )


def test_m1_exact_vs_quadrature_tiny():
    t_bound = 1e4
    for f in (constant_one(), steinhaus_sample(12345), archimedean_cmf(1.0)):
        quad = m1_quadrature(RES20, f, t_bound, SUPP20, TABLE)
        exact = m1_exact(RES20, f, t_bound, SUPP20, TABLE)
        assert quad == pytest.approx(exact, rel=1e-6)


def test_m1_exact_offdiagonal_envelope():
    # With support {1, 61} the only off-diagonal contribution is the
    # conjugate pair at transform argument T log 61.
    t_bound = 1e3
    b = default_bump()
    for f in (constant_one(), steinhaus_sample(2)):
        exact = m1_exact(RES20, f, t_bound, SUPP20, TABLE)
        diag = m1_main(RES20, t_bound, RES20.x)
        envelope = 2.0 * t_bound * R61 * abs(b.transform(t_bound * math.log(61.0)))
        assert abs(exact - diag) <= envelope * 1.01 + 1e-9
        assert exact > 0.0


def test_m1_positive():
    for t_bound in (1e3, 1e4):
        assert m1_quadrature(RES20, steinhaus_sample(8), t_bound, SUPP20, TABLE) > 0.0


# -- second moment ----------------------------------------------------------


def test_m2_exact_reduces_to_m1_at_n1():
    t_bound = 1e3
    for f in (constant_one(), steinhaus_sample(31)):
        m2 = m2_exact(RES20, f, 1, t_bound, SUPP20, TABLE)
        m1 = m1_exact(RES20, f, t_bound, SUPP20, TABLE)
        assert m2 == pytest.approx(m1, rel=1e-12)


def test_m2_quadrature_reduces_to_m1_at_n1():
    t_bound = 1e3
    f = steinhaus_sample(4)
    m2 = m2_quadrature(RES20, f, 1, t_bound, SUPP20, TABLE)
    m1 = m1_quadrature(RES20, f, t_bound, SUPP20, TABLE)
    assert m2 == pytest.approx(m1, rel=1e-8)


def test_m2_exact_vs_quadrature_tiny():
    t_bound = 1e3
    for f in (constant_one(), steinhaus_sample(12345), archimedean_cmf(1.0)):
        quad = m2_quadrature(RES20, f, 3, t_bound, SUPP20, TABLE)
        exact = m2_exact(RES20, f, 3, t_bound, SUPP20, TABLE)
        assert quad == pytest.approx(exact, rel=1e-6)


def test_m2_exact_diagonal_is_f_free():
    # At T = 1e4 the off-diagonal terms are negligible and the diagonal
    # m*a = n*b terms carry no f dependence at all.
    t_bound = 1e4
    values = [
        m2_exact(RES20, f, 3, t_bound, SUPP20, TABLE)
        for f in (constant_one(), steinhaus_sample(7), archimedean_cmf(0.7))
    ]
    assert values[0] == pytest.approx(values[1], rel=1e-8)
    assert values[0] == pytest.approx(values[2], rel=1e-8)


def test_m2_bounded_by_n_m1():
    t_bound = 1e3
    f = constant_one()
    n_max = 3
    m2 = m2_quadrature(RES20, f, n_max, t_bound, SUPP20, TABLE)
    m1 = m1_quadrature(RES20, f, t_bound, SUPP20, TABLE)
    assert m2 <= n_max * m1 * (1.0 + 1e-8)


# -- diagonal sums ----------------------------------------------------------


def test_diagonal_sum_n1_is_r2_mass():
    assert diagonal_sum(RES20, 1, RES20.x, TABLE) == pytest.approx(
        sum_r_squared(RES20, RES20.x), rel=1e-14
    )


def test_diagonal_sum_toy_example():
    toy = ToyResonator(values={1: 1.0, 2: 1.0})
    assert diagonal_sum(toy, 2, 2.0, TABLE) == pytest.approx(6.0, rel=1e-14)
    assert diagonal_sum_bruteforce(toy, 2, 2.0) == pytest.approx(6.0, rel=1e-14)


def test_diagonal_sum_matches_bruteforce_random():
    for seed in range(5):
        rng = np.random.default_rng(seed)
        toy = random_toy_resonator(rng, cap=12)
        for n_max, x in ((5, 9.0), (12, 12.0), (8, 3.0)):
            fast = diagonal_sum(toy, n_max, x, TABLE)
            brute = diagonal_sum_bruteforce(toy, n_max, x)
            assert fast == pytest.approx(brute, rel=1e-12, abs=1e-12)


def test_diagonal_sum_window_resonator_vs_bruteforce():
    # Window path cross-checked against the dense product-matching oracle.
    n_max, x = 100, 100.0
    fast = diagonal_sum(RES20, n_max, x, TABLE)
    brute = diagonal_sum_bruteforce(RES20, n_max, x, TABLE)
    assert fast == pytest.approx(brute, rel=1e-12)


def test_diagonal_sum_g_cap_is_lower_bound():
    toy = ToyResonator(values={1: 1.0, 2: 0.5, 3: 0.25, 6: 0.125}, squarefree_supported=True)
    full = diagonal_sum(toy, 6, 6.0, TABLE)
    capped = diagonal_sum(toy, 6, 6.0, TABLE, g_cap=1.0)
    assert capped <= full + 1e-15


def test_diagonal_sum_budget():
    toy = ToyResonator(values={1: 1.0, 2: 1.0})
    with pytest.raises(ResourceLimitError):
        diagonal_sum(toy, 50, 50.0, TABLE, budget=3)


def test_diagonal_lower_bound_ordering():
    for seed in range(4):
        rng = np.random.default_rng(100 + seed)
        toy = random_toy_resonator(rng, cap=10, squarefree=False)
        lo = diagonal_lower_bound(toy, 8, 10.0, TABLE)
        full = diagonal_sum(toy, 8, 10.0, TABLE)
        assert lo <= full * (1.0 + 1e-12) + 1e-12


def test_diagonal_lower_bound_equality_on_squarefree():
    toy = ToyResonator(values={1: 1.0, 2: 0.7, 3: 0.4, 6: 0.28}, squarefree_supported=True)
    lo = diagonal_lower_bound(toy, 6, 6.0, TABLE)
    full = diagonal_sum(toy, 6, 6.0, TABLE)
    assert lo == pytest.approx(full, rel=1e-12)


def test_diagonal_lower_bound_n1():
    assert diagonal_lower_bound(RES20, 1, RES20.x, TABLE) == pytest.approx(
        sum_r_squared(RES20, RES20.x), rel=1e-14
    )


def test_min_offdiag_gap():
    assert min_offdiag_gap(2, 2) == pytest.approx(math.log(2.0), rel=1e-14)
    assert min_offdiag_gap(3, 2) == pytest.approx(math.log(4.0 / 3.0), rel=1e-14)
    for n, x in ((2, 2), (10, 7), (25, 25)):
        assert min_offdiag_gap(n, x) >= 1.0 / (n * x)
    with pytest.raises(ValueError):
        min_offdiag_gap(1, 1)


# -- envelopes and tail bounds ----------------------------------------------


def test_offdiag_bound_formula():
    val = offdiag_bound(RES20, 10, 100.0, 1e6, 3, TABLE, c_nu=2.0, sum_r=1.5)
    expected = (1e6 / 10) * 10**2 * 1.5**2 * 2.0 * (1e6 / (10 * 100.0)) ** -3
    assert val == pytest.approx(expected, rel=1e-14)


def test_m1_offdiag_bound_formula():
    val = m1_offdiag_bound(RES20, 100.0, 1e6, 3, c_nu=2.0, sum_r=1.5)
    expected = 1e6 * 1.5**2 * 2.0 * (1e6 / 100.0) ** -3
    assert val == pytest.approx(expected, rel=1e-14)


def test_moment_main_term():
    assert moment_main_term(EMPTY, 10, EMPTY.x, TABLE) == 1.0
    expected = 1.0 + 2.0 * T61 / 61.0**2
    assert moment_main_term(RES20, 100, math.exp(20.0), TABLE) == pytest.approx(
        expected, rel=1e-12
    )
    assert moment_main_term(RES20, 100, math.exp(20.0), TABLE) >= 1.0


def test_alpha_shift_error_term_trivial():
    x = EMPTY.x
    assert alpha_shift_error_term(EMPTY, 10, x, 0.1, TABLE) == pytest.approx(
        x**-0.1, rel=1e-12
    )


def test_alpha_shift_error_term_single_prime():
    alpha = 0.05
    x = math.exp(20.0)
    full_plain = 1.0 + R61 * R61
    full_shift = 1.0 + R61 * R61 * 61.0**alpha
    # Coprime pairs over {1, 61}: (1,1) keeps the full shifted product,
    # (1,61) and (61,1) each drop the 61 factor from it.
    bracket = full_shift + 2.0 * R61 * 61.0 ** (alpha - 0.5)
    expected = x**-alpha * bracket / full_plain
    got = alpha_shift_error_term(RES20, 100, x, alpha, TABLE)
    assert got == pytest.approx(expected, rel=1e-12)
    assert got > 0.0


def test_alpha_shift_error_term_validation():
    with pytest.raises(ValueError):
        alpha_shift_error_term(RES20, 10, RES20.x, 0.0, TABLE)
    with pytest.raises(ValueError):
        alpha_shift_error_term(RES20, 10, RES20.x, 0.5, TABLE)


def test_tail_truncation_full_cap():
    tail, shifted = tail_truncation_check(RES20, 1, 100.0, 0.1, TABLE)
    assert tail == 0.0
    assert shifted > 0.0


def test_tail_truncation_cap_one():
    alpha = 0.1
    tail, shifted = tail_truncation_check(RES20, 1, 1.0, alpha, TABLE)
    assert tail == pytest.approx(R61 * R61, rel=1e-12)
    assert shifted == pytest.approx(1.0 + R61 * R61 * 61.0**alpha, rel=1e-12)
    assert tail < shifted


def test_tail_truncation_excluded_prime():
    # ab divisible by 61 removes the only window prime: no tail at all.
    tail, shifted = tail_truncation_check(RES20, 61, 1.0, 0.1, TABLE)
    assert tail == 0.0
    assert shifted == pytest.approx(1.0, rel=1e-12)


def test_tail_truncation_validation():
    with pytest.raises(ValueError):
        tail_truncation_check(RES20, 1, 0.5, 0.1, TABLE)
    with pytest.raises(ValueError):
        tail_truncation_check(RES20, 1, 10.0, 0.7, TABLE)


def test_balanced_pair_bound_below_window():
    # Support below the window is just {1}: the pair sum is 1 and the
    # comparison term collapses to 1 / log z.
    lhs, rhs = balanced_pair_bound_check(RES20, 10.0, TABLE)
    assert lhs == 1.0
    assert rhs == pytest.approx(1.0 / math.log(10.0), rel=1e-12)
    assert rhs < 1.0


def test_balanced_pair_bound_past_window():
    lhs, rhs = balanced_pair_bound_check(RES20, 100.0, TABLE)
    assert lhs == pytest.approx(1.0 + 2.0 * T61 / 61.0**2, rel=1e-12)
    expected_rhs = (1.0 + T61 / math.sqrt(61.0)) ** 2 / math.log(100.0)
    assert rhs == pytest.approx(expected_rhs, rel=1e-12)
    assert lhs >= rhs


def test_balanced_pair_bound_validation():
    with pytest.raises(ValueError):
        balanced_pair_bound_check(RES20, 1.0, TABLE)


def test_sum_t_over_sqrt_single_prime():
    assert sum_t_over_sqrt(RES20, 100.0) == pytest.approx(
        1.0 + T61 / math.sqrt(61.0), rel=1e-13
    )


# -- growth benchmarks ------------------------------------------------------


def test_growth_bound_from_t():
    assert growth_bound_from_t(100.0, 0.5) == pytest.approx(26.98, rel=1e-3)
    assert growth_bound_from_t(100.0, 0.5) == pytest.approx(
        math.exp(math.sqrt(0.5 * 100.0 / math.log(100.0))), rel=1e-14
    )
    assert growth_bound_from_t(1.0, 0.5) is None


def test_growth_bound_from_n():
    got = growth_bound_from_n(10_000, 3.0, 0.5, 0.5)
    expected = math.exp(
        math.sqrt((0.5 / 1.5) * 3.0 * math.log(10_000) / math.log(math.log(10_000)))
    )
    assert got == pytest.approx(expected, rel=1e-14)
    assert growth_bound_from_n(2, 3.0, 0.5, 0.5) is None


# -- assembled report -------------------------------------------------------


def test_report_n1_trivial():
    res = degenerate_resonator(2.0)
    report = ratio_and_bounds(res, constant_one(), 1, 4.0, 0.5, 0.5, TABLE)
    assert report.ratio == pytest.approx(1.0, rel=1e-14)
    assert report.lower_bound == pytest.approx(1.0, rel=1e-14)


def test_report_ratio_is_f_free():
    blobs = set()
    for f in (constant_one(), archimedean_cmf(1.0), steinhaus_sample(60)):
        report = ratio_and_bounds(RES20, f, 100, 1e6, 0.5, 0.5, TABLE)
        blobs.add(json.dumps(report.to_dict(), sort_keys=True))
    assert len(blobs) == 1


def test_report_bracket_contains_ratio():
    # T well past N*X so the off-diagonal envelopes stay below the
    # diagonal and both bracket ends exist.
    report = ratio_and_bounds(RES20, constant_one(), 100, 1e13, 0.5, 0.5, TABLE)
    assert not report.flags["r2_sum_truncated"]
    assert not report.flags["diag_sum_truncated"]
    assert report.ratio_bracket_lo <= report.ratio <= report.ratio_bracket_hi
    assert report.lower_bound == pytest.approx(math.sqrt(report.ratio), rel=1e-14)
    assert report.lower_bound_bracket <= report.lower_bound


def test_report_ratio_recomputes():
    report = ratio_and_bounds(RES20, constant_one(), 100, 1e6, 0.5, 0.5, TABLE)
    r2 = sum_r_squared(RES20, RES20.x)
    diag = diagonal_sum(RES20, 100, RES20.x, TABLE)
    assert report.ratio == pytest.approx(diag / (100 * r2), rel=1e-14)
    assert report.diag_sum == pytest.approx(diag, rel=1e-14)


def test_report_exact_fields_tiny_instance():
    report = ratio_and_bounds(RES20, steinhaus_sample(5), 3, 1e4, 0.5, 0.5, TABLE)
    assert report.m1_exact is not None
    assert report.m1_quad == pytest.approx(report.m1_exact, rel=1e-6)
    assert report.m2_quad == pytest.approx(report.m2_exact, rel=1e-6)


def test_report_exact_fields_skipped_for_large_t():
    report = ratio_and_bounds(RES20, constant_one(), 100, 1e6, 0.5, 0.5, TABLE)
    assert report.m1_exact is None and report.m2_exact is None
    assert report.m1_quad is None and report.m2_quad is None


def test_report_exact_mode_flags():
    with pytest.raises(ValueError):
        ratio_and_bounds(RES20, None, 3, 1e3, 0.5, 0.5, TABLE, exact_mode="always")
    report = ratio_and_bounds(
        RES20, None, 3, 1e3, 0.5, 0.5, TABLE, exact_mode="never"
    )
    assert report.m1_exact is None
    with pytest.raises(ValueError):
        ratio_and_bounds(RES20, None, 3, 1e3, 0.5, 0.5, TABLE, exact_mode="bogus")


def test_report_serialization_round_trip():
    report = ratio_and_bounds(RES20, constant_one(), 100, 1e6, 0.5, 0.5, TABLE)
    d = report.to_dict()
    json.dumps(d)  # must be JSON-clean
    assert len(report.csv_header()) == len(report.csv_row())
    assert d["ratio"] == report.ratio
    assert report.growth_bound_t is not None
    assert report.growth_bound_n is not None
    assert report.main_term >= 1.0
    assert report.tail_error > 0.0
