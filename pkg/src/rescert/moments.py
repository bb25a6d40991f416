"""Moment integrals of the resonated Dirichlet polynomial and the
certificate report built from them.

With Phi the bump window and R the resonator polynomial,

    M1 = integral |R(t)|^2 Phi(t/T) dt
    M2 = integral |R(t)|^2 Phi(t/T) |D_N(t)|^2 dt

so sup over the window of |D_N| is at least sqrt(M2 / M1).  Expanding
both integrals termwise leaves transform factors phi_hat at T times a
log-ratio of integers.  The terms with vanishing log-ratio (the diagonal
m*a = n*b) are independent of the coefficient function f and carry the
main contribution; everything else is suppressed by transform decay.
The diagonal collapses through the coprime parametrization

    g = gcd(a,b), h = gcd(m,n), a = a'g, b = b'g, m = h*b', n = h*a'

to sums over coprime pairs (a', b') that this module evaluates exactly
(with compensated summation) or brackets rigorously.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from .bump import Bump, default_bump, decay_constant
from .dirichlet import _support_coeff_logs
from .errors import ResourceLimitError
from .multfn import UnimodularCMF, values_up_to
from .ntcore import FactorTable, gcd
from .quadrature import adaptive_oscillatory
from .resonator import (
    DEFAULT_ENUM_BUDGET,
    Resonator,
    SupportElement,
    euler_product_one_plus_r2,
    iter_support,
    support_elements,
    sum_r_squared,
    sum_t_over_sqrt,
)

DEFAULT_TERM_BUDGET = 50_000_000
# Transform decay constants are calibrated on this grid (|xi| >= 10;
# points sit away from the transform's near-zeros).
DEFAULT_DECAY_GRID = (10.0, 20.0, 40.0, 80.0, 160.0, 320.0, 640.0, 1280.0)
DEFAULT_NU = 3

_decay_cache: dict[tuple[int, int], float] = {}


def _decay_const(b: Bump, nu: int) -> float:
    key = (id(b), nu)
    if key not in _decay_cache:
        _decay_cache[key] = decay_constant(b, nu, DEFAULT_DECAY_GRID)
    return _decay_cache[key]


# ---------------------------------------------------------------------------
# Quadrature moments (tiny instances; the oracle-facing route).


def _window_integral(fn_extra, t_bound: float, b: Bump, max_freq: float, rel_tol: float):
    lo, hi = b.lo * t_bound, b.hi * t_bound

    def integrand(t):
        return fn_extra(t) * b.phi_vec(t / t_bound)

    value, err = adaptive_oscillatory(
        integrand, lo, hi, max_freq=max_freq, rel_tol=rel_tol, abs_tol=0.0
    )
    return value.real, err


def m1_quadrature(
    res: Resonator,
    f: UnimodularCMF,
    t_bound: float,
    support: list[SupportElement],
    table: FactorTable,
    b: Bump | None = None,
    rel_tol: float = 1e-8,
) -> float:
    """M1 by adaptive quadrature over the window support [T/2, T]."""
    b = b or default_bump()
    coeffs, logs = _support_coeff_logs(res, f, support)

    def r_abs2(t):
        vals = np.exp(1j * np.multiply.outer(t, logs)) @ coeffs
        return (vals * vals.conjugate()).real

    value, _ = _window_integral(r_abs2, t_bound, b, max_freq=float(logs.max(initial=0.0)), rel_tol=rel_tol)
    return value


def m2_quadrature(
    res: Resonator,
    f: UnimodularCMF,
    n_max: int,
    t_bound: float,
    support: list[SupportElement],
    table: FactorTable,
    b: Bump | None = None,
    rel_tol: float = 1e-8,
) -> float:
    """M2 by adaptive quadrature over the window support [T/2, T]."""
    b = b or default_bump()
    coeffs, logs = _support_coeff_logs(res, f, support)
    d_coeffs = values_up_to(f, n_max, table) / math.sqrt(n_max)
    d_logs = np.log(np.arange(1, n_max + 1, dtype=np.float64))

    def weighted_abs2(t):
        rv = np.exp(1j * np.multiply.outer(t, logs)) @ coeffs
        dv = np.exp(1j * np.multiply.outer(t, d_logs)) @ d_coeffs
        return (rv * rv.conjugate()).real * (dv * dv.conjugate()).real

    max_freq = float(logs.max(initial=0.0)) + float(d_logs.max(initial=0.0))
    value, _ = _window_integral(weighted_abs2, t_bound, b, max_freq=max_freq, rel_tol=rel_tol)
    return value


# ---------------------------------------------------------------------------
# Exact termwise moments (tiny instances).


def m1_exact(
    res: Resonator,
    f: UnimodularCMF,
    t_bound: float,
    support: list[SupportElement],
    table: FactorTable,
    b: Bump | None = None,
) -> float:
    """M1 as T * sum over support pairs of the transform expansion.

    M1 = T * sum_{a,b} V_a conj(V_b) phi_hat(T*(log b - log a)) with
    V_a = f(a) * r(a).  The transform's conjugate symmetry makes the sum
    real; the float residue is asserted tiny and dropped.
    """
    b = b or default_bump()
    coeffs, logs = _support_coeff_logs(res, f, support)
    acc_re: list[float] = []
    acc_im: list[float] = []
    for i in range(len(support)):
        for j in range(len(support)):
            xi = t_bound * (logs[j] - logs[i])
            term = coeffs[i] * coeffs[j].conjugate() * b.transform(xi)
            acc_re.append(term.real)
            acc_im.append(term.imag)
    total = complex(math.fsum(acc_re), math.fsum(acc_im)) * t_bound
    if abs(total.imag) > 1e-12 * max(1.0, abs(total.real)):
        raise AssertionError(f"moment sum imaginary residue {total.imag!r} too large")
    return total.real


def m1_main(res: Resonator, t_bound: float, cap: float, b: Bump | None = None) -> float:
    """Diagonal part of M1: T * phi_hat(0) * sum_{n<=cap} r(n)^2."""
    b = b or default_bump()
    return t_bound * b.transform(0.0).real * sum_r_squared(res, cap)


def m2_exact(
    res: Resonator,
    f: UnimodularCMF,
    n_max: int,
    t_bound: float,
    support: list[SupportElement],
    table: FactorTable,
    b: Bump | None = None,
) -> float:
    """M2 as the full quadruple transform expansion (tiny instances).

    Pairs q = (m, a) with m <= N and a in the support enter through
    W_q = f(m) f(a) r(a) and u_q = m*a:

        M2 = (T/N) * sum_{q,q'} W_q conj(W_{q'}) phi_hat(T*(log u_{q'} - log u_q))

    Products are formed as exact integers so equal products give a
    transform argument of exactly zero.
    """
    b = b or default_bump()
    f_vals = values_up_to(f, n_max, table)
    pairs: list[tuple[float, complex]] = []
    for e in support:
        fa = 1.0 + 0.0j
        for p in e.primes:
            fa *= f.prime_value(p)
        for m in range(1, n_max + 1):
            u = m * e.n
            pairs.append((math.log(u), f_vals[m - 1] * fa * e.r))
    acc_re: list[float] = []
    acc_im: list[float] = []
    for lu, wq in pairs:
        for lv, wv in pairs:
            xi = t_bound * (lv - lu)
            term = wq * wv.conjugate() * b.transform(xi)
            acc_re.append(term.real)
            acc_im.append(term.imag)
    total = complex(math.fsum(acc_re), math.fsum(acc_im)) * (t_bound / n_max)
    if abs(total.imag) > 1e-12 * max(1.0, abs(total.real)):
        raise AssertionError(f"moment sum imaginary residue {total.imag!r} too large")
    return total.real


# ---------------------------------------------------------------------------
# Diagonal sums via the coprime parametrization.


class _SparseSupport:
    """Sorted support elements with prefix sums of r^2 and coprime queries."""

    def __init__(self, res: Resonator, cap: float, budget: int):
        self.res = res
        self.elements = support_elements(res, cap, budget)
        self.ns = [e.n for e in self.elements]
        prefix = np.cumsum([e.r * e.r for e in self.elements])
        self.r2_prefix = prefix
        self.cap = cap

    def sum_r2_upto(self, g_cap: float) -> float:
        idx = bisect_right(self.ns, g_cap)
        return float(self.r2_prefix[idx - 1]) if idx else 0.0

    def sum_r2_coprime(self, g_cap: float, excluded: tuple[int, ...]) -> float:
        """sum of r(g)^2 over support g <= g_cap with g coprime to all
        excluded primes; peeling one exclusion at a time:
        S_{Q+p}(G) = S_Q(G) - r(p)^2 * S_{Q+p}(G/p)."""
        if g_cap < 1.0:
            return 0.0
        if not excluded:
            return self.sum_r2_upto(g_cap)
        p = excluded[0]
        rest = excluded[1:]
        rp = self.res.r_p[p]
        return self.sum_r2_coprime(g_cap, rest) - rp * rp * self.sum_r2_coprime(
            g_cap / p, excluded
        )


def _toy_r_vector(toy, x_int: int) -> list[float]:
    return [0.0] + [float(toy.value(k)) for k in range(1, x_int + 1)]


def diagonal_sum(
    res,
    n_max: int,
    x: float,
    table: FactorTable,
    budget: int = DEFAULT_TERM_BUDGET,
    g_cap: float | None = None,
) -> float:
    """sum of r(a) r(b) over m, n <= N and support a, b <= X with ma = nb.

    Parametrized form: over coprime (a', b') with max <= min(N, X),

        floor(N / max(a',b')) * sum_{g <= X/max(a',b')} r(a'g) r(b'g).

    Accepts either a window resonator (sparse support walk) or any object
    with a dense `.value(n)` map and a `squarefree_supported` flag (the
    test-resonator protocol).  `g_cap` truncates every inner g-range; the
    result is then a certified lower bound of the full sum.

    Raises:
        ResourceLimitError: pair/enumeration budget exceeded.
    """
    if n_max < 1:
        raise ValueError("N must be >= 1")
    if x < 1.0:
        raise ValueError("X must be >= 1")
    z = min(float(n_max), x)
    if isinstance(res, Resonator):
        sparse = _SparseSupport(res, min(x if g_cap is None else g_cap, x), budget)
        idx = res.prime_index()
        elems_z = [e for e in sparse.elements if e.n <= z]
        terms: list[float] = []
        ops = 0
        for ea in elems_z:
            mask_a = 0
            for p in ea.primes:
                mask_a |= 1 << idx[p]
            for eb in elems_z:
                mask_b = 0
                for p in eb.primes:
                    mask_b |= 1 << idx[p]
                if mask_a & mask_b:
                    continue
                ops += 1
                if ops > budget:
                    raise ResourceLimitError(
                        f"diagonal pair enumeration exceeded budget {budget}",
                        needed=ops,
                        budget=budget,
                    )
                mx = max(ea.n, eb.n)
                g_hi = x / mx
                if g_cap is not None:
                    g_hi = min(g_hi, g_cap)
                s_g = sparse.sum_r2_coprime(g_hi, ea.primes + eb.primes)
                terms.append((n_max // mx) * ea.r * eb.r * s_g)
        return math.fsum(terms)

    # Dense path for explicit test resonators.
    x_int = math.floor(x)
    r_vec = _toy_r_vector(res, x_int)
    flagged = bool(getattr(res, "squarefree_supported", False))
    z_int = min(n_max, x_int)
    terms = []
    ops = 0
    for a in range(1, z_int + 1):
        if flagged and r_vec[a] == 0.0:
            continue
        for bb in range(1, z_int + 1):
            if flagged and r_vec[bb] == 0.0:
                continue
            if gcd(a, bb) != 1:
                continue
            mx = a if a > bb else bb
            g_hi = math.floor(x / mx)
            if g_cap is not None:
                g_hi = min(g_hi, math.floor(g_cap))
            ops += g_hi
            if ops > budget:
                raise ResourceLimitError(
                    f"diagonal enumeration exceeded budget {budget}",
                    needed=ops,
                    budget=budget,
                )
            ab = a * bb
            inner = []
            for g in range(1, g_hi + 1):
                v = r_vec[a * g] * r_vec[bb * g]
                if v != 0.0:
                    if flagged and gcd(g, ab) != 1:
                        raise AssertionError(
                            "squarefree-supported flag violated: "
                            f"r({a * g})*r({bb * g}) != 0 with gcd(g, a'b') > 1"
                        )
                    inner.append(v)
            if inner:
                terms.append((n_max // mx) * math.fsum(inner))
    return math.fsum(terms)


def diagonal_lower_bound(
    res,
    n_max: int,
    x: float,
    table: FactorTable,
    budget: int = DEFAULT_TERM_BUDGET,
) -> float:
    """The coprime-restricted diagonal sum

        sum_{(a',b')=1, a',b' <= min(N,X)} r(a') r(b') floor(N/max)
            * sum_{g <= X/max, (g, a'b')=1} r(g)^2.

    Never exceeds diagonal_sum; coincides with it whenever r is
    squarefree-supported (the restriction only drops zero terms then).
    """
    if isinstance(res, Resonator):
        return diagonal_sum(res, n_max, x, table, budget)
    x_int = math.floor(x)
    r_vec = _toy_r_vector(res, x_int)
    z_int = min(n_max, x_int)
    terms = []
    for a in range(1, z_int + 1):
        for bb in range(1, z_int + 1):
            if gcd(a, bb) != 1:
                continue
            mx = a if a > bb else bb
            g_hi = math.floor(x / mx)
            ab = a * bb
            inner = [
                r_vec[g] * r_vec[g]
                for g in range(1, g_hi + 1)
                if gcd(g, ab) == 1 and r_vec[g] != 0.0
            ]
            if inner and r_vec[a] != 0.0 and r_vec[bb] != 0.0:
                terms.append((n_max // mx) * r_vec[a] * r_vec[bb] * math.fsum(inner))
    return math.fsum(terms)


def min_offdiag_gap(n_max: int, x_int: int) -> float:
    """min over off-diagonal quadruples of |log(ma / nb)|.

    Equals the smallest log-ratio between distinct values of m*a with
    m <= N, a <= X; always at least 1/(N*X).
    """
    if n_max < 1 or x_int < 1:
        raise ValueError("N and X must be >= 1")
    if n_max * x_int == 1:
        raise ValueError("no off-diagonal pairs exist for N = X = 1")
    products = np.unique(
        np.multiply.outer(
            np.arange(1, n_max + 1, dtype=np.int64),
            np.arange(1, x_int + 1, dtype=np.int64),
        )
    )
    logs = np.log(products.astype(np.float64))
    return float(np.min(np.diff(logs)))


def _support_if_tiny(
    res: Resonator, x: float, n_max: int, budget: int
) -> list[SupportElement] | None:
    """The sorted support when N * |support| <= 64, else None.

    Bails out of the enumeration as soon as the product is exceeded, so
    deciding "not tiny" never materializes a large support.
    """
    cap_count = 64 // max(1, n_max)
    if cap_count < 1:
        return None
    out: list[SupportElement] = []
    for e in iter_support(res, x, budget):
        out.append(e)
        if len(out) > cap_count:
            return None
    out.sort(key=lambda e: e.n)
    return out


def _sum_r_with_fallback(
    res: Resonator, x: float, budget: int = DEFAULT_ENUM_BUDGET
) -> tuple[float, bool]:
    """sum of r(n) over support n <= x, or its Euler-product upper bound
    prod_p (1 + r(p)) when enumeration would blow the budget.

    The second component flags the fallback.  An upper bound keeps every
    envelope built from it a valid bound.
    """
    try:
        return math.fsum(e.r for e in iter_support(res, x, budget)), False
    except ResourceLimitError:
        product = math.exp(math.fsum(math.log1p(res.r_p[p]) for p in res.primes))
        return product, True


def offdiag_bound(
    res: Resonator,
    n_max: int,
    x: float,
    t_bound: float,
    nu: int,
    table: FactorTable,
    b: Bump | None = None,
    c_nu: float | None = None,
    sum_r: float | None = None,
) -> float:
    """Envelope for all off-diagonal M2 terms:

        (T/N) * N^2 * (sum_{a<=X} r(a))^2 * C_nu * (T/(N*X))^{-nu}.

    Off-diagonal transform arguments have magnitude at least T/(N*X);
    C_nu comes from the decay grid, so the constant is empirical, not
    proven.
    """
    b = b or default_bump()
    if c_nu is None:
        c_nu = _decay_const(b, nu)
    if sum_r is None:
        sum_r, _ = _sum_r_with_fallback(res, x)
    return (
        (t_bound / n_max)
        * n_max**2
        * sum_r**2
        * c_nu
        * (t_bound / (n_max * x)) ** (-nu)
    )


def m1_offdiag_bound(
    res: Resonator,
    x: float,
    t_bound: float,
    nu: int,
    b: Bump | None = None,
    c_nu: float | None = None,
    sum_r: float | None = None,
) -> float:
    """Envelope for off-diagonal M1 terms: T (sum r)^2 C_nu (T/X)^{-nu}."""
    b = b or default_bump()
    if c_nu is None:
        c_nu = _decay_const(b, nu)
    if sum_r is None:
        sum_r, _ = _sum_r_with_fallback(res, x)
    return t_bound * sum_r**2 * c_nu * (t_bound / x) ** (-nu)


# ---------------------------------------------------------------------------
# Main-term and tail-bound sums over coprime support pairs.


def _coprime_pair_elements(res: Resonator, z: float, budget: int):
    elems = support_elements(res, z, budget)
    idx = res.prime_index()
    masks = []
    for e in elems:
        m = 0
        for p in e.primes:
            m |= 1 << idx[p]
        masks.append(m)
    return elems, masks


def moment_main_term(
    res: Resonator,
    n_max: int,
    x: float,
    table: FactorTable,
    budget: int = DEFAULT_TERM_BUDGET,
) -> float:
    """Balanced coprime main term of the diagonal ratio:

        sum_{(a',b')=1, a',b' <= min(N,X)} t(a') t(b') a'b' / max(a',b')^3.

    t(a')t(b') equals r(a')r(b') / prod_{p | a'b'}(1 + r(p)^2) for
    coprime squarefree support products; the identity is asserted on the
    fly.  Always at least 1 (the (1,1) term).
    """
    z = min(float(n_max), x)
    elems, masks = _coprime_pair_elements(res, z, budget)
    terms = []
    checked = False
    for i, ea in enumerate(elems):
        for j, eb in enumerate(elems):
            if masks[i] & masks[j]:
                continue
            if not checked and ea.n > 1 and eb.n > 1:
                denom = math.prod(
                    1.0 + res.r_p[p] ** 2 for p in ea.primes + eb.primes
                )
                if not math.isclose(
                    ea.t * eb.t, ea.r * eb.r / denom, rel_tol=1e-12
                ):
                    raise AssertionError("t-weight identity violated")
                checked = True
            mx = max(ea.n, eb.n)
            terms.append(ea.t * eb.t * ea.n * eb.n / mx**3)
    return math.fsum(terms)


def balanced_pair_bound_check(
    res: Resonator,
    z: float,
    table: FactorTable,
    budget: int = DEFAULT_TERM_BUDGET,
) -> tuple[float, float]:
    """(lhs, rhs) of the balanced coprime pair inequality at height z:

        lhs = sum_{(m1,m2)=1, <= z} t(m1) t(m2) m1 m2 / max^3
        rhs = (1/log z) * (sum_{m <= z} t(m)/sqrt(m))^2

    Instances with the resonator's own weights are expected to satisfy
    lhs >= rhs once z clears the support window (callers assert).
    """
    if z <= 1.0:
        raise ValueError("z must exceed 1")
    elems, masks = _coprime_pair_elements(res, z, budget)
    terms = []
    for i, ea in enumerate(elems):
        for j, eb in enumerate(elems):
            if masks[i] & masks[j]:
                continue
            mx = max(ea.n, eb.n)
            terms.append(ea.t * eb.t * ea.n * eb.n / mx**3)
    lhs = math.fsum(terms)
    rhs = sum_t_over_sqrt(res, z, budget) ** 2 / math.log(z)
    return lhs, rhs


def alpha_shift_error_term(
    res: Resonator,
    n_max: int,
    x: float,
    alpha: float,
    table: FactorTable,
    budget: int = DEFAULT_TERM_BUDGET,
) -> float:
    """Tail error from bounding truncated g-sums by the alpha-power shift:

        prod_p (1+r(p)^2)^{-1} * X^{-alpha}
          * sum_{(a',b')=1, <= min(N,X)} r(a')r(b') (a'b')^{alpha - 1/2}
              * prod_{p not | a'b'} (1 + r(p)^2 p^alpha).

    Positive whenever the support is nonempty or trivially X^{-alpha}.
    """
    if not 0.0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 1/2)")
    z = min(float(n_max), x)
    log_full_plain = math.fsum(
        math.log1p(res.r_p[p] ** 2) for p in res.primes
    )
    log_full_shift = math.fsum(
        math.log1p(res.r_p[p] ** 2 * p**alpha) for p in res.primes
    )
    elems, masks = _coprime_pair_elements(res, z, budget)
    shift_by_prime = {p: math.log1p(res.r_p[p] ** 2 * p**alpha) for p in res.primes}
    terms = []
    for i, ea in enumerate(elems):
        for j, eb in enumerate(elems):
            if masks[i] & masks[j]:
                continue
            excl = math.fsum(shift_by_prime[p] for p in ea.primes + eb.primes)
            ab = ea.n * eb.n
            terms.append(
                ea.r * eb.r * ab ** (alpha - 0.5) * math.exp(log_full_shift - excl)
            )
    return math.exp(-log_full_plain) * x ** (-alpha) * math.fsum(terms)


def tail_truncation_check(
    res: Resonator,
    ab: int,
    cap: float,
    alpha: float,
    table: FactorTable,
    budget: int = DEFAULT_TERM_BUDGET,
) -> tuple[float, float]:
    """(exact_tail, shifted_bound) for the g-sum truncation at `cap`:

        exact_tail = sum_{g > cap, (g, ab)=1} r(g)^2
                   = prod_{p not | ab}(1 + r(p)^2) - truncated sum
        shifted_bound = cap^{-alpha} * prod_{p not | ab}(1 + r(p)^2 p^alpha)

    exact_tail <= shifted_bound always (each dropped term g > cap picks
    up a factor (g/cap)^alpha >= 1).
    """
    if not 0.0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 1/2)")
    if cap < 1.0:
        raise ValueError("cap must be >= 1")
    excluded = tuple(p for p in res.primes if ab % p == 0)
    full = euler_product_one_plus_r2(res, exclude=excluded)
    truncated = math.fsum(
        e.r * e.r
        for e in iter_support(res, cap, budget)
        if all(p not in excluded for p in e.primes)
    )
    tail = full - truncated
    if tail < 0.0:
        if tail < -1e-12 * full:
            raise AssertionError(f"tail {tail} more negative than rounding allows")
        tail = 0.0
    shifted = cap ** (-alpha) * math.exp(
        math.fsum(
            math.log1p(res.r_p[p] ** 2 * p**alpha)
            for p in res.primes
            if p not in excluded
        )
    )
    return tail, shifted


# ---------------------------------------------------------------------------
# Growth benchmarks and the assembled report.


def growth_bound_from_t(log_t: float, delta: float) -> float | None:
    """exp(sqrt((1 - delta) * log T / log log T)); None if log T <= 1."""
    if log_t <= 1.0:
        return None
    return math.exp(math.sqrt((1.0 - delta) * log_t / math.log(log_t)))


def growth_bound_from_n(n_max: int, c: float, delta: float, gamma: float) -> float | None:
    """exp(sqrt(((1-delta)/(1+gamma)) * C * log N / log log N))."""
    if n_max <= 2 or math.log(n_max) <= 1.0:
        return None
    log_n = math.log(n_max)
    return math.exp(
        math.sqrt(((1.0 - delta) / (1.0 + gamma)) * c * log_n / math.log(log_n))
    )


@dataclass
class MomentReport:
    n: int
    t: float
    x: float
    c: float | None
    delta: float
    gamma: float
    nu: int
    alpha: float | None
    resonator: dict
    m1_quad: float | None
    m1_exact: float | None
    m1_main: float
    m2_quad: float | None
    m2_exact: float | None
    diag_sum: float
    m2_diag_main: float
    offdiag_bound: float
    m1_offdiag_bound: float
    decay_constant: float
    ratio: float
    lower_bound: float
    ratio_bracket_lo: float | None
    ratio_bracket_hi: float | None
    lower_bound_bracket: float | None
    main_term: float
    tail_error: float | None
    balanced_pair_sum: float | None
    balanced_pair_bound: float | None
    balanced_pair_diag_ratio: float | None
    growth_bound_t: float | None
    growth_bound_n: float | None
    diagnostic_exponent_ratio: float | None
    feasibility: dict
    flags: dict = field(default_factory=dict)

    _FIELDS = (
        "n", "t", "x", "c", "delta", "gamma", "nu", "alpha",
        "m1_quad", "m1_exact", "m1_main", "m2_quad", "m2_exact",
        "diag_sum", "m2_diag_main", "offdiag_bound", "m1_offdiag_bound",
        "decay_constant", "ratio", "lower_bound",
        "ratio_bracket_lo", "ratio_bracket_hi", "lower_bound_bracket",
        "main_term", "tail_error", "balanced_pair_sum", "balanced_pair_bound",
        "balanced_pair_diag_ratio",
        "growth_bound_t", "growth_bound_n", "diagnostic_exponent_ratio",
    )

    def to_dict(self) -> dict:
        out = {name: getattr(self, name) for name in self._FIELDS}
        out["resonator"] = dict(self.resonator)
        out["feasibility"] = dict(self.feasibility)
        out["flags"] = dict(self.flags)
        return out

    def csv_header(self) -> list[str]:
        cols = list(self._FIELDS)
        cols += [f"resonator.{k}" for k in sorted(self.resonator)]
        cols += [f"feasibility.{k}" for k in sorted(self.feasibility)]
        cols += [f"flags.{k}" for k in sorted(self.flags)]
        return cols

    def csv_row(self) -> list:
        row = [getattr(self, name) for name in self._FIELDS]
        row += [self.resonator[k] for k in sorted(self.resonator)]
        row += [self.feasibility[k] for k in sorted(self.feasibility)]
        row += [self.flags[k] for k in sorted(self.flags)]
        return row


def _feasibility_flags(
    res: Resonator, n_max: int, t_bound: float, x: float, delta: float, gamma: float
) -> dict:
    log_n = math.log(n_max)
    log_t = math.log(t_bound)
    flags = {
        "t_ge_n_pow_two_over_delta": bool(
            log_n > 0.0 and log_t >= (2.0 / delta) * log_n
        ),
        "c_le_log_n_pow_gamma": bool(
            log_n > 0.0 and (log_t / log_n) <= math.log(n_max) ** gamma
        ),
    }
    lam = res.lam
    if lam is None or lam <= 1.0:
        flags["log_n_gt_3lam_loglog_lam"] = False
        flags["log_x_gt_3lam_loglog_lam"] = False
    else:
        threshold = 3.0 * lam * math.log(math.log(lam)) if math.log(lam) > 0 else -math.inf
        flags["log_n_gt_3lam_loglog_lam"] = bool(log_n > threshold)
        flags["log_x_gt_3lam_loglog_lam"] = bool(math.log(x) > threshold)
    return flags


def ratio_and_bounds(
    res: Resonator,
    f: UnimodularCMF | None,
    n_max: int,
    t_bound: float,
    delta: float,
    gamma: float,
    table: FactorTable,
    *,
    b: Bump | None = None,
    nu: int = DEFAULT_NU,
    alpha: float | None = None,
    budget: int = DEFAULT_TERM_BUDGET,
    exact_mode: str = "auto",
) -> MomentReport:
    """Assemble the full certificate report.

    The headline fields are f-free: ratio = diag_sum / (N * sum r(n)^2)
    and lower_bound = sqrt(ratio), valid for every unimodular completely
    multiplicative coefficient function at once.  The bracket fields pin
    the exact moment ratio between rigorous-numeric endpoints using the
    off-diagonal envelopes.  Exact and quadrature moments are filled in
    for tiny instances (exact_mode="auto") or on demand ("always");
    either may be None.

    `f` is only consulted for those exact/quadrature cross-checks.
    """
    if exact_mode not in ("auto", "always", "never"):
        raise ValueError(f"unknown exact_mode {exact_mode!r}")
    b = b or default_bump()
    x = res.x
    c = math.log(t_bound) / math.log(n_max) if n_max > 1 and t_bound > 1 else None

    flags: dict = {}

    # Denominator sum r(n)^2 over n <= X; fall back to the Euler-product
    # upper bound when the support enumeration is out of reach (keeps the
    # reported ratio a certified lower bound).
    try:
        r2 = sum_r_squared(res, x, budget)
        r2_denominator = r2
        flags["r2_sum_truncated"] = False
    except ResourceLimitError:
        r2 = None
        r2_denominator = euler_product_one_plus_r2(res)
        flags["r2_sum_truncated"] = True

    try:
        diag = diagonal_sum(res, n_max, x, table, budget)
        flags["diag_sum_truncated"] = False
    except ResourceLimitError:
        g_cap = x
        while True:
            g_cap /= 16.0
            try:
                diag = diagonal_sum(res, n_max, x, table, budget, g_cap=g_cap)
                break
            except ResourceLimitError:
                if g_cap < 1.0:
                    raise
        flags["diag_sum_truncated"] = True
        flags["diag_g_cap"] = g_cap

    ratio = diag / (n_max * r2_denominator)
    lower_bound = math.sqrt(max(0.0, ratio))

    c_nu = _decay_const(b, nu)
    sum_r, sum_r_truncated = _sum_r_with_fallback(res, x, budget)
    flags["sum_r_truncated"] = sum_r_truncated
    od2 = offdiag_bound(res, n_max, x, t_bound, nu, table, b, c_nu=c_nu, sum_r=sum_r)
    od1 = m1_offdiag_bound(res, x, t_bound, nu, b, c_nu=c_nu, sum_r=sum_r)
    phi0 = b.transform(0.0).real
    m1_diag = t_bound * phi0 * (r2 if r2 is not None else r2_denominator)
    m2_diag = (t_bound / n_max) * phi0 * diag

    bracket_lo = None
    bracket_hi = None
    lb_bracket = None
    if not flags["r2_sum_truncated"] and not flags["diag_sum_truncated"]:
        m1_hi = m1_diag + od1
        m1_lo = m1_diag - od1
        bracket_lo = max(0.0, (m2_diag - od2) / m1_hi) if m1_hi > 0 else None
        bracket_hi = (m2_diag + od2) / m1_lo if m1_lo > 0 else None
        if bracket_lo is not None:
            lb_bracket = math.sqrt(bracket_lo)

    support = None
    m1_q = m1_e = m2_q = m2_e = None
    if exact_mode == "always":
        support = support_elements(res, x, budget)
    elif exact_mode == "auto" and t_bound <= 2.0e4:
        support = _support_if_tiny(res, x, n_max, budget)
    if support is not None:
        if f is None:
            raise ValueError("exact moments require a coefficient function")
        m1_q = m1_quadrature(res, f, t_bound, support, table, b)
        m1_e = m1_exact(res, f, t_bound, support, table, b)
        m2_q = m2_quadrature(res, f, n_max, t_bound, support, table, b)
        m2_e = m2_exact(res, f, n_max, t_bound, support, table, b)

    alpha_eff = alpha if alpha is not None else res.alpha_default
    if alpha_eff is not None:
        tail = alpha_shift_error_term(res, n_max, x, alpha_eff, table, budget)
    else:
        # Degenerate resonator: no shift parameter to run the tail bound with.
        tail = None

    main = moment_main_term(res, n_max, x, table, budget)

    z = min(float(n_max), x)
    if z > 1.0:
        pair_lhs, pair_rhs = balanced_pair_bound_check(res, z, table, budget)
    else:
        pair_lhs = pair_rhs = None
    # Growth-rate diagnostic for the pair sum; trend data only, nothing
    # is asserted about it.
    pair_diag = None
    if pair_lhs is not None and pair_lhs > 0.0 and res.lam is not None and res.lam > 1.0:
        pair_diag = math.log(pair_lhs) * math.log(res.lam) / res.lam

    log_t = math.log(t_bound) if t_bound > 0 else 0.0
    g_t = growth_bound_from_t(log_t, delta)
    g_n = growth_bound_from_n(n_max, c, delta, gamma) if c is not None else None
    diag_ratio = None
    if g_t is not None and lower_bound > 0.0:
        diag_ratio = math.log(lower_bound) / math.sqrt(
            (1.0 - delta) * log_t / math.log(log_t)
        )

    res_summary = {
        "x": res.x,
        "lam": res.lam,
        "window_lo": res.window_lo,
        "window_hi": res.window_hi,
        "prime_count": len(res.primes),
        "is_empty": res.is_empty,
        "alpha_default": res.alpha_default,
        "sum_r_squared": r2,
        "euler_product": euler_product_one_plus_r2(res),
    }

    return MomentReport(
        n=n_max,
        t=t_bound,
        x=x,
        c=c,
        delta=delta,
        gamma=gamma,
        nu=nu,
        alpha=alpha_eff,
        resonator=res_summary,
        m1_quad=m1_q,
        m1_exact=m1_e,
        m1_main=m1_diag,
        m2_quad=m2_q,
        m2_exact=m2_e,
        diag_sum=diag,
        m2_diag_main=m2_diag,
        offdiag_bound=od2,
        m1_offdiag_bound=od1,
        decay_constant=c_nu,
        ratio=ratio,
        lower_bound=lower_bound,
        ratio_bracket_lo=bracket_lo,
        ratio_bracket_hi=bracket_hi,
        lower_bound_bracket=lb_bracket,
        main_term=main,
        tail_error=tail,
        balanced_pair_sum=pair_lhs,
        balanced_pair_bound=pair_rhs,
        balanced_pair_diag_ratio=pair_diag,
        growth_bound_t=g_t,
        growth_bound_n=g_n,
        diagnostic_exponent_ratio=diag_ratio,
        feasibility=_feasibility_flags(res, n_max, t_bound, x, delta, gamma),
        flags=flags,
    )
