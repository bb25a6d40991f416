"""Resonator coefficients: prime window, weights, and support enumeration.

Given a length cutoff X, set lam = sqrt(log X * log log X).  The prime
window is lam^2 <= p <= exp((log lam)^2); inside it the weight is

    r(p) = lam / (sqrt(p) * log(p)),

extended multiplicatively to squarefree products of window primes and
zero elsewhere.  The companion weight t(p) = r(p) / (1 + r(p)^2) shows up
in the main-term lower bounds.  For small X the window is empty (the
lower end exceeds the upper end); that is a legitimate degenerate state,
flagged rather than rejected, in which r is supported on {1} alone.

Support products can exceed any factor table, so enumeration carries the
weights and prime tuples along instead of refactorizing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

from .errors import ResourceLimitError
from .ntcore import FactorTable, primes_in

MIN_X = math.exp(math.e)
DEFAULT_ENUM_BUDGET = 10_000_000


@dataclass(frozen=True)
class SupportElement:
    """One squarefree product of window primes with its weights."""

    n: int
    r: float
    t: float
    primes: tuple[int, ...]


@dataclass(frozen=True)
class Resonator:
    x: float
    lam: float | None
    window_lo: float | None
    window_hi: float | None
    primes: tuple[int, ...]
    r_p: dict[int, float] = field(repr=False)
    t_p: dict[int, float] = field(repr=False)
    alpha_default: float | None

    @property
    def is_empty(self) -> bool:
        return len(self.primes) == 0

    @property
    def is_degenerate(self) -> bool:
        """True when X was too small for the weight formula entirely."""
        return self.lam is None

    def prime_index(self) -> dict[int, int]:
        return {p: i for i, p in enumerate(self.primes)}


def window_bounds(x: float) -> tuple[float, float]:
    """(lam^2, exp((log lam)^2)) for cutoff x >= e^e; lo > hi means empty."""
    if not x >= MIN_X:
        raise ValueError(f"resonator cutoff must be >= e^e ~ {MIN_X:.4f}, got {x}")
    log_x = math.log(x)
    lam = math.sqrt(log_x * math.log(log_x))
    return lam * lam, math.exp(math.log(lam) ** 2)


def build_resonator(x: float, table: FactorTable) -> Resonator:
    """Construct the resonator for cutoff X.

    Args:
        x: length cutoff, at least e^e so the lam formula is defined.
        table: factor table covering the prime window.

    Raises:
        ValueError: x below e^e.
        ResourceLimitError: window upper end exceeds the table.
    """
    window_lo, window_hi = window_bounds(x)
    log_x = math.log(x)
    lam = math.sqrt(log_x * math.log(log_x))
    if window_lo <= window_hi and window_hi > table.limit:
        raise ResourceLimitError(
            f"prime window extends to {window_hi:.1f} beyond table limit {table.limit}",
            needed=int(window_hi) + 1,
            budget=table.limit,
        )
    primes = tuple(primes_in(window_lo, window_hi, table)) if window_lo <= window_hi else ()
    r_p: dict[int, float] = {}
    t_p: dict[int, float] = {}
    for p in primes:
        rp = lam / (math.sqrt(p) * math.log(p))
        r_p[p] = rp
        t_p[p] = rp / (1.0 + rp * rp)
    alpha_default = math.log(lam) ** -3 if lam > 1.0 else None
    if alpha_default is not None and alpha_default >= 0.5:
        # The shift-based tail bound needs alpha < 1/2; windows too small
        # for the formula to land there get no usable default.
        alpha_default = None
    return Resonator(
        x=x,
        lam=lam,
        window_lo=window_lo,
        window_hi=window_hi,
        primes=primes,
        r_p=r_p,
        t_p=t_p,
        alpha_default=alpha_default,
    )


def degenerate_resonator(x: float) -> Resonator:
    """Empty resonator for cutoffs below e^e (weight formula undefined)."""
    if x < 1.0:
        raise ValueError(f"cutoff must be >= 1, got {x}")
    return Resonator(
        x=x,
        lam=None,
        window_lo=None,
        window_hi=None,
        primes=(),
        r_p={},
        t_p={},
        alpha_default=None,
    )


def r_value(res: Resonator, n: int, table: FactorTable) -> float:
    """r(n): product of r(p) over the factorization, zero off support."""
    table._check_range(n)
    if n == 1:
        return 1.0
    out = 1.0
    spf = table.spf
    while n > 1:
        p = int(spf[n])
        n //= p
        if n % p == 0:
            return 0.0  # not squarefree
        rp = res.r_p.get(p)
        if rp is None:
            return 0.0  # prime outside the window
        out *= rp
    return out


def t_value(res: Resonator, n: int, table: FactorTable) -> float:
    table._check_range(n)
    if n == 1:
        return 1.0
    out = 1.0
    spf = table.spf
    while n > 1:
        p = int(spf[n])
        n //= p
        if n % p == 0:
            return 0.0
        tp = res.t_p.get(p)
        if tp is None:
            return 0.0
        out *= tp
    return out


def iter_support(
    res: Resonator, cap: float, budget: int = DEFAULT_ENUM_BUDGET
) -> Iterator[SupportElement]:
    """Lazily yield squarefree window-prime products <= cap with weights.

    1 is always yielded first; the rest arrive in DFS order, not sorted.
    Raises ResourceLimitError when more than `budget` elements would be
    produced, which streaming consumers hit with flat memory use.
    """
    if cap < 1.0:
        return
    yield SupportElement(1, 1.0, 1.0, ())
    count = 1
    primes = res.primes
    r_p, t_p = res.r_p, res.t_p
    stack: list[tuple[int, float, float, tuple[int, ...], int]] = [(1, 1.0, 1.0, (), 0)]
    while stack:
        n, rv, tv, used, start = stack.pop()
        for i in range(start, len(primes)):
            p = primes[i]
            m = n * p
            if m > cap:
                break  # primes ascend, so every later product is larger too
            if count >= budget:
                raise ResourceLimitError(
                    f"support enumeration exceeded budget {budget} below cap {cap}",
                    needed=count + 1,
                    budget=budget,
                )
            elem = SupportElement(m, rv * r_p[p], tv * t_p[p], used + (p,))
            count += 1
            yield elem
            stack.append((m, elem.r, elem.t, elem.primes, i + 1))


def support_elements(
    res: Resonator, cap: float, budget: int = DEFAULT_ENUM_BUDGET
) -> list[SupportElement]:
    """All squarefree window-prime products <= cap, sorted, with weights.

    1 is always included.  Raises ResourceLimitError when more than
    `budget` elements would be produced.
    """
    out = list(iter_support(res, cap, budget))
    out.sort(key=lambda e: e.n)
    return out


def enumerate_support(
    res: Resonator, cap: float, budget: int = DEFAULT_ENUM_BUDGET
) -> list[int]:
    """Sorted support integers <= cap (always starts with 1)."""
    return [e.n for e in support_elements(res, cap, budget)]


def sum_r_squared(res: Resonator, cap: float, budget: int = DEFAULT_ENUM_BUDGET) -> float:
    """sum of r(n)^2 over support n <= cap."""
    return math.fsum(e.r * e.r for e in iter_support(res, cap, budget))


def sum_t_over_sqrt(res: Resonator, cap: float, budget: int = DEFAULT_ENUM_BUDGET) -> float:
    """sum of t(m) / sqrt(m) over support m <= cap."""
    return math.fsum(e.t / math.sqrt(e.n) for e in iter_support(res, cap, budget))


def euler_product_one_plus_r2(res: Resonator, exclude: tuple[int, ...] = ()) -> float:
    """prod over window primes p (not excluded) of (1 + r(p)^2).

    Upper-bounds sum r(n)^2 over the full support; the truncated sums
    approach it as the cap grows.
    """
    skip = set(exclude)
    return math.exp(
        math.fsum(
            math.log1p(res.r_p[p] * res.r_p[p]) for p in res.primes if p not in skip
        )
    )
