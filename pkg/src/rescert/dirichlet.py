"""Dirichlet polynomial evaluation and certified grid search.

D_{f,N}(t) = N^{-1/2} * sum_{n<=N} f(n) * n^{it}.  The derivative bound
|D'| <= sqrt(N) * log N turns a uniform grid of step h into a certificate:
the true supremum over the scanned window exceeds the best grid value by
at most h * sqrt(N) * log(N) / 2.  Long scans use per-n phase rotors
(multiply by exp(i*h*log n) each step) with periodic re-synchronization
from direct exponentials so rotor drift cannot accumulate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ResourceLimitError
from .multfn import UnimodularCMF, values_up_to
from .ntcore import FactorTable
from .resonator import Resonator, SupportElement, support_elements

RESYNC_STRIDE = 10_000
DEFAULT_EVAL_BUDGET = 20_000_000
REFINE_REL_WIDTH = 1e-10
_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SearchResult:
    t_star: float
    value: float
    grid_step: float
    refinement_iterations: int
    certified_slack: float | None
    window: tuple[float, float]

    def as_dict(self) -> dict:
        return {
            "t_star": self.t_star,
            "value": self.value,
            "grid_step": self.grid_step,
            "refinement_iterations": self.refinement_iterations,
            "certified_slack": self.certified_slack,
            "window": list(self.window),
        }


def derivative_bound(n_max: int) -> float:
    """sqrt(N) * log N bounds |D'| (log N >= (1/N) * sum log n)."""
    return math.sqrt(n_max) * math.log(n_max) if n_max > 1 else 0.0


def eval_DN(f: UnimodularCMF, n_max: int, t: float, table: FactorTable) -> complex:
    """D_{f,N}(t), summed in numpy's pairwise order."""
    if n_max < 1:
        raise ValueError("N must be >= 1")
    coeffs = values_up_to(f, n_max, table)
    logs = np.log(np.arange(1, n_max + 1, dtype=np.float64))
    return complex(np.sum(coeffs * np.exp(1j * t * logs)) / math.sqrt(n_max))


def _support_coeff_logs(
    res: Resonator, f: UnimodularCMF, support: list[SupportElement]
) -> tuple[np.ndarray, np.ndarray]:
    """f(a) * r(a) and log(a) per support element (f via prime tuples).

    The coefficients carry the same f-phases as the target polynomial, so
    the products in the weighted second moment cancel f on the m*a = n*b
    terms instead of doubling it.
    """
    coeffs = np.empty(len(support), dtype=np.complex128)
    logs = np.empty(len(support), dtype=np.float64)
    for i, e in enumerate(support):
        fa = 1.0 + 0.0j
        for p in e.primes:
            fa *= f.prime_value(p)
        coeffs[i] = fa * e.r
        logs[i] = math.log(e.n)
    return coeffs, logs


def _as_elements(
    res: Resonator, support, table: FactorTable
) -> list[SupportElement]:
    if support and isinstance(support[0], SupportElement):
        return list(support)
    # Plain integers: rebuild weights from the resonator.
    by_n = {e.n: e for e in support_elements(res, max(support, default=1))}
    return [by_n[n] for n in support]


def eval_R(
    res: Resonator,
    f: UnimodularCMF,
    t: float,
    support,
    table: FactorTable,
) -> complex:
    """Resonator polynomial R(t) = sum over support of f(a) r(a) a^{it}."""
    elems = _as_elements(res, support, table)
    coeffs, logs = _support_coeff_logs(res, f, elems)
    return complex(np.sum(coeffs * np.exp(1j * t * logs)))


def _refine_peak(eval_abs2, lo: float, hi: float, tol_width: float) -> tuple[float, float, int]:
    """Golden-section maximization of eval_abs2 on [lo, hi]."""
    a, b = lo, hi
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc, fd = eval_abs2(c), eval_abs2(d)
    iters = 0
    while (b - a) > tol_width and iters < 200:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = eval_abs2(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd = eval_abs2(d)
        iters += 1
    t_best = c if fc >= fd else d
    return t_best, max(fc, fd), iters


def grid_sup(
    f: UnimodularCMF,
    n_max: int,
    t_bound: float,
    eps: float | None,
    table: FactorTable,
    *,
    window: tuple[float, float] | None = None,
    eval_budget: int = DEFAULT_EVAL_BUDGET,
    trace_path: str | None = None,
    trace_stride: int = 0,
) -> SearchResult:
    """Grid search for sup |D_{f,N}| over `window` (default [-T, T]).

    The step is 2*eps / (sqrt(N)*log N) so the certified slack

        certified_slack = grid_step * sqrt(N) * log(N) / 2 <= eps

    bounds how far the true supremum over the window can sit above the
    refined grid maximum.  Ties prefer smaller |t|, then smaller t.

    Raises:
        ResourceLimitError: the grid would exceed eval_budget points
            (use a larger eps or a narrower window).
    """
    if n_max < 1:
        raise ValueError("N must be >= 1")
    if t_bound <= 0:
        raise ValueError("T must be positive")
    if eps is None:
        eps = 1e-3 * math.sqrt(n_max)
    if eps <= 0:
        raise ValueError("eps must be positive")
    lo, hi = window if window is not None else (-t_bound, t_bound)
    if not (lo <= hi):
        raise ValueError(f"empty window [{lo}, {hi}]")

    deriv = derivative_bound(n_max)
    if deriv == 0.0:
        # N = 1: |D| = 1 everywhere; pick the tie-break point directly.
        t_star = 0.0 if lo <= 0.0 <= hi else (lo if abs(lo) <= abs(hi) else hi)
        return SearchResult(t_star, 1.0, 0.0, 0, 0.0, (lo, hi))

    step = 2.0 * eps / deriv
    # The grid lives on integer multiples of the step so that t = 0 is a
    # grid point whenever the window straddles it; the window endpoints are
    # evaluated separately, keeping every window point within step/2 of an
    # evaluated one.
    k_lo = math.ceil(lo / step)
    k_hi = math.floor(hi / step)
    while k_lo * step < lo:
        k_lo += 1
    while k_hi * step > hi:
        k_hi -= 1
    n_interior = max(0, k_hi - k_lo + 1)
    n_points = n_interior + 2
    if n_points > eval_budget:
        raise ResourceLimitError(
            f"grid of {n_points} points exceeds budget {eval_budget}; "
            f"increase eps (>= {((hi - lo) * deriv / (2 * eval_budget)):.3e}) "
            "or narrow the window",
            needed=n_points,
            budget=eval_budget,
        )

    coeffs = values_up_to(f, n_max, table) / math.sqrt(n_max)
    logs = np.log(np.arange(1, n_max + 1, dtype=np.float64))

    def abs2(t: float) -> float:
        v = np.sum(coeffs * np.exp(1j * t * logs))
        return float(v.real * v.real + v.imag * v.imag)

    trace_file = open(trace_path, "w") if trace_path and trace_stride > 0 else None
    if trace_file:
        trace_file.write("t,abs_dn\n")

    best_mag2 = -1.0
    best_t = lo

    def consider(t_k: float, mag2: float) -> None:
        nonlocal best_mag2, best_t
        if mag2 > best_mag2 + 1e-18 or (
            abs(mag2 - best_mag2) <= 1e-18
            and (abs(t_k) < abs(best_t) or (abs(t_k) == abs(best_t) and t_k < best_t))
        ):
            best_mag2 = mag2
            best_t = t_k

    consider(lo, abs2(lo))
    consider(hi, abs2(hi))
    try:
        rot_step = np.exp(1j * step * logs)
        for block_start in range(0, n_interior, RESYNC_STRIDE):
            block_len = min(RESYNC_STRIDE, n_interior - block_start)
            t0 = (k_lo + block_start) * step
            state = coeffs * np.exp(1j * t0 * logs)  # re-sync from direct exp
            for k in range(block_len):
                val = state.sum()
                mag2 = val.real * val.real + val.imag * val.imag
                t_k = (k_lo + block_start + k) * step
                if mag2 > best_mag2 + 1e-18 or (
                    abs(mag2 - best_mag2) <= 1e-18
                    and (abs(t_k) < abs(best_t) or (abs(t_k) == abs(best_t) and t_k < best_t))
                ):
                    best_mag2 = mag2
                    best_t = t_k
                if trace_file and (block_start + k) % trace_stride == 0:
                    trace_file.write(f"{t_k:.17g},{math.sqrt(mag2):.17g}\n")
                if k + 1 < block_len:
                    state *= rot_step
    finally:
        if trace_file:
            trace_file.close()

    ref_lo = max(lo, best_t - step)
    ref_hi = min(hi, best_t + step)
    tol_width = REFINE_REL_WIDTH * max(1.0, abs(best_t))
    t_star, mag2_star, iters = _refine_peak(abs2, ref_lo, ref_hi, tol_width)
    # Keep the grid point unless refinement wins by more than float noise
    # (sub-ulp "gains" near a flat peak would displace an exact t=0).
    if mag2_star - best_mag2 <= 1e-12 * max(1.0, best_mag2):
        t_star, mag2_star = best_t, best_mag2
    value = math.sqrt(abs2(t_star))
    slack = step * deriv / 2.0
    return SearchResult(t_star, value, step, iters, slack, (lo, hi))


def resonance_guided_search(
    res: Resonator,
    f: UnimodularCMF,
    n_max: int,
    t_bound: float,
    coarse_eps: float | None,
    table: FactorTable,
    *,
    window: tuple[float, float] | None = None,
    top_k: int = 5,
    eval_budget: int = DEFAULT_EVAL_BUDGET,
) -> SearchResult:
    """Search |D_N| near the top-k peaks of |R| on a coarse grid.

    A heuristic accelerator: no slack certificate is attached
    (certified_slack is None).  With an empty resonator support this
    degenerates to a plain coarse grid_sup on D_N.
    """
    if coarse_eps is None:
        coarse_eps = 1e-2 * math.sqrt(n_max)
    support = support_elements(res, res.x)
    if len(support) <= 1:
        return grid_sup(
            f, n_max, t_bound, coarse_eps, table, window=window, eval_budget=eval_budget
        )
    lo, hi = window if window is not None else (-t_bound, t_bound)
    deriv = derivative_bound(n_max)
    step = 2.0 * coarse_eps / deriv if deriv > 0 else (hi - lo) or 1.0
    n_points = int(math.floor((hi - lo) / step)) + 1 if hi > lo else 1
    if n_points > eval_budget:
        raise ResourceLimitError(
            f"coarse grid of {n_points} points exceeds budget {eval_budget}",
            needed=n_points,
            budget=eval_budget,
        )
    if n_points > 1:
        step = (hi - lo) / (n_points - 1)

    r_coeffs, r_logs = _support_coeff_logs(res, f, support)
    t_grid = lo + step * np.arange(n_points)
    r_mag = np.empty(n_points, dtype=np.float64)
    chunk = 1 << 16
    for s in range(0, n_points, chunk):
        ts = t_grid[s : s + chunk]
        vals = np.exp(1j * np.outer(ts, r_logs)) @ r_coeffs
        r_mag[s : s + chunk] = np.abs(vals)

    # Local maxima of |R|, best first.
    interior = np.arange(1, n_points - 1) if n_points > 2 else np.array([], dtype=int)
    is_peak = (
        (r_mag[interior] >= r_mag[interior - 1]) & (r_mag[interior] >= r_mag[interior + 1])
        if interior.size
        else np.array([], dtype=bool)
    )
    peak_idx = interior[is_peak] if interior.size else np.array([], dtype=int)
    if peak_idx.size == 0:
        peak_idx = np.array([int(np.argmax(r_mag))])
    heights = r_mag[peak_idx]
    h_top = float(heights.max())
    # Grid offset shifts a sampled peak height by O((omega*step)^2), so
    # peaks within that band are indistinguishable at this resolution
    # (e.g. every peak of a single-prime |R|, which is periodic).  Scan
    # the band smallest |t| first, matching the grid-search tie-break.
    blur = h_top * (float(r_logs.max(initial=0.0)) * step) ** 2
    in_band = heights >= h_top - blur
    band = peak_idx[in_band]
    band = band[np.argsort(np.abs(t_grid[band]), kind="stable")]
    rest = peak_idx[~in_band]
    rest = rest[np.argsort(heights[~in_band], kind="stable")[::-1]]
    candidates = np.concatenate([band, rest])[:top_k]

    coeffs = values_up_to(f, n_max, table) / math.sqrt(n_max)
    logs = np.log(np.arange(1, n_max + 1, dtype=np.float64))

    def abs2(t: float) -> float:
        v = np.sum(coeffs * np.exp(1j * t * logs))
        return float(v.real * v.real + v.imag * v.imag)

    best = (-1.0, lo, 0)
    for idx in candidates:
        t_c = t_grid[int(idx)]
        t_lo, t_hi = max(lo, t_c - step), min(hi, t_c + step)
        tol_width = REFINE_REL_WIDTH * max(1.0, abs(t_c))
        t_best, mag2, iters = _refine_peak(abs2, t_lo, t_hi, tol_width)
        if mag2 > best[0]:
            best = (mag2, t_best, iters)
    mag2, t_star, iters = best
    return SearchResult(
        t_star, math.sqrt(abs2(t_star)), step, iters, None, (lo, hi)
    )
