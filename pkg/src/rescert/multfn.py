"""Unimodular completely multiplicative coefficient functions.

Three families:

  * constant-one        f(n) = 1
  * archimedean(alpha)  f(n) = n^{i*alpha}
  * steinhaus(seed)     f(p) = exp(2*pi*i*u_p) with u_p drawn per prime

The Steinhaus draw must be reproducible across runs and platforms, so it
is a keyed hash rather than a stateful RNG: u_p is the first 8 bytes of
SHA-256(seed as big-endian uint64 || p as big-endian uint64), divided by
2^64.  Distinct primes therefore get independent values and the order of
evaluation never matters.
"""

from __future__ import annotations

import cmath
import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .ntcore import FactorTable, factorize

KIND_ONE = "one"
KIND_ARCHIMEDEAN = "archimedean"
KIND_STEINHAUS = "steinhaus"

DEFAULT_PRIME_LIMIT = 1 << 62


def _steinhaus_unit(seed: int, p: int) -> float:
    key = (seed & 0xFFFFFFFFFFFFFFFF).to_bytes(8, "big") + p.to_bytes(8, "big")
    digest = hashlib.sha256(key).digest()
    return int.from_bytes(digest[:8], "big") / 2.0**64


@dataclass
class UnimodularCMF:
    """A unimodular completely multiplicative function, evaluated lazily."""

    kind: str
    alpha: float = 0.0
    seed: int = 0
    prime_limit: int = DEFAULT_PRIME_LIMIT
    _cache: dict[int, complex] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.kind not in (KIND_ONE, KIND_ARCHIMEDEAN, KIND_STEINHAUS):
            raise ValueError(f"unknown coefficient family {self.kind!r}")
        if self.prime_limit < 2:
            raise ValueError("prime_limit must be at least 2")

    def prime_value(self, p: int) -> complex:
        if p > self.prime_limit:
            raise ValueError(f"prime {p} exceeds prime_limit {self.prime_limit}")
        if self.kind == KIND_ONE:
            return 1.0 + 0.0j
        if self.kind == KIND_ARCHIMEDEAN:
            return cmath.exp(1j * self.alpha * math.log(p))
        v = self._cache.get(p)
        if v is None:
            v = cmath.exp(2j * math.pi * _steinhaus_unit(self.seed, p))
            self._cache[p] = v
        return v

    def value(self, n: int, table: FactorTable) -> complex:
        """f(n) via the factor table; n must lie within the table."""
        table._check_range(n)
        if self.kind == KIND_ONE:
            return 1.0 + 0.0j
        if self.kind == KIND_ARCHIMEDEAN:
            return cmath.exp(1j * self.alpha * math.log(n))
        out = 1.0 + 0.0j
        for p, e in factorize(n, table):
            out *= self.prime_value(p) ** e
        return out

    def label(self) -> str:
        if self.kind == KIND_ONE:
            return "one"
        if self.kind == KIND_ARCHIMEDEAN:
            return f"archimedean({self.alpha!r})"
        return f"steinhaus(seed={self.seed})"


def constant_one() -> UnimodularCMF:
    return UnimodularCMF(kind=KIND_ONE)


def archimedean_cmf(alpha: float) -> UnimodularCMF:
    return UnimodularCMF(kind=KIND_ARCHIMEDEAN, alpha=float(alpha))


def steinhaus_sample(seed: int, prime_limit: int = DEFAULT_PRIME_LIMIT) -> UnimodularCMF:
    return UnimodularCMF(kind=KIND_STEINHAUS, seed=int(seed), prime_limit=prime_limit)


def eval_cmf(f: UnimodularCMF, n: int, table: FactorTable) -> complex:
    return f.value(n, table)


def values_up_to(f: UnimodularCMF, n_max: int, table: FactorTable) -> np.ndarray:
    """Vector [f(1), ..., f(n_max)] as complex128, index shifted by one.

    Complete multiplicativity lets the sieve fill the whole range in one
    pass: f(n) = f(n / spf(n)) * f(spf(n)).
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    table._check_range(n_max)
    idx = np.arange(1, n_max + 1)
    if f.kind == KIND_ONE:
        return np.ones(n_max, dtype=np.complex128)
    if f.kind == KIND_ARCHIMEDEAN:
        return np.exp(1j * f.alpha * np.log(idx.astype(np.float64)))
    out = np.ones(n_max + 1, dtype=np.complex128)
    spf = table.spf
    for n in range(2, n_max + 1):
        p = int(spf[n])
        out[n] = out[n // p] * (f.prime_value(p) if n == p else out[p])
    return out[1:]
