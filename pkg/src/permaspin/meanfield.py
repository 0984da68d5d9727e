"""Mean-field 3-permaspin model.

Every site interacts with every other site at strength ``qJ/(n-1)``, so the
energy depends only on the species counts ``(n123, n132, n213, n231, n312, n321)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .model_energy import phi_tables
from .perm_core import StatisticKind, enumerate_perms

S3 = enumerate_perms(3)
DIRECT_CAP = 10**7
CONFIG_CAP = 6**8

# pair table [i, j] = phi(S3[i], S3[j]) and site vector phi(S3[i])
_TABLES = phi_tables(S3, StatisticKind.DESTAT)


@dataclass(frozen=True)
class MeanFieldParams:
    n: int
    q: int
    J: float
    H: float
    beta: float

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("mean-field model needs n >= 2")
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if self.beta < 0:
            raise ValueError("beta must be non-negative")

    @property
    def pair_strength(self) -> float:
        return self.q * self.J / (self.n - 1)


CountVector = tuple[int, int, int, int, int, int]


def _check_counts(cv: Sequence[int], n: int) -> None:
    if len(cv) != 6 or any(c < 0 for c in cv):
        raise ValueError(f"bad count vector {cv!r}")
    if sum(cv) != n:
        raise ValueError(f"counts sum to {sum(cv)}, expected n = {n}")


def G(m: int, ell: float, x: float) -> float:
    """``sum_i C(m, i) x^((2i - m + ell)^2)``."""
    if m < 0:
        raise ValueError("m must be non-negative")
    if x <= 0:
        raise ValueError("x must be positive")
    lx = math.log(x)
    return math.fsum(math.comb(m, i) * math.exp(lx * (2 * i - m + ell) ** 2) for i in range(m + 1))


def mean_hamiltonian_counts(cv: Sequence[int], mp: MeanFieldParams) -> float:
    """``-qJ/(2(n-1)) ((n123-n321)^2 + (n132-n231)^2 + (n213-n312)^2 - n) - H (n123 - n321)``."""
    _check_counts(cv, mp.n)
    n123, n132, n213, n231, n312, n321 = cv
    sq = (n123 - n321) ** 2 + (n132 - n231) ** 2 + (n213 - n312) ** 2
    return -mp.q * mp.J / (2 * (mp.n - 1)) * (sq - mp.n) - mp.H * (n123 - n321)


def mean_hamiltonian_completed(cv: Sequence[int], mp: MeanFieldParams) -> float:
    """The completed-square form; requires ``J != 0``."""
    _check_counts(cv, mp.n)
    n, q, J, H = mp.n, mp.q, mp.J, mp.H
    n123, n132, n213, n231, n312, n321 = cv
    shift = H * (n - 1) / (q * J)
    sq = (n123 - n321 + shift) ** 2 + (n132 - n231) ** 2 + (n213 - n312) ** 2
    return n * q * J / (2 * (n - 1)) + H * H * (n - 1) / (2 * q * J) - q * J / (2 * (n - 1)) * sq


def mean_hamiltonian_pairs(config: Sequence[int], mp: MeanFieldParams) -> float:
    """Pair-based energy ``-qJ/(n-1) sum_{i<j} phi - H sum_i phi(pi_i)`` for spin indices into S3."""
    pair, site = _TABLES
    bond = sum(pair[config[i], config[j]] for i, j in itertools.combinations(range(len(config)), 2))
    return -mp.pair_strength * bond - mp.H * sum(site[s] for s in config)


def multinomial(n: int, parts: Sequence[int]) -> int:
    out = math.factorial(n)
    for k in parts:
        out //= math.factorial(k)
    return out


def compositions(n: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Weak compositions of ``n`` into ``parts`` non-negative integers, lexicographic."""
    if parts == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in compositions(n - first, parts - 1):
            yield (first, *rest)


def _logsumexp(logs: list[float], weights: list[int]) -> float:
    top = max(logs)
    return top + math.log(math.fsum(w * math.exp(l - top) for l, w in zip(logs, weights)))


def log_mean_Z_direct(mp: MeanFieldParams, cap: int = DIRECT_CAP) -> float:
    count = math.comb(mp.n + 5, 5)
    if count > cap:
        raise ValueError(f"{count} count vectors exceed cap {cap}")
    logs, weights = [], []
    for cv in compositions(mp.n, 6):
        logs.append(-mp.beta * mean_hamiltonian_counts(cv, mp))
        weights.append(multinomial(mp.n, cv))
    return _logsumexp(logs, weights)


def mean_Z_direct(mp: MeanFieldParams, cap: int = DIRECT_CAP) -> float:
    """Multinomial-weighted sum of ``exp(-beta H_mean)`` over all count vectors."""
    return math.exp(log_mean_Z_direct(mp, cap))


def log_mean_Z_factorized(mp: MeanFieldParams) -> float:
    if mp.J <= 0:
        raise ValueError("the factorized sum needs J > 0")
    n, q, J, H, beta = mp.n, mp.q, mp.J, mp.H, mp.beta
    x = math.exp(beta * q * J / (2 * (n - 1)))
    ell = H * (n - 1) / (q * J)
    g0 = [G(m, 0.0, x) for m in range(n + 1)]
    terms = []
    for a in range(n + 1):
        ga = G(a, ell, x)
        for b in range(n - a + 1):
            c = n - a - b
            terms.append(multinomial(n, (a, b, c)) * ga * g0[b] * g0[c])
    pre = -0.5 * beta * (n * q * J / (n - 1) + H * H * (n - 1) / (q * J))
    return pre + math.log(math.fsum(terms))


def mean_Z_factorized(mp: MeanFieldParams) -> float:
    """Triple-composition sum of products of ``G`` functions."""
    return math.exp(log_mean_Z_factorized(mp))


def mean_Z_configurations(mp: MeanFieldParams, cap: int = CONFIG_CAP) -> float:
    """Sum of ``exp(-beta H_mean)`` over all 6^n configurations using the pair table."""
    total = 6**mp.n
    if total > cap:
        raise ValueError(f"6^{mp.n} configurations exceed cap {cap}")
    pair, site = _TABLES
    digits = np.array(list(itertools.product(range(6), repeat=mp.n)), dtype=np.int64).T
    bond = np.zeros(total)
    for i, j in itertools.combinations(range(mp.n), 2):
        bond += pair[digits[i], digits[j]]
    energy = -mp.pair_strength * bond - mp.H * site[digits].sum(axis=0)
    x = -mp.beta * energy
    top = x.max()
    return float(math.exp(top) * np.exp(x - top).sum())


def dominant_term_estimate(mp: MeanFieldParams) -> float:
    """``6^n exp(-beta n q J / (2(n-1)))``."""
    return 6.0**mp.n * math.exp(-mp.beta * mp.n * mp.q * mp.J / (2 * (mp.n - 1)))


def central_term(mp: MeanFieldParams) -> float:
    """The single summand at ``a = b = c = n/3`` with central binomials kept exact.

    When 3 does not divide n the split is the nearest one with ``a >= b >= c``.
    """
    n, q, J, H, beta = mp.n, mp.q, mp.J, mp.H, mp.beta
    a = -(-n // 3)
    b = (n - a + 1) // 2
    c = n - a - b
    x = math.exp(beta * q * J / (2 * (n - 1)))
    ell = H * (n - 1) / (q * J)

    def centre(m: int, l: float) -> float:
        i = m // 2
        return math.comb(m, i) * x ** ((2 * i - m + l) ** 2)

    pre = math.exp(-0.5 * beta * (n * q * J / (n - 1) + H * H * (n - 1) / (q * J)))
    return pre * multinomial(n, (a, b, c)) * centre(a, ell) * centre(b, 0.0) * centre(c, 0.0)


MEANFIELD_COLUMNS = ("n", "q", "beta", "J", "H", "Z_factorized", "Z_direct", "dominant_estimate", "f")


def meanfield_row(mp: MeanFieldParams) -> tuple:
    lzf = log_mean_Z_factorized(mp)
    return (
        mp.n, mp.q, mp.beta, mp.J, mp.H,
        math.exp(lzf), mean_Z_direct(mp), dominant_term_estimate(mp),
        -lzf / (mp.beta * mp.n) if mp.beta > 0 else float("nan"),
    )
