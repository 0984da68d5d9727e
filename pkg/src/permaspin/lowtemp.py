"""Low-temperature configuration-class sums for the 3-permaspin ring.

Two classes of ring configurations are summed exactly: uniform ones (every
site equal) and those with exactly two domain walls (one block of ``pi``,
one block of ``pi' != pi``).  The large-beta dominant part of these sums is
the low-temperature approximation to Z.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

from .model_energy import ModelParams, phi_pair, phi_single
from .perm_core import Permutation, StatisticKind, enumerate_perms
from .transfer_1d import cubic_43, free_energy_ring, ring_Z_for, transfer_params

S3 = enumerate_perms(3)
ID3 = Permutation.identity(3)


class FieldCase(enum.Enum):
    ZERO = "zero"
    POSITIVE = "positive"
    NEGATIVE = "negative"

    @classmethod
    def of(cls, H: float) -> "FieldCase":
        if H > 0:
            return cls.POSITIVE
        if H < 0:
            return cls.NEGATIVE
        return cls.ZERO


def _check(p: ModelParams) -> None:
    if p.stat is not StatisticKind.DESTAT:
        raise ValueError("the low-temperature sums are for the destat 3-permaspin model")


def uniform_contribution(n: int, p: ModelParams) -> float:
    """Sum of Boltzmann weights over the six uniform ring configurations."""
    _check(p)
    bJ, bH = p.beta * p.J, p.beta * p.H
    return math.fsum(
        math.exp(n * bJ * phi_pair(pi, pi) + n * bH * phi_single(pi)) for pi in S3
    )


def uniform_contribution_printed(n: int, p: ModelParams) -> float:
    bJ, bH = p.beta * p.J, p.beta * p.H
    return math.exp(n * bJ) * (math.exp(-n * bH) + 4 + math.exp(n * bH))


def wall_term(pi: Permutation, n: int, k: int, p: ModelParams) -> float:
    """Sum over ``pi' != pi`` of ``exp(2 beta J phi(pi, pi') + beta H ((n-k) phi(pi) + k phi(pi')))``."""
    bJ, bH = p.beta * p.J, p.beta * p.H
    return math.fsum(
        math.exp(2 * bJ * phi_pair(pi, q) + bH * ((n - k) * phi_single(pi) + k * phi_single(q)))
        for q in S3
        if q != pi
    )


def domain_wall_contribution(n: int, p: ModelParams) -> float:
    """Two-domain-wall class sum in its simplified closed form.

    ``(n e^{beta J (n-2)} / 2) [(8 + 4e^{-2 beta J})(n-1) + 8 sum_k (e^{k beta H} + e^{-k beta H})
    + 2 e^{-2 beta J} sum_k e^{(n-2k) beta H}]`` with k = 1..n-1.
    """
    _check(p)
    if n < 2:
        raise ValueError("domain walls need n >= 2")
    bJ, bH = p.beta * p.J, p.beta * p.H
    ks = range(1, n)
    x = math.exp(-2 * bJ)
    bracket = (
        (8 + 4 * x) * (n - 1)
        + 8 * math.fsum(math.exp(k * bH) + math.exp(-k * bH) for k in ks)
        + 2 * x * math.fsum(math.exp((n - 2 * k) * bH) for k in ks)
    )
    return 0.5 * n * math.exp(bJ * (n - 2)) * bracket


def domain_wall_direct(n: int, p: ModelParams) -> float:
    """The same class sum before simplification: per-``pi`` wall terms summed over k."""
    _check(p)
    return 0.5 * n * math.exp(p.beta * p.J * (n - 2)) * math.fsum(
        wall_term(pi, n, k, p) for k in range(1, n) for pi in S3
    )


def dominant_approximation(n: int, p: ModelParams) -> float:
    """Large-beta form of the two-class sum: 6e^{n bJ}, e^{n bJ}(4 + e^{n bH}) or e^{n bJ}(e^{-n bH} + 4)."""
    bJ, bH = p.beta * p.J, p.beta * p.H
    case = FieldCase.of(p.H)
    if case is FieldCase.ZERO:
        return 6 * math.exp(n * bJ)
    if case is FieldCase.POSITIVE:
        return math.exp(n * bJ) * (4 + math.exp(n * bH))
    return math.exp(n * bJ) * (math.exp(-n * bH) + 4)


def zero_field_two_class(n: int, p: ModelParams) -> float:
    """``e^{n bJ}(6 + 24 C(n,2) e^{-2bJ} + 6 C(n,2) e^{-4bJ})``."""
    bJ = p.beta * p.J
    c2 = math.comb(n, 2)
    return math.exp(n * bJ) * (6 + 24 * c2 * math.exp(-2 * bJ) + 6 * c2 * math.exp(-4 * bJ))


@dataclass(frozen=True)
class LowTempReport:
    n: int
    params: ModelParams
    z_uniform: float
    z_domain_wall: float
    z_approx: float
    z_exact: float
    field_case: FieldCase

    @property
    def z_two_class(self) -> float:
        return self.z_uniform + self.z_domain_wall

    @property
    def ln_ratio(self) -> float:
        """``ln z_exact / ln z_approx``."""
        return math.log(self.z_exact) / math.log(self.z_approx)

    @property
    def rel_log_error(self) -> float:
        return abs(math.log(self.z_approx) - math.log(self.z_exact)) / abs(math.log(self.z_exact))


def lowtemp_Z(n: int, p: ModelParams) -> LowTempReport:
    _check(p)
    return LowTempReport(
        n=n,
        params=p,
        z_uniform=uniform_contribution(n, p),
        z_domain_wall=domain_wall_contribution(n, p),
        z_approx=dominant_approximation(n, p),
        z_exact=ring_Z_for(S3, n, p).Z,
        field_case=FieldCase.of(p.H),
    )


class LowTempFreeEnergies(NamedTuple):
    f_comment6: float
    f_comment7: float
    f_comment7_printed: float


def lowtemp_f_variants(p: ModelParams) -> LowTempFreeEnergies:
    """Two low-temperature free energy predictions.

    ``f_comment6 = -(J + |H|)`` comes from the dominant uniform configurations.
    ``f_comment7 = -(J + H) - ln(lam4) / beta`` treats ``lam4 = c(1-d)^2`` as the
    leading eigenvalue, with ``c, d`` from :func:`transfer_params`.
    ``f_comment7_printed`` is ``-(J - H) - (2/beta) ln(1 - e^{-2 beta J})``, the same
    idea evaluated with ``c = e^{-2 beta H}``, ``d = e^{-2 beta J}``; it is reported
    for comparison only.
    """
    _check(p)
    tp = transfer_params(p, 3)
    _, lam4, _ = cubic_43(tp.c, tp.d)
    f7 = -(p.J + p.H) - math.log(lam4) / p.beta
    f7p = -(p.J - p.H) - 2.0 / p.beta * math.log(1 - math.exp(-2 * p.beta * p.J))
    return LowTempFreeEnergies(-(p.J + abs(p.H)), f7, f7p)


COMPARISON_COLUMNS = ("n", "beta", "J", "H", "z_uniform", "z_wall", "z_exact", "f6", "f7", "f_exact", "closer")


def closer_prediction(fv: LowTempFreeEnergies, f_exact: float) -> str:
    """``"f6"`` or ``"f7"``, whichever is nearer the exact free energy (ties go to f6)."""
    return "f6" if abs(fv.f_comment6 - f_exact) <= abs(fv.f_comment7 - f_exact) else "f7"


def comparison_rows(n: int, betas, Js, Hs) -> list[tuple]:
    rows = []
    for beta in betas:
        for J in Js:
            for H in Hs:
                p = ModelParams(beta, J, H)
                rep = lowtemp_Z(n, p)
                fv = lowtemp_f_variants(p)
                f_exact = free_energy_ring(S3, p)
                rows.append(
                    (n, beta, J, H, rep.z_uniform, rep.z_domain_wall, rep.z_exact,
                     fv.f_comment6, fv.f_comment7, f_exact, closer_prediction(fv, f_exact))
                )
    return rows
