"""Transfer matrices for the permaspin ring.

With ``a = exp(-beta H / s_max)`` and ``b = exp(-2 beta J / s_max)`` the ring
partition function is ``exp(beta (J + H) n) Tr(A^n)`` where

    A[pi, sigma] = a^(stat(pi) + stat(sigma)) * b^stat(pi^-1 sigma).

For k = 3 the substitutions ``c = a^4`` and ``d = b^2`` are used by the cubic
machinery.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .model_energy import ModelParams, PartitionReport
from .perm_core import (
    PermaspinSet,
    StatisticKind,
    _compose,
    _inverse,
    avoiders,
    enumerate_perms,
    stat_gf,
)

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class TransferParams:
    a: float
    b: float

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"a and b must be positive, got a={self.a}, b={self.b}")

    @property
    def c(self) -> float:
        return self.a**4

    @property
    def d(self) -> float:
        return self.b**2

    @classmethod
    def from_cd(cls, c: float, d: float) -> "TransferParams":
        return cls(c**0.25, math.sqrt(d))


def transfer_params(p: ModelParams, k: int) -> TransferParams:
    if p.beta <= 0:
        raise ValueError("transfer parameters need beta > 0")
    s_max = p.stat.s_max(k)
    return TransferParams(math.exp(-p.beta * p.H / s_max), math.exp(-2.0 * p.beta * p.J / s_max))


class Mode(enum.Enum):
    NUMERIC = "numeric"
    SYMBOLIC = "symbolic"


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """Numeric entries, or symbolic exponent pairs ``(i, j)`` meaning ``a^i b^j``."""

    P: PermaspinSet
    stat: StatisticKind
    mode: Mode
    exponents: np.ndarray  # shape (m, m, 2), integer
    entries: np.ndarray | None = None
    params: TransferParams | None = None

    @property
    def size(self) -> int:
        return len(self.P)

    def evaluate(self, tp: TransferParams) -> "TransferMatrix":
        ea = self.exponents[..., 0].astype(float)
        eb = self.exponents[..., 1].astype(float)
        vals = np.power(tp.a, ea) * np.power(tp.b, eb)
        return TransferMatrix(self.P, self.stat, Mode.NUMERIC, self.exponents, vals, tp)

    def monomial(self, i: int, j: int) -> str:
        ea, eb = (int(x) for x in self.exponents[i, j])
        parts = [f"a^{ea}" if ea > 1 else "a" if ea == 1 else "", f"b^{eb}" if eb > 1 else "b" if eb == 1 else ""]
        text = " ".join(s for s in parts if s)
        return text or "1"


def transfer_exponents(P: PermaspinSet, stat: StatisticKind) -> np.ndarray:
    m = len(P)
    out = np.zeros((m, m, 2), dtype=np.int64)
    stats = [stat.of_images(p.images) for p in P]
    for i, pi in enumerate(P):
        inv_pi = _inverse(pi.images)
        for j, sigma in enumerate(P):
            out[i, j, 0] = stats[i] + stats[j]
            out[i, j, 1] = stat.of_images(_compose(inv_pi, sigma.images))
    return out


def build_transfer(
    P: PermaspinSet,
    stat: StatisticKind = StatisticKind.DESTAT,
    tp: TransferParams | None = None,
    symbolic: bool = False,
) -> TransferMatrix:
    """Transfer matrix with rows and columns in ``P``'s lexicographic order."""
    if not stat.inverse_symmetric:
        raise ValueError(f"statistic {stat.value} is not inverse-symmetric; A would not be symmetric")
    if len(P) == 0:
        raise ValueError("empty permaspin set")
    sym = TransferMatrix(P, stat, Mode.SYMBOLIC, transfer_exponents(P, stat))
    if symbolic:
        return sym
    if tp is None:
        raise ValueError("numeric mode needs transfer parameters")
    return sym.evaluate(tp)


class SpectrumMethod(enum.Enum):
    NUMERIC = "numeric"
    CLOSED_FORM_41 = "closed-form-S3(123,321)"
    CLOSED_FORM_42 = "closed-form-S3(123)"
    CUBIC_PLUS_LINEAR_43 = "cubic-plus-linear-S3"


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: tuple[float, ...]  # descending
    method: SpectrumMethod

    @classmethod
    def of(cls, values: Sequence[float], method: SpectrumMethod) -> "SpectrumResult":
        return cls(tuple(sorted((float(v) for v in values), reverse=True)), method)

    @property
    def max(self) -> float:
        return self.eigenvalues[0]

    def to_json(self, params: dict | None = None) -> dict:
        return {"params": params or {}, "eigenvalues": list(self.eigenvalues), "method": self.method.value}


def _numeric(A: TransferMatrix) -> np.ndarray:
    if A.mode is not Mode.NUMERIC or A.entries is None:
        raise ValueError("a numeric transfer matrix is required")
    return A.entries


def eig_numeric(A: TransferMatrix | np.ndarray) -> SpectrumResult:
    M = A if isinstance(A, np.ndarray) else _numeric(A)
    if not np.allclose(M, M.T, rtol=1e-13, atol=0.0):
        raise ValueError("matrix is not symmetric")
    return SpectrumResult.of(np.linalg.eigvalsh(M), SpectrumMethod.NUMERIC)


def ring_Z(A: TransferMatrix, n: int, p: ModelParams) -> PartitionReport:
    """``exp(beta (J + H) n) Tr(A^n)`` with the trace taken from the spectrum."""
    if n < 3:
        raise ValueError("the smallest simple ring has n = 3")
    lam = np.array(eig_numeric(A).eigenvalues)
    top = lam[0]
    s = math.fsum(float(x) for x in (lam / top) ** n)
    log_tr = n * math.log(top) + math.log(s)
    return PartitionReport(p.beta * (p.J + p.H) * n + log_tr, n, p.beta, "trace")


def _require_zero_field(p: ModelParams) -> None:
    if p.H != 0:
        raise ValueError("the zero-field formulas need H = 0")
    if p.beta <= 0:
        raise ValueError("beta must be positive")


def zero_field_Z_closed(k: int, n: int, p: ModelParams) -> PartitionReport:
    """``k! e^{bJ} (e^{bJ} Stat_k(e^{-2bJ/s_max}))^(n-1)`` for the full S_k.

    This finite-n expression does not equal the ring trace; only its
    per-site limit agrees with the transfer matrix result.
    """
    _require_zero_field(p)
    x = math.exp(-2.0 * p.beta * p.J / p.stat.s_max(k))
    row = p.beta * p.J + math.log(stat_gf(p.stat, k)(x))
    log_z = math.log(math.factorial(k)) + p.beta * p.J + (n - 1) * row
    return PartitionReport(log_z, n, p.beta, "closed-form")


def zero_field_f(k: int, p: ModelParams) -> float:
    """``-(1/beta) ln(e^{beta J} Stat_k(e^{-2 beta J / s_max}))``."""
    _require_zero_field(p)
    x = math.exp(-2.0 * p.beta * p.J / p.stat.s_max(k))
    return -(p.beta * p.J + math.log(stat_gf(p.stat, k)(x))) / p.beta


def eig_closed_41(tp: TransferParams) -> SpectrumResult:
    """Spectrum of the S3(123,321) matrix; the first value is double."""
    c, d = tp.c, tp.d
    lam1 = c * (1 - d) * (1 + d)
    lam2 = c * (d - 1) ** 2
    lam3 = c * (d + 1) ** 2
    return SpectrumResult.of([lam1, lam1, lam2, lam3], SpectrumMethod.CLOSED_FORM_41)


def eig_closed_42_parts(tp: TransferParams) -> tuple[float, float, float, float]:
    """``(lam1, lam2, lam3, lam4)`` for S3(123); lam3 is double and lam2 is the largest."""
    c, d = tp.c, tp.d
    s = c + (1 + d) ** 2
    root = math.sqrt(s * s + 4 * c * (1 + 3 * d) * (d - 1))
    lam1 = 0.5 * c * (s - root)
    lam2 = 0.5 * c * (s + root)
    lam3 = c * (1 - d * d)
    lam4 = c * (1 - d) ** 2
    return lam1, lam2, lam3, lam4


def eig_closed_42(tp: TransferParams) -> SpectrumResult:
    lam1, lam2, lam3, lam4 = eig_closed_42_parts(tp)
    return SpectrumResult.of([lam1, lam2, lam3, lam3, lam4], SpectrumMethod.CLOSED_FORM_42)


@dataclass(frozen=True)
class CubicFactor:
    """Monic cubic ``lam^3 + Bp lam^2 + Cp lam + Dp``."""

    Bp: float
    Cp: float
    Dp: float

    def __call__(self, lam):
        return ((lam + self.Bp) * lam + self.Cp) * lam + self.Dp

    @property
    def coefficients(self) -> tuple[float, float, float, float]:
        return (1.0, self.Bp, self.Cp, self.Dp)


def _cubic_coeffs(c, d):
    Bp = -(c * d * d + c * c + 2 * c * d + c + 1)
    Cp = -c * (c * d**3 + 3 * c * c * d + c * d * d + c * c + c * d + c + 3 * d + 1) * (d - 1)
    Dp = (d * d + 4 * d + 1) * c**3 * (d + 1) * (d - 1) ** 3
    return Bp, Cp, Dp


def cubic_43(c: float, d: float) -> tuple[CubicFactor, float, float]:
    """Cubic factor of the S3 characteristic polynomial plus ``lam4 = c(1-d)^2``, ``lam5 = c(1-d^2)``.

    The full spectrum is the three cubic roots, ``lam4`` once and ``lam5`` twice.
    """
    if not (c > 0 and d > 0):
        raise ValueError("c and d must be positive")
    return CubicFactor(*_cubic_coeffs(c, d)), c * (1 - d) ** 2, c * (1 - d * d)


def eig_cubic_43(tp: TransferParams) -> SpectrumResult:
    cf, lam4, lam5 = cubic_43(tp.c, tp.d)
    roots = np.roots(cf.coefficients).real
    return SpectrumResult.of([*roots, lam4, lam5, lam5], SpectrumMethod.CUBIC_PLUS_LINEAR_43)


@dataclass(frozen=True)
class DiscriminantTriple:
    d0: float
    d1: float
    d2: float


def _exact_discriminants(Bp: Fraction, Cp: Fraction, Dp: Fraction) -> tuple[Fraction, Fraction, Fraction]:
    d0 = Bp * Bp - 3 * Cp
    d1 = 2 * Bp**3 - 9 * Bp * Cp + 27 * Dp
    return d0, d1, d1 * d1 - 4 * d0**3


def discriminants(cf: CubicFactor) -> DiscriminantTriple:
    """``d0 = B'^2 - 3C'``, ``d1 = 2B'^3 - 9B'C' + 27D'``, ``d2 = d1^2 - 4 d0^3``.

    Evaluated in exact rational arithmetic on the float coefficients, so the
    sign of ``d2`` is not polluted by cancellation near repeated roots.
    """
    d0, d1, d2 = _exact_discriminants(Fraction(cf.Bp), Fraction(cf.Cp), Fraction(cf.Dp))
    return DiscriminantTriple(float(d0), float(d1), float(d2))


def discriminants_cd(c: float, d: float) -> DiscriminantTriple:
    """As :func:`discriminants`, but with the cubic coefficients themselves built exactly from (c, d)."""
    Bp, Cp, Dp = _cubic_coeffs(Fraction(c), Fraction(d))
    d0, d1, d2 = _exact_discriminants(Bp, Cp, Dp)
    return DiscriminantTriple(float(d0), float(d1), float(d2))


@dataclass(frozen=True)
class LambdaStar:
    value: float
    fallback: bool  # True when d2 > 0 and a direct real-root solve was used
    E: complex


def lambda_star_detail(c: float, d: float, tol: float = 1e-9) -> LambdaStar:
    cf, _, _ = cubic_43(c, d)
    tri = discriminants_cd(c, d)
    if tri.d2 > tol * max(1.0, abs(tri.d1) ** 2):
        real = [r.real for r in np.roots(cf.coefficients) if abs(r.imag) <= 1e-9 * max(1.0, abs(r))]
        return LambdaStar(max(real), True, complex("nan"))
    w = complex(tri.d1, math.sqrt(max(0.0, -tri.d2))) / 2
    # principal cube root of a number in the closed upper half plane: arg in [0, pi/3]
    E = cmath.exp(cmath.log(w) / 3) if w != 0 else 0j
    E2 = E * complex(-0.5, SQRT3 / 2)
    return LambdaStar(-(cf.Bp + 2 * E2.real) / 3, False, E)


def lambda_star(c: float, d: float) -> float:
    """Largest root of the S3 cubic via the rotated principal cube root."""
    return lambda_star_detail(c, d).value


def free_energy_ring(P: PermaspinSet, p: ModelParams) -> float:
    """``-(J + H) - (1/beta) ln lam_max`` using the numerically largest eigenvalue."""
    tp = transfer_params(p, P.k)
    top = eig_numeric(build_transfer(P, p.stat, tp)).max
    if top <= 0:
        raise ArithmeticError(f"non-positive Perron eigenvalue {top}")
    return -(p.J + p.H) - math.log(top) / p.beta


def ring_Z_for(P: PermaspinSet, n: int, p: ModelParams) -> PartitionReport:
    return ring_Z(build_transfer(P, p.stat, transfer_params(p, P.k)), n, p)


def charpoly_41_factored(a: float, b: float, lam):
    a4, b2, b4 = a**4, b * b, b**4
    return (a4 * b4 + 2 * a4 * b2 + a4 - lam) * (a4 * b4 - 2 * a4 * b2 + a4 - lam) * (a4 * b4 - a4 + lam) ** 2


def charpoly_42_factored(a: float, b: float, lam):
    a4, b2 = a**4, b * b
    quad = -(a**12) * (3 * b2 + 1) * (b2 - 1) - a4 * (a4 + (b2 + 1) ** 2) * lam + lam * lam
    return quad * (a4 * (1 - b2) ** 2 - lam) * (a4 * b2 * b2 - a4 + lam) ** 2


def charpoly_43_factored(a: float, b: float, lam):
    """Factored characteristic polynomial of the full S3 destat matrix, in (a, b)."""
    cubic = (
        a**12 * (b**12 + 2 * b**10 - 7 * b**8 + 7 * b**4 - 2 * b**2 - 1)
        + a**4 * lam * (1 - 3 * a**8 * b**4 - a**4 * b**8 + 2 * a**8 * b**2 + a**8 + a**4 - 3 * b**4 + 2 * b**2)
        + lam**2 * (-(a**4) - a**8 - a**4 * b**4 - 2 * a**4 * b**2 - 1)
        + lam**3
    )
    return -cubic * (a**4 * b**4 - 2 * a**4 * b**2 + a**4 - lam) * (a**4 * b**4 - a**4 + lam) ** 2


def charpoly_inv_factored(a: float, b: float, lam):
    """Factored characteristic polynomial of the S3 inversion-statistic matrix."""
    quartic = (
        (b**2 + b + 1) * (b**2 - b + 1) * a**12 * (b + 1) ** 4 * (b - 1) ** 4
        - lam * (a**4 * b**2 - a**2 * b**4 + a**4 + b**2 + 1) * (a**2 + 1) * a**6 * (b + 1) ** 2 * (b - 1) ** 2
        - lam**2
        * (a**8 + 2 * a**6 * b**2 + 2 * a**4 * b**4 + a**6 + 3 * a**4 * b**2 + 2 * a**4 + 2 * a**2 * b**2 + a**2 + 1)
        * a**2
        * (b**2 - 1)
        + lam**3 * (-(a**4 + a**2 * b**2 + 1) * (a**2 + 1))
        + lam**4
    )
    quadratic = a**6 * (1 + b) ** 3 * (1 - b) ** 3 + lam * (a**2 + 1) * a**2 * (b + 1) * (b - 1) + lam**2
    return quartic * quadratic


SURFACE_COLUMNS = ("c", "d", "lambda_star", "lambda4", "lambda5", "delta0", "delta1", "delta2")


def surface_grid(
    c_range: tuple[float, float] = (0.05, 2.0),
    d_range: tuple[float, float] = (0.05, 2.0),
    steps: int | tuple[int, int] = 40,
) -> list[tuple[float, ...]]:
    """Rows ``(c, d, lambda*, lambda4, lambda5, d0, d1, d2)`` over a regular grid."""
    if min(c_range) <= 0 or min(d_range) <= 0:
        raise ValueError("ranges must be positive")
    sc, sd = (steps, steps) if isinstance(steps, int) else steps
    rows = []
    for c in np.linspace(*c_range, sc):
        for d in np.linspace(*d_range, sd):
            c, d = float(c), float(d)
            _, lam4, lam5 = cubic_43(c, d)
            tri = discriminants_cd(c, d)
            rows.append((c, d, lambda_star(c, d), lam4, lam5, tri.d0, tri.d1, tri.d2))
    return rows


def s3_sets() -> dict[str, PermaspinSet]:
    return {
        "S3": enumerate_perms(3),
        "S3(123)": avoiders(3, ["123"]),
        "S3(123,321)": avoiders(3, ["123", "321"]),
    }
