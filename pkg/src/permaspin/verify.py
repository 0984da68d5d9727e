"""Oracle cross-checks behind ``permaspin verify`` and the acceptance tests.

Every check returns a :class:`CheckResult`; ``quick=True`` trims enumeration
sizes to rings of at most four sites.
"""

from __future__ import annotations

import math
import re
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import lowtemp, meanfield, transfer_1d as t1
from .model_energy import Graph, ModelParams, brute_force_Z, iter_energy_chunks
from .montecarlo import sample_observables, tv_distance
from .model_energy import boltzmann_probabilities
from .perm_core import StatisticKind, cddes_closed_form, enumerate_perms, stat_gf

# Double Eulerian polynomials CDdes_n, n = 1..6, coefficient lists by exponent.
DOUBLE_EULERIAN = {
    1: [1],
    2: [1, 0, 1],
    3: [1, 0, 4, 0, 1],
    4: [1, 0, 10, 2, 10, 0, 1],
    5: [1, 0, 20, 12, 54, 12, 20, 0, 1],
    6: [1, 0, 35, 42, 212, 140, 212, 42, 35, 0, 1],
}

# destat(sigma^-1 pi) and phi(sigma, pi) on S3, lexicographic rows/columns.
DESTAT_TABLE_S3 = [
    [0, 2, 2, 2, 2, 4],
    [2, 0, 2, 4, 2, 2],
    [2, 2, 0, 2, 4, 2],
    [2, 4, 2, 0, 2, 2],
    [2, 2, 4, 2, 0, 2],
    [4, 2, 2, 2, 2, 0],
]
PHI_TABLE_S3 = [
    [1, 0, 0, 0, 0, -1],
    [0, 1, 0, -1, 0, 0],
    [0, 0, 1, 0, -1, 0],
    [0, -1, 0, 1, 0, 0],
    [0, 0, -1, 0, 1, 0],
    [-1, 0, 0, 0, 0, 1],
]

# Printed transfer matrices as monomials in a and b.
PRINTED_MATRICES = {
    ("S3(123,321)", StatisticKind.DESTAT): """
        a^4      a^4 b^2  a^4 b^4  a^4 b^2
        a^4 b^2  a^4      a^4 b^2  a^4 b^4
        a^4 b^4  a^4 b^2  a^4      a^4 b^2
        a^4 b^2  a^4 b^4  a^4 b^2  a^4
    """,
    ("S3(123)", StatisticKind.DESTAT): """
        a^4      a^4 b^2  a^4 b^4  a^4 b^2  a^6 b^2
        a^4 b^2  a^4      a^4 b^2  a^4 b^4  a^6 b^2
        a^4 b^4  a^4 b^2  a^4      a^4 b^2  a^6 b^2
        a^4 b^2  a^4 b^4  a^4 b^2  a^4      a^6 b^2
        a^6 b^2  a^6 b^2  a^6 b^2  a^6 b^2  a^8
    """,
    ("S3", StatisticKind.DESTAT): """
        1        a^2 b^2  a^2 b^2  a^2 b^2  a^2 b^2  a^4 b^4
        a^2 b^2  a^4      a^4 b^2  a^4 b^4  a^4 b^2  a^6 b^2
        a^2 b^2  a^4 b^2  a^4      a^4 b^2  a^4 b^4  a^6 b^2
        a^2 b^2  a^4 b^4  a^4 b^2  a^4      a^4 b^2  a^6 b^2
        a^2 b^2  a^4 b^2  a^4 b^4  a^4 b^2  a^4      a^6 b^2
        a^4 b^4  a^6 b^2  a^6 b^2  a^6 b^2  a^6 b^2  a^8
    """,
    ("S3", StatisticKind.INV): """
        1        a b      a b      a^2 b^2  a^2 b^2  a^3 b^3
        a b      a^2      a^2 b^2  a^3 b^3  a^3 b    a^4 b^2
        a b      a^2 b^2  a^2      a^3 b    a^3 b^3  a^4 b^2
        a^2 b^2  a^3 b^3  a^3 b    a^4      a^4 b^2  a^5 b
        a^2 b^2  a^3 b    a^3 b^3  a^4 b^2  a^4      a^5 b
        a^3 b^3  a^4 b^2  a^4 b^2  a^5 b    a^5 b    a^6
    """,
}

_MONO = re.compile(r"^(?:a(?:\^(\d+))?)?\s*(?:b(?:\^(\d+))?)?$")


def parse_monomial_matrix(text: str) -> np.ndarray:
    """Exponent array (m, m, 2) from whitespace-aligned ``a^i b^j`` cells."""
    rows = []
    for line in text.strip().splitlines():
        cells = [c.strip() for c in re.split(r"\s{2,}", line.strip())]
        row = []
        for cell in cells:
            if cell == "1":
                row.append((0, 0))
                continue
            m = _MONO.match(cell)
            if not m:
                raise ValueError(f"bad monomial {cell!r}")
            ea = 0 if "a" not in cell else int(m.group(1) or 1)
            eb = 0 if "b" not in cell else int(m.group(2) or 1)
            row.append((ea, eb))
        rows.append(row)
    return np.array(rows, dtype=np.int64)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail} ({self.seconds:.2f}s)"


def _rel(x: float, y: float) -> float:
    return abs(x - y) / max(abs(x), abs(y), 1e-300)


# 1 -----------------------------------------------------------------------
def check_double_eulerian(quick: bool = False) -> tuple[bool, str]:
    t0 = time.perf_counter()
    bad = []
    for n, coeffs in DOUBLE_EULERIAN.items():
        if list(stat_gf(StatisticKind.DESTAT, n).coeffs) != coeffs:
            bad.append(f"enumeration n={n}")
        if list(cddes_closed_form(n).coeffs) != coeffs:
            bad.append(f"closed form n={n}")
    dt = time.perf_counter() - t0
    ok = not bad and dt < 1.0
    return ok, f"n=1..6 exact, runtime {dt:.3f}s < 1s" if ok else f"mismatch {bad}, runtime {dt:.3f}s"


# 2 -----------------------------------------------------------------------
ORACLE_BETAS = (0.3, 1.0, 3.0)
ORACLE_JH = ((1.0, 0.0), (1.0, 0.5), (1.0, -0.5), (0.5, 1.0))


def check_oracle_equivalence(quick: bool = False) -> tuple[bool, str]:
    t0 = time.perf_counter()
    worst = 0.0
    count = 0
    for P in t1.s3_sets().values():
        for n in (3, 4) if quick else (3, 4, 5):
            g = Graph.ring(n)
            for beta in ORACLE_BETAS:
                for J, H in ORACLE_JH:
                    p = ModelParams(beta, J, H)
                    zt = t1.ring_Z_for(P, n, p).Z
                    zb = brute_force_Z(g, P, p).Z
                    worst = max(worst, _rel(zt, zb))
                    count += 1
    dt = time.perf_counter() - t0
    ok = worst <= 1e-10 and dt < 30
    return ok, f"{count} cases, max rel err {worst:.2e} (tol 1e-10), runtime {dt:.2f}s"


# 3 -----------------------------------------------------------------------
def check_classical_reduction(quick: bool = False) -> tuple[bool, str]:
    S2 = enumerate_perms(2)
    worst_z = worst_f = 0.0
    for beta in (0.3, 1.0, 3.0):
        for J in (0.5, 1.0, 2.0):
            p = ModelParams(beta, J, 0.0)
            for n in range(3, 9):
                z = t1.ring_Z_for(S2, n, p).Z
                ref = (2 * math.cosh(beta * J)) ** n + (2 * math.sinh(beta * J)) ** n
                worst_z = max(worst_z, _rel(z, ref))
            f_ref = -math.log(2 * math.cosh(beta * J)) / beta
            f_printed = -math.log(math.exp(beta * J) + math.exp(-beta * J)) / beta
            for f in (t1.free_energy_ring(S2, p), t1.zero_field_f(2, p), f_printed):
                worst_f = max(worst_f, abs(f - f_ref))
    ok = worst_z <= 1e-12 and worst_f <= 1e-12
    return ok, f"Z max rel err {worst_z:.2e}, f max abs err {worst_f:.2e} (tol 1e-12)"


# 4 -----------------------------------------------------------------------
def _grid(lo: float, hi: float, steps: int) -> np.ndarray:
    return np.linspace(lo, hi, steps)


def check_closed_spectra(quick: bool = False) -> tuple[bool, str]:
    sets = t1.s3_sets()
    A41 = t1.build_transfer(sets["S3(123,321)"], symbolic=True)
    A42 = t1.build_transfer(sets["S3(123)"], symbolic=True)
    worst = 0.0
    lam2_fail = 0
    pts = _grid(0.1, 2.0, 20)
    for a in pts:
        for b in pts:
            tp = t1.TransferParams(float(a), float(b))
            for A, closed in ((A41, t1.eig_closed_41), (A42, t1.eig_closed_42)):
                num = np.array(t1.eig_numeric(A.evaluate(tp)).eigenvalues)
                cf = np.array(closed(tp).eigenvalues)
                scale = max(1.0, np.abs(num).max())
                worst = max(worst, float(np.abs(num - cf).max()) / scale)
            num42 = t1.eig_numeric(A42.evaluate(tp)).max
            lam2 = t1.eig_closed_42_parts(tp)[1]
            if abs(lam2 - num42) > 1e-9 * max(1.0, abs(num42)):
                lam2_fail += 1
    ok = worst <= 1e-9 and lam2_fail == 0
    return ok, f"400 points, max scaled err {worst:.2e} (tol 1e-9), lambda2-not-max at {lam2_fail} points"


# 5 -----------------------------------------------------------------------
def check_field_independence(quick: bool = False) -> tuple[bool, str]:
    P = t1.s3_sets()["S3(123,321)"]
    worst_spread = worst_err = 0.0
    for beta in (0.5, 1.0, 2.0):
        for J in (0.5, 1.0):
            fs = [t1.free_energy_ring(P, ModelParams(beta, J, float(H))) for H in _grid(-2, 2, 41)]
            ref = -J - 2 / beta * math.log(1 + math.exp(-beta * J))
            worst_spread = max(worst_spread, max(fs) - min(fs))
            worst_err = max(worst_err, max(abs(f - ref) for f in fs))
    ok = worst_spread < 1e-12 and worst_err <= 1e-12
    return ok, f"spread over H in [-2,2] {worst_spread:.2e}, max err vs closed form {worst_err:.2e} (tol 1e-12)"


# 6 -----------------------------------------------------------------------
def cubic_max_root_oracle(c: float, d: float) -> float:
    """Largest real root of the cubic factor via numpy's companion-matrix solver."""
    cf, _, _ = t1.cubic_43(c, d)
    return float(max(np.roots(cf.coefficients).real))


def check_cubic(quick: bool = False) -> tuple[bool, str]:
    d0_neg = d2_pos = star_bad = order_bad = fallback = 0
    worst = 0.0
    d1_max = -math.inf
    steps = 20 if quick else 40
    for c in _grid(0.05, 2.0, steps):
        for d in _grid(0.05, 2.0, steps):
            c, d = float(c), float(d)
            tri = t1.discriminants_cd(c, d)
            d1_max = max(d1_max, tri.d1)
            d0_neg += tri.d0 < 0
            d2_pos += tri.d2 > 1e-9
            det = t1.lambda_star_detail(c, d)
            fallback += det.fallback
            ref = cubic_max_root_oracle(c, d)
            err = _rel(det.value, ref)
            worst = max(worst, err)
            star_bad += err > 1e-8
            _, lam4, lam5 = t1.cubic_43(c, d)
            order_bad += det.value < max(lam4, lam5)
    ok = not (d0_neg or d2_pos or star_bad or order_bad)
    return ok, (
        f"{steps}x{steps} grid: d0<0 at {d0_neg}, d2>1e-9 at {d2_pos}, lambda* rel err max {worst:.2e} "
        f"(tol 1e-8), lambda*<max(l4,l5) at {order_bad}, fallbacks {fallback}, max d1 {d1_max:.4g}"
    )


# 7 -----------------------------------------------------------------------
def _charpoly_error(A: t1.TransferMatrix, printed: Callable, steps: int = 10) -> float:
    worst = 0.0
    for a in _grid(0.2, 2.0, steps):
        for b in _grid(0.2, 2.0, steps):
            M = A.evaluate(t1.TransferParams(float(a), float(b))).entries
            rho = np.abs(M).sum(axis=1).max()
            # complex sample points on a circle stay away from the real spectrum
            for j in range(10):
                lam = 1.5 * rho * np.exp(1j * math.pi * (j + 0.5) / 10)
                det = np.linalg.det(M - lam * np.eye(len(M)))
                ref = printed(float(a), float(b), lam)
                worst = max(worst, abs(det - ref) / max(abs(det), abs(ref)))
    return worst


def check_charpolys(quick: bool = False) -> tuple[bool, str]:
    sets = t1.s3_sets()
    A43 = t1.build_transfer(sets["S3"], StatisticKind.DESTAT, symbolic=True)
    Ainv = t1.build_transfer(sets["S3"], StatisticKind.INV, symbolic=True)
    e43 = _charpoly_error(A43, t1.charpoly_43_factored)
    einv = _charpoly_error(Ainv, t1.charpoly_inv_factored)
    mismatched = []
    for (name, stat), text in PRINTED_MATRICES.items():
        A = t1.build_transfer(sets[name], stat, symbolic=True)
        if not np.array_equal(A.exponents, parse_monomial_matrix(text)):
            mismatched.append(f"{name}/{stat.value}")
    ok = e43 <= 1e-7 and einv <= 1e-7 and not mismatched
    return ok, (
        f"charpoly rel err S3 destat {e43:.2e}, S3 inv {einv:.2e} (tol 1e-7); "
        f"printed matrices mismatched: {mismatched or 'none'}"
    )


# 8 -----------------------------------------------------------------------
MEANFIELD_BJH = ((1.0, 1.0, 0.0), (1.0, 1.0, 0.5), (0.5, 2.0, -1.0))


def check_meanfield(quick: bool = False) -> tuple[bool, str]:
    worst_fd = worst_cfg = worst_sq = 0.0
    for n in range(2, 7 if quick else 9):
        for q in (2, 4):
            for beta, J, H in MEANFIELD_BJH:
                mp = meanfield.MeanFieldParams(n, q, J, H, beta)
                zd = meanfield.mean_Z_direct(mp)
                worst_fd = max(worst_fd, _rel(meanfield.mean_Z_factorized(mp), zd))
                if n <= 4:
                    worst_cfg = max(worst_cfg, _rel(meanfield.mean_Z_configurations(mp), zd))
    rng = np.random.default_rng(20240601)
    for _ in range(1000):
        n = int(rng.integers(2, 51))
        cuts = np.sort(rng.integers(0, n + 1, size=5))
        cv = tuple(int(x) for x in np.diff(np.concatenate(([0], cuts, [n]))))
        mp = meanfield.MeanFieldParams(n, int(rng.integers(1, 5)), float(rng.uniform(0.1, 3)),
                                       float(rng.uniform(-2, 2)), 1.0)
        h1 = meanfield.mean_hamiltonian_counts(cv, mp)
        h2 = meanfield.mean_hamiltonian_completed(cv, mp)
        worst_sq = max(worst_sq, abs(h1 - h2) / max(1.0, abs(h1)))
    ok = worst_fd <= 1e-9 and worst_cfg <= 1e-9 and worst_sq <= 1e-9
    return ok, (
        f"factorized vs direct {worst_fd:.2e}, direct vs 6^n configurations {worst_cfg:.2e}, "
        f"completed square {worst_sq:.2e} (tol 1e-9)"
    )


# 9 -----------------------------------------------------------------------
def class_partial_sums(n: int, p: ModelParams) -> tuple[float, float]:
    """Oracle sums over uniform and exactly-two-wall ring configurations of S3."""
    uni = wall = 0.0
    edges = Graph.ring(n).edges
    for digits, energy in iter_energy_chunks(Graph.ring(n), enumerate_perms(3), p):
        walls = sum((digits[u - 1] != digits[v - 1]).astype(np.int64) for u, v in edges)
        w = np.exp(-p.beta * energy)
        uni += float(w[walls == 0].sum())
        wall += float(w[walls == 2].sum())
    return uni, wall


LOWTEMP_PARAMS = ((0.5, 1.0, 0.0), (1.0, 1.0, 0.3), (1.0, 1.0, -0.7), (2.0, 0.5, 1.0), (0.3, 2.0, -1.5))


def check_lowtemp(quick: bool = False) -> tuple[bool, str]:
    worst = 0.0
    for n in (3, 4) if quick else (3, 4, 5):
        for beta, J, H in LOWTEMP_PARAMS:
            p = ModelParams(beta, J, H)
            uni, wall = class_partial_sums(n, p)
            worst = max(worst, _rel(lowtemp.uniform_contribution(n, p), uni))
            worst = max(worst, _rel(lowtemp.domain_wall_contribution(n, p), wall))
    rep = lowtemp.lowtemp_Z(5, ModelParams(10.0, 1.0, 0.0))
    ok = worst <= 1e-10 and rep.rel_log_error <= 0.01
    return ok, (
        f"class sums max rel err {worst:.2e} (tol 1e-10); "
        f"|ln z_approx - ln z_exact|/|ln z_exact| = {rep.rel_log_error:.2e} at beta J=10, H=0, n=5 (tol 0.01)"
    )


# 10 ----------------------------------------------------------------------
MC_SWEEPS = 400_000
MC_BURN_IN = 1_000
MC_SEED = 20240601


def check_montecarlo(quick: bool = False) -> tuple[bool, str]:
    t0 = time.perf_counter()
    g, P, p = Graph.ring(3), enumerate_perms(3), ModelParams(1.0, 1.0, 0.0)
    rep = sample_observables(g, P, p, MC_SWEEPS + MC_BURN_IN, MC_BURN_IN, MC_SEED, histogram=True)
    tv = tv_distance(rep.histogram, boltzmann_probabilities(g, P, p))
    dt = time.perf_counter() - t0
    ok = tv <= 0.02 and dt < 60
    return ok, f"TV distance {tv:.4f} (tol 0.02) after {MC_SWEEPS} sweeps, seed {MC_SEED}, runtime {dt:.1f}s"


CRITERIA: list[tuple[str, Callable[[bool], tuple[bool, str]]]] = [
    ("1 double Eulerian tables", check_double_eulerian),
    ("2 trace = brute-force oracle", check_oracle_equivalence),
    ("3 classical k=2 reduction", check_classical_reduction),
    ("4 closed-form spectra", check_closed_spectra),
    ("5 S3(123,321) field independence", check_field_independence),
    ("6 cubic machinery", check_cubic),
    ("7 characteristic polynomials", check_charpolys),
    ("8 mean-field identity", check_meanfield),
    ("9 low-temperature consistency", check_lowtemp),
    ("10 Monte Carlo validation", check_montecarlo),
]


def run_check(name: str, fn: Callable[[bool], tuple[bool, str]], quick: bool = False) -> CheckResult:
    t0 = time.perf_counter()
    try:
        ok, detail = fn(quick)
    except Exception as exc:  # a crashing check is a failed check
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(name, bool(ok), detail, time.perf_counter() - t0)


def run_all(quick: bool = False) -> list[CheckResult]:
    return [run_check(name, fn, quick) for name, fn in CRITERIA]
