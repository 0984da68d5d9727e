"""Interaction energy, Hamiltonian on simple graphs and the exhaustive oracle."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .perm_core import (
    PermaspinSet,
    Permutation,
    StatisticKind,
    compose,
    inverse,
    statistic,
)

DEFAULT_CAP = 10**8
PROBABILITY_CAP = 10**6
CHUNK = 1 << 16


@dataclass(frozen=True)
class ModelParams:
    """Inverse temperature, coupling, field and statistic.

    ``beta == 0`` is accepted as the infinite-temperature limit; routines that
    divide by beta reject it.
    """

    beta: float
    J: float = 1.0
    H: float = 0.0
    stat: StatisticKind = StatisticKind.DESTAT

    def __post_init__(self) -> None:
        if not (self.beta >= 0 and math.isfinite(self.beta)):
            raise ValueError(f"beta must be finite and non-negative, got {self.beta}")


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        seen = set()
        norm = []
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise ValueError(f"edge ({u}, {v}) outside 1..{self.n}")
            key = frozenset((u, v))
            if key in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add(key)
            norm.append((u, v))
        object.__setattr__(self, "edges", tuple(norm))

    @classmethod
    def ring(cls, n: int) -> "Graph":
        if n < 3:
            raise ValueError("a simple ring needs n >= 3")
        return cls(n, tuple((i, i % n + 1) for i in range(1, n + 1)))

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls(n, tuple((i, i + 1) for i in range(1, n)))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, tuple((i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)))

    @classmethod
    def parse_edge_list(cls, text: str, n: int | None = None) -> "Graph":
        """Parse ``u v`` pairs, one per line, 1-based; ``#`` starts a comment."""
        edges = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"bad edge line: {line!r}")
            edges.append((int(parts[0]), int(parts[1])))
        top = max((max(e) for e in edges), default=0)
        return cls(n if n is not None else top, tuple(edges))

    @classmethod
    def from_file(cls, path: str | Path, n: int | None = None) -> "Graph":
        return cls.parse_edge_list(Path(path).read_text(), n)

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph with vertex ``v`` renamed to ``perm[v-1]``."""
        return Graph(self.n, tuple((perm[u - 1], perm[v - 1]) for u, v in self.edges))


def phi_pair(alpha: Permutation, beta: Permutation, stat: StatisticKind = StatisticKind.DESTAT) -> float:
    """Normalised interaction ``1 - 2 stat(alpha^-1 beta) / s_max`` in [-1, 1]."""
    if alpha.k != beta.k:
        raise ValueError(f"length mismatch: {alpha.k} vs {beta.k}")
    s_max = stat.s_max(alpha.k)
    if s_max == 0:
        raise ValueError("interaction energy undefined for k = 1")
    return 1.0 - 2.0 * statistic(stat, compose(inverse(alpha), beta)) / s_max


def phi_single(pi: Permutation, stat: StatisticKind = StatisticKind.DESTAT) -> float:
    return phi_pair(Permutation.identity(pi.k), pi, stat)


def phi_tables(P: PermaspinSet, stat: StatisticKind) -> tuple[np.ndarray, np.ndarray]:
    """(pair table ``[i, j] = phi(P[i], P[j])``, site vector ``phi(P[i])``)."""
    pair = np.array([[phi_pair(s, t, stat) for t in P] for s in P], dtype=float)
    site = np.array([phi_single(s, stat) for s in P], dtype=float)
    return pair, site


def hamiltonian(g: Graph, config: Sequence[Permutation], p: ModelParams) -> float:
    if len(config) != g.n:
        raise ValueError(f"configuration has {len(config)} spins, graph has {g.n} vertices")
    bond = sum(phi_pair(config[u - 1], config[v - 1], p.stat) for u, v in g.edges)
    field = sum(phi_single(s, p.stat) for s in config)
    return -p.J * bond - p.H * field


@dataclass(frozen=True)
class PartitionReport:
    """Partition function with its log and per-site free energy.

    ``method`` is one of ``trace``, ``closed-form``, ``brute-force``,
    ``mean-field`` or ``low-temp``.
    """

    log_Z: float
    n: int
    beta: float
    method: str

    @property
    def Z(self) -> float:
        return math.exp(self.log_Z)

    @property
    def free_energy(self) -> float:
        """Finite-size free energy density ``-ln Z / (beta n)``."""
        return -self.log_Z / (self.beta * self.n)


def _worker_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get("PERMASPIN_THREADS")
    if env:
        return max(1, int(env))
    return 1


def _digits(start: int, stop: int, m: int, n: int) -> np.ndarray:
    """Mixed-radix digits of configuration indices; vertex 1 is the most significant."""
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((n, stop - start), dtype=np.int64)
    for v in range(n - 1, -1, -1):
        out[v] = idx % m
        idx //= m
    return out


class _EnergyKernel:
    def __init__(self, g: Graph, P: PermaspinSet, p: ModelParams):
        self.n = g.n
        self.m = len(P)
        self.pair, self.site = phi_tables(P, p.stat)
        self.edges = [(u - 1, v - 1) for u, v in g.edges]
        self.J = p.J
        self.H = p.H

    def energies(self, digits: np.ndarray) -> np.ndarray:
        bond = np.zeros(digits.shape[1])
        for u, v in self.edges:
            bond += self.pair[digits[u], digits[v]]
        field = self.site[digits].sum(axis=0)
        return -self.J * bond - self.H * field


def _total(g: Graph, P: PermaspinSet, cap: int) -> int:
    if len(P) == 0:
        raise ValueError("empty permaspin set")
    total = len(P) ** g.n
    if total > cap:
        raise ValueError(f"|P|^n = {total} exceeds enumeration cap {cap}")
    return total


def iter_energy_chunks(
    g: Graph, P: PermaspinSet, p: ModelParams, cap: int = DEFAULT_CAP, chunk: int = CHUNK
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Stream ``(digits, energies)`` over P^n in lexicographic order.

    ``digits[v, c]`` is the index into ``P`` of vertex ``v+1`` in configuration ``c``.
    """
    total = _total(g, P, cap)
    kern = _EnergyKernel(g, P, p)
    for start in range(0, total, chunk):
        d = _digits(start, min(total, start + chunk), kern.m, kern.n)
        yield d, kern.energies(d)


def brute_force_Z(
    g: Graph,
    P: PermaspinSet,
    p: ModelParams,
    cap: int = DEFAULT_CAP,
    workers: int | None = None,
) -> PartitionReport:
    """Exact ``Z = sum exp(-beta H)`` over every configuration in P^n.

    Chunks are reduced as (max, scaled sum) pairs in index order, so the result
    does not depend on the worker count.
    """
    total = _total(g, P, cap)
    kern = _EnergyKernel(g, P, p)

    def part(start: int) -> tuple[float, float]:
        d = _digits(start, min(total, start + CHUNK), kern.m, kern.n)
        x = -p.beta * kern.energies(d)
        top = float(x.max())
        return top, float(np.exp(x - top).sum())

    starts = range(0, total, CHUNK)
    nw = _worker_count(workers)
    if nw > 1 and total > CHUNK:
        with ThreadPoolExecutor(max_workers=nw) as ex:
            parts = list(ex.map(part, starts))
    else:
        parts = [part(s) for s in starts]
    top = max(t for t, _ in parts)
    s = math.fsum(w * math.exp(t - top) for t, w in parts)
    return PartitionReport(top + math.log(s), g.n, p.beta, "brute-force")


def boltzmann_probabilities(
    g: Graph, P: PermaspinSet, p: ModelParams, cap: int = PROBABILITY_CAP
) -> np.ndarray:
    """Probability of every configuration, indexed in lexicographic mixed-radix order."""
    total = _total(g, P, cap)
    kern = _EnergyKernel(g, P, p)
    x = -p.beta * kern.energies(_digits(0, total, kern.m, kern.n))
    w = np.exp(x - x.max())
    return w / w.sum()


def config_index(config: Sequence[int], m: int) -> int:
    """Lexicographic index of a configuration given as indices into P."""
    idx = 0
    for d in config:
        idx = idx * m + int(d)
    return idx
