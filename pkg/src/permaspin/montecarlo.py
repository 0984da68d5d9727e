"""Single-site Metropolis sampler for permaspin configurations on a graph."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model_energy import Graph, ModelParams, config_index, phi_tables
from .perm_core import PermaspinSet, Permutation

RECOMPUTE_EVERY = 1000
DRAW_BLOCK = 4096


class _Model:
    """Lookup tables and incidence lists shared by all updates of one chain."""

    def __init__(self, g: Graph, P: PermaspinSet, p: ModelParams):
        if len(P) < 2:
            raise ValueError("the sampler needs at least two allowed spins")
        self.g, self.P, self.p = g, P, p
        self.pair, self.site = phi_tables(P, p.stat)
        self._pair = self.pair.tolist()
        self._site = self.site.tolist()
        # out_nbrs[v]: w with edge (v, w); in_nbrs[v]: w with edge (w, v)
        self.out_nbrs: list[list[int]] = [[] for _ in range(g.n)]
        self.in_nbrs: list[list[int]] = [[] for _ in range(g.n)]
        for u, v in g.edges:
            self.out_nbrs[u - 1].append(v - 1)
            self.in_nbrs[v - 1].append(u - 1)

    def energy(self, spins: list[int]) -> float:
        bond = math.fsum(self._pair[spins[u - 1]][spins[v - 1]] for u, v in self.g.edges)
        return -self.p.J * bond - self.p.H * math.fsum(self._site[s] for s in spins)

    def delta(self, spins: list[int], v: int, new: int) -> float:
        """Energy change from setting site ``v`` to ``new``; touches incident edges only."""
        old = spins[v]
        if new == old:
            return 0.0
        pair = self._pair
        d_bond = 0.0
        for w in self.out_nbrs[v]:
            d_bond += pair[new][spins[w]] - pair[old][spins[w]]
        for w in self.in_nbrs[v]:
            d_bond += pair[spins[w]][new] - pair[spins[w]][old]
        return -self.p.J * d_bond - self.p.H * (self._site[new] - self._site[old])

    def order_parameter(self, spins: list[int]) -> float:
        site = self._site
        return sum(site[s] for s in spins) / len(spins)


@dataclass
class ChainState:
    spins: list[int]  # indices into P
    energy: float
    rng_seed: int
    rng: np.random.Generator = field(repr=False)
    sweep_count: int = 0
    accepted: int = 0
    proposed: int = 0
    _proposals: list[int] = field(default_factory=list, repr=False)
    _uniforms: list[float] = field(default_factory=list, repr=False)
    _cursor: int = field(default=0, repr=False)

    def draws(self, n: int, m: int) -> tuple[list[int], list[float], int]:
        """Buffered (proposals, uniforms, offset) for the next ``n`` updates.

        Draws are made in fixed blocks so a given seed yields one trajectory
        regardless of how sweeps are batched by the caller.
        """
        if self._cursor + n > len(self._proposals):
            size = max(n, DRAW_BLOCK)
            self._proposals = self.rng.integers(m, size=size).tolist()
            self._uniforms = self.rng.random(size).tolist()
            self._cursor = 0
        off = self._cursor
        self._cursor += n
        return self._proposals, self._uniforms, off

    @classmethod
    def start(
        cls,
        g: Graph,
        P: PermaspinSet,
        p: ModelParams,
        seed: int,
        spins: list[int] | None = None,
    ) -> "ChainState":
        """Chain at a uniformly random configuration (or ``spins``) with a PCG64 stream from ``seed``."""
        rng = np.random.Generator(np.random.PCG64(seed))
        if spins is None:
            spins = rng.integers(len(P), size=g.n).tolist()
        spins = [int(s) for s in spins]
        if len(spins) != g.n or not all(0 <= s < len(P) for s in spins):
            raise ValueError("initial spins must be n indices into P")
        return cls(spins, _Model(g, P, p).energy(spins), seed, rng)

    def configuration(self, P: PermaspinSet) -> tuple[Permutation, ...]:
        return tuple(P[i] for i in self.spins)


def _sweep(state: ChainState, model: _Model) -> None:
    n = model.g.n
    m = len(model.P)
    beta = model.p.beta
    proposals, uniforms, off = state.draws(n, m)
    spins = state.spins
    accepted = 0
    for v in range(n):
        new = proposals[off + v]
        dE = model.delta(spins, v, new)
        if dE <= 0 or uniforms[off + v] < math.exp(-beta * dE):
            spins[v] = new
            state.energy += dE
            accepted += 1
    state.accepted += accepted
    state.proposed += n
    state.sweep_count += 1
    if state.sweep_count % RECOMPUTE_EVERY == 0:
        state.energy = model.energy(spins)


def metropolis_sweep(state: ChainState, g: Graph, P: PermaspinSet, p: ModelParams) -> ChainState:
    """One sweep of ``n`` single-site updates, visiting sites in order.

    Each proposal draws a uniform spin from ``P`` and is accepted with
    probability ``min(1, exp(-beta dH))``.  The state is updated in place and
    returned.
    """
    _sweep(state, _Model(g, P, p))
    return state


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float


@dataclass
class SampleReport:
    energy_per_site: Estimate
    order_parameter: Estimate
    acceptance: float
    sweeps: int
    burn_in: int
    seed: int
    histogram: np.ndarray | None = None
    series: list[tuple[int, float, float]] = field(default_factory=list)


def batch_means(x: np.ndarray, n_batches: int = 20) -> Estimate:
    """Mean and batch-means standard error."""
    x = np.asarray(x, dtype=float)
    if len(x) < 2 * n_batches:
        n_batches = max(1, len(x) // 2)
    size = len(x) // n_batches
    if size == 0:
        return Estimate(float(x.mean()) if len(x) else float("nan"), float("nan"))
    means = x[: size * n_batches].reshape(n_batches, size).mean(axis=1)
    err = float(means.std(ddof=1) / math.sqrt(n_batches)) if n_batches > 1 else float("nan")
    return Estimate(float(x.mean()), err)


def sample_observables(
    g: Graph,
    P: PermaspinSet,
    p: ModelParams,
    sweeps: int,
    burn_in: int,
    seed: int,
    histogram: bool = False,
    record_series: bool = False,
) -> SampleReport:
    """Run one chain and estimate energy per site and ``<phi(pi, id)>``.

    With ``histogram`` the visit count of every configuration (lexicographic
    index, after burn-in, one sample per sweep) is returned; this needs
    ``|P|^n <= 10^6``.
    """
    if sweeps <= burn_in:
        raise ValueError("sweeps must exceed burn_in")
    model = _Model(g, P, p)
    state = ChainState.start(g, P, p, seed)
    m = len(P)
    hist = None
    if histogram:
        if m**g.n > 10**6:
            raise ValueError("histogram needs |P|^n <= 10^6")
        hist = np.zeros(m**g.n, dtype=np.int64)
    kept = sweeps - burn_in
    energies = np.empty(kept)
    orders = np.empty(kept)
    series = []
    for s in range(sweeps):
        _sweep(state, model)
        if s < burn_in:
            continue
        j = s - burn_in
        energies[j] = state.energy / g.n
        orders[j] = model.order_parameter(state.spins)
        if hist is not None:
            hist[config_index(state.spins, m)] += 1
        if record_series:
            series.append((state.sweep_count, energies[j], orders[j]))
    return SampleReport(
        energy_per_site=batch_means(energies),
        order_parameter=batch_means(orders),
        acceptance=state.accepted / max(1, state.proposed),
        sweeps=sweeps,
        burn_in=burn_in,
        seed=seed,
        histogram=hist,
        series=series,
    )


def tv_distance(counts: np.ndarray, probs: np.ndarray) -> float:
    emp = counts / counts.sum()
    return 0.5 * float(np.abs(emp - probs).sum())
