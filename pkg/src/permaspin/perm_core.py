"""Permutations, permutation statistics and pattern avoidance.

Permutations are stored in one-line notation on ``{1..k}``: ``images[i-1]`` is
the image of ``i``.  Composition follows function composition,
``compose(s, t)(i) == s(t(i))``.
"""

from __future__ import annotations

import enum
import itertools
import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

MAX_K = 10

Images = tuple[int, ...]


def _inverse(p: Images) -> Images:
    out = [0] * len(p)
    for i, v in enumerate(p, start=1):
        out[v - 1] = i
    return tuple(out)


def _compose(s: Images, t: Images) -> Images:
    return tuple(s[v - 1] for v in t)


def _des(p: Images) -> int:
    return sum(1 for x, y in zip(p, p[1:]) if x > y)


def _inv(p: Images) -> int:
    n = len(p)
    return sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])


def _destat(p: Images) -> int:
    return _des(p) + _des(_inverse(p))


def _standardize(values: Sequence[int]) -> Images:
    """Order-isomorphic pattern on ``1..m`` of a sequence of distinct ints."""
    ranks = sorted(values)
    return tuple(ranks.index(v) + 1 for v in values)


@dataclass(frozen=True, order=True)
class Permutation:
    images: Images

    def __post_init__(self) -> None:
        imgs = tuple(int(v) for v in self.images)
        if not imgs:
            raise ValueError("a permutation needs at least one element")
        if sorted(imgs) != list(range(1, len(imgs) + 1)):
            raise ValueError(f"not a permutation of 1..{len(imgs)}: {self.images!r}")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def parse(cls, text: str) -> "Permutation":
        """Parse ``"231"`` (k <= 9) or a comma/space separated list ``"2,3,1"``."""
        text = text.strip()
        if "," in text or " " in text:
            parts = [s for s in text.replace(",", " ").split() if s]
            return cls(tuple(int(s) for s in parts))
        return cls(tuple(int(ch) for ch in text))

    @classmethod
    def identity(cls, k: int) -> "Permutation":
        return cls(tuple(range(1, k + 1)))

    @property
    def k(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __len__(self) -> int:
        return len(self.images)

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def inverse(self) -> "Permutation":
        return inverse(self)

    def __str__(self) -> str:
        if self.k <= 9:
            return "".join(str(v) for v in self.images)
        return ",".join(str(v) for v in self.images)

    def __repr__(self) -> str:
        return f"Permutation({self})"


def compose(sigma: Permutation, tau: Permutation) -> Permutation:
    """Return ``sigma o tau``, i.e. ``i -> sigma(tau(i))``."""
    if sigma.k != tau.k:
        raise ValueError(f"length mismatch: {sigma.k} vs {tau.k}")
    return Permutation(_compose(sigma.images, tau.images))


def inverse(pi: Permutation) -> Permutation:
    return Permutation(_inverse(pi.images))


class StatisticKind(enum.Enum):
    DES = "des"
    INV = "inv"
    DESTAT = "destat"

    def s_max(self, k: int) -> int:
        if self is StatisticKind.DES:
            return k - 1
        if self is StatisticKind.INV:
            return k * (k - 1) // 2
        return 2 * (k - 1)

    @property
    def inverse_symmetric(self) -> bool:
        """Whether ``stat(p) == stat(p^-1)`` for every permutation."""
        return self is not StatisticKind.DES

    def of_images(self, p: Images) -> int:
        return _STAT_FUNCS[self](p)

    @classmethod
    def from_name(cls, name: str) -> "StatisticKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(f"unknown statistic {name!r}; expected des, inv or destat") from None


_STAT_FUNCS = {
    StatisticKind.DES: _des,
    StatisticKind.INV: _inv,
    StatisticKind.DESTAT: _destat,
}


def statistic(kind: StatisticKind, pi: Permutation) -> int:
    return kind.of_images(pi.images)


def contains(pi: Permutation, pattern: Permutation) -> bool:
    """Classical containment: some subsequence of ``pi`` is order-isomorphic to ``pattern``."""
    m = pattern.k
    if m > pi.k:
        return False
    target = pattern.images
    imgs = pi.images
    return any(
        _standardize([imgs[i] for i in idx]) == target
        for idx in itertools.combinations(range(pi.k), m)
    )


def _check_k(k: int) -> None:
    if not 1 <= k <= MAX_K:
        raise ValueError(f"k must be in 1..{MAX_K}, got {k}")


@dataclass(frozen=True)
class PermaspinSet:
    """Lexicographically ordered set of allowed spin values.

    ``patterns`` is non-empty when the set was defined by pattern avoidance.
    """

    k: int
    members: tuple[Permutation, ...]
    patterns: tuple[Permutation, ...] = ()

    def __post_init__(self) -> None:
        ms = tuple(sorted(set(self.members)))
        if len(ms) != len(self.members):
            raise ValueError("duplicate members")
        for p in ms:
            if p.k != self.k:
                raise ValueError(f"member {p} has length {p.k}, expected {self.k}")
        object.__setattr__(self, "members", ms)

    @classmethod
    def explicit(cls, perms: Iterable[Permutation | str]) -> "PermaspinSet":
        ps = [p if isinstance(p, Permutation) else Permutation.parse(p) for p in perms]
        if not ps:
            raise ValueError("empty permaspin set")
        return cls(ps[0].k, tuple(ps))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[Permutation]:
        return iter(self.members)

    def __getitem__(self, i: int) -> Permutation:
        return self.members[i]

    def __contains__(self, p: object) -> bool:
        return p in self._index

    @cached_property
    def _index(self) -> dict[Permutation, int]:
        return {p: i for i, p in enumerate(self.members)}

    def index(self, p: Permutation) -> int:
        return self._index[p]

    def label(self) -> str:
        if self.patterns:
            return f"S{self.k}(" + ",".join(str(p) for p in self.patterns) + ")"
        if len(self.members) == math.factorial(self.k):
            return f"S{self.k}"
        return "{" + ",".join(str(p) for p in self.members) + "}"


def enumerate_perms(k: int) -> PermaspinSet:
    """All of S_k in lexicographic order."""
    _check_k(k)
    return PermaspinSet(k, tuple(Permutation(p) for p in itertools.permutations(range(1, k + 1))))


def avoiders(k: int, patterns: Sequence[Permutation | str]) -> PermaspinSet:
    """Permutations of length ``k`` containing none of ``patterns``."""
    _check_k(k)
    pats = tuple(p if isinstance(p, Permutation) else Permutation.parse(p) for p in patterns)
    if not pats:
        raise ValueError("at least one pattern is required")
    for p in pats:
        if p.k > k:
            raise ValueError(f"pattern {p} is longer than k={k}")
    members = tuple(
        pi for pi in enumerate_perms(k) if not any(contains(pi, pat) for pat in pats)
    )
    return PermaspinSet(k, members, pats)


class IntPolynomial:
    """Univariate polynomial with exact integer coefficients (index = exponent)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int]):
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[int, ...] = tuple(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, m: int) -> int:
        return self.coeffs[m] if 0 <= m < len(self.coeffs) else 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, IntPolynomial):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPolynomial(self[i] + other[i] for i in range(n))

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        if not self.coeffs or not other.coeffs:
            return IntPolynomial(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
        return IntPolynomial(out)

    def truncate(self, degree: int) -> "IntPolynomial":
        return IntPolynomial(self.coeffs[: degree + 1])

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def is_palindromic(self, degree: int | None = None) -> bool:
        d = self.degree if degree is None else degree
        return all(self[m] == self[d - m] for m in range(d + 1))

    def __repr__(self) -> str:
        return f"IntPolynomial({list(self.coeffs)})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for m, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if m == 0 else ("x" if m == 1 else f"x^{m}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}{mono}"
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


def stat_gf(kind: StatisticKind, k: int) -> IntPolynomial:
    """Distribution polynomial ``sum_{pi in S_k} x^stat(pi)`` by enumeration."""
    _check_k(k)
    counts = Counter(kind.of_images(p) for p in itertools.permutations(range(1, k + 1)))
    return IntPolynomial(counts.get(m, 0) for m in range(kind.s_max(k) + 1))


def cddes_closed_form(n: int) -> IntPolynomial:
    """Double Eulerian polynomial from the binomial double series.

    The series ``sum_{i,j>=1} C(ij+n-1, n) u^(i+j-2)`` is truncated at degree
    ``2(n-1)``, multiplied by ``(1-u)^(2n+2)`` and truncated again.
    """
    _check_k(n)
    top = 2 * (n - 1)
    series = []
    for m in range(top + 1):
        # pairs (i, j) with i + j = m + 2, i, j >= 1
        series.append(sum(math.comb(i * (m + 2 - i) + n - 1, n) for i in range(1, m + 2)))
    one_minus_u = IntPolynomial((-1) ** r * math.comb(2 * n + 2, r) for r in range(2 * n + 3))
    return (IntPolynomial(series) * one_minus_u).truncate(top)
