"""Dyck paths, plane rooted trees and height statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import BudgetExceeded, ValidationError

#: Default cap on the number of paths an exhaustive routine may touch.
MAX_CATALAN = 3_000_000

#: Constants of the L(m)-census bound ``a s^b C(s) exp(-C2 m)``.
L_BOUND_STRONG = (2, 1, Fraction(3, 4))  # a=2, b=1, exp(-C2) = 3/4
L_BOUND_WEAK = (1, 2, Fraction(3, 4))


def catalan(s: int) -> int:
    """Return ``(2s)! / (s! (s+1)!)``."""
    if s < 0:
        raise ValueError("s must be non-negative")
    return math.comb(2 * s, s) // (s + 1)


@dataclass(frozen=True)
class DyckPath:
    """Balanced 0/1 sequence; 1 is an ascending (marked) step."""

    steps: tuple[int, ...]

    def __post_init__(self):
        steps = tuple(int(x) for x in self.steps)
        object.__setattr__(self, "steps", steps)
        h = 0
        for x in steps:
            if x not in (0, 1):
                raise ValidationError(f"Dyck steps must be 0/1, got {x!r}")
            h += 1 if x else -1
            if h < 0:
                raise ValidationError(f"prefix of {self} goes below zero")
        if h != 0:
            raise ValidationError(f"{self} is not balanced")

    @classmethod
    def from_string(cls, text: str) -> "DyckPath":
        return cls(tuple(int(c) for c in text.strip()))

    def __str__(self) -> str:
        return "".join(map(str, self.steps))

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def s(self) -> int:
        return len(self.steps) // 2

    def heights(self) -> tuple[int, ...]:
        """Height function at ``t = 0..2s``."""
        out = [0]
        for x in self.steps:
            out.append(out[-1] + (1 if x else -1))
        return tuple(out)


@dataclass(frozen=True)
class HeightStat:
    max_height: int
    argmax: int


@dataclass(frozen=True)
class PlaneTree:
    """Rooted ordered tree; vertex ``j >= 1`` is created by edge ``j``.

    ``parent[0]`` is ``-1``.  ``children[v]`` lists the children of ``v``
    left to right, which is also increasing creation order.
    """

    parent: tuple[int, ...]
    children: tuple[tuple[int, ...], ...]

    @property
    def n_vertices(self) -> int:
        return len(self.parent)

    @property
    def n_edges(self) -> int:
        return len(self.parent) - 1

    def exit_degree(self, v: int) -> int:
        return len(self.children[v])

    def max_exit_degree(self) -> int:
        return max((len(c) for c in self.children), default=0)

    def edge_parent(self, tau: int) -> int:
        """Tail vertex of the edge created at the ``tau``-th ascent."""
        return self.parent[tau]


def max_height(theta: DyckPath) -> HeightStat:
    hs = theta.heights()
    top = max(hs)
    return HeightStat(top, hs.index(top))


def tree_of(theta: DyckPath) -> PlaneTree:
    """Contour bijection: the ``tau``-th up-step creates vertex ``tau``."""
    parent = [-1]
    children: list[list[int]] = [[]]
    cur = 0
    for x in theta.steps:
        if x:
            v = len(parent)
            parent.append(cur)
            children.append([])
            children[cur].append(v)
            cur = v
        else:
            cur = parent[cur]
    return PlaneTree(tuple(parent), tuple(tuple(c) for c in children))


def contour_of(tree: PlaneTree) -> DyckPath:
    steps: list[int] = []
    stack = [(0, iter(tree.children[0]))]
    while stack:
        v, it = stack[-1]
        child = next(it, None)
        if child is None:
            stack.pop()
            if stack:
                steps.append(0)
        else:
            steps.append(1)
            stack.append((child, iter(tree.children[child])))
    return DyckPath(tuple(steps))


def _check_budget(s: int, cap: int) -> None:
    c = catalan(s)
    if c > cap:
        raise BudgetExceeded(f"Dyck paths of 2*{s} steps", c, cap)


def dyck_array(s: int, *, cap: int = MAX_CATALAN) -> np.ndarray:
    """All Dyck paths of ``2s`` steps as a ``(C(s), 2s)`` uint8 array."""
    if s < 0:
        raise ValueError("s must be non-negative")
    _check_budget(s, cap)
    out = np.zeros((catalan(s), 2 * s), np.uint8)
    hist = np.zeros(s + 1, np.int64)
    kernels.dyck_scan(s, out, hist)
    return out


def enumerate_dyck(s: int, *, cap: int = MAX_CATALAN) -> list[DyckPath]:
    """All Dyck paths of ``2s`` steps, up-step first at every branch."""
    return [DyckPath(tuple(int(x) for x in row)) for row in dyck_array(s, cap=cap)]


def max_height_histogram(s: int, *, cap: int = MAX_CATALAN) -> np.ndarray:
    """``hist[h]`` = number of Dyck paths of ``2s`` steps with max height ``h``."""
    _check_budget(s, cap)
    hist = np.zeros(s + 1, np.int64)
    kernels.dyck_scan(s, np.zeros((0, 0), np.uint8), hist)
    return hist


def has_L_property(theta: DyckPath, m: int) -> bool:
    return tree_of(theta).max_exit_degree() >= m


@lru_cache(maxsize=64)
def _exit_degree_census(s: int, cap: int) -> tuple[int, ...]:
    """``out[d]`` = number of paths whose tree has max exit degree ``d``."""
    rows = dyck_array(s, cap=cap)
    out = [0] * (s + 1)
    for row in rows:
        # children of the vertex at the top of the stack are counted on up-steps
        stack = [0]
        best = 0
        for x in row:
            if x:
                stack[-1] += 1
                if stack[-1] > best:
                    best = stack[-1]
                stack.append(0)
            else:
                stack.pop()
        out[best] += 1
    return tuple(out)


def count_L_property(s: int, m: int, *, cap: int = MAX_CATALAN) -> int:
    """Number of Dyck paths of ``2s`` steps whose tree has a vertex of degree >= m."""
    census = _exit_degree_census(s, cap)
    return sum(c for d, c in enumerate(census) if d >= m)


def L_property_bound(s: int, m: int, constants=L_BOUND_STRONG) -> Fraction:
    """``a s^b C(s) q^m`` with ``q = exp(-C2)``; exact for rational ``q``."""
    a, b, q = constants
    return Fraction(a) * s**b * catalan(s) * Fraction(q) ** m


def L_census_rows(s: int, constants=L_BOUND_STRONG) -> list[tuple[int, int, int, Fraction]]:
    """CSV-ready ``(s, m, count, bound)`` rows for ``m = 1..s+1``."""
    return [(s, m, count_L_property(s, m), L_property_bound(s, m, constants)) for m in range(1, s + 2)]


def sample_dyck_batch(s: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` independent uniform Dyck paths via the cycle lemma.

    A uniformly shuffled word with ``s`` up-steps and ``s+1`` down-steps has
    exactly one rotation whose proper prefixes stay non-negative; it starts
    just after the first minimum of the prefix sums.  Dropping its final
    down-step leaves a uniform Dyck path.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    base = np.concatenate([np.ones(s, np.int8), -np.ones(s + 1, np.int8)])
    words = rng.permuted(np.broadcast_to(base, (count, 2 * s + 1)), axis=1)
    start = np.argmin(np.cumsum(words, axis=1), axis=1) + 1
    cols = (start[:, None] + np.arange(2 * s)[None, :]) % (2 * s + 1)
    rotated = np.take_along_axis(words, cols, axis=1)
    return (rotated > 0).astype(np.uint8)


def sample_dyck_uniform(s: int, seed: int) -> DyckPath:
    rng = np.random.default_rng(seed)
    return DyckPath(tuple(int(x) for x in sample_dyck_batch(s, 1, rng)[0]))


@dataclass(frozen=True)
class BEstimate:
    value: float
    stderr: float
    mode: str
    s: int
    lam: float
    samples: int


def estimate_B(
    s: int,
    lam: float,
    mode: str = "exhaustive",
    trials: int = 100_000,
    seed: int = 0,
    *,
    cap: int = MAX_CATALAN,
) -> BEstimate:
    """Average of ``exp(lam * M_theta / sqrt(s))`` over Dyck paths of ``2s`` steps."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if s < 1:
        raise ValueError("s must be >= 1")
    scale = lam / math.sqrt(s)
    if mode == "exhaustive":
        hist = max_height_histogram(s, cap=cap)
        total = math.fsum(int(c) * math.exp(scale * h) for h, c in enumerate(hist))
        return BEstimate(total / catalan(s), 0.0, mode, s, lam, catalan(s))
    if mode == "sampled":
        rng = np.random.default_rng(seed)
        vals = []
        done = 0
        while done < trials:
            batch = min(50_000, trials - done)
            paths = sample_dyck_batch(s, batch, rng).astype(np.int64)
            tops = np.max(np.cumsum(2 * paths - 1, axis=1), axis=1)
            vals.append(np.exp(scale * tops))
            done += batch
        x = np.concatenate(vals)
        return BEstimate(float(np.mean(x)), float(np.std(x, ddof=1) / math.sqrt(len(x))), mode, s, lam, len(x))
    raise ValueError(f"unknown mode {mode!r}")


def parse_dyck_lines(lines: Iterable[str]) -> list[DyckPath]:
    return [DyckPath.from_string(line) for line in lines if line.strip()]


def format_dyck(paths: Sequence[DyckPath]) -> str:
    return "".join(f"{p}\n" for p in paths)
