"""Minimal closed walks, their graphs and edge multiplicities.

A walk is stored as its label sequence ``w(0..N)``.  Every quantity the
other modules need (per-step multiplicities, marks, first arrivals) is
derived once from a single left-to-right pass and cached on the instance.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import kernels
from .dyck import DyckPath
from .errors import BudgetExceeded, ValidationError

#: Default cap on the number of walks materialised by one enumeration.
MAX_WALKS = 2_000_000


def edge_key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class Edge:
    t: int
    tail: int
    head: int
    marked: bool

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head


@dataclass(frozen=True, eq=True)
class Walk:
    """Closed walk in minimal labelling: ``w(0)=1`` and new labels appear in order."""

    labels: tuple[int, ...]

    def __post_init__(self):
        labels = tuple(int(x) for x in self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise ValidationError("a walk needs at least one label")
        if labels[0] != 1:
            raise ValidationError(f"walk must start at label 1, got {labels[0]}")
        if labels[-1] != labels[0]:
            raise ValidationError(f"walk {labels} is not closed")
        seen = 1
        for x in labels[1:]:
            if x < 1 or x > seen + 1:
                raise ValidationError(f"walk {labels} is not minimally labelled")
            if x == seen + 1:
                seen += 1

    @classmethod
    def even(cls, labels: Iterable[int]) -> "Walk":
        """Construct and require evenness."""
        w = cls(tuple(labels))
        if not w.is_even:
            raise ValidationError(f"walk {w.labels} is not even")
        return w

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, t: int) -> int:
        return self.labels[t]

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.labels)) + ")"

    @property
    def n_steps(self) -> int:
        return len(self.labels) - 1

    @property
    def s(self) -> int:
        return self.n_steps // 2

    @property
    def root(self) -> int:
        return self.labels[0]

    @cached_property
    def n_vertices(self) -> int:
        return max(self.labels)

    @cached_property
    def vertices(self) -> tuple[int, ...]:
        return tuple(range(1, self.n_vertices + 1))

    @cached_property
    def step_multiplicity(self) -> tuple[int, ...]:
        """``m[t]`` = multiplicity of the edge of step ``t`` right after step ``t``.

        Index 0 is a placeholder (0).
        """
        counts: dict[tuple[int, int], int] = {}
        out = [0]
        w = self.labels
        for t in range(1, len(w)):
            key = edge_key(w[t - 1], w[t])
            counts[key] = counts.get(key, 0) + 1
            out.append(counts[key])
        return tuple(out)

    @cached_property
    def final_multiplicity(self) -> dict[tuple[int, int], int]:
        counts: dict[tuple[int, int], int] = {}
        w = self.labels
        for t in range(1, len(w)):
            key = edge_key(w[t - 1], w[t])
            counts[key] = counts.get(key, 0) + 1
        return counts

    @cached_property
    def marks(self) -> tuple[bool, ...]:
        """``marks[t]`` for ``t = 1..N``; index 0 is False."""
        return (False,) + tuple(m % 2 == 1 for m in self.step_multiplicity[1:])

    @cached_property
    def is_even(self) -> bool:
        return all(m % 2 == 0 for m in self.final_multiplicity.values())

    @cached_property
    def first_visit(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for t, v in enumerate(self.labels):
            out.setdefault(v, t)
        return out

    def edges(self) -> list[Edge]:
        w = self.labels
        return [Edge(t, w[t - 1], w[t], self.marks[t]) for t in range(1, len(w))]


def _coerce(w) -> Walk:
    return w if isinstance(w, Walk) else Walk(tuple(w))


def minimal_walk_of(path: Sequence[int]) -> Walk:
    """Relabel a closed index path so that each new label is the next unused integer."""
    path = tuple(int(x) for x in path)
    if not path:
        raise ValidationError("empty path")
    if path[0] != path[-1]:
        raise ValidationError(f"path {path} is not closed")
    relabel: dict[int, int] = {}
    out = []
    for x in path:
        if x not in relabel:
            relabel[x] = len(relabel) + 1
        out.append(relabel[x])
    return Walk(tuple(out))


def is_even(w) -> bool:
    return _coerce(w).is_even


def is_double_even(w) -> bool:
    """Every edge is run equally often in each direction; loops never break this."""
    w = _coerce(w)
    forward: dict[tuple[int, int], int] = {}
    for a, b in zip(w.labels, w.labels[1:]):
        if a == b:
            continue
        key = edge_key(a, b)
        forward[key] = forward.get(key, 0) + (1 if a < b else -1)
    return all(v == 0 for v in forward.values())


def multiplicity(w, alpha: int, beta: int, t: int) -> int:
    """Traversals of ``[alpha, beta]`` in either direction during steps ``1..t``."""
    w = _coerce(w)
    if not 0 <= t <= w.n_steps:
        raise ValueError(f"time {t} outside 0..{w.n_steps}")
    key = edge_key(alpha, beta)
    lab = w.labels
    return sum(1 for u in range(1, t + 1) if edge_key(lab[u - 1], lab[u]) == key)


def marked_instants(w) -> tuple[frozenset[int], DyckPath]:
    w = _coerce(w)
    if not w.is_even:
        raise ValidationError(f"walk {w} is not even")
    marks = w.marks[1:]
    return frozenset(t for t, m in enumerate(marks, 1) if m), DyckPath(tuple(int(m) for m in marks))


def dyck_of(w) -> DyckPath:
    return marked_instants(w)[1]


@dataclass(frozen=True)
class WalkGraph:
    vertices: tuple[int, ...]
    edges: tuple[Edge, ...]
    multiplicity: dict

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def m(self, alpha: int, beta: int, t: int | None = None) -> int:
        key = edge_key(alpha, beta)
        if t is None:
            return self.multiplicity.get(key, 0)
        return sum(1 for e in self.edges if e.t <= t and edge_key(e.tail, e.head) == key)

    def marked_edges(self) -> list[Edge]:
        return [e for e in self.edges if e.marked]


def graph_of(w) -> WalkGraph:
    w = _coerce(w)
    return WalkGraph(w.vertices, tuple(w.edges()), dict(w.final_multiplicity))


# ---------------------------------------------------------------- enumeration


def _scan(s: int, prefix: Sequence[int]) -> np.ndarray:
    pre = np.asarray(prefix, np.int64)
    empty = np.zeros((0, 2 * s + 1), np.int64)
    count = kernels.even_walk_scan(s, pre, empty)
    out = np.zeros((count, 2 * s + 1), np.int64)
    if count:
        kernels.even_walk_scan(s, pre, out)
    return out


def count_even_walks(s: int) -> int:
    if s < 0:
        raise ValueError("s must be non-negative")
    return int(kernels.even_walk_scan(s, np.zeros(0, np.int64), np.zeros((0, 2 * s + 1), np.int64)))


def walk_prefixes(s: int, depth: int) -> list[tuple[int, ...]]:
    """Feasible minimal label prefixes ``w(1..depth)`` in lexicographic order."""
    depth = min(depth, 2 * s)
    out: list[tuple[int, ...]] = []

    def grow(prefix: tuple[int, ...], top: int) -> None:
        if len(prefix) == depth:
            out.append(prefix)
            return
        for v in range(1, min(top + 1, s + 1) + 1):
            grow(prefix + (v,), max(top, v))

    grow((), 1)
    return out


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("WIGNERWALKS_THREADS", "1")))
    except ValueError:
        return 1


def even_walk_array(s: int, *, cap: int = MAX_WALKS, split_depth: int = 2, threads: int | None = None) -> np.ndarray:
    """All minimal even walks of ``2s`` steps as rows of an int64 array.

    The search is split by label prefix; blocks are scanned independently
    (in threads when requested, the kernels release the GIL) and stitched
    back together in lexicographic order.
    """
    if s < 0:
        raise ValueError("s must be non-negative")
    total = count_even_walks(s)
    if total > cap:
        raise BudgetExceeded(f"even walks of 2*{s} steps", total, cap)
    if s <= 2:
        return _scan(s, ())
    prefixes = walk_prefixes(s, split_depth)
    threads = _threads() if threads is None else threads
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            blocks = list(pool.map(lambda p: _scan(s, p), prefixes))
    else:
        blocks = [_scan(s, p) for p in prefixes]
    return np.concatenate(blocks, axis=0)


def iter_even_walks(s: int, *, cap: int = MAX_WALKS) -> Iterator[Walk]:
    for row in even_walk_array(s, cap=cap):
        yield Walk(tuple(row.tolist()))


def enumerate_even_walks(s: int, *, cap: int = MAX_WALKS) -> list[Walk]:
    """All minimal even closed walks of ``2s`` steps, loops included, in lexicographic order."""
    return list(iter_even_walks(s, cap=cap))
