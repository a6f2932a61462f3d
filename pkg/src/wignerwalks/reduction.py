"""Stripping tree-like excursions from a walk.

One reduction step deletes a marked step that is immediately undone,
i.e. the pair of steps ending at ``t`` and ``t+1`` where
``w(t-1) = w(t+1)``.  The surviving positions keep their original labels
and original time stamps, so every quantity of the reduced walk can be
read back on the original graph.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .classify import is_open_arrival, kappa, kappa_map
from .walks import Walk, _coerce, edge_key


@dataclass(frozen=True)
class SubWalk:
    """Closed label sequence with the original time of every position."""

    labels: tuple[int, ...]
    times: tuple[int, ...]

    @classmethod
    def of(cls, w) -> "SubWalk":
        w = _coerce(w)
        return cls(w.labels, tuple(range(len(w.labels))))

    @property
    def n_steps(self) -> int:
        return len(self.labels) - 1

    @property
    def is_trivial(self) -> bool:
        return len(self.labels) == 1

    def marks(self) -> tuple[bool, ...]:
        counts: dict[tuple[int, int], int] = {}
        out = [False]
        lab = self.labels
        for j in range(1, len(lab)):
            key = edge_key(lab[j - 1], lab[j])
            counts[key] = counts.get(key, 0) + 1
            out.append(counts[key] % 2 == 1)
        return tuple(out)

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(self.labels)

    def candidates(self) -> list[int]:
        """Positions ``j`` whose step is marked and undone by the next step."""
        marks = self.marks()
        lab = self.labels
        return [j for j in range(1, len(lab) - 1) if marks[j] and lab[j - 1] == lab[j + 1]]

    def remove_at(self, j: int) -> "SubWalk":
        return SubWalk(self.labels[:j] + self.labels[j + 2 :], self.times[:j] + self.times[j + 2 :])


@dataclass(frozen=True)
class ReductionTrace:
    original: Walk
    reduced: SubWalk
    removed_step_pairs: tuple[tuple[int, int], ...]

    @property
    def surviving_time_map(self) -> dict[int, int]:
        return dict(enumerate(self.reduced.times))

    @property
    def is_tree_like(self) -> bool:
        return self.reduced.is_trivial


def reduce_once(w) -> tuple[SubWalk, tuple[int, int]] | None:
    """Remove the earliest removable pair of steps, or return None."""
    sub = w if isinstance(w, SubWalk) else SubWalk.of(w)
    cand = sub.candidates()
    if not cand:
        return None
    j = cand[0]
    return sub.remove_at(j), (sub.times[j], sub.times[j + 1])


def reduce_full(w, rng: random.Random | None = None) -> ReductionTrace:
    """Reduce until no pair is removable.

    With ``rng`` the removed pair is drawn at random among the candidates,
    which is how order independence is exercised.
    """
    w = _coerce(w)
    sub = SubWalk.of(w)
    removed = []
    while True:
        cand = sub.candidates()
        if not cand:
            break
        j = cand[0] if rng is None else rng.choice(cand)
        removed.append((sub.times[j], sub.times[j + 1]))
        sub = sub.remove_at(j)
    return ReductionTrace(w, sub, tuple(removed))


# ------------------------------------------------------------ BTS and cells


def bts_instants(w, trace: ReductionTrace | None = None) -> tuple[int, ...]:
    """Original times of reduced-walk positions reached by a marked step and left by a non-marked one."""
    trace = trace or reduce_full(w)
    sub = trace.reduced
    marks = sub.marks()
    return tuple(sub.times[j] for j in range(1, sub.n_steps) if marks[j] and not marks[j + 1])


@dataclass(frozen=True)
class CellReport:
    primary: dict
    imported: dict
    bts: tuple[int, ...]
    bts_vertex: dict

    @property
    def K(self) -> int:
        return len(self.bts)

    def J(self, beta: int) -> int:
        return len(self.imported.get(beta, ()))

    def L(self, beta: int) -> int:
        return len(self.primary.get(beta, ())) + self.J(beta)

    def local_bts(self, beta: int) -> tuple[int, ...]:
        return tuple(t for t in self.bts if self.bts_vertex[t] == beta)

    def remote_count(self, beta: int) -> int:
        return self.K - len(self.local_bts(beta))

    def to_json(self) -> dict:
        return {
            "primary": {str(v): list(ts) for v, ts in sorted(self.primary.items())},
            "imported": {str(v): list(ts) for v, ts in sorted(self.imported.items())},
            "bts": list(self.bts),
            "K": self.K,
        }


def cells(w, trace: ReductionTrace | None = None) -> CellReport:
    w = _coerce(w)
    trace = trace or reduce_full(w)
    primary = {v: [] for v in w.vertices}
    for t in range(1, len(w.labels)):
        if w.marks[t]:
            primary[w.labels[t]].append(t)
    imported = {v: [] for v in w.vertices}
    sub = trace.reduced
    marks = sub.marks()
    for j in range(1, len(sub.labels)):
        if not marks[j]:
            imported[sub.labels[j]].append(sub.times[j])
    bts = bts_instants(w, trace)
    return CellReport(
        {v: tuple(ts) for v, ts in primary.items()},
        {v: tuple(ts) for v, ts in imported.items()},
        bts,
        {t: w.labels[t] for t in bts},
    )


# ------------------------------------------------------------------ checks


def check_lemma_2_1(w, report: CellReport | None = None) -> bool:
    """Every BTS-instant that is a marked arrival is an open arrival."""
    w = _coerce(w)
    report = report or cells(w)
    return all(is_open_arrival(w, t)[0] for t in report.bts if w.marks[t])


@dataclass(frozen=True)
class CellBound:
    vertex: int
    J: int
    K_remote: int
    kappa: int
    L: int
    K: int

    @property
    def imported_ok(self) -> bool:
        return self.J <= self.K_remote + self.kappa

    @property
    def total_ok(self) -> bool:
        return self.L <= 2 * self.kappa + self.K


def lemma_2_2_rows(w, report: CellReport | None = None) -> list[CellBound]:
    w = _coerce(w)
    report = report or cells(w)
    km = kappa_map(w)
    return [
        CellBound(v, report.J(v), report.remote_count(v), km[v], report.L(v), report.K) for v in w.vertices
    ]


def check_lemma_2_2(w, report: CellReport | None = None) -> dict[int, bool]:
    """Per vertex: imported-cell bound and the total cell bound both hold."""
    return {row.vertex: row.imported_ok and row.total_ok for row in lemma_2_2_rows(w, report)}


def open_edge_count_at_visits(sub: SubWalk, beta: int) -> list[int]:
    """Odd edges at ``beta`` each time ``sub`` stands at ``beta``, then once more at the end.

    An odd loop at ``beta`` is counted twice since both of its ends sit there.
    """
    parity: dict[tuple[int, int], int] = {}
    lab = sub.labels
    out = []

    def current() -> int:
        total = 0
        for (a, b), p in parity.items():
            if p and beta in (a, b):
                total += 2 if a == b else 1
        return total

    for j in range(len(lab)):
        if j:
            key = edge_key(lab[j - 1], lab[j])
            parity[key] = parity.get(key, 0) ^ 1
        if lab[j] == beta:
            out.append(current())
    out.append(current())
    return out


def check_open_edge_steps(w, trace: ReductionTrace | None = None) -> bool:
    """Between successive visits of the reduced walk the open-edge count moves by 0 or 2."""
    trace = trace or reduce_full(w)
    sub = trace.reduced
    for beta in sub.vertices:
        seq = open_edge_count_at_visits(sub, beta)
        visits, final = seq[:-1], seq[-1]
        if final != 0:
            return False
        if any(abs(b - a) not in (0, 2) for a, b in zip(visits, visits[1:])):
            return False
    return True


def check_kappa_monotone(w, trace: ReductionTrace | None = None) -> bool:
    """Reduction never raises a vertex's self-intersection degree."""
    w = _coerce(w)
    trace = trace or reduce_full(w)
    sub = trace.reduced
    if sub.is_trivial:
        return True
    marks = sub.marks()
    km_sub = {v: 0 for v in sub.vertices}
    km_sub[sub.labels[0]] += 1
    for j in range(1, len(sub.labels)):
        if marks[j]:
            km_sub[sub.labels[j]] += 1
    return all(k <= kappa(w, v) for v, k in km_sub.items())


def inherited_marks_agree(w, trace: ReductionTrace | None = None) -> bool:
    """Marks recomputed on the reduced walk equal the original marks at the surviving times."""
    w = _coerce(w)
    trace = trace or reduce_full(w)
    sub = trace.reduced
    return all(m == w.marks[sub.times[j]] for j, m in enumerate(sub.marks()) if j)


def signature(w, trace: ReductionTrace) -> tuple:
    """Order-independent summary used to compare removal orders."""
    rep = cells(w, trace)
    return (rep.bts, tuple(sorted((v, ts) for v, ts in rep.imported.items())), trace.reduced.times)


def minimal_labels(labels: Sequence[int]) -> tuple[int, ...]:
    relabel: dict[int, int] = {}
    return tuple(relabel.setdefault(x, len(relabel) + 1) for x in labels)
