"""Self-intersection structure of an even walk.

Every marked step arrives somewhere.  The root also carries one hidden
marked arrival at ``t = 0``, so each vertex has degree ``kappa >= 1`` and
``sum_k k * nu_k = s + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

from .errors import ValidationError
from .walks import Edge, Walk, _coerce, edge_key

Openness = Literal["odd_edge", "first_edge"]
OPENNESS_ALIASES = {"odd_edge": "odd_edge", "default": "odd_edge", "first_edge": "first_edge", "R": "first_edge"}


def _openness(mode: str) -> str:
    try:
        return OPENNESS_ALIASES[mode]
    except KeyError:
        raise ValueError(f"unknown openness rule {mode!r}") from None


@dataclass(frozen=True)
class OpenArrival:
    t: int
    vertex: int
    kind: str  # "E", "S" or "both"


@dataclass(frozen=True)
class SelfIntersectionProfile:
    s: int
    kappa: dict
    nu: tuple[int, ...]
    nu1_norm: int
    nu2_norm: int
    open_arrivals: tuple[OpenArrival, ...]
    exit_degree: dict
    max_exit_degree: int
    max_edge_multiplicity: int
    has_loop: bool
    r: int = 0
    r_E: int = 0
    r_S: int = 0
    r3: int = 0
    simple_types: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "kappa": {str(k): v for k, v in sorted(self.kappa.items())},
            "nu": list(self.nu),
            "open_arrivals": [[a.t, a.vertex, a.kind] for a in self.open_arrivals],
            "delta": self.max_exit_degree,
        }


# --------------------------------------------------------------- elementary


def arrivals(w, beta: int) -> list[int]:
    """Marked arrival instants at ``beta`` (the hidden ``t = 0`` excluded)."""
    w = _coerce(w)
    return [t for t in range(1, len(w.labels)) if w.marks[t] and w.labels[t] == beta]


def _check_vertex(w: Walk, beta: int) -> None:
    if beta not in w.first_visit:
        raise ValidationError(f"vertex {beta} is not in walk {w}")


def kappa(w, beta: int) -> int:
    w = _coerce(w)
    _check_vertex(w, beta)
    return len(arrivals(w, beta)) + (1 if beta == w.root else 0)


def kappa_map(w) -> dict[int, int]:
    w = _coerce(w)
    out = {v: 0 for v in w.vertices}
    out[w.root] += 1
    for t in range(1, len(w.labels)):
        if w.marks[t]:
            out[w.labels[t]] += 1
    return out


def exit_cluster(w, beta: int) -> list[Edge]:
    """Marked edges leaving ``beta`` in time order."""
    w = _coerce(w)
    lab = w.labels
    return [Edge(t, lab[t - 1], lab[t], True) for t in range(1, len(lab)) if w.marks[t] and lab[t - 1] == beta]


def exit_degree(w, beta: int) -> int:
    return len(exit_cluster(w, beta))


def exit_degrees(w) -> dict[int, int]:
    w = _coerce(w)
    out = {v: 0 for v in w.vertices}
    for t in range(1, len(w.labels)):
        if w.marks[t]:
            out[w.labels[t - 1]] += 1
    return out


def max_exit_degree(w) -> int:
    return max(exit_degrees(w).values())


def non_marked_exits(w, beta: int) -> int:
    w = _coerce(w)
    lab = w.labels
    return sum(1 for t in range(1, len(lab)) if not w.marks[t] and lab[t - 1] == beta)


def odd_edges_at(w, beta: int, t: int) -> list[tuple[int, int]]:
    """Non-oriented edges at ``beta`` run an odd number of times during ``1..t``."""
    w = _coerce(w)
    counts: dict[tuple[int, int], int] = {}
    lab = w.labels
    for u in range(1, t + 1):
        key = edge_key(lab[u - 1], lab[u])
        if beta in key:
            counts[key] = counts.get(key, 0) + 1
    return sorted(k for k, c in counts.items() if c % 2)


def count_open_marked_edges(w, beta: int, t: int) -> int:
    """Edges at ``beta`` whose multiplicity after step ``t`` is odd; a loop counts once."""
    w = _coerce(w)
    if not 0 <= t <= w.n_steps:
        raise ValueError(f"time {t} outside 0..{w.n_steps}")
    return len(odd_edges_at(w, beta, t))


def _last_orientation(w: Walk, key: tuple[int, int], t: int) -> tuple[int, int]:
    lab = w.labels
    for u in range(t, 0, -1):
        if edge_key(lab[u - 1], lab[u]) == key:
            return lab[u - 1], lab[u]
    raise AssertionError("edge never traversed")


def is_open_arrival(w, t: int, openness: str = "odd_edge") -> tuple[bool, str | None]:
    """Openness of the marked arrival at ``t``; returns ``(open, kind)``.

    ``kind`` is ``"E"`` when ``w(t)`` is the head of an odd edge (oriented by
    its last traversal, which is marked), ``"S"`` when it is the tail,
    ``"both"`` when both happen or the odd edge is a loop.
    """
    w = _coerce(w)
    mode = _openness(openness)
    if not 1 <= t <= w.n_steps or not w.marks[t]:
        raise ValidationError(f"t={t} is not a marked instant of {w}")
    beta = w.labels[t]
    odd = odd_edges_at(w, beta, t - 1)
    if not odd:
        return False, None
    if mode == "first_edge" and beta != w.root:
        first = w.first_visit[beta]
        key = edge_key(w.labels[first - 1], beta)
        lab = w.labels
        uses = sum(1 for u in range(1, t) if edge_key(lab[u - 1], lab[u]) == key)
        if uses != 1:
            return False, None
    head = tail = False
    for key in odd:
        a, b = _last_orientation(w, key, t - 1)
        head |= b == beta
        tail |= a == beta
    return True, ("both" if head and tail else "E" if head else "S")


# ------------------------------------------------- simple self-intersections


def classify_simple(w, beta: int) -> str:
    """``"I"``, ``"II"`` or ``"other"`` for a non-root vertex with ``kappa = 2``.

    I-type: the second arrival comes from the tail of the first arrival
    edge, i.e. along a marked edge already in that tail's exit cluster.
    II-type: the second arrival runs ``(delta, beta)`` while the marked
    edge ``(beta, delta)`` already exists.
    """
    w = _coerce(w)
    _check_vertex(w, beta)
    if beta == w.root or kappa(w, beta) != 2:
        raise ValidationError(f"vertex {beta} is not a simple self-intersection of {w}")
    t1, t2 = arrivals(w, beta)
    lab = w.labels
    alpha = lab[t2 - 1]
    if alpha == lab[t1 - 1]:
        return "I"
    if any(e.head == alpha and e.t < t2 for e in exit_cluster(w, beta)):
        return "II"
    return "other"


def simple_types(w) -> dict[int, str]:
    w = _coerce(w)
    km = kappa_map(w)
    return {v: classify_simple(w, v) for v in w.vertices if v != w.root and km[v] == 2}


# ------------------------------------------------------------------ profile


def profile(w, openness: str = "odd_edge") -> SelfIntersectionProfile:
    w = _coerce(w)
    if not w.is_even:
        raise ValidationError(f"walk {w} is not even")
    s = w.s
    km = kappa_map(w)
    # the hidden root arrival makes sum(kappa) = s + 1, so k runs up to s + 1
    nu = [0] * (s + 1)
    for k in km.values():
        nu[k - 1] += 1
    nu = tuple(nu)
    opens = []
    for t in range(1, len(w.labels)):
        if w.marks[t]:
            is_open, kind = is_open_arrival(w, t, openness)
            if is_open:
                opens.append(OpenArrival(t, w.labels[t], kind))
    r = sum(1 for a in opens if km[a.vertex] == 2)
    r_E = sum(1 for a in opens if km[a.vertex] == 2 and a.kind != "S")
    r3 = sum(1 for a in opens if km[a.vertex] == 3)
    ed = exit_degrees(w)
    return SelfIntersectionProfile(
        s=s,
        kappa=km,
        nu=nu,
        nu1_norm=sum((k - 1) * c for k, c in enumerate(nu, 1)),
        nu2_norm=sum((k - 2) * c for k, c in enumerate(nu, 1) if k >= 2),
        open_arrivals=tuple(opens),
        exit_degree=ed,
        max_exit_degree=max(ed.values()),
        max_edge_multiplicity=max(w.final_multiplicity.values(), default=0),
        has_loop=any(a == b for a, b in w.final_multiplicity),
        r=r,
        r_E=r_E,
        r_S=r - r_E,
        r3=r3,
        simple_types=simple_types(w),
    )


def nu_vector(w) -> SelfIntersectionProfile:
    return profile(w)


def vertex_classes(w) -> dict[int, tuple[int, ...]]:
    """``k -> vertices with kappa = k`` (the sets ``N_k``)."""
    out: dict[int, list[int]] = {}
    for v, k in sorted(kappa_map(w).items()):
        out.setdefault(k, []).append(v)
    return {k: tuple(vs) for k, vs in sorted(out.items())}


def instant_partition(w) -> tuple[tuple[int, ...], ...]:
    """Marked-step indices ``tau = 1..s`` grouped by arrival vertex, root first.

    Together with the Dyck path this pins down which ascents are repeat
    visits and where they land.
    """
    w = _coerce(w)
    groups: dict[int, list[int]] = {v: [] for v in w.vertices}
    tau = 0
    for t in range(1, len(w.labels)):
        if w.marks[t]:
            tau += 1
            groups[w.labels[t]].append(tau)
    return tuple(tuple(groups[v]) for v in w.vertices)
