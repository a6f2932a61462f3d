"""Named example walks and the imported-cell family.

``w0(Q)`` threads ``Q`` vertices ``gamma_i`` through a hub ``beta`` so
that every return to ``beta`` after the first is an imported cell.
``w2(Q)`` hangs three pendant there-and-back edges on ``beta`` after each
of those returns: the hub's exit degree grows like ``4Q + 1`` while its
self-intersection degree stays 1 and the Dyck tree keeps small degrees.
"""

from __future__ import annotations

from .walks import Walk, minimal_walk_of

TILDE_W8 = (1, 2, 3, 4, 2, 4, 3, 2, 1)
BREVE_W8 = (1, 2, 3, 4, 2, 3, 4, 2, 1)
RELABEL_INPUT = (5, 2, 1, 5, 7, 3, 1, 5)
RELABEL_OUTPUT = (1, 2, 3, 1, 4, 5, 3, 1)

#: Two open arrivals (t = 4, 8), one closed (t = 15), a single BTS-instant at 4.
THREE_SELF_INTERSECTIONS = (1, 2, 3, 4, 2, 3, 5, 6, 3, 6, 5, 3, 4, 2, 1, 6, 1)

#: Vertex 3 is revisited at t = 16 along its first arrival edge (2, 3).
I_TYPE_PATTERN = (1, 2, 3, 2, 4, 5, 4, 2, 6, 7, 6, 2, 8, 2, 9, 2, 3, 2, 1)


def _hub_path(Q: int, pendants: bool) -> list[str]:
    if Q < 1:
        raise ValueError("Q must be at least 1")
    g = [f"g{i}" for i in range(1, Q + 1)]
    seq = ["a", "b", g[0], "a", "b"]
    counter = 0

    def pendant() -> list[str]:
        nonlocal counter
        counter += 1
        return [f"e{counter}", "b", f"h{counter}", "b", f"m{counter}", "b"]

    for i in range(1, Q):
        seq += [g[i], g[i - 1], "b"]
        if pendants:
            seq += pendant()
    seq += ["d", g[-1], "b"]
    if pendants:
        seq += pendant()
    seq += ["d"] + g[::-1] + ["a"]
    return seq


def _minimal(seq: list[str]) -> Walk:
    names: dict[str, int] = {}
    return minimal_walk_of([names.setdefault(x, len(names) + 1) for x in seq])


def w0(Q: int) -> Walk:
    """Hub walk with ``Q`` imported cells at ``beta`` (label 2); ``s = 3Q``."""
    return _minimal(_hub_path(Q, False))


def w2(Q: int) -> Walk:
    """``w0(Q)`` with three pendant edges after every imported return to the hub."""
    return _minimal(_hub_path(Q, True))


HUB = 2


def named_walks() -> dict[str, Walk]:
    return {
        "tilde_w8": Walk(TILDE_W8),
        "breve_w8": Walk(BREVE_W8),
        "three_self_intersections": Walk(THREE_SELF_INTERSECTIONS),
        "i_type_pattern": Walk(I_TYPE_PATTERN),
        "w0_q3": w0(3),
        "w2_q1": w2(1),
        "w2_q2": w2(2),
        "w2_q3": w2(3),
        "w2_q5": w2(5),
        "w2_q10": w2(10),
    }
