"""Counting bounds, constants and exhaustive census checks.

Each check yields a :class:`BoundReport` whose ``lhs`` is an observed
count (or exact value) and ``rhs`` the bound.  Bound functions return
exact rationals; floats appear only where the bound is transcendental,
and then the comparison is rounded against the claim.
"""

from __future__ import annotations

import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import classify as cl
from . import reduction as rd
from .dyck import L_BOUND_STRONG, L_census_rows, catalan, tree_of
from .errors import ValidationError
from .moments import lemma_6_1_sides
from .walks import MAX_WALKS, Walk, _coerce, enumerate_even_walks, dyck_of

C2 = math.log(4 / 3)
EPS_DEFAULT = Fraction(1, 8)


# ---------------------------------------------------------------- reports


@dataclass(frozen=True)
class BoundReport:
    bound_id: str
    params: dict
    lhs: Fraction | int | float
    rhs: Fraction | int | float
    satisfied: bool
    detail: str = ""

    @property
    def slack(self) -> float:
        """``lhs / rhs``; at most 1 when satisfied."""
        if self.rhs == 0:
            return 0.0 if self.lhs == 0 else math.inf
        return float(Fraction(self.lhs) / Fraction(self.rhs))

    def params_json(self) -> str:
        return json.dumps(self.params, sort_keys=True, separators=(",", ":"))


def report(bound_id: str, params: dict, lhs, rhs, detail: str = "") -> BoundReport:
    return BoundReport(bound_id, params, lhs, rhs, lhs <= rhs, detail)


# -------------------------------------------------------------- constants


def c1_term(k: int) -> float:
    """``2k / ((k-1)!)^{1/k}``."""
    return math.exp(math.log(2 * k) - math.lgamma(k) / k)


def _c1_tail(k: int) -> float:
    """Upper bound on ``c1_term(k)`` from Stirling's lower bound on ``(k-1)!`` (``k >= 2``)."""
    j = k - 1
    return 2 * k * math.exp(-(0.5 * math.log(2 * math.pi * j) + j * (math.log(j) - 1)) / k)


@dataclass(frozen=True)
class C1Result:
    value: float
    argmax: int
    cutoff: int
    tail_bound: float

    @property
    def certified(self) -> bool:
        return self.tail_bound < self.value


def constant_C1(cutoff: int = 10_000) -> C1Result:
    """``sup_k 2k / ((k-1)!)^{1/k}`` by scanning ``k <= cutoff``.

    Past the cutoff the Stirling bound is decreasing (its log-derivative is
    ``-(log k)/k^2 + O(1/k^2)``), so its value at ``cutoff + 1`` caps the tail.
    """
    best, arg = max((c1_term(k), k) for k in range(1, cutoff + 1))
    return C1Result(best, arg, cutoff, _c1_tail(cutoff + 1))


def constant_C0(U: float = 1.0, c1: float | None = None) -> float:
    c1 = constant_C1().value if c1 is None else c1
    return 2 * math.e * c1 * c1 * U**4


def constant_C(U: float = 1.0, extra: float = 37.0) -> float:
    return constant_C0(U) + extra


def h0(mu: float, V4: float) -> float:
    return math.exp((2 + 2 * mu * V4 * V4) / C2)


# -------------------------------------------------------- counting bounds


def bound_T2(s: int, nu2: int) -> Fraction:
    return Fraction(s * s, 2) ** nu2 / math.factorial(nu2)


def bound_Tk(s: int, k: int, nu_k: int) -> Fraction:
    if k < 2:
        raise ValueError("k must be at least 2")
    return Fraction(s**k, math.factorial(k - 1)) ** nu_k / math.factorial(nu_k)


def bound_T2_open(s: int, nu2: int, r: int, M: int) -> Fraction:
    if not 0 <= r <= nu2:
        raise ValueError("need 0 <= r <= nu2")
    return Fraction(2 * s * M) ** r * Fraction(s * s, 2) ** (nu2 - r) / (math.factorial(nu2 - r) * math.factorial(r))


def half_up(r: int) -> int:
    """``l`` for ``r = 2l`` and ``l + 1`` for ``r = 2l + 1``."""
    return (r + 1) // 2


def bound_T3_open(s: int, nu3: int, r3: int, M: int) -> Fraction:
    if not 0 <= r3 <= 2 * nu3:
        raise ValueError("need 0 <= r3 <= 2 nu3")
    h = half_up(r3)
    return (
        math.comb(2 * nu3, r3)
        * Fraction(4 * s * s * M) ** h
        * Fraction(s**3, 2) ** (nu3 - h)
        / math.factorial(nu3)
    )


def walk_count_bound(nu: Sequence[int], r: int) -> int:
    """``3^r prod_{k>=3} (2k)^{k nu_k}``; ``nu[k-1] = nu_k``."""
    out = 3**r
    for k, c in enumerate(nu, 1):
        if k >= 3:
            out *= (2 * k) ** (k * c)
    return out


def joint_bound(s: int, nu: Sequence[int], r: int, r3: int, M: int, slots: int | None = None) -> Fraction:
    """Instant-choice bounds for twofold and threefold vertices, plain ones above, times the run bound.

    ``slots`` is the number of ascents the instants are chosen from
    (``s`` by default).  Passing ``s + 1`` also admits the root's hidden
    arrival at ``t = 0`` as a first-arrival choice.
    """
    slots = s if slots is None else slots
    nu = list(nu) + [0] * 3
    out = bound_T2_open(slots, nu[1], r, M) * bound_T3_open(slots, nu[2], r3, M)
    for k in range(4, len(nu) + 1):
        if nu[k - 1]:
            out *= bound_Tk(slots, k, nu[k - 1])
    return out * walk_count_bound(nu, r)


def disjoint_kplets(s: int, k: int, nu: int) -> int:
    """Ways to pick ``nu`` pairwise disjoint ``k``-subsets of ``{1..s}``."""
    if k * nu > s:
        return 0
    return math.factorial(s) // (math.factorial(k) ** nu * math.factorial(nu) * math.factorial(s - k * nu))


# ---------------------------------------------------------------- Lemma 4.1


def _float_below(x: Fraction) -> float:
    f = float(x)
    return f if Fraction(f) <= x else math.nextafter(f, -math.inf)


def _lemma_4_1_rhs(s: int, n: int, sigma: int) -> Fraction:
    x = Fraction(-s * s, 2 * n) + Fraction(s * sigma, n)
    rhs = math.exp(_float_below(x))
    return Fraction(math.nextafter(math.nextafter(rhs, 0.0), 0.0))


def check_lemma_4_1(s: int, n: int, sigma: int) -> BoundReport:
    """``prod_{k=1}^{s-sigma} (1 - k/n) <= exp(-s^2/(2n)) exp(s sigma / n)``.

    The product is exact; the exponential is taken at a float exponent
    rounded down and then stepped down two ulps, so a pass is certain.
    """
    if s >= n:
        raise ValidationError(f"need s < n, got s={s}, n={n}")
    if sigma < 0:
        raise ValidationError("sigma must be non-negative")
    lhs = Fraction(1)
    for k in range(1, s - sigma + 1):
        lhs *= 1 - Fraction(k, n)
    rhs = _lemma_4_1_rhs(s, n, sigma)
    return BoundReport("lemma_4_1", {"s": s, "n": n, "sigma": sigma}, lhs, rhs, lhs <= rhs)


def lemma_4_1_grid(s_max: int = 50, n_max: int = 200, sigma_min: int = 1) -> list[BoundReport]:
    """Same rows as calling :func:`check_lemma_4_1` on the grid, sharing prefix products."""
    out = []
    for s in range(2, s_max + 1):
        for n in range(s + 1, n_max + 1):
            prefix = [Fraction(1)]
            for k in range(1, s - sigma_min + 1):
                prefix.append(prefix[-1] * (1 - Fraction(k, n)))
            for sigma in range(sigma_min, s + 1):
                lhs = prefix[s - sigma]
                rhs = _lemma_4_1_rhs(s, n, sigma)
                out.append(BoundReport("lemma_4_1", {"s": s, "n": n, "sigma": sigma}, lhs, rhs, lhs <= rhs))
    return out


# ------------------------------------------------------ per-walk lemmas


def check_lemma_3_1(w) -> tuple[bool, bool]:
    """(non-marked exits equal marked arrivals at every vertex, odd edges never exceed 2 kappa)."""
    w = _coerce(w)
    km = cl.kappa_map(w)
    arr = Counter()
    nm_out = Counter()
    odd = Counter()
    peak = Counter()
    parity: dict[tuple[int, int], int] = {}
    lab = w.labels
    for t in range(1, len(lab)):
        a, b = lab[t - 1], lab[t]
        if w.marks[t]:
            arr[b] += 1
        else:
            nm_out[a] += 1
        key = (a, b) if a <= b else (b, a)
        p = parity.get(key, 0) ^ 1
        parity[key] = p
        step = 1 if p else -1
        odd[a] += step
        if a != b:
            odd[b] += step
        peak[a] = max(peak[a], odd[a])
        peak[b] = max(peak[b], odd[b])
    part1 = all(nm_out[v] == arr[v] for v in w.vertices)
    part2 = all(peak[v] <= 2 * km[v] for v in w.vertices)
    return part1, part2


def check_lemma_4_2(w) -> bool:
    """Each I-type vertex is reached the second time along an edge already in the tail's exit cluster."""
    w = _coerce(w)
    for beta, kind in cl.simple_types(w).items():
        if kind != "I":
            continue
        t2 = cl.arrivals(w, beta)[1]
        alpha = w.labels[t2 - 1]
        if not any(e.head == beta for e in cl.exit_cluster(w, alpha) if e.t < t2):
            return False
    return True


@dataclass(frozen=True)
class SubClusterReport:
    vertex: int
    cells: tuple[int, ...]  # zeta instants
    clusters: tuple[tuple[int, ...], ...]  # exit step times per cell
    parents: tuple[tuple[int, ...], ...]  # tree parents per cell
    L: int
    L_prime: int

    @property
    def same_parent(self) -> bool:
        return all(len(set(p)) <= 1 for p in self.parents)

    @property
    def inequality(self) -> bool:
        return self.L_prime <= self.L


def exit_subclusters(w, beta: int, report: rd.CellReport | None = None) -> SubClusterReport:
    """Split the exit cluster of ``beta`` by the cell instants at ``beta``.

    Cells are the primary and imported arrivals, plus ``t = 0`` at the root
    so that exits made before the first return are covered.  A marked exit
    at step ``t`` leaves at ``t - 1`` and joins the last cell at or before
    that time.  Its tree edge is the one created by the same ascent.
    """
    w = _coerce(w)
    report = report or rd.cells(w)
    zeta = sorted(set(report.primary[beta]) | set(report.imported[beta]) | ({0} if beta == w.root else set()))
    tree = tree_of(dyck_of(w))
    tau_of = {}
    tau = 0
    for t in range(1, len(w.labels)):
        if w.marks[t]:
            tau += 1
            tau_of[t] = tau
    groups: list[list[int]] = [[] for _ in zeta]
    for e in cl.exit_cluster(w, beta):
        depart = e.t - 1
        idx = max(i for i, z in enumerate(zeta) if z <= depart)
        groups[idx].append(e.t)
    parents = tuple(tuple(tree.parent[tau_of[t]] for t in g) for g in groups)
    distinct = {p for g in parents for p in g}
    return SubClusterReport(beta, tuple(zeta), tuple(map(tuple, groups)), parents, len(zeta), len(distinct))


def check_lemma_4_3(w, beta: int, report: rd.CellReport | None = None) -> BoundReport:
    sub = exit_subclusters(w, beta, report)
    return BoundReport(
        "lemma_4_3",
        {"walk": list(_coerce(w).labels), "beta": beta},
        sub.L_prime,
        sub.L,
        sub.inequality,
        "" if sub.same_parent else "sub-cluster spans several tree parents",
    )


# ------------------------------------------------------------------ census


PER_WALK_CHECKS = (
    "lemma_2_1",
    "lemma_2_2",
    "corollary_2_5",
    "lemma_3_1_exits",
    "lemma_3_1_open",
    "lemma_4_2",
    "lemma_4_3",
    "open_edge_steps",
    "lemma_6_1",
)


@dataclass
class WalkChecks:
    walk: Walk
    results: dict
    same_parent: bool
    lemma_6_1: tuple[Fraction, Fraction] | None = None

    @property
    def ok(self) -> bool:
        return all(self.results.values())


def walk_checks(w, V6: Sequence[Fraction] | None = None, U=None) -> WalkChecks:
    w = _coerce(w)
    trace = rd.reduce_full(w)
    rep = rd.cells(w, trace)
    rows = rd.lemma_2_2_rows(w, rep)
    p1, p2 = check_lemma_3_1(w)
    subs = [exit_subclusters(w, v, rep) for v in w.vertices]
    res = {
        "lemma_2_1": rd.check_lemma_2_1(w, rep),
        "lemma_2_2": all(r.imported_ok for r in rows),
        "corollary_2_5": all(r.total_ok for r in rows),
        "lemma_3_1_exits": p1,
        "lemma_3_1_open": p2,
        "lemma_4_2": check_lemma_4_2(w),
        "lemma_4_3": all(x.inequality for x in subs),
        "open_edge_steps": rd.check_open_edge_steps(w, trace),
    }
    sides = None
    if V6 is not None:
        sides = lemma_6_1_sides(w, V6, U)
        res["lemma_6_1"] = sides[0] <= sides[1]
    return WalkChecks(w, res, all(x.same_parent for x in subs), sides)


@dataclass
class Census:
    s: int
    walks: int = 0
    failures: dict = field(default_factory=lambda: defaultdict(list))
    passes: Counter = field(default_factory=Counter)
    same_parent_violations: list = field(default_factory=list)
    fine_cells: Counter = field(default_factory=Counter)  # (theta, partition, r) -> count
    fine_bound: dict = field(default_factory=dict)
    joint_cells: Counter = field(default_factory=Counter)  # (theta, nu, r, r3) -> count
    instant_cells: dict = field(default_factory=lambda: defaultdict(set))  # (theta, nu) -> partitions
    walk_results: list = field(default_factory=list)  # filled only with keep_walks=True

    def walk_reports(self) -> list[BoundReport]:
        return [r for wc in self.walk_results for r in per_walk_reports(wc)]

    def fine_reports(self) -> list[BoundReport]:
        out = []
        for key, count in sorted(self.fine_cells.items()):
            theta, part, r = key
            out.append(report("walk_count_3_3", {"theta": theta, "partition": [list(g) for g in part], "r": r}, count, self.fine_bound[key]))
        return out

    def joint_reports(self, slots: int | None = None) -> list[BoundReport]:
        bound_id = "walk_count_joint" if slots is None else f"walk_count_joint_slots{slots}"
        out = []
        for (theta, nu, r, r3), count in sorted(self.joint_cells.items()):
            M = max_height_of(theta)
            rhs = joint_bound(self.s, nu, r, r3, M, slots)
            out.append(report(bound_id, {"theta": theta, "nu": list(nu), "r": r, "r3": r3, "M": M}, count, rhs))
        return out

    def instant_reports(self) -> list[BoundReport]:
        out = []
        for (theta, nu), parts in sorted(self.instant_cells.items()):
            rhs = Fraction(1)
            for k, c in enumerate(nu, 1):
                if k == 2:
                    rhs *= bound_T2(self.s, c)
                elif k >= 3:
                    rhs *= bound_Tk(self.s, k, c)
            out.append(report("instant_choices", {"theta": theta, "nu": list(nu)}, len(parts), rhs))
        return out


def per_walk_reports(wc: WalkChecks) -> list[BoundReport]:
    """One row per check; boolean checks report a violation count against 0."""
    params = {"walk": list(wc.walk.labels)}
    out = []
    for name, ok in wc.results.items():
        if name == "lemma_6_1" and wc.lemma_6_1 is not None:
            out.append(report(name, params, *wc.lemma_6_1))
        else:
            out.append(BoundReport(name, params, 0 if ok else 1, 0, ok))
    return out


def max_height_of(theta: str) -> int:
    h = top = 0
    for c in theta:
        h += 1 if c == "1" else -1
        top = max(top, h)
    return top


def run_census(s: int, walks: Iterable[Walk] | None = None, V6=None, U=None, openness: str = "odd_edge", *, cap: int = MAX_WALKS, keep_walks: bool = False) -> Census:
    """Run every per-walk check and tally the walk-count cells."""
    census = Census(s)
    for w in walks if walks is not None else enumerate_even_walks(s, cap=cap):
        census.walks += 1
        wc = walk_checks(w, V6, U)
        for name, ok in wc.results.items():
            if ok:
                census.passes[name] += 1
            else:
                census.failures[name].append(w)
        if not wc.same_parent:
            census.same_parent_violations.append(w)
        if keep_walks:
            census.walk_results.append(wc)
        prof = cl.profile(w, openness)
        theta = str(dyck_of(w))
        part = cl.instant_partition(w)
        key = (theta, part, prof.r)
        census.fine_cells[key] += 1
        census.fine_bound[key] = walk_count_bound(prof.nu, prof.r)
        census.joint_cells[(theta, prof.nu, prof.r, prof.r3)] += 1
        census.instant_cells[(theta, prof.nu)].add(part)
    return census


def lemma_4_17_reports(s_max: int = 10, constants=L_BOUND_STRONG) -> list[BoundReport]:
    out = []
    for s in range(1, s_max + 1):
        for s_, m, count, bound in L_census_rows(s, constants):
            out.append(report("L_property_4_17", {"s": s_, "m": m}, count, bound))
    return out


# ---------------------------------------------------------- scaling report


@dataclass(frozen=True)
class ScalingRow:
    s: int
    n: int
    estimate: float
    stderr: float
    ratio: float  # sqrt(pi mu) / 4^s * estimate
    ratio_err: float
    catalan_ratio: float  # estimate / (n C(s))
    B: float
    log_bound: float  # log(B) + C mu
    exact: Fraction | None

    @property
    def verdict(self) -> str:
        """``pass``, ``flagged`` (error bar crosses the bound) or ``fail``."""
        lr = math.log(self.ratio) if self.ratio > 0 else -math.inf
        if lr <= self.log_bound and (self.ratio + 4 * self.ratio_err <= 0 or math.log(self.ratio + 4 * self.ratio_err) <= self.log_bound):
            return "pass"
        if self.ratio - 4 * self.ratio_err <= 0 or math.log(self.ratio - 4 * self.ratio_err) <= self.log_bound:
            return "flagged"
        return "fail"


def theorem_4_1_report(
    mu: float,
    s_list: Sequence[int],
    law="rademacher",
    *,
    U: float = 1.0,
    trials: int = 2000,
    seed: int = 0,
    B_s: int = 12,
    C: float | None = None,
    exact_max: int = 4,
) -> list[ScalingRow]:
    """Scaled moments along ``n = round(sqrt(s^3 / mu))`` next to ``B(6 sqrt mu) e^{C mu}``.

    The bound is kept in log form since ``e^{C mu}`` overflows for the
    default ``C``.
    """
    from .dyck import estimate_B
    from .moments import NAMED_LAWS, exact_moment, MomentSpec, mc_moment

    if isinstance(law, str):
        law = NAMED_LAWS[law]()
    C = constant_C(U) if C is None else C
    B = estimate_B(B_s, 6 * math.sqrt(mu), "exhaustive").value
    log_bound = math.log(B) + C * mu
    rows = []
    for i, s in enumerate(s_list):
        n = max(1, round(math.sqrt(s**3 / mu)))
        exact = None
        if s <= exact_max:
            exact = exact_moment(s, MomentSpec(n, law.moments(s)))
        mc = mc_moment(s, n, law, trials, seed + i)
        scale = math.sqrt(math.pi * mu) / 4.0**s
        rows.append(
            ScalingRow(
                s, n, mc.estimate, mc.stderr, scale * mc.estimate, scale * mc.stderr,
                mc.estimate / (n * catalan(s)), B, log_bound, exact,
            )
        )
    return rows


def B_trend(lam: float, s_values: Sequence[int]) -> list[tuple[int, float]]:
    from .dyck import estimate_B

    return [(s, estimate_B(s, lam, "exhaustive").value) for s in s_values]
