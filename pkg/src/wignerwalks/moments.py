"""Exact and sampled values of ``E Tr A^{2s}`` for symmetric random matrices.

``A = X / sqrt(n)`` with i.i.d. symmetric entries ``x_ij`` (``i <= j``),
diagonal included, and ``E x^{2m} = V_{2m}``.  Moment sequences are
stored as ``V[m-1] = V_{2m}``.

Three independent routes are provided: the walk sum (grouping minimal
walks by vertex count and edge multiplicities), the raw index sum over all
``n^{2s}`` paths, and Monte Carlo.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .dyck import catalan
from .errors import BudgetExceeded, ConfigError, ValidationError
from .walks import MAX_WALKS, Walk, _coerce, even_walk_array

#: Default cap on ``n^{2s}`` for the index-sum oracle.
MAX_INDEX_PATHS = 10**7
#: Moment orders carried by truncated specs (``q <= 76``).
Q0 = 76


# -------------------------------------------------------------------- laws


@dataclass(frozen=True)
class Law:
    """Symmetric entry distribution that can report (truncated) even moments."""

    name: str
    bound: float | None  # sup |x|, None when unbounded
    moment: Callable[[int], Fraction]  # m -> E x^{2m}
    truncated: Callable[[int, float], Fraction] | None = None  # (m, U) -> E x^{2m} 1{|x|<=U}
    sampler: Callable[[np.random.Generator, tuple], np.ndarray] | None = None

    def moments(self, count: int) -> tuple[Fraction, ...]:
        return tuple(self.moment(m) for m in range(1, count + 1))


def _double_factorial_odd(m: int) -> int:
    out = 1
    for j in range(1, 2 * m, 2):
        out *= j
    return out


def rademacher() -> Law:
    return Law(
        "rademacher",
        1.0,
        lambda m: Fraction(1),
        lambda m, U: Fraction(1) if U >= 1 else Fraction(0),
        lambda rng, shape: rng.integers(0, 2, size=shape).astype(np.float64) * 2.0 - 1.0,
    )


def gaussian() -> Law:
    from scipy.special import gammainc

    def trunc(m: int, U: float) -> Fraction:
        return Fraction(_double_factorial_odd(m) * float(gammainc(m + 0.5, U * U / 2.0)))

    def sample(rng, shape):
        return rng.standard_normal(shape)

    return Law("gaussian", None, lambda m: Fraction(_double_factorial_odd(m)), trunc, sample)


def _rational_sqrt(q: Fraction) -> Fraction | None:
    """Exact square root of a non-negative rational, or None when irrational."""
    num, den = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if num * num == q.numerator and den * den == q.denominator:
        return Fraction(num, den)
    return None


def uniform(half_width_sq: Fraction = Fraction(3)) -> Law:
    """Uniform on ``[-a, a]`` with ``a^2 = half_width_sq`` (rational, so moments are exact)."""
    a2 = Fraction(half_width_sq)
    a = math.sqrt(a2)
    a_exact = _rational_sqrt(a2)

    def trunc(m: int, U: float) -> Fraction:
        # E x^{2m} 1{|x| <= U} = U^{2m+1} / ((2m+1) a) below the support edge
        if U >= a:
            return a2**m / (2 * m + 1)
        inner = Fraction(U) ** (2 * m + 1) / (2 * m + 1)
        if a_exact is not None:
            return inner / a_exact
        return Fraction(float(inner) / a)

    def sample(rng, shape):
        return rng.uniform(-a, a, size=shape)

    name = "uniform" if a2 == 3 else f"uniform[a^2={a2}]"
    return Law(name, a, lambda m: a2**m / (2 * m + 1), trunc, sample)


def truncated_gaussian(U: float) -> Law:
    """Standard normal with values outside ``[-U, U]`` replaced by 0."""
    g = gaussian()

    def sample(rng, shape):
        x = rng.standard_normal(shape)
        x[np.abs(x) > U] = 0.0
        return x

    return Law(f"gaussian_truncated[{U}]", U, lambda m: g.truncated(m, U), lambda m, V: g.truncated(m, min(U, V)), sample)


NAMED_LAWS = {"rademacher": rademacher, "gaussian": gaussian, "uniform": uniform}


# -------------------------------------------------------------------- specs


@dataclass(frozen=True)
class MomentSpec:
    n: int
    V: tuple[Fraction, ...]
    U: float | Fraction | None = None
    zero_diagonal: bool = False
    law: Law | None = field(default=None, compare=False)
    unit_variance: bool = True

    def __post_init__(self):
        V = tuple(Fraction(v) for v in self.V)
        object.__setattr__(self, "V", V)
        if self.n < 0:
            raise ConfigError("n must be non-negative")
        if not V:
            raise ConfigError("moment sequence is empty")
        if self.unit_variance and V[0] != 1:
            raise ConfigError(f"second moment must be 1, got {V[0]}")
        if any(v < 0 for v in V):
            raise ConfigError("even moments must be non-negative")
        if self.U is not None:
            U = Fraction(self.U)
            for m, v in enumerate(V, 1):
                if v > U ** (2 * m):
                    raise ConfigError(f"V_{2 * m} = {v} exceeds U^{2 * m}")

    def with_n(self, n: int) -> "MomentSpec":
        return replace(self, n=n)

    def moment(self, order: int) -> Fraction:
        """``E x^order`` for even ``order``."""
        m = order // 2
        if order % 2 or m < 1:
            raise ValidationError(f"only positive even orders are stored, got {order}")
        if m > len(self.V):
            raise ValidationError(f"missing moment order {order} (have up to {2 * len(self.V)})")
        return self.V[m - 1]


def spec_for(name: str, n: int, count: int = Q0 // 2, **kw) -> MomentSpec:
    try:
        law = NAMED_LAWS[name]()
    except KeyError:
        raise ConfigError(f"unknown moment sequence {name!r}") from None
    U = None
    if law.bound is not None:
        U = law.bound if name != "uniform" else None
    return MomentSpec(n, law.moments(count), U=U, law=law, **kw)


def truncate_spec(spec: MomentSpec, n: int, alpha: Fraction | float, count: int = Q0 // 2) -> MomentSpec:
    """Zero the entries outside ``[-U_n, U_n]`` with ``U_n = n^alpha``.

    The second moment of the truncated law is generally below 1, so the
    result does not insist on unit variance.
    """
    if alpha <= 0:
        raise ConfigError("alpha must be positive")
    U = float(n) ** float(alpha)
    if spec.law is None or spec.law.truncated is None:
        raise ConfigError("insufficient moment data: the base law is only known through its moments")
    if spec.law.bound is not None and spec.law.bound <= U:
        return replace(spec, n=n, U=U)
    V = tuple(spec.law.truncated(m, U) for m in range(1, count + 1))
    return MomentSpec(n, V, U=U, zero_diagonal=spec.zero_diagonal, law=spec.law, unit_variance=False)


# ------------------------------------------------------------ walk weights


def weight(w, V: Sequence[Fraction], zero_diagonal: bool = False) -> Fraction:
    """Product over edges of ``V_{m}`` for edge multiplicity ``m``; odd walks weigh 0."""
    w = _coerce(w)
    out = Fraction(1)
    for (a, b), m in w.final_multiplicity.items():
        if m % 2:
            return Fraction(0)
        if a == b and zero_diagonal:
            return Fraction(0)
        if m // 2 > len(V):
            raise ValidationError(f"missing moment order {m}")
        out *= V[m // 2 - 1]
    return out


def falling_factorial(n: int, k: int) -> int:
    if k > n:
        return 0
    out = 1
    for j in range(k):
        out *= n - j
    return out


def class_cardinality(w, n: int) -> int:
    return falling_factorial(n, _coerce(w).n_vertices)


@dataclass(frozen=True)
class WalkClass:
    """Walks sharing everything the moment sum and its partition look at."""

    n_vertices: int
    half_multiplicities: tuple[int, ...]  # sorted m_e / 2 over edges
    has_loop: bool
    max_exit_degree: int
    count: int

    @property
    def max_multiplicity(self) -> int:
        return 2 * max(self.half_multiplicities, default=0)

    def weight(self, V: Sequence[Fraction], zero_diagonal: bool = False) -> Fraction:
        if zero_diagonal and self.has_loop:
            return Fraction(0)
        out = Fraction(1)
        for h in self.half_multiplicities:
            if h > len(V):
                raise ValidationError(f"missing moment order {2 * h}")
            out *= V[h - 1]
        return out


def _row_class(row: Sequence[int]) -> tuple:
    counts: dict[tuple[int, int], int] = {}
    exits: dict[int, int] = {}
    loop = False
    for a, b in zip(row, row[1:]):
        key = (a, b) if a <= b else (b, a)
        c = counts.get(key, 0) + 1
        counts[key] = c
        if c % 2:
            exits[a] = exits.get(a, 0) + 1
        loop |= a == b
    return (max(row), tuple(sorted(c // 2 for c in counts.values())), loop, max(exits.values(), default=0))


@lru_cache(maxsize=16)
def walk_classes(s: int, cap: int = MAX_WALKS) -> tuple[WalkClass, ...]:
    rows = even_walk_array(s, cap=cap)
    tally = Counter(_row_class(row) for row in rows.tolist())
    return tuple(WalkClass(*key, count) for key, count in sorted(tally.items()))


def exact_moment(s: int, spec: MomentSpec, *, cap: int = MAX_WALKS) -> Fraction:
    """``n^{-s} sum_w (n)_{|V(w)|} Q(w)`` over minimal even walks."""
    total = Fraction(0)
    for c in walk_classes(s, cap):
        card = falling_factorial(spec.n, c.n_vertices)
        if card:
            total += c.count * card * c.weight(spec.V, spec.zero_diagonal)
    return total / Fraction(spec.n) ** s if spec.n else Fraction(0)


def _decode_code(code: int, s: int) -> list[int]:
    """Half-multiplicity multiset from the kernel's base-``(s+1)`` tally code."""
    out = []
    j = 1
    while code:
        code, digit = divmod(code, s + 1)
        out.extend([j] * digit)
        j += 1
    return out


def brute_force_moment(s: int, spec: MomentSpec, *, cap: int = MAX_INDEX_PATHS) -> Fraction:
    """Direct sum over all ``n^{2s}`` index paths; independent of the walk code."""
    n = spec.n
    if n == 0:
        return Fraction(0)
    if s == 0:
        return Fraction(n)
    if n ** (2 * s) > cap:
        raise BudgetExceeded(f"index paths for s={s}, n={n}", n ** (2 * s), cap)
    hist = np.zeros((2, (s + 1) ** s), np.int64)
    kernels.index_sum_histogram(s, n, hist)
    total = Fraction(0)
    for loop in (0, 1):
        if loop and spec.zero_diagonal:
            continue
        for code in np.flatnonzero(hist[loop]).tolist():
            q = Fraction(1)
            for h in _decode_code(code, s):
                q *= spec.moment(2 * h)
            total += int(hist[loop, code]) * q
    return total / Fraction(n) ** s


# ------------------------------------------------------------- polynomial


@lru_cache(maxsize=None)
def _falling_coeffs(k: int) -> tuple[int, ...]:
    """Monomial coefficients of ``n (n-1) ... (n-k+1)`` (signed Stirling numbers)."""
    coeffs = [1]
    for j in range(k):
        nxt = [0] * (len(coeffs) + 1)
        for d, c in enumerate(coeffs):
            nxt[d + 1] += c
            nxt[d] -= j * c
        coeffs = nxt
    return tuple(coeffs)


@dataclass(frozen=True)
class MomentPolynomial:
    """``n^s * E Tr A^{2s}`` as ``sum_d coeffs[d] n^d``."""

    s: int
    coeffs: tuple[Fraction, ...]

    @property
    def degree(self) -> int:
        return max((d for d, c in enumerate(self.coeffs) if c), default=0)

    @property
    def leading(self) -> Fraction:
        return self.coeffs[self.s + 1] if len(self.coeffs) > self.s + 1 else Fraction(0)

    def __call__(self, n) -> Fraction:
        return sum((c * Fraction(n) ** d for d, c in enumerate(self.coeffs)), Fraction(0))

    def moment(self, n: int) -> Fraction:
        return self(n) / Fraction(n) ** self.s


def moment_polynomial(s: int, V: Sequence[Fraction], zero_diagonal: bool = False, *, cap: int = MAX_WALKS) -> MomentPolynomial:
    coeffs = [Fraction(0)] * (s + 2)
    for c in walk_classes(s, cap):
        q = c.count * c.weight(V, zero_diagonal)
        if q:
            for d, a in enumerate(_falling_coeffs(c.n_vertices)):
                coeffs[d] += a * q
    return MomentPolynomial(s, tuple(coeffs))


# ---------------------------------------------------------- Z-partition


def _le_power(delta: int, s: int, exponent: Fraction) -> bool:
    """``delta <= s^exponent`` decided exactly for rational ``exponent``."""
    p, q = exponent.numerator, exponent.denominator
    if p < 0:
        return delta ** q * s ** (-p) <= 1
    return delta**q <= s**p


def z_class(c: WalkClass, s: int, n: int, C0, eps) -> int:
    """1..4: partition cell of a walk class.

    A class with ``sigma > C0 s^2 / n`` is in 4.  Otherwise it is in 1 when
    no edge is run more than twice, in 2 when ``Delta <= s^{1/2 - eps}``,
    else in 3.
    """
    sigma = s + 1 - c.n_vertices
    if Fraction(sigma) * n > Fraction(C0) * s * s:
        return 4
    if c.max_multiplicity <= 2:
        return 1
    if _le_power(c.max_exit_degree, s, Fraction(1, 2) - Fraction(eps)):
        return 2
    return 3


def z_decomposition(s: int, spec: MomentSpec, C0, eps, *, cap: int = MAX_WALKS) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    parts = [Fraction(0)] * 4
    n = spec.n
    for c in walk_classes(s, cap):
        card = falling_factorial(n, c.n_vertices)
        if card:
            parts[z_class(c, s, n, C0, eps) - 1] += c.count * card * c.weight(spec.V, spec.zero_diagonal)
    scale = Fraction(n) ** s
    return tuple(p / scale for p in parts)


# ------------------------------------------------------------ Lemma 6.1


def lemma_6_1_sides(w, V: Sequence[Fraction], U) -> tuple[Fraction, Fraction]:
    """``(Q(w), prod_{k>=2} (V_12 U^{2(k-2)})^{nu_k})`` with exact arithmetic."""
    from .classify import kappa_map

    U = Fraction(U)
    if len(V) < 6:
        raise ValidationError("missing moment order 12")
    for m, v in enumerate(V, 1):
        if v > U ** (2 * m):
            raise ValidationError(f"inconsistent spec: V_{2 * m} = {v} exceeds U^{2 * m}")
    q = weight(w, V)
    rhs = Fraction(1)
    for k in kappa_map(w).values():
        if k >= 2:
            rhs *= V[5] * U ** (2 * (k - 2))
    return q, rhs


def check_lemma_6_1(w, V: Sequence[Fraction], U) -> bool:
    q, rhs = lemma_6_1_sides(w, V, U)
    return q <= rhs


# ------------------------------------------------------------- Monte Carlo


@dataclass(frozen=True)
class MCResult:
    estimate: float
    stderr: float
    trials: int


def symmetric_batch(rng: np.random.Generator, law: Law, n: int, batch: int) -> np.ndarray:
    """``batch`` symmetric matrices whose upper triangle (diagonal included) is i.i.d. ``law``."""
    x = law.sampler(rng, (batch, n, n))
    upper = np.triu(x)
    return upper + np.transpose(np.triu(x, 1), (0, 2, 1))


def trace_power(x: np.ndarray, s: int) -> np.ndarray:
    """``Tr X^{2s}`` per matrix as ``||X^s||_F^2`` (``s - 1`` products)."""
    if s == 0:
        return np.full(x.shape[0], float(x.shape[-1]))
    p = x
    for _ in range(s - 1):
        p = p @ x
    return np.einsum("bij,bij->b", p, p)


def mc_moment(s: int, n: int, law: Law | str, trials: int, seed: int, batch: int = 250) -> MCResult:
    """Sample mean and standard error of ``Tr (X / sqrt n)^{2s}``.

    Batches draw from independent child seeds so the result depends only
    on ``(seed, trials, batch)``.  Rademacher entries stay integral until
    the final division, which keeps their traces exact.
    """
    if isinstance(law, str):
        if law not in NAMED_LAWS:
            raise ConfigError(f"unknown distribution {law!r}")
        law = NAMED_LAWS[law]()
    if trials < 2:
        raise ConfigError("need at least two trials for a standard error")
    n_batches = -(-trials // batch)
    children = np.random.SeedSequence(seed).spawn(n_batches)
    samples = []
    left = trials
    for child in children:
        size = min(batch, left)
        rng = np.random.default_rng(child)
        samples.append(trace_power(symmetric_batch(rng, law, n, size), s))
        left -= size
    x = np.concatenate(samples) / float(n) ** s
    mean = math.fsum(x.tolist()) / trials
    var = math.fsum(((x - mean) ** 2).tolist()) / (trials - 1)
    return MCResult(mean, math.sqrt(var / trials), trials)


def catalan_ratio(s: int, spec: MomentSpec) -> Fraction:
    """``E Tr A^{2s} / (n C(s))``."""
    return exact_moment(s, spec) / (spec.n * catalan(s))
