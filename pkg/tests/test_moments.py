import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

import oracles
from wignerwalks import moments as mo
from wignerwalks import walks
from wignerwalks.dyck import catalan
from wignerwalks.errors import BudgetExceeded, ConfigError, ValidationError
from wignerwalks.families import BREVE_W8
from wignerwalks.walks import Walk

RAD = (Fraction(1),) * 8
GAUSS = mo.gaussian().moments(8)
UNIF = mo.uniform().moments(8)
LAWS = {"rademacher": RAD, "gaussian": GAUSS, "uniform": UNIF}

# frozen from tests/oracles.py (pure-Python sums over index paths or classes)
FROZEN = [
    (2, 2, "rademacher", False, Fraction(3)),
    (3, 3, "gaussian", False, Fraction(215, 9)),
    (3, 4, "uniform", False, Fraction(5499, 280)),
    (4, 3, "gaussian", False, Fraction(2867, 27)),
    (2, 50, "rademacher", False, Fraction(99)),
    (4, 3, "rademacher", True, Fraction(86, 27)),
]


def spec(n, name="rademacher", zero_diagonal=False):
    return mo.MomentSpec(n, LAWS[name], zero_diagonal=zero_diagonal)


def test_law_moments():
    assert GAUSS[:4] == (1, 3, 15, 105)
    assert UNIF[:3] == (1, Fraction(9, 5), Fraction(27, 7))


@pytest.mark.parametrize("labels,expected", [((1, 2, 1), 1), ((1, 2, 1, 2, 1), Fraction(9, 5)), (BREVE_W8, 1)])
def test_weight_examples(labels, expected):
    assert mo.weight(Walk(labels), UNIF) == expected


def test_weight_missing_order():
    with pytest.raises(ValidationError):
        mo.weight(Walk((1, 2, 1, 2, 1)), (Fraction(1),))


def test_class_cardinality_examples():
    assert mo.class_cardinality(Walk((1, 2, 1)), 3) == 6
    assert mo.class_cardinality(Walk((1, 1, 1)), 5) == 5
    assert mo.class_cardinality(Walk((1, 2, 3, 1, 4, 5, 3, 1, 2, 1, 4, 1, 5, 1)), 4) == 0


@pytest.mark.parametrize("s,n,name,zd,expected", FROZEN)
def test_frozen_moments(s, n, name, zd, expected):
    assert mo.exact_moment(s, spec(n, name, zd)) == expected


@pytest.mark.parametrize("name", LAWS)
@pytest.mark.parametrize("s,n", [(1, 1), (1, 3), (2, 2), (2, 3), (3, 2), (3, 3)])
def test_exact_matches_python_index_sum(name, s, n):
    assert mo.exact_moment(s, spec(n, name)) == oracles.moment_by_index_paths(s, n, LAWS[name])


@pytest.mark.parametrize("name", LAWS)
@pytest.mark.parametrize("zd", [False, True])
def test_exact_matches_brute_force_kernel(name, zd):
    for s in range(0, 5):
        for n in range(1, 5):
            sp = spec(n, name, zd)
            assert mo.exact_moment(s, sp) == mo.brute_force_moment(s, sp)


def test_exact_moment_examples():
    for n in (1, 2, 7, 100):
        for name in LAWS:
            assert mo.exact_moment(1, spec(n, name)) == n
    for s in range(1, 6):
        assert mo.exact_moment(s, spec(1, "gaussian")) == GAUSS[s - 1]


def test_brute_force_budget():
    with pytest.raises(BudgetExceeded):
        mo.brute_force_moment(4, spec(20), cap=10**6)


def test_polynomial_examples():
    p = mo.moment_polynomial(1, RAD)
    assert p.degree == 2 and p(7) == 49 and p.leading == 1
    p3 = mo.moment_polynomial(3, GAUSS)
    assert p3.moment(4) == mo.brute_force_moment(3, spec(4, "gaussian"))


@pytest.mark.parametrize("name", LAWS)
@pytest.mark.parametrize("s", range(1, 6))
def test_polynomial_leading_coefficient(name, s):
    p = mo.moment_polynomial(s, LAWS[name])
    assert p.degree == s + 1 and p.leading == catalan(s)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(1, 10**6), st.sampled_from(sorted(LAWS)))
def test_polynomial_evaluation(s, n, name):
    assert mo.moment_polynomial(s, LAWS[name]).moment(n) == mo.exact_moment(s, spec(n, name))


@pytest.mark.parametrize("name", LAWS)
@pytest.mark.parametrize("s", range(2, 6))
def test_catalan_limit(name, s):
    devs = [abs(mo.catalan_ratio(s, spec(n, name)) - 1) for n in (10**2, 10**4, 10**6)]
    assert devs[0] > devs[1] > devs[2]
    # relative deviation is O(1/n): it shrinks by at least 10 per factor 100 in n
    assert devs[1] * 10 <= devs[0] and devs[2] * 10 <= devs[1]


def test_catalan_limit_s1_is_exact():
    for name in LAWS:
        assert all(mo.catalan_ratio(1, spec(n, name)) == 1 for n in (10**2, 10**4))


# ---------------------------------------------------------------- Z parts


def test_z_s1_all_in_first_part():
    for n in (1, 2, 3, 5):
        z = mo.z_decomposition(1, spec(n), C0=n, eps=Fraction(1, 8))
        assert z == (n, 0, 0, 0)


def test_z_c0_zero_sends_non_trees_to_last_part():
    s, n = 3, 4
    z = mo.z_decomposition(s, spec(n, "gaussian"), C0=0, eps=Fraction(1, 8))
    trees = sum(
        mo.class_cardinality(w, n) * mo.weight(w, GAUSS)
        for w in walks.iter_even_walks(s)
        if w.n_vertices == s + 1
    ) / Fraction(n) ** s
    assert z[0] == trees and z[1] == z[2] == 0
    assert z[3] == mo.exact_moment(s, spec(n, "gaussian")) - trees


@pytest.mark.parametrize("C0", [0, 1, 2 * math.e * 5.596455548326598**2])
@pytest.mark.parametrize("eps", [Fraction(1, 8), Fraction(1, 7)])
def test_z_partition_identity(C0, eps):
    for s in range(1, 5):
        for n in (2, 3, 4):
            sp = spec(n, "gaussian")
            assert sum(mo.z_decomposition(s, sp, C0, eps)) == mo.exact_moment(s, sp)


def test_z_class_matches_direct_rule():
    s, n, C0, eps = 4, 3, 2, Fraction(1, 8)
    from wignerwalks import classify as cl

    direct = [Fraction(0)] * 4
    for w in walks.iter_even_walks(s):
        sigma = s + 1 - w.n_vertices
        if sigma * n > C0 * s * s:
            part = 4
        elif max(w.final_multiplicity.values()) <= 2:
            part = 1
        elif cl.max_exit_degree(w) <= s ** (0.5 - float(eps)):
            part = 2
        else:
            part = 3
        direct[part - 1] += mo.class_cardinality(w, n) * mo.weight(w, GAUSS)
    z = mo.z_decomposition(s, spec(n, "gaussian"), C0, eps)
    assert list(z) == [d / Fraction(n) ** s for d in direct]


# ------------------------------------------------------------ truncation


def test_truncate_rademacher_unchanged():
    base = mo.spec_for("rademacher", 5)
    t = mo.truncate_spec(base, 10**6, Fraction(1, 25))
    assert t.V == base.V


def test_truncate_uniform_examples():
    law = mo.uniform(4)  # uniform on [-2, 2]
    base = mo.MomentSpec(1, law.moments(6), law=law, unit_variance=False)
    assert mo.truncate_spec(base, 2**25, Fraction(1, 25)).V == base.V  # U_n = 2
    low = mo.truncate_spec(base, 1, Fraction(1, 25), count=6)  # U_n = 1
    assert low.V[0] == Fraction(1, 6)
    assert low.V[1] == Fraction(1, 10)


@pytest.mark.parametrize("U", [0.5, 1.0, 2.5])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_truncated_gaussian_against_quadrature(U, m):
    law = mo.truncated_gaussian(U)
    val, err = integrate.quad(lambda x: x ** (2 * m) * math.exp(-x * x / 2) / math.sqrt(2 * math.pi), -U, U)
    assert float(law.moment(m)) == pytest.approx(val, rel=1e-12, abs=1e-14)


def test_truncate_needs_law():
    with pytest.raises(ConfigError, match="insufficient moment data"):
        mo.truncate_spec(mo.MomentSpec(3, GAUSS), 3, 0.5)


@pytest.mark.parametrize("V", [(2,), (1, -1), ()])
def test_bad_specs_rejected(V):
    with pytest.raises(ConfigError):
        mo.MomentSpec(3, V)


def test_spec_bound_consistency():
    with pytest.raises(ConfigError):
        mo.MomentSpec(3, GAUSS, U=2)


# --------------------------------------------------------------- Lemma 6.1


def test_lemma_6_1_examples():
    V6 = mo.uniform().moments(6)
    q, rhs = mo.lemma_6_1_sides(Walk((1, 2, 3, 2, 1)), V6, 2)
    assert q == rhs == 1
    q, rhs = mo.lemma_6_1_sides(Walk((1, 2, 1, 2, 1)), V6, 2)
    assert q == V6[1] and rhs == V6[5]
    with pytest.raises(ValidationError):
        mo.check_lemma_6_1(Walk((1, 2, 1)), V6, 1)


# -------------------------------------------------------------- Monte Carlo


def test_mc_s1_rademacher_is_exact():
    r = mo.mc_moment(1, 17, "rademacher", trials=50, seed=1)
    assert r.estimate == 17 and r.stderr == 0


def test_mc_deterministic():
    a = mo.mc_moment(3, 12, "gaussian", trials=300, seed=9)
    b = mo.mc_moment(3, 12, "gaussian", trials=300, seed=9)
    assert a == b


@pytest.mark.parametrize("law", ["rademacher", "gaussian", "uniform"])
def test_mc_agrees_with_exact(law):
    s, n = 3, 10
    r = mo.mc_moment(s, n, law, trials=4000, seed=5)
    exact = mo.exact_moment(s, mo.MomentSpec(n, mo.NAMED_LAWS[law]().moments(3)))
    assert abs(r.estimate - float(exact)) <= 4 * r.stderr


def test_mc_truncated_gaussian_agrees():
    law = mo.truncated_gaussian(1.5)
    V = law.moments(3)
    s, n = 2, 8
    exact = mo.exact_moment(s, mo.MomentSpec(n, V, unit_variance=False))
    r = mo.mc_moment(s, n, law, trials=4000, seed=11)
    assert abs(r.estimate - float(exact)) <= 4 * r.stderr


def test_mc_rejects_unknown_law():
    with pytest.raises(ConfigError):
        mo.mc_moment(1, 2, "cauchy", trials=10, seed=0)
