from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from wignerwalks import classify as cl
from wignerwalks import walks
from wignerwalks.errors import ValidationError
from wignerwalks.families import BREVE_W8, I_TYPE_PATTERN, THREE_SELF_INTERSECTIONS, TILDE_W8
from wignerwalks.walks import Walk


def open_oracle(labels, t):
    """Some edge at w(t) has odd multiplicity after t - 1 steps."""
    beta = labels[t]
    counts = oracles.edge_counts(labels[:t])
    return any(c % 2 for e, c in counts.items() if beta in e)


def test_kappa_examples():
    assert cl.kappa(Walk((1, 2, 1)), 2) == 1
    assert cl.kappa(Walk((1, 2, 3, 1, 2, 3, 1)), 1) == 2
    assert cl.kappa(Walk(BREVE_W8), 2) == 2
    with pytest.raises(ValidationError):
        cl.kappa(Walk((1, 2, 1)), 5)


@pytest.mark.parametrize("s", range(1, 6))
def test_kappa_matches_oracle(s):
    for w in walks.iter_even_walks(s):
        assert cl.kappa_map(w) == dict(oracles.kappa(w.labels))


def test_nu_examples():
    p = cl.nu_vector(Walk((1, 2, 1)))
    assert p.nu[0] == 2 and sum(p.nu[1:]) == 0 and p.nu1_norm == 0
    for labels in (TILDE_W8, BREVE_W8):
        classes = cl.vertex_classes(Walk(labels))
        # the root sits in N_1 through its hidden arrival alone
        assert classes == {1: (1, 3, 4), 2: (2,)}
    assert cl.instant_partition(Walk(TILDE_W8)) == cl.instant_partition(Walk(BREVE_W8))


@pytest.mark.parametrize("s", range(1, 7))
def test_profile_invariants(s):
    for w in walks.iter_even_walks(s):
        p = cl.profile(w)
        assert sum(k * c for k, c in enumerate(p.nu, 1)) == s + 1
        assert w.n_vertices == s + 1 - p.nu1_norm
        assert p.nu1_norm == sum((k - 1) * c for k, c in enumerate(p.nu, 1))
        assert p.nu2_norm == sum((k - 2) * c for k, c in enumerate(p.nu, 1) if k >= 2)
        assert min(p.kappa.values()) >= 1


def test_open_arrival_examples():
    w = Walk((1, 2, 1, 2, 1))
    assert cl.is_open_arrival(w, 3) == (False, None)
    with pytest.raises(ValidationError):
        cl.is_open_arrival(w, 2)


@pytest.mark.parametrize("s", range(1, 5))
def test_openness_census(s):
    for w in walks.iter_even_walks(s):
        seen = set()
        for t in range(1, w.n_steps + 1):
            if not w.marks[t]:
                continue
            is_open, kind = cl.is_open_arrival(w, t)
            assert is_open == open_oracle(w.labels, t)
            assert (kind is None) == (not is_open)
            if w.labels[t] not in seen and w.labels[t] != w.root:
                assert not is_open  # fresh vertex
            seen.add(w.labels[t])


@pytest.mark.parametrize("s", range(1, 5))
def test_first_edge_rule_is_stricter(s):
    for w in walks.iter_even_walks(s):
        for t in range(1, w.n_steps + 1):
            if w.marks[t] and cl.is_open_arrival(w, t, "R")[0]:
                assert cl.is_open_arrival(w, t)[0]


def test_three_self_intersections_fixture():
    w = Walk(THREE_SELF_INTERSECTIONS)
    opens = {a.t: (a.vertex, a.kind) for a in cl.profile(w).open_arrivals}
    assert opens == {4: (2, "both"), 8: (3, "S")}
    assert cl.is_open_arrival(w, 15) == (False, None)
    assert cl.is_open_arrival(w, 8, "R") == (False, None)


def test_exit_examples():
    w = Walk((1, 2, 1))
    assert cl.exit_degree(w, 1) == 1 and cl.exit_degree(w, 2) == 0
    assert cl.max_exit_degree(w) == 1
    tw = Walk(TILDE_W8)
    assert {v: cl.exit_degree(tw, v) for v in tw.vertices} == {1: 1, 2: 1, 3: 1, 4: 1}
    assert [(e.tail, e.head) for e in cl.exit_cluster(Walk(BREVE_W8), 2)] == [(2, 3)]


def test_simple_types():
    assert cl.classify_simple(Walk((1, 2, 1, 2, 1)), 2) == "I"
    assert cl.simple_types(Walk(I_TYPE_PATTERN)) == {3: "I"}
    assert cl.classify_simple(Walk(BREVE_W8), 2) == "other"
    with pytest.raises(ValidationError):
        cl.classify_simple(Walk((1, 2, 1)), 2)


@pytest.mark.parametrize("s", range(2, 5))
def test_simple_type_census(s):
    tally: Counter = Counter()
    for w in walks.iter_even_walks(s):
        for v, kind in cl.simple_types(w).items():
            assert cl.kappa(w, v) == 2 and v != w.root
            tally[kind] += 1
    assert tally["I"] > 0 and tally["other"] > 0


def test_open_edge_count_examples():
    w = Walk((1, 2, 1))
    assert cl.count_open_marked_edges(w, 2, 1) == 1
    for ws in (walks.enumerate_even_walks(3),):
        for w in ws:
            for v in w.vertices:
                assert cl.count_open_marked_edges(w, v, w.n_steps) == 0


@pytest.mark.parametrize("s", range(1, 6))
def test_lemma_3_1_census(s):
    for w in walks.iter_even_walks(s):
        k = cl.kappa_map(w)
        for v in w.vertices:
            arrivals = k[v] - (1 if v == w.root else 0)
            assert cl.non_marked_exits(w, v) == arrivals
            for t in range(w.n_steps + 1):
                assert cl.count_open_marked_edges(w, v, t) <= 2 * k[v]


def test_profile_json_shape():
    j = cl.profile(Walk(THREE_SELF_INTERSECTIONS)).to_json()
    assert set(j) == {"kappa", "nu", "open_arrivals", "delta"}


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_profile_of_random_walk(data):
    s = data.draw(st.integers(1, 5))
    ws = walks.enumerate_even_walks(s)
    w = ws[data.draw(st.integers(0, len(ws) - 1))]
    p = cl.profile(w)
    assert p.max_exit_degree == max(cl.exit_degree(w, v) for v in w.vertices)
    assert p.r == sum(1 for a in p.open_arrivals if p.kappa[a.vertex] == 2)
    assert p.r_E + p.r_S >= p.r
