import json

import pytest

from wignerwalks import classify as cl
from wignerwalks import dyck, families, io, walks
from wignerwalks import reduction as rd
from wignerwalks.errors import ValidationError
from wignerwalks.families import HUB, w0, w2

W0_Q3 = (1, 2, 3, 1, 2, 4, 3, 2, 5, 4, 2, 6, 5, 2, 6, 5, 4, 3, 1)


def test_w0_q3_cells():
    w = w0(3)
    assert w.labels == W0_Q3
    rep = rd.cells(w)
    assert rep.bts == (3, 6, 9, 12)
    assert rep.imported[HUB] == (4, 7, 10, 13)
    assert rep.primary[HUB] == (1,)


@pytest.mark.parametrize("Q", [1, 2, 3, 5, 10])
def test_w2_family(Q):
    w = w2(Q)
    assert w.s == 5 * Q + 3
    assert walks.is_even(w)
    assert cl.kappa(w, HUB) == 1
    assert cl.exit_degree(w, HUB) == 4 * Q + 1
    assert rd.cells(w).J(HUB) == Q + 1
    tree = dyck.tree_of(walks.dyck_of(w))
    assert tree.max_exit_degree() == (4 if Q == 1 else 5)
    assert not dyck.has_L_property(walks.dyck_of(w), 6)


def test_w2_q3_pattern():
    # the pendant family at three imported returns
    assert w2(3).s == 18 and cl.exit_degree(w2(3), HUB) == 13


def test_bad_family_index():
    with pytest.raises(ValueError):
        w0(0)


def test_fixture_corpus_matches_generators():
    stored = io.fixture_walks()
    assert stored == families.named_walks()


def test_fixture_corpus_is_versioned():
    with pytest.raises(FileNotFoundError):
        io.fixture_walks("v0")


def test_corrupt_fixture_rejected(tmp_path):
    path = tmp_path / "walks.jsonl"
    lines = [json.dumps({"name": "ok", "s": 1, "labels": [1, 2, 1]}), json.dumps({"name": "odd", "s": 2, "labels": [1, 2, 3, 1, 1]})]
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ValidationError):
        io.read_walks(path)
