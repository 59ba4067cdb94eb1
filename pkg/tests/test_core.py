import numpy as np
import pytest
from hypothesis import given, strategies as st

from abctables.core import (
    ALL_OPS,
    AbcType,
    Codebook,
    CodebookError,
    OpKind,
    SchemeKind,
    TableError,
    TableSet,
    constrained_cells,
    plain_op,
    result_type,
    typed_pairs,
)
from abctables.forge import Layout, build_codebook

A, B, C, X = AbcType.A, AbcType.B, AbcType.C, AbcType.X


def test_abc_rule_is_cyclic():
    assert result_type(SchemeKind.ABC, A, B) is C
    assert result_type(SchemeKind.ABC, B, C) is A
    assert result_type(SchemeKind.ABC, C, A) is B
    for t1, t2 in [(B, A), (A, A), (C, C), (A, C), (C, B), (B, B)]:
        assert result_type(SchemeKind.ABC, t1, t2) is None


def test_ab_rule_and_plain():
    assert result_type(SchemeKind.AB, A, B) is A
    assert result_type(SchemeKind.AB, B, A) is B
    assert result_type(SchemeKind.AB, A, A) is None
    assert result_type(SchemeKind.PLAIN, A, A) is A
    assert len(typed_pairs(SchemeKind.ABC)) == 3


@pytest.mark.parametrize("scheme", list(SchemeKind))
def test_padding_never_types(scheme):
    for t in (A, B, C, X):
        assert result_type(scheme, X, t) is None
        assert result_type(scheme, t, X) is None


def test_division_only_by_units():
    assert plain_op(OpKind.DIV, 3, 2, 4) is None
    assert plain_op(OpKind.DIV, 3, 3, 4) == 1
    assert plain_op(OpKind.DIV, 1, 3, 16) * 3 % 16 == 1
    assert plain_op(OpKind.SUB, 0, 1, 2) == 1


def test_reference_codebook_round_trip(ref_cb):
    assert ref_cb.encrypt(0, A) == 1 and ref_cb.encrypt(1, C) == 6
    assert ref_cb.decrypt(4) == (1, B)
    with pytest.raises(CodebookError):
        ref_cb.encrypt(0, X)
    with pytest.raises(CodebookError):
        ref_cb.decrypt(0)


def test_padding_decrypts_to_x():
    cb = build_codebook(2, 2, SchemeKind.ABC, layout=Layout.EXPLICIT)
    assert [cb.decrypt(v) for v in cb.padding_values()] == [X, X]


def test_codebook_rejects_overlap_and_range():
    with pytest.raises(CodebookError):
        Codebook(2, 0, SchemeKind.ABC, {A: (0, 1), B: (1, 2), C: (4, 5)})
    with pytest.raises(CodebookError):
        Codebook(2, 0, SchemeKind.ABC, {A: (0, 1), B: (2, 3), C: (4, 6)})
    with pytest.raises(CodebookError):
        Codebook(2, 0, SchemeKind.ABC, {A: (0, 1), B: (2, 3)})


@given(
    n=st.integers(2, 9),
    m=st.integers(0, 5),
    scheme=st.sampled_from(list(SchemeKind)),
    seed=st.integers(0, 2**32),
)
def test_encrypt_decrypt_inverse(n, m, scheme, seed):
    cb = build_codebook(n, m, scheme, seed=seed)
    assert cb.size == len(scheme.classes) * n + m
    for t in cb.classes:
        for x in range(n):
            assert cb.decrypt(cb.encrypt(x, t)) == (x, t)
    assert len(cb.padding_values()) == m
    assert sorted(cb.coded_values() + cb.padding_values()) == list(range(cb.origin, cb.origin + cb.size))


def test_constrained_cells_count(ref_cb):
    rows, cols, vals = constrained_cells(ref_cb, OpKind.ADD)
    assert len(rows) == 12
    rows, _, _ = constrained_cells(ref_cb, OpKind.DIV)
    # only divisor 1 is a unit mod 2
    assert len(rows) == 6


def test_tableset_validates_and_freezes():
    good = {op: np.zeros((3, 3), dtype=np.int64) for op in ALL_OPS}
    ts = TableSet(3, good)
    with pytest.raises(ValueError):
        ts.tables[OpKind.ADD][0, 0] = 1
    with pytest.raises(TableError):
        TableSet(3, {**good, OpKind.MUL: np.full((3, 3), 3)})
    with pytest.raises(TableError):
        TableSet(3, {OpKind.ADD: good[OpKind.ADD]})
    with pytest.raises(TableError):
        ts.lookup(OpKind.ADD, 0, 3)
    assert ts.with_cell(OpKind.ADD, 0, 0, 2).lookup(OpKind.ADD, 0, 0) == 2
    assert ts.lookup(OpKind.ADD, 0, 0) == 0
