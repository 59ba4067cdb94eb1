import itertools
import random

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from abctables.core import OpKind, SchemeKind
from abctables.embeddings import (
    CandidateEmbedding,
    SearchGuardError,
    candidate_count,
    candidate_from_codebook,
    candidate_roles,
    compatible,
    consistent_roles,
    embeddings_in,
    enumerate_candidates,
    max_clique,
    max_compatible_set,
    overlap,
    partial_table,
    search_overlapping_pairs,
)
from abctables.forge import (
    REFERENCE_DUAL_VARIANT,
    FillKind,
    FillPolicy,
    build_codebook,
    build_tables,
    dual_codebook,
)
from abctables.core import TableSet, ALL_OPS


@pytest.mark.parametrize("n, size, count", [(2, 6, 720), (2, 7, 5040), (3, 9, 362880)])
def test_candidate_counts(n, size, count):
    assert candidate_count(n, size) == (count, 1)
    total, mult = candidate_count(n, size, pin_first=True)
    assert total * mult == count


def test_enumeration_order_and_pinning():
    cands = enumerate_candidates(2, 6)
    assert len(cands) == 720
    assert [c.roles for c in cands] == sorted(c.roles for c in cands)
    pinned = candidate_roles(2, 7, pin_first=True)
    assert len(pinned) == 720 and (pinned[:, 0] == 0).all()
    assert len(enumerate_candidates(3, 9, limit=5)) == 5


def test_guard():
    with pytest.raises(SearchGuardError):
        candidate_roles(4, 12)
    with pytest.raises(SearchGuardError):
        candidate_roles(6, 30)


def test_candidate_cells_match_codebook(ref_cb):
    e = candidate_from_codebook(ref_cb)
    assert e.roles == (1, 2, 3, 4, 5, 6)
    assert len(e.cells) == 24
    assert e.cells[OpKind.ADD, 1, 3] == 5 and e.cells[OpKind.MUL, 5, 2] == 3
    assert e.codebook.maps == ref_cb.maps


def test_dual_pair_disjoint(ref_cb):
    e1 = candidate_from_codebook(ref_cb)
    e2 = candidate_from_codebook(dual_codebook(ref_cb, REFERENCE_DUAL_VARIANT))
    res = overlap(e1, e2)
    assert not res.overlapping and res.shared_cells == []
    assert compatible(e1, e2) == (True, None)
    same = overlap(e1, e1)
    assert same.overlapping and len(same.shared_cells) == 24


def test_rotations_are_one_embedding(ref_cb):
    e = candidate_from_codebook(ref_cb)
    rots = e.rotations()
    assert len({r.roles for r in rots}) == 3
    assert all(r.table_key() == e.table_key() for r in rots)
    assert all(r.canonical() == e for r in rots)


def test_conflict_has_witness():
    a = CandidateEmbedding((0, 1, 2, 3, 4, 5), 2, 6)
    b = CandidateEmbedding((0, 1, 2, 3, 5, 4), 2, 6)
    ok, w = compatible(a, b)
    assert not ok and w.first != w.second
    assert a.cells[w.op, w.c1, w.c2] == w.first and b.cells[w.op, w.c1, w.c2] == w.second
    ok2, w2 = compatible(b, a)
    assert not ok2 and (w2.first, w2.second) == (w.second, w.first)


@given(st.permutations(range(7)), st.permutations(range(7)))
@settings(max_examples=60)
def test_compatibility_symmetric(p, q):
    a = CandidateEmbedding(tuple(p[:6]), 2, 7)
    b = CandidateEmbedding(tuple(q[:6]), 2, 7)
    assert compatible(a, b)[0] == compatible(b, a)[0]
    assert overlap(a, b).overlapping == overlap(b, a).overlapping


def test_embeddings_in_dual_tables(ref_dual):
    ts, cb, sec = ref_dual
    found = embeddings_in(ts, 2)
    assert [e.roles for e in found] == [(1, 2, 3, 4, 5, 6), (2, 1, 5, 6, 4, 3)]
    assert len(embeddings_in(ts, 2, dedupe=False)) == 6


def test_embeddings_in_agrees_with_brute_force(ref_dual):
    ts, _, _ = ref_dual
    brute = []
    for e in enumerate_candidates(2, 6, origin=1):
        if all(ts.lookup(op, c1, c2) == v for (op, c1, c2), v in e.cells.items()):
            brute.append(e.roles)
    assert sorted(brute) == sorted(e.roles for e in embeddings_in(ts, 2, dedupe=False))


@pytest.mark.parametrize("seed", range(10))
def test_single_safe_fill_has_one_embedding(seed):
    cb = build_codebook(2, 0, SchemeKind.ABC, seed=seed)
    ts = build_tables(cb, FillPolicy(FillKind.SAFE_RANDOM, seed))
    found = embeddings_in(ts, 2)
    assert len(found) == 1
    assert found[0] == candidate_from_codebook(cb).canonical()


def test_all_zero_table_has_none():
    ts = TableSet(6, {op: np.zeros((6, 6), dtype=np.int64) for op in ALL_OPS})
    assert embeddings_in(ts, 2) == []


@pytest.mark.parametrize("n, size", [(2, 6), (2, 7)])
def test_propagation_matches_vectorised_scan(n, size):
    e0 = tuple(range(3 * n))
    fast = consistent_roles(partial_table(e0, n, size), n)
    ref = CandidateEmbedding(e0, n, size)
    slow = [c.roles for c in enumerate_candidates(n, size) if compatible(ref, c)[0]]
    assert fast == slow


def test_pairs_exhaustive_six():
    r = search_overlapping_pairs(2, 6, method="exhaustive")
    assert r.pairs == 720 * 719 // 2
    assert r.overlapping_compatible_pairs == 0 and r.answer == "NONE" and r.hits == []
    assert r.same_embedding_pairs == 720  # 240 codings, three rotations each


@pytest.mark.parametrize("size", [6, 7])
def test_orbit_matches_exhaustive(size):
    ex = search_overlapping_pairs(2, size, method="exhaustive")
    orb = search_overlapping_pairs(2, size, method="orbit")
    for field in ("candidates", "pairs", "compatible_pairs", "same_embedding_pairs", "overlapping_compatible_pairs"):
        assert getattr(ex, field) == getattr(orb, field)


def test_pair_hits_are_real():
    r = search_overlapping_pairs(2, 7, method="exhaustive", max_hits=20)
    assert r.hits_truncated and len(r.hits) == 20
    assert r.hits == sorted(r.hits)
    for a, b in r.hits:
        ea, eb = CandidateEmbedding(a, 2, 7), CandidateEmbedding(b, 2, 7)
        assert compatible(ea, eb)[0] and overlap(ea, eb).overlapping
        assert ea.table_key() != eb.table_key()


def test_workers_do_not_change_reports():
    a = search_overlapping_pairs(2, 7, method="exhaustive", workers=1)
    b = search_overlapping_pairs(2, 7, method="exhaustive", workers=4)
    assert a.to_dict() == b.to_dict()


def _nx_clique_size(adj):
    g = nx.Graph()
    g.add_nodes_from(range(len(adj)))
    for i, bits in enumerate(adj):
        for j in range(len(adj)):
            if bits >> j & 1:
                g.add_edge(i, j)
    return max(len(c) for c in nx.find_cliques(g))


@pytest.mark.parametrize("seed", range(15))
def test_max_clique_against_networkx(seed):
    rng = random.Random(seed)
    nv = rng.randint(1, 40)
    p = rng.choice([0.1, 0.3, 0.6, 0.9])
    adj = [0] * nv
    for i, j in itertools.combinations(range(nv), 2):
        if rng.random() < p:
            adj[i] |= 1 << j
            adj[j] |= 1 << i
    clique, exact = max_clique(adj)
    assert exact and len(clique) == _nx_clique_size(adj)
    assert all(adj[a] >> b & 1 for a, b in itertools.combinations(clique, 2))


def test_max_set_six():
    r = max_compatible_set(2, 6)
    assert r.status == "EXACT" and r.max_size == 2
    assert r.overlapping_pairs_in_witness == []
    assert r.partner_embeddings == 8  # the dual variants of the first candidate


def test_max_set_restricted_to_reference_pair(ref_cb):
    sec = dual_codebook(ref_cb, REFERENCE_DUAL_VARIANT)
    r = max_compatible_set(2, 6, candidates=[candidate_from_codebook(ref_cb), candidate_from_codebook(sec)])
    assert r.max_size == 2 and r.method == "restricted"
    assert r.witness == [(1, 2, 3, 4, 5, 6), (2, 1, 5, 6, 4, 3)]


def test_max_set_witness_is_jointly_satisfiable():
    r = max_compatible_set(2, 7)
    emb = [CandidateEmbedding(w, 2, 7) for w in r.witness]
    merged = {}
    for e in emb:
        for k, v in e.cells.items():
            assert merged.setdefault(k, v) == v
    assert len({e.table_key() for e in emb}) == len(emb)


def test_restricted_matches_orbit_on_small_space():
    cands = enumerate_candidates(2, 6)
    assert max_compatible_set(2, 6, candidates=cands).max_size == max_compatible_set(2, 6).max_size


def test_budget_marks_partial():
    # the n=4 partner enumeration takes seconds; a tiny budget falls back to the dual variants
    r = max_compatible_set(4, 12, time_budget=0.1)
    assert r.status == "PARTIAL"
    assert r.max_size >= 2
