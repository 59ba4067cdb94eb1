"""Exhaustive search over ABC embeddings sharing one set of tables.

A candidate embedding assigns cipher values to the 3n roles
A0..A(n-1), B0.., C0.. and thereby forces a partial table (its constrained
cells).  Two candidates are *compatible* when no cell is forced to two
different values, and *overlap* when their constrained-cell index sets
intersect.  Candidates that force identical partial tables (the three cyclic
rotations A->B->C->A of one coding) count as the same embedding.

Relabelling the cipherspace maps candidates to candidates and preserves
compatibility and overlap, and it acts transitively on candidates.  The
"orbit" searches therefore fix the lexicographically first candidate and
look only at its partners; pair counts are recovered as
``candidates * partners / 2``.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .core import AbcType, Codebook, OpKind, SchemeKind, plain_op_table, typed_pairs

DEFAULT_OPS = (OpKind.ADD, OpKind.MUL)
COUNT_GUARD = 10**9
MATERIALIZE_GUARD = 2 * 10**6
EXHAUSTIVE_PAIR_LIMIT = 6000
_TYPES = (AbcType.A, AbcType.B, AbcType.C)


class SearchGuardError(RuntimeError):
    pass


def _ops(ops: Iterable[OpKind] | None) -> tuple[OpKind, ...]:
    return tuple(DEFAULT_OPS if ops is None else ops)


@dataclass(frozen=True)
class Templates:
    """Role-level description of the constrained cells for modulus n."""

    n: int
    ops: tuple[OpKind, ...]
    left: np.ndarray
    right: np.ndarray
    result: np.ndarray
    op_index: np.ndarray

    @classmethod
    def build(cls, n: int, ops: Sequence[OpKind]) -> Templates:
        a, b, r, o = [], [], [], []
        for oi, op in enumerate(ops):
            tab = plain_op_table(op, n)
            for t1, t2, rt in typed_pairs(SchemeKind.ABC):
                for x in range(n):
                    for y in range(n):
                        if tab[x, y] >= 0:
                            a.append(_TYPES.index(t1) * n + x)
                            b.append(_TYPES.index(t2) * n + y)
                            r.append(_TYPES.index(rt) * n + int(tab[x, y]))
                            o.append(oi)
        arrs = [np.array(v, dtype=np.int64) for v in (a, b, r, o)]
        return cls(n, tuple(ops), *arrs)

    def positions(self, roles: np.ndarray, size: int) -> tuple[np.ndarray, np.ndarray]:
        """Flat cell positions and forced values (cipher offsets) per candidate row."""
        roles = np.atleast_2d(roles)
        pos = self.op_index * size * size + roles[:, self.left] * size + roles[:, self.right]
        return pos, roles[:, self.result]


_TEMPLATE_CACHE: dict[tuple[int, tuple[OpKind, ...]], Templates] = {}


def templates(n: int, ops: Sequence[OpKind] | None = None) -> Templates:
    key = (n, _ops(ops))
    if key not in _TEMPLATE_CACHE:
        _TEMPLATE_CACHE[key] = Templates.build(n, key[1])
    return _TEMPLATE_CACHE[key]


@dataclass(frozen=True)
class CandidateEmbedding:
    """Cipher values for roles A0..A(n-1), B0..B(n-1), C0..C(n-1)."""

    roles: tuple[int, ...]
    modulus: int
    size: int
    origin: int = 0
    ops: tuple[OpKind, ...] = DEFAULT_OPS

    def __post_init__(self) -> None:
        if len(self.roles) != 3 * self.modulus or len(set(self.roles)) != len(self.roles):
            raise ValueError("roles must be 3n distinct cipher values")
        if any(not self.origin <= v < self.origin + self.size for v in self.roles):
            raise ValueError("role value outside cipherspace")

    @property
    def codebook(self) -> Codebook:
        n = self.modulus
        maps = {t: self.roles[i * n:(i + 1) * n] for i, t in enumerate(_TYPES)}
        return Codebook(n, self.size - 3 * n, SchemeKind.ABC, maps, origin=self.origin)

    @cached_property
    def cells(self) -> dict[tuple[OpKind, int, int], int]:
        tpl = templates(self.modulus, self.ops)
        roles = np.array(self.roles)
        out = {}
        for a, b, r, oi in zip(tpl.left, tpl.right, tpl.result, tpl.op_index):
            out[self.ops[oi], int(roles[a]), int(roles[b])] = int(roles[r])
        return out

    def table_key(self) -> tuple:
        return tuple(sorted((op.value, c1, c2, v) for (op, c1, c2), v in self.cells.items()))

    def rotations(self) -> list[CandidateEmbedding]:
        n = self.modulus
        blocks = [self.roles[i * n:(i + 1) * n] for i in range(3)]
        out = []
        for k in range(3):
            rolled = blocks[k:] + blocks[:k]
            out.append(CandidateEmbedding(sum(rolled, ()), n, self.size, self.origin, self.ops))
        return out

    def canonical(self) -> CandidateEmbedding:
        """The lexicographically least rotation (same partial table)."""
        return min(self.rotations(), key=lambda e: e.roles)


def candidate_from_codebook(cb: Codebook, ops: Sequence[OpKind] | None = None) -> CandidateEmbedding:
    if cb.scheme is not SchemeKind.ABC:
        raise ValueError("embeddings are ABC codings")
    roles = sum((cb.maps[t] for t in _TYPES), ())
    return CandidateEmbedding(roles, cb.modulus, cb.size, cb.origin, _ops(ops))


def candidate_count(n: int, size: int, pin_first: bool = False) -> tuple[int, int]:
    """(number of candidates enumerated, multiplier recovering the full count)."""
    total = math.perm(size, 3 * n)
    if pin_first:
        return total // size, size
    return total, 1


def candidate_roles(n: int, size: int, limit: int | None = None, pin_first: bool = False) -> np.ndarray:
    """Role vectors as cipher offsets, lexicographic; optionally with A0 pinned to 0."""
    count, _ = candidate_count(n, size, pin_first)
    if count > COUNT_GUARD and limit is None:
        raise SearchGuardError(f"{count} candidates exceed the guard {COUNT_GUARD}; pass a limit")
    if count > MATERIALIZE_GUARD and limit is None:
        raise SearchGuardError(f"{count} candidates are too many to materialize; pass a limit")
    k = 3 * n
    if pin_first:
        it = ((0,) + rest for rest in itertools.permutations(range(1, size), k - 1))
    else:
        it = itertools.permutations(range(size), k)
    if limit is not None:
        it = itertools.islice(it, limit)
    flat = np.fromiter(itertools.chain.from_iterable(it), dtype=np.int64)
    return flat.reshape(-1, k)


def enumerate_candidates(
    n: int,
    size: int,
    limit: int | None = None,
    pin_first: bool = False,
    origin: int = 0,
    ops: Sequence[OpKind] | None = None,
) -> list[CandidateEmbedding]:
    """All injective role assignments in lexicographic order of role vectors."""
    if size < 3 * n:
        raise ValueError("cipherspace too small for three coding classes")
    roles = candidate_roles(n, size, limit, pin_first) + origin
    ops = _ops(ops)
    return [CandidateEmbedding(tuple(r), n, size, origin, ops) for r in roles.tolist()]


# -- pairwise relations ------------------------------------------------------


@dataclass(frozen=True)
class Conflict:
    op: OpKind
    c1: int
    c2: int
    first: int
    second: int


def compatible(e1: CandidateEmbedding, e2: CandidateEmbedding) -> tuple[bool, Conflict | None]:
    """Jointly satisfiable in one table; otherwise the first conflicting cell."""
    cells2 = e2.cells
    for key in sorted(e1.cells, key=lambda k: (k[0].value, k[1], k[2])):
        v2 = cells2.get(key)
        if v2 is not None and v2 != e1.cells[key]:
            return False, Conflict(key[0], key[1], key[2], e1.cells[key], v2)
    return True, None


@dataclass
class OverlapResult:
    overlapping: bool
    shared_cells: list[tuple[OpKind, int, int]]


def overlap(e1: CandidateEmbedding, e2: CandidateEmbedding) -> OverlapResult:
    if e1.size != e2.size:
        raise ValueError("candidates live in different cipherspaces")
    shared = sorted(set(e1.cells) & set(e2.cells), key=lambda k: (k[0].value, k[1], k[2]))
    return OverlapResult(bool(shared), shared)


# -- constraint propagation --------------------------------------------------


class BudgetExceeded(RuntimeError):
    pass


def consistent_roles(
    reference: np.ndarray,
    n: int,
    ops: Sequence[OpKind] | None = None,
    deadline: float | None = None,
) -> list[tuple[int, ...]]:
    """All role vectors (offsets) whose forced cells agree with ``reference``.

    ``reference`` has shape (len(ops), S, S) and holds -1 for cells it leaves
    free.  Roles are assigned A0, B0, C0, A1, ... and every cell whose two
    operands are known either forces its result role or is unconstrained.
    """
    tpl = templates(n, ops)
    a, b, r, o = (v.tolist() for v in (tpl.left, tpl.right, tpl.result, tpl.op_index))
    size = reference.shape[1]
    ref = reference.tolist()
    k_roles = 3 * n
    touching: list[list[int]] = [[] for _ in range(k_roles)]
    for k in range(len(a)):
        touching[a[k]].append(k)
        if b[k] != a[k]:
            touching[b[k]].append(k)
    order = [t * n + x for x in range(n) for t in range(3)]
    val = [-1] * k_roles
    used = [False] * size
    out: list[tuple[int, ...]] = []
    steps = 0

    def assign(role: int, v: int, trail: list[int]) -> bool:
        stack = [(role, v)]
        while stack:
            ro, vv = stack.pop()
            if val[ro] != -1:
                if val[ro] != vv:
                    return False
                continue
            if used[vv]:
                return False
            val[ro] = vv
            used[vv] = True
            trail.append(ro)
            for k in touching[ro]:
                va, vb = val[a[k]], val[b[k]]
                if va < 0 or vb < 0:
                    continue
                forced = ref[o[k]][va][vb]
                if forced >= 0:
                    stack.append((r[k], forced))
        return True

    def undo(trail: list[int]) -> None:
        for ro in trail:
            used[val[ro]] = False
            val[ro] = -1

    def dfs(i: int) -> None:
        nonlocal steps
        steps += 1
        if deadline is not None and steps % 4096 == 0 and time.monotonic() > deadline:
            raise BudgetExceeded
        while i < k_roles and val[order[i]] != -1:
            i += 1
        if i == k_roles:
            out.append(tuple(val))
            return
        role = order[i]
        for v in range(size):
            if used[v]:
                continue
            trail: list[int] = []
            if assign(role, v, trail):
                dfs(i + 1)
            undo(trail)

    dfs(0)
    out.sort()
    return out


def partial_table(roles: Sequence[int], n: int, size: int, ops: Sequence[OpKind] | None = None) -> np.ndarray:
    tpl = templates(n, ops)
    ref = np.full(len(tpl.ops) * size * size, -1, dtype=np.int64)
    pos, vals = tpl.positions(np.asarray(roles), size)
    ref[pos[0]] = vals[0]
    return ref.reshape(len(tpl.ops), size, size)


def embeddings_in(ts, n: int, ops: Sequence[OpKind] | None = None, dedupe: bool = True) -> list[CandidateEmbedding]:
    """Every ABC coding of modulus n whose constrained cells all agree with ``ts``.

    With ``dedupe`` the rotations of one coding are reported once, by their
    lexicographically least role vector.
    """
    ops = _ops(ops)
    reference = np.stack([np.asarray(ts.tables[op]) - ts.origin for op in ops])
    found = consistent_roles(reference, n, ops)
    out = [CandidateEmbedding(tuple(v + ts.origin for v in r), n, ts.size, ts.origin, ops) for r in found]
    if dedupe:
        out = sorted({e.canonical() for e in out}, key=lambda e: e.roles)
    return out


# -- vectorized relation scans -----------------------------------------------


def _dense(roles: np.ndarray, n: int, size: int, ops: Sequence[OpKind]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    tpl = templates(n, ops)
    pos, vals = tpl.positions(roles, size)
    dense = np.full((len(roles), len(tpl.ops) * size * size), -1, dtype=np.int16)
    dense[np.arange(len(roles))[:, None], pos] = vals
    return dense, pos, vals


def _relations(dense: np.ndarray, pos: np.ndarray, vals: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(compatible, overlapping, same) of one candidate against all rows."""
    sub = dense[:, pos]
    constrained = sub >= 0
    conflict = (constrained & (sub != vals)).any(axis=1)
    same = (sub == vals).all(axis=1)
    return ~conflict, constrained.any(axis=1), same


@dataclass
class PairReport:
    modulus: int
    size: int
    ops: tuple[OpKind, ...]
    method: str
    candidates: int
    pairs: int
    compatible_pairs: int
    same_embedding_pairs: int
    overlapping_compatible_pairs: int
    hits: list[tuple[tuple[int, ...], tuple[int, ...]]] = field(default_factory=list)
    hits_truncated: bool = False

    @property
    def answer(self) -> str:
        return "NONE" if self.overlapping_compatible_pairs == 0 else "FOUND"

    def to_dict(self) -> dict:
        return {
            "question": "overlapping compatible embedding pairs",
            "definition": "overlap = constrained-cell index sets intersect; "
            "compatible = no cell forced to two values; rotations of one coding are the same embedding",
            "modulus": self.modulus,
            "size": self.size,
            "padding": self.size - 3 * self.modulus,
            "ops": [op.value for op in self.ops],
            "method": self.method,
            "candidates": self.candidates,
            "pairs": self.pairs,
            "compatible_pairs": self.compatible_pairs,
            "same_embedding_pairs": self.same_embedding_pairs,
            "overlapping_compatible_pairs": self.overlapping_compatible_pairs,
            "overlapping_compatible_embedding_pairs": self.overlapping_compatible_pairs // 9,
            "answer": self.answer,
            "hits": [[list(a), list(b)] for a, b in self.hits],
            "hits_truncated": self.hits_truncated,
        }


def _scan_rows(dense, pos, vals, lo, hi, max_hits):
    compat = same = over = 0
    hits = []
    for i in range(lo, hi):
        c, o, s = _relations(dense[i + 1:], pos[i], vals[i])
        compat += int(c.sum())
        same += int(s.sum())
        good = c & o & ~s
        over += int(good.sum())
        if len(hits) < max_hits:
            for j in np.flatnonzero(good)[: max_hits - len(hits)]:
                hits.append((i, i + 1 + int(j)))
    return compat, same, over, hits


def search_overlapping_pairs(
    n: int,
    size: int,
    ops: Sequence[OpKind] | None = None,
    method: str = "auto",
    workers: int = 1,
    max_hits: int = 100,
) -> PairReport:
    """Count compatible, overlapping pairs of distinct embeddings.

    ``exhaustive`` compares every unordered candidate pair; ``orbit`` fixes
    the first candidate and scales its partner count.  ``auto`` uses the
    exhaustive scan up to EXHAUSTIVE_PAIR_LIMIT candidates.
    """
    ops = _ops(ops)
    total, _ = candidate_count(n, size)
    if method == "auto":
        method = "exhaustive" if total <= EXHAUSTIVE_PAIR_LIMIT else "orbit"
    if method == "exhaustive":
        roles = candidate_roles(n, size)
        dense, pos, vals = _dense(roles, n, size, ops)
        chunks = np.array_split(np.arange(len(roles)), max(1, workers * 4))
        bounds = [(int(c[0]), int(c[-1]) + 1) for c in chunks if len(c)]
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(lambda lh: _scan_rows(dense, pos, vals, lh[0], lh[1], max_hits), bounds))
        else:
            parts = [_scan_rows(dense, pos, vals, lo, hi, max_hits) for lo, hi in bounds]
        compat = sum(p[0] for p in parts)
        same = sum(p[1] for p in parts)
        over = sum(p[2] for p in parts)
        idx_hits = sorted(h for p in parts for h in p[3])
        hits = [(tuple(roles[i].tolist()), tuple(roles[j].tolist())) for i, j in idx_hits[:max_hits]]
        report = PairReport(n, size, ops, "exhaustive", len(roles), len(roles) * (len(roles) - 1) // 2,
                            compat, same, over, hits, over > len(hits))
    elif method == "orbit":
        e0 = tuple(range(3 * n))
        partners = consistent_roles(partial_table(e0, n, size, ops), n, ops)
        p_arr = np.array(partners, dtype=np.int64)
        dense, _, _ = _dense(p_arr, n, size, ops)
        pos0, vals0 = templates(n, ops).positions(np.array(e0), size)
        c, o, s = _relations(dense, pos0[0], vals0[0])
        good = c & o & ~s
        compat = int(c.sum()) - 1  # e0 itself
        same = int(s.sum()) - 1
        over = int(good.sum())
        hits = [(e0, tuple(p_arr[j].tolist())) for j in np.flatnonzero(good)[:max_hits]]
        report = PairReport(n, size, ops, "orbit", total, total * (total - 1) // 2,
                            total * compat // 2, total * same // 2, total * over // 2, hits, over > len(hits))
    else:
        raise ValueError(f"unknown method {method!r}")
    return report


# -- maximum compatible sets -------------------------------------------------


def max_clique(adjacency: list[int], deadline: float | None = None) -> tuple[list[int], bool]:
    """Maximum clique of a graph given as neighbour bitsets.

    Branch and bound with greedy colouring bounds; returns (clique, exact).
    When ``deadline`` passes, the best clique so far is returned with
    exact=False.
    """
    nv = len(adjacency)
    best: list[int] = []
    exact = True
    steps = 0

    def colour_sort(cand: int) -> list[tuple[int, int]]:
        order = []
        colour = 0
        uncoloured = cand
        while uncoloured:
            colour += 1
            avail = uncoloured
            while avail:
                v = (avail & -avail).bit_length() - 1
                avail &= ~(1 << v)
                avail &= ~adjacency[v]
                uncoloured &= ~(1 << v)
                order.append((v, colour))
        return order

    def expand(clique: list[int], cand: int) -> None:
        nonlocal best, exact, steps
        steps += 1
        if deadline is not None and steps % 256 == 0 and time.monotonic() > deadline:
            exact = False
            raise BudgetExceeded
        for v, colour in reversed(colour_sort(cand)):
            if len(clique) + colour <= len(best):
                return
            clique.append(v)
            nxt = cand & adjacency[v]
            if nxt:
                expand(clique, nxt)
            elif len(clique) > len(best):
                best = list(clique)
            clique.pop()
            cand &= ~(1 << v)

    try:
        expand([], (1 << nv) - 1)
    except BudgetExceeded:
        pass
    return sorted(best), exact


def _adjacency(dense: np.ndarray, pos: np.ndarray, vals: np.ndarray, require_overlap: bool) -> list[int]:
    """Bitsets of pairwise compatible (optionally also overlapping) distinct embeddings.

    Rows sharing one position set are compatible only when identical, so
    compatibility is tested between groups of distinct position sets.
    """
    m = len(dense)
    keys = [p.tobytes() for p in np.sort(pos, axis=1)]
    groups: dict[bytes, list[int]] = {}
    for i, k in enumerate(keys):
        groups.setdefault(k, []).append(i)
    adj = [0] * m
    for i in range(m):
        others = np.array([j for k, g in groups.items() if k != keys[i] for j in g if j > i], dtype=np.int64)
        if not len(others):
            continue
        c, o, s = _relations(dense[others], pos[i], vals[i])
        good = c & ~s
        if require_overlap:
            good &= o
        for j in others[good].tolist():
            adj[i] |= 1 << j
            adj[j] |= 1 << i
    return adj


@dataclass
class CliqueReport:
    modulus: int
    size: int
    ops: tuple[OpKind, ...]
    method: str
    status: str
    max_size: int
    witness: list[tuple[int, ...]]
    overlapping_pairs_in_witness: list[tuple[int, int]]
    max_overlapping_size: int
    overlapping_status: str
    partners: int = 0
    partner_embeddings: int = 0

    def to_dict(self) -> dict:
        return {
            "question": "maximum set of pairwise compatible embeddings",
            "modulus": self.modulus,
            "size": self.size,
            "padding": self.size - 3 * self.modulus,
            "ops": [op.value for op in self.ops],
            "method": self.method,
            "status": self.status,
            "max_size": self.max_size,
            "witnesses": {str(k): [list(r) for r in self.witness[:k]] for k in range(1, len(self.witness) + 1)},
            "overlapping_pairs_in_witness": [list(p) for p in self.overlapping_pairs_in_witness],
            "max_overlapping_size": self.max_overlapping_size,
            "overlapping_status": self.overlapping_status,
            "partners_of_first_candidate": self.partners,
            "partner_embeddings": self.partner_embeddings,
        }


def _clique_over(roles: np.ndarray, n: int, size: int, ops, deadline) -> tuple[list[int], bool, list[int], bool]:
    dense, pos, vals = _dense(roles, n, size, ops)
    adj = _adjacency(dense, pos, vals, require_overlap=False)
    best, exact = max_clique(adj, deadline)
    adj_o = _adjacency(dense, pos, vals, require_overlap=True)
    best_o, exact_o = max_clique(adj_o, deadline)
    return best, exact, best_o, exact_o


def _dedupe_rows(roles: np.ndarray, n: int) -> np.ndarray:
    """Keep the least rotation of each coding, in lexicographic order."""
    seen = set()
    keep = []
    for r in roles.tolist():
        blocks = [tuple(r[i * n:(i + 1) * n]) for i in range(3)]
        canon = min(sum(blocks[k:] + blocks[:k], ()) for k in range(3))
        if canon not in seen:
            seen.add(canon)
            keep.append(canon)
    keep.sort()
    return np.array(keep, dtype=np.int64).reshape(-1, 3 * n)


def max_compatible_set(
    n: int,
    size: int,
    ops: Sequence[OpKind] | None = None,
    candidates: Sequence[CandidateEmbedding] | None = None,
    time_budget: float | None = None,
) -> CliqueReport:
    """Largest set of distinct embeddings that fit in one table set.

    Pairwise compatibility is enough for joint satisfiability because every
    conflict is a single cell forced two ways.  Without explicit
    ``candidates`` the search fixes the first candidate (orbit reduction) and
    solves the clique problem among its partners.  When the budget runs out
    the best set found is reported with status PARTIAL.
    """
    ops = _ops(ops)
    deadline = None if time_budget is None else time.monotonic() + time_budget
    origin = 0
    if candidates is not None:
        cands = [c.canonical() for c in candidates]
        origin = cands[0].origin if cands else 0
        roles = _dedupe_rows(np.array([[v - origin for v in c.roles] for c in cands], dtype=np.int64), n)
        best, exact, best_o, exact_o = _clique_over(roles, n, size, ops, deadline)
        witness = [tuple(roles[i].tolist()) for i in best]
        witness_o = best_o
        method, partners, partner_embeddings = "restricted", len(roles), len(roles)
        max_o = len(witness_o) if witness_o else 0
    else:
        e0 = tuple(range(3 * n))
        status_exact = True
        try:
            found = consistent_roles(partial_table(e0, n, size, ops), n, ops, deadline)
        except BudgetExceeded:
            found = [e0] + [dual for dual in _dual_rows(n)]
            status_exact = False
        roles = _dedupe_rows(np.array(found, dtype=np.int64), n)
        e0_row = np.array(e0)
        others = roles[~(roles == e0_row).all(axis=1)]
        dense, pos, vals = _dense(others, n, size, ops)
        pos0, vals0 = templates(n, ops).positions(e0_row, size)
        c, o, s = _relations(dense, pos0[0], vals0[0])
        nb = others[c & ~s]
        nb_o = others[c & o & ~s]
        best, exact, _, _ = _clique_over(nb, n, size, ops, deadline) if len(nb) else ([], True, [], True)
        best_o, exact_o = ([], True)
        if len(nb_o):
            d_o, p_o, v_o = _dense(nb_o, n, size, ops)
            best_o, exact_o = max_clique(_adjacency(d_o, p_o, v_o, require_overlap=True), deadline)
        exact = exact and status_exact
        exact_o = exact_o and status_exact
        witness = [e0] + [tuple(nb[i].tolist()) for i in best]
        max_o = 1 + len(best_o)
        method, partners, partner_embeddings = "orbit", len(found) - 3, len(nb)
    witness_roles = [tuple(v + origin for v in w) for w in witness]
    ov_pairs = []
    emb = [CandidateEmbedding(w, n, size, origin, ops) for w in witness_roles]
    for i, j in itertools.combinations(range(len(emb)), 2):
        if overlap(emb[i], emb[j]).overlapping:
            ov_pairs.append((i, j))
    return CliqueReport(
        n, size, ops, method,
        "EXACT" if exact else "PARTIAL",
        len(witness_roles), witness_roles, ov_pairs,
        max_o, "EXACT" if exact_o else "PARTIAL",
        partners, partner_embeddings,
    )


def _dual_rows(n: int) -> list[tuple[int, ...]]:
    """Role vectors of the B/C-swapped dual codings of the first candidate."""
    a = list(range(n))
    b = list(range(n, 2 * n))
    c = list(range(2 * n, 3 * n))
    out = []
    for pa in itertools.permutations(a):
        for pb in itertools.permutations(c):
            for pc in itertools.permutations(b):
                out.append(tuple(pa) + tuple(pb) + tuple(pc))
    return out
