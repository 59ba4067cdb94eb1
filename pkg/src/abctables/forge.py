"""Table construction: codebook layouts, constrained cells, nonsense-cell fills.

Fills are reproducible from a 64-bit seed.  The keyed construction is a small
Feistel permutation of the cipherspace whose key schedule and round function
are fixed here, so the same (modulus, seed) yields the same tables anywhere.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import (
    ALL_OPS,
    AbcType,
    Codebook,
    OpKind,
    SchemeKind,
    TableError,
    TableSet,
    constrained_cells,
    plain_op_table,
    result_type,
)

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MAX_MATERIALIZED = 1 << 13
MAX_REPAIR_SWEEPS = 1000


class FillError(RuntimeError):
    pass


class Layout(enum.Enum):
    EXPLICIT = "explicit"
    STRIDED = "strided"
    RANDOM = "random"


class FillKind(enum.Enum):
    SAFE_RANDOM = "safe"
    DUAL = "dual"
    RAW_RANDOM = "raw"


@dataclass(frozen=True)
class FillPolicy:
    kind: FillKind = FillKind.SAFE_RANDOM
    seed: int = 0
    variant: int = 0

    def describe(self) -> str:
        if self.kind is FillKind.DUAL:
            return f"dual:{self.variant}"
        return self.kind.value


# -- mixing and the keyed permutation ---------------------------------------


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


_U30, _U27, _U31 = np.uint64(30), np.uint64(27), np.uint64(31)
_M1, _M2 = np.uint64(0xBF58476D1CE4E5B9), np.uint64(0x94D049BB133111EB)


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):  # wraparound mod 2^64 is intended
        z = (z ^ (z >> _U30)) * _M1
        z = (z ^ (z >> _U27)) * _M2
    return z ^ (z >> _U31)


def key_schedule(seed: int, rounds: int = 4) -> list[int]:
    s = seed & MASK64
    keys = []
    for _ in range(rounds):
        s = (s + GOLDEN) & MASK64
        keys.append(mix64(s))
    return keys


class KeyedPermutation:
    """Balanced Feistel bijection on ``[0, domain)`` with cycle walking.

    The block is the smallest even bit width ``b`` with ``2**b >= domain``;
    a block value splits as ``(L, R) = (x >> b/2, x & (2**(b/2) - 1))`` and
    each round maps ``(L, R) -> (R, L ^ (mix64(R ^ k) mod 2**(b/2)))``.
    """

    def __init__(self, domain: int, seed: int, rounds: int = 4):
        if domain < 1:
            raise ValueError("domain must be positive")
        b = 2
        while (1 << b) < domain:
            b += 2
        self.domain = domain
        self.bits = b
        self.half = b // 2
        self.seed = seed & MASK64
        self.keys = key_schedule(seed, rounds)

    def _round(self, r: int, k: int) -> int:
        return mix64(r ^ k) & ((1 << self.half) - 1)

    def block_forward(self, x: int) -> int:
        h, hm = self.half, (1 << self.half) - 1
        left, right = x >> h, x & hm
        for k in self.keys:
            left, right = right, left ^ self._round(right, k)
        return (left << h) | right

    def block_inverse(self, y: int) -> int:
        h, hm = self.half, (1 << self.half) - 1
        left, right = y >> h, y & hm
        for k in reversed(self.keys):
            left, right = right ^ self._round(left, k), left
        return (left << h) | right

    def forward(self, x: int) -> int:
        if not 0 <= x < self.domain:
            raise ValueError(f"{x} outside [0, {self.domain})")
        y = self.block_forward(x)
        while y >= self.domain:
            y = self.block_forward(y)
        return y

    def inverse(self, y: int) -> int:
        if not 0 <= y < self.domain:
            raise ValueError(f"{y} outside [0, {self.domain})")
        x = self.block_inverse(y)
        while x >= self.domain:
            x = self.block_inverse(x)
        return x

    def _block_array(self, x: np.ndarray, inverse: bool) -> np.ndarray:
        h = np.uint64(self.half)
        hm = np.uint64((1 << self.half) - 1)
        left, right = x >> h, x & hm
        keys = [np.uint64(k) for k in self.keys]
        if inverse:
            for k in reversed(keys):
                left, right = right ^ (mix64_array(left ^ k) & hm), left
        else:
            for k in keys:
                left, right = right, left ^ (mix64_array(right ^ k) & hm)
        return (left << h) | right

    def _walk_array(self, x: np.ndarray, inverse: bool) -> np.ndarray:
        x = np.asarray(x, dtype=np.uint64)
        y = self._block_array(x, inverse)
        out = y >= np.uint64(self.domain)
        while out.any():
            y[out] = self._block_array(y[out], inverse)
            out = y >= np.uint64(self.domain)
        return y.astype(np.int64)

    def forward_array(self, x: np.ndarray) -> np.ndarray:
        return self._walk_array(x, inverse=False)

    def inverse_array(self, y: np.ndarray) -> np.ndarray:
        return self._walk_array(y, inverse=True)


# -- codebooks ---------------------------------------------------------------


def build_codebook(
    n: int,
    m: int = 0,
    scheme: SchemeKind = SchemeKind.ABC,
    seed: int | None = None,
    layout: Layout = Layout.RANDOM,
) -> Codebook:
    """Lay out the per-class injections.

    EXPLICIT numbers coded values consecutively from 1 (A first, then
    B, then C) with padding after them; STRIDED codes cipher ``c`` as residue
    ``c // k`` of class slot ``c % k``, slots past the scheme's classes being
    padding; RANDOM is a seeded uniform assignment.
    """
    if n < 2 or m < 0:
        raise ValueError("need modulus >= 2 and padding >= 0")
    classes = scheme.classes
    size = len(classes) * n + m
    if layout is Layout.EXPLICIT:
        maps = {t: tuple(1 + i * n + x for x in range(n)) for i, t in enumerate(classes)}
        return Codebook(n, m, scheme, maps, origin=1)
    if layout is Layout.STRIDED:
        if m % n:
            raise ValueError("strided layout needs padding that is a multiple of the modulus")
        stride = len(classes) + m // n
        maps = {t: tuple(stride * x + i for x in range(n)) for i, t in enumerate(classes)}
        return Codebook(n, m, scheme, maps)
    rng = np.random.default_rng(0 if seed is None else seed & MASK64)
    perm = rng.permutation(size)
    maps = {t: tuple(int(v) for v in perm[i * n:(i + 1) * n]) for i, t in enumerate(classes)}
    return Codebook(n, m, scheme, maps)


def permutation_by_index(n: int, index: int) -> tuple[int, ...]:
    """The ``index``-th permutation of range(n) in lexicographic order."""
    items = list(range(n))
    out = []
    for k in range(n, 0, -1):
        f = math.factorial(k - 1)
        q, index = divmod(index, f)
        out.append(items.pop(q))
    return tuple(out)


def dual_variant_count(n: int) -> int:
    return math.factorial(n) ** 3


def dual_codebook(cb: Codebook, variant: int) -> Codebook:
    """Second ABC coding on the first one's value blocks with B and C swapped.

    The new A class reuses the old A values, new B the old C values and new C
    the old B values.  ``variant`` picks the order within each block in mixed
    radix ``n!``: A digit first, then B, then C.  For n = 2 the variants are
    0..7 with bit 0 swapping A, bit 1 swapping B and bit 2 swapping C.
    """
    if cb.scheme is not SchemeKind.ABC:
        raise ValueError("dual construction needs an ABC codebook")
    n = cb.modulus
    f = math.factorial(n)
    if not 0 <= variant < f ** 3:
        raise ValueError(f"variant must lie in [0, {f ** 3})")
    pa, pb, pc = (permutation_by_index(n, (variant // f ** i) % f) for i in range(3))
    blocks = {
        AbcType.A: (cb.maps[AbcType.A], pa),
        AbcType.B: (cb.maps[AbcType.C], pb),
        AbcType.C: (cb.maps[AbcType.B], pc),
    }
    maps = {t: tuple(vals[p[x]] for x in range(n)) for t, (vals, p) in blocks.items()}
    return Codebook(n, cb.padding, cb.scheme, maps, origin=cb.origin)


# -- materialized fills ------------------------------------------------------


class _Filler:
    """Seeded nonsense-cell generator for one cipherspace."""

    def __init__(self, cbs: list[Codebook], seed: int):
        self.cbs = cbs
        primary = cbs[0]
        self.size = primary.size
        self.origin = primary.origin
        self.rng = np.random.default_rng(seed & MASK64)
        cls = primary.class_array()
        self.cls = cls
        if len(primary.classes) > 1:
            self.same_class = (cls[:, None] == cls[None, :]) & (cls[:, None] >= 0)
        else:
            self.same_class = np.zeros((self.size, self.size), dtype=bool)
        self.outside = [np.flatnonzero(cls != ti) for ti in range(len(primary.classes))]

    def initial(self) -> np.ndarray:
        s = self.size
        values = self.rng.integers(0, s, size=(s, s))
        if self.same_class.any():
            width = len(self.outside[0])
            picks = self.rng.integers(0, width, size=(s, s))
            for ti, allowed in enumerate(self.outside):
                rows = self.cls == ti
                block = rows[:, None] & rows[None, :]
                values[block] = allowed[picks[block]]
        return values

    def redraw(self, r: int, c: int) -> int:
        if self.same_class[r, c]:
            allowed = self.outside[self.cls[r]]
            return int(allowed[self.rng.integers(0, len(allowed))])
        return int(self.rng.integers(0, self.size))


def _constrained_offsets(cbs: Sequence[Codebook], op: OpKind):
    origin = cbs[0].origin
    out = {}
    for cb in cbs:
        rows, cols, vals = constrained_cells(cb, op)
        for r, c, v in zip((rows - origin).tolist(), (cols - origin).tolist(), (vals - origin).tolist()):
            prev = out.setdefault((r, c), v)
            if prev != v:
                raise FillError(f"codings disagree on {op} cell ({r + origin}, {c + origin})")
    return out


def _formula_offenders(tables: dict[OpKind, np.ndarray], cbs: Sequence[Codebook]):
    """Known constant formulas that hold on every admissible start.

    Checked per codebook: ``c - c`` (0), ``c / c`` (1), repeated squaring of
    invertible values when n = 2^w (1), and the commuted-product quotients
    ``(c1 * c2) / (c2 * c1)`` in both orders over valid cross-type pairs
    (1).  Each offender is returned as its name plus one list of
    ``(op, row, col)`` cells per start, so a repair can break one start.
    """
    found = []
    for cb in cbs:
        n, o = cb.modulus, cb.origin
        plain = cb.plain_array()
        inv_x = [x for x in range(n) if math.gcd(x, n) == 1]
        coded = np.array([c - o for t in cb.classes for c in cb.maps[t]])
        units = np.array([cb.maps[t][x] - o for t in cb.classes for x in inv_x])

        res = tables[OpKind.SUB][coded, coded]
        if np.all(plain[res] == 0):
            found.append(("self_sub", [[(OpKind.SUB, c, c)] for c in coded.tolist()]))
        res = tables[OpKind.DIV][units, units]
        if np.all(plain[res] == 1):
            found.append(("self_div", [[(OpKind.DIV, c, c)] for c in units.tolist()]))

        w = n.bit_length() - 1
        if n == 1 << w and w >= 3:
            cur = units.copy()
            paths = [[] for _ in cur]
            for _ in range(w - 1):
                for i, c in enumerate(cur.tolist()):
                    paths[i].append((OpKind.MUL, c, c))
                cur = tables[OpKind.MUL][cur, cur]
            if np.all(plain[cur] == 1):
                found.append(("lagrange", paths))

        if len(cb.classes) > 1:
            pairs = [
                (cb.maps[t1][x] - o, cb.maps[t2][y] - o)
                for t1 in cb.classes
                for t2 in cb.classes
                if t1 is not t2 and result_type(cb.scheme, t1, t2) is not None
                for x in inv_x
                for y in inv_x
            ]
            if pairs:
                c1, c2 = np.array(pairs).T
                fwd = tables[OpKind.MUL][c1, c2]
                bwd = tables[OpKind.MUL][c2, c1]
                q1 = tables[OpKind.DIV][fwd, bwd]
                q2 = tables[OpKind.DIV][bwd, fwd]
                if np.all((plain[q1] == 1) & (plain[q2] == 1)):
                    found.append((
                        "ab_defeat",
                        [
                            [(OpKind.MUL, a, b), (OpKind.MUL, b, a), (OpKind.DIV, f, g), (OpKind.DIV, g, f)]
                            for a, b, f, g in zip(c1.tolist(), c2.tolist(), fwd.tolist(), bwd.tolist())
                        ],
                    ))
    return found


def accidental_pairs(table: np.ndarray, origin: int = 0) -> list[tuple[int, int]]:
    """Pairs ``x <= y`` whose four combinations all land back in ``{x, y}``."""
    s = table.shape[0]
    diag = np.diagonal(table)
    out = []
    for x in range(s):
        ys = np.arange(x, s)

        def inside(v):
            return (v == x) | (v == ys)

        bad = inside(diag[x]) & inside(table[x, x:]) & inside(table[x:, x]) & inside(diag[x:])
        out.extend((x + origin, int(y) + origin) for y in ys[bad])
    return out


@dataclass(frozen=True)
class Offender:
    op: OpKind
    x: int
    y: int


def check_no_accidental_pairs(ts: TableSet, ops: Iterable[OpKind] = (OpKind.ADD, OpKind.MUL)) -> list[Offender]:
    """Empty list when no pair of values is closed under any listed operation."""
    if not ts.materialized:
        raise TableError("accidental-pair check needs a materialized table set")
    out = []
    for op in ops:
        offsets = ts.tables[op] - ts.origin
        out.extend(Offender(op, x, y) for x, y in accidental_pairs(offsets, ts.origin))
    return out


def _fill(cbs: list[Codebook], policy: FillPolicy, descriptor: dict) -> TableSet:
    filler = _Filler(cbs, policy.seed)
    s = filler.size
    tables: dict[OpKind, np.ndarray] = {}
    free: dict[OpKind, np.ndarray] = {}
    for op in ALL_OPS:
        values = filler.initial()
        mask = np.ones((s, s), dtype=bool)
        for (r, c), v in _constrained_offsets(cbs, op).items():
            values[r, c] = v
            mask[r, c] = False
        tables[op] = values
        free[op] = mask

    if policy.kind is not FillKind.RAW_RANDOM:
        _repair(tables, free, filler, cbs, policy.seed)

    origin = filler.origin
    return TableSet(s, {op: t + origin for op, t in tables.items()}, origin, descriptor)


def _repair(tables, free, filler: _Filler, cbs, seed: int) -> None:
    for _ in range(MAX_REPAIR_SWEEPS):
        work = []
        for op in (OpKind.ADD, OpKind.MUL):
            for x, y in accidental_pairs(tables[op]):
                cells = {(x, x), (x, y), (y, x), (y, y)}
                work.append((op, sorted(cells), (x, y)))
        dirty = False
        for op, cells, pair in work:
            movable = [rc for rc in cells if free[op][rc]]
            if not movable:
                raise FillError(
                    f"pair {pair} is closed under {op} through constrained cells only; "
                    f"this scheme cannot be safe-filled (seed {seed})"
                )
            for r, c in movable:
                tables[op][r, c] = filler.redraw(r, c)
            dirty = True
        for name, per_start in _formula_offenders(tables, cbs):
            movable = [[cell for cell in cells if free[cell[0]][cell[1:]]] for cells in per_start]
            movable = [cells for cells in movable if cells]
            if not movable:
                # forced by the scheme itself (e.g. the AB quotient attack)
                continue
            cells = movable[int(filler.rng.integers(0, len(movable)))]
            op, r, c = cells[int(filler.rng.integers(0, len(cells)))]
            tables[op][r, c] = filler.redraw(r, c)
            dirty = True
        if not dirty:
            return
    raise FillError(f"safe fill did not converge in {MAX_REPAIR_SWEEPS} sweeps (seed {seed})")


def build_tables(cb: Codebook, policy: FillPolicy = FillPolicy()) -> TableSet:
    """Materialize all four tables for ``cb``.

    Constrained cells follow the homomorphism condition.  SAFE_RANDOM draws
    same-class diagonal-block cells from outside that class and everything
    else uniformly, then re-draws cells until no value pair is closed under
    ADD or MUL and no known constant formula (self subtraction, self
    division, repeated squaring, commuted-product quotient) yields its
    constant on every admissible start.
    """
    if cb.size > MAX_MATERIALIZED:
        raise TableError(f"cipherspace {cb.size} exceeds the materialization guard {MAX_MATERIALIZED}")
    if policy.kind is FillKind.DUAL:
        return build_dual(cb, policy.variant, policy.seed)[0]
    descriptor = {"fill": policy.describe(), "seed": policy.seed, "scheme": cb.scheme.value}
    return _fill([cb], policy, descriptor)


def build_dual(cb: Codebook, variant: int, seed: int) -> tuple[TableSet, Codebook]:
    """Tables carrying two ABC codings at once, plus the second codebook."""
    if cb.size > MAX_MATERIALIZED:
        raise TableError(f"cipherspace {cb.size} exceeds the materialization guard {MAX_MATERIALIZED}")
    secondary = dual_codebook(cb, variant)
    policy = FillPolicy(FillKind.DUAL, seed, variant)
    descriptor = {"fill": policy.describe(), "seed": seed, "scheme": cb.scheme.value}
    return _fill([cb, secondary], policy, descriptor), secondary


# -- keyed functional tables -------------------------------------------------

_TYPE_SLOTS = (AbcType.A, AbcType.B, AbcType.C, AbcType.X)


def _slot_rule() -> np.ndarray:
    rule = np.full((4, 4), -1, dtype=np.int64)
    for i, t1 in enumerate(_TYPE_SLOTS):
        for j, t2 in enumerate(_TYPE_SLOTS):
            r = result_type(SchemeKind.ABC, t1, t2)
            if r is not None:
                rule[i, j] = _TYPE_SLOTS.index(r)
    return rule


def cell_noise(op_index: np.ndarray, c1: np.ndarray, c2: np.ndarray, seed: int) -> np.ndarray:
    """64-bit pseudo-random word per (op, c1, c2, seed) for nonsense cells."""
    g = np.uint64(GOLDEN)
    z = mix64_array(np.uint64(seed & MASK64) ^ (np.asarray(op_index, dtype=np.uint64) + g))
    z = mix64_array(z ^ (np.asarray(c1, dtype=np.uint64) + g))
    return mix64_array(z ^ (np.asarray(c2, dtype=np.uint64) + g))


class KeyedTableSet:
    """ABC tables over a 4n cipherspace computed on demand from a keyed permutation.

    Plain word ``4 x + slot`` (slot 0/1/2 for A/B/C, 3 for padding) is
    encrypted as ``perm.forward(4 x + slot)``.
    """

    materialized = False

    def __init__(self, n: int, seed: int):
        if n < 2:
            raise ValueError("modulus must be at least 2")
        self.modulus = n
        self.seed = seed & MASK64
        self.size = 4 * n
        self.origin = 0
        self.perm = KeyedPermutation(self.size, seed)
        self.provenance = {"fill": "keyed", "seed": self.seed, "scheme": "abc"}
        self._rule = _slot_rule()
        self._results = {op: plain_op_table(op, n) for op in ALL_OPS}

    @property
    def codebook(self) -> Codebook:
        n = self.modulus
        words = np.arange(self.size)
        cipher = self.perm.forward_array(words)
        maps = {t: tuple(int(v) for v in cipher[i::4]) for i, t in enumerate(_TYPE_SLOTS[:3])}
        return Codebook(n, n, SchemeKind.ABC, maps)

    def values(self) -> range:
        return range(self.size)

    def lookup_many(self, op: OpKind, c1, c2) -> np.ndarray:
        c1 = np.asarray(c1, dtype=np.int64)
        c2 = np.asarray(c2, dtype=np.int64)
        if c1.size and (c1.min() < 0 or c1.max() >= self.size or c2.min() < 0 or c2.max() >= self.size):
            raise TableError("operand outside cipherspace")
        p1 = self.perm.inverse_array(c1)
        p2 = self.perm.inverse_array(c2)
        slot = self._rule[p1 % 4, p2 % 4]
        res = self._results[op][p1 // 4, p2 // 4]
        ok = (slot >= 0) & (res >= 0)
        out = (cell_noise(ALL_OPS.index(op), c1, c2, self.seed) % np.uint64(self.size)).astype(np.int64)
        if ok.any():
            out[ok] = self.perm.forward_array(4 * res[ok] + slot[ok])
        return out

    def lookup(self, op: OpKind, c1: int, c2: int) -> int:
        return int(self.lookup_many(op, np.array([c1]), np.array([c2]))[0])

    def materialize(self) -> TableSet:
        if self.size > MAX_MATERIALIZED:
            raise TableError(f"cipherspace {self.size} exceeds the materialization guard {MAX_MATERIALIZED}")
        grid = np.arange(self.size)
        rows = np.repeat(grid, self.size)
        cols = np.tile(grid, self.size)
        tables = {op: self.lookup_many(op, rows, cols).reshape(self.size, self.size) for op in ALL_OPS}
        return TableSet(self.size, tables, 0, dict(self.provenance))


def build_keyed(n: int, seed: int) -> KeyedTableSet:
    return KeyedTableSet(n, seed)


def all_dual_codebooks(cb: Codebook) -> list[Codebook]:
    return [dual_codebook(cb, v) for v in range(dual_variant_count(cb.modulus))]


def reference_codebook() -> Codebook:
    """1-bit ABC coding A = {1, 2}, B = {3, 4}, C = {5, 6}."""
    return build_codebook(2, 0, SchemeKind.ABC, layout=Layout.EXPLICIT)


REFERENCE_DUAL_VARIANT = 5  # A: 0->2, 1->1; B: 0->5, 1->6; C: 0->4, 1->3

