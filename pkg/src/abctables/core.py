"""Cipherspace, codebooks, typing rules and table containers."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np


class AbcType(enum.Enum):
    A = "A"
    B = "B"
    C = "C"
    X = "X"

    def __str__(self) -> str:
        return self.value


class OpKind(enum.Enum):
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"

    @property
    def symbol(self) -> str:
        return {"add": "+", "sub": "-", "mul": "*", "div": "/"}[self.value]

    @classmethod
    def from_symbol(cls, sym: str) -> OpKind:
        for op in cls:
            if op.symbol == sym:
                return op
        raise ValueError(f"unknown operator {sym!r}")

    def __str__(self) -> str:
        return self.value


ALL_OPS = (OpKind.ADD, OpKind.SUB, OpKind.MUL, OpKind.DIV)


class SchemeKind(enum.Enum):
    PLAIN = "plain"
    AB = "ab"
    ABC = "abc"

    @property
    def classes(self) -> tuple[AbcType, ...]:
        if self is SchemeKind.PLAIN:
            return (AbcType.A,)
        if self is SchemeKind.AB:
            return (AbcType.A, AbcType.B)
        return (AbcType.A, AbcType.B, AbcType.C)

    def __str__(self) -> str:
        return self.value


_ABC_RULE = {
    (AbcType.A, AbcType.B): AbcType.C,
    (AbcType.B, AbcType.C): AbcType.A,
    (AbcType.C, AbcType.A): AbcType.B,
}
_AB_RULE = {
    (AbcType.A, AbcType.B): AbcType.A,
    (AbcType.B, AbcType.A): AbcType.B,
}


def result_type(scheme: SchemeKind, t1: AbcType, t2: AbcType) -> AbcType | None:
    """Type of ``t1 op t2`` under ``scheme``, or None for a nonsense combination."""
    if AbcType.X in (t1, t2):
        return None
    if scheme is SchemeKind.PLAIN:
        return AbcType.A
    if scheme is SchemeKind.AB:
        return _AB_RULE.get((t1, t2))
    return _ABC_RULE.get((t1, t2))


def typed_pairs(scheme: SchemeKind) -> list[tuple[AbcType, AbcType, AbcType]]:
    """All (t1, t2, result) triples the scheme defines, in class order."""
    out = []
    for t1 in scheme.classes:
        for t2 in scheme.classes:
            r = result_type(scheme, t1, t2)
            if r is not None:
                out.append((t1, t2, r))
    return out


def plain_op(op: OpKind, x: int, y: int, n: int) -> int | None:
    """Modular arithmetic on plain residues; None where division is undefined."""
    if op is OpKind.ADD:
        return (x + y) % n
    if op is OpKind.SUB:
        return (x - y) % n
    if op is OpKind.MUL:
        return (x * y) % n
    if math.gcd(y, n) != 1:
        return None
    return (x * pow(y, -1, n)) % n


def plain_op_table(op: OpKind, n: int) -> np.ndarray:
    """n x n array of ``x op y`` with -1 where the result is undefined."""
    out = np.full((n, n), -1, dtype=np.int64)
    for x in range(n):
        for y in range(n):
            r = plain_op(op, x, y, n)
            if r is not None:
                out[x, y] = r
    return out


class CodebookError(ValueError):
    pass


@dataclass(frozen=True)
class Codebook:
    """Per-class injections of plain residues into the cipherspace.

    Cipher values live in ``[origin, origin + size)``.  ``maps[T][x]`` is the
    cipher value encrypting residue ``x`` under class ``T``; everything not in
    any image is an X-type padding value.
    """

    modulus: int
    padding: int
    scheme: SchemeKind
    maps: Mapping[AbcType, tuple[int, ...]]
    origin: int = 0

    def __post_init__(self) -> None:
        n = self.modulus
        if n < 1 or self.padding < 0:
            raise CodebookError("modulus must be positive and padding non-negative")
        if set(self.maps) != set(self.scheme.classes):
            raise CodebookError(
                f"scheme {self.scheme} needs classes {[str(t) for t in self.scheme.classes]}"
            )
        object.__setattr__(self, "maps", {t: tuple(int(v) for v in self.maps[t]) for t in self.scheme.classes})
        seen: set[int] = set()
        for t in self.scheme.classes:
            values = self.maps[t]
            if len(values) != n:
                raise CodebookError(f"class {t} must code exactly {n} residues")
            for v in values:
                if not self.origin <= v < self.origin + self.size:
                    raise CodebookError(f"cipher value {v} outside cipherspace")
                if v in seen:
                    raise CodebookError(f"cipher value {v} coded twice")
                seen.add(v)

    @property
    def size(self) -> int:
        return len(self.scheme.classes) * self.modulus + self.padding

    @property
    def classes(self) -> tuple[AbcType, ...]:
        return self.scheme.classes

    @cached_property
    def _inverse(self) -> tuple[np.ndarray, np.ndarray]:
        plain = np.full(self.size, -1, dtype=np.int64)
        kind = np.full(self.size, -1, dtype=np.int64)
        for ti, t in enumerate(self.classes):
            idx = np.asarray(self.maps[t], dtype=np.int64) - self.origin
            plain[idx] = np.arange(self.modulus)
            kind[idx] = ti
        plain.flags.writeable = False
        kind.flags.writeable = False
        return plain, kind

    def plain_array(self) -> np.ndarray:
        """Plain residue per cipher offset, -1 on padding."""
        return self._inverse[0]

    def class_array(self) -> np.ndarray:
        """Class index (into ``classes``) per cipher offset, -1 on padding."""
        return self._inverse[1]

    def class_values(self, t: AbcType) -> np.ndarray:
        return np.asarray(self.maps[t], dtype=np.int64)

    def padding_values(self) -> list[int]:
        return [self.origin + i for i in np.flatnonzero(self.class_array() < 0)]

    def coded_values(self) -> list[int]:
        return [v for t in self.classes for v in self.maps[t]]

    def encrypt(self, x: int, t: AbcType) -> int:
        if t not in self.maps:
            raise CodebookError(f"type {t} is not a coding class of scheme {self.scheme}")
        if not 0 <= x < self.modulus:
            raise CodebookError(f"residue {x} outside modulus {self.modulus}")
        return self.maps[t][x]

    def decrypt(self, c: int) -> tuple[int, AbcType] | AbcType:
        """``(residue, class)`` for coded values, ``AbcType.X`` for padding."""
        off = c - self.origin
        if not 0 <= off < self.size:
            raise CodebookError(f"cipher value {c} outside cipherspace [{self.origin}, {self.origin + self.size})")
        ti = int(self.class_array()[off])
        if ti < 0:
            return AbcType.X
        return int(self.plain_array()[off]), self.classes[ti]

    def same_coding(self, other: Codebook) -> bool:
        """True when every cipher value decodes to the same residue in both books."""
        return (
            self.size == other.size
            and self.origin == other.origin
            and np.array_equal(self.plain_array(), other.plain_array())
        )


def constrained_cells(cb: Codebook, op: OpKind) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cells forced by the homomorphism condition, as (row, col, value) cipher arrays."""
    n = cb.modulus
    results = plain_op_table(op, n)
    xs, ys = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    rows, cols, vals = [], [], []
    for t1, t2, r in typed_pairs(cb.scheme):
        ok = results >= 0
        rows.append(cb.class_values(t1)[xs[ok]])
        cols.append(cb.class_values(t2)[ys[ok]])
        vals.append(cb.class_values(r)[results[ok]])
    if not rows:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)


def constrained_mask(cb: Codebook, op: OpKind) -> np.ndarray:
    """Boolean S x S mask of constrained cells (indexed by cipher offset)."""
    mask = np.zeros((cb.size, cb.size), dtype=bool)
    r, c, _ = constrained_cells(cb, op)
    mask[r - cb.origin, c - cb.origin] = True
    return mask


class TableError(ValueError):
    pass


@dataclass(eq=False)
class TableSet:
    """One materialized S x S result matrix per operation.

    Arrays are indexed by cipher offset (value minus ``origin``) and are
    frozen on construction.
    """

    size: int
    tables: dict[OpKind, np.ndarray]
    origin: int = 0
    provenance: dict = field(default_factory=dict)

    materialized = True

    def __post_init__(self) -> None:
        if set(self.tables) != set(ALL_OPS):
            raise TableError("a table set needs add, sub, mul and div tables")
        frozen = {}
        for op in ALL_OPS:
            arr = np.array(self.tables[op], dtype=np.int64)
            if arr.shape != (self.size, self.size):
                raise TableError(f"{op} table has shape {arr.shape}, expected {(self.size, self.size)}")
            if arr.size and (arr.min() < self.origin or arr.max() >= self.origin + self.size):
                raise TableError(f"{op} table holds values outside the cipherspace")
            arr.flags.writeable = False
            frozen[op] = arr
        self.tables = frozen

    def _check(self, c: int) -> int:
        off = c - self.origin
        if not 0 <= off < self.size:
            raise TableError(f"operand {c} outside cipherspace [{self.origin}, {self.origin + self.size})")
        return off

    def lookup(self, op: OpKind, c1: int, c2: int) -> int:
        return int(self.tables[op][self._check(c1), self._check(c2)])

    def lookup_many(self, op: OpKind, c1: np.ndarray, c2: np.ndarray) -> np.ndarray:
        c1 = np.asarray(c1, dtype=np.int64) - self.origin
        c2 = np.asarray(c2, dtype=np.int64) - self.origin
        if c1.size and (c1.min() < 0 or c1.max() >= self.size or c2.min() < 0 or c2.max() >= self.size):
            raise TableError("operand outside cipherspace")
        return self.tables[op][c1, c2]

    def values(self) -> range:
        return range(self.origin, self.origin + self.size)

    def with_cell(self, op: OpKind, c1: int, c2: int, value: int) -> TableSet:
        """Copy with one cell replaced (fault injection, poisoning)."""
        tables = {k: v.copy() for k, v in self.tables.items()}
        tables[op][c1 - self.origin, c2 - self.origin] = value
        return TableSet(self.size, tables, self.origin, dict(self.provenance))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TableSet):
            return NotImplemented
        return (
            self.size == other.size
            and self.origin == other.origin
            and all(np.array_equal(self.tables[op], other.tables[op]) for op in ALL_OPS)
        )


def coded_starts(cb: Codebook, predicate=None) -> list[int]:
    """Coded cipher values in class order, optionally filtered on the plain residue."""
    out = []
    for t in cb.classes:
        for x, c in enumerate(cb.maps[t]):
            if predicate is None or predicate(x):
                out.append(c)
    return out


def as_codebook_list(cbs: Codebook | Iterable[Codebook]) -> list[Codebook]:
    if isinstance(cbs, Codebook):
        return [cbs]
    return list(cbs)
