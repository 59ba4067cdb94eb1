"""Typed expressions: parser, ABC type checker, quaternion images, rearrangements.

Grammar (fully parenthesized, no precedence)::

    expr  := leaf | '(' expr op expr ')'
    op    := '+' | '-' | '*' | '/'
    leaf  := NAME ':' ('A' | 'B' | 'C')
    NAME  := [a-z][a-z0-9]*
"""

from __future__ import annotations

import itertools
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Union

from .core import AbcType, OpKind, SchemeKind, result_type

LEAF_TYPES = (AbcType.A, AbcType.B, AbcType.C)
MAX_REARRANGE_LEAVES = 8


@dataclass(frozen=True)
class Leaf:
    name: str
    type: AbcType

    def __post_init__(self) -> None:
        if self.type not in LEAF_TYPES:
            raise TypeError(f"leaf {self.name} cannot have type {self.type}")

    def __str__(self) -> str:
        return f"{self.name}:{self.type}"


@dataclass(frozen=True)
class Node:
    op: OpKind
    left: "Expr"
    right: "Expr"

    def __str__(self) -> str:
        return f"({self.left} {self.op.symbol} {self.right})"


Expr = Union[Leaf, Node]


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


_NAME = re.compile(r"[a-z][a-z0-9]*")


def parse(text: str) -> Expr:
    pos = 0

    def skip() -> None:
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def expr() -> Expr:
        nonlocal pos
        skip()
        if pos >= len(text):
            raise ParseError("unexpected end of input", pos)
        if text[pos] == "(":
            pos += 1
            left = expr()
            skip()
            if pos >= len(text) or text[pos] not in "+-*/":
                raise ParseError("expected operator", pos)
            op = OpKind.from_symbol(text[pos])
            pos += 1
            right = expr()
            skip()
            if pos >= len(text) or text[pos] != ")":
                raise ParseError("expected ')'", pos)
            pos += 1
            return Node(op, left, right)
        m = _NAME.match(text, pos)
        if not m:
            raise ParseError("expected '(' or a variable name", pos)
        name = m.group()
        pos = m.end()
        if pos >= len(text) or text[pos] != ":":
            raise ParseError("expected ':' after variable name", pos)
        pos += 1
        if pos >= len(text) or text[pos] not in "ABC":
            raise ParseError("leaf type must be A, B or C", pos)
        t = AbcType(text[pos])
        pos += 1
        return Leaf(name, t)

    e = expr()
    skip()
    if pos != len(text):
        raise ParseError("trailing input", pos)
    return e


def leaves(e: Expr) -> list[Leaf]:
    if isinstance(e, Leaf):
        return [e]
    return leaves(e.left) + leaves(e.right)


def ops_preorder(e: Expr) -> list[OpKind]:
    if isinstance(e, Leaf):
        return []
    return [e.op] + ops_preorder(e.left) + ops_preorder(e.right)


def type_of(e: Expr) -> AbcType | None:
    """Declared type of a leaf, ABC rule at nodes; None means ill-typed."""
    if isinstance(e, Leaf):
        return e.type
    t1 = type_of(e.left)
    if t1 is None:
        return None
    t2 = type_of(e.right)
    if t2 is None:
        return None
    return result_type(SchemeKind.ABC, t1, t2)


# -- quaternion units --------------------------------------------------------

_AXES = ("1", "i", "j", "k")
# product of basis units as (sign, axis)
_QMUL = {
    ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
    ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
    ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
    ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
}


@dataclass(frozen=True)
class SignedUnit:
    sign: int
    axis: str

    def __post_init__(self) -> None:
        if self.sign not in (1, -1) or self.axis not in _AXES:
            raise ValueError(f"bad quaternion unit {self.sign}, {self.axis}")

    def __mul__(self, other: SignedUnit) -> SignedUnit:
        s, axis = _QMUL[self.axis, other.axis]
        return SignedUnit(self.sign * other.sign * s, axis)

    def __neg__(self) -> SignedUnit:
        return SignedUnit(-self.sign, self.axis)

    def __str__(self) -> str:
        return ("+" if self.sign > 0 else "-") + self.axis


UNIT_OF_TYPE = {AbcType.A: SignedUnit(1, "i"), AbcType.B: SignedUnit(1, "j"), AbcType.C: SignedUnit(1, "k")}
ONE = SignedUnit(1, "1")


def quaternion_of(e: Expr) -> SignedUnit:
    if isinstance(e, Leaf):
        return UNIT_OF_TYPE[e.type]
    return quaternion_of(e.left) * quaternion_of(e.right)


def parity_profile(e: Expr) -> dict[str, str]:
    counts = Counter(leaf.name for leaf in leaves(e))
    return {name: ("odd" if counts[name] % 2 else "even") for name in sorted(counts)}


# -- rearrangement -----------------------------------------------------------


@lru_cache(maxsize=None)
def shapes(n_leaves: int) -> tuple:
    """All binary tree shapes with ``n_leaves`` leaves; a leaf is None."""
    if n_leaves == 1:
        return (None,)
    out = []
    for k in range(1, n_leaves):
        for left in shapes(k):
            for right in shapes(n_leaves - k):
                out.append((left, right))
    return tuple(out)


def build_tree(shape, leaf_seq, ops) -> Expr:
    """Fill ``shape`` with leaves left to right and operators in preorder."""
    leaf_iter = iter(leaf_seq)
    op_iter = iter(ops)

    def go(s):
        if s is None:
            return next(leaf_iter)
        op = next(op_iter)
        left = go(s[0])
        return Node(op, left, go(s[1]))

    return go(shape)


def _leaf_key(leaf: Leaf) -> tuple[str, str]:
    return leaf.name, leaf.type.value


def multiset_orders(items: list[Leaf]) -> Iterator[tuple[Leaf, ...]]:
    """Distinct orderings of a multiset, lexicographic by (name, type)."""
    pool = sorted(items, key=_leaf_key)
    counts = Counter(pool)
    distinct = sorted(counts, key=_leaf_key)
    n = len(pool)

    def go(prefix):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for leaf in distinct:
            if counts[leaf]:
                counts[leaf] -= 1
                prefix.append(leaf)
                yield from go(prefix)
                prefix.pop()
                counts[leaf] += 1

    yield from go([])


def _relaxed_multisets(e: Expr) -> Iterator[list[Leaf]]:
    original = Counter(leaves(e))
    variables = sorted(original, key=_leaf_key)
    total = sum(original.values())

    def go(i, remaining, acc):
        if i == len(variables):
            if remaining == 0:
                yield list(acc)
            return
        v = variables[i]
        for c in range(original[v] % 2, remaining + 1, 2):
            yield from go(i + 1, remaining - c, acc + [v] * c)

    yield from go(0, total, [])


def rearrangements(e: Expr, parity_relaxed: bool = False) -> Iterator[Expr]:
    """Every tree over the same leaves with the same number of operations.

    Operators are carried over in preorder; typing ignores them.  With
    ``parity_relaxed`` each variable's count may change as long as its
    parity does not.
    """
    all_leaves = leaves(e)
    if len(all_leaves) > MAX_REARRANGE_LEAVES:
        raise ValueError(f"rearrangement guard: more than {MAX_REARRANGE_LEAVES} leaves")
    ops = ops_preorder(e)
    multisets = list(_relaxed_multisets(e)) if parity_relaxed else [all_leaves]
    for ms in multisets:
        for order in multiset_orders(ms):
            for shape in shapes(len(order)):
                yield build_tree(shape, order, ops)


def catalan(k: int) -> int:
    return math.comb(2 * k, k) // (k + 1)


# -- Rearrangement check -----------------------------------------------------

DEFAULT_ALPHABET = (Leaf("x", AbcType.A), Leaf("y", AbcType.B), Leaf("z", AbcType.C))


@dataclass
class RearrangementReport:
    max_leaves: int
    parity_relaxed: bool
    expressions: int = 0
    classes: int = 0
    counterexamples: list[tuple[str, str]] = field(default_factory=list)
    quaternion_failures: list[str] = field(default_factory=list)
    valid_by_size: dict[int, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.counterexamples and not self.quaternion_failures

    def to_dict(self) -> dict:
        return {
            "max_leaves": self.max_leaves,
            "parity_relaxed": self.parity_relaxed,
            "valid_expressions": self.expressions,
            "valid_by_leaves": {str(k): v for k, v in sorted(self.valid_by_size.items())},
            "rearrangement_classes": self.classes,
            "counterexamples": [list(p) for p in self.counterexamples],
            "quaternion_failures": list(self.quaternion_failures),
            "ok": self.ok,
        }


def _valid_trees(seq: tuple[Leaf, ...]) -> list[tuple[AbcType, Expr]]:
    """All validly typed trees over a fixed leaf sequence (any bracketing)."""
    n = len(seq)
    table: dict[tuple[int, int], list[tuple[AbcType, Expr]]] = {}
    for i in range(n):
        table[i, i + 1] = [(seq[i].type, seq[i])]
    for width in range(2, n + 1):
        for i in range(0, n - width + 1):
            j = i + width
            cell = []
            for k in range(i + 1, j):
                for t1, e1 in table[i, k]:
                    for t2, e2 in table[k, j]:
                        r = result_type(SchemeKind.ABC, t1, t2)
                        if r is not None:
                            cell.append((r, Node(OpKind.MUL, e1, e2)))
            table[i, j] = cell
    return table[0, n]


def verify_rearrangement_lemma(max_leaves: int, parity_relaxed: bool = False, alphabet=DEFAULT_ALPHABET) -> RearrangementReport:
    """Exhaustively look for valid expressions whose rearrangement changes type.

    Every validly typed expression over ``alphabet`` with up to
    ``max_leaves`` leaves is generated; expressions are grouped by leaf
    multiset (or by leaf count and per-variable parity when relaxed), and a
    group holding two different types is a counterexample.  Each expression
    is also checked against its quaternion image.
    """
    if max_leaves > MAX_REARRANGE_LEAVES:
        raise ValueError(f"max_leaves must be at most {MAX_REARRANGE_LEAVES}")
    report = RearrangementReport(max_leaves, parity_relaxed)
    groups: dict[tuple, dict[AbcType, Expr]] = {}
    for size in range(1, max_leaves + 1):
        count = 0
        for seq in itertools.product(alphabet, repeat=size):
            mult = Counter(seq)
            if parity_relaxed:
                key = (size,) + tuple(mult[a] % 2 for a in alphabet)
            else:
                key = tuple(mult[a] for a in alphabet)
            seen = groups.setdefault(key, {})
            for t, e in _valid_trees(seq):
                count += 1
                q = quaternion_of(e)
                if q != UNIT_OF_TYPE[t]:
                    report.quaternion_failures.append(f"{e} : {t} but Q = {q}")
                if t not in seen:
                    for other_t, other in seen.items():
                        report.counterexamples.append((str(other), str(e)))
                    seen[t] = e
        report.valid_by_size[size] = count
        report.expressions += count
    report.classes = sum(1 for g in groups.values() if g)
    return report
