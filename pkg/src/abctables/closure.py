"""Constant-valued typed expressions in x:A, y:B with + and * mod 2.

An expression's behaviour is summarised by its signature: ABC type, the
truth table of its value over (x, y) in {0,1}^2, and the parities of the
occurrence counts of x and y.  Signatures compose, so the set reachable
by expressions of any size is a finite fixpoint.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .abc_typing import Expr, Leaf, Node, leaves, type_of
from .core import AbcType, OpKind, SchemeKind, result_type

MAX_OPS_GUARD = 24
STATE_BOUND = 3 * 16 * 4
OPS = (OpKind.ADD, OpKind.MUL)

X_LEAF = Leaf("x", AbcType.A)
Y_LEAF = Leaf("y", AbcType.B)
# truth-table bit for (x, y) sits at index 2x + y
X_TABLE = 0b1100
Y_TABLE = 0b1010
FULL = 0b1111
QUESTION_CLASS = (1, 0)


def _parity_name(p: tuple[int, int]) -> str:
    return f"x {'odd' if p[0] else 'even'}, y {'odd' if p[1] else 'even'}"


@dataclass(frozen=True)
class SignatureState:
    type: AbcType
    truth_table: int
    parities: tuple[int, int]

    def sort_key(self) -> tuple:
        return self.type.value, self.truth_table, self.parities

    @property
    def constant(self) -> int | None:
        if self.truth_table == 0:
            return 0
        if self.truth_table == FULL:
            return 1
        return None

    def to_dict(self) -> dict:
        return {
            "type": self.type.value,
            "truth_table": [(self.truth_table >> (2 * x + y)) & 1 for x in (0, 1) for y in (0, 1)],
            "parities": _parity_name(self.parities),
        }


def _combine_tables(op: OpKind, t1: int, t2: int) -> int:
    return (t1 ^ t2) if op is OpKind.ADD else (t1 & t2)


def combine(op: OpKind, s1: SignatureState, s2: SignatureState) -> SignatureState | None:
    t = result_type(SchemeKind.ABC, s1.type, s2.type)
    if t is None:
        return None
    par = (s1.parities[0] ^ s2.parities[0], s1.parities[1] ^ s2.parities[1])
    return SignatureState(t, _combine_tables(op, s1.truth_table, s2.truth_table), par)


SEEDS = {
    SignatureState(AbcType.A, X_TABLE, (1, 0)): X_LEAF,
    SignatureState(AbcType.B, Y_TABLE, (0, 1)): Y_LEAF,
}


@dataclass
class ClosureReport:
    reachable: dict[SignatureState, Expr]
    rounds: int
    constant_hits: dict[tuple[int, int], list[SignatureState]] = field(default_factory=dict)

    @property
    def question_hits(self) -> list[SignatureState]:
        return self.constant_hits.get(QUESTION_CLASS, [])

    def verdict_line(self) -> str:
        if not self.question_hits:
            return "constant-valued typed expression: NONE (x odd, y even)"
        s = self.question_hits[0]
        return f"constant-valued typed expression: FOUND (x odd, y even) {self.reachable[s]} = {s.constant}"

    def to_dict(self) -> dict:
        return {
            "question": "constant-valued typed expression with x odd, y even",
            "leaves": [str(X_LEAF), str(Y_LEAF)],
            "ops": [op.value for op in OPS],
            "reachable_states": len(self.reachable),
            "state_bound": STATE_BOUND,
            "rounds": self.rounds,
            "constant_hits": {
                _parity_name(p): [
                    {**s.to_dict(), "value": s.constant, "witness": str(self.reachable[s])} for s in states
                ]
                for p, states in sorted(self.constant_hits.items())
            },
            "answer": "NONE" if not self.question_hits else "FOUND",
        }


def signature_closure() -> ClosureReport:
    """Least fixpoint of signature composition from the two leaf seeds.

    Each round combines every ordered pair of known states under both
    operations; the witness kept for a state is the first expression found.
    """
    reach: dict[SignatureState, Expr] = dict(SEEDS)
    rounds = 0
    while True:
        rounds += 1
        known = sorted(reach, key=SignatureState.sort_key)
        fresh: dict[SignatureState, Expr] = {}
        for s1, s2 in itertools.product(known, repeat=2):
            for op in OPS:
                s = combine(op, s1, s2)
                if s is not None and s not in reach and s not in fresh:
                    fresh[s] = Node(op, reach[s1], reach[s2])
        if not fresh:
            break
        reach.update(fresh)
    hits: dict[tuple[int, int], list[SignatureState]] = {}
    for s in sorted(reach, key=SignatureState.sort_key):
        if s.constant is not None:
            hits.setdefault(s.parities, []).append(s)
    return ClosureReport(reach, rounds, hits)


# -- size-bounded enumeration ------------------------------------------------


@dataclass
class ConstantSearch:
    max_ops: int
    reachable_by_ops: dict[int, int]
    witnesses: list[Expr]
    all_constant_witnesses: dict[tuple[int, int], list[Expr]]
    signatures: set[SignatureState]
    levels: list[set[SignatureState]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "question": "constant-valued typed expression with x odd, y even",
            "max_ops": self.max_ops,
            "reachable_signatures_by_ops": {str(k): v for k, v in sorted(self.reachable_by_ops.items())},
            "reachable_signatures_total": len(self.signatures),
            "witnesses": [str(e) for e in self.witnesses],
            "constant_witnesses_by_parity": {
                _parity_name(p): [str(e) for e in es] for p, es in sorted(self.all_constant_witnesses.items())
            },
            "answer": "NONE" if not self.witnesses else "FOUND",
        }


def enumerate_constant_exprs(max_ops: int) -> ConstantSearch:
    """All signatures of expressions with at most ``max_ops`` operations.

    level[k] maps each signature realisable with exactly k operations to a
    back-pointer (op, left signature and size, right signature and size), from
    which a witness expression is rebuilt for every constant hit.
    """
    if not 0 <= max_ops <= MAX_OPS_GUARD:
        raise ValueError(f"max_ops must lie in [0, {MAX_OPS_GUARD}]")
    level: list[dict[SignatureState, tuple | None]] = [{s: None for s in SEEDS}]
    for k in range(1, max_ops + 1):
        cur: dict[SignatureState, tuple] = {}
        for i in range(k):
            j = k - 1 - i
            for s1 in sorted(level[i], key=SignatureState.sort_key):
                for s2 in sorted(level[j], key=SignatureState.sort_key):
                    for op in OPS:
                        s = combine(op, s1, s2)
                        if s is not None and s not in cur:
                            cur[s] = (op, s1, i, s2, j)
        level.append(cur)

    def rebuild(s: SignatureState, k: int) -> Expr:
        ptr = level[k][s]
        if ptr is None:
            return SEEDS[s]
        op, s1, i, s2, j = ptr
        return Node(op, rebuild(s1, i), rebuild(s2, j))

    const: dict[tuple[int, int], list[Expr]] = {}
    seen: set[SignatureState] = set()
    for k, lv in enumerate(level):
        for s in sorted(lv, key=SignatureState.sort_key):
            if s.constant is not None and s not in seen:
                const.setdefault(s.parities, []).append(rebuild(s, k))
            seen.add(s)
    return ConstantSearch(
        max_ops,
        {k: len(lv) for k, lv in enumerate(level)},
        const.get(QUESTION_CLASS, []),
        const,
        seen,
        [set(lv) for lv in level],
    )


# -- independent route: concrete trees ---------------------------------------


def evaluate_mod2(e: Expr, x: int, y: int) -> int:
    if isinstance(e, Leaf):
        return x if e.name == "x" else y
    a = evaluate_mod2(e.left, x, y)
    b = evaluate_mod2(e.right, x, y)
    return (a + b) % 2 if e.op is OpKind.ADD else (a * b) % 2


def signature_of(e: Expr) -> SignatureState | None:
    """Signature computed from the tree itself; None if ill-typed."""
    t = type_of(e)
    if t is None:
        return None
    table = 0
    for x in (0, 1):
        for y in (0, 1):
            table |= evaluate_mod2(e, x, y) << (2 * x + y)
    names = [leaf.name for leaf in leaves(e)]
    return SignatureState(t, table, (names.count("x") % 2, names.count("y") % 2))


def brute_force_signatures(max_ops: int) -> dict[int, set[SignatureState]]:
    """Signatures of every concrete tree, by exact operation count.

    Builds all trees (not only well-typed ones) and filters with the type
    checker, so it shares no composition logic with the closure.
    """
    if max_ops > 6:
        raise ValueError("concrete enumeration is limited to 6 operations")
    trees: list[list[Expr]] = [[X_LEAF, Y_LEAF]]
    for k in range(1, max_ops + 1):
        cur = []
        for i in range(k):
            for left in trees[i]:
                for right in trees[k - 1 - i]:
                    for op in OPS:
                        cur.append(Node(op, left, right))
        trees.append(cur)
    out = {}
    for k, ts in enumerate(trees):
        sigs = {signature_of(e) for e in ts}
        sigs.discard(None)
        out[k] = sigs
    return out
