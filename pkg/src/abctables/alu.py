"""Running a table set as an encrypted ALU."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .abc_typing import Expr, Leaf, type_of
from .core import (
    ALL_OPS,
    AbcType,
    Codebook,
    OpKind,
    as_codebook_list,
    constrained_cells,
)


class IllTyped(TypeError):
    pass


class Unbound(KeyError):
    pass


def apply(ts, op: OpKind, c1: int, c2: int) -> int:
    """Raw lookup; the ALU never refuses an operand pair."""
    return ts.lookup(op, c1, c2)


def eval_cipher(ts, env: Mapping[str, int], e: Expr) -> int:
    """Evaluate ``e`` with leaves bound directly to cipher values."""
    if isinstance(e, Leaf):
        if e.name not in env:
            raise Unbound(e.name)
        return int(env[e.name])
    return apply(ts, e.op, eval_cipher(ts, env, e.left), eval_cipher(ts, env, e.right))


def eval_expr(ts, cb: Codebook, env: Mapping[str, int], e: Expr) -> int:
    """Encrypt each leaf under its declared type and run the tree through the ALU."""
    if type_of(e) is None:
        raise IllTyped(f"{e} is not validly ABC-typed")

    def go(node: Expr) -> int:
        if isinstance(node, Leaf):
            if node.name not in env:
                raise Unbound(node.name)
            return cb.encrypt(int(env[node.name]) % cb.modulus, node.type)
        return apply(ts, node.op, go(node.left), go(node.right))

    return go(e)


@dataclass(frozen=True)
class Violation:
    op: OpKind
    c1: int
    c2: int
    expected: int
    found: int


@dataclass
class HomomorphismReport:
    checked: int = 0
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_homomorphism(
    ts,
    cbs: Codebook | Iterable[Codebook],
    ops: Iterable[OpKind] = ALL_OPS,
    sample: int | None = None,
    seed: int = 0,
) -> HomomorphismReport:
    """Compare every constrained cell of every codebook with the table.

    With ``sample`` set, only that many randomly chosen constrained cells per
    operation and codebook are checked (for functional tables too large to
    sweep).
    """
    report = HomomorphismReport()
    rng = np.random.default_rng(seed)
    for cb in as_codebook_list(cbs):
        for op in ops:
            rows, cols, vals = constrained_cells(cb, op)
            if sample is not None and sample < len(rows):
                pick = rng.integers(0, len(rows), size=sample)
                rows, cols, vals = rows[pick], cols[pick], vals[pick]
            found = np.asarray(ts.lookup_many(op, rows, cols))
            report.checked += len(rows)
            for i in np.flatnonzero(found != vals):
                report.violations.append(Violation(op, int(rows[i]), int(cols[i]), int(vals[i]), int(found[i])))
    return report


def decrypt_result(cb: Codebook, c: int) -> str:
    d = cb.decrypt(c)
    if d is AbcType.X:
        return "X"
    x, t = d
    return f"{x}:{t}"
