"""Algebraic attacks on an encrypted ALU, judged by the owner's codebook.

Attacker procedures see only a :class:`BlackBoxALU` (the public table lookup
and equality of cipher values).  The codebook is used by the judge alone, to
decide whether a procedure's claim holds on every admissible observation.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .core import AbcType, Codebook, OpKind, SchemeKind, result_type
from .forge import FillKind, FillPolicy, Layout, build_codebook, build_tables


class AttackKind(enum.Enum):
    DOUBLING = "doubling"
    SELF_SUB = "self_sub"
    SELF_DIV = "self_div"
    LAGRANGE = "lagrange"
    AB_DEFEAT = "ab_defeat"

    @property
    def target(self) -> int:
        return 0 if self in (AttackKind.DOUBLING, AttackKind.SELF_SUB) else 1


class Verdict(enum.Enum):
    RELIABLE = "RELIABLE"
    UNRELIABLE = "UNRELIABLE"
    NO_CLAIM = "NO_CLAIM"


class AttackError(ValueError):
    pass


class BlackBoxALU:
    """The public face of a table set, recording every call."""

    def __init__(self, ts):
        self._lookup = ts.lookup
        self.transcript: list[tuple[OpKind, tuple[int, int], int]] = []

    def __call__(self, op: OpKind, c1: int, c2: int) -> int:
        r = self._lookup(op, c1, c2)
        self.transcript.append((op, (c1, c2), r))
        return r


# -- attacker procedures: no codebook in sight ------------------------------


def doubling(alu: BlackBoxALU, c: int) -> int | None:
    """Double until a value repeats; claim it only if it is a fixed point."""
    seen = {c}
    cur = c
    while True:
        nxt = alu(OpKind.ADD, cur, cur)
        if nxt in seen:
            return cur if nxt == cur else None
        seen.add(nxt)
        cur = nxt


def self_sub(alu: BlackBoxALU, c: int) -> int:
    return alu(OpKind.SUB, c, c)


def self_div(alu: BlackBoxALU, c: int) -> int:
    return alu(OpKind.DIV, c, c)


def lagrange(alu: BlackBoxALU, c: int, squarings: int) -> int:
    for _ in range(squarings):
        c = alu(OpKind.MUL, c, c)
    return c


def ab_defeat(alu: BlackBoxALU, pair: tuple[int, int]) -> tuple[int, int]:
    """Quotients of the two commuted products, in both orders."""
    c1, c2 = pair
    forward = alu(OpKind.MUL, c1, c2)
    backward = alu(OpKind.MUL, c2, c1)
    return alu(OpKind.DIV, forward, backward), alu(OpKind.DIV, backward, forward)


# -- judging -----------------------------------------------------------------


@dataclass
class AttackOutcome:
    kind: AttackKind
    transcript: list
    claimed: int | tuple[int, int] | None
    verdict: Verdict
    witness: object = None
    starts: int = 0
    hits: int = 0
    misses: int = 0
    no_claims: int = 0
    decrypted: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "verdict": self.verdict.value,
            "starts": self.starts,
            "hits": self.hits,
            "misses": self.misses,
            "no_claims": self.no_claims,
            "witness": self.witness,
            "claimed": self.claimed,
        }


def _log2_exact(n: int) -> int | None:
    return n.bit_length() - 1 if n > 0 and n & (n - 1) == 0 else None


def admissible_starts(cb: Codebook, kind: AttackKind) -> list:
    """Observations an attack may start from, as the owner would enumerate them."""
    n = cb.modulus
    invertible = [x for x in range(n) if math.gcd(x, n) == 1]
    if kind in (AttackKind.DOUBLING, AttackKind.SELF_SUB):
        return [c for t in cb.classes for c in cb.maps[t]]
    if kind in (AttackKind.SELF_DIV, AttackKind.LAGRANGE):
        return [cb.maps[t][x] for t in cb.classes for x in invertible]
    pairs = []
    for t1 in cb.classes:
        for t2 in cb.classes:
            if t1 is t2 or result_type(cb.scheme, t1, t2) is None:
                continue
            for x in invertible:
                for y in invertible:
                    pairs.append((cb.maps[t1][x], cb.maps[t2][y]))
    return pairs


def check_applicable(cb: Codebook, kind: AttackKind) -> None:
    if kind is AttackKind.LAGRANGE:
        w = _log2_exact(cb.modulus)
        if w is None or w < 3:
            raise AttackError(f"lagrange attack needs modulus 2^w with w >= 3, got {cb.modulus}")
    if kind is AttackKind.AB_DEFEAT and cb.scheme is SchemeKind.PLAIN:
        raise AttackError("ab_defeat needs an observed cross-type pair (scheme ab or abc)")


def applicable(cb: Codebook, kind: AttackKind) -> bool:
    try:
        check_applicable(cb, kind)
    except AttackError:
        return False
    return True


def _procedure(cb: Codebook, kind: AttackKind) -> Callable:
    if kind is AttackKind.DOUBLING:
        return doubling
    if kind is AttackKind.SELF_SUB:
        return self_sub
    if kind is AttackKind.SELF_DIV:
        return self_div
    if kind is AttackKind.LAGRANGE:
        w = _log2_exact(cb.modulus)
        return lambda alu, c: lagrange(alu, c, w - 1)
    return ab_defeat


def _hits(cb: Codebook, claim: int, target: int) -> bool:
    d = cb.decrypt(claim)
    return d is not AbcType.X and d[0] == target


def _judge(ts, cb: Codebook, kind: AttackKind, starts: Sequence) -> AttackOutcome:
    proc = _procedure(cb, kind)
    target = kind.target
    outcome = AttackOutcome(kind, [], None, Verdict.NO_CLAIM, starts=len(starts))
    for i, start in enumerate(starts):
        alu = BlackBoxALU(ts)
        claim = proc(alu, start)
        if i == 0:
            outcome.transcript = list(alu.transcript)
            outcome.claimed = claim
        if claim is None:
            outcome.no_claims += 1
            ok = False
        elif kind is AttackKind.AB_DEFEAT:
            ok = all(_hits(cb, c, target) for c in claim)
            if i == 0:
                outcome.decrypted = [cb.decrypt(c) for c in claim]
        else:
            ok = _hits(cb, claim, target)
            if i == 0:
                outcome.decrypted = [cb.decrypt(claim)]
        if ok:
            outcome.hits += 1
        else:
            if claim is not None:
                outcome.misses += 1
            if outcome.witness is None:
                outcome.witness = list(start) if isinstance(start, tuple) else start
    if not starts:
        outcome.verdict = Verdict.NO_CLAIM
    elif outcome.hits == len(starts):
        outcome.verdict = Verdict.RELIABLE
    else:
        outcome.verdict = Verdict.UNRELIABLE
    return outcome


def run_attack(ts, cb: Codebook, kind: AttackKind) -> AttackOutcome:
    """Run ``kind`` from every admissible observation.

    RELIABLE means every start produced a claim decoding to the target
    constant (in any class); a start with a wrong claim or no claim at all is
    a witness of UNRELIABLE.  NO_CLAIM is left for the case with nothing to
    start from.
    """
    check_applicable(cb, kind)
    return _judge(ts, cb, kind, admissible_starts(cb, kind))


def run_ab_defeat(ts, cb: Codebook, observed_pair: tuple[int, int]) -> AttackOutcome:
    """Commuted-product quotient attack, transcript taken from ``observed_pair``."""
    check_applicable(cb, AttackKind.AB_DEFEAT)
    starts = admissible_starts(cb, AttackKind.AB_DEFEAT)
    ordered = [tuple(observed_pair)] + [p for p in starts if p != tuple(observed_pair)]
    return _judge(ts, cb, AttackKind.AB_DEFEAT, ordered)


# -- the scheme x attack grid ------------------------------------------------

MATRIX_GUARD = 1 << 10
SCHEME_FILLS = {
    SchemeKind.PLAIN: FillKind.RAW_RANDOM,
    SchemeKind.AB: FillKind.SAFE_RANDOM,
    SchemeKind.ABC: FillKind.SAFE_RANDOM,
}


@dataclass
class AttackMatrix:
    modulus: int
    seeds: list[int]
    grid: dict[str, dict[str, list[str]]]

    def summary(self, scheme: str, kind: str) -> str:
        verdicts = self.grid[scheme][kind]
        if not verdicts:
            return "n/a"
        first = verdicts[0]
        return first if all(v == first for v in verdicts) else "MIXED"

    def to_dict(self) -> dict:
        return {
            "modulus": self.modulus,
            "seeds": list(self.seeds),
            "summary": {
                s: {k: self.summary(s, k) for k in self.grid[s]} for s in self.grid
            },
            "per_seed": self.grid,
        }


def _matrix_cell(n: int, scheme: SchemeKind, seed: int, kinds: Sequence[AttackKind]) -> dict[str, str]:
    cb = build_codebook(n, 0, scheme, seed=seed, layout=Layout.RANDOM)
    ts = build_tables(cb, FillPolicy(SCHEME_FILLS[scheme], seed))
    out = {}
    for kind in kinds:
        if applicable(cb, kind):
            out[kind.value] = run_attack(ts, cb, kind).verdict.value
    return out


def attack_matrix(
    n: int,
    seeds: Iterable[int],
    schemes: Sequence[SchemeKind] = (SchemeKind.PLAIN, SchemeKind.AB, SchemeKind.ABC),
    kinds: Sequence[AttackKind] = tuple(AttackKind),
    workers: int = 1,
) -> AttackMatrix:
    """Every applicable attack against freshly built tables of each scheme.

    PLAIN tables are raw-filled (their own constrained cells already close
    value pairs, so a safe fill is impossible); AB and ABC are safe-filled.
    """
    seeds = list(seeds)
    for scheme in schemes:
        if len(scheme.classes) * n > MATRIX_GUARD:
            raise AttackError(f"cipherspace for {scheme} exceeds the matrix guard {MATRIX_GUARD}")
    jobs = [(scheme, seed) for scheme in schemes for seed in seeds]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda j: _matrix_cell(n, j[0], j[1], kinds), jobs))
    else:
        results = [_matrix_cell(n, scheme, seed, kinds) for scheme, seed in jobs]
    grid: dict[str, dict[str, list[str]]] = {
        s.value: {k.value: [] for k in kinds} for s in schemes
    }
    for (scheme, _seed), cell in zip(jobs, results):
        for k in kinds:
            if k.value in cell:
                grid[scheme.value][k.value].append(cell[k.value])
    return AttackMatrix(n, seeds, grid)


def attack_table(ts, cb: Codebook, kinds: Sequence[AttackKind] = tuple(AttackKind)) -> dict[str, AttackOutcome | None]:
    """Outcomes of each kind against one table set; None where not applicable."""
    return {k.value: (run_attack(ts, cb, k) if applicable(cb, k) else None) for k in kinds}
