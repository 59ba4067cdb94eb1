"""Command line entry point: ``abctables <command> ...``.

Exit codes: 0 pass, 1 property failure, 2 usage error, 3 guard exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import tablefile
from .abc_typing import MAX_REARRANGE_LEAVES, ParseError, parse, quaternion_of, type_of, verify_rearrangement_lemma
from .alu import IllTyped, Unbound, check_homomorphism, decrypt_result, eval_cipher, eval_expr
from .attacks import AttackError, AttackKind, attack_matrix, attack_table, run_ab_defeat
from .closure import MAX_OPS_GUARD, enumerate_constant_exprs, signature_closure
from .core import ALL_OPS, CodebookError, OpKind, SchemeKind, TableError, constrained_mask
from .embeddings import (
    CandidateEmbedding,
    SearchGuardError,
    candidate_count,
    enumerate_candidates,
    max_compatible_set,
    search_overlapping_pairs,
)
from .forge import (
    MAX_MATERIALIZED,
    FillError,
    FillKind,
    FillPolicy,
    Layout,
    build_codebook,
    build_dual,
    build_keyed,
    build_tables,
    check_no_accidental_pairs,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3


class UsageError(Exception):
    pass


class GuardError(Exception):
    pass


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read(path: str) -> tablefile.TableFile:
    try:
        return tablefile.read(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except tablefile.FormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _tables(tf: tablefile.TableFile, path: str):
    if tf.tables is None:
        raise UsageError(f"{path} holds a codebook but no tables")
    return tf.tables


# -- build -------------------------------------------------------------------


def cmd_build(args) -> int:
    n, m = args.modulus, args.padding
    scheme = SchemeKind(args.scheme)
    if args.keyed:
        if scheme is not SchemeKind.ABC or (m not in (None, n)):
            raise UsageError("--keyed builds ABC tables with padding equal to the modulus")
        if args.dual is not None:
            raise UsageError("--keyed and --dual are exclusive")
        if 4 * n > MAX_MATERIALIZED:
            raise GuardError(f"keyed cipherspace {4 * n} exceeds the file guard {MAX_MATERIALIZED}")
        keyed = build_keyed(n, args.seed)
        ts, cb, secondary = keyed.materialize(), keyed.codebook, None
    else:
        m = 0 if m is None else m
        size = len(scheme.classes) * n + m
        if size > MAX_MATERIALIZED:
            raise GuardError(f"cipherspace {size} exceeds the materialization guard {MAX_MATERIALIZED}")
        try:
            cb = build_codebook(n, m, scheme, seed=args.seed, layout=Layout(args.layout))
        except (ValueError, CodebookError) as exc:
            raise UsageError(str(exc)) from None
        secondary = None
        if args.dual is not None:
            if scheme is not SchemeKind.ABC or m:
                raise UsageError("--dual needs an unpadded ABC scheme")
            try:
                ts, secondary = build_dual(cb, args.dual, args.seed)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
        else:
            kind = FillKind.SAFE_RANDOM if args.fill == "safe" else FillKind.RAW_RANDOM
            try:
                ts = build_tables(cb, FillPolicy(kind, args.seed))
            except FillError as exc:
                _err(f"build failed: {exc}")
                return EXIT_FAIL
    tablefile.write(args.output, tablefile.serialize(ts, cb, redact=args.redact))
    if args.secondary_out:
        if secondary is None:
            raise UsageError("--secondary-out needs --dual")
        tablefile.write(args.secondary_out, tablefile.serialize_codebook(secondary))
    if args.figures:
        from .plotting import table_heatmaps

        table_heatmaps(ts, args.figures, cb)
    print(f"wrote {args.output} (S={ts.size}, fill {ts.provenance.get('fill')}, seed {ts.provenance.get('seed')})")
    return EXIT_OK


# -- check -------------------------------------------------------------------


def cmd_check(args) -> int:
    tf = _read(args.file)
    ts = _tables(tf, args.file)
    books = [tf.codebook] if tf.codebook is not None else []
    if args.codebook:
        extra = _read(args.codebook)
        if extra.codebook is None:
            raise UsageError(f"{args.codebook} holds no codebook")
        books.append(extra.codebook)
    report: dict = {"file": args.file, "size": ts.size, "codebooks": len(books)}
    failures: list[str] = []
    for i, cb in enumerate(books):
        if cb.size != ts.size or cb.origin != ts.origin:
            raise UsageError("codebook and tables disagree on the cipherspace")
        hom = check_homomorphism(ts, cb)
        report[f"homomorphism_{i}"] = {"checked": hom.checked, "violations": len(hom.violations)}
        for v in hom.violations[:10]:
            failures.append(
                f"codebook {i}: {v.op.value}({v.c1},{v.c2}) = {v.found}, homomorphism needs {v.expected}"
            )
    offenders = check_no_accidental_pairs(ts)
    report["accidental_pairs"] = [[o.op.value, o.x, o.y] for o in offenders]
    for o in offenders[:10]:
        failures.append(f"accidental pair under {o.op.value}: {{{o.x}, {o.y}}} is closed")
    if not books:
        report["note"] = "no codebook: structural and accidental-pair checks only"
    report["ok"] = not failures and not offenders and all(
        report[f"homomorphism_{i}"]["violations"] == 0 for i in range(len(books))
    )
    for line in failures:
        _err(line)
    if args.json:
        _emit(report)
    else:
        print("PASS" if report["ok"] else "FAIL")
    return EXIT_OK if report["ok"] else EXIT_FAIL


# -- eval / typecheck ----------------------------------------------------------


def _bindings(text: str) -> dict[str, int]:
    env = {}
    for part in filter(None, text.split(",")):
        name, sep, value = part.partition("=")
        if not sep:
            raise UsageError(f"binding {part!r} is not NAME=VALUE")
        try:
            env[name.strip()] = int(value)
        except ValueError:
            raise UsageError(f"binding {part!r} needs an integer value") from None
    return env


def _parse_expr(text: str):
    try:
        return parse(text)
    except ParseError as exc:
        raise UsageError(f"cannot parse expression: {exc}") from None


def cmd_eval(args) -> int:
    tf = _read(args.file)
    ts = _tables(tf, args.file)
    e = _parse_expr(args.expr)
    env = _bindings(args.bind)
    try:
        if args.cipher:
            result = eval_cipher(ts, env, e)
        else:
            if tf.codebook is None:
                raise UsageError("redacted file: bind cipher values with --cipher")
            result = eval_expr(ts, tf.codebook, env, e)
    except Unbound as exc:
        raise UsageError(f"unbound variable {exc.args[0]}") from None
    except IllTyped as exc:
        _err(f"ILL_TYPED: {exc}")
        return EXIT_FAIL
    except (TableError, CodebookError) as exc:
        raise UsageError(str(exc)) from None
    print(f"cipher {result}")
    if tf.codebook is not None:
        print(f"decrypts {decrypt_result(tf.codebook, result)}")
    return EXIT_OK


def cmd_typecheck(args) -> int:
    e = _parse_expr(args.expr)
    t = type_of(e)
    q = quaternion_of(e)
    if args.json:
        _emit({"expr": str(e), "type": t.value if t else "ILL_TYPED", "quaternion": str(q)})
    else:
        print(f"type {t.value if t else 'ILL_TYPED'}")
        print(f"quaternion {q}")
    return EXIT_OK if t is not None else EXIT_FAIL


# -- attack ------------------------------------------------------------------


def _pair(text: str) -> tuple[int, int]:
    try:
        a, b = (int(v) for v in text.split(","))
    except ValueError:
        raise UsageError("--observed takes C1,C2") from None
    return a, b


def cmd_attack(args) -> int:
    kinds = tuple(AttackKind) if args.suite == "all" else (AttackKind(args.suite),)
    if args.file is None:
        if args.modulus is None:
            raise UsageError("attack needs a table file or --modulus for the scheme grid")
        schemes = tuple(SchemeKind(s) for s in args.schemes.split(","))
        try:
            matrix = attack_matrix(args.modulus, range(args.seeds), schemes, kinds, workers=args.workers)
        except AttackError as exc:
            raise GuardError(str(exc)) from None
        payload = matrix.to_dict()
        summary = payload["summary"]
        if args.figures:
            from .plotting import attack_grid

            attack_grid(summary, args.figures)
        if args.json:
            _emit(payload)
        else:
            print(f"modulus {args.modulus}, {len(matrix.seeds)} seeds")
            for s, row in summary.items():
                print(s + ": " + ", ".join(f"{k} {v}" for k, v in row.items()))
        return EXIT_OK

    tf = _read(args.file)
    ts = _tables(tf, args.file)
    if tf.codebook is None:
        raise UsageError("verdicts need the owner's codebook; this file is redacted")
    cb = tf.codebook
    outcomes = attack_table(ts, cb, kinds)
    if args.observed and AttackKind.AB_DEFEAT in kinds:
        try:
            outcomes[AttackKind.AB_DEFEAT.value] = run_ab_defeat(ts, cb, _pair(args.observed))
        except AttackError:
            pass
    payload = {
        "file": args.file,
        "scheme": cb.scheme.value,
        "modulus": cb.modulus,
        "attacks": {k: (o.to_dict() if o is not None else None) for k, o in outcomes.items()},
    }
    if args.figures:
        from .plotting import attack_grid

        attack_grid({cb.scheme.value: {k: (o.verdict.value if o else "n/a") for k, o in outcomes.items()}}, args.figures)
    if args.json:
        _emit(payload)
    else:
        for k, o in outcomes.items():
            print(f"{k} {o.verdict.value if o else 'n/a'}")
    return EXIT_OK


# -- search ------------------------------------------------------------------


def cmd_search_embeddings(args) -> int:
    n, size = args.modulus, args.size
    if size < 3 * n:
        raise UsageError("size must be at least 3n")
    ops = ALL_OPS if args.all_ops else (OpKind.ADD, OpKind.MUL)
    try:
        if args.pairs_overlap:
            report = search_overlapping_pairs(
                n, size, ops, method=args.method, workers=args.workers, max_hits=args.limit or 100
            )
            payload = report.to_dict()
            if not args.json:
                print(f"candidates {report.candidates}, pairs {report.pairs}, method {report.method}")
                print(f"compatible pairs {report.compatible_pairs} (same embedding {report.same_embedding_pairs})")
                print(f"overlapping compatible pairs: {report.overlapping_compatible_pairs} -> {report.answer}")
        elif args.max_clique:
            report = max_compatible_set(n, size, ops, time_budget=args.budget)
            payload = report.to_dict()
            if args.figures and report.witness:
                from .plotting import embedding_cells

                masks = []
                for roles in report.witness:
                    cb = CandidateEmbedding(roles, n, size, 0, ops).codebook
                    masks.append(constrained_mask(cb, OpKind.ADD))
                embedding_cells(masks, size, args.figures)
            if not args.json:
                print(f"max compatible set: {report.max_size} ({report.status}, {report.method})")
                for r in report.witness:
                    print("  " + " ".join(map(str, r)))
                print(f"overlapping pairs in witness: {len(report.overlapping_pairs_in_witness)}")
                print(f"largest pairwise overlapping set: {report.max_overlapping_size} ({report.overlapping_status})")
        else:
            total, mult = candidate_count(n, size, args.pin_first)
            cands = enumerate_candidates(n, size, limit=args.limit, pin_first=args.pin_first, ops=ops)
            payload = {
                "modulus": n,
                "size": size,
                "candidates": total,
                "multiplier": mult,
                "listed": [list(c.roles) for c in cands],
            }
            if not args.json:
                print(f"candidates {total} (multiplier {mult})")
                for c in cands:
                    print(" ".join(map(str, c.roles)))
    except SearchGuardError as exc:
        raise GuardError(str(exc)) from None
    if args.json:
        _emit(payload)
    return EXIT_OK


def cmd_search_expr(args) -> int:
    if args.max_ops is not None:
        if not 0 <= args.max_ops <= MAX_OPS_GUARD:
            raise GuardError(f"--max-ops must lie in [0, {MAX_OPS_GUARD}]")
        found = enumerate_constant_exprs(args.max_ops)
        payload = found.to_dict()
        if args.figures:
            from .plotting import closure_growth

            closure_growth(found.reachable_by_ops, args.figures)
        if args.json:
            _emit(payload)
        else:
            for k, c in sorted(found.reachable_by_ops.items()):
                print(f"ops {k}: {c} signatures")
            if found.witnesses:
                print(f"constant-valued typed expression: FOUND (x odd, y even) {found.witnesses[0]}")
            else:
                print("constant-valued typed expression: NONE (x odd, y even)")
        return EXIT_OK
    report = signature_closure()
    if args.json:
        _emit(report.to_dict())
    else:
        print(f"reachable signatures {len(report.reachable)} after {report.rounds} rounds")
        print(report.verdict_line())
    return EXIT_OK


def cmd_rearrange_check(args) -> int:
    if args.max_leaves > MAX_REARRANGE_LEAVES:
        raise GuardError(f"--max-leaves is limited to {MAX_REARRANGE_LEAVES}")
    report = verify_rearrangement_lemma(args.max_leaves, parity_relaxed=args.parity_relaxed)
    if args.json:
        _emit(report.to_dict())
    else:
        print(f"valid expressions {report.expressions}, rearrangement classes {report.classes}")
        print(f"counterexamples {len(report.counterexamples)}, quaternion failures {len(report.quaternion_failures)}")
        for a, b in report.counterexamples[:5]:
            print(f"  {a}  vs  {b}")
        print("PASS" if report.ok else "FAIL")
    return EXIT_OK if report.ok else EXIT_FAIL


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="abctables", description="ABC-typed encrypted arithmetic tables")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build a table file")
    b.add_argument("--modulus", type=int, required=True)
    b.add_argument("--padding", type=int, default=None)
    b.add_argument("--scheme", choices=[s.value for s in SchemeKind], default="abc")
    b.add_argument("--fill", choices=["safe", "raw"], default="safe")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--layout", choices=[layout.value for layout in Layout], default="random")
    b.add_argument("--dual", type=int, metavar="VARIANT")
    b.add_argument("--keyed", action="store_true")
    b.add_argument("--redact", action="store_true")
    b.add_argument("--secondary-out", metavar="FILE")
    b.add_argument("--figures", metavar="DIR")
    b.add_argument("-o", "--output", required=True)
    b.set_defaults(func=cmd_build)

    c = sub.add_parser("check", help="homomorphism and accidental-pair checks")
    c.add_argument("file")
    c.add_argument("--codebook", metavar="FILE2")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_check)

    e = sub.add_parser("eval", help="evaluate an expression through the tables")
    e.add_argument("file")
    e.add_argument("--expr", required=True)
    e.add_argument("--bind", default="")
    e.add_argument("--cipher", action="store_true", help="bindings are cipher values")
    e.set_defaults(func=cmd_eval)

    t = sub.add_parser("typecheck", help="ABC type and quaternion unit of an expression")
    t.add_argument("--expr", required=True)
    t.add_argument("--json", action="store_true")
    t.set_defaults(func=cmd_typecheck)

    a = sub.add_parser("attack", help="attack verdicts for a file, or the scheme grid")
    a.add_argument("file", nargs="?")
    a.add_argument("--suite", choices=["all"] + [k.value for k in AttackKind], default="all")
    a.add_argument("--observed", metavar="C1,C2")
    a.add_argument("--modulus", type=int)
    a.add_argument("--seeds", type=int, default=20)
    a.add_argument("--schemes", default="plain,ab,abc")
    a.add_argument("--workers", type=int, default=1)
    a.add_argument("--figures", metavar="DIR")
    a.add_argument("--json", action="store_true")
    a.set_defaults(func=cmd_attack)

    s = sub.add_parser("search", help="embedding and expression searches")
    ssub = s.add_subparsers(dest="target", required=True)
    se = ssub.add_parser("embeddings")
    se.add_argument("--modulus", type=int, required=True)
    se.add_argument("--size", type=int, required=True)
    mode = se.add_mutually_exclusive_group()
    mode.add_argument("--pairs-overlap", action="store_true")
    mode.add_argument("--max-clique", action="store_true")
    se.add_argument("--limit", type=int)
    se.add_argument("--workers", type=int, default=1)
    se.add_argument("--method", choices=["auto", "exhaustive", "orbit"], default="auto")
    se.add_argument("--budget", type=float, metavar="SECONDS")
    se.add_argument("--pin-first", action="store_true")
    se.add_argument("--all-ops", action="store_true")
    se.add_argument("--figures", metavar="DIR")
    se.add_argument("--json", action="store_true")
    se.set_defaults(func=cmd_search_embeddings)
    sx = ssub.add_parser("expr")
    g = sx.add_mutually_exclusive_group()
    g.add_argument("--closure", action="store_true")
    g.add_argument("--max-ops", type=int)
    sx.add_argument("--figures", metavar="DIR")
    sx.add_argument("--json", action="store_true")
    sx.set_defaults(func=cmd_search_expr)

    lm = sub.add_parser("rearrange-check", aliases=["lemma1"], help="rearrangement type-invariance check")
    lm.add_argument("--max-leaves", type=int, required=True)
    lm.add_argument("--parity-relaxed", action="store_true")
    lm.add_argument("--json", action="store_true")
    lm.set_defaults(func=cmd_rearrange_check)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        _err(f"error: {exc}")
        return EXIT_USAGE
    except GuardError as exc:
        _err(f"guard: {exc}")
        return EXIT_GUARD


if __name__ == "__main__":
    sys.exit(main())
