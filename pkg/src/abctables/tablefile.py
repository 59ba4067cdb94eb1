"""Line-oriented text format for table sets and codebooks.

::

    ABCTBL 1
    modulus <n>
    padding <m>
    scheme <plain|ab|abc>
    origin <o>                  only when the first cipher value is not 0
    fill <description>          provenance, when known
    seed <s>                    provenance, when known
    codebook A <c0> ... <cn-1>  one line per coding class; omitted when redacted
    op add
    <S rows of S values>
    op sub / op mul / op div    likewise

A file with codebook lines and no op sections holds a codebook alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import ALL_OPS, AbcType, Codebook, SchemeKind, TableSet

MAGIC = "ABCTBL 1"


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


@dataclass
class TableFile:
    modulus: int
    padding: int
    scheme: SchemeKind
    origin: int = 0
    provenance: dict = field(default_factory=dict)
    codebook: Codebook | None = None
    tables: TableSet | None = None

    @property
    def size(self) -> int:
        return len(self.scheme.classes) * self.modulus + self.padding

    @property
    def redacted(self) -> bool:
        return self.codebook is None


def _header(modulus: int, padding: int, scheme: SchemeKind, origin: int, provenance: dict) -> list[str]:
    lines = [MAGIC, f"modulus {modulus}", f"padding {padding}", f"scheme {scheme.value}"]
    if origin:
        lines.append(f"origin {origin}")
    if "fill" in provenance:
        lines.append(f"fill {provenance['fill']}")
    if "seed" in provenance:
        lines.append(f"seed {int(provenance['seed'])}")
    return lines


def _codebook_lines(cb: Codebook) -> list[str]:
    return [f"codebook {t.value} " + " ".join(str(v) for v in cb.maps[t]) for t in cb.classes]


def serialize(
    ts: TableSet | None,
    cb: Codebook | None = None,
    redact: bool = False,
    *,
    modulus: int | None = None,
    scheme: SchemeKind | None = None,
) -> str:
    """Deterministic text for ``ts`` (and ``cb`` unless redacted).

    Without a codebook the header fields come from ``modulus`` and
    ``scheme``.  With ``ts`` None only the header and codebook are written.
    """
    if cb is not None:
        modulus, scheme, origin = cb.modulus, cb.scheme, cb.origin
        padding = cb.padding
        if ts is not None and (ts.size != cb.size or ts.origin != cb.origin):
            raise ValueError("codebook and tables disagree on the cipherspace")
    else:
        if modulus is None or scheme is None or ts is None:
            raise ValueError("without a codebook, tables plus modulus and scheme are required")
        origin = ts.origin
        padding = ts.size - len(scheme.classes) * modulus
        if padding < 0:
            raise ValueError("modulus and scheme do not fit the table size")
    if ts is not None and not getattr(ts, "materialized", True):
        raise ValueError("functional tables must be materialized before writing")
    provenance = dict(ts.provenance) if ts is not None else {}
    lines = _header(modulus, padding, scheme, origin, provenance)
    if cb is not None and not redact:
        lines += _codebook_lines(cb)
    if ts is not None:
        for op in ALL_OPS:
            lines.append(f"op {op.value}")
            for row in ts.tables[op].tolist():
                lines.append(" ".join(str(v) for v in row))
    return "\n".join(lines) + "\n"


def serialize_codebook(cb: Codebook) -> str:
    return "\n".join(_header(cb.modulus, cb.padding, cb.scheme, cb.origin, {}) + _codebook_lines(cb)) + "\n"


def _ints(text: str, lineno: int) -> list[int]:
    parts = text.split(" ")
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise FormatError(f"expected decimal integers, got {text!r}", lineno) from None
    if any(str(v) != p for v, p in zip(values, parts)):
        raise FormatError("integers must be written canonically", lineno)
    return values


def parse(text: str) -> TableFile:
    if not text.endswith("\n"):
        raise FormatError("file must end with a newline")
    lines = text[:-1].split("\n")
    pos = 0

    def take(prefix: str) -> str | None:
        nonlocal pos
        if pos < len(lines) and lines[pos].startswith(prefix + " "):
            value = lines[pos][len(prefix) + 1:]
            pos += 1
            return value
        return None

    def need(prefix: str) -> str:
        value = take(prefix)
        if value is None:
            raise FormatError(f"expected '{prefix} ...'", pos + 1)
        return value

    if not lines or lines[0] != MAGIC:
        raise FormatError(f"missing '{MAGIC}' header", 1)
    pos = 1
    modulus = _ints(need("modulus"), pos)[0]
    padding = _ints(need("padding"), pos)[0]
    scheme_name = need("scheme")
    try:
        scheme = SchemeKind(scheme_name)
    except ValueError:
        raise FormatError(f"unknown scheme {scheme_name!r}", pos) from None
    origin_text = take("origin")
    origin = _ints(origin_text, pos)[0] if origin_text is not None else 0
    if origin_text is not None and origin == 0:
        raise FormatError("origin 0 is written by omission", pos)
    provenance: dict = {}
    fill = take("fill")
    if fill is not None:
        provenance["fill"] = fill
    seed = take("seed")
    if seed is not None:
        provenance["seed"] = _ints(seed, pos)[0]
    if modulus < 1 or padding < 0:
        raise FormatError("modulus must be positive and padding non-negative")

    maps: dict[AbcType, tuple[int, ...]] = {}
    while pos < len(lines) and lines[pos].startswith("codebook "):
        parts = lines[pos].split(" ", 2)
        if len(parts) != 3 or parts[1] not in ("A", "B", "C"):
            raise FormatError("malformed codebook line", pos + 1)
        t = AbcType(parts[1])
        values = _ints(parts[2], pos + 1)
        if len(values) != modulus:
            raise FormatError(f"codebook {t.value} needs {modulus} values", pos + 1)
        maps[t] = tuple(values)
        pos += 1
    cb = None
    if maps:
        if tuple(maps) != scheme.classes:
            raise FormatError(f"codebook classes must be {' '.join(t.value for t in scheme.classes)} in order")
        try:
            cb = Codebook(modulus, padding, scheme, maps, origin=origin)
        except ValueError as exc:
            raise FormatError(f"invalid codebook: {exc}") from None

    size = len(scheme.classes) * modulus + padding
    ts = None
    if pos < len(lines):
        tables = {}
        for op in ALL_OPS:
            if pos >= len(lines) or lines[pos] != f"op {op.value}":
                raise FormatError(f"expected 'op {op.value}'", pos + 1)
            pos += 1
            if pos + size > len(lines):
                raise FormatError(f"{op.value} table is truncated", pos + 1)
            rows = []
            for _ in range(size):
                row = _ints(lines[pos], pos + 1)
                if len(row) != size:
                    raise FormatError(f"row needs {size} values", pos + 1)
                rows.append(row)
                pos += 1
            tables[op] = np.array(rows, dtype=np.int64)
        if pos != len(lines):
            raise FormatError("trailing content", pos + 1)
        try:
            ts = TableSet(size, tables, origin, provenance)
        except ValueError as exc:
            raise FormatError(str(exc)) from None
    elif cb is None:
        raise FormatError("file holds neither a codebook nor tables")
    return TableFile(modulus, padding, scheme, origin, provenance, cb, ts)


def read(path) -> TableFile:
    with open(path, encoding="ascii") as fh:
        return parse(fh.read())


def write(path, text: str) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)


def structural_check(tf: TableFile) -> list[str]:
    """Problems visible without a codebook (attacker view)."""
    problems = []
    if tf.tables is not None:
        if tf.tables.size != tf.size:
            problems.append("table size disagrees with the header")
    return problems
