"""Text documents for arrays and JSON rendering for reports.

Array document grammar (one array per document)::

    document  := header NL [labels NL] row (NL row)* [NL]
    header    := KIND (SP key "=" int)+
    labels    := "COLS" (SP int "," int)+          # CACHING and DELIVERY only
    row       := token (SP token)*
    token     := "*" | "-" | int                   # "-" only in CACHING; int not in CACHING

    EPDA      keys K L F Z S
    CACHING   keys K1 K2 F Z
    DELIVERY  keys K1 K2 F R L S

Blank lines and lines starting with ``#`` are ignored when parsing. The
canonical printed form has single spaces and a trailing newline.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction

import numpy as np

from .arrays import NULL, STAR, CachingArray, DeliveryArray, Epda
from .errors import ArrayFormatError, StructureError

__all__ = ["print_array", "parse_array", "emit_report", "report_dict", "read_array",
           "write_array"]

_KEYS = {
    "EPDA": ("K", "L", "F", "Z", "S"),
    "CACHING": ("K1", "K2", "F", "Z"),
    "DELIVERY": ("K1", "K2", "F", "R", "L", "S"),
}
_INT = re.compile(r"[0-9]+\Z")


def _token(v: int) -> str:
    return "*" if v == STAR else "-" if v == NULL else str(int(v))


def print_array(a) -> str:
    """Canonical text document for an EPDA, caching array or delivery array."""
    if isinstance(a, Epda):
        head = f"EPDA K={a.k} L={a.l} F={a.f} Z={a.z} S={a.s}"
    elif isinstance(a, CachingArray):
        head = f"CACHING K1={a.k1} K2={a.k2} F={a.f} Z={a.z}"
    elif isinstance(a, DeliveryArray):
        head = f"DELIVERY K1={a.k1} K2={a.k2} F={a.f} R={a.r} L={a.l} S={a.s}"
    else:
        raise TypeError(f"cannot print {type(a).__name__}")
    lines = [head]
    if not isinstance(a, Epda):
        lines.append("COLS " + " ".join(f"{x},{y}" for x, y in a.cols))
    lines.extend(" ".join(_token(v) for v in row) for row in a.cells)
    return "\n".join(lines) + "\n"


def _lines(text):
    for n, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            yield n, line


def _tokens(line):
    for m in re.finditer(r"\S+", line):
        yield m.start() + 1, m.group()


def parse_array(text: str):
    """Parse a document back into its array type.

    Only the structure is checked; run the matching ``verify_*`` function
    for the defining conditions.
    """
    lines = list(_lines(text))
    if not lines:
        raise ArrayFormatError("empty document")
    n, head = lines[0]
    toks = list(_tokens(head))
    kind = toks[0][1]
    if kind not in _KEYS:
        raise ArrayFormatError(f"unknown kind tag {kind!r}", n, toks[0][0])
    params = {}
    for col, tok in toks[1:]:
        key, sep, val = tok.partition("=")
        if not sep or key not in _KEYS[kind] or not _INT.match(val):
            raise ArrayFormatError(f"bad header field {tok!r}", n, col)
        if key in params:
            raise ArrayFormatError(f"duplicate header field {key}", n, col)
        params[key] = int(val)
    missing = [k for k in _KEYS[kind] if k not in params]
    if missing:
        raise ArrayFormatError(f"header lacks {', '.join(missing)}", n, None)
    if params["F"] < 1:
        raise ArrayFormatError("F must be at least 1", n, None)

    body = lines[1:]
    labels = None
    if kind != "EPDA":
        if not body or not body[0][1].split() or body[0][1].split()[0] != "COLS":
            ln = body[0][0] if body else n
            raise ArrayFormatError("expected a COLS label line", ln, 1)
        ln, line = body[0]
        labels = []
        for col, tok in list(_tokens(line))[1:]:
            m = re.fullmatch(r"([0-9]+),([0-9]+)", tok)
            if not m:
                raise ArrayFormatError(f"bad column label {tok!r}", ln, col)
            labels.append((int(m.group(1)), int(m.group(2))))
        body = body[1:]
        width = params["K1"] * params["K2"]
        if len(labels) != width:
            raise ArrayFormatError(f"{len(labels)} column labels, expected {width}", ln, None)
    else:
        width = params["K"]

    if len(body) != params["F"]:
        ln = body[-1][0] if body else n
        raise ArrayFormatError(f"{len(body)} grid rows, header declares F={params['F']}", ln, None)
    allowed_null = kind == "CACHING"
    rows = []
    for ln, line in body:
        toks = list(_tokens(line))
        if len(toks) != width:
            raise ArrayFormatError(f"row has {len(toks)} tokens, expected {width}", ln, None)
        row = []
        for col, tok in toks:
            if tok == "*":
                row.append(STAR)
            elif tok == "-":
                if not allowed_null:
                    raise ArrayFormatError(f"'-' is not allowed in {kind} documents", ln, col)
                row.append(NULL)
            elif _INT.match(tok) and int(tok) > 0:
                if kind == "CACHING":
                    raise ArrayFormatError("integers are not allowed in CACHING documents",
                                           ln, col)
                row.append(int(tok))
            else:
                raise ArrayFormatError(f"bad token {tok!r}", ln, col)
        rows.append(row)

    cells = np.array(rows, dtype=np.int64)
    try:
        if kind == "EPDA":
            return Epda(params["K"], params["L"], params["F"], params["Z"], params["S"], cells)
        if kind == "CACHING":
            return CachingArray(params["K1"], params["K2"], params["Z"], cells, labels)
        return DeliveryArray(params["K1"], params["K2"], params["R"], params["L"], params["S"],
                             cells, labels)
    except ArrayFormatError:
        raise
    except StructureError as exc:
        raise ArrayFormatError(str(exc), n, None) from exc


def read_array(path):
    with open(path, encoding="utf-8") as fh:
        return parse_array(fh.read())


def write_array(a, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(print_array(a))


def _plain(x):
    if isinstance(x, bool) or x is None or isinstance(x, (str, int)):
        return x
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if x != x or x in (float("inf"), float("-inf")):
            return str(x)
        return float(format(x, ".12g"))
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if hasattr(x, "to_dict"):
        return _plain(x.to_dict())
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    raise TypeError(f"cannot render {type(x).__name__} in a report")


def report_dict(report) -> dict:
    """JSON-ready dict: Fractions become ``"p/q"``, floats keep 12 significant digits."""
    return _plain(report)


def emit_report(report) -> str:
    """Deterministic, key-sorted, compact JSON for any report object or dict."""
    return json.dumps(report_dict(report), sort_keys=True, separators=(",", ":"))

