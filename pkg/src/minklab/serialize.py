"""JSON encoding of sets, with rational-string coordinates.

Set files look like::

    {"dim": 2, "rep": "points", "data": [["0", "0"], ["1/2", "1"]]}
    {"dim": 2, "rep": "boxes", "data": [{"lo": ["0", "0"], "hi": ["1", "2"]}]}
    {"dim": 1, "rep": "intervals", "data": [["0", "1/4"], ["3/4", "1"]]}

Decimal literals are rejected.
"""
from __future__ import annotations

import json

from .exact import Q, RationalParseError, fmt, parse_rational
from .geom import AxisBox, Interval
from .sets import BOXES, INTERVALS, POINTS, REPS, CompactSet


class SetFormatError(ValueError):
    pass


def set_to_dict(a: CompactSet) -> dict:
    if a.rep == POINTS:
        data = [[fmt(c) for c in p] for p in a.items]
    elif a.rep == BOXES:
        data = [{"lo": [fmt(c) for c in b.lo], "hi": [fmt(c) for c in b.hi]} for b in a.items]
    else:
        data = [[fmt(iv.lo), fmt(iv.hi)] for iv in a.items]
    d = {"dim": a.dim, "rep": a.rep, "data": data}
    if a.hull_volume is not None:
        d["hull_volume"] = fmt(a.hull_volume)
    return d


def _rat(v, where: str) -> Q:
    try:
        return parse_rational(v)
    except RationalParseError as exc:
        raise SetFormatError(f"{where}: {exc}") from None


def set_from_dict(d: dict) -> CompactSet:
    if not isinstance(d, dict):
        raise SetFormatError("set description must be a JSON object")
    for key in ("dim", "rep", "data"):
        if key not in d:
            raise SetFormatError(f"missing key {key!r}")
    dim, rep, data = d["dim"], d["rep"], d["data"]
    if not isinstance(dim, int) or dim < 1:
        raise SetFormatError("dim must be a positive integer")
    if rep not in REPS:
        raise SetFormatError(f"rep must be one of {', '.join(REPS)}")
    if not isinstance(data, list) or not data:
        raise SetFormatError("data must be a nonempty list")
    items = []
    for i, item in enumerate(data):
        where = f"data[{i}]"
        if rep == POINTS:
            if not isinstance(item, list) or len(item) != dim:
                raise SetFormatError(f"{where}: expected a list of {dim} coordinates")
            items.append(tuple(_rat(v, where) for v in item))
        elif rep == BOXES:
            if not isinstance(item, dict) or "lo" not in item or "hi" not in item:
                raise SetFormatError(f"{where}: expected {{'lo': [...], 'hi': [...]}}")
            lo = [_rat(v, where + ".lo") for v in item["lo"]]
            hi = [_rat(v, where + ".hi") for v in item["hi"]]
            if len(lo) != dim or len(hi) != dim:
                raise SetFormatError(f"{where}: corners must have {dim} coordinates")
            try:
                items.append(AxisBox(tuple(lo), tuple(hi)))
            except ValueError as exc:
                raise SetFormatError(f"{where}: {exc}") from None
        else:
            if dim != 1:
                raise SetFormatError("intervals require dim 1")
            if not isinstance(item, list) or len(item) != 2:
                raise SetFormatError(f"{where}: expected [lo, hi]")
            try:
                items.append(Interval(_rat(item[0], where), _rat(item[1], where)))
            except ValueError as exc:
                raise SetFormatError(f"{where}: {exc}") from None
    hv = d.get("hull_volume")
    return CompactSet(dim, rep, tuple(items), None if hv is None else _rat(hv, "hull_volume"))


class _FloatLiteral(Exception):
    def __init__(self, text):
        self.text = text


def _reject_float(text):
    raise _FloatLiteral(text)


def _line_of(text: str, needle: str) -> int:
    pos = text.find(needle)
    return text.count("\n", 0, pos) + 1 if pos >= 0 else 0


def loads_set(text: str) -> CompactSet:
    """Parse a set description; errors carry the offending line number."""
    try:
        d = json.loads(text, parse_float=_reject_float)
    except _FloatLiteral as exc:
        line = _line_of(text, exc.text)
        raise SetFormatError(f"line {line}: decimal literal {exc.text} rejected; "
                             f"write rationals as strings 'p/q'") from None
    except json.JSONDecodeError as exc:
        raise SetFormatError(f"line {exc.lineno}: malformed JSON: {exc.msg}") from None
    try:
        return set_from_dict(d)
    except SetFormatError as exc:
        msg = str(exc)
        bad = _bad_literal(text)
        if bad is not None:
            msg = f"line {_line_of(text, bad)}: {msg}"
        raise SetFormatError(msg) from None


def _bad_literal(text: str):
    """First quoted literal that is not a valid rational, if any."""
    import re

    for m in re.finditer(r'"([^"]*)"', text):
        s = m.group(1)
        if s in ("dim", "rep", "data", "lo", "hi", "hull_volume") or s in REPS:
            continue
        try:
            parse_rational(s)
        except RationalParseError:
            return m.group(0)
    return None


def dumps_set(a: CompactSet) -> str:
    return json.dumps(set_to_dict(a), indent=1) + "\n"


def dumps(obj) -> str:
    """Canonical JSON for reports and measure results."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
