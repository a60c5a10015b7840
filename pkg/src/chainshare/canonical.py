"""Exact-rational JSON parsing, number rendering and canonical serialization.

All sharing arithmetic in this package runs on ``fractions.Fraction``; floats
never enter the data model.  JSON numbers are read exactly (``parse_float``
hands us the literal source text) and written back canonically: object keys
sorted lexicographically, no insignificant whitespace, numbers without
trailing zeros.  Rationals with no finite decimal expansion are encoded as
``"numerator/denominator"`` strings so serialization never loses value.
"""

from __future__ import annotations

import hashlib
import json
import re
from fractions import Fraction
from typing import Any

__all__ = [
    "Rational",
    "canonical_bytes",
    "canonical_dumps",
    "coerce_rational",
    "loads_exact",
    "render_number",
    "sha256",
]

Rational = Fraction

_FRACTION_STRING = re.compile(r"^-?[0-9]+/[0-9]*[1-9][0-9]*$")


def loads_exact(text: str | bytes) -> Any:
    """Parse JSON with numeric literals mapped to exact values.

    Integers stay ``int``; decimal/exponent literals become ``Fraction``
    (``0.4`` parses to exactly 2/5, never to the nearest binary float).
    Raises ``json.JSONDecodeError`` on malformed input.
    """
    return json.loads(text, parse_float=Fraction)


def coerce_rational(value: Any) -> Fraction | None:
    """Coerce a parsed JSON value to a Fraction, or None if it is not one.

    Accepts exact JSON numbers (int/Fraction) and ``"a/b"`` fraction strings,
    the encoding :func:`render_number` falls back to for non-terminating
    rationals.  Plain decimal strings are rejected: a field that Listing-style
    descriptors carry as a number must be a number.
    """
    if isinstance(value, bool):
        return None
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str) and _FRACTION_STRING.match(value):
        return Fraction(value)
    return None


def render_number(value: Fraction | int) -> str | None:
    """Render a rational as a minimal JSON number token.

    Returns None when the value has no finite decimal expansion (denominator
    with prime factors other than 2 and 5); callers then encode it as an
    ``"a/b"`` string.
    """
    if isinstance(value, int):
        return str(value)
    num, den = value.numerator, value.denominator
    if den == 1:
        return str(num)
    twos = fives = 0
    d = den
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return None
    scale = max(twos, fives)
    digits = str(abs(num) * 10**scale // den).rjust(scale + 1, "0")
    whole, frac = digits[:-scale], digits[-scale:]
    sign = "-" if num < 0 else ""
    # scale is minimal, so the last fractional digit is nonzero
    return f"{sign}{whole}.{frac}"


def _emit(obj: Any, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, (int, Fraction)):
        token = render_number(obj)
        if token is None:
            out.append(f'"{obj.numerator}/{obj.denominator}"')
        else:
            out.append(token)
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        out.append("{")
        first = True
        for key in sorted(obj):
            if not isinstance(key, str):
                raise TypeError(f"canonical JSON object keys must be str, got {key!r}")
            if not first:
                out.append(",")
            first = False
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(":")
            _emit(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for index, item in enumerate(obj):
            if index:
                out.append(",")
            _emit(item, out)
        out.append("]")
    elif isinstance(obj, float):
        raise TypeError("floats are banned from canonical JSON; use Fraction")
    else:
        raise TypeError(f"cannot canonicalize {type(obj).__name__}")


def canonical_dumps(obj: Any) -> str:
    """Serialize to canonical JSON text: sorted keys, no whitespace, exact numbers."""
    out: list[str] = []
    _emit(obj, out)
    return "".join(out)


def canonical_bytes(obj: Any) -> bytes:
    """Canonical JSON as UTF-8 bytes; equal values give byte-identical output."""
    return canonical_dumps(obj).encode("utf-8")


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()
