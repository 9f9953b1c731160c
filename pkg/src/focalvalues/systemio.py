"""System file format and the bundled reference example.

A system file is JSON with a leading format-version field:

    {
      "format": "focal-system/1",
      "p": 29,                     # omit for exact rational mode
      "q2": [3, 8, 5],             # x^2, x*y, y^2
      "q3": [3, 25, 20, 18],       # x^3, x^2*y, x*y^2, y^3
      "p2": [27, 9, 22],
      "p3": [11, 20, 4, 3],
      "meta": {"comment": "..."}   # optional, ignored by the tools
    }

Sign convention, the one interoperability trap: the p-arrays are the
coefficients inside  ydot = -(x + p(x,y)),  i.e. they are written with
the leading minus already factored out.  The bundled reference system
above is the canonical sample: its q2 really means
xdot = y + 3x^2 + 8xy + 5y^2 + ...  and its p2 means
ydot = -(x + 27x^2 + 9xy + 22y^2 + ...).

In rational mode coefficients may be integers or exact fraction strings
like "3/7"; decimals are rejected.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Optional, Union

from .engine import PolySystem
from .rings import PrimeField, RationalField

__all__ = [
    "SYSTEM_FORMAT",
    "REFERENCE_P",
    "REFERENCE_COEFFS",
    "SystemFileError",
    "parse_system",
    "format_system",
    "load_system",
    "save_system",
    "build_system",
    "reference_system",
]

SYSTEM_FORMAT = "focal-system/1"

# The cubic system with eleven vanishing focal values mod 29, in
# canonical coefficient order (q20..q03, p20..p03).
REFERENCE_P = 29
REFERENCE_COEFFS = (3, 8, 5, 3, 25, 20, 18, 27, 9, 22, 11, 20, 4, 3)

_ARRAYS = (("q2", 3), ("q3", 4), ("p2", 3), ("p3", 4))

Coefficient = Union[int, Fraction]


class SystemFileError(ValueError):
    """Malformed system file; the message names the offending field."""


def _parse_value(raw, field: str, p: Optional[int]) -> Coefficient:
    if isinstance(raw, bool):
        raise SystemFileError(f"{field}: booleans are not coefficients")
    if isinstance(raw, int):
        if p is not None and not 0 <= raw < p:
            raise SystemFileError(f"{field}: residue {raw} outside [0, {p})")
        return raw if p is not None else Fraction(raw)
    if isinstance(raw, str) and p is None:
        try:
            return Fraction(raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise SystemFileError(f"{field}: {raw!r} is not an exact fraction") from exc
    raise SystemFileError(
        f"{field}: expected {'a residue' if p is not None else 'an integer or fraction string'},"
        f" got {raw!r}"
    )


def parse_system(text: str) -> tuple[Optional[int], list[Coefficient]]:
    """Parse a system file; returns (p or None, 14 coefficients)."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SystemFileError(f"not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise SystemFileError("top level must be an object")
    fmt = obj.get("format")
    if fmt != SYSTEM_FORMAT:
        raise SystemFileError(f"format: expected {SYSTEM_FORMAT!r}, got {fmt!r}")
    p = obj.get("p")
    if p is not None:
        if not isinstance(p, int) or p < 2:
            raise SystemFileError(f"p: expected a prime integer, got {p!r}")
        try:
            PrimeField(p)  # validates primality and range
        except ValueError as exc:
            raise SystemFileError(f"p: {exc}") from exc
    coeffs: list[Coefficient] = []
    for name, length in _ARRAYS:
        arr = obj.get(name)
        if not isinstance(arr, list) or len(arr) != length:
            raise SystemFileError(f"{name}: expected an array of {length} coefficients")
        for i, raw in enumerate(arr):
            coeffs.append(_parse_value(raw, f"{name}[{i}]", p))
    known = {"format", "p", "meta"} | {name for name, _ in _ARRAYS}
    for key in obj:
        if key not in known:
            raise SystemFileError(f"{key}: unknown field")
    return p, coeffs


def format_system(p: Optional[int], coeffs, meta: Optional[dict] = None) -> str:
    """Serialize to the canonical file text (round-trips exactly)."""
    coeffs = list(coeffs)
    if len(coeffs) != 14:
        raise ValueError(f"expected 14 coefficients, got {len(coeffs)}")

    def encode(v) -> Union[int, str]:
        if p is not None:
            return int(v) % p
        f = Fraction(v)
        return int(f) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"

    obj: dict = {"format": SYSTEM_FORMAT}
    if p is not None:
        obj["p"] = p
    at = 0
    for name, length in _ARRAYS:
        obj[name] = [encode(v) for v in coeffs[at:at + length]]
        at += length
    if meta:
        obj["meta"] = meta
    return json.dumps(obj, indent=2) + "\n"


def load_system(path: str) -> tuple[Optional[int], list[Coefficient]]:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise SystemFileError(f"cannot read {path}: {exc}") from exc
    return parse_system(text)


def save_system(path: str, p: Optional[int], coeffs, meta: Optional[dict] = None):
    with open(path, "w") as fh:
        fh.write(format_system(p, coeffs, meta))


def build_system(p: Optional[int], coeffs) -> PolySystem:
    """Instantiate over F_p (p given) or over Q (p None)."""
    if p is not None:
        return PolySystem.cubic(PrimeField(p), [int(c) for c in coeffs])
    ring = RationalField()
    return PolySystem.from_coefficients(ring, [Fraction(c) for c in coeffs])


def reference_system() -> PolySystem:
    """The bundled cubic system whose first eleven focal values vanish
    mod 29 while s_12 does not."""
    return build_system(REFERENCE_P, REFERENCE_COEFFS)
