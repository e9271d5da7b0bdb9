"""Extended reals R ∪ {-inf, +inf}, represented as plain Python floats.

Finite values are 64-bit floats; the two infinities are ``-math.inf`` and
``math.inf``.  NaN is never a valid value.
"""
from __future__ import annotations

import math
from typing import Iterable

NEG_INF = -math.inf
POS_INF = math.inf


def check(value: float) -> float:
    """Coerce to float and reject NaN."""
    value = float(value)
    if math.isnan(value):
        raise ValueError("NaN is not an extended real")
    return value


def add(a: float, b: float) -> float:
    # -inf + inf = -inf
    if a == NEG_INF or b == NEG_INF:
        return NEG_INF
    return a + b


def scale(w: float, a: float) -> float:
    """w * a for w >= 0, with 0 * (+-inf) = 0."""
    if w == 0.0:
        return 0.0
    return w * a


def ext_sum(values: Iterable[float]) -> float:
    total = 0.0
    for v in values:
        total = add(total, v)
    return total


def is_finite(a: float) -> bool:
    return math.isfinite(a)


def parse(token) -> float:
    """Read an extended real from a number or one of "inf"/"neginf"."""
    if isinstance(token, str):
        t = token.strip().lower()
        if t in ("inf", "+inf", "infinity"):
            return POS_INF
        if t in ("neginf", "-inf", "-infinity"):
            return NEG_INF
        raise ValueError(f"not an extended real: {token!r}")
    if isinstance(token, bool):
        raise ValueError(f"not an extended real: {token!r}")
    return check(token)


def dump(a: float):
    """Inverse of :func:`parse` (JSON has no infinities)."""
    if a == POS_INF:
        return "inf"
    if a == NEG_INF:
        return "neginf"
    return a


def fmt(a: float, digits: int = 6) -> str:
    if a == POS_INF:
        return "inf"
    if a == NEG_INF:
        return "-inf"
    text = f"{a:.{digits}f}"
    # values that round to zero print without a sign
    return text[1:] if text.startswith("-") and float(text) == 0.0 else text
