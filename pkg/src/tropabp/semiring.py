"""Exact arithmetic over the min-plus semirings R and R+.

Finite values are Python ints or ``fractions.Fraction`` (always exact).
The additive identity is the singleton :data:`INF`, which is its own type
rather than a float sentinel.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from typing import Union


class Infinity:
    """The tropical zero: identity for min, absorbing for +."""

    _instance: "Infinity | None" = None

    def __new__(cls) -> "Infinity":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"

    def __reduce__(self):
        return (Infinity, ())

    # Ordering: inf is above every finite value.
    def __lt__(self, other) -> bool:
        return False

    def __le__(self, other) -> bool:
        return other is self

    def __gt__(self, other) -> bool:
        return other is not self

    def __ge__(self, other) -> bool:
        return True

    def __hash__(self) -> int:
        return hash("tropabp.INF")


INF = Infinity()

Finite = Union[int, Fraction]
TropValue = Union[int, Fraction, Infinity]


class Mode(enum.Enum):
    """Semiring mode: ``R`` allows negative finite values, ``RPLUS`` does not."""

    R = "r"
    RPLUS = "rplus"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "Mode":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown semiring mode {text!r} (expected r or rplus)") from None


def normalize(v) -> TropValue:
    """Coerce ints, Fractions and INF into canonical TropValue form.

    Fractions with denominator 1 become ints so hot loops stay on int arithmetic.
    Floats are rejected except +inf, which maps to INF.
    """
    if v is INF:
        return INF
    if isinstance(v, bool):
        raise TypeError("booleans are not tropical values")
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else v
    if isinstance(v, float):
        if v == float("inf"):
            return INF
        raise TypeError("floating point values are not exact; pass an int, Fraction or INF")
    if isinstance(v, str):
        return parse_value(v)
    raise TypeError(f"not a tropical value: {v!r}")


def is_finite(v: TropValue) -> bool:
    return v is not INF


def check_value(v: TropValue, mode: Mode) -> None:
    if mode is Mode.RPLUS and v is not INF and v < 0:
        raise ValueError(f"negative value {format_value(v)} is not in R+")


def trop_add(a: TropValue, b: TropValue) -> TropValue:
    if a is INF:
        return b
    if b is INF:
        return a
    return a if a <= b else b


def trop_mul(a: TropValue, b: TropValue) -> TropValue:
    if a is INF or b is INF:
        return INF
    return a + b


def trop_pow(a: TropValue, d: int) -> TropValue:
    if d < 0:
        raise ValueError("exponent must be nonnegative")
    if d == 0:
        return 0
    if a is INF:
        return INF
    return a * d


def trop_sum(values) -> TropValue:
    out: TropValue = INF
    for v in values:
        out = trop_add(out, v)
    return out


def trop_prod(values) -> TropValue:
    out: TropValue = 0
    for v in values:
        if v is INF:
            return INF
        out = out + v
    return out


def parse_value(text: str) -> TropValue:
    s = text.strip()
    if s.lower() in ("inf", "+inf", "∞"):
        return INF
    try:
        if "/" in s:
            num, den = s.split("/", 1)
            return normalize(Fraction(int(num), int(den)))
        return int(s)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"malformed tropical value {text!r}") from None


def format_value(v: TropValue) -> str:
    if v is INF:
        return "inf"
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return str(v.numerator)
        return f"{v.numerator}/{v.denominator}"
    return str(v)
