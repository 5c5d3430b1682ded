from __future__ import annotations

from fractions import Fraction

_JSON_NUM = (int, float)


def fmt(q: Fraction | int) -> str:
    """Render a rational as ``"p/q"`` (denominator always present)."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse(text: str | int | Fraction) -> Fraction:
    """Inverse of :func:`fmt`; also accepts plain integers."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"expected a 'p/q' string, got {text!r}")
    num, sep, den = text.strip().partition("/")
    try:
        return Fraction(int(num), int(den) if sep else 1)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"malformed rational {text!r}") from None
