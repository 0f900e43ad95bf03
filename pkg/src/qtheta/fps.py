"""Truncated formal power series in q with exact integer coefficients.

A :class:`Series` knows the first ``precision`` coefficients exactly and
nothing beyond.  Every operation propagates precision so that a result never
claims a coefficient its inputs could not determine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from . import kernels


class PrecisionError(ValueError):
    """A coefficient outside the known window was requested."""


class Series:
    """Immutable truncated power series ``sum(coeffs[k] * q**k)``, k < precision."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[int], precision: Optional[int] = None):
        coeffs = tuple(int(c) for c in coeffs)
        if precision is None:
            precision = len(coeffs)
        if precision < 1:
            raise ValueError(f"precision must be positive, got {precision}")
        if len(coeffs) != precision:
            raise ValueError(f"expected {precision} coefficients, got {len(coeffs)}")
        self._coeffs = coeffs

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self._coeffs

    @property
    def precision(self) -> int:
        return len(self._coeffs)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __getitem__(self, n: int) -> int:
        return coefficient(self, n)

    def __repr__(self) -> str:
        head = ", ".join(map(str, self._coeffs[:8]))
        more = ", ..." if self.precision > 8 else ""
        return f"Series([{head}{more}], precision={self.precision})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __add__(self, other: "Series") -> "Series":
        return add(self, other)

    def __sub__(self, other: "Series") -> "Series":
        return subtract(self, other)

    def __neg__(self) -> "Series":
        return monomial_scale(self, -1, 0)

    def __mul__(self, other: "Series") -> "Series":
        return mul(self, other)


def make_series(coeffs: Iterable[int], precision: int) -> Series:
    return Series(coeffs, precision)


def zero(precision: int) -> Series:
    return Series([0] * precision)


def one(precision: int) -> Series:
    return Series([1] + [0] * (precision - 1))


def truncate(a: Series, precision: int) -> Series:
    if precision > a.precision:
        raise PrecisionError(f"cannot extend precision {a.precision} to {precision}")
    return Series(a.coeffs[:precision])


def add(a: Series, b: Series) -> Series:
    p = min(a.precision, b.precision)
    return Series([x + y for x, y in zip(a.coeffs[:p], b.coeffs[:p])])


def subtract(a: Series, b: Series) -> Series:
    p = min(a.precision, b.precision)
    return Series([x - y for x, y in zip(a.coeffs[:p], b.coeffs[:p])])


def mul(a: Series, b: Series) -> Series:
    p = min(a.precision, b.precision)
    return Series(kernels.convolve(a.coeffs, b.coeffs, p))


def monomial_scale(a: Series, c: int, s: int) -> Series:
    """Return ``c * q**s * a``; the known window grows by ``s``."""
    if s < 0:
        raise ValueError("shift must be nonnegative")
    return Series([0] * s + [c * x for x in a.coeffs])


def substitute_power(a: Series, k: int) -> Series:
    """Replace q by q**k."""
    if k < 1:
        raise ValueError(f"power must be >= 1, got {k}")
    if k == 1:
        return a
    out = [0] * (k * (a.precision - 1) + 1)
    out[::k] = a.coeffs
    return Series(out)


def extract_progression(a: Series, m: int, r: int) -> Series:
    """Coefficients at exponents m*n + r, re-indexed by n."""
    if m < 1 or not 0 <= r < m:
        raise ValueError(f"need m >= 1 and 0 <= r < m, got m={m}, r={r}")
    if a.precision <= r:
        raise PrecisionError(f"precision {a.precision} leaves nothing in class {r} mod {m}")
    return Series(a.coeffs[r::m])


def coefficient(a: Series, n: int) -> int:
    if not 0 <= n < a.precision:
        raise PrecisionError(f"exponent {n} outside known window [0, {a.precision})")
    return a.coeffs[n]


@dataclass(frozen=True)
class Comparison:
    """Outcome of :func:`equal_to_order`; falsy when a mismatch was found."""

    equal: bool
    order: int
    exponent: Optional[int] = None
    left: Optional[int] = None
    right: Optional[int] = None

    def __bool__(self) -> bool:
        return self.equal


def equal_to_order(a: Series, b: Series, order: int) -> Comparison:
    if order < 1:
        raise ValueError("order must be positive")
    if order > a.precision or order > b.precision:
        raise PrecisionError(
            f"order {order} exceeds precision (left {a.precision}, right {b.precision})")
    ca, cb = a.coeffs, b.coeffs
    if ca[:order] == cb[:order]:
        return Comparison(True, order)
    k = next(i for i in range(order) if ca[i] != cb[i])
    return Comparison(False, order, k, ca[k], cb[k])
