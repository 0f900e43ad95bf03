"""Theta series, representation-count generating functions, and a brute-force oracle.

``N(a,b,c;n)`` counts integer triples with ``a*x**2 + b*y**2 + c*z**2 == n``;
``t(a,b,c;n)`` counts integer triples with
``a*x(x+1)/2 + b*y(y+1)/2 + c*z(z+1)/2 == n``; ``T`` is the same count over
nonnegative triples.  The oracle here never touches :mod:`qtheta.fps`, so it
can be used to cross-check the series engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt
from typing import Iterable

from .fps import Series, monomial_scale, mul, substitute_power, truncate

KINDS = ("N", "t", "T")


@dataclass(frozen=True, order=True)
class SeqSpec:
    kind: str
    form: tuple[int, int, int]

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        form = tuple(int(v) for v in self.form)
        if len(form) != 3 or min(form) < 1:
            raise ValueError(f"form must be three positive integers, got {self.form!r}")
        object.__setattr__(self, "form", form)

    def __str__(self) -> str:
        return f"{self.kind}({','.join(map(str, self.form))})"


@dataclass(frozen=True)
class FormConstant:
    form: tuple[int, int, int]
    value: int


def phi(order: int) -> Series:
    """1 + 2 * sum(q**(n*n)) for n >= 1."""
    if order < 1:
        raise ValueError("order must be positive")
    out = [0] * order
    out[0] = 1
    n = 1
    while n * n < order:
        out[n * n] = 2
        n += 1
    return Series(out)


def psi(order: int) -> Series:
    """sum(q**(n*(n+1)/2)) for n >= 0."""
    if order < 1:
        raise ValueError("order must be positive")
    out = [0] * order
    n = 0
    while n * (n + 1) // 2 < order:
        out[n * (n + 1) // 2] = 1
        n += 1
    return Series(out)


_BUILDERS = {"phi": phi, "psi": psi}


def theta(func: str, k: int, order: int) -> Series:
    """phi(q**k) or psi(q**k) to exactly ``order`` coefficients."""
    base = -(-(order - 1) // k) + 1
    return truncate(substitute_power(_BUILDERS[func](base), k), order)


def gf(spec: SeqSpec, order: int) -> Series:
    """Generating function of ``spec`` truncated to ``order`` terms."""
    if order < 1:
        raise ValueError("order must be positive")
    func = "phi" if spec.kind == "N" else "psi"
    # sparsest factor first keeps the intermediate product cheap
    a, b, c = sorted(spec.form, reverse=True)
    out = mul(mul(theta(func, a, order), theta(func, b, order)), theta(func, c, order))
    if spec.kind == "t":
        out = monomial_scale(out, 8, 0)
    return out


def is_square(m: int) -> bool:
    if m < 0:
        return False
    r = isqrt(m)
    return r * r == m


def is_triangular(m: int) -> bool:
    """True iff m == x(x+1)/2 for some integer x."""
    return m >= 0 and is_square(8 * m + 1)


def oracle_count(spec: SeqSpec, n: int) -> int:
    """Count representations of ``n`` by direct enumeration."""
    if n < 0:
        return 0
    # two outer loops over the largest coefficients, closed-form test for the last
    outer1, outer2, inner = sorted(spec.form, reverse=True)
    if spec.kind == "N":
        return _count_squares(outer1, outer2, inner, n)
    if spec.kind == "t":
        return _count_triangular_z3(outer1, outer2, inner, n)
    return _count_triangular_n3(outer1, outer2, inner, n)


def _count_squares(a: int, b: int, c: int, n: int) -> int:
    total = 0
    for x in range(-isqrt(n // a), isqrt(n // a) + 1):
        rx = n - a * x * x
        for y in range(-isqrt(rx // b), isqrt(rx // b) + 1):
            rest = rx - b * y * y
            if rest % c == 0:
                m = rest // c
                z = isqrt(m)
                if z * z == m:
                    total += 1 if z == 0 else 2
    return total


def _triangular_bound(m: int) -> int:
    """Largest x >= 0 with x(x+1)/2 <= m."""
    return (isqrt(8 * m + 1) - 1) // 2


def _count_triangular_z3(a: int, b: int, c: int, n: int) -> int:
    total = 0
    xb = _triangular_bound(n // a)
    for x in range(-xb - 1, xb + 1):
        rx = n - a * (x * (x + 1) // 2)
        yb = _triangular_bound(rx // b)
        for y in range(-yb - 1, yb + 1):
            rest = rx - b * (y * (y + 1) // 2)
            if rest % c == 0 and is_triangular(rest // c):
                total += 2  # z and -1 - z
    return total


def _count_triangular_n3(a: int, b: int, c: int, n: int) -> int:
    total = 0
    for x in range(_triangular_bound(n // a) + 1):
        rx = n - a * (x * (x + 1) // 2)
        for y in range(_triangular_bound(rx // b) + 1):
            rest = rx - b * (y * (y + 1) // 2)
            if rest % c == 0 and is_triangular(rest // c):
                total += 1
    return total


def oracle_counts(spec: SeqSpec, ns: Iterable[int]) -> list[int]:
    return [oracle_count(spec, n) for n in ns]


def form_constant(form: Iterable[int]) -> FormConstant:
    form = tuple(form)
    i1, i2, i3 = (sum(1 for v in form if v == j) for j in (1, 2, 3))
    value = i1 * (i1 - 1) * (i1 - 2) * (i1 - 3) // 4 + i1 * (i1 - 1) * i2 // 2 + i1 * i3
    return FormConstant(form, value)
