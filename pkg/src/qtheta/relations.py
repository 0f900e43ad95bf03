"""Sequence-level relations between representation counts, and the machinery to check them.

Four kinds of checkable items:

``IdentityRecord``
    a series identity ``lhs == rhs`` between two theta expressions.
``GfIdentity``
    ``scale_den * sum(seq(m*n + r) q^n) == rhs`` for a counting sequence.
``LinearRule``
    ``den * lhs(n) == num * sum(coef_i * rhs_i(n))`` on a residue-class domain.
``CorrectionRule``
    ``r(n) = lhs(n) - (num/den) * rhs(n)`` is zero except on values of n
    picked out by quadratic families, where it takes a prescribed signed value.

All comparisons are integer cross-multiplications.  Counts are read either from
generating functions (the "series" engine) or from :func:`qtheta.seq.oracle_count`
(the "oracle" engine).
"""

from __future__ import annotations

import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import gcd, isqrt
from typing import Iterable, Optional, Sequence, Union

from . import fps, qdsl
from .seq import SeqSpec, form_constant, gf, oracle_count

ENGINES = ("series", "oracle", "both")

# Rough bytes per stored coefficient (tuple slot plus a small int object).
BYTES_PER_COEFF = 40


class RuleError(ValueError):
    """A rule or identity is malformed."""


class ResourceError(RuntimeError):
    """A check would need more memory than the configured budget."""


@dataclass(frozen=True)
class IndexMap:
    """The affine map n -> mul*n + add."""

    mul: int = 1
    add: int = 0

    def __post_init__(self):
        if self.mul < 1 or self.add < 0:
            raise RuleError(f"index map needs mul >= 1 and add >= 0, got ({self.mul}, {self.add})")

    def __call__(self, n: int) -> int:
        return self.mul * n + self.add

    def __str__(self) -> str:
        lin = "n" if self.mul == 1 else f"{self.mul}n"
        return f"{lin}+{self.add}" if self.add else lin


@dataclass(frozen=True)
class SeqRef:
    spec: SeqSpec
    index: IndexMap = IndexMap()

    def __str__(self) -> str:
        return f"{self.spec.kind}({','.join(map(str, self.spec.form))};{self.index})"


@dataclass(frozen=True)
class ResidueSet:
    modulus: int
    residues: frozenset

    def __post_init__(self):
        if self.modulus < 1:
            raise RuleError("modulus must be positive")
        residues = frozenset(int(r) for r in self.residues)
        if any(not 0 <= r < self.modulus for r in residues):
            raise RuleError(f"residues {sorted(residues)} out of range mod {self.modulus}")
        object.__setattr__(self, "residues", residues)

    def __contains__(self, n: int) -> bool:
        return n % self.modulus in self.residues


EVERYTHING = ResidueSet(1, frozenset({0}))


@dataclass(frozen=True)
class IdentityRecord:
    name: str
    lhs: qdsl.Sum
    rhs: qdsl.Sum
    source: str = ""


@dataclass(frozen=True)
class GfIdentity:
    name: str
    seq: SeqSpec
    index_map: IndexMap
    rhs: qdsl.Sum
    scale_den: int = 1
    source: str = ""
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class LinearRule:
    name: str
    lhs: SeqRef
    rhs_terms: tuple[tuple[int, SeqRef], ...]
    ratio: tuple[int, int] = (1, 1)
    domain: ResidueSet = EVERYTHING
    exclusions: Optional[ResidueSet] = None
    n_start: int = 1
    source: str = ""

    def __post_init__(self):
        num, den = self.ratio
        if num < 1 or den < 1:
            raise RuleError(f"{self.name}: ratio terms must be positive, got {self.ratio}")
        if not self.rhs_terms:
            raise RuleError(f"{self.name}: empty right-hand side")

    def admits(self, n: int) -> bool:
        if n < self.n_start or n not in self.domain:
            return False
        return self.exclusions is None or n not in self.exclusions

    def admissible(self, n_max: int) -> list[int]:
        return [n for n in range(self.n_start, n_max + 1) if self.admits(n)]

    def refs(self) -> list[SeqRef]:
        return [self.lhs] + [ref for _, ref in self.rhs_terms]

    def __str__(self) -> str:
        num, den = self.ratio
        rhs = " ".join(f"{'+' if c > 0 else '-'} {abs(c) if abs(c) != 1 else ''}{ref}"
                       for c, ref in self.rhs_terms).lstrip("+ ")
        scale = "" if (num, den) == (1, 1) else f"{num}/{den} * "
        return f"{self.lhs} = {scale}({rhs})"


@dataclass(frozen=True)
class QuadraticFamily:
    """Fires when 2*(n + target_offset) == a*k**2 + b*k + c for an integer k.

    The predicted value is (-1)**(k + sign_offset) * (slope*k + intercept).
    """

    quadratic: tuple[int, int, int]
    slope: int
    intercept: int
    sign_offset: int = 0
    target_offset: int = 0
    condition: Optional[ResidueSet] = None

    def solutions(self, n: int) -> list[int]:
        a, b, c = self.quadratic
        target = 2 * (n + self.target_offset)
        if a == 0:
            if b == 0:
                return []
            k, rem = divmod(target - c, b)
            return [k] if rem == 0 else []
        disc = b * b - 4 * a * (c - target)
        if disc < 0:
            return []
        root = isqrt(disc)
        if root * root != disc:
            return []
        ks = set()
        for s in (root, -root):
            k, rem = divmod(-b + s, 2 * a)
            if rem == 0:
                ks.add(k)
        return sorted(ks)

    def value(self, k: int) -> int:
        sign = -1 if (k + self.sign_offset) % 2 else 1
        return sign * (self.slope * k + self.intercept)


@dataclass(frozen=True)
class CorrectionRule:
    name: str
    base: LinearRule
    families: tuple[QuadraticFamily, ...]
    source: str = ""

    def predict(self, n: int) -> int:
        """Value the families assign to r(n); 0 when none fires."""
        values = set()
        for fam in self.families:
            if fam.condition is not None and n not in fam.condition:
                continue
            values.update(fam.value(k) for k in fam.solutions(n))
        if len(values) > 1:
            raise RuleError(f"{self.name}: families disagree at n={n}: {sorted(values)}")
        return values.pop() if values else 0


Item = Union[IdentityRecord, GfIdentity, LinearRule, CorrectionRule]

ITEM_TYPES = {
    IdentityRecord: "identity",
    GfIdentity: "gf_identity",
    LinearRule: "linear_rule",
    CorrectionRule: "correction_rule",
}


@dataclass
class VerificationReport:
    name: str
    item_type: str
    engine: str
    range: tuple[int, int]
    status: str  # verified | counterexample | mismatch | skipped | error
    checked: int = 0
    witness: Optional[dict] = None
    witness_confirmed: Optional[bool] = None
    message: str = ""
    source: str = ""
    details: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status in ("verified", "skipped")

    def to_dict(self, timings: bool = False) -> dict:
        out = {
            "name": self.name,
            "type": self.item_type,
            "engine": self.engine,
            "range": list(self.range),
            "status": self.status,
            "checked": self.checked,
            "witness": self.witness,
            "witness_confirmed": self.witness_confirmed,
            "message": self.message,
            "source": self.source,
            "details": self.details,
        }
        if timings:
            out["elapsed"] = round(self.elapsed, 6)
        return out


class SeriesCache:
    """Generating functions keyed by sequence; longer builds serve shorter requests."""

    def __init__(self, mem_limit: Optional[int] = None):
        self.mem_limit = mem_limit
        self._data: dict[SeqSpec, fps.Series] = {}
        self._lock = threading.Lock()

    def get(self, spec: SeqSpec, order: int) -> fps.Series:
        if self.mem_limit is not None and order * BYTES_PER_COEFF > self.mem_limit:
            raise ResourceError(
                f"{spec} to order {order} needs ~{order * BYTES_PER_COEFF} bytes, "
                f"budget is {self.mem_limit}")
        hit = self._data.get(spec)
        if hit is not None and hit.precision >= order:
            return hit
        built = gf(spec, order)
        with self._lock:
            hit = self._data.get(spec)
            if hit is None or hit.precision < built.precision:
                self._data[spec] = built
                hit = built
        return hit


def _series_values(refs: Iterable[SeqRef], ns: Sequence[int], cache: SeriesCache) -> dict:
    """Map each ref to its values at ``ns``, building each gf once."""
    refs = list(dict.fromkeys(refs))
    orders: dict[SeqSpec, int] = {}
    for ref in refs:
        need = ref.index(max(ns)) + 1 if ns else 1
        orders[ref.spec] = max(orders.get(ref.spec, 1), need)
    series = {spec: cache.get(spec, order) for spec, order in orders.items()}
    return {ref: [series[ref.spec].coeffs[ref.index(n)] for n in ns] for ref in refs}


def _oracle_values(refs: Iterable[SeqRef], ns: Sequence[int]) -> dict:
    refs = list(dict.fromkeys(refs))
    return {ref: [oracle_count(ref.spec, ref.index(n)) for n in ns] for ref in refs}


def _side_values(rule: LinearRule, table: dict, i: int) -> tuple[int, int]:
    lhs = table[rule.lhs][i]
    rhs = sum(c * table[ref][i] for c, ref in rule.rhs_terms)
    return lhs, rhs


def _engine_tables(refs, ns, engine, cache):
    if engine not in ENGINES:
        raise RuleError(f"unknown engine {engine!r}")
    series = _series_values(refs, ns, cache) if engine in ("series", "both") else None
    oracle = _oracle_values(refs, ns) if engine in ("oracle", "both") else None
    return series, oracle


def _first_engine_mismatch(refs, ns, series, oracle):
    for ref in dict.fromkeys(refs):
        for i, n in enumerate(ns):
            if series[ref][i] != oracle[ref][i]:
                return {"n": n, "sequence": str(ref), "series": series[ref][i],
                        "oracle": oracle[ref][i]}
    return None


def check_identity(record: IdentityRecord, order: int,
                   cache: Optional[qdsl.LeafCache] = None) -> VerificationReport:
    lhs = qdsl.evaluate(record.lhs, order, cache)
    rhs = qdsl.evaluate(record.rhs, order, cache)
    cmp = fps.equal_to_order(lhs, rhs, order)
    report = VerificationReport(record.name, "identity", "series", (0, order - 1),
                                "verified" if cmp else "counterexample", checked=order,
                                source=record.source)
    if not cmp:
        report.witness = {"n": cmp.exponent, "lhs": cmp.left, "rhs": cmp.right}
    return report


def check_gf_identity(ident: GfIdentity, order: int, cache: Optional[SeriesCache] = None,
                      leaf_cache: Optional[qdsl.LeafCache] = None) -> VerificationReport:
    """Compare ``scale_den * sum(seq(m*n + add) q^n)`` with the rhs to ``order`` terms."""
    if order < 1:
        raise RuleError("order must be positive")
    if ident.scale_den < 1:
        raise RuleError(f"{ident.name}: scale_den must be positive")
    cache = cache or SeriesCache()
    m, add = ident.index_map.mul, ident.index_map.add
    r, shift = add % m, add // m
    full = cache.get(ident.seq, m * (order + shift) + r)
    picked = fps.extract_progression(full, m, r)
    lhs = fps.monomial_scale(fps.Series(picked.coeffs[shift:shift + order]), ident.scale_den, 0)
    rhs = qdsl.evaluate(ident.rhs, order, leaf_cache)
    cmp = fps.equal_to_order(lhs, rhs, order)
    report = VerificationReport(ident.name, "gf_identity", "series", (0, order - 1),
                                "verified" if cmp else "counterexample", checked=order,
                                source=ident.source)
    if ident.flags:
        report.details["flags"] = list(ident.flags)
    if not cmp:
        n = cmp.exponent
        report.witness = {"n": n, "lhs": cmp.left, "rhs": cmp.right}
        direct = ident.scale_den * oracle_count(ident.seq, ident.index_map(n))
        report.witness_confirmed = direct != cmp.right
        if direct != cmp.left:
            report.status = "mismatch"
            report.message = f"series and oracle disagree on the left side at n={n}"
    return report


def check_linear_rule(rule: LinearRule, n_max: int, engine: str = "series",
                      cache: Optional[SeriesCache] = None) -> VerificationReport:
    cache = cache or SeriesCache()
    ns = rule.admissible(n_max)
    report = VerificationReport(rule.name, "linear_rule", engine, (rule.n_start, n_max),
                                "verified", source=rule.source)
    if not ns:
        report.status = "skipped"
        report.message = "no admissible n in range"
        return report
    num, den = rule.ratio
    series, oracle = _engine_tables(rule.refs(), ns, engine, cache)
    if series is not None and oracle is not None:
        bad = _first_engine_mismatch(rule.refs(), ns, series, oracle)
        if bad is not None:
            report.status = "mismatch"
            report.witness = bad
            report.message = "series and oracle engines disagree"
            return report
    table = series if series is not None else oracle
    for i, n in enumerate(ns):
        lhs, rhs = _side_values(rule, table, i)
        report.checked += 1
        if den * lhs != num * rhs:
            report.status = "counterexample"
            report.witness = {"n": n, "lhs": lhs, "rhs": rhs}
            o_lhs, o_rhs = _side_values(rule, _oracle_values(rule.refs(), [n]), 0)
            report.witness_confirmed = den * o_lhs != num * o_rhs
            if (o_lhs, o_rhs) != (lhs, rhs):
                report.status = "mismatch"
                report.message = "witness does not reproduce under the oracle"
            break
    return report


def check_correction_rule(rule: CorrectionRule, n_max: int, engine: str = "series",
                          cache: Optional[SeriesCache] = None) -> VerificationReport:
    cache = cache or SeriesCache()
    base = rule.base
    ns = base.admissible(n_max)
    report = VerificationReport(rule.name, "correction_rule", engine, (base.n_start, n_max),
                                "verified", source=rule.source)
    if not ns:
        report.status = "skipped"
        report.message = "no admissible n in range"
        return report
    num, den = base.ratio
    series, oracle = _engine_tables(base.refs(), ns, engine, cache)
    if series is not None and oracle is not None:
        bad = _first_engine_mismatch(base.refs(), ns, series, oracle)
        if bad is not None:
            report.status = "mismatch"
            report.witness = bad
            report.message = "series and oracle engines disagree"
            return report
    table = series if series is not None else oracle
    nonzero = []
    for i, n in enumerate(ns):
        lhs, rhs = _side_values(base, table, i)
        report.checked += 1
        diff = den * lhs - num * rhs
        if diff % den:
            report.status = "counterexample"
            report.witness = {"n": n, "lhs": lhs, "rhs": rhs}
            report.message = f"r({n}) is not an integer"
            break
        value = diff // den
        expected = rule.predict(n)
        if value:
            nonzero.append([n, value])
        if value != expected:
            report.status = "counterexample"
            report.witness = {"n": n, "lhs": lhs, "rhs": rhs, "r": value, "predicted": expected}
            o_lhs, o_rhs = _side_values(base, _oracle_values(base.refs(), [n]), 0)
            o_value = (den * o_lhs - num * o_rhs) / den
            report.witness_confirmed = o_value != expected
            if (o_lhs, o_rhs) != (lhs, rhs):
                report.status = "mismatch"
                report.message = "witness does not reproduce under the oracle"
            break
    report.details["nonzero"] = nonzero
    return report


def generate_classical_rules(bound: int = 12) -> list[LinearRule]:
    """Relations between t and N that hold for whole families of forms.

    * a+b+c <= 7:  t(n) = 2/(2+C) * N(8n+a+b+c)
    * a+b+c == 8:  t(n) = 2/(2+C) * (N(8n+8) - N(2n+2))
    * a, b odd, a = b (mod 4), c = 2 (mod 4), entries <= bound:
      t(n) = N(8n+a+b+c) - N(2n+(a+b+c)/4)

    C is :func:`qtheta.seq.form_constant`.
    """
    rules = []
    for a in range(1, 7):
        for b in range(a, 7):
            for c in range(b, 9 - a - b):
                s = a + b + c
                form = (a, b, c)
                ratio = (2, 2 + form_constant(form).value)
                t = SeqRef(SeqSpec("t", form))
                if s <= 7:
                    rhs = ((1, SeqRef(SeqSpec("N", form), IndexMap(8, s))),)
                    name = f"t({a},{b},{c}) vs N(8n+{s})"
                else:
                    rhs = ((1, SeqRef(SeqSpec("N", form), IndexMap(8, 8))),
                           (-1, SeqRef(SeqSpec("N", form), IndexMap(2, 2))))
                    name = f"t({a},{b},{c}) vs N(8n+8)-N(2n+2)"
                rules.append(LinearRule(name, t, rhs, _reduce(ratio),
                                        source="sum <= 7 rule" if s <= 7 else "sum = 8 rule"))
    seen = {rule.name for rule in rules}
    for a in range(1, bound + 1, 2):
        for b in range(a, bound + 1, 4):
            for c in range(2, bound + 1, 4):
                s = a + b + c
                form = (a, b, c)
                if f"t({a},{b},{c}) vs N(8n+{s})-N(2n+{s // 4})" in seen:
                    continue
                rhs = ((1, SeqRef(SeqSpec("N", form), IndexMap(8, s))),
                       (-1, SeqRef(SeqSpec("N", form), IndexMap(2, s // 4))))
                rules.append(LinearRule(f"t({a},{b},{c}) vs N(8n+{s})-N(2n+{s // 4})",
                                        SeqRef(SeqSpec("t", form)), rhs,
                                        source="odd pair, c = 2 mod 4 rule"))
    return rules


def _reduce(ratio: tuple[int, int]) -> tuple[int, int]:
    g = gcd(*ratio)
    return ratio[0] // g, ratio[1] // g


@dataclass
class SuiteSettings:
    order: int = 1024
    n_max: int = 2000
    engine: str = "series"
    jobs: int = 1
    mem_limit: Optional[int] = None


def run_item(item: Item, settings: SuiteSettings, cache: SeriesCache,
             leaf_cache: qdsl.LeafCache) -> VerificationReport:
    start = time.perf_counter()
    try:
        if isinstance(item, IdentityRecord):
            report = check_identity(item, settings.order, leaf_cache)
        elif isinstance(item, GfIdentity):
            report = check_gf_identity(item, settings.order, cache, leaf_cache)
        elif isinstance(item, LinearRule):
            report = check_linear_rule(item, settings.n_max, settings.engine, cache)
        elif isinstance(item, CorrectionRule):
            report = check_correction_rule(item, settings.n_max, settings.engine, cache)
        else:
            raise RuleError(f"cannot check {type(item).__name__}")
    except Exception as exc:
        report = VerificationReport(getattr(item, "name", "?"), ITEM_TYPES.get(type(item), "?"),
                                    settings.engine, (0, 0), "error",
                                    message=f"{type(exc).__name__}: {exc}",
                                    source=getattr(item, "source", ""))
    report.elapsed = time.perf_counter() - start
    return report


def run_suite(items: Sequence[Item], settings: Optional[SuiteSettings] = None,
              cache: Optional[SeriesCache] = None) -> list[VerificationReport]:
    """Check every item; reports come back sorted by (name, type)."""
    settings = settings or SuiteSettings()
    cache = cache or SeriesCache(settings.mem_limit)
    leaf_cache = qdsl.LeafCache()
    if settings.jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=settings.jobs) as pool:
            reports = list(pool.map(lambda it: run_item(it, settings, cache, leaf_cache), items))
    else:
        reports = [run_item(it, settings, cache, leaf_cache) for it in items]
    return sorted(reports, key=lambda r: (r.name, r.item_type))
