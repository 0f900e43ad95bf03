"""Acceptance criteria 1-9, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py`` (a pass/fail line per criterion is
printed in the terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import json
import sys
import time
from pathlib import Path
from collections import Counter
from fractions import Fraction

import pytest

from qtheta import kernels
from qtheta.cli import format_json
from qtheta.corpus import PACKAGE_CORPUS, default_paths, load_corpus
from qtheta.fps import coefficient
from qtheta.relations import (CorrectionRule, GfIdentity, LinearRule, SuiteSettings,
                              generate_classical_rules, run_suite)
from qtheta.seq import SeqSpec, form_constant, gf, oracle_count


class _Results:
    def __init__(self):
        self._rows: dict[int, tuple[bool, str]] = {}

    def record(self, criterion: int, ok: bool, detail: str) -> None:
        self._rows[criterion] = (ok, detail)

    def lines(self) -> list[str]:
        return [f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}"
                for k, (ok, detail) in sorted(self._rows.items())]

    def __bool__(self) -> bool:
        return bool(self._rows)


RESULTS = _Results()


def _load(name):
    return load_corpus(PACKAGE_CORPUS / name)


def _summary(reports) -> str:
    counts = Counter(r.status for r in reports)
    return ", ".join(f"{counts[k]} {k}" for k in sorted(counts))


def _all_verified(reports) -> bool:
    return bool(reports) and all(r.status == "verified" for r in reports)


# citation tags each corpus file must cover, kept as data next to the tests
COVERAGE = json.loads((Path(__file__).with_name("coverage.json")).read_text())


def _missing(required, sources) -> list[str]:
    joined = " | ".join(sources)
    return [tag for tag in required if tag not in joined]


def test_criterion_1_identity_corpus():
    items = _load("identities.qid")
    missing = [tag for tag in COVERAGE["identities"] if tag not in {i.source for i in items}]
    start = time.perf_counter()
    reports = run_suite(items, SuiteSettings(order=4096))
    elapsed = time.perf_counter() - start
    ok = not missing and _all_verified(reports) and elapsed < 60
    RESULTS.record(1, ok, f"{len(reports)} identities to order 4096 in {elapsed:.2f}s "
                          f"({_summary(reports)}); missing sources: {missing or 'none'}")
    assert not missing
    assert _all_verified(reports), [r.name for r in reports if r.status != "verified"]
    assert elapsed < 60


def test_criterion_2_dissection_corpus():
    items = _load("gf_identities.json")
    assert all(isinstance(i, GfIdentity) for i in items)
    missing = _missing(COVERAGE["dissections"], [i.source for i in items])
    reports = run_suite(items, SuiteSettings(order=1024))
    ok = not missing and _all_verified(reports)
    RESULTS.record(2, ok, f"{len(reports)} dissection identities to order 1024 "
                          f"({_summary(reports)}); missing sources: {missing or 'none'}")
    assert not missing
    assert _all_verified(reports), [r.name for r in reports if r.status != "verified"]


def _theorem_rules():
    generated = {r.name for r in generate_classical_rules()}
    return [i for i in _load("theorems.json") if isinstance(i, LinearRule) and i.name not in generated]


def test_criterion_3_theorem_scans():
    rules = _theorem_rules()
    missing = _missing(COVERAGE["theorems"], [r.source for r in rules])
    start = time.perf_counter()
    series = run_suite(rules, SuiteSettings(n_max=20000, engine="series"))
    mid = time.perf_counter()
    oracle = run_suite(rules, SuiteSettings(n_max=500, engine="oracle"))
    end = time.perf_counter()
    ok = not missing and _all_verified(series) and _all_verified(oracle)
    RESULTS.record(3, ok, f"{len(rules)} rules; series n<=20000: {_summary(series)} "
                          f"({mid - start:.1f}s); oracle n<=500: {_summary(oracle)} "
                          f"({end - mid:.1f}s)")
    assert not missing, missing
    assert _all_verified(series), [(r.name, r.witness) for r in series if r.status != "verified"]
    assert _all_verified(oracle), [(r.name, r.witness) for r in oracle if r.status != "verified"]


def test_criterion_4_generated_rules():
    rules = generate_classical_rules()
    forms = {r.lhs.spec.form for r in rules}
    small = {(a, b, c) for a in range(1, 7) for b in range(a, 7) for c in range(b, 7)
             if a + b + c <= 8}
    reports = run_suite(rules, SuiteSettings(n_max=2000))
    ok = small <= forms and {(1, 1, 2), (1, 5, 2)} <= forms and _all_verified(reports)
    RESULTS.record(4, ok, f"{len(reports)} generated rules for n<=2000 ({_summary(reports)})")
    assert small <= forms and (1, 1, 2) in forms and (1, 5, 2) in forms
    assert _all_verified(reports), [(r.name, r.witness) for r in reports if r.status != "verified"]


ENGINE_FORMS = [(1, 1, 1), (1, 1, 2), (1, 2, 3), (2, 3, 3), (1, 3, 3), (1, 4, 4), (1, 3, 16),
                (1, 7, 12), (3, 5, 12), (1, 2, 5), (1, 5, 10), (1, 6, 9), (2, 7, 7), (3, 4, 45)]


def test_criterion_5_engine_equivalence():
    bad = []
    for form in ENGINE_FORMS:
        for kind in ("N", "t", "T"):
            spec = SeqSpec(kind, form)
            series = gf(spec, 301)
            for n in range(301):
                if coefficient(series, n) != oracle_count(spec, n):
                    bad.append((str(spec), n))
    ok = len(ENGINE_FORMS) >= 12 and not bad
    RESULTS.record(5, ok, f"{len(ENGINE_FORMS)} forms x N,t,T, n<=300: "
                          f"{len(bad)} disagreements")
    assert not bad


def _independent_c(form) -> Fraction:
    i = {j: sum(1 for v in form if v == j) for j in (1, 2, 3)}
    return (Fraction(i[1] * (i[1] - 1) * (i[1] - 2) * (i[1] - 3), 4)
            + Fraction(i[1] * (i[1] - 1) * i[2], 2) + i[1] * i[3])


def _partition_ok(rules, modulus=32) -> bool:
    for r in range(modulus):
        hits = sum(1 for rule in rules if r in rule.domain and
                   (rule.exclusions is None or r not in rule.exclusions))
        excluded = all(rule.exclusions is not None and r in rule.exclusions for rule in rules)
        if hits + excluded != 1:
            return False
    return True


def test_criterion_6_structural_checks():
    t_forms = sorted({ref.spec.form for p in default_paths() for item in load_corpus(p)
                      if isinstance(item, (LinearRule, CorrectionRule))
                      for ref in (item.base if isinstance(item, CorrectionRule) else item).refs()
                      if ref.spec.kind == "t"})
    eight = all(oracle_count(SeqSpec("t", f), n) == 8 * oracle_count(SeqSpec("T", f), n)
                for f in t_forms for n in range(201))

    partition = True
    for form in [(2, 3, 3), (1, 1, 6)]:
        # the residue-class table: plain index on the left, one shared exclusion
        table = [r for r in _theorem_rules() if r.lhs.spec == SeqSpec("t", form)
                 and r.lhs.index.mul == 1 and r.exclusions is not None]
        partition &= len(table) == 5 and _partition_ok(table)

    forms = list(itertools.product(range(1, 5), repeat=3))
    c_ok = all(form_constant(f).value == _independent_c(f) for f in forms)

    ok = eight and partition and c_ok
    RESULTS.record(6, ok, f"t=8T on {len(t_forms)} scanned forms n<=200: {eight}; "
                          f"t(2,3,3) and t(1,1,6) case tables partition Z/32: {partition}; "
                          f"C(a,b,c) on {len(forms)} forms: {c_ok}")
    assert eight and partition and c_ok


def test_criterion_7_conjecture_scan():
    items = _load("conjectures.json")
    reports = run_suite(items, SuiteSettings(n_max=5000))
    [corr] = [r for r in reports if r.item_type == "correction_rule"]
    nonzero = dict(map(tuple, corr.details.get("nonzero", [])))
    r9 = nonzero.get(9)
    zero_on_1_mod_3 = all(n % 3 != 1 for n in nonzero)
    ok = _all_verified(reports) and r9 == -9 and zero_on_1_mod_3 and corr.checked == 5000
    RESULTS.record(7, ok, f"{len(reports)} conjecture rules, n<=5000 ({_summary(reports)}); "
                          f"r(9)={r9}; {len(nonzero)} nonzero r(n), none with n=1 mod 3")
    assert _all_verified(reports), [(r.name, r.witness) for r in reports if r.status != "verified"]
    assert r9 == -9 and zero_on_1_mod_3


@pytest.fixture(scope="module")
def default_suite():
    items = [i for p in default_paths() for i in load_corpus(p)]
    start = time.perf_counter()
    reports = run_suite(items, SuiteSettings(jobs=1))
    return items, reports, time.perf_counter() - start


def test_criterion_8_performance(default_suite):
    timings = {}
    old = kernels.BACKEND
    try:
        for backend in kernels.available_backends():
            kernels.set_backend(backend)
            start = time.perf_counter()
            gf(SeqSpec("N", (1, 2, 3)), 100_000)
            timings[backend] = time.perf_counter() - start
    finally:
        kernels.set_backend(old)
    _, reports, suite_time = default_suite
    ok = all(t <= 5 for t in timings.values()) and suite_time < 60
    shown = ", ".join(f"{k} {v:.2f}s" for k, v in timings.items())
    RESULTS.record(8, ok, f"3-factor product to 10^5: {shown}; default verify suite "
                          f"({len(reports)} items) {suite_time:.1f}s")
    assert all(t <= 5 for t in timings.values()), timings
    assert suite_time < 60


def test_criterion_9_determinism(default_suite):
    items, serial, _ = default_suite
    parallel = run_suite(items, SuiteSettings(jobs=4))
    a, b = format_json(serial), format_json(parallel)
    ok = a == b and json.loads(a) == json.loads(b)
    RESULTS.record(9, ok, f"jobs=1 vs jobs=4 JSON reports ({len(a)} bytes) identical: {a == b}")
    assert a == b


if __name__ == "__main__":
    code = pytest.main([__file__, "-q", "-p", "no:cacheprovider"])
    sys.exit(code)
