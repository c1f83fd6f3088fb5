"""Acceptance criteria, one pass/fail line each.

Run under pytest (``pytest tests/test_acceptance.py -s``) or directly
(``python tests/test_acceptance.py``); either way every criterion prints a
single ``[PASS]``/``[FAIL]`` line with its measured quantities.
"""

from __future__ import annotations

import json
import sys
import time

import pytest

from opspec.analyze import EXIT_OK, analyze_text
from opspec.harness import GeneratorProfile, run_suite

SEED = 1
PROFILE = GeneratorProfile(seed=SEED)

ST_TS_PROGRAM = """\
let ST = diag { 0: 1, 1: inf };
let TS = diag { 1: inf };
print poles(ST);
print poles(TS);
print drazin_spectrum(ST);
print drazin_spectrum(TS);
assert drazin_spectrum(ST) == {};
assert drazin_spectrum(TS) == {};
"""


def _suite(name, trials):
    r = run_suite(name, trials, PROFILE)
    detail = f"{r.trials} trials, {len(r.failures)} failures, {len(r.errors)} errors, {r.seconds:.1f}s"
    return r, detail


def _clean(r):
    return not r.failures and not r.errors and r.trials > 0


def criterion_1():
    start = time.perf_counter()
    result = analyze_text(ST_TS_PROGRAM)
    elapsed = time.perf_counter() - start
    doc = json.loads(result.to_json())
    ops = doc["operators"]
    poles = {k: {(p["point"], p["order"]) for p in ops[k]["poles"]} for k in ("ST", "TS")}
    ok = (
        result.exit_code == EXIT_OK
        and poles["ST"] == {("0", 1), ("1", 1)}
        and poles["TS"] == {("1", 1)}
        and ops["ST"]["drazin_spectrum"] == []
        and ops["TS"]["drazin_spectrum"] == []
        and {p for p in poles["ST"] if p[0] != "0"} == {p for p in poles["TS"] if p[0] != "0"}
        and elapsed < 1.0
    )
    return ok, f"poles(ST)={sorted(poles['ST'])} poles(TS)={sorted(poles['TS'])} in {elapsed * 1000:.0f}ms"


def criterion_2():
    r, detail = _suite("AXIOMS", 300)
    approx = r.counters.get("approx", 0)
    ok = _clean(r) and r.counters.get("exact", 0) == 300 and approx >= 100 and r.seconds <= 60
    return ok, f"{detail}; exact={r.counters.get('exact', 0)} approx={approx}"


def criterion_3():
    r, detail = _suite("ORACLE", 300)
    return _clean(r), detail


def criterion_4():
    r, detail = _suite("T1", 300)
    return _clean(r), f"{detail}; algebraic={r.counters.get('algebraic', 0)}"


def criterion_5():
    r, detail = _suite("T2", 300)
    seg = r.counters.get("segment_trials", 0)
    return _clean(r) and seg >= 30, f"{detail}; segment trials={seg}"


def criterion_6():
    r, detail = _suite("T3", 300)
    return _clean(r), detail


def criterion_7():
    r5, d5 = _suite("T5", 200)
    r6, d6 = _suite("T6", 100)
    ok = _clean(r5) and _clean(r6) and r5.seconds + r6.seconds <= 120
    return ok, f"general: {d5}; hermitian: {d6}"


def criterion_8():
    fx, _ = _suite("FIXTURES", 1)
    r, detail = _suite("MERO", 200)
    pert = r.counters.get("perturbations", 0)
    ok = _clean(fx) and _clean(r) and pert >= 100
    return ok, f"fixtures {fx.status}; {detail}; perturbations={pert}"


def criterion_9():
    r, detail = _suite("SMT", 200)
    return _clean(r), detail


def criterion_10():
    r, detail = _suite("PROFILE", 1000)
    return _clean(r) and r.seconds <= 60, detail


CRITERIA = {
    1: ("shift fixture", criterion_1),
    2: ("Drazin identities", criterion_2),
    3: ("rank route vs Jordan oracle", criterion_3),
    4: ("empty Drazin spectrum iff algebraic", criterion_4),
    5: ("countable spectrum iff countable Drazin spectrum", criterion_5),
    6: ("ab versus ba", criterion_6),
    7: ("multiplication operator dualities", criterion_7),
    8: ("meromorphic classification", criterion_8),
    9: ("spectral mapping", criterion_9),
    10: ("profile coherence fuzz", criterion_10),
}


def _line(k: int) -> tuple[bool, str]:
    title, fn = CRITERIA[k]
    ok, detail = fn()
    return ok, f"[{'PASS' if ok else 'FAIL'}] criterion {k:2d} ({title}): {detail}"


@pytest.mark.slow
@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k, capsys):
    ok, line = _line(k)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [_line(k) for k in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
