"""Acceptance criteria 1-10. Each test records one PASS/FAIL line, shown in
the terminal summary (and printed directly when run as a script).

Criterion 8 row 3d and the word 0101 are known mismatches with the
reference material; they are reported as FAIL lines and kept as strict
xfails. Set QLENS_SLOW=1 to add the r=5, d=11 pattern scan to criterion 10.
"""
import itertools
import os

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from qlens.dq import canonicalize_sim, delta, gamma, gamma_bruteforce, x_gamma, y21_from_column, y21_rhs
from qlens.explore import (cond_v, cond_vi, compare_conditions, pattern_in_language, search_pairs)
from qlens.graphs import WeightVector as W, ideal_invariant
from qlens.paths import enumerate_admissible, multiset_wbar, transfer_count, wbar_equal, x_table
from qlens.residue import is_prime, mod_inverse, units
from qlens.solver import check_dq1_witness, intertwines, solve_condition_vii, solve_shift_sylvester


def report(n, ok, detail):
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def normalized(r, k):
    return [W(r, (1,) + t) for t in itertools.product(units(r), repeat=k)]


def test_criterion_01_d3_completeness():
    bad, total = 0, 0
    for r in range(2, 21):
        for m, n in itertools.product(normalized(r, 1), repeat=2):
            a = wbar_equal(m, n)
            b = ideal_invariant(m) == ideal_invariant(n)
            c = solve_condition_vii(m, n).found
            total += 1
            bad += not (a == b == c)
    assert report(1, bad == 0, f"d=3, r<=20: {total} pairs, {bad} disagreements")


def test_criterion_02_d5_prime():
    bad, total, witnesses, dq1_bad = 0, 0, 0, 0
    for r in (3, 5, 7, 11, 13):
        for m, n in itertools.combinations(normalized(r, 2), 2):
            res = solve_condition_vii(m, n)
            total += 1
            bad += not (cond_v(m, n) == cond_vi(m, n) == res.found)
            if res.found:
                witnesses += 1
                dq1_bad += not check_dq1_witness(res.H)
    assert report(2, bad == 0 and dq1_bad == 0,
                  f"d=5, r in 3,5,7,11,13: {total} pairs, {bad} disagreements, "
                  f"{witnesses} (VII) witnesses, {dq1_bad} failing the unit-class check")


def test_criterion_03_small_unit_groups():
    bad = 0
    for r in (3, 4, 6, 12):
        for k in (1, 2, 3):
            T = normalized(r, k)
            for m, n in itertools.combinations(T, 2):
                bad += solve_condition_vii(m, n).found != (ideal_invariant(m) == ideal_invariant(n))
    assert report(3, bad == 0, f"r in 3,4,6,12, k<=3: (VII) partition vs gcd-chain partition, {bad} mismatches")


X_TABLE_R7 = {
    2: [4, 8, 5, 9, 6, 10, 7],
    3: [3, 6, 9, 5, 8, 11, 7],
    4: [6, 5, 4, 10, 9, 8, 7],
    5: [5, 3, 8, 6, 11, 9, 7],
    6: [2, 4, 6, 8, 10, 12, 7],
}


def test_criterion_04_x_table():
    got = {m: x_table(7, m) for m in X_TABLE_R7}
    diff = [m for m in got if got[m] != X_TABLE_R7[m]]
    assert report(4, not diff, f"r=7 X_i rows m=2..6, mismatched rows: {diff or 'none'}")


def test_criterion_05_discrepancy_examples():
    a = compare_conditions(W.of(5, 1, 2, 3, 1), W.of(5, 1, 3, 2, 1))
    b = compare_conditions(W.of(5, 1, 2, 3, 4), W.of(5, 1, 2, 4, 3))
    c = compare_conditions(W.of(5, 1, 3, 4, 1, 2, 3), W.of(5, 1, 4, 3, 1, 2, 4), extended_budget=5 ** 5)
    ok = (a.cond_vii and not a.cond_vi) and (b.cond_vii and not b.cond_v) \
        and (c.extended_ii and not c.cond_vii)
    assert report(5, ok, f"VII&!VI={a.cond_vii and not a.cond_vi}, VII&!V={b.cond_vii and not b.cond_v}, "
                         f"extII&!VII={bool(c.extended_ii and not c.cond_vii)}")


TYPE_ROWS_5 = [
    [(1, 2, 3, 4), (1, 2, 4, 3), (1, 3, 2, 4), (1, 3, 4, 2), (1, 4, 2, 3), (1, 4, 3, 2)],
    [(1, 2, 3, 1), (1, 3, 2, 1)],
    [(1, 3, 4, 1), (1, 4, 3, 1)],
    [(1, 2, 4, 1), (1, 4, 2, 1)],
]
TYPE_ROWS_8 = [
    [(1, 3, 5, 7), (1, 7, 5, 3)],
    [(1, 3, 7, 5), (1, 7, 3, 5)],
    [(1, 5, 3, 7), (1, 5, 7, 3)],
    [(1, 3, 7, 1), (1, 7, 3, 1)],
]


def _row_pairs(rows):
    return {tuple(sorted(p)) for row in rows for p in itertools.combinations(row, 2)}


def _orbit_size(r, t):
    return len({tuple(a * x % r for x in t) for a in units(r)})


def test_criterion_06_nontrivial_tables():
    found5 = {(rep.m, rep.n) for rep in search_pairs(5, 3, ("vii",)) if rep.cond_vii}
    found8 = {(rep.m, rep.n) for rep in search_pairs(8, 3, ("vii",)) if rep.cond_vii}
    ok5, ok8 = found5 == _row_pairs(TYPE_ROWS_5), found8 == _row_pairs(TYPE_ROWS_8)
    orbits = [sum(_orbit_size(5, t) for t in row) for row in TYPE_ROWS_5]
    assert report(6, ok5 and ok8,
                  f"r=5 d=7: {len(found5)} pairs (table {len(_row_pairs(TYPE_ROWS_5))}), "
                  f"r=8 d=7: {len(found8)} pairs (table {len(_row_pairs(TYPE_ROWS_8))}); "
                  f"r=5 parameter choices per type row {orbits}")


def test_criterion_07_gamma():
    bad, cases = 0, 0
    for r in (p for p in range(2, 32) if is_prime(p)):
        for a, b in itertools.product(range(r), repeat=2):
            cases += 1
            bad += gamma(r, a, b) != gamma_bruteforce(r, a, b)
    assert report(7, bad == 0, f"primes <= 31: {cases} cases, {bad} mismatches")


def _reference_gamma(r, case, m1, m2, n1, n2):
    # gamma exactly as listed in the reference classification table
    pN = (n1 * mod_inverse(n2, r) - 1) % r
    pM = (m1 * mod_inverse(m2, r) - 1) % r
    fN, fM = mod_inverse(n2 * pN % r, r), mod_inverse(n2 * pM % r, r)
    return {"4": 0, "3a": fN, "3b": fM - fN, "3c": 0, "3d": fM, "2a": 0, "2b": fM - fN}[case] % r


def _case(m1, m2, n1, n2):
    s = len({m1, m2, n1, n2})
    if s == 4:
        return "4"
    if s == 3:
        return "3a" if m1 == n1 else "3b" if m1 == n2 else "3c" if m2 == n1 else "3d"
    return "2a" if m1 == n1 else "2b"


def _classification_rows(r=7):
    rows = {}
    for m1, m2, n1, n2 in itertools.product(units(r), repeat=4):
        if m1 == m2 or n1 == n2:
            continue
        case = _case(m1, m2, n1, n2)
        Y = y21_from_column(r, (m1, m2), (n1, n2))
        got = canonicalize_sim(delta(Y) % r, r)
        g = _reference_gamma(r, case, m1, m2, n1, n2)
        ok, flipped, total = rows.get(case, (0, 0, 0))
        rows[case] = (ok + (got == canonicalize_sim(x_gamma(r, g), r)),
                      flipped + (got == canonicalize_sim(x_gamma(r, -g), r)), total + 1)
    return rows


ROWS = ["4", "3a", "3b", "3c", "3d", "2a", "2b"]


@pytest.mark.parametrize("case", [c if c != "3d" else pytest.param(
    c, marks=pytest.mark.xfail(strict=True, reason="row 3d: observed gamma is -1/(n2 p_M), "
                                                   "the reference lists +1/(n2 p_M)")) for c in ROWS])
def test_criterion_08_delta_classification(case):
    ok, flipped, total = _classification_rows()[case]
    detail = f"r=7 row {case}: {ok}/{total} representatives match the listed gamma"
    if ok < total:
        detail += f"; {flipped}/{total} match the negated value"
    assert report(8, ok == total, detail)


def test_criterion_09_oracles():
    bad_t = 0
    for r in range(2, 12):
        for k in (1, 2, 3):
            for t in itertools.product(units(r), repeat=k + 1):
                w = W(r, t)
                if multiset_wbar(w, "enumerate") != multiset_wbar(w, "transfer"):
                    bad_t += 1
    bad_s = 0
    for r in (p for p in range(3, 14) if is_prime(p)):
        for m1, m2, n1, n2 in itertools.product(units(r), repeat=4):
            if (m1 == m2) != (n1 == n2):
                continue
            res = solve_shift_sylvester(n2, m1, y21_rhs(r, (m1, m2), (n1, n2)))
            bad_s += not np.array_equal(res.Y, y21_from_column(r, (m1, m2), (n1, n2)))
    bad_h, nh = 0, 0
    for r, k in ((5, 3), (8, 3), (7, 2), (12, 2)):
        for m, n in itertools.combinations(normalized(r, k), 2):
            res = solve_condition_vii(m, n)
            if res.found:
                nh += 1
                bad_h += not intertwines(res.H, m, n)
    assert report(9, bad_t == bad_s == bad_h == 0,
                  f"transfer vs enumerate mismatches {bad_t}; Sylvester vs closed form {bad_s}; "
                  f"{nh} found H re-multiplied, {bad_h} bad")


def _patterns(r, k):
    return [rep.pattern for rep in search_pairs(r, k, ("vii",)) if rep.cond_vii]


def test_criterion_10_pattern_language():
    scans = [(5, 3), (5, 4), (8, 3)]
    if os.environ.get("QLENS_SLOW"):
        scans.append((5, 5))
    outside = []
    for r, k in scans:
        for p in _patterns(r, k):
            if p is None or not pattern_in_language(p, r):
                outside.append((r, 2 * k + 1, p))
    stated = (not pattern_in_language("11", 5)) and (not pattern_in_language("202", 5))
    core = [x for x in outside if x[1] <= 9]
    detail = f"patterns outside the language at r=5 d<=9 and r=8 d=7: {core or 'none'}; " \
             f"11 and 202 rejected: {stated}"
    if os.environ.get("QLENS_SLOW"):
        detail += f"; d=11 finding: {[x for x in outside if x[1] == 11] or 'none'}"
    assert report(10, stated and not core, detail)
    # the worked d=13 word 0101 and the d=11 word 101 fall outside the
    # stated language; see test_worked_pattern_in_language


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
