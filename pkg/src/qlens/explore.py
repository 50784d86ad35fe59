"""Decision procedures, condition reports, pair searches and window patterns."""
from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache

from .graphs import WeightVector, ideal_invariant, same_shape
from .paths import d3_certificate, multiset_wbar
from .residue import PreconditionError, is_prime, mod_inverse, units
from .solver import check_dq1_witness, exhaustive_dq_search, solve_condition_vii

log = logging.getLogger(__name__)


def normalize_weights(w: WeightVector) -> WeightVector:
    return w.normalized()


def canonical_weights(w: WeightVector) -> WeightVector:
    return w.canonical()


def is_scalar_multiple(m: WeightVector, n: WeightVector) -> bool:
    same_shape(m, n)
    return any(m.scale(a).m == n.m for a in units(m.r))


def normalized_tuples(r: int, k: int):
    """All weight vectors with first entry 1, lexicographic."""
    for rest in itertools.product(units(r), repeat=k):
        yield WeightVector(r, (1,) + rest)


@lru_cache(maxsize=4096)
def _wbar(w: WeightVector):
    return multiset_wbar(w).counts


def cond_v(m: WeightVector, n: WeightVector) -> bool:
    same_shape(m, n)
    return _wbar(m) == _wbar(n)


def cond_vi(m: WeightVector, n: WeightVector) -> bool:
    same_shape(m, n)
    K = m.levels
    distinct = len(set(m.m)) == K == len(set(n.m))
    return (distinct and ideal_invariant(m) == ideal_invariant(n)) or is_scalar_multiple(m, n)


@dataclass
class D3Verdict:
    equivalent: bool
    gcds: tuple
    certificate: list | None = None


def decide_d3(m: WeightVector, n: WeightVector) -> D3Verdict:
    same_shape(m, n)
    if m.k != 1:
        raise PreconditionError("decide_d3 needs k = 1")
    g = (ideal_invariant(m)[0], ideal_invariant(n)[0])
    if g[0] != g[1]:
        return D3Verdict(False, g)
    return D3Verdict(True, g, d3_certificate(m, n))


def decide_d5_prime(m: WeightVector, n: WeightVector) -> bool:
    same_shape(m, n)
    if m.k != 2:
        raise PreconditionError("decide_d5_prime needs k = 2")
    if not is_prime(m.r):
        raise PreconditionError(f"outside theorem scope: r={m.r} is not prime")
    return (len(set(m.m)) == 3 == len(set(n.m))) or is_scalar_multiple(m, n)


@dataclass
class ConditionReport:
    r: int
    m: tuple
    n: tuple
    cond_v: bool | None = None
    cond_vi: bool | None = None
    cond_vii: bool | None = None
    dq1_witness: bool | None = None  # None = skipped
    extended_ii: bool | None = None
    extended_iv: bool | None = None
    pattern: str | None = None
    note: str = ""

    def verdicts(self) -> dict:
        return {k: getattr(self, k) for k in
                ("cond_v", "cond_vi", "cond_vii", "dq1_witness", "extended_ii", "extended_iv")}

    def disagree(self) -> bool:
        vals = {v for k, v in self.verdicts().items() if k.startswith("cond") and v is not None}
        return len(vals) > 1

    def any_holds(self) -> bool:
        return any(v for k, v in self.verdicts().items() if k.startswith("cond"))

    def to_json(self) -> str:
        d = asdict(self)
        d["m"], d["n"] = list(self.m), list(self.n)
        return json.dumps(d, sort_keys=True)


CSV_FIELDS = ["r", "m", "n", "cond_v", "cond_vi", "cond_vii", "dq1_witness",
              "extended_ii", "extended_iv", "pattern", "note"]


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(CSV_FIELDS)
    for rep in reports:
        row = []
        for f in CSV_FIELDS:
            v = getattr(rep, f)
            if f in ("m", "n"):
                v = " ".join(map(str, v))
            row.append("" if v is None else v)
        wr.writerow(row)
    return buf.getvalue()


def compare_conditions(m: WeightVector, n: WeightVector, conditions=("v", "vi", "vii"),
                       extended_budget: int | None = None, with_pattern: bool = True) -> ConditionReport:
    """Evaluate the requested conditions on one pair. Extended searches run
    only when `extended_budget` is given (it caps the number of shift tuples)."""
    same_shape(m, n)
    rep = ConditionReport(m.r, m.m, n.m)
    if "v" in conditions:
        rep.cond_v = cond_v(m, n)
    if "vi" in conditions:
        rep.cond_vi = cond_vi(m, n)
    if "vii" in conditions:
        res = solve_condition_vii(m, n)
        rep.cond_vii = res.found
        if res.found:
            rep.dq1_witness = check_dq1_witness(res.H)
    if extended_budget is not None:
        ii = exhaustive_dq_search(m, n, budget=extended_budget, dq1=True)
        if ii.found:
            rep.extended_ii = rep.extended_iv = True
        else:
            rep.extended_ii = None if ii.truncated else False
            iv = exhaustive_dq_search(m, n, budget=extended_budget, dq1=False)
            rep.extended_iv = True if iv.found else (None if iv.truncated else False)
            if ii.truncated or iv.truncated:
                rep.note = "extended search truncated by budget"
    if with_pattern and rep.cond_vii and m.r in PATTERN_TABLES and m.levels >= 4 \
            and not is_scalar_multiple(m, n):
        try:
            rep.pattern = extract_pattern(m.normalized(), n.normalized())
        except PreconditionError as exc:
            rep.note = str(exc)
    return rep


# rows of window types; type 0 for r = 5 is every all-distinct normalized window
def _all_distinct_row(r):
    return frozenset((1,) + p for p in itertools.permutations([u for u in units(r) if u != 1], 3))


PATTERN_TABLES = {
    5: {"0": [_all_distinct_row(5)],
        "1": [frozenset({(1, 2, 3, 1), (1, 3, 2, 1)})],
        "2": [frozenset({(1, 3, 4, 1), (1, 4, 3, 1)})],
        "3": [frozenset({(1, 2, 4, 1), (1, 4, 2, 1)})]},
    8: {"0": [frozenset({(1, 3, 5, 7), (1, 7, 5, 3)}),
              frozenset({(1, 3, 7, 5), (1, 7, 3, 5)}),
              frozenset({(1, 5, 3, 7), (1, 5, 7, 3)})],
        "1": [frozenset({(1, 3, 7, 1), (1, 7, 3, 1)})]},
}

LANGUAGES = {
    5: re.compile(r"0*|0*1|0*(10(00)*)*0*|0*20*|0*30*"),
    8: re.compile(r"0*|0*1|0*(10(00)*)*0*"),
}


def window_type(r: int, a: tuple, b: tuple) -> str:
    for sym, rows in PATTERN_TABLES[r].items():
        for row in rows:
            if a in row and b in row:
                return sym
    raise PreconditionError(f"unclassified window {a} / {b}")


def extract_pattern(m: WeightVector, n: WeightVector) -> str:
    """Slide a 4-entry window over both tuples, rescale each window so it
    starts with 1, and record the table row holding both windows."""
    same_shape(m, n)
    r = m.r
    if r not in PATTERN_TABLES:
        raise PreconditionError("patterns are tabulated for r = 5 and r = 8 only")
    if m.levels < 4:
        raise PreconditionError("need at least four weights")
    out = []
    for i in range(m.levels - 3):
        a = tuple(x * mod_inverse(m.m[i], r) % r for x in m.m[i:i + 4])
        b = tuple(x * mod_inverse(n.m[i], r) % r for x in n.m[i:i + 4])
        out.append(window_type(r, a, b))
    return "".join(out)


def pattern_in_language(p: str, r: int) -> bool:
    if r not in LANGUAGES:
        raise PreconditionError("languages are given for r = 5 and r = 8 only")
    alphabet = set("0123") if r == 5 else set("01")
    if not set(p) <= alphabet:
        raise PreconditionError(f"pattern {p!r} uses symbols outside {sorted(alphabet)}")
    return LANGUAGES[r].fullmatch(p) is not None


@dataclass
class SearchTruncated:
    evaluated: int

    def to_json(self) -> str:
        return json.dumps({"truncated": True, "evaluated": self.evaluated})


def _evaluate(args):
    m, n, conditions, extended_budget = args
    # the cheap invariant first: unequal gcd chains settle (vi) and (vii)
    return compare_conditions(m, n, conditions, extended_budget)


def search_pairs(r: int, k: int, conditions=("v", "vi", "vii"), budget: int | None = None,
                 workers: int = 1, extended_budget: int | None = None):
    """Yield a ConditionReport for every unordered pair of distinct normalized
    tuples where some condition holds or the conditions disagree. Order is
    lexicographic in (m, n). A SearchTruncated marker ends a budget-capped run."""
    tuples = list(normalized_tuples(r, k))
    pairs = itertools.combinations(tuples, 2)
    if budget is not None:
        pairs = itertools.islice(pairs, budget)
    total = len(tuples) * (len(tuples) - 1) // 2
    jobs = ((m, n, tuple(conditions), extended_budget) for m, n in pairs)
    evaluated = 0
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = ex.map(_evaluate, jobs, chunksize=256)
            for rep in results:
                evaluated += 1
                if rep.any_holds() or rep.disagree():
                    yield rep
    else:
        for job in jobs:
            rep = _evaluate(job)
            evaluated += 1
            if rep.any_holds() or rep.disagree():
                yield rep
    log.info("evaluated %d of %d pairs", evaluated, total)
    if evaluated < total:
        yield SearchTruncated(evaluated)
