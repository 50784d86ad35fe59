"""Admissible generator paths and the length multisets built from them."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .graphs import WeightVector, same_shape
from .residue import PreconditionError, mod_inverse


@dataclass(frozen=True)
class AdmissiblePath:
    chain: tuple[int, ...]  # strictly increasing levels, 1-based
    loops: tuple[int, ...]  # loop count at each level of the chain

    @property
    def length(self) -> int:
        return sum(self.loops) + len(self.chain) - 1


def _first_hit(x: int, step: int, r: int) -> int:
    # number of steps of size `step` from x until residue 0
    return (-x * mod_inverse(step, r)) % r


def _check_pair(w: WeightVector, s: int, t: int):
    if not 1 <= s < t <= w.levels:
        raise PreconditionError(f"need 1 <= s < t <= {w.levels}, got s={s}, t={t}")


def enumerate_admissible(w: WeightVector, s: int, t: int) -> list[AdmissiblePath]:
    """All paths from (v_s,0) to (v_t,0) in the skew product that never pass
    through a residue-0 vertex in between."""
    _check_pair(w, s, t)
    r = w.r
    out = []

    def walk(level, x, chain, loops):
        step = w.weight(level)
        if level == t:
            out.append(AdmissiblePath(chain + (level,), loops + (_first_hit(x, step, r),)))
            return
        if level == s:
            rng = range(r)
        else:
            if x == 0:
                return
            rng = range(_first_hit(x, step, r))
        for k in rng:
            y = (x + (k + 1) * step) % r
            for nxt in range(level + 1, t + 1):
                walk(nxt, y, chain + (level,), loops + (k,))

    walk(s, 0, (), ())
    return out


@dataclass
class PathMultiset:
    """Residue counts of admissible path lengths per level pair (s, t)."""

    r: int
    counts: dict  # (s, t) -> tuple of r ints
    raw: dict = field(default_factory=dict)  # (s, t) -> sorted lengths, k=1 only

    def __eq__(self, other):
        return isinstance(other, PathMultiset) and self.r == other.r and self.counts == other.counts

    def to_json(self) -> dict:
        return {"r": self.r,
                "pairs": [{"s": s, "t": t, "counts": list(self.counts[(s, t)])}
                          for (s, t) in sorted(self.counts)]}


def _residue_counts(lengths, r) -> tuple[int, ...]:
    c = [0] * r
    for L in lengths:
        c[L % r] += 1
    return tuple(c)


def pair_multiset_closed_form(r: int, m1: int, m2: int) -> PathMultiset:
    """Each multiple of g = gcd(m2 - m1, r) occurs g times."""
    g = math.gcd(m2 - m1, r)
    c = [0] * r
    for j in range(0, r, g):
        c[j] = g
    return PathMultiset(r, {(1, 2): tuple(c)})


def multiset_wbar(w: WeightVector, method: str = "auto") -> PathMultiset:
    """W-bar of w. `method` is "enumerate", "transfer", or "auto" (enumerate
    for k = 1 where raw lengths are kept, transfer matrices otherwise)."""
    if method == "auto":
        method = "enumerate" if w.k == 1 else "transfer"
    if method == "transfer":
        return transfer_multiset(w)
    if method != "enumerate":
        raise PreconditionError(f"unknown method {method!r}")
    counts, raw = {}, {}
    for s in range(1, w.levels):
        for t in range(s + 1, w.levels + 1):
            lens = [p.length for p in enumerate_admissible(w, s, t)]
            counts[(s, t)] = _residue_counts(lens, w.r)
            if w.k == 1:
                raw[(s, t)] = sorted(lens)
    return PathMultiset(w.r, counts, raw)


def wbar_equal(m: WeightVector, n: WeightVector) -> bool:
    same_shape(m, n)
    return multiset_wbar(m) == multiset_wbar(n)


@dataclass(frozen=True)
class TriplePathDecomposition:
    t2_first: int  # t2'
    t2_second: int  # t2''
    t2: int
    admissible: bool


def triple_decompose(w: WeightVector, t1: int, t3: int) -> TriplePathDecomposition:
    if w.levels != 3:
        raise PreconditionError("triple_decompose needs exactly three levels")
    r = w.r
    m1, m2, m3 = w.m
    inv2 = mod_inverse(m2, r)
    a = (-inv2 * m1 * (t1 + 1)) % r
    b = (-inv2 * m3 * t3 - 1) % r
    return TriplePathDecomposition(a, b, (a + b) % r, a + b >= r)


def x_table(r: int, m2: int, m1: int = 1) -> list[int]:
    """X_i = length of the two-level path with i loops at the top level."""
    w = WeightVector(r, (m1, m2))
    return [i + _first_hit(m1 * (i + 1) % r, w.m[1], r) + 1 for i in range(r)]


def five_dim_cases(r: int, m: int) -> list[int]:
    """For n = (2 - 1/m)^{-1}, classify each i in 0..r-2 by which of
    X_i = Y_{r-2-i} + {0, -r, +r} holds (1, 2, 3), requiring the paired
    identity on Y_i, X_{r-2-i}. 0 means no case applies."""
    n = mod_inverse((2 - mod_inverse(m, r)) % r, r)
    X, Y = x_table(r, m), x_table(r, n)
    out = []
    for i in range(r - 1):
        j = r - 2 - i
        case = 0
        for label, off in ((1, 0), (2, -r), (3, r)):
            if X[i] == Y[j] + off and Y[i] == X[j] + off:
                case = label
        out.append(case)
    return out


def _cyc_mul_vec_mat(vec: np.ndarray, mat: np.ndarray) -> np.ndarray:
    """vec[x, :] (polys) times mat[x, y, :] in Z[t]/(t^r - 1)."""
    r = vec.shape[-1]
    out = np.zeros((mat.shape[1], r), dtype=np.int64)
    for d in range(r):
        if vec[:, d].any():
            out += np.roll(np.einsum("x,xyk->yk", vec[:, d], mat), d, axis=-1)
    return out


def _exit_matrix(r: int, step: int, start: bool) -> np.ndarray:
    M = np.zeros((r, r, r), dtype=np.int64)
    for x in range(r):
        if start:
            if x:
                continue
            ks = range(r)
        else:
            if x == 0:
                continue
            ks = range(_first_hit(x, step, r))
        for k in ks:
            M[x, (x + (k + 1) * step) % r, (k + 1) % r] += 1
    return M


def _transfer_from(w: WeightVector, s: int) -> dict[int, tuple[int, ...]]:
    """Residue counts for every pair (s, t), t > s, in one sweep."""
    r = w.r
    inflow = {c: np.zeros((r, r), dtype=np.int64) for c in range(s, w.levels + 1)}
    inflow[s][0, 0] = 1
    out = {}
    for c in range(s, w.levels + 1):
        if c > s:
            res = np.zeros(r, dtype=np.int64)
            for x in range(r):
                res += np.roll(inflow[c][x], _first_hit(x, w.weight(c), r))
            out[c] = tuple(int(v) for v in res)
        if c < w.levels:
            flow = _cyc_mul_vec_mat(inflow[c], _exit_matrix(r, w.weight(c), c == s))
            for c2 in range(c + 1, w.levels + 1):
                inflow[c2] += flow
    return out


def transfer_count(w: WeightVector, s: int, t: int) -> tuple[int, ...]:
    """Residue counts for the pair (s, t) via per-level transfer matrices
    over Z[x]/(x^r - 1). Index = path length mod r."""
    _check_pair(w, s, t)
    # levels past t never feed back into t
    return _transfer_from(WeightVector(w.r, w.m[:t]), s)[t]


def transfer_multiset(w: WeightVector) -> PathMultiset:
    counts = {}
    for s in range(1, w.levels):
        for t, c in _transfer_from(w, s).items():
            counts[(s, t)] = c
    return PathMultiset(w.r, counts)


def d3_certificate(m: WeightVector, n: WeightVector) -> list[dict]:
    """Pair generator paths of m and n with equal length mod r.

    Each entry carries ell = (|nu| - |mu|) / r where nu is the m-path and mu
    the n-path it is sent to.
    """
    same_shape(m, n)
    if m.k != 1:
        raise PreconditionError("d3_certificate needs k = 1")
    r = m.r
    P = {key: defaultdict(list) for key in ("m", "n")}
    for key, w in (("m", m), ("n", n)):
        for p in enumerate_admissible(w, 1, 2):
            P[key][p.length % r].append(p)
    if {x: len(v) for x, v in P["m"].items()} != {x: len(v) for x, v in P["n"].items()}:
        raise PreconditionError("no equivariant pairing exists: length multisets differ")
    out = []
    for res in sorted(P["m"]):
        A = sorted(P["m"][res], key=lambda p: (p.length, p.loops))
        B = sorted(P["n"][res], key=lambda p: (p.length, p.loops))
        for a, b in zip(A, B):
            out.append({"residue": res, "m_loops": list(a.loops), "n_loops": list(b.loops),
                        "m_length": a.length, "n_length": b.length,
                        "ell": (a.length - b.length) // r})
    return out
