"""Intertwiners H with H B[r;m] = B[r;n] H.

H is block lower triangular with diagonal blocks S^{l_c} P_{n_c/m_c} and
free blocks Y_ab below the diagonal. Each Y_ab solves a shift-Sylvester
equation S^{n_a} Y - Y S^{m_b} = Z_ab whose right hand side only involves
blocks closer to the diagonal, so blocks are solved by increasing a - b.
"""
from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dq import BlockMatrix, build_B, is_positive_cone, perm_matrix, shift_left, shift_right
from .graphs import WeightVector, build_poset, dominates, ideal_invariant, same_shape
from .intlinalg import solve_integer_system
from .residue import mod_inverse

log = logging.getLogger(__name__)

FOUND, INCONSISTENT, DELTA_OBSTRUCTION = "found", "inconsistent", "delta_obstruction"


@dataclass
class SylvesterResult:
    status: str
    Y: np.ndarray | None = None


def twisted_delta(Z: np.ndarray, a: int, b: int) -> np.ndarray:
    """Entry i is sum_t Z[i + t a, (t+1) b]; the equation S^a Y - Y S^b = Z
    is solvable iff this vanishes. For a = b = 1 it is Delta(Z) rotated by one."""
    r = Z.shape[0]
    t = np.arange(r)
    return np.array([Z[(i + t * a) % r, ((t + 1) * b) % r].sum() for i in range(r)], dtype=np.int64)


def solve_shift_sylvester(a: int, b: int, Z, y0=None) -> SylvesterResult:
    """Solve S^a Y - Y S^b = Z with prescribed first column y0.

    Entrywise the equation reads Y(i+a, j+b) = Y(i, j) + Z(i, j+b), so the
    first column fixes everything once b is a unit.
    """
    Z = np.asarray(Z, dtype=np.int64)
    r = Z.shape[0]
    a, b = a % r, b % r
    mod_inverse(b, r)
    Y = np.zeros((r, r), dtype=np.int64)
    if y0 is not None:
        Y[:, 0] = y0
    back = (np.arange(r) - a) % r  # v[back] is v rolled down by a
    j = 0
    for _ in range(r - 1):
        nxt = (j + b) % r
        Y[:, nxt] = (Y[:, j] + Z[:, nxt])[back]
        j = nxt
    if not np.array_equal((Y[:, j] + Z[:, 0])[back], Y[:, 0]):
        return SylvesterResult(DELTA_OBSTRUCTION)
    assert np.array_equal(shift_left(a, Y) - shift_right(Y, b), Z)
    return SylvesterResult(FOUND, Y)


@dataclass
class SolverResult:
    status: str
    H: BlockMatrix | None = None
    reason: str = ""
    ell: tuple | None = None

    @property
    def found(self) -> bool:
        return self.status == FOUND

    def to_json(self) -> dict:
        out = {"status": self.status, "reason": self.reason}
        if self.ell is not None:
            out["ell"] = list(self.ell)
        if self.H is not None:
            out["H"] = self.H.data.tolist()
        return out


def diagonal_blocks(m: WeightVector, n: WeightVector, ell=None) -> list[np.ndarray]:
    r = m.r
    ell = ell or (0,) * m.levels
    return [shift_left(ell[c], perm_matrix(r, n.m[c] * mod_inverse(m.m[c], r) % r))
            for c in range(m.levels)]


def block_order(K: int):
    """Pairs (a, b), 1-based, a > b, by increasing a - b."""
    return [(b + d, b) for d in range(1, K) for b in range(1, K - d + 1)]


def support_mask(m: WeightVector, a: int, b: int) -> np.ndarray:
    """mask[i, j] true when (b, j) dominates (a, i), i.e. the gcd of the
    consecutive weight differences from level b to a divides i - j."""
    r = m.r
    g = r
    for c in range(b, a):
        g = math.gcd(g, m.weight(c + 1) - m.weight(c))
    idx = np.arange(r)
    return (idx[:, None] - idx[None, :]) % g == 0


def intertwines(H: BlockMatrix, m: WeightVector, n: WeightVector) -> bool:
    return np.array_equal(H.data @ build_B(m).data, build_B(n).data @ H.data)


def solve_condition_vii(m: WeightVector, n: WeightVector) -> SolverResult:
    """All l_c = 0, all first columns zero, zero pattern off the support."""
    same_shape(m, n)
    if ideal_invariant(m) != ideal_invariant(n):
        return SolverResult(INCONSISTENT, reason="gcd chains differ")
    r, K = m.r, m.levels
    H = BlockMatrix.zeros(r, K)
    for c, D in enumerate(diagonal_blocks(m, n), start=1):
        H.set_block(c, c, D)
    for a, b in block_order(K):
        na = n.weight(a)
        Z = shift_left(na, H.block(b, b)) - shift_right(H.block(a, a), m.weight(a))
        for c in range(b + 1, a):
            Z += shift_left(na, H.block(c, b)) - shift_right(H.block(a, c), m.weight(c))
        res = solve_shift_sylvester(na, m.weight(b), Z)
        if res.status != FOUND:
            return SolverResult(DELTA_OBSTRUCTION, reason=f"block ({a},{b}) not solvable")
        if (res.Y[~support_mask(m, a, b)] != 0).any():
            return SolverResult(INCONSISTENT, reason=f"block ({a},{b}) violates the zero pattern")
        H.set_block(a, b, res.Y)
    if not intertwines(H, m, n):
        raise AssertionError("assembled H fails the intertwining identity")
    return SolverResult(FOUND, H, ell=(0,) * K)


def check_dq1_witness(H: BlockMatrix) -> bool:
    u = np.zeros(H.K * H.r, dtype=np.int64)
    u[::H.r] = 1
    return np.array_equal(H.data @ u, u)


def block_inverse(H: BlockMatrix) -> BlockMatrix:
    """Exact inverse of a block lower triangular H with permutation diagonal."""
    r, K = H.r, H.K
    G = BlockMatrix.zeros(r, K)
    for a in range(1, K + 1):
        G.set_block(a, a, H.block(a, a).T)
    for a, b in block_order(K):
        acc = np.zeros((r, r), dtype=np.int64)
        for c in range(b, a):
            acc += H.block(a, c) @ G.block(c, b)
        G.set_block(a, b, -H.block(a, a).T @ acc)
    assert np.array_equal(G.data @ H.data, np.eye(r * K, dtype=np.int64))
    return G


def order_diagnostic(H: BlockMatrix, m: WeightVector, n: WeightVector) -> dict:
    """Whether H and H^{-1} send every basis vector into the positive cone."""
    Pm, Pn = build_poset(m), build_poset(n)
    G = block_inverse(H)
    N = H.K * H.r
    return {"forward": all(is_positive_cone(H.data[:, t], Pn) for t in range(N)),
            "backward": all(is_positive_cone(G.data[:, t], Pm) for t in range(N))}


def _affine_system(m: WeightVector, n: WeightVector, ell, dq1: bool, zero_first: bool):
    """Equations in the first columns of all Y_ab for a fixed l.

    Every block is an affine function of the unknowns, stored as an
    (r, r, nv + 1) array whose last slot is the constant term.
    """
    r, K = m.r, m.levels
    order = block_order(K)
    slot = {blk: t for t, blk in enumerate(order)}
    nv = len(order) * r
    D = diagonal_blocks(m, n, ell)
    rows = []

    def const(M):
        A = np.zeros((r, r, nv + 1), dtype=np.int64)
        A[:, :, nv] = M
        return A

    blocks = {(c, c): const(D[c - 1]) for c in range(1, K + 1)}
    for a, b in order:
        na, mb = n.weight(a) % r, m.weight(b) % r
        Z = const(shift_left(na, D[b - 1]) - shift_right(D[a - 1], m.weight(a)))
        for c in range(b + 1, a):
            Z += np.roll(blocks[(c, b)], -na, axis=0) - np.roll(blocks[(a, c)], m.weight(c) % r, axis=1)
        Y = np.zeros((r, r, nv + 1), dtype=np.int64)
        base = slot[(a, b)] * r
        Y[np.arange(r), 0, base + np.arange(r)] = 1
        j = 0
        for _ in range(r - 1):
            nxt = (j + mb) % r
            Y[:, nxt] = np.roll(Y[:, j] + Z[:, nxt], na, axis=0)
            j = nxt
        rows.extend(np.roll(Y[:, j] + Z[:, 0], na, axis=0) - Y[:, 0])
        rows.extend(Y[~support_mask(m, a, b)])
        if zero_first:
            rows.extend(Y[:, 0])
        blocks[(a, b)] = Y
    if dq1:
        for a in range(1, K + 1):
            tot = blocks[(a, a)][:, 0].copy()
            tot[0, nv] -= 1
            for b in range(1, a):
                tot += blocks[(a, b)][:, 0]
            rows.extend(tot)
    A = [[int(v) for v in row[:nv]] for row in rows]
    rhs = [-int(row[nv]) for row in rows]
    return A, rhs, blocks, nv


def solve_with_ell(m: WeightVector, n: WeightVector, ell, dq1: bool = False,
                   zero_first: bool = False) -> SolverResult:
    """Decide whether some H with the given l exists (integral first columns)."""
    r, K = m.r, m.levels
    A, rhs, blocks, nv = _affine_system(m, n, ell, dq1, zero_first)
    x = solve_integer_system(A, rhs)
    if x is None:
        return SolverResult(INCONSISTENT, reason="no integral solution", ell=tuple(ell))
    xv = np.array(x + [1], dtype=object)
    H = BlockMatrix.zeros(r, K)
    for (a, b), Y in blocks.items():
        H.set_block(a, b, (Y.astype(object) @ xv).astype(np.int64))
    if not intertwines(H, m, n):
        raise AssertionError("integral solution fails the intertwining identity")
    for a, b in block_order(K):
        if (H.block(a, b)[~support_mask(m, a, b)] != 0).any():
            raise AssertionError("integral solution violates the zero pattern")
    if dq1 and not check_dq1_witness(H):
        raise AssertionError("integral solution fails the DQ1 constraint")
    return SolverResult(FOUND, H, ell=tuple(ell))


@dataclass
class SearchResult:
    result: SolverResult
    examined: int
    truncated: bool
    log: list = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.result.found


def _ell_tuples(r: int, K: int):
    # l_1 = 0 is forced for both DQ and DQ1
    for rest in itertools.product(range(r), repeat=K - 1):
        yield (0,) + rest


def _try(args):
    m, n, ell, dq1 = args
    return solve_with_ell(m, n, ell, dq1=dq1)


def exhaustive_dq_search(m: WeightVector, n: WeightVector, budget: int | None = None,
                         dq1: bool = False, workers: int = 1) -> SearchResult:
    """Search all l tuples (lexicographic order) for an intertwiner whose
    first columns are free integers. Reports the least l that works."""
    same_shape(m, n)
    if ideal_invariant(m) != ideal_invariant(n):
        return SearchResult(SolverResult(INCONSISTENT, reason="gcd chains differ"), 0, False,
                            ["gcd chains differ; nothing to search"])
    K = m.levels
    total = m.r ** (K - 1)
    limit = total if budget is None else min(budget, total)
    tuples = itertools.islice(_ell_tuples(m.r, K), limit)
    notes = [f"searching {limit} of {total} shift tuples ({'DQ1' if dq1 else 'DQ'})"]
    examined = 0
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            while True:
                batch = list(itertools.islice(tuples, 8 * workers))
                if not batch:
                    break
                for res in ex.map(_try, [(m, n, e, dq1) for e in batch]):
                    examined += 1
                    if res.found:
                        notes.append(f"witness at l={res.ell}")
                        return SearchResult(res, examined, False, notes)
    else:
        for ell in tuples:
            examined += 1
            res = solve_with_ell(m, n, ell, dq1=dq1)
            if res.found:
                notes.append(f"witness at l={res.ell}")
                return SearchResult(res, examined, False, notes)
    truncated = limit < total
    if truncated:
        notes.append("budget exhausted before the search space")
        log.info("search truncated after %d tuples", examined)
    return SearchResult(SolverResult(INCONSISTENT, reason="no witness" + (" within budget" if truncated else "")),
                        examined, truncated, notes)
