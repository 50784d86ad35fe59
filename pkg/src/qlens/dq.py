"""Shift/permutation matrices, the block matrix B[r;m], the Delta vector,
gamma, the closed-form Y21 block and the ~ classes of Z/r vectors.

Convention: vectors are columns, S e_i = e_{i-1} and P_a e_i = e_{a i}.
With these, S P_a = P_a S^{1/a}, equivalently P_a S = S^a P_a.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import LevelResiduePoset, WeightVector
from .residue import PreconditionError, is_prime, mod_inverse


def shift_apply(r: int, e: int, i: int) -> int:
    return (i - e) % r


def perm_apply(r: int, a: int, i: int) -> int:
    return (a * i) % r


def shift_matrix(r: int, e: int = 1) -> np.ndarray:
    M = np.zeros((r, r), dtype=np.int64)
    idx = np.arange(r)
    M[(idx - e) % r, idx] = 1
    return M


def perm_matrix(r: int, a: int) -> np.ndarray:
    if np.gcd(a, r) != 1:
        raise PreconditionError(f"{a} is not a unit mod r={r}")
    M = np.zeros((r, r), dtype=np.int64)
    idx = np.arange(r)
    M[(a * idx) % r, idx] = 1
    return M


# S^k Y and Y S^k without building S
def shift_left(k: int, Y: np.ndarray) -> np.ndarray:
    return np.roll(Y, -k, axis=0)


def shift_right(Y: np.ndarray, k: int) -> np.ndarray:
    return np.roll(Y, k, axis=1)


@dataclass
class BlockMatrix:
    """(k+1) x (k+1) grid of r x r integer blocks; flat index (i-1)*r + j."""

    r: int
    K: int
    data: np.ndarray

    @classmethod
    def zeros(cls, r: int, K: int) -> "BlockMatrix":
        return cls(r, K, np.zeros((K * r, K * r), dtype=np.int64))

    def block(self, a: int, b: int) -> np.ndarray:
        """View of block (a, b), 1-based."""
        r = self.r
        return self.data[(a - 1) * r:a * r, (b - 1) * r:b * r]

    def set_block(self, a: int, b: int, M):
        self.block(a, b)[:] = M

    def is_lower_triangular(self) -> bool:
        return all(not self.block(a, b).any()
                   for a in range(1, self.K + 1) for b in range(a + 1, self.K + 1))

    def __matmul__(self, other: "BlockMatrix") -> "BlockMatrix":
        return BlockMatrix(self.r, self.K, self.data @ other.data)

    def __eq__(self, other):
        return (isinstance(other, BlockMatrix) and self.r == other.r
                and np.array_equal(self.data, other.data))

    def to_json(self) -> dict:
        return {"r": self.r, "blocks": self.K, "matrix": self.data.tolist()}


def build_B(w: WeightVector) -> BlockMatrix:
    """Diagonal S^{m_i}, and -S^{m_i} left of the diagonal in row i."""
    B = BlockMatrix.zeros(w.r, w.levels)
    for a in range(1, w.levels + 1):
        Sa = shift_matrix(w.r, w.weight(a))
        for b in range(1, a + 1):
            B.set_block(a, b, Sa if a == b else -Sa)
    return B


def delta(Z: np.ndarray) -> np.ndarray:
    """Delta(Z)_i = trace(S^i Z) = sum_j Z[j+i, j]."""
    Z = np.asarray(Z)
    r = Z.shape[0]
    if Z.shape != (r, r):
        raise PreconditionError("delta needs a square matrix")
    j = np.arange(r)
    return np.array([Z[(j + i) % r, j].sum() for i in range(r)], dtype=np.int64)


def gamma_bruteforce(r: int, a: int, b: int) -> int:
    a, b = a % r, b % r
    return sum(1 for j in range(r) if (a * j + b) % r <= j)


def gamma(r: int, a: int, b: int) -> int:
    """Number of j in 0..r-1 with (a j + b mod r) <= j, r prime."""
    if not is_prime(r):
        raise PreconditionError("closed form for gamma needs r prime")
    a, b = a % r, b % r
    if b == 0 and a in (0, 1):
        return r
    if a == 0:
        return r - b
    if a == 1:
        return b
    return (r + 1) // 2


def _ratio(x: int, y: int, r: int) -> int:
    return x * mod_inverse(y, r) % r


def y21_from_column(r: int, m, n, y=None) -> np.ndarray:
    """Closed-form solution of S^{n2} Y - Y S^{m1} = S^{n2} P_{n1/m1} - P_{n2/m2} S^{m2}
    with first column y (default zero).

    With u = i/n2, v = j/m1 and p = a1/a2 - 1:
        Y(i,j) = [1 <= (u-v)/p_N <= v] - [1 <= (u-v)/p_M <= v] + y[i - (n2/m1) j]
    where the brackets compare representatives in 0..r-1 and vanish when
    m1 = m2 (then also n1 = n2).
    """
    m1, m2 = (x % r for x in m)
    n1, n2 = (x % r for x in n)
    if not is_prime(r):
        raise PreconditionError("y21_from_column needs r prime")
    if (m1 == m2) != (n1 == n2):
        raise PreconditionError("gcd chains differ, no solution exists")
    y = np.zeros(r, dtype=np.int64) if y is None else np.asarray(y, dtype=np.int64)
    i = np.arange(r)[:, None]
    j = np.arange(r)[None, :]
    Y = y[(i - _ratio(n2, m1, r) * j) % r].astype(np.int64)
    if m1 != m2:
        u = i * mod_inverse(n2, r) % r
        v = j * mod_inverse(m1, r) % r
        for p, sign in ((_ratio(n1, n2, r) - 1, 1), (_ratio(m1, m2, r) - 1, -1)):
            q = (u - v) * mod_inverse(p % r, r) % r
            Y += sign * ((1 <= q) & (q <= v)).astype(np.int64)
    return Y


def y21_rhs(r: int, m, n) -> np.ndarray:
    """Right hand side of the 21-block equation with l = 0 diagonal blocks."""
    m1, m2 = m
    n1, n2 = n
    D1 = perm_matrix(r, _ratio(n1, m1, r))
    D2 = perm_matrix(r, _ratio(n2, m2, r))
    return shift_left(n2, D1) - shift_right(D2, m2)


@dataclass(frozen=True)
class DeltaClassification:
    case: str
    gamma: int
    p_M: int
    p_N: int


def delta_y21_classify(r: int, m, n) -> DeltaClassification:
    """Case label by coincidences among m1, m2, n1, n2, and the gamma with
    Delta-bar(Y21 with zero first column) ~ x_gamma."""
    if not is_prime(r):
        raise PreconditionError("classification needs r prime")
    m1, m2 = (x % r for x in m)
    n1, n2 = (x % r for x in n)
    for x in (m1, m2, n1, n2):
        mod_inverse(x, r)
    if m1 == m2 or n1 == n2:
        raise PreconditionError("classification needs m1 != m2 and n1 != n2")
    pN = (_ratio(n1, n2, r) - 1) % r
    pM = (_ratio(m1, m2, r) - 1) % r
    fM = mod_inverse(n2 * pM % r, r)
    fN = mod_inverse(n2 * pN % r, r)
    size = len({m1, m2, n1, n2})
    if size == 4:
        case, g = "4", 0
    elif size == 3:
        if m1 == n1:
            case, g = "3a", fN
        elif m1 == n2:
            case, g = "3b", fM - fN
        elif m2 == n1:
            case, g = "3c", 0
        else:
            case, g = "3d", -fM
    elif m1 == n1:
        case, g = "2a", 0
    else:
        case, g = "2b", fM - fN
    return DeltaClassification(case, g % r, pM, pN)


def x_gamma(r: int, g: int) -> tuple[int, ...]:
    return tuple(i * g % r for i in range(r))


def canonicalize_sim(x, r: int | None = None) -> tuple[int, ...]:
    """Lex-least member of the class of x under rotation and constant shift."""
    x = [int(v) for v in x]
    r = len(x) if r is None else r
    best = None
    for rot in range(len(x)):
        y = x[rot:] + x[:rot]
        c = -y[0]
        cand = tuple((v + c) % r for v in y)
        if best is None or cand < best:
            best = cand
    return best


def is_positive_cone(x, poset: LevelResiduePoset) -> bool:
    """Every negative coordinate needs a positive coordinate above it."""
    x = np.asarray(x)
    r = poset.weights.r
    if x.shape != (poset.weights.levels * r,):
        raise PreconditionError("vector length must be (k+1)*r")
    pos = [(i, j) for i in range(1, poset.weights.levels + 1) for j in range(r)
           if x[(i - 1) * r + j] > 0]
    for i in range(1, poset.weights.levels + 1):
        for j in range(r):
            if x[(i - 1) * r + j] >= 0:
                continue
            if not any(poset.dominates(p, (i, j)) for p in pos):
                return False
    return True
