"""Graphs attached to a weight vector: the sphere graph, the skew product,
the truncated translation graph and the level/residue poset."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

from .residue import PreconditionError, mod_inverse, reduce_weights, units


@dataclass(frozen=True)
class WeightVector:
    """Parameters (r; m_1..m_{k+1}); weights are stored reduced mod r."""

    r: int
    m: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "m", reduce_weights(self.r, self.m))
        if len(self.m) < 2:
            raise PreconditionError("need at least two weights (k >= 1)")

    @classmethod
    def of(cls, r: int, *weights) -> "WeightVector":
        if len(weights) == 1 and not isinstance(weights[0], int):
            weights = tuple(weights[0])
        return cls(int(r), tuple(int(w) for w in weights))

    @property
    def k(self) -> int:
        return len(self.m) - 1

    @property
    def levels(self) -> int:
        return len(self.m)

    def weight(self, level: int) -> int:
        """1-based access, matching the level numbering used throughout."""
        return self.m[level - 1]

    def scale(self, alpha: int) -> "WeightVector":
        return WeightVector(self.r, tuple(alpha * x for x in self.m))

    def normalized(self) -> "WeightVector":
        return self.scale(mod_inverse(self.m[0], self.r))

    def canonical(self) -> "WeightVector":
        return min((self.scale(a) for a in units(self.r)), key=lambda w: w.m)

    def to_json(self) -> dict:
        return {"r": self.r, "m": list(self.m)}

    def __str__(self):
        return f"({self.r};{','.join(map(str, self.m))})"


def same_shape(m: WeightVector, n: WeightVector):
    if m.r != n.r or m.k != n.k:
        raise PreconditionError(
            f"weight vectors differ in shape: r={m.r},k={m.k} vs r={n.r},k={n.k}")


@dataclass
class DirectedGraph:
    vertices: list
    edges: list  # (source, range, label)
    names: dict = field(default_factory=dict)

    def name(self, v) -> str:
        return self.names.get(v, str(v))

    def __post_init__(self):
        vs = set(self.vertices)
        for s, t, _ in self.edges:
            if s not in vs or t not in vs:
                raise ValueError(f"edge endpoint outside vertex set: {s}->{t}")


def build_sphere_graph(k: int) -> DirectedGraph:
    if k < 1:
        raise PreconditionError("need k >= 1")
    V = list(range(1, k + 2))
    E = [(i, j, f"e{i}{j}") for i in V for j in V if i <= j]
    return DirectedGraph(V, E, {v: f"v{v}" for v in V})


def _skew_name(v):
    return f"(v{v[0]},{v[1]})"


def build_skew_product(w: WeightVector) -> DirectedGraph:
    """Vertices (i, l); edge (e_ij, l) runs from (i, l - m_i) to (j, l)."""
    r, K = w.r, w.levels
    V = [(i, l) for i in range(1, K + 1) for l in range(r)]
    E = []
    for i in range(1, K + 1):
        for j in range(i, K + 1):
            for l in range(r):
                E.append(((i, (l - w.weight(i)) % r), (j, l), (f"e{i}{j}", l)))
    return DirectedGraph(V, E, {v: _skew_name(v) for v in V})


def level_cycle(w: WeightVector, level: int, start: int = 0) -> list[int]:
    """Residues visited by the loop e_ii starting at `start` until it closes."""
    out, x = [start], (start + w.weight(level)) % w.r
    while x != start:
        out.append(x)
        x = (x + w.weight(level)) % w.r
    return out


def _chain_gcd(w: WeightVector, i: int, i2: int) -> int:
    g = w.r
    for c in range(i, i2):
        g = math.gcd(g, w.weight(c + 1) - w.weight(c))
    return g


def dominates(w: WeightVector, a: tuple[int, int], b: tuple[int, int]) -> bool:
    """a >= b in the level/residue order; a, b are (level, residue), levels 1-based."""
    (i, j), (i2, j2) = a, b
    for lvl in (i, i2):
        if not 1 <= lvl <= w.levels:
            raise PreconditionError(f"level {lvl} out of range")
    if i == i2:
        return (j - j2) % w.r == 0
    if i > i2:
        return False
    return (j2 - j) % _chain_gcd(w, i, i2) == 0


@dataclass
class LevelResiduePoset:
    weights: WeightVector
    elements: list  # sorted (level, residue)
    hasse: list  # (upper, lower) covering pairs

    def dominates(self, a, b) -> bool:
        return dominates(self.weights, a, b)

    def level(self, i: int) -> list:
        return [e for e in self.elements if e[0] == i]

    def flat_index(self, e) -> int:
        return (e[0] - 1) * self.weights.r + e[1]


def _hasse(w: WeightVector, elements: Sequence) -> list:
    # covers only happen between consecutive levels, any longer relation
    # factors through the level in between
    S = set(elements)
    out = []
    for (i, j) in elements:
        if i == w.levels:
            continue
        g = math.gcd(w.r, w.weight(i + 1) - w.weight(i))
        for j2 in range(j % g, w.r, g):
            if (i + 1, j2) in S:
                out.append(((i, j), (i + 1, j2)))
    return out


def build_poset(w: WeightVector) -> LevelResiduePoset:
    el = [(i, j) for i in range(1, w.levels + 1) for j in range(w.r)]
    return LevelResiduePoset(w, el, _hasse(w, el))


def build_poset0(w: WeightVector) -> LevelResiduePoset:
    """Elements dominated by some (i, 0)."""
    el = []
    for i2 in range(1, w.levels + 1):
        for j2 in range(w.r):
            if any(dominates(w, (i, 0), (i2, j2)) for i in range(1, i2 + 1)):
                el.append((i2, j2))
    return LevelResiduePoset(w, el, _hasse(w, el))


def ideal_invariant(w: WeightVector) -> tuple[int, ...]:
    """gcd chain d_i = gcd(m_{i+1} - m_i, r)."""
    return tuple(math.gcd(w.m[c + 1] - w.m[c], w.r) for c in range(w.k))


def build_truncated_translation(w: WeightVector, depth: int | None = None,
                                seeds: Iterable | None = None) -> DirectedGraph:
    """Finite piece of the translation graph, columns 0..depth.

    Vertices are ((i, x), n). An edge of the skew product from (i, x) to
    (j, x + m_i) goes from column n to column n + 1. By default the
    generating vertices are ((i, 0), 0) for every level.
    """
    if depth is None:
        depth = w.r + w.k + 1
    if depth < w.k + 1:
        raise PreconditionError(f"depth {depth} too small, need at least k+1={w.k + 1}")
    r = w.r
    if seeds is None:
        seeds = [((i, 0), 0) for i in range(1, w.levels + 1)]
    seen = set(seeds)
    queue = deque(seeds)
    E = []
    while queue:
        v = queue.popleft()
        (i, x), n = v
        if n == depth:
            continue
        y = (x + w.weight(i)) % r
        for j in range(i, w.levels + 1):
            u = ((j, y), n + 1)
            E.append((v, u, f"e{i}{j}"))
            if u not in seen:
                seen.add(u)
                queue.append(u)
    V = sorted(seen, key=lambda v: (v[1], v[0]))
    E.sort(key=lambda e: (e[0][1], e[0][0], e[1][0]))
    return DirectedGraph(V, E, {v: f"((v{v[0][0]},{v[0][1]}),{v[1]})" for v in V})


def periodic_line(w: WeightVector, v) -> tuple[int, int]:
    """(level, residue at column 0) of the periodic line through ((i, x), n)."""
    (i, x), n = v
    return i, (x - n * w.weight(i)) % w.r


def lines_by_level(w: WeightVector, g: DirectedGraph) -> dict[int, set[int]]:
    out = {i: set() for i in range(1, w.levels + 1)}
    for v in g.vertices:
        i, j = periodic_line(w, v)
        out[i].add(j)
    return out


def _dot_id(s: str) -> str:
    return '"' + s.replace('"', '\\"') + '"'


def export_dot(obj, name: str = "G") -> str:
    """Deterministic DOT text for a DirectedGraph or LevelResiduePoset."""
    lines = [f"digraph {name} {{"]
    if isinstance(obj, LevelResiduePoset):
        lines.append("  rankdir=TB;")
        for e in obj.elements:
            lines.append(f"  {_dot_id(f'({e[0]},{e[1]})')};")
        for a, b in obj.hasse:
            lines.append(f"  {_dot_id(f'({a[0]},{a[1]})')} -> {_dot_id(f'({b[0]},{b[1]})')};")
    else:
        for v in obj.vertices:
            lines.append(f"  {_dot_id(obj.name(v))};")
        for s, t, lab in obj.edges:
            lab = lab if isinstance(lab, str) else f"({lab[0]},{lab[1]})"
            lines.append(f"  {_dot_id(obj.name(s))} -> {_dot_id(obj.name(t))} [label={_dot_id(lab)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
