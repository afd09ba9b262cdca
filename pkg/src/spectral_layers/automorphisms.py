"""Constrained rooted-automorphism search on a ball.

The search is individualisation/refinement: both the source and the target
copy of the graph start from the same colouring (sphere index, plus the
outward degree on the boundary sphere so that ball automorphisms respect the
ambient graph), constrained vertices get matching fresh colours, and colour
refinement runs in lockstep on the two sides. Any mismatch in the refined
colour-class signatures prunes the branch. When the partition is discrete the
induced map is verified edge by edge.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .graph import LayeredGraph, VertexId


@dataclass(frozen=True)
class AutomorphismConstraint:
    required_images: tuple[tuple[VertexId, VertexId], ...] = ()
    pointwise_fixed_spheres: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "required_images", tuple((VertexId(*a), VertexId(*b)) for a, b in self.required_images))
        object.__setattr__(self, "pointwise_fixed_spheres", frozenset(self.pointwise_fixed_spheres))
        for a, b in self.required_images:
            if a.sphere != b.sphere:
                raise ValueError(f"required image {a} -> {b} changes sphere")


@dataclass(frozen=True)
class Automorphism:
    """A sphere-preserving permutation: ``images[n][i]`` is the image index of vertex i of S_n."""

    images: tuple[tuple[int, ...], ...]

    @classmethod
    def identity(cls, g: LayeredGraph) -> "Automorphism":
        return cls(tuple(tuple(range(s)) for s in g.sphere_sizes))

    def __call__(self, v: VertexId) -> VertexId:
        return VertexId(v.sphere, self.images[v.sphere][v.index])

    def compose(self, other: "Automorphism") -> "Automorphism":
        """self after other."""
        return Automorphism(tuple(tuple(mine[i] for i in theirs) for mine, theirs in zip(self.images, other.images)))

    def inverse(self) -> "Automorphism":
        inv = []
        for row in self.images:
            out = [0] * len(row)
            for i, j in enumerate(row):
                out[j] = i
            inv.append(tuple(out))
        return Automorphism(tuple(inv))

    def matrix(self, n: int) -> np.ndarray:
        """P_n with P_n[tau(i), i] = 1."""
        s = len(self.images[n])
        P = np.zeros((s, s), dtype=np.int64)
        P[list(self.images[n]), list(range(s))] = 1
        return P

    def preserves(self, g: LayeredGraph) -> bool:
        if tuple(len(r) for r in self.images) != g.sphere_sizes:
            return False
        if any(sorted(r) != list(range(len(r))) for r in self.images):
            return False
        P = [self.matrix(n) for n in range(g.depth + 1)]
        for n, E in enumerate(g.cross_blocks):
            if not np.array_equal(P[n + 1] @ E @ P[n].T, E):
                return False
        for n, V in enumerate(g.intra_blocks):
            if not np.array_equal(P[n] @ V @ P[n].T, V):
                return False
        od = np.asarray(g.outward_degrees)
        return np.array_equal(P[g.depth] @ od, od)

    def satisfies(self, c: AutomorphismConstraint) -> bool:
        if any(self(a) != b for a, b in c.required_images):
            return False
        return all(self.images[n] == tuple(range(len(self.images[n]))) for n in c.pointwise_fixed_spheres if n < len(self.images))


class _Searcher:
    def __init__(self, g: LayeredGraph):
        self.g = g
        self.adj = g.adjacency_lists()
        self.n = g.size
        self.off = g.offsets()
        sphere = np.repeat(np.arange(g.depth + 1), g.sphere_sizes)
        boundary = np.full(self.n, -1)
        boundary[self.off[g.depth] :] = g.outward_degrees
        keys = sorted(set(zip(sphere.tolist(), boundary.tolist())))
        index = {k: i for i, k in enumerate(keys)}
        self.base = [index[k] for k in zip(sphere.tolist(), boundary.tolist())]

    def _signatures(self, colors):
        adj = self.adj
        return [(colors[v], tuple(sorted(colors[u] for u in adj[v]))) for v in range(self.n)]

    def _refine_pair(self, ca, cb):
        ncolors = len(set(ca))
        while True:
            sa, sb = self._signatures(ca), self._signatures(cb)
            if sorted(sa) != sorted(sb):
                return None
            keys = {k: i for i, k in enumerate(sorted(set(sa)))}
            ca = [keys[s] for s in sa]
            cb = [keys[s] for s in sb]
            if len(keys) == ncolors:
                return ca, cb
            ncolors = len(keys)

    def _search(self, ca, cb):
        res = self._refine_pair(ca, cb)
        if res is None:
            return None
        ca, cb = res
        cells_a: dict[int, list[int]] = {}
        cells_b: dict[int, list[int]] = {}
        for v, c in enumerate(ca):
            cells_a.setdefault(c, []).append(v)
        for v, c in enumerate(cb):
            cells_b.setdefault(c, []).append(v)
        open_cells = [c for c, vs in cells_a.items() if len(vs) > 1]
        if not open_cells:
            mapping = [0] * self.n
            for v, c in enumerate(ca):
                mapping[v] = cells_b[c][0]
            return mapping if self._is_automorphism(mapping) else None
        target = min(open_cells, key=lambda c: (len(cells_a[c]), c))
        v = cells_a[target][0]
        fresh = len(cells_a)
        candidates = sorted(cells_b[target], key=lambda w: (w != v, w))
        for w in candidates:
            na, nb = list(ca), list(cb)
            na[v] = nb[w] = fresh
            found = self._search(na, nb)
            if found is not None:
                return found
        return None

    def _is_automorphism(self, mapping) -> bool:
        for v in range(self.n):
            if sorted(mapping[u] for u in self.adj[v]) != self.adj[mapping[v]]:
                return False
        return True

    def find(self, c: AutomorphismConstraint) -> Automorphism | None:
        g = self.g
        ca, cb = list(self.base), list(self.base)
        fresh = max(self.base) + 1
        pinned_a: dict[int, int] = {}
        pinned_b: dict[int, int] = {}

        def pin(a, b):
            nonlocal fresh
            if pinned_a.get(a, b) != b or pinned_b.get(b, a) != a:
                return False
            if a not in pinned_a:
                pinned_a[a], pinned_b[b] = b, a
                ca[a] = cb[b] = fresh
                fresh += 1
            return True

        for n in sorted(c.pointwise_fixed_spheres):
            if n > g.depth:
                continue
            for i in range(g.sphere_sizes[n]):
                pin(self.off[n] + i, self.off[n] + i)
        for a, b in c.required_images:
            if not (0 <= a.sphere <= g.depth):
                continue
            if not pin(g.flat_index(a), g.flat_index(b)):
                return None
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 4 * self.n + 1000))
        try:
            mapping = self._search(ca, cb)
        finally:
            sys.setrecursionlimit(old)
        if mapping is None:
            return None
        images = tuple(
            tuple(mapping[self.off[n] + i] - self.off[n] for i in range(g.sphere_sizes[n]))
            for n in range(g.depth + 1)
        )
        return Automorphism(images)


def find_rooted_automorphism(g: LayeredGraph, c: AutomorphismConstraint | None = None) -> Automorphism | None:
    """A root-fixing automorphism of the ball meeting ``c``, or None if none exists.

    Boundary vertices may only map to boundary vertices of equal outward degree.
    """
    return _Searcher(g).find(c or AutomorphismConstraint())


class OrbitSplit(NamedTuple):
    n: int
    representative: VertexId
    other: VertexId


@dataclass
class SymmetryReport:
    depth: int
    splits: list[OrbitSplit] = field(default_factory=list)
    # vertex -> automorphism taking the sphere's representative (index 0) to it
    certificates: dict[VertexId, Automorphism] = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "pass" if not self.splits else "fail"

    @property
    def label(self) -> str:
        return f"certificate at depth {self.depth}"

    def __bool__(self) -> bool:
        return not self.splits


def check_spherically_symmetric(g: LayeredGraph) -> SymmetryReport:
    """For every sphere, an automorphism from vertex 0 to each other vertex."""
    searcher = _Searcher(g)
    report = SymmetryReport(g.depth)
    for n in range(g.depth + 1):
        rep = VertexId(n, 0)
        reached: dict[int, Automorphism] = {0: Automorphism.identity(g)}
        report.certificates[rep] = reached[0]
        gens: list[Automorphism] = []
        for i in range(1, g.sphere_sizes[n]):
            if i in reached:
                continue
            tau = searcher.find(AutomorphismConstraint(((rep, VertexId(n, i)),)))
            if tau is None:
                report.splits.append(OrbitSplit(n, rep, VertexId(n, i)))
                break
            gens.append(tau)
            # Close the orbit of the representative under the generators found so far.
            frontier = list(reached.items())
            while frontier:
                u, sigma = frontier.pop()
                for gen in gens:
                    w = gen.images[n][u]
                    if w not in reached:
                        reached[w] = gen.compose(sigma)
                        frontier.append((w, reached[w]))
        for i, sigma in reached.items():
            report.certificates[VertexId(n, i)] = sigma
    return report


class FPCounterexample(NamedTuple):
    condition: str
    x: VertexId
    y: VertexId


@dataclass
class FamilyPreservingReport:
    depth: int
    n_max: int
    counterexamples: list[FPCounterexample] = field(default_factory=list)
    witnesses: dict[tuple[str, VertexId, VertexId], Automorphism] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def condition_verdict(self, condition: str) -> str:
        return "fail" if any(c.condition == condition for c in self.counterexamples) else "pass"

    @property
    def verdicts(self) -> dict[str, str]:
        return {c: self.condition_verdict(c) for c in ("i", "ii", "iii")}

    @property
    def verdict(self) -> str:
        return "pass" if not self.counterexamples else "fail"

    @property
    def label(self) -> str:
        return f"certificate at depth {self.depth}"

    def constraint_for(self, key: tuple[str, VertexId, VertexId]) -> AutomorphismConstraint:
        return _fp_constraint(self.depth, *key)

    def __bool__(self) -> bool:
        return not self.counterexamples


def _fp_constraint(depth: int, condition: str, x: VertexId, y: VertexId) -> AutomorphismConstraint:
    n = x.sphere
    if condition == "i":
        return AutomorphismConstraint(((x, y),), frozenset(range(n + 1, depth + 1)))
    if condition == "ii":
        return AutomorphismConstraint(((x, y),), frozenset(range(n)))
    return AutomorphismConstraint(((x, y), (y, x)))


def _pairs(mask: np.ndarray, n: int) -> Iterable[tuple[VertexId, VertexId]]:
    for a, b in zip(*np.nonzero(np.triu(mask, k=1))):
        yield VertexId(n, int(a)), VertexId(n, int(b))


def check_family_preserving(g: LayeredGraph, n_max: int) -> FamilyPreservingReport:
    """Conditions (i)-(iii) on spheres 0..n_max.

    (i) forward brothers swap-able with every later sphere fixed pointwise,
    (ii) backward brothers with every earlier sphere fixed, (iii) neighbours
    inside a sphere exchanged by one automorphism. "Every later sphere" stops
    at the stored depth. On the last stored sphere only (ii) and (iii) apply,
    since forward brothers need S_(n+1).
    """
    report = FamilyPreservingReport(g.depth, min(n_max, g.depth))
    if n_max > g.depth:
        report.warnings.append(f"n_max {n_max} clamped to {report.n_max}")
    searcher = _Searcher(g)
    for n in range(report.n_max + 1):
        checks = []
        if n < g.depth:
            E = g.cross_blocks[n]
            checks += [("i", x, y) for x, y in _pairs(E.T @ E, n)]
        if n >= 1:
            B = g.cross_blocks[n - 1]
            checks += [("ii", x, y) for x, y in _pairs(B @ B.T, n)]
        checks += [("iii", x, y) for x, y in _pairs(g.intra_blocks[n], n)]
        for cond, x, y in checks:
            tau = searcher.find(_fp_constraint(g.depth, cond, x, y))
            if tau is None:
                report.counterexamples.append(FPCounterexample(cond, x, y))
            else:
                report.witnesses[(cond, x, y)] = tau
    return report
