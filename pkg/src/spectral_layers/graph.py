"""Rooted graphs stored sphere by sphere.

A ball of radius N around the root o is kept as

* ``sphere_sizes``  s_0 = 1, s_1, ..., s_N
* ``cross_blocks``  E_n of shape (s_{n+1}, s_n), E_n[i, j] = 1 iff vertex j of
  S_n is joined to vertex i of S_{n+1}
* ``intra_blocks``  V_n of shape (s_n, s_n), the adjacency matrix of S_n
* ``outward_degrees`` the number of neighbours each vertex of S_N has in
  S_{N+1} of the ambient (possibly infinite) graph.

Every operator built here is the compression of the ambient operator to the
ball, so boundary vertices keep their ambient degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .sequences import SequenceExhausted, SequenceSpec

OPERATOR_KINDS = ("adjacency", "laplacian", "normalized")


class GraphError(ValueError):
    pass


class VertexId(NamedTuple):
    sphere: int
    index: int

    def __str__(self) -> str:
        return f"({self.sphere},{self.index})"


def _frozen(a, dtype=np.int64) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LayeredGraph:
    sphere_sizes: tuple[int, ...]
    cross_blocks: tuple[np.ndarray, ...]
    intra_blocks: tuple[np.ndarray, ...]
    outward_degrees: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "sphere_sizes", tuple(int(s) for s in self.sphere_sizes))
        object.__setattr__(self, "cross_blocks", tuple(_frozen(e) for e in self.cross_blocks))
        object.__setattr__(self, "intra_blocks", tuple(_frozen(v) for v in self.intra_blocks))
        object.__setattr__(self, "outward_degrees", _frozen(self.outward_degrees))
        self._validate()

    def _validate(self) -> None:
        s = self.sphere_sizes
        if not s or s[0] != 1:
            raise GraphError("s_0 must be 1")
        if any(x < 1 for x in s):
            raise GraphError("every sphere must be nonempty")
        N = len(s) - 1
        if len(self.cross_blocks) != N or len(self.intra_blocks) != N + 1:
            raise GraphError("block counts do not match depth")
        for n, E in enumerate(self.cross_blocks):
            if E.shape != (s[n + 1], s[n]):
                raise GraphError(f"E_{n} has shape {E.shape}, expected {(s[n + 1], s[n])}")
            if not np.isin(E, (0, 1)).all():
                raise GraphError(f"E_{n} is not 0/1")
            empty = np.flatnonzero(E.sum(axis=1) == 0)
            if empty.size:
                raise GraphError(f"disconnected vertex {VertexId(n + 1, int(empty[0]))}")
        for n, V in enumerate(self.intra_blocks):
            if V.shape != (s[n], s[n]):
                raise GraphError(f"V_{n} has shape {V.shape}")
            if not np.isin(V, (0, 1)).all():
                raise GraphError(f"V_{n} is not 0/1")
            if (V != V.T).any():
                raise GraphError(f"V_{n} is not symmetric")
            if np.diag(V).any():
                raise GraphError(f"self loop in S_{n}")
        if self.outward_degrees.shape != (s[N],):
            raise GraphError("outward_degrees must have one entry per vertex of S_N")
        if (self.outward_degrees < 0).any():
            raise GraphError("negative outward degree")

    @property
    def depth(self) -> int:
        return len(self.sphere_sizes) - 1

    @property
    def size(self) -> int:
        return sum(self.sphere_sizes)

    def offsets(self) -> list[int]:
        out = [0]
        for s in self.sphere_sizes:
            out.append(out[-1] + s)
        return out

    def sphere_slice(self, n: int) -> slice:
        off = self.offsets()
        return slice(off[n], off[n + 1])

    def vertices(self, n: int | None = None) -> Iterator[VertexId]:
        spheres = range(self.depth + 1) if n is None else (n,)
        for m in spheres:
            for i in range(self.sphere_sizes[m]):
                yield VertexId(m, i)

    def flat_index(self, v: VertexId) -> int:
        if not (0 <= v.sphere <= self.depth and 0 <= v.index < self.sphere_sizes[v.sphere]):
            raise GraphError(f"vertex {v} not in ball of depth {self.depth}")
        return self.offsets()[v.sphere] + v.index

    def vertex_at(self, flat: int) -> VertexId:
        off = self.offsets()
        n = int(np.searchsorted(off, flat, side="right")) - 1
        return VertexId(n, flat - off[n])

    def backward_degrees(self, n: int) -> np.ndarray:
        if n == 0:
            return np.zeros(1, dtype=np.int64)
        return self.cross_blocks[n - 1].sum(axis=1)

    def forward_degrees(self, n: int) -> np.ndarray:
        if n == self.depth:
            return np.asarray(self.outward_degrees)
        return self.cross_blocks[n].sum(axis=0)

    def intra_degrees(self, n: int) -> np.ndarray:
        return self.intra_blocks[n].sum(axis=1)

    def sphere_degrees(self, n: int) -> np.ndarray:
        return self.backward_degrees(n) + self.intra_degrees(n) + self.forward_degrees(n)

    def degrees(self) -> np.ndarray:
        return np.concatenate([self.sphere_degrees(n) for n in range(self.depth + 1)])

    def adjacency_lists(self) -> list[list[int]]:
        """Neighbour lists over flat indices (inside the ball only)."""
        off = self.offsets()
        adj: list[list[int]] = [[] for _ in range(self.size)]
        for n, E in enumerate(self.cross_blocks):
            for i, j in zip(*np.nonzero(E)):
                a, b = off[n + 1] + int(i), off[n] + int(j)
                adj[a].append(b)
                adj[b].append(a)
        for n, V in enumerate(self.intra_blocks):
            for i, j in zip(*np.nonzero(V)):
                adj[off[n] + int(i)].append(off[n] + int(j))
        for lst in adj:
            lst.sort()
        return adj

    def same_as(self, other: "LayeredGraph") -> bool:
        return (
            self.sphere_sizes == other.sphere_sizes
            and all(np.array_equal(a, b) for a, b in zip(self.cross_blocks, other.cross_blocks))
            and all(np.array_equal(a, b) for a, b in zip(self.intra_blocks, other.intra_blocks))
            and np.array_equal(self.outward_degrees, other.outward_degrees)
        )

    def __eq__(self, other):
        if not isinstance(other, LayeredGraph):
            return NotImplemented
        return self.same_as(other)

    __hash__ = None  # type: ignore[assignment]

    def truncate(self, depth: int) -> "LayeredGraph":
        """The ball of smaller radius, with outward degrees read off E_depth."""
        if not 0 <= depth <= self.depth:
            raise GraphError(f"cannot truncate depth {self.depth} graph to {depth}")
        return LayeredGraph(
            self.sphere_sizes[: depth + 1],
            self.cross_blocks[:depth],
            self.intra_blocks[: depth + 1],
            self.forward_degrees(depth),
        )


def from_edges(
    sphere_sizes: Sequence[int],
    cross: Sequence[tuple[int, int, int]] = (),
    intra: Sequence[tuple[int, int, int]] = (),
    outward: Sequence[int] | None = None,
) -> LayeredGraph:
    """Build from edge triples; ``cross`` holds (n, i, j) with j in S_n, i in S_{n+1}."""
    s = list(sphere_sizes)
    E = [np.zeros((s[n + 1], s[n]), dtype=np.int64) for n in range(len(s) - 1)]
    V = [np.zeros((k, k), dtype=np.int64) for k in s]
    for n, i, j in cross:
        E[n][i, j] = 1
    for n, i, j in intra:
        V[n][i, j] = V[n][j, i] = 1
    if outward is None:
        outward = [0] * s[-1]
    return LayeredGraph(tuple(s), tuple(E), tuple(V), np.asarray(outward))


def antitree_sizes(s: SequenceSpec, depth: int) -> list[int]:
    """s_0 .. s_{depth+1}; s_{depth+1} is 0 when the sequence stops at depth."""
    sizes = s.values(0, depth + 1)
    try:
        sizes.append(s.value_at(depth + 1))
    except SequenceExhausted:
        sizes.append(0)
    return sizes


def build_antitree(s: SequenceSpec, depth: int) -> LayeredGraph:
    """Every vertex of S_n is joined to all of S_{n-1} and S_{n+1}, none of S_n.

    A finite sequence ending exactly at ``depth`` describes a finite graph, so
    the boundary then has no outward edges.
    """
    sizes = antitree_sizes(s, depth)
    if sizes[0] != 1:
        raise GraphError("antitree needs s_0 = 1")
    if any(v < 1 for v in sizes[:-1]) or sizes[-1] < 0:
        raise GraphError("antitree sphere sizes must be positive")
    E = [np.ones((sizes[n + 1], sizes[n]), dtype=np.int64) for n in range(depth)]
    V = [np.zeros((k, k), dtype=np.int64) for k in sizes[: depth + 1]]
    outward = np.full(sizes[depth], sizes[depth + 1])
    return LayeredGraph(tuple(sizes[: depth + 1]), tuple(E), tuple(V), outward)


def build_tree_complete_spheres(k: SequenceSpec, gamma: SequenceSpec, depth: int) -> LayeredGraph:
    """G(k, gamma): the spherically symmetric tree T(k), with S_n made complete when gamma_n = 1.

    Vertex i of S_{n+1} hangs off vertex i // k_{n+1} of S_n. Index 0 of both
    sequences is never read.
    """
    ks = [k.value_at(n) for n in range(1, depth + 2)]
    gs = [gamma.value_at(n) for n in range(1, depth + 1)]
    if any(v < 1 for v in ks):
        raise GraphError("branching numbers must be >= 1")
    if any(g not in (0, 1) for g in gs):
        raise GraphError("gamma values must be 0 or 1")
    sizes = [1]
    for n in range(depth):
        sizes.append(sizes[-1] * ks[n])
    E = []
    for n in range(depth):
        blk = np.zeros((sizes[n + 1], sizes[n]), dtype=np.int64)
        blk[np.arange(sizes[n + 1]), np.arange(sizes[n + 1]) // ks[n]] = 1
        E.append(blk)
    V = [np.zeros((1, 1), dtype=np.int64)]
    for n in range(1, depth + 1):
        m = sizes[n]
        V.append(np.ones((m, m), dtype=np.int64) - np.eye(m, dtype=np.int64) if gs[n - 1] else np.zeros((m, m), dtype=np.int64))
    outward = np.full(sizes[depth], ks[depth])
    return LayeredGraph(tuple(sizes), tuple(E), tuple(V), outward)


def attach_rays(g: LayeredGraph, length: int) -> LayeredGraph:
    """Continue every boundary vertex with outward degree 1 by a path of ``length`` vertices.

    Models the "copy of N" continuation; the new boundary keeps outward degree 1.
    """
    if length < 0:
        raise GraphError("ray length must be >= 0")
    if length == 0:
        return g
    od = np.asarray(g.outward_degrees)
    if ((od != 0) & (od != 1)).any():
        raise GraphError("rays can only continue vertices of outward degree 0 or 1")
    ends = np.flatnonzero(od == 1)
    if ends.size == 0:
        return g
    sizes = list(g.sphere_sizes)
    E = list(g.cross_blocks)
    V = list(g.intra_blocks)
    # First step: only the continuing vertices get a child.
    first = np.zeros((ends.size, sizes[-1]), dtype=np.int64)
    first[np.arange(ends.size), ends] = 1
    E.append(first)
    sizes.append(int(ends.size))
    V.append(np.zeros((ends.size, ends.size), dtype=np.int64))
    for _ in range(length - 1):
        E.append(np.eye(ends.size, dtype=np.int64))
        sizes.append(int(ends.size))
        V.append(np.zeros((ends.size, ends.size), dtype=np.int64))
    return LayeredGraph(tuple(sizes), tuple(E), tuple(V), np.ones(ends.size, dtype=np.int64))


def compress_operator(g: LayeredGraph, kind: str = "adjacency") -> np.ndarray:
    """Dense compression P_N H P_N in sphere-major vertex order.

    ``laplacian`` is D - A with ambient degrees; ``normalized`` is the
    symmetric form I - D^{-1/2} A D^{-1/2}.
    """
    if kind not in OPERATOR_KINDS:
        raise ValueError(f"unknown operator kind {kind!r}")
    size = g.size
    off = g.offsets()
    A = np.zeros((size, size))
    for n, V in enumerate(g.intra_blocks):
        A[off[n] : off[n + 1], off[n] : off[n + 1]] = V
    for n, E in enumerate(g.cross_blocks):
        A[off[n + 1] : off[n + 2], off[n] : off[n + 1]] = E
        A[off[n] : off[n + 1], off[n + 1] : off[n + 2]] = E.T
    if kind == "adjacency":
        return A
    deg = g.degrees().astype(float)
    if kind == "laplacian":
        return np.diag(deg) - A
    if (deg == 0).any():
        raise GraphError(f"normalized Laplacian undefined: vertex {g.vertex_at(int(np.flatnonzero(deg == 0)[0]))} has degree 0")
    inv = 1.0 / np.sqrt(deg)
    return np.eye(size) - inv[:, None] * A * inv[None, :]
