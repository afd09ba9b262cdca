"""Line-oriented text format for layered graphs.

::

    spheres s_0 s_1 ... s_N
    cross n i j      # vertex j of S_n -- vertex i of S_{n+1}
    intra n i j      # edge inside S_n, i != j
    outdeg i d       # neighbours of vertex i of S_N in S_{N+1} (default 0)

``#`` starts a comment. The canonical form has the ``spheres`` header first
and the remaining lines sorted by (keyword, n, i, j), intra edges with i < j
and one ``outdeg`` line per boundary vertex.
"""

from __future__ import annotations

import numpy as np

from .graph import GraphError, LayeredGraph


class LGFError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def parse_lgf(text: str) -> LayeredGraph:
    sizes: list[int] | None = None
    records: list[tuple[int, str, list[int]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, *rest = line.split()
        try:
            nums = [int(tok) for tok in rest]
        except ValueError:
            raise LGFError(f"malformed line {raw.strip()!r}", lineno) from None
        if keyword == "spheres":
            if sizes is not None:
                raise LGFError("duplicate spheres line", lineno)
            if not nums:
                raise LGFError("spheres line needs at least one size", lineno)
            sizes = nums
            continue
        arity = {"cross": 3, "intra": 3, "outdeg": 2}.get(keyword)
        if arity is None:
            raise LGFError(f"unknown keyword {keyword!r}", lineno)
        if len(nums) != arity:
            raise LGFError(f"malformed line {raw.strip()!r}: {keyword} takes {arity} integers", lineno)
        records.append((lineno, keyword, nums))
    if sizes is None:
        raise LGFError("missing spheres line")
    if sizes[0] != 1 or any(s < 1 for s in sizes):
        raise LGFError("sphere sizes must start with 1 and be positive")

    N = len(sizes) - 1
    E = [np.zeros((sizes[n + 1], sizes[n]), dtype=np.int64) for n in range(N)]
    V = [np.zeros((s, s), dtype=np.int64) for s in sizes]
    outward = np.zeros(sizes[N], dtype=np.int64)
    seen_out: set[int] = set()
    for lineno, keyword, nums in records:
        if keyword == "cross":
            n, i, j = nums
            if not (0 <= n < N and 0 <= i < sizes[n + 1] and 0 <= j < sizes[n]):
                raise LGFError(f"edge index out of range: cross {n} {i} {j}", lineno)
            if E[n][i, j]:
                raise LGFError(f"duplicate edge: cross {n} {i} {j}", lineno)
            E[n][i, j] = 1
        elif keyword == "intra":
            n, i, j = nums
            if not (0 <= n <= N and 0 <= i < sizes[n] and 0 <= j < sizes[n]):
                raise LGFError(f"edge index out of range: intra {n} {i} {j}", lineno)
            if i == j:
                raise LGFError(f"self loop: intra {n} {i} {j}", lineno)
            if V[n][i, j]:
                raise LGFError(f"duplicate edge: intra {n} {i} {j}", lineno)
            V[n][i, j] = V[n][j, i] = 1
        else:
            i, d = nums
            if not 0 <= i < sizes[N]:
                raise LGFError(f"edge index out of range: outdeg {i}", lineno)
            if d < 0:
                raise LGFError(f"negative outward degree {d}", lineno)
            if i in seen_out:
                raise LGFError(f"duplicate outdeg for vertex {i}", lineno)
            seen_out.add(i)
            outward[i] = d
    try:
        return LayeredGraph(tuple(sizes), tuple(E), tuple(V), outward)
    except GraphError as exc:
        raise LGFError(str(exc)) from None


def serialize_lgf(g: LayeredGraph) -> str:
    keyed: list[tuple] = []
    for n, E in enumerate(g.cross_blocks):
        for i, j in zip(*np.nonzero(E)):
            keyed.append(("cross", n, int(i), int(j)))
    for n, V in enumerate(g.intra_blocks):
        for i, j in zip(*np.nonzero(np.triu(V))):
            keyed.append(("intra", n, int(i), int(j)))
    for i, d in enumerate(g.outward_degrees):
        keyed.append(("outdeg", i, int(d)))
    keyed.sort()
    lines = ["spheres " + " ".join(map(str, g.sphere_sizes))]
    lines += [" ".join(map(str, rec)) for rec in keyed]
    return "\n".join(lines) + "\n"


def normalize_lgf(text: str) -> str:
    return serialize_lgf(parse_lgf(text))


def read_lgf(path) -> LayeredGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_lgf(fh.read())


def write_lgf(g: LayeredGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_lgf(g))
