"""Path counts between vertices of one sphere and the operators that generate them.

``lambda_matrix(g, "plus", n, j)`` is F^T F with F = E_{n+j-1} ... E_n, the
matrix of j-step forward-then-back path counts on S_n. ``"minus"`` is
B B^T with B = E_{n-1} ... E_{n-j}; it is the identity when j > n or n = 0.

All arithmetic is on Python integers (object arrays), so counts are exact.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .graph import GraphError, LayeredGraph, VertexId

log = logging.getLogger(__name__)

SPECIES = ("fb", "bf", "tailed_f", "headed_f", "tailed_b", "headed_b")
CHECK_KINDS = ("fb/bf", "tailed/headed_f", "tailed/headed_b")


class RadiusError(GraphError):
    pass


def _obj(a) -> np.ndarray:
    return np.array(a, dtype=object)


def _eye(m: int) -> np.ndarray:
    return _obj(np.eye(m, dtype=np.int64))


def _chain(g: LayeredGraph, lo: int, hi: int) -> np.ndarray:
    """E_{hi-1} ... E_lo : l2(S_lo) -> l2(S_hi)."""
    out = _eye(g.sphere_sizes[lo])
    for m in range(lo, hi):
        out = _obj(g.cross_blocks[m]).dot(out)
    return out


def lambda_matrix(g: LayeredGraph, direction: str, n: int, j: int) -> np.ndarray:
    if not 0 <= n <= g.depth:
        raise RadiusError(f"sphere {n} outside ball of depth {g.depth}")
    if j < 0:
        raise RadiusError("radius must be nonnegative")
    if direction == "plus":
        if n + j > g.depth:
            raise RadiusError(
                f"Lambda_{{{n},+{j}}} needs E_{n + j - 1}, beyond depth {g.depth}"
            )
        F = _chain(g, n, n + j)
        return F.T.dot(F)
    if direction == "minus":
        if j > n or n == 0:
            return _eye(g.sphere_sizes[n])
        B = _chain(g, n - j, n)
        return B.dot(B.T)
    raise ValueError(f"direction must be 'plus' or 'minus', not {direction!r}")


def _backward_counts(g: LayeredGraph, n: int, j: int) -> np.ndarray:
    # True j-backward path counts: none exist below the root.
    if j > n:
        return _obj(np.zeros((g.sphere_sizes[n],) * 2, dtype=np.int64))
    return lambda_matrix(g, "minus", n, j)


class Species(NamedTuple):
    """A path species. ``fb``: (k forward, l backward); ``bf``: (l backward, k forward).

    The tailed/headed species use only ``first`` (the radius k).
    """

    kind: str
    first: int
    second: int = 0

    def __str__(self) -> str:
        if self.kind in ("fb", "bf"):
            return f"{self.kind}({self.first},{self.second})"
        return f"{self.kind}({self.first})"


def _profile(species: Species, n: int) -> list[int]:
    """Sphere index of each successive vertex of a path of this species."""
    def forward(k):
        return [n + i for i in range(1, k + 1)] + [n + k - i for i in range(1, k + 1)]

    def backward(k):
        return [n - i for i in range(1, k + 1)] + [n - k + i for i in range(1, k + 1)]

    kind, a, b = species
    if kind == "fb":
        return forward(a) + backward(b)
    if kind == "bf":
        return backward(a) + forward(b)
    if kind == "tailed_f":
        return forward(a) + [n]
    if kind == "headed_f":
        return [n] + forward(a)
    if kind == "tailed_b":
        return backward(a) + [n]
    if kind == "headed_b":
        return [n] + backward(a)
    raise ValueError(f"unknown species {kind!r}")


def _check_radius(g: LayeredGraph, species: Species, n: int) -> None:
    if species.kind not in SPECIES:
        raise ValueError(f"unknown species {species.kind!r}")
    if species.first < 0 or species.second < 0:
        raise RadiusError("radii must be nonnegative")
    forward = {"fb": species.first, "bf": species.second}.get(species.kind)
    if forward is None:
        forward = species.first if species.kind.endswith("_f") else 0
    if n + forward > g.depth:
        raise RadiusError(f"{species} from S_{n} leaves the ball of depth {g.depth}")


def species_matrix(g: LayeredGraph, species: Species, n: int) -> np.ndarray:
    """M with M[y, x] = number of paths of this species from x to y."""
    _check_radius(g, species, n)
    kind, a, b = species
    V = _obj(g.intra_blocks[n])
    if kind == "fb":
        return _backward_counts(g, n, b).dot(lambda_matrix(g, "plus", n, a))
    if kind == "bf":
        return lambda_matrix(g, "plus", n, b).dot(_backward_counts(g, n, a))
    if kind == "tailed_f":
        return V.dot(lambda_matrix(g, "plus", n, a))
    if kind == "headed_f":
        return lambda_matrix(g, "plus", n, a).dot(V)
    if kind == "tailed_b":
        return V.dot(_backward_counts(g, n, a))
    return _backward_counts(g, n, a).dot(V)


def enumerate_walks(g: LayeredGraph, species: Species, x: VertexId, adj=None) -> dict[int, int]:
    """Endpoint histogram of all walks from x following the species' sphere profile.

    Plain depth-first enumeration of every walk; independent of the matrix route.
    """
    _check_radius(g, species, x.sphere)
    adj = adj if adj is not None else g.adjacency_lists()
    off = g.offsets()
    sphere_of = np.repeat(np.arange(g.depth + 1), g.sphere_sizes)
    profile = _profile(species, x.sphere)
    counts: dict[int, int] = {}
    stack = [(g.flat_index(x), 0)]
    while stack:
        v, step = stack.pop()
        if step == len(profile):
            counts[v - off[x.sphere]] = counts.get(v - off[x.sphere], 0) + 1
            continue
        target = profile[step]
        for u in adj[v]:
            if sphere_of[u] == target:
                stack.append((u, step + 1))
    return counts


def count_paths(g: LayeredGraph, species: Species, x: VertexId, y: VertexId, method: str = "matrix") -> int:
    if x.sphere != y.sphere:
        raise GraphError(f"{x} and {y} lie on different spheres")
    g.flat_index(x), g.flat_index(y)
    if method == "matrix":
        return int(species_matrix(g, species, x.sphere)[y.index, x.index])
    if method == "enumerate":
        return enumerate_walks(g, species, x).get(y.index, 0)
    raise ValueError(f"method must be 'matrix' or 'enumerate', not {method!r}")


class Violation(NamedTuple):
    n: int
    kind: str
    k: int
    l: int
    x: VertexId
    y: VertexId
    count_lhs: int
    count_rhs: int

    def species(self) -> tuple[Species, Species]:
        """The two species whose counts were compared (lhs, rhs)."""
        if self.kind == "fb/bf":
            return Species("fb", self.k, self.l), Species("bf", self.l, self.k)
        side = self.kind[-1]
        return Species(f"tailed_{side}", self.k), Species(f"headed_{side}", self.k)


class DegreeViolation(NamedTuple):
    n: int
    x: VertexId
    y: VertexId
    deg_x: int
    deg_y: int


@dataclass
class PathCommutingReport:
    tested_n_max: int
    tested_k_max: int
    violations: list[Violation] = field(default_factory=list)
    degree_violations: list[DegreeViolation] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    strong: bool = False

    @property
    def verdict(self) -> str:
        return "pass" if not (self.violations or self.degree_violations) else "fail"

    @property
    def path_commuting(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.verdict == "pass"


def _pair_violations(n, kind, k, l, lhs, rhs) -> list[Violation]:
    out = []
    # Count matrices are indexed [y, x].
    for yi, xi in zip(*np.nonzero(lhs != rhs)):
        out.append(Violation(n, kind, k, l, VertexId(n, int(xi)), VertexId(n, int(yi)),
                             int(lhs[yi, xi]), int(rhs[yi, xi])))
    return out


def check_path_commuting(g: LayeredGraph, n_max: int, k_max: int) -> PathCommutingReport:
    """Test fb_(k,l) = bf_(l,k), tailed_f = headed_f, tailed_b = headed_b on all pairs.

    Only counts that stay inside the ball are compared; anything else is
    skipped and noted in ``warnings``. A pass is a certificate for this ball only.
    """
    report = PathCommutingReport(min(n_max, g.depth), k_max)
    if n_max > g.depth:
        report.warnings.append(f"n_max {n_max} clamped to depth {g.depth}")
    skipped = []
    violations = []
    for n in range(report.tested_n_max + 1):
        k_top = min(k_max, g.depth - n)
        if k_top < k_max:
            skipped.append((n, k_top + 1))
        plus = [lambda_matrix(g, "plus", n, k) for k in range(k_top + 1)]
        minus = [_backward_counts(g, n, l) for l in range(k_max + 1)]
        V = _obj(g.intra_blocks[n])
        for k in range(k_top + 1):
            for l in range(k_max + 1):
                violations += _pair_violations(n, "fb/bf", k, l, minus[l].dot(plus[k]), plus[k].dot(minus[l]))
        for k in range(k_top + 1):
            violations += _pair_violations(n, "tailed/headed_f", k, 0, V.dot(plus[k]), plus[k].dot(V))
        for k in range(k_max + 1):
            violations += _pair_violations(n, "tailed/headed_b", k, 0, V.dot(minus[k]), minus[k].dot(V))
    if skipped:
        report.warnings.append(
            "forward radii beyond the ball skipped: "
            + ", ".join(f"n={n}: k>={k}" for n, k in skipped)
        )
    order = {kind: i for i, kind in enumerate(CHECK_KINDS)}
    violations.sort(key=lambda v: (v.n, order[v.kind], v.k, v.l, v.x.index, v.y.index))
    report.violations = violations
    return report


def sphere_degree_violations(g: LayeredGraph) -> list[DegreeViolation]:
    out = []
    for n in range(g.depth + 1):
        deg = g.sphere_degrees(n)
        bad = np.flatnonzero(deg != deg[0])
        if bad.size:
            i = int(bad[0])
            out.append(DegreeViolation(n, VertexId(n, 0), VertexId(n, i), int(deg[0]), int(deg[i])))
    return out


def check_strongly_path_commuting(g: LayeredGraph, n_max: int, k_max: int) -> PathCommutingReport:
    """Path commuting plus constant degree on every sphere of the ball (boundary uses outward degrees)."""
    report = check_path_commuting(g, n_max, k_max)
    report.strong = True
    report.degree_violations = sphere_degree_violations(g)
    return report


@dataclass
class CommutationReport:
    n: int
    j_max: int
    kind: str
    # (name_a, name_b, max |[A, B]|)
    commutators: list[tuple[str, str, int]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "pass" if all(c == 0 for _, _, c in self.commutators) else "fail"

    @property
    def max_norm(self) -> int:
        return max((c for _, _, c in self.commutators), default=0)

    def failures(self) -> list[tuple[str, str, int]]:
        return [c for c in self.commutators if c[2] != 0]

    def __bool__(self) -> bool:
        return self.verdict == "pass"


def _comm_norm(a: np.ndarray, b: np.ndarray) -> int:
    c = a.dot(b) - b.dot(a)
    return int(max((abs(v) for v in c.flat), default=0))


def check_commuting_family(g: LayeredGraph, n: int, j_max: int, kind: str = "adjacency") -> CommutationReport:
    """Exact commutators of {V_n, Lambda_{n,+j}, Lambda_{n,-j}} and the sandwiched-V companions.

    For ``kind="laplacian"`` the diagonal block is D_n - V_n (the Lambdas are
    unchanged since E enters with an even number of sign flips).
    """
    if kind not in ("adjacency", "laplacian"):
        raise ValueError("kind must be 'adjacency' or 'laplacian'")
    report = CommutationReport(n, j_max, kind)
    j_plus = min(j_max, g.depth - n)
    if j_plus < j_max:
        report.warnings.append(f"plus radii clamped to {j_plus} at depth {g.depth}")

    def diag_block(m):
        V = _obj(g.intra_blocks[m])
        if kind == "laplacian":
            return _obj(np.diag(g.sphere_degrees(m))) - V
        return V

    family: dict[str, np.ndarray] = {"V": diag_block(n)}
    for j in range(1, j_plus + 1):
        family[f"L+{j}"] = lambda_matrix(g, "plus", n, j)
    for j in range(1, j_max + 1):
        family[f"L-{j}"] = lambda_matrix(g, "minus", n, j)
    for (na, a), (nb, b) in itertools.combinations(family.items(), 2):
        report.commutators.append((na, nb, _comm_norm(a, b)))
    for j in range(1, j_plus + 1):
        F = _chain(g, n, n + j)
        report.commutators.append((f"L+{j}", f"E^T V_{n + j} E", _comm_norm(family[f"L+{j}"], F.T.dot(diag_block(n + j)).dot(F))))
    for j in range(1, min(j_max, n) + 1):
        B = _chain(g, n - j, n)
        report.commutators.append((f"L-{j}", f"E V_{n - j} E^T", _comm_norm(family[f"L-{j}"], B.dot(diag_block(n - j)).dot(B.T))))
    return report


def check_commuting_families(g: LayeredGraph, n_max: int, j_max: int, kind: str = "adjacency") -> list[CommutationReport]:
    return [check_commuting_family(g, n, j_max, kind) for n in range(min(n_max, g.depth) + 1)]
