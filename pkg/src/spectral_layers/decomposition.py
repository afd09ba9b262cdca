"""Direct-sum decomposition of graph operators into Jacobi blocks.

``tridiagonalize`` runs the constructive procedure on a ball: grow the block
of the root by projected Gram-Schmidt, then at the first sphere not yet
covered seed new blocks with a joint eigenbasis of the commuting family
{diagonal block, Lambda_{m,+j}, sandwiched diagonal blocks} on the
orthocomplement, and repeat. ``antitree_closed_form`` and
``tree_cs_closed_form`` write the same decompositions down directly.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graph import OPERATOR_KINDS, LayeredGraph, antitree_sizes, compress_operator
from .sequences import SequenceSpec


class DecompositionError(ValueError):
    pass


class ResidualError(DecompositionError):
    """Hφ_k leaves span{φ_{k-1}, φ_k, φ_{k+1}}: the input is not (strongly) path commuting."""


class JointDiagonalizationError(DecompositionError):
    pass


@dataclass
class JacobiBlock:
    start_sphere: int
    seed: np.ndarray | None  # coefficients on S_{start_sphere}; None if too large to store
    a: tuple[float, ...]
    b: tuple[float, ...]
    multiplicity: int = 1

    def __post_init__(self):
        self.a = tuple(float(x) for x in self.a)
        self.b = tuple(float(x) for x in self.b)
        if len(self.a) != len(self.b) - 1:
            raise DecompositionError("block needs len(a) == len(b) - 1")
        if self.multiplicity < 1:
            raise DecompositionError("multiplicity must be >= 1")

    @property
    def length(self) -> int:
        return len(self.b)

    def dense(self) -> np.ndarray:
        return np.diag(self.b) + np.diag(self.a, 1) + np.diag(self.a, -1)


@dataclass
class Decomposition:
    operator_kind: str
    blocks: list[JacobiBlock]
    depth: int
    # For tridiagonalize: per block, one (length x ball) array of basis vectors per copy.
    vectors: list[list[np.ndarray]] | None = field(default=None, repr=False)

    @property
    def total_dimension(self) -> int:
        return sum(b.multiplicity * b.length for b in self.blocks)

    def blocks_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["block_id", "start_sphere", "multiplicity", "length"])
        for i, blk in enumerate(self.blocks):
            w.writerow([i, blk.start_sphere, blk.multiplicity, blk.length])
        return buf.getvalue()

    def coefficients_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["block_id", "index", "a", "b"])
        for i, blk in enumerate(self.blocks):
            for k, bk in enumerate(blk.b):
                ak = f"{blk.a[k]:.15g}" if k < len(blk.a) else ""
                w.writerow([i, k, ak, f"{bk:.15g}"])
        return buf.getvalue()


def _unit(n: int, i: int = 0) -> np.ndarray:
    e = np.zeros(n)
    e[i] = 1.0
    return e


# -- generic algorithm ------------------------------------------------------

def _complement(Q: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormal basis of the orthocomplement of the columns of Q in R^dim."""
    if Q.shape[1] == 0:
        return np.eye(dim)
    U, sv, _ = np.linalg.svd(Q, full_matrices=True)
    rank = int(np.sum(sv > 1e-8))
    return U[:, rank:]


def _cluster(values: np.ndarray, thr: float) -> list[list[int]]:
    groups = [[0]]
    for i in range(1, len(values)):
        if values[i] - values[i - 1] <= thr:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _joint_eigenbasis(ops: list[np.ndarray], W: np.ndarray, rel: float = 1e-8) -> np.ndarray:
    """Split W by each operator's eigenspaces in turn; columns are joint eigenvectors."""
    spaces = [W]
    for op in ops:
        thr = rel * max(1.0, float(np.abs(op).sum(axis=1).max()))
        refined = []
        for U in spaces:
            if U.shape[1] == 1:
                refined.append(U)
                continue
            R = U.T @ op @ U
            w, Z = np.linalg.eigh(0.5 * (R + R.T))
            for grp in _cluster(w, thr):
                refined.append(U @ Z[:, grp])
        spaces = refined
    basis = np.concatenate(spaces, axis=1)
    for op in ops:
        thr = 10 * rel * max(1.0, float(np.abs(op).sum(axis=1).max()))
        Av = op @ basis
        lam = np.einsum("ij,ij->j", basis, Av)
        resid = np.linalg.norm(Av - basis * lam, axis=0)
        if resid.size and resid.max() > thr:
            raise JointDiagonalizationError(
                f"commuting family not simultaneously diagonalizable (residual {resid.max():.3g})"
            )
    return basis


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > 1e-12)
    return -v if nz.size and v[nz[0]] < 0 else v


def tridiagonalize(g: LayeredGraph, kind: str = "laplacian", tol: float = 1e-10) -> Decomposition:
    """Decompose the compressed operator into Jacobi blocks with sphere-supported bases.

    Raises ResidualError when a step leaves the three-term structure (the
    input is then not path commuting for ``adjacency``, or not strongly path
    commuting for the Laplacians).
    """
    if kind not in OPERATOR_KINDS:
        raise ValueError(f"unknown operator kind {kind!r}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    H = compress_operator(g, kind)
    N = g.depth
    off = g.offsets()
    sl = [slice(off[n], off[n + 1]) for n in range(N + 1)]
    scale = max(1.0, float(np.abs(H).sum(axis=1).max()))
    eps = tol * scale
    diag = [H[sl[n], sl[n]] for n in range(N + 1)]
    fwd = [H[sl[n + 1], sl[n]] for n in range(N)]

    covered: list[list[np.ndarray]] = [[] for _ in range(N + 1)]
    raw: list[tuple[int, np.ndarray, list[float], list[float], np.ndarray]] = []

    for m in range(N + 1):
        s_m = g.sphere_sizes[m]
        if len(covered[m]) == s_m:
            continue
        Q = np.array(covered[m]).T if covered[m] else np.zeros((s_m, 0))
        W = _complement(Q, s_m)
        ops = [diag[m]]
        F = np.eye(s_m)
        for j in range(1, N - m + 1):
            F = fwd[m + j - 1] @ F
            ops.append(F.T @ F)
            ops.append(F.T @ diag[m + j] @ F)
        seeds = _joint_eigenbasis(ops, W)
        for col in range(seeds.shape[1]):
            psi = _canonical_sign(seeds[:, col])
            a, b, vecs = _grow(H, sl, psi, m, N, eps)
            for k, v in enumerate(vecs):
                local = v[sl[m + k]]
                for w in covered[m + k]:
                    if abs(local @ w) > math.sqrt(eps):
                        raise ResidualError(f"block seeded on S_{m} is not orthogonal to earlier blocks on S_{m + k}")
                covered[m + k].append(local)
            raw.append((m, psi, a, b, np.array(vecs)))
        if len(covered[m]) != s_m:
            raise ResidualError(f"S_{m} covered by {len(covered[m])} vectors, expected {s_m}")

    blocks: list[JacobiBlock] = []
    vectors: list[list[np.ndarray]] = []
    group_tol = tol * scale
    for m, psi, a, b, vecs in raw:
        for blk, copies in zip(blocks, vectors):
            if (
                blk.start_sphere == m
                and blk.length == len(b)
                and max(np.max(np.abs(np.subtract(blk.b, b))), np.max(np.abs(np.subtract(blk.a, a)), initial=0.0)) <= group_tol
            ):
                blk.multiplicity += 1
                copies.append(vecs)
                break
        else:
            blocks.append(JacobiBlock(m, psi, a, b, 1))
            vectors.append([vecs])
    d = Decomposition(kind, blocks, N, vectors)
    if d.total_dimension != g.size:
        raise DecompositionError(f"decomposition covers {d.total_dimension} of {g.size} dimensions")
    return d


def _grow(H, sl, psi, m, N, eps):
    phi = np.zeros(H.shape[0])
    phi[sl[m]] = psi
    vecs = [phi]
    a: list[float] = []
    b: list[float] = []
    k = 0
    while True:
        n = m + k
        Hphi = H @ phi
        bk = float(phi @ Hphi)
        b.append(bk)
        r_same = np.linalg.norm(Hphi[sl[n]] - bk * phi[sl[n]])
        if r_same > eps:
            raise ResidualError(f"residual {r_same:.3g} on S_{n} (block seeded on S_{m}, step {k})")
        if n >= 1:
            back = Hphi[sl[n - 1]] - (a[-1] * vecs[-2][sl[n - 1]] if k >= 1 else 0.0)
            r_back = np.linalg.norm(back)
            if r_back > eps:
                raise ResidualError(f"residual {r_back:.3g} on S_{n - 1} (block seeded on S_{m}, step {k})")
        if n == N:
            break
        forward = Hphi[sl[n + 1]]
        norm = float(np.linalg.norm(forward))
        if norm < eps:
            break
        phi = np.zeros(H.shape[0])
        phi[sl[n + 1]] = forward / norm
        vecs.append(phi)
        a.append(norm)
        k += 1
    return a, b, vecs


# -- closed forms -----------------------------------------------------------

def _sizes(s: SequenceSpec, depth: int) -> list[int]:
    return antitree_sizes(s, depth)


SEED_LIMIT = 1 << 16


def _pair_seed(size: int) -> np.ndarray | None:
    """(e_0 - e_1)/sqrt(2) on a sphere of ``size`` vertices; None past SEED_LIMIT."""
    if size > SEED_LIMIT:
        return None
    seed = np.zeros(size)
    seed[:2] = (1 / math.sqrt(2), -1 / math.sqrt(2))
    return seed


def antitree_closed_form(s: SequenceSpec, depth: int, kind: str = "laplacian") -> Decomposition:
    """One spherically symmetric block plus scalar blocks for sum-zero vectors on each sphere.

    Laplacian: a_n = sqrt(s_n s_{n+1}), b_n = s_{n-1} + s_{n+1} (s_{-1} = 0);
    scalars s_{n-1} + s_{n+1} with multiplicity s_n - 1. Normalized: a_n
    divided by sqrt(b_n b_{n+1}), diagonal 1. Adjacency: same a, diagonal 0.
    """
    if kind not in OPERATOR_KINDS:
        raise ValueError(f"unknown operator kind {kind!r}")
    sz = _sizes(s, depth)
    if sz[0] != 1:
        raise DecompositionError("antitree needs s_0 = 1")
    deg = [(sz[n - 1] if n >= 1 else 0) + sz[n + 1] for n in range(depth + 1)]
    a = [math.sqrt(sz[n] * sz[n + 1]) for n in range(depth)]
    if kind == "laplacian":
        b, scalar = list(map(float, deg)), [float(x) for x in deg]
    elif kind == "normalized":
        a = [a[n] / math.sqrt(deg[n] * deg[n + 1]) for n in range(depth)]
        b, scalar = [1.0] * (depth + 1), [1.0] * (depth + 1)
    else:
        b, scalar = [0.0] * (depth + 1), [0.0] * (depth + 1)
    blocks = [JacobiBlock(0, _unit(1), a, b, 1)]
    for n in range(1, depth + 1):
        if sz[n] > 1:
            blocks.append(JacobiBlock(n, _pair_seed(sz[n]), (), (scalar[n],), sz[n] - 1))
    return Decomposition(kind, blocks, depth)


def tree_cs_closed_form(k: SequenceSpec, gamma: SequenceSpec, depth: int) -> Decomposition:
    """Laplacian of G(k, gamma): block l on S_l with multiplicity s_l - s_{l-1}.

    Block 0: b_0 = k_1, b_n = k_{n+1} + 1, a_n = sqrt(k_{n+1}). Block l >= 1
    uses the same coefficients shifted by l plus the potential
    v_n = gamma_n s_n (a complete sphere acts as s_n on sum-zero vectors).
    """
    ks = [k.value_at(n) for n in range(1, depth + 2)]  # ks[n] = k_{n+1}
    gs = [0] + [gamma.value_at(n) for n in range(1, depth + 1)]
    if any(g not in (0, 1) for g in gs):
        raise DecompositionError("gamma values must be 0 or 1")
    sizes = [1]
    for n in range(depth):
        sizes.append(sizes[-1] * ks[n])
    a0 = [math.sqrt(ks[n]) for n in range(depth)]
    b0 = [float(ks[0])] + [float(ks[n] + 1) for n in range(1, depth + 1)]
    v = [gs[n] * sizes[n] for n in range(depth + 1)]
    blocks = [JacobiBlock(0, _unit(1), a0, b0, 1)]
    for l in range(1, depth + 1):
        mult = sizes[l] - sizes[l - 1]
        if mult < 1:
            continue
        blocks.append(JacobiBlock(l, _pair_seed(sizes[l]), a0[l:], [b0[n] + v[n] for n in range(l, depth + 1)], mult))
    return Decomposition("laplacian", blocks, depth)


def tree_cs_potential(k: SequenceSpec, gamma: SequenceSpec, depth: int) -> list[int]:
    """v_0..v_depth with v_n = gamma_n * prod_{j<=n} k_j."""
    out, size = [0], 1
    for n in range(1, depth + 1):
        size *= k.value_at(n)
        out.append(gamma.value_at(n) * size)
    return out


# -- finitely supported eigenfunctions ---------------------------------------

@dataclass
class EigenfunctionReport:
    # (sphere, vector index, eigenvalue, max |residual|) with exact rational residuals
    checks: list[tuple[int, int, int, Fraction]] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "pass" if all(r == 0 for *_, r in self.checks) else "fail"

    def __bool__(self) -> bool:
        return self.verdict == "pass"


def _is_antitree(g: LayeredGraph) -> bool:
    if any(V.any() for V in g.intra_blocks):
        return False
    if any(not E.all() for E in g.cross_blocks):
        return False
    od = np.asarray(g.outward_degrees)
    return bool((od == od[0]).all())


def verify_finitely_supported_eigenfunctions(g: LayeredGraph) -> EigenfunctionReport:
    """Check Δφ = (s_{n-1} + s_{n+1}) φ exactly for a basis of sum-zero vectors on each sphere.

    The basis is δ_0 - δ_i (i = 1..s_n - 1), which spans the orthocomplement
    of the constants; the residual is computed in integer arithmetic.
    """
    if not _is_antitree(g):
        raise DecompositionError("input is not an antitree ball")
    s = list(g.sphere_sizes) + [int(g.outward_degrees[0])]
    L = compress_operator(g, "laplacian").round().astype(np.int64)
    off = g.offsets()
    report = EigenfunctionReport()
    for n in range(1, g.depth + 1):
        lam = s[n - 1] + s[n + 1]
        for i in range(1, s[n]):
            phi = np.zeros(g.size, dtype=np.int64)
            phi[off[n]] = 1
            phi[off[n] + i] = -1
            resid = L @ phi - lam * phi
            report.checks.append((n, i, lam, Fraction(int(np.abs(resid).max()))))
    return report


# -- reconciliation -----------------------------------------------------------

@dataclass
class ReconcileReport:
    passed: bool
    max_deviation: float
    message: str = ""

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def __bool__(self) -> bool:
        return self.passed


def _entries(d: Decomposition):
    return [
        [blk.start_sphere, np.abs(np.asarray(blk.a)), np.asarray(blk.b), blk.multiplicity, i]
        for i, blk in enumerate(d.blocks)
    ]


def _deviation(e1, e2) -> float:
    da = np.max(np.abs(e1[1] - e2[1]), initial=0.0)
    db = np.max(np.abs(e1[2] - e2[2]), initial=0.0)
    return float(max(da, db))


def _first_difference(e1, e2, tol) -> str:
    for name, x, y in (("b", e1[2], e2[2]), ("a", e1[1], e2[1])):
        for i, (u, w) in enumerate(zip(x, y)):
            if abs(u - w) >= tol:
                return f"block {e1[4]} vs {e2[4]} (start sphere {e1[0]}): {name}[{i}] = {u:.12g} vs {w:.12g}"
    return f"block {e1[4]} vs {e2[4]}"


def reconcile(d1: Decomposition, d2: Decomposition, tol: float = 1e-10) -> ReconcileReport:
    """Match blocks up to order, multiplicity grouping and the sign of a."""
    if d1.operator_kind != d2.operator_kind:
        return ReconcileReport(False, math.inf, f"operator kinds differ: {d1.operator_kind} vs {d2.operator_kind}")
    if d1.depth != d2.depth:
        return ReconcileReport(False, math.inf, f"depths differ: {d1.depth} vs {d2.depth}")
    left, right = _entries(d1), _entries(d2)
    worst = 0.0
    for e1 in left:
        while e1[3] > 0:
            best, best_dev = None, math.inf
            for e2 in right:
                if e2[3] == 0 or e2[0] != e1[0] or len(e2[2]) != len(e1[2]):
                    continue
                dev = _deviation(e1, e2)
                if dev < best_dev:
                    best, best_dev = e2, dev
            if best is None or best_dev >= tol:
                if best is None:
                    msg = f"block {e1[4]} (start sphere {e1[0]}, length {len(e1[2])}) has no counterpart"
                else:
                    msg = _first_difference(e1, best, tol)
                return ReconcileReport(False, max(worst, best_dev), msg)
            used = min(e1[3], best[3])
            e1[3] -= used
            best[3] -= used
            worst = max(worst, best_dev)
    leftover = [e for e in right if e[3] > 0]
    if leftover:
        e = leftover[0]
        return ReconcileReport(False, math.inf, f"block {e[4]} of the second decomposition (start sphere {e[0]}) has no counterpart")
    return ReconcileReport(True, worst, f"max deviation {worst:.3g}")
