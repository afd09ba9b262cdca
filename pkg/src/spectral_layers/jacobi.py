"""Finite and periodic Jacobi matrices.

A Jacobi matrix here has diagonal ``b`` (length L) and positive off-diagonal
``a`` (length L - 1). Eigenvalues come from bisection on the Sturm count, run
for all L eigenvalues at once as a vectorised sweep over the recurrence.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class JacobiMatrix:
    b: tuple[float, ...]
    a: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(float(x) for x in self.b))
        object.__setattr__(self, "a", tuple(float(x) for x in self.a))
        if len(self.b) < 1:
            raise ValueError("a Jacobi matrix needs at least one diagonal entry")
        if len(self.a) != len(self.b) - 1:
            raise ValueError(f"off-diagonal has length {len(self.a)}, expected {len(self.b) - 1}")

    def __len__(self) -> int:
        return len(self.b)

    def dense(self) -> np.ndarray:
        return np.diag(self.b) + np.diag(self.a, 1) + np.diag(self.a, -1)

    def norm_bound(self) -> float:
        b = np.abs(self.b)
        a = np.abs(np.concatenate([[0.0], self.a, [0.0]]))
        return float(np.max(b + a[:-1] + a[1:]))

    def gershgorin(self) -> tuple[float, float]:
        b = np.asarray(self.b)
        a = np.abs(np.concatenate([[0.0], self.a, [0.0]]))
        r = a[:-1] + a[1:]
        return float(np.min(b - r)), float(np.max(b + r))


def _pivmin(J: JacobiMatrix) -> float:
    return _EPS * max(1.0, J.norm_bound())


def _sturm_counts(J: JacobiMatrix, lams: np.ndarray) -> np.ndarray:
    b = np.asarray(J.b)
    a2 = np.square(np.asarray(J.a))
    pivmin = _pivmin(J)
    lams = np.asarray(lams, dtype=float)
    counts = np.zeros(lams.shape, dtype=np.int64)

    def floor(d):
        # |d| below pivmin is replaced by +-pivmin, sign kept (exact zero -> +).
        small = np.abs(d) < pivmin
        return np.where(small, np.where(d < 0, -pivmin, pivmin), d)

    d = floor(b[0] - lams)
    counts += d < 0
    for i in range(1, len(b)):
        d = floor((b[i] - lams) - a2[i - 1] / d)
        counts += d < 0
    return counts


def sturm_count(J: JacobiMatrix, lam: float) -> int:
    """Number of eigenvalues strictly below ``lam``."""
    if math.isinf(lam):
        return len(J) if lam > 0 else 0
    return int(_sturm_counts(J, np.array([lam]))[0])


def eigenvalues_tridiagonal(J: JacobiMatrix, tol: float = 1e-11) -> np.ndarray:
    """All eigenvalues, ascending, each bisected to a bracket narrower than ``tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    L = len(J)
    lo, hi = J.gershgorin()
    pad = 2 * tol + 8 * _pivmin(J)
    lo_arr = np.full(L, lo - pad)
    hi_arr = np.full(L, hi + pad)
    target = np.arange(1, L + 1)
    for _ in range(2000):
        width = hi_arr - lo_arr
        active = width >= tol
        if not active.any():
            break
        mid = 0.5 * (lo_arr + hi_arr)
        stuck = active & ((mid <= lo_arr) | (mid >= hi_arr))
        active &= ~stuck
        if not active.any():
            break
        counts = _sturm_counts(J, mid[active])
        idx = np.flatnonzero(active)
        up = counts >= target[idx]
        hi_arr[idx[up]] = mid[idx[up]]
        lo_arr[idx[~up]] = mid[idx[~up]]
    return np.sort(0.5 * (lo_arr + hi_arr))


@dataclass(frozen=True)
class PeriodicJacobi:
    """Coefficients ``prefix`` first, then ``a_per``/``b_per`` repeated with period q.

    ``prefix_a`` and ``prefix_b`` must have equal length.
    """

    a_per: tuple[float, ...]
    b_per: tuple[float, ...]
    prefix_a: tuple[float, ...] = ()
    prefix_b: tuple[float, ...] = ()

    def __post_init__(self):
        for name in ("a_per", "b_per", "prefix_a", "prefix_b"):
            object.__setattr__(self, name, tuple(float(x) for x in getattr(self, name)))
        if not self.a_per or len(self.a_per) != len(self.b_per):
            raise ValueError("a_per and b_per must be nonempty and of equal length")
        if len(self.prefix_a) != len(self.prefix_b):
            raise ValueError("prefix_a and prefix_b must have equal length")
        if any(x <= 0 for x in self.a_per):
            raise ValueError("periodic off-diagonal entries must be positive")

    @property
    def period(self) -> int:
        return len(self.a_per)

    def a_at(self, n: int) -> float:
        p = len(self.prefix_a)
        return self.prefix_a[n] if n < p else self.a_per[(n - p) % self.period]

    def b_at(self, n: int) -> float:
        p = len(self.prefix_b)
        return self.prefix_b[n] if n < p else self.b_per[(n - p) % self.period]

    def truncation(self, L: int) -> JacobiMatrix:
        return JacobiMatrix([self.b_at(n) for n in range(L)], [self.a_at(n) for n in range(L - 1)])

    def discriminant(self, lam) -> np.ndarray:
        """Trace of the one-period transfer matrix product at ``lam``."""
        lam = np.asarray(lam, dtype=float)
        q = self.period
        m11, m12 = np.ones_like(lam), np.zeros_like(lam)
        m21, m22 = np.zeros_like(lam), np.ones_like(lam)
        for n in range(q):
            a_n, a_prev, b_n = self.a_per[n], self.a_per[n - 1], self.b_per[n]
            t11 = (lam - b_n) / a_n
            t12 = -a_prev / a_n
            # T_n @ M
            m11, m12, m21, m22 = t11 * m11 + t12 * m21, t11 * m12 + t12 * m22, m11, m12
        return m11 + m22


class Band(NamedTuple):
    lo: float
    hi: float


@dataclass
class BandStructure:
    bands: list[Band] = field(default_factory=list)

    def contains(self, lam: float, tol: float = 0.0) -> bool:
        return any(b.lo - tol <= lam <= b.hi + tol for b in self.bands)

    def distance(self, lam: float) -> float:
        return min((max(b.lo - lam, lam - b.hi, 0.0) for b in self.bands), default=math.inf)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lo", "hi", "block_id", "multiplicity"])
        for b in self.bands:
            w.writerow([_fmt(b.lo), _fmt(b.hi), "", ""])
        return buf.getvalue()


def _fmt(x: float) -> str:
    return f"{x:.15g}"


def _bisect_root(f, lo: float, hi: float, flo: float, tol: float) -> float:
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if mid in (lo, hi) and hi - lo <= 4 * _EPS * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)


def bands_periodic(pj: PeriodicJacobi, tol: float = 1e-10) -> BandStructure:
    """Bands {lam : |discriminant(lam)| <= 2} of the periodic part.

    Roots of d - 2 and d + 2 are isolated on a Chebyshev grid (refined where d
    moves by more than 1 between nodes, and globally while fewer than q roots
    of either are bracketed), then bisected to ``tol``.
    """
    q = pj.period
    a_max, b = max(pj.a_per), np.asarray(pj.b_per)
    lo, hi = float(b.min() - 2 * a_max), float(b.max() + 2 * a_max)
    span = hi - lo
    lo, hi = lo - 0.01 * span - tol, hi + 0.01 * span + tol
    d = lambda x: float(pj.discriminant(np.array(x)))
    nodes = 8 * q + 1
    roots: list[float] = []
    for _level in range(16):
        k = np.arange(nodes)
        grid = np.sort(0.5 * (lo + hi) - 0.5 * (hi - lo) * np.cos(np.pi * k / (nodes - 1)))
        for _ in range(30):
            vals = pj.discriminant(grid)
            jumps = np.flatnonzero(np.abs(np.diff(vals)) > 1)
            if not jumps.size:
                break
            grid = np.sort(np.concatenate([grid, 0.5 * (grid[jumps] + grid[jumps + 1])]))
        vals = pj.discriminant(grid)
        roots = []
        counts = []
        for level in (2.0, -2.0):
            f = lambda x, c=level: d(x) - c
            fv = vals - level
            found = 0
            for i in range(len(grid) - 1):
                if fv[i] == 0:
                    roots.append(float(grid[i]))
                    found += 1
                elif fv[i] * fv[i + 1] < 0:
                    roots.append(_bisect_root(f, grid[i], grid[i + 1], fv[i], tol))
                    found += 1
            counts.append(found)
        if min(counts) >= q:
            break
        nodes = 2 * nodes - 1
    cuts = sorted(set([lo] + roots + [hi]))
    bands: list[Band] = []
    for left, right in zip(cuts[:-1], cuts[1:]):
        if right - left <= 0:
            continue
        if abs(d(0.5 * (left + right))) <= 2:
            if bands and abs(bands[-1].hi - left) <= tol:
                bands[-1] = Band(bands[-1].lo, right)
            else:
                bands.append(Band(left, right))
    return BandStructure(bands)


class PeriodDetection(NamedTuple):
    N: int
    q: int


def _same(u, v, atol: float) -> bool:
    if atol == 0:
        return u == v
    return bool(np.allclose(np.asarray(u, dtype=float), np.asarray(v, dtype=float), rtol=0.0, atol=atol))


def detect_eventually_periodic(seq: Sequence, max_period: int, min_repeats: int = 3, atol: float = 0.0) -> PeriodDetection | None:
    """Smallest period q <= max_period and then smallest onset N seen in the data.

    A candidate counts only if the periodic stretch holds at least
    ``min_repeats`` full periods and is at least as long as the transient N, so
    a long run of one value at the end of a non-periodic window is not taken
    for a period. This describes the observed window only.
    """
    L = len(seq)
    if L < max_period * min_repeats:
        raise ValueError(f"need at least {max_period * min_repeats} terms, got {L}")
    for q in range(1, max_period + 1):
        N = L - q
        while N > 0 and _same(seq[N - 1 + q], seq[N - 1], atol):
            N -= 1
        stretch = L - N
        if stretch >= q * min_repeats and stretch >= N:
            return PeriodDetection(N, q)
    return None


def antitree_coefficient_keys(s: Sequence[int]) -> list[tuple[int, int]]:
    """(a_n^2, b_n) = (s_n s_{n+1}, s_{n-1} + s_{n+1}) with s_{-1} = 0, as exact integers."""
    out = []
    for n in range(len(s) - 1):
        prev = s[n - 1] if n >= 1 else 0
        out.append((s[n] * s[n + 1], prev + s[n + 1]))
    return out


def periodicity_transfer(s: Sequence[int], max_period: int, min_repeats: int = 3):
    """Detections for (s_n) and for the antitree coefficients (a_n, b_n) built from it.

    The two are either both None or both found, by the induction a_j = a_{j+qk}.
    """
    return (
        detect_eventually_periodic(list(s), max_period, min_repeats),
        detect_eventually_periodic(antitree_coefficient_keys(s), max_period, min_repeats),
    )


def essential_point_tcs2(kappa: float) -> float:
    """2 + sqrt(4 + kappa^2): the bound state of a single bump of height kappa on the free line."""
    if kappa < 2:
        raise ValueError("kappa must be >= 2")
    return 2.0 + math.sqrt(4.0 + kappa * kappa)


class SpectrumRow(NamedTuple):
    value: float
    block_id: int
    multiplicity: int


@dataclass
class SpectrumTable:
    rows: list[SpectrumRow] = field(default_factory=list)

    def values(self) -> np.ndarray:
        """The multiset union, each eigenvalue repeated by its block multiplicity."""
        if not self.rows:
            return np.zeros(0)
        return np.sort(np.repeat([r.value for r in self.rows], [r.multiplicity for r in self.rows]))

    def __len__(self) -> int:
        return sum(r.multiplicity for r in self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["value", "hi", "block_id", "multiplicity"])
        for r in self.rows:
            w.writerow([_fmt(r.value), "", r.block_id, r.multiplicity])
        return buf.getvalue()


def spectrum_union(decomposition, tol: float = 1e-11) -> SpectrumTable:
    """Eigenvalues of every block's Jacobi matrix, tagged with block id and multiplicity."""
    rows = []
    for block_id, block in enumerate(decomposition.blocks):
        for value in eigenvalues_tridiagonal(JacobiMatrix(block.b, block.a), tol):
            rows.append(SpectrumRow(float(value), block_id, block.multiplicity))
    rows.sort(key=lambda r: (r.value, r.block_id))
    return SpectrumTable(rows)
