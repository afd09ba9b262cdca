"""Independent reference computations used by the tests.

Nothing here imports the solver or counting code under test; the graph is
consumed only through its dense adjacency matrix and sphere sizes.
"""

from __future__ import annotations

import math

import numpy as np


def jacobi_rotation_eigenvalues(M, tol: float = 1e-14, max_sweeps: int = 100) -> np.ndarray:
    """Cyclic Jacobi rotation method for a dense symmetric matrix."""
    A = np.array(M, dtype=float, copy=True)
    n = A.shape[0]
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off <= tol * max(1.0, float(np.abs(A).max())):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if A[p, q] == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * A[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :], A[q, :] = c * rp - s * rq, s * rp + c * rq
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p], A[:, q] = c * cp - s * cq, s * cp + c * cq
    return np.sort(np.diag(A))


def tridiagonal_dense(b, a) -> np.ndarray:
    return np.diag(np.asarray(b, float)) + np.diag(np.asarray(a, float), 1) + np.diag(np.asarray(a, float), -1)


def dense_adjacency(g) -> np.ndarray:
    """Full adjacency of the ball, assembled from the stored blocks."""
    off = np.concatenate([[0], np.cumsum(g.sphere_sizes)])
    A = np.zeros((off[-1], off[-1]), dtype=object)
    A[:] = 0
    for n, E in enumerate(g.cross_blocks):
        for i in range(E.shape[0]):
            for j in range(E.shape[1]):
                if E[i, j]:
                    A[off[n + 1] + i, off[n] + j] = A[off[n] + j, off[n + 1] + i] = 1
    for n, V in enumerate(g.intra_blocks):
        for i in range(V.shape[0]):
            for j in range(V.shape[1]):
                if V[i, j]:
                    A[off[n] + i, off[n] + j] = 1
    return A


def walk_count(g, profile, x_index: int, y_index: int) -> int:
    """Walks visiting the spheres in ``profile`` (one entry per vertex), via masked adjacency powers."""
    if min(profile) < 0:
        return 0
    A = dense_adjacency(g)
    off = np.concatenate([[0], np.cumsum(g.sphere_sizes)])
    v = np.zeros(A.shape[0], dtype=object)
    v[:] = 0
    v[off[profile[0]] + x_index] = 1
    for sphere in profile[1:]:
        v = A.dot(v)
        mask = np.zeros(A.shape[0], dtype=bool)
        mask[off[sphere]:off[sphere + 1]] = True
        v[~mask] = 0
    return int(v[off[profile[-1]] + y_index])


def species_profile(kind: str, n: int, k: int, l: int = 0) -> list[int]:
    out = lambda r: list(range(n, n + r + 1)) + list(range(n + r - 1, n - 1, -1))
    back = lambda r: list(range(n, n - r - 1, -1)) + list(range(n - r + 1, n + 1))
    if kind == "fb":
        return out(k) + back(l)[1:]
    if kind == "bf":
        return back(k) + out(l)[1:]
    if kind == "tailed_f":
        return out(k) + [n]
    if kind == "headed_f":
        return [n] + out(k)
    if kind == "tailed_b":
        return back(k) + [n]
    if kind == "headed_b":
        return [n] + back(k)
    raise ValueError(kind)


def floquet_band_edges(a_per, b_per) -> np.ndarray:
    """Band edges as eigenvalues of the periodic and antiperiodic one-period problems."""
    q = len(b_per)
    if q == 1:
        return np.array([b_per[0] - 2 * a_per[0], b_per[0] + 2 * a_per[0]])
    edges = []
    for sign in (1.0, -1.0):
        M = tridiagonal_dense(b_per, a_per[: q - 1])
        M[0, q - 1] += sign * a_per[q - 1]
        M[q - 1, 0] += sign * a_per[q - 1]
        edges.append(np.linalg.eigvalsh(M))
    return np.sort(np.concatenate(edges))


def cycle_laplacian_spectrum(n: int) -> np.ndarray:
    return np.sort([2 - 2 * math.cos(2 * math.pi * j / n) for j in range(n)])


def brute_force_automorphisms(g):
    """Every sphere-preserving permutation (as per-sphere tuples) that preserves all edges and boundary degrees."""
    import itertools

    A = dense_adjacency(g).astype(int)
    off = np.concatenate([[0], np.cumsum(g.sphere_sizes)])
    od = np.asarray(g.outward_degrees)
    found = []
    for perms in itertools.product(*(itertools.permutations(range(s)) for s in g.sphere_sizes)):
        flat = np.concatenate([off[n] + np.asarray(p, dtype=int) for n, p in enumerate(perms)])
        if not np.array_equal(A[np.ix_(flat, flat)], A):
            continue
        if not np.array_equal(od[list(perms[-1])], od):
            continue
        found.append(tuple(tuple(p) for p in perms))
    return found
