"""Property tests over randomly generated layered graphs and Jacobi matrices."""

import math

import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from spectral_layers.automorphisms import (
    AutomorphismConstraint,
    check_family_preserving,
    check_spherically_symmetric,
    find_rooted_automorphism,
)
from spectral_layers.decomposition import (
    antitree_closed_form,
    reconcile,
    tree_cs_closed_form,
    tridiagonalize,
)
from spectral_layers.graph import (
    LayeredGraph,
    VertexId,
    build_antitree,
    build_tree_complete_spheres,
    compress_operator,
)
from spectral_layers.jacobi import JacobiMatrix, eigenvalues_tridiagonal, spectrum_union, sturm_count
from spectral_layers.lgf import parse_lgf, serialize_lgf
from spectral_layers.paths import (
    SPECIES,
    Species,
    check_commuting_families,
    check_path_commuting,
    check_strongly_path_commuting,
    count_paths,
)
from spectral_layers.sequences import SequenceSpec

from oracles import jacobi_rotation_eigenvalues, tridiagonal_dense

SETTINGS = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def layered_graphs(draw, max_depth=3, max_size=3):
    depth = draw(st.integers(0, max_depth))
    sizes = [1] + [draw(st.integers(1, max_size)) for _ in range(depth)]
    E = []
    for n in range(depth):
        rows = []
        for _ in range(sizes[n + 1]):
            row = draw(st.lists(st.integers(0, 1), min_size=sizes[n], max_size=sizes[n]))
            if not any(row):
                row[draw(st.integers(0, sizes[n] - 1))] = 1
            rows.append(row)
        E.append(np.array(rows, dtype=np.int64).reshape(sizes[n + 1], sizes[n]))
    V = []
    for s in sizes:
        M = np.zeros((s, s), dtype=np.int64)
        if s > 1:
            for i in range(s):
                for j in range(i + 1, s):
                    M[i, j] = M[j, i] = draw(st.integers(0, 1))
        V.append(M)
    outward = np.array([draw(st.integers(0, 2)) for _ in range(sizes[-1])], dtype=np.int64)
    return LayeredGraph(tuple(sizes), tuple(E), tuple(V), outward)


small_ints = st.integers(1, 3)
antitree_specs = st.tuples(st.lists(small_ints, max_size=3), st.lists(small_ints, min_size=1, max_size=3)).map(
    lambda pt: SequenceSpec((1,) + tuple(pt[0]), tuple(pt[1]))
)
tree_specs = st.tuples(
    st.lists(st.integers(1, 2), min_size=1, max_size=2), st.lists(st.integers(0, 1), min_size=1, max_size=3)
).map(lambda kg: (SequenceSpec((), tuple(kg[0])), SequenceSpec((), tuple(kg[1]))))


@st.composite
def jacobi_matrices(draw, max_size=50):
    size = draw(st.integers(1, max_size))
    floats = st.floats(-10, 10, allow_nan=False)
    b = draw(st.lists(floats, min_size=size, max_size=size))
    a = draw(st.lists(st.floats(0.01, 5, allow_nan=False), min_size=size - 1, max_size=size - 1))
    return JacobiMatrix(b, a)


# -- layered graphs ------------------------------------------------------------

@SETTINGS
@given(layered_graphs())
def test_laplacian_is_degree_minus_adjacency(g):
    A = compress_operator(g, "adjacency")
    L = compress_operator(g, "laplacian")
    assert np.array_equal(L, np.diag(g.degrees()) - A)
    assert np.linalg.eigvalsh(L).min() >= -1e-9


@SETTINGS
@given(layered_graphs())
def test_lgf_round_trip(g):
    text = serialize_lgf(g)
    assert parse_lgf(text) == g
    assert serialize_lgf(parse_lgf(text)) == text


@SETTINGS
@given(tree_specs, st.integers(0, 4))
def test_tree_sizes_and_intra_blocks(spec, depth):
    k, gamma = spec
    g = build_tree_complete_spheres(k, gamma, depth)
    plain = build_tree_complete_spheres(k, SequenceSpec((), (0,)), depth)
    assert g.sphere_sizes == tuple(math.prod(k.value_at(j) for j in range(1, n + 1)) for n in range(depth + 1))
    assert all(np.array_equal(x, y) for x, y in zip(g.cross_blocks, plain.cross_blocks))
    assert not any(V.any() for V in plain.intra_blocks)


# -- path counts -------------------------------------------------------------

@SETTINGS
@given(layered_graphs(max_depth=4), st.data())
def test_matrix_counts_match_enumeration(g, data):
    n = data.draw(st.integers(0, g.depth))
    kind = data.draw(st.sampled_from(SPECIES))
    room = g.depth - n
    if kind == "fb":
        sp = Species(kind, data.draw(st.integers(0, room)), data.draw(st.integers(0, 3)))
    elif kind == "bf":
        sp = Species(kind, data.draw(st.integers(0, 3)), data.draw(st.integers(0, room)))
    elif kind.endswith("_f"):
        sp = Species(kind, data.draw(st.integers(0, room)))
    else:
        sp = Species(kind, data.draw(st.integers(0, 3)))
    for i in range(g.sphere_sizes[n]):
        for j in range(g.sphere_sizes[n]):
            x, y = VertexId(n, i), VertexId(n, j)
            assert count_paths(g, sp, x, y, "matrix") == count_paths(g, sp, x, y, "enumerate")


@SETTINGS
@given(layered_graphs(max_depth=4))
def test_counting_verdict_matches_commutators(g):
    n_max, k_max = max(0, g.depth - 1), min(2, g.depth)
    pc = check_path_commuting(g, n_max, k_max).verdict
    cf = "pass" if all(r.verdict == "pass" for r in check_commuting_families(g, n_max, k_max)) else "fail"
    assert pc == cf


# -- automorphisms -----------------------------------------------------------

@SETTINGS
@given(layered_graphs(), st.data())
def test_witness_validity_and_composition(g, data):
    n = data.draw(st.integers(0, g.depth))
    i = data.draw(st.integers(0, g.sphere_sizes[n] - 1))
    j = data.draw(st.integers(0, g.sphere_sizes[n] - 1))
    c = AutomorphismConstraint(((VertexId(n, i), VertexId(n, j)),))
    tau = find_rooted_automorphism(g, c)
    if tau is None:
        return
    assert tau.preserves(g) and tau.satisfies(c)
    both = tau.compose(tau)
    target = both(VertexId(n, i))
    sigma = find_rooted_automorphism(g, AutomorphismConstraint(((VertexId(n, i), target),)))
    assert sigma is not None and sigma.preserves(g)


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(layered_graphs())
def test_family_preserving_implications(g):
    if check_family_preserving(g, g.depth).verdict == "pass":
        assert check_strongly_path_commuting(g, g.depth, g.depth).verdict == "pass"
        assert check_spherically_symmetric(g).verdict == "pass"


# -- decompositions ------------------------------------------------------------

@SETTINGS
@given(antitree_specs, st.integers(0, 6), st.sampled_from(["adjacency", "laplacian", "normalized"]))
def test_antitree_spectral_identity(s, depth, kind):
    g = build_antitree(s, depth)
    d = antitree_closed_form(s, depth, kind)
    assert d.total_dimension == g.size
    assert np.allclose(spectrum_union(d).values(), np.linalg.eigvalsh(compress_operator(g, kind)), atol=1e-8)
    assert reconcile(tridiagonalize(g, kind), d, 1e-9)


@SETTINGS
@given(tree_specs, st.integers(0, 5))
def test_tree_spectral_identity(spec, depth):
    k, gamma = spec
    g = build_tree_complete_spheres(k, gamma, depth)
    assume(g.size <= 200)
    d = tree_cs_closed_form(k, gamma, depth)
    assert d.total_dimension == g.size
    union = spectrum_union(d).values()
    assert np.allclose(union, np.linalg.eigvalsh(compress_operator(g, "laplacian")), atol=1e-8)
    assert union.min() >= -1e-9
    assert reconcile(tridiagonalize(g), d, 1e-9)


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(layered_graphs(max_depth=3))
def test_generic_decomposition_on_path_commuting_graphs(g):
    assume(check_path_commuting(g, g.depth, g.depth).verdict == "pass")
    d = tridiagonalize(g, "adjacency")
    assert d.total_dimension == g.size
    assert np.allclose(spectrum_union(d).values(), np.linalg.eigvalsh(compress_operator(g, "adjacency")), atol=1e-8)
    for blk in d.blocks:
        assert all(x > 0 for x in blk.a)


# -- Jacobi matrices -----------------------------------------------------------

@SETTINGS
@given(jacobi_matrices())
def test_bisection_matches_rotation_oracle(J):
    expect = jacobi_rotation_eigenvalues(tridiagonal_dense(J.b, J.a))
    assert np.allclose(eigenvalues_tridiagonal(J), expect, atol=1e-8)


@SETTINGS
@given(jacobi_matrices(20), st.lists(st.floats(-30, 30, allow_nan=False), min_size=1, max_size=10))
def test_sturm_consistent(J, probes):
    ev = eigenvalues_tridiagonal(J, 1e-12)
    for lam in probes:
        if np.min(np.abs(ev - lam)) < 1e-9:
            continue
        assert sturm_count(J, lam) == int(np.sum(ev < lam))


@SETTINGS
@given(jacobi_matrices(20), st.data())
def test_sign_flips_keep_spectrum(J, data):
    signs = data.draw(st.lists(st.sampled_from([-1.0, 1.0]), min_size=len(J.a), max_size=len(J.a)))
    flipped = np.asarray(J.a) * np.asarray(signs)
    dense = tridiagonal_dense(J.b, flipped)
    assert np.allclose(np.linalg.eigvalsh(dense), eigenvalues_tridiagonal(J), atol=1e-8)
