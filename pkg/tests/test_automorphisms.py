import pytest

from spectral_layers.automorphisms import (
    Automorphism,
    AutomorphismConstraint,
    check_family_preserving,
    check_spherically_symmetric,
    find_rooted_automorphism,
)
from spectral_layers.fixtures import antitree, label_vertex, load_figure, tree_cs
from spectral_layers.graph import VertexId
from spectral_layers.paths import check_strongly_path_commuting

from fixture_set import ALL_GRAPHS
from oracles import brute_force_automorphisms

SMALL = ["fig3a no rays", "crossed", "triangle fan", "hexagon with chord", "lopsided tree", "antitree 1,2,1; d2"]


def test_antitree_swap():
    g = antitree((1, 2), (2,), 2)
    tau = find_rooted_automorphism(g, AutomorphismConstraint(((VertexId(1, 0), VertexId(1, 1)),)))
    assert tau is not None and tau.preserves(g)
    assert tau(VertexId(1, 0)) == VertexId(1, 1)


def test_degree_obstruction():
    g = load_figure("fig3a")
    v2, v3 = label_vertex("fig3a", "v2"), label_vertex("fig3a", "v3")
    assert find_rooted_automorphism(g, AutomorphismConstraint(((v2, v3),))) is None


def test_no_constraint_identity():
    g = load_figure("fig4b")
    assert find_rooted_automorphism(g) == Automorphism.identity(g)


def test_constraint_must_keep_sphere():
    with pytest.raises(ValueError):
        AutomorphismConstraint(((VertexId(1, 0), VertexId(2, 0)),))


def test_pointwise_fixing():
    g = antitree((1,), (2,), 3)
    c = AutomorphismConstraint(((VertexId(1, 0), VertexId(1, 1)),), frozenset({2}))
    tau = find_rooted_automorphism(g, c)
    assert tau is not None and tau.satisfies(c) and tau.preserves(g)


def test_algebra():
    g = antitree((1,), (3,), 2)
    a = find_rooted_automorphism(g, AutomorphismConstraint(((VertexId(1, 0), VertexId(1, 1)),)))
    b = find_rooted_automorphism(g, AutomorphismConstraint(((VertexId(2, 0), VertexId(2, 2)),)))
    ab = a.compose(b)
    assert ab.preserves(g)
    assert ab.compose(ab.inverse()) == Automorphism.identity(g)
    assert ab(VertexId(2, 0)) == a(b(VertexId(2, 0)))


@pytest.mark.parametrize("name", SMALL)
def test_existence_matches_brute_force(name):
    g = ALL_GRAPHS[name]
    group = brute_force_automorphisms(g)
    for n in range(g.depth + 1):
        for i in range(g.sphere_sizes[n]):
            for j in range(g.sphere_sizes[n]):
                c = AutomorphismConstraint(((VertexId(n, i), VertexId(n, j)),))
                expect = any(p[n][i] == j for p in group)
                tau = find_rooted_automorphism(g, c)
                assert (tau is not None) == expect
                if tau is not None:
                    assert tau.preserves(g) and tau.satisfies(c)


@pytest.mark.parametrize("name", SMALL)
def test_symmetry_matches_brute_force(name):
    g = ALL_GRAPHS[name]
    group = brute_force_automorphisms(g)
    transitive = all(
        {p[n][0] for p in group} == set(range(g.sphere_sizes[n])) for n in range(g.depth + 1)
    )
    assert (check_spherically_symmetric(g).verdict == "pass") == transitive


class TestSymmetry:
    def test_antitrees(self):
        for g in (antitree((1,), (2, 3), 4), antitree((1, 3), (1, 2), 4)):
            assert check_spherically_symmetric(g).verdict == "pass"

    def test_fig4a_split(self):
        rep = check_spherically_symmetric(load_figure("fig4a"))
        assert rep.verdict == "fail"
        first = rep.splits[0]
        assert first.n == 3
        assert {first.representative, first.other} == {label_vertex("fig4a", "v4"), label_vertex("fig4a", "v5")}

    def test_fig4b(self):
        rep = check_spherically_symmetric(load_figure("fig4b"))
        assert rep.verdict == "pass"
        assert rep.label == "certificate at depth 6"

    def test_certificates(self):
        g = load_figure("fig4b")
        rep = check_spherically_symmetric(g)
        for v, tau in rep.certificates.items():
            assert tau.preserves(g)
            assert tau(VertexId(v.sphere, 0)) == v


class TestFamilyPreserving:
    def test_antitrees(self):
        for g in (antitree((1,), (2, 3), 4), antitree((1,), (3,), 3)):
            assert check_family_preserving(g, g.depth).verdict == "pass"

    def test_trees_with_complete_spheres(self):
        for g in (tree_cs((2,), (1,), 4), tree_cs((2,), (0, 1), 4), tree_cs((3,), (0,), 3)):
            assert check_family_preserving(g, g.depth).verdict == "pass"

    @pytest.mark.parametrize("rays", [2, 3, 5])
    def test_fig5(self, rays):
        rep = check_family_preserving(load_figure("fig5", rays), 3)
        assert rep.verdict == "fail"
        assert any(v == "fail" for v in rep.verdicts.values())

    def test_witnesses_valid(self):
        g = antitree((1,), (2, 3), 4)
        rep = check_family_preserving(g, 3)
        assert rep.witnesses
        for key, tau in rep.witnesses.items():
            assert tau.preserves(g)
            assert tau.satisfies(rep.constraint_for(key))

    def test_counterexamples_have_no_automorphism(self):
        g = load_figure("fig5", 2)
        rep = check_family_preserving(g, 2)
        for c in rep.counterexamples:
            assert find_rooted_automorphism(g, rep.constraint_for((c.condition, c.x, c.y))) is None

    def test_clamps(self):
        rep = check_family_preserving(antitree((1,), (2,), 2), 5)
        assert rep.n_max == 2 and rep.warnings


@pytest.mark.parametrize("name", sorted(ALL_GRAPHS))
def test_family_preserving_implies_strong_and_symmetric(name):
    g = ALL_GRAPHS[name]
    if check_family_preserving(g, g.depth).verdict == "pass":
        assert check_strongly_path_commuting(g, g.depth, g.depth).verdict == "pass"
        assert check_spherically_symmetric(g).verdict == "pass"
