"""Builtin example graphs: the small counterexample figures and generator shortcuts."""

from __future__ import annotations

from importlib import resources

from .graph import LayeredGraph, VertexId, attach_rays, build_antitree, build_tree_complete_spheres
from .lgf import parse_lgf
from .sequences import SequenceSpec

FIGURES = ("fig3a", "fig3b", "fig4a", "fig4b", "fig5")

# Labels of the drawn vertices, sphere by sphere.
_LABELS = {
    "fig3a": [["o"], ["v1"], ["v2", "v3"], ["v4", "v5", "v6"]],
    "fig3b": [["o"], ["v1"], ["v2", "v3"], ["v4", "v5"]],
    "fig4a": [["o"], ["v1"], ["v2", "v3"], ["v4", "v5", "v6"]],
    "fig4b": [["o"], ["v1", "v2", "v3"], ["v4", "v5", "v6", "v7", "v8", "v9"], ["v10", "v11", "v12"]],
    "fig5": [["o"], ["v1", "v2", "v3"], ["v4", "v5", "v6"]],
}

DEFAULT_RAY_LENGTH = 3


def figure_text(name: str) -> str:
    if name not in FIGURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIGURES)}")
    return resources.files(__package__).joinpath("data", f"{name}.lgf").read_text(encoding="utf-8")


def load_figure(name: str, ray_length: int = DEFAULT_RAY_LENGTH) -> LayeredGraph:
    """The figure graph; dotted continuations become rays of ``ray_length`` vertices."""
    return attach_rays(parse_lgf(figure_text(name)), ray_length)


def vertex_label(name: str, v: VertexId) -> str:
    spheres = _LABELS.get(name)
    if spheres and v.sphere < len(spheres):
        return spheres[v.sphere][v.index]
    return str(v)


def label_vertex(name: str, label: str) -> VertexId:
    for n, row in enumerate(_LABELS[name]):
        if label in row:
            return VertexId(n, row.index(label))
    raise KeyError(label)


def antitree(prefix, tail, depth: int) -> LayeredGraph:
    return build_antitree(SequenceSpec(tuple(prefix), tuple(tail) if tail else None), depth)


def tree_cs(k_tail, gamma_tail, depth: int, k_prefix=(), gamma_prefix=()) -> LayeredGraph:
    return build_tree_complete_spheres(
        SequenceSpec(tuple(k_prefix), tuple(k_tail)),
        SequenceSpec(tuple(gamma_prefix), tuple(gamma_tail)),
        depth,
    )
