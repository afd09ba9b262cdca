"""Spectral decomposition of layered (spherically organized) rooted graphs into Jacobi blocks."""

from .graph import (
    GraphError,
    LayeredGraph,
    VertexId,
    attach_rays,
    build_antitree,
    build_tree_complete_spheres,
    compress_operator,
    from_edges,
)
from .sequences import SequenceSpec, parse_sequence, parse_tree_spec, sparse_gamma_sequence, sparse_tree_specs
from .lgf import LGFError, parse_lgf, serialize_lgf
from .paths import (
    Species,
    check_commuting_family,
    check_path_commuting,
    check_strongly_path_commuting,
    count_paths,
    lambda_matrix,
)
from .automorphisms import (
    Automorphism,
    AutomorphismConstraint,
    check_family_preserving,
    check_spherically_symmetric,
    find_rooted_automorphism,
)
from .decomposition import (
    Decomposition,
    JacobiBlock,
    ResidualError,
    antitree_closed_form,
    reconcile,
    tree_cs_closed_form,
    tridiagonalize,
    verify_finitely_supported_eigenfunctions,
)
from .jacobi import (
    JacobiMatrix,
    PeriodicJacobi,
    bands_periodic,
    detect_eventually_periodic,
    eigenvalues_tridiagonal,
    spectrum_union,
    sturm_count,
)

__version__ = "0.1.0"
