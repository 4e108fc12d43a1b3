"""Higher order Salvetti complexes of real central arrangements, via
oriented matroids, with the braid-arrangement spectral pages."""

__version__ = "0.1.0"

from .signs import SignVector, compose, vector_leq, separation_orthogonal, level_maps  # noqa: E402,F401
from .partitions import Partition, enumerate_partitions, shuffles  # noqa: E402,F401
from .matroid import (  # noqa: E402,F401
    CircuitSet,
    CovectorSet,
    AxiomReport,
    check_circuit_axioms,
    check_covector_axioms,
    check_symmetric_ell_axioms,
    faces_from_circuits,
    chains_encode_decode,
    build_L_ell,
)
from .arrangement import (  # noqa: E402,F401
    Arrangement,
    braid_arrangement,
    sign_of_point,
    cocircuits,
    covectors,
    circuits,
    localization,
    partition_dictionary,
    embed_vertex,
)
from .complexes import (  # noqa: E402,F401
    Poset,
    order_complex,
    salvetti_cw,
    chain_complex,
    smith_homology,
    skeletal_filtration,
)
from .braid import (  # noqa: E402,F401
    render_symbol,
    equivariant_complex,
    d1_apply,
    build_pages,
    quotient_homology,
    GradedModule,
)
