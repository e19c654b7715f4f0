"""Entanglement detection for multipartite pure states via 2x2 minors.

The central quantity is the M functional of a bipartition: the sum of
``f(minor)`` over all 2x2 minors of the amplitude matrix. It vanishes exactly
on product states, and for ``f = |.|^2`` equals twice the linear entropy of
either reduced state.
"""
from .detect import (
    EntanglementReport,
    Factorization,
    MinorFunction,
    abs2,
    abs_p,
    classify,
    is_factorizable,
    m_functional,
    minor_function,
    minor_sum,
)
from .ghz import (
    CanonicalizationTrace,
    LocalUnitaryCircuit,
    apply_local_unitary,
    check_maximal,
    ghz_canonicalize,
)
from .optimize import OptimizerConfig, OptResult, gradient_check, maximize_min_m, objective
from .schmidt import (
    DensityMatrix,
    SchmidtDecomposition,
    max_entangled_state,
    purity,
    reduced_density,
    schmidt_decompose,
)
from .statespace import (
    AmplitudeTensor,
    Bipartition,
    enumerate_bipartitions,
    load_state,
    make_state,
    matricize,
    random_state,
    save_state,
)

__version__ = "0.1.0"

__all__ = [
    "EntanglementReport",
    "Factorization",
    "MinorFunction",
    "abs2",
    "abs_p",
    "classify",
    "is_factorizable",
    "m_functional",
    "minor_function",
    "minor_sum",
    "CanonicalizationTrace",
    "LocalUnitaryCircuit",
    "apply_local_unitary",
    "check_maximal",
    "ghz_canonicalize",
    "OptimizerConfig",
    "OptResult",
    "gradient_check",
    "maximize_min_m",
    "objective",
    "DensityMatrix",
    "SchmidtDecomposition",
    "max_entangled_state",
    "purity",
    "reduced_density",
    "schmidt_decompose",
    "AmplitudeTensor",
    "Bipartition",
    "enumerate_bipartitions",
    "load_state",
    "make_state",
    "matricize",
    "random_state",
    "save_state",
]
