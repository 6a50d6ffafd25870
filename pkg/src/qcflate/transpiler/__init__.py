from .kak import KAK, canonical_gate, kak, kak_decompose, num_cnots, weyl_coordinates
from .passes import lower_to_basis, optimize
from .pipeline import (
    PassConfig,
    TranspileReport,
    best_of_trials,
    efficient_pipeline,
    semantic_fidelity,
    transpile,
    transpile_cascade,
)
from .routing import LayoutPermutation, route
from .synthesis import decompose_controlled_u, decompose_toffoli, decompose_u3_to_basis, unitary_to_basis, zyz_angles

__all__ = [
    "KAK",
    "LayoutPermutation",
    "PassConfig",
    "TranspileReport",
    "best_of_trials",
    "canonical_gate",
    "decompose_controlled_u",
    "decompose_toffoli",
    "decompose_u3_to_basis",
    "efficient_pipeline",
    "kak",
    "kak_decompose",
    "lower_to_basis",
    "num_cnots",
    "optimize",
    "route",
    "semantic_fidelity",
    "transpile",
    "transpile_cascade",
    "unitary_to_basis",
    "weyl_coordinates",
    "zyz_angles",
]
