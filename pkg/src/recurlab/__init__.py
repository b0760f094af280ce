"""recurlab: exact-arithmetic experiments with almost-rigid operators.

The package builds a family of isometry-like operators on truncated
sequence spaces whose return-time behaviour splits sharply by tuple size:
below the fold parameter, simultaneous approximate returns exist along an
explicit lattice of times; at the fold parameter plus one, the basis tuple
never comes back.  Natural-number set utilities, density profiles and
report writers round out the toolbox.
"""

from .natset import (ArithmeticProgression, CofinitenessReport, DeltaOf,
                     DensityReport, Explicit, IntersectionOf, IpClosure,
                     Multiples, NatSet, NatSetError, RotationReturn, UnionOf,
                     cofinite_within, density_profile, difference_set, find_ap,
                     intersects, materialize, window_pair_witness)
from .opcore import (SUP, Applied, BasisSystem, BlockPermutationIsometry,
                     Diagonal, OpcoreError, Vec, WeightedBackwardShift,
                     basis_vec, diagonal_rotation, distance, dyadic_comb,
                     krylov_rank, unimodular_eigen_indices, vec_of, zero_vec)
from .perturbed_rotation import (DEFAULT_MESH, GROWTH_RULES, ConstructionError,
                                 FunctionalGrid, GridEntry, GridResolutionError,
                                 ModulusLadder, PerturbedRotation, RigidityDefect,
                                 ScanReport, WitnessPoint, annihilating_functional,
                                 build_functional_grid, build_modulus_ladder,
                                 build_operator, dominant_index,
                                 lattice_candidates, non_recurrence_scan,
                                 quantize_head_functional, recurrence_witness,
                                 rigidity_defect)
from .dynamics import (DynamicsError, InclusionReport, PeriodClassification,
                       QrFailure, QrWitness, ReturnSpec,
                       classify_period_by_density, commutant_return_inclusion,
                       detect_period, operator_norm_bound, polynomial_apply,
                       quasi_rigidity_search, return_set, subsample_return_set,
                       tuple_recurrence_probe)
from .report import (atomic_write_text, descriptor_hash, line_plot_svg,
                     make_record, write_csv, write_json, write_svg)

__version__ = "0.1.0"

__all__ = [
    "ArithmeticProgression", "CofinitenessReport", "DeltaOf", "DensityReport",
    "Explicit", "IntersectionOf", "IpClosure", "Multiples", "NatSet",
    "NatSetError", "RotationReturn", "UnionOf", "cofinite_within",
    "density_profile", "difference_set", "find_ap", "intersects",
    "materialize", "window_pair_witness",
    "SUP", "Applied", "BasisSystem", "BlockPermutationIsometry", "Diagonal",
    "OpcoreError", "Vec", "WeightedBackwardShift", "basis_vec",
    "diagonal_rotation", "distance", "dyadic_comb", "krylov_rank",
    "unimodular_eigen_indices", "vec_of", "zero_vec",
    "DEFAULT_MESH", "GROWTH_RULES", "ConstructionError", "FunctionalGrid",
    "GridEntry", "GridResolutionError", "ModulusLadder", "PerturbedRotation",
    "RigidityDefect", "ScanReport", "WitnessPoint", "annihilating_functional",
    "build_functional_grid", "build_modulus_ladder", "build_operator",
    "dominant_index", "lattice_candidates", "non_recurrence_scan",
    "quantize_head_functional", "recurrence_witness", "rigidity_defect",
    "DynamicsError", "InclusionReport", "PeriodClassification", "QrFailure",
    "QrWitness", "ReturnSpec", "classify_period_by_density",
    "commutant_return_inclusion", "detect_period", "operator_norm_bound",
    "polynomial_apply", "quasi_rigidity_search", "return_set",
    "subsample_return_set", "tuple_recurrence_probe",
    "atomic_write_text", "descriptor_hash", "line_plot_svg", "make_record",
    "write_csv", "write_json", "write_svg",
    "__version__",
]
