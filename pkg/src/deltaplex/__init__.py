"""Delta-complex toolkit: homology, pseudo-manifold classification,
group actions and quotients, orientation double covers, and exact
rational coefficient arithmetic.

Everything is deterministic and arbitrary-precision: integer homology
goes through an exact Smith normal form, coefficient arithmetic through
fractions.Fraction.  No floating point, no randomness.
"""

__version__ = "0.1.0"

from .complex_core import (
    Cell,
    DeltaComplex,
    ComplexError,
    ValidationError,
    build_complex,
    validate_cells,
    f_vector,
    euler_characteristic,
    connected_components,
    subcomplex,
    iterated_face,
    barycentric_subdivision,
    to_json,
    from_json,
)
from .homology import (
    IntegerMatrix,
    SmithForm,
    smith_normal_form,
    boundary_matrix,
    homology,
    cohomology,
    has_connected_double_cover,
)
from .pseudo_manifold import (
    PMClassification,
    classify,
    orientation_assignment,
    is_orientable,
    index_of_pair,
    coregularity_zero_check,
)
from .group_actions import (
    CellMap,
    SimplicialAction,
    DoubleCover,
    validate_action,
    regularize,
    quotient,
    orientation_character,
    orientation_double_cover,
    is_strict_isomorphism,
)
from .constructors import (
    hyperoctahedron,
    simplex_boundary,
    suspension,
    antipodal_action,
    cyclic_permutation_action,
    rp2,
)
from .coeff_arith import (
    MembershipCertificate,
    P1Boundary,
    weil_index,
    adjunction_bound,
    dlambda_member,
    dlambda_enumerate,
    p1_solutions,
    adjunction_divisibility_audit,
    geq_half_classification,
)
