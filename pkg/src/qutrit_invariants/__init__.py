"""SLOCC invariants of three-qutrit states.

Two evaluation paths for the fundamental invariants I6, I9, I12 and the
3x3x3 hyperdeterminant: a matrix path (power traces of the 78x78 adjoint
matrix and a 9x9 Strassen determinant) valid for any state, and closed
forms on the real semi-simple slice ``a*v1 + b*v2 + c*v3``.
"""

from .closed_form import (
    M_DELTA,
    M_I6,
    M_I9,
    M_I12,
    M_S_INDEX,
    delta_ss,
    grad_delta_ss,
    grad_i6_ss,
    grad_i9_ss,
    grad_i12_ss,
    i6_f3prime,
    i6_ss,
    i9_ss,
    i12_ss,
    invariants_f2prime,
    invariants_ss,
    s_index,
)
from .invariant_set import InvariantSet, hyperdet_from_fundamentals
from .invariants_matrix import (
    AdjointMatrix,
    build_adjoint,
    fundamental_invariants,
    fundamental_invariants_batch,
    hyperdet,
    power_trace,
    strassen_det,
    strassen_matrix,
)
from .optimize import (
    ChartError,
    OptConfig,
    OptResult,
    implicit_gradient,
    is_critical,
    is_critical_state,
    known_maximizers,
    maximize_abs,
    objective,
    perturb_and_ascend,
)
from .states import (
    Family,
    QutritState,
    SemiSimpleCoeffs,
    apply_slocc,
    classify_semisimple_family,
    named_state,
    permute_parties,
    sample_semisimple,
    semisimple_to_tensor,
)
from .stats import (
    Histogram,
    SphereGrid,
    histogram,
    last_bin_fraction,
    sample_and_evaluate,
    sorted_curve,
    sphere_grid,
)

__version__ = "0.1.0"
