"""Numerical checks of the range-projection inequality ``Phi(R[A]) <= R[Phi(A)]``
for block pinchings on ``M_n(C)``, and of the rank, determinant and
fractional-power inequalities that come with it."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .linalg_core import (  # noqa: F401
    DEFAULT_TOLERANCES,
    EigenDecomposition,
    LoewnerResult,
    Tolerances,
    eigh,
    frobenius_norm,
    is_psd,
    load_matrix,
    loewner_leq,
    make_hermitian,
    operator_norm,
    trace,
)
from .functional_calculus import (  # noqa: F401
    SpectralFunction,
    apply_spectral,
    matrix_power,
    normalized_rank,
    numeric_rank,
    range_projection,
    range_projection_via_limit,
)
from .pinching import (  # noqa: F401
    Partition,
    PinchingMap,
    apply_pinching,
    extract_block,
    is_in_subalgebra,
    parse_partition,
    pinching_via_unitaries,
)
from .inequalities import (  # noqa: F401
    InequalityVerdict,
    QuadratureParams,
    check_hadamard_fischer,
    check_jensen_power,
    check_limit_lemma,
    check_main_theorem,
    check_normalized_rank,
    check_projection_lemma,
    check_rank_inequality,
    scalar_power_integral,
)
