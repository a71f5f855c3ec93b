"""Exact-arithmetic cohomology engine for free graded-commutative
differential algebras over the rationals, with nilpotent Lie algebra models
and big-integer counterexample certificates."""

__version__ = "0.1.0"

from .algebra import (
    Element,
    GeneratorSpec,
    Monomial,
    Signature,
    SignatureMismatchError,
    basis_of_degree,
    elem_mul,
    mono_mul,
)
from .cdga import CDGA, DifferentialError, DSquaredViolation, TruncationError, check_d_squared
from .cohomology import BettiTable, VerifyReport, betti, representatives, tensor_product, verify_classes
from .lie import (
    CenterReport,
    JacobiError,
    LiePresentation,
    abelian_presentation,
    center,
    chevalley_eilenberg,
    dual_homotopy_lie,
    lower_central_series,
    nilpotency_class,
    u_n_presentation,
)
from .linalg import (
    ConsistencyError,
    MultimodularCertificate,
    RankResult,
    SparseExactMatrix,
    quotient_representatives,
    rank_exact,
    rank_multimodular,
    rank_only,
)
from .models import (
    FibrationTriple,
    ObstructionReport,
    borel_twist,
    c_formula,
    d_formula,
    degree_shift,
    principal_obstruction,
    split_at_k,
    torus_model,
    upper_tri_model,
    xr_model,
)
from .trc import (
    RatioEntry,
    ScanResult,
    TrcCertificate,
    XrCertificate,
    certificate_xr,
    certificate_xr_product,
    decimal_string,
    factorial_iterative,
    factorial_split,
    ratio_table,
    scan_minimal_counterexample,
    stirling_threshold,
    trc_inequality,
)
