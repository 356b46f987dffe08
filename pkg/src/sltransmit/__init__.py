"""Spectral computations for Sturm-Liouville problems with transmission
conditions at three interior points and an eigenparameter-dependent right
boundary condition."""

from .characteristic import (
    char_derivative_at_eigenvalue,
    char_function,
    char_value,
    left_solution,
    right_solution,
)
from .errors import (
    EtaIsEigenvalue,
    InvalidProblem,
    NotAnEigenvalue,
    ScanExhausted,
    SLError,
    StepFailure,
)
from .hilbert import HElement, expand, inner_product_H, norm_H, orthogonality_check
from .problem import (
    PotentialSpec,
    ProblemSpec,
    TransmissionBlock,
    load_problem,
    make_spec,
    validate_spec,
)
from .resolvent import resolvent_solve
from .spectrum import find_eigenvalues, simplicity_certificate

__version__ = "0.1.0"
