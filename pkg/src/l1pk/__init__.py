"""Powered-l1 regularized Kaczmarz recovery of high-order tensors."""

from .errors import (DivergenceError, FormatError, RealifyError, ShapeError,
                     StructureError, TransformError)
from .io import read_hot1, write_hot1, write_trace_csv
from .prox import prox_l1p, prox_nl1p
from .solvers import RecoveryProblem, SolverConfig, solve
from .tprod import classical_tprod, conj_transpose, identity_tensor, tprod, tsvd, tsvt
from .transforms import make_dct, make_dft, make_identity, make_transform

__version__ = "0.1.0"
