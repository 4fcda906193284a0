"""Exact verification toolkit for bicovariant differential calculi on O_q(N) and Sp_q(N)."""
from __future__ import annotations

from .scalar import SYMBOLIC, NumericField, Scalar
from .tensor import Subspace, Tensor
from .qdata import QData, build_qdata, group_spec
from .verify import SUITES, Context, Report, run_suite

__all__ = [
    "SYMBOLIC", "NumericField", "Scalar", "Subspace", "Tensor",
    "QData", "build_qdata", "group_spec",
    "SUITES", "Context", "Report", "run_suite",
]
__version__ = "0.1.0"
