"""Hermite spectral tools, complex-sector analysis and closed-form examples
for Schrodinger-type equations with harmonic confinement."""

__version__ = "0.1.0"

from .catalog import case_a, case_b, case_c, predict_singularities
from .hermite import HermiteExpansion, expand, synth
from .solver import assemble, eigen_solve, nonlinear_solve
from .special_complex import erfc, erfc_eval

__all__ = [
    "HermiteExpansion",
    "assemble",
    "case_a",
    "case_b",
    "case_c",
    "eigen_solve",
    "erfc",
    "erfc_eval",
    "expand",
    "nonlinear_solve",
    "predict_singularities",
    "synth",
]
