"""Numerical toolkit for Legendrian self-shrinkers in contact Euclidean space.

Modules
-------
ambient     Sasakian structure, frame, connection and curvature of R^(2n+1).
immersion   Charts of immersed submanifolds and their extrinsic geometry.
models      Closed-form shrinker surfaces, the Clifford pair and the A-L curve.
family      ODE family of self-similar surfaces and its first integral.
lift        Legendrian lifts of Lagrangian immersions, holonomy, embedding.
curveflow   Explicit Legendre curve shortening flow in R^3.
checks      Gated verification routines behind the command line.
report      Verification reports and deterministic serialization.
"""
__version__ = "0.1.0"

from .ambient import AmbientSpace, AmbientVector, eval_eta, eval_metric, eval_phi, phi_basis
from .errors import (AngleUndefinedError, DiscretizationError, DomainError, LiftRefusedError,
                     LSLError, NumericalDerivativeError, ParameterError, RankError,
                     StabilityError, StructuralError)
from .immersion import ImmersionChart

__all__ = [
    "__version__", "AmbientSpace", "AmbientVector", "eval_eta", "eval_metric", "eval_phi",
    "phi_basis", "ImmersionChart", "LSLError", "StructuralError", "DomainError",
    "ParameterError", "NumericalDerivativeError", "RankError", "AngleUndefinedError",
    "LiftRefusedError", "StabilityError", "DiscretizationError",
]
