"""Exact arithmetic, spacetime relations and transformation groups for
checking automorphism lemmas about relativistic and classical kinematics."""

from .scalar import Scalar, Surd, format_scalar, parse_scalar, quad, sign, sqrt, to_scalar
from .linalg import AffineMap, Mat4, Point4, apply, compose, inverse, point
from .groups import classify, generate
from .relations import geometry, relation
from .harness import SuiteConfig, SuiteReport, run_suite

__version__ = "0.1.0"
