"""Exact free-probability toolkit for commutators and quadratic forms in free variables."""

from .errors import ResourceBoundError
from .exactalg import ExactMatrix, GaussianRational, I, MultiPoly, PowerSeries, fmt, parse_entry, parse_scalar
from .freecalc import (
    CumulantSpec,
    FreeFamily,
    NCPolynomial,
    boxed_convolution,
    commutator,
    cumulants_from_moments,
    fid_hankel_check,
    mixed_moment,
    moments_from_cumulants,
    poly_cumulant,
)
from .ncpart import Permutation, SetPartition, enumerate_nc, kreweras, upper_complements
from .quadform import QuadraticForm, quad_cumulants, strong_cancellation_check, t2_commutator_table
from .laws import LawSpec, gen_tetilla, semicircle_law, skew_law_decompose, tetilla_law

__version__ = "0.1.0"
