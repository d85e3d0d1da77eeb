"""Exact projectively equivariant quantization and symbol calculus."""

from .algebra import Poly, Scalar
from .errors import (
    DegenerateCurvatureError,
    NonterminatingSeries,
    NotOperatorSymbol,
    ParseError,
    ResonanceError,
    UsageError,
)
from .equivariance import (
    VectorField,
    act_on_density_op,
    act_on_operator,
    act_on_symbol,
    check_equivariance,
    sl_generators,
)
from .expr import parse, parse_symbol
from .operators import DiffOperator
from .quantize import (
    QContext,
    coeff_q_closed,
    coeff_q_recursive,
    coeff_s_recursive,
    hypergeom_apply,
    invert_triangular,
    is_resonant,
    normal_order,
    pochhammer,
    quantize,
    symbolize,
    unorder,
)
from .sphere import build_metric, laplacian, verify_geodesic, verify_length_element, verify_power_identity
from .symbols import BaseTable, RadicalSymbol, decompose, divergence, euler, rs_eq

__version__ = "0.1.0"
