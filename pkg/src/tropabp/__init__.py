"""Min-plus polynomials, circuits, branching programs and their compilers."""

from .models import Abp, Circuit, Const, Edge, Formula, Gate, Leaf, Lin, Var, expand, model_eval
from .poly import BudgetExceeded, TropPoly, func_equal, parse_poly, poly_eval
from .semiring import INF, Mode

__version__ = "0.1.0"

__all__ = [
    "Abp",
    "Circuit",
    "Const",
    "Edge",
    "Formula",
    "Gate",
    "Leaf",
    "Lin",
    "Var",
    "expand",
    "model_eval",
    "BudgetExceeded",
    "TropPoly",
    "func_equal",
    "parse_poly",
    "poly_eval",
    "INF",
    "Mode",
]
