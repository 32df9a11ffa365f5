"""Compilation passes between formulas, ABPs and polynomials."""

from .alternating import alt_formula_to_abp, normalize_alternating
from .brent import brent_depth_reduce
from .factor import Factorization, factor_formula, factor_product, univariate_factor
from .report import PassReport, parse_pass, run_pass
from .width import abp_to_alt_formula, abp_width_reduce
from .width2 import bivariate_to_width2, q_add, q_atom, q_read, q_sum_atoms, q_wrap, univariate_to_width2

__all__ = [
    "alt_formula_to_abp",
    "normalize_alternating",
    "brent_depth_reduce",
    "Factorization",
    "univariate_factor",
    "factor_product",
    "factor_formula",
    "PassReport",
    "parse_pass",
    "run_pass",
    "abp_to_alt_formula",
    "abp_width_reduce",
    "bivariate_to_width2",
    "univariate_to_width2",
    "q_add",
    "q_atom",
    "q_read",
    "q_sum_atoms",
    "q_wrap",
]
