"""Coefficient functions of time and time-dependent vector fields."""
from .expr import (
    BUILTINS,
    Node,
    bind,
    compile_expr,
    diff,
    eval_exact,
    parse_time_expression,
    to_string,
)
from .functions import (
    CallableFunction,
    CentralDifference,
    ExpressionFunction,
    ScalarTimeFunction,
    as_time_function,
    constant,
    texp,
    tlog,
    tsqrt,
)
from .tdfield import (
    NumericField,
    TimeDependentField,
    autonomise,
    diagonal_prolongation,
    eval_tdf,
)

__all__ = [
    "BUILTINS", "Node", "bind", "compile_expr", "diff", "eval_exact",
    "parse_time_expression", "to_string", "CallableFunction", "CentralDifference",
    "ExpressionFunction", "ScalarTimeFunction", "as_time_function", "constant",
    "texp", "tlog", "tsqrt", "NumericField", "TimeDependentField", "autonomise",
    "diagonal_prolongation", "eval_tdf",
]
