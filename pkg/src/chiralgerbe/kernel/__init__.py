from .expr import parse_ratexpr
from .matrix import RatMatrix, jacobian_of_map, matrix_invert
from .ratfunc import RatFunc, fraction_field, partial, ratfunc_normalize
from .series import UQSeries, series_invert, series_mul, series_sum

__all__ = [
    "RatFunc", "RatMatrix", "UQSeries", "fraction_field", "jacobian_of_map",
    "matrix_invert", "parse_ratexpr", "partial", "ratfunc_normalize",
    "series_invert", "series_mul", "series_sum",
]
