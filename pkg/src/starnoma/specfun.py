"""Numerical primitives: gamma, generalized hypergeometric series, Gauss-Legendre rules.

The hypergeometric series here is the plain term-wise sum

    H({a}, {b}, x) = sum_{n>=0} [prod_i (a_i)_n / prod_j (b_j)_n] * x^n / n!

with Pochhammer symbols (a)_n.  No analytic continuation is attempted: if the
terms do not settle below the tolerance within the term cap, evaluation fails
loudly instead of returning a misleading partial sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "HypParams",
    "SeriesConvergenceError",
    "gamma",
    "hyp_pfq",
    "gauss_legendre",
]

# Series controls: cap and tolerance for term-wise summation.
MAX_TERMS = 10_000
SERIES_RTOL = 1e-12


class SeriesConvergenceError(ArithmeticError):
    """Raised when term-wise summation fails to settle within the term cap."""


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def gamma(x: float) -> float:
    """Gamma function with an explicit pole check at non-positive integers."""
    if _is_nonpositive_integer(x):
        raise ValueError(f"gamma pole at non-positive integer x={x}")
    return math.gamma(x)


@dataclass(frozen=True)
class HypParams:
    """Parameter set of a generalized hypergeometric series.

    upper/lower are the numerator/denominator parameter lists, argument is the
    (real) evaluation point.  Lower parameters must avoid non-positive
    integers, where every term past some index divides by zero.
    """

    upper: tuple = field(default=())
    lower: tuple = field(default=())
    argument: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(float(a) for a in self.upper))
        object.__setattr__(self, "lower", tuple(float(b) for b in self.lower))
        for b in self.lower:
            if _is_nonpositive_integer(b):
                raise ValueError(f"lower parameter {b} is a pole of the series")


def hyp_pfq(
    upper: Sequence[float] | HypParams,
    lower: Sequence[float] | None = None,
    x: float | None = None,
    rtol: float = SERIES_RTOL,
    max_terms: int = MAX_TERMS,
) -> float:
    """Term-wise sum of the generalized hypergeometric series.

    Accepts either an HypParams record or (upper, lower, x) directly.  The sum
    stops once the running term stays below rtol * |partial sum| for three
    consecutive terms; a terminating series (non-positive integer upper
    parameter) returns its finite sum exactly.
    """
    if isinstance(upper, HypParams):
        p = upper
    else:
        p = HypParams(tuple(upper), tuple(lower), float(x))

    total = 0.0
    term = 1.0
    quiet = 0
    for n in range(max_terms):
        total += term
        ratio = 1.0
        for a in p.upper:
            ratio *= a + n
        if ratio == 0.0:  # terminating series: next and all later terms vanish
            return total
        for b in p.lower:
            ratio /= b + n
        term = term * ratio * p.argument / (n + 1)
        if not math.isfinite(term):
            raise SeriesConvergenceError(
                f"series terms overflowed at n={n} "
                f"(upper={p.upper}, lower={p.lower}, x={p.argument}); "
                "the argument is outside the term-wise convergence region"
            )
        if abs(term) <= rtol * abs(total):
            quiet += 1
            if quiet >= 3:
                return total + term
        else:
            quiet = 0
    raise SeriesConvergenceError(
        f"series did not settle within {max_terms} terms "
        f"(upper={p.upper}, lower={p.lower}, x={p.argument}); "
        "the argument is likely outside the term-wise convergence region"
    )


def gauss_legendre(order: int):
    """Nodes and weights of the Gauss-Legendre rule on [-1, 1].

    A rule of this order integrates polynomials of degree <= 2*order - 1
    exactly; the weights sum to 2.
    """
    if not 1 <= int(order) <= 128 or int(order) != order:
        raise ValueError(f"quadrature order must be an integer in [1, 128], got {order}")
    nodes, weights = np.polynomial.legendre.leggauss(int(order))
    return nodes, weights
