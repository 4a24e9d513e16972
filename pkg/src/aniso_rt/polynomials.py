"""Monomial bookkeeping for small multivariate polynomials.

Polynomials are stored as coefficient arrays over a graded list of
exponent tuples, as returned by :func:`exponents`. Vector-valued
polynomials use an array of shape ``(d, n_monomials)``.
"""

from functools import lru_cache
from itertools import product
from math import factorial

import numpy as np


@lru_cache(maxsize=None)
def exponents(d, degree):
    """Exponent tuples of all monomials in ``d`` variables of total degree <= ``degree``.

    Ordered by total degree, then reverse-lexicographically, so the first
    monomial is always the constant.
    """
    out = []
    for n in range(degree + 1):
        out.extend(homogeneous_exponents(d, n))
    return tuple(out)


@lru_cache(maxsize=None)
def homogeneous_exponents(d, n):
    """Exponent tuples of monomials of exact total degree ``n``."""
    found = [e for e in product(range(n + 1), repeat=d) if sum(e) == n]
    return tuple(sorted(found, reverse=True))


def multi_indices(d, order):
    """All multi-indices in N_0^d with ``|eps| == order``."""
    return [np.array(e, dtype=int) for e in homogeneous_exponents(d, order)]


def evaluate_monomials(exps, x, deriv=None):
    """Evaluate monomials (or one partial derivative of them) at points.

    Parameters
    ----------
    exps : sequence of tuple
        Exponents, one tuple per monomial.
    x : ndarray, shape (n, d)
    deriv : tuple of int, optional
        Multi-index of the partial derivative to take.

    Returns
    -------
    ndarray, shape (n, len(exps))
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    e = np.asarray(exps, dtype=int)
    coef = np.ones(len(e))
    if deriv is not None:
        deriv = np.asarray(deriv, dtype=int)
        for i, k in enumerate(deriv):
            for j in range(k):
                coef = coef * (e[:, i] - j)
        e = e - deriv
    vals = np.ones((x.shape[0], len(exps)))
    live = coef != 0
    for i in range(x.shape[1]):
        p = np.where(live, np.maximum(e[:, i], 0), 0)
        vals *= x[:, i : i + 1] ** p
    return vals * coef


def exact_simplex_monomial_integral(exp):
    """Integral of x^exp over the unit simplex conv{0, e_1, ..., e_d}.

    Uses the Dirichlet formula prod(a_i!) / (d + sum a_i)!.
    """
    num = 1
    for a in exp:
        num *= factorial(a)
    return num / factorial(len(exp) + sum(exp))


def gradient_coefficients(coeffs, d, degree):
    """Coefficient arrays of the partial derivatives of a scalar polynomial.

    Returns an array of shape ``(d, n_monomials)`` over the same monomial
    list (the top-degree entries of the derivatives are zero).
    """
    exps = exponents(d, degree)
    index = {e: i for i, e in enumerate(exps)}
    out = np.zeros((d, len(exps)))
    for j, e in enumerate(exps):
        c = coeffs[j]
        if c == 0.0:
            continue
        for i in range(d):
            if e[i] == 0:
                continue
            lowered = list(e)
            lowered[i] -= 1
            out[i, index[tuple(lowered)]] += c * e[i]
    return out
