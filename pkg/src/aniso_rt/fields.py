"""Analytic vector fields with closed-form derivatives up to order two.

All callables are vectorised over points: ``value`` maps an (n, d) array to
(n, d), ``gradient`` to (n, d, d) with ``G[:, i, j] = d v_i / d x_j`` and
``hessian`` to (n, d, d, d) with ``H[:, i, j, k] = d^2 v_i / d x_j d x_k``.
"""

from dataclasses import dataclass

import numpy as np

from .polynomials import evaluate_monomials, exponents


class VectorField:
    """A vector field on R^d with analytic first and second derivatives."""

    max_order = 2

    def __init__(self, dim, value, gradient, hessian, name="field"):
        self.dim = dim
        self._value = value
        self._gradient = gradient
        self._hessian = hessian
        self.name = name

    def __repr__(self):
        return f"<VectorField {self.name!r} d={self.dim}>"

    def value(self, x):
        return self._value(np.atleast_2d(np.asarray(x, dtype=float)))

    def gradient(self, x):
        return self._gradient(np.atleast_2d(np.asarray(x, dtype=float)))

    def hessian(self, x):
        return self._hessian(np.atleast_2d(np.asarray(x, dtype=float)))

    def divergence(self, x):
        return np.trace(self.gradient(x), axis1=1, axis2=2)

    def divergence_gradient(self, x):
        return np.einsum("niij->nj", self.hessian(x))

    def divergence_field(self):
        """The divergence as a :class:`ScalarField` (one derivative order less)."""
        return ScalarField(self.dim, self.divergence, self.divergence_gradient, name=f"div({self.name})")

    def __call__(self, x):
        return self.value(x)


class ScalarField:
    """Scalar field with a gradient; used for divergences."""

    max_order = 1

    def __init__(self, dim, value, gradient, name="scalar"):
        self.dim = dim
        self._value = value
        self._gradient = gradient
        self.name = name

    def value(self, x):
        return self._value(np.atleast_2d(np.asarray(x, dtype=float)))

    def gradient(self, x):
        return self._gradient(np.atleast_2d(np.asarray(x, dtype=float)))


class PolynomialField(VectorField):
    """Vector polynomial given by coefficients over :func:`exponents` ``(d, degree)``."""

    def __init__(self, coeffs, degree, name="polynomial"):
        coeffs = np.asarray(coeffs, dtype=float)
        d = coeffs.shape[0]
        self.coeffs = coeffs
        self.degree = degree
        self.exps = exponents(d, degree)
        if coeffs.shape != (d, len(self.exps)):
            raise ValueError(f"expected coefficients of shape {(d, len(self.exps))}, got {coeffs.shape}")
        unit = np.eye(d, dtype=int)

        def value(x):
            return evaluate_monomials(self.exps, x) @ coeffs.T

        def gradient(x):
            return np.stack([evaluate_monomials(self.exps, x, unit[j]) @ coeffs.T for j in range(d)], axis=-1)

        def hessian(x):
            H = np.empty((x.shape[0], d, d, d))
            for j in range(d):
                for k in range(j, d):
                    Hjk = evaluate_monomials(self.exps, x, unit[j] + unit[k]) @ coeffs.T
                    H[:, :, j, k] = Hjk
                    H[:, :, k, j] = Hjk
            return H

        super().__init__(d, value, gradient, hessian, name)


class WaveField(VectorField):
    """Sum of plane waves: ``v_i(x) = sum_m amp[i, m] sin(waves[i, m] . x + phase[i, m])``."""

    def __init__(self, amp, waves, phase, name="waves"):
        amp = np.asarray(amp, dtype=float)
        waves = np.asarray(waves, dtype=float)
        phase = np.asarray(phase, dtype=float)
        d = waves.shape[-1]

        def arg(x):
            return np.einsum("nd,imd->nim", x, waves) + phase

        def value(x):
            return np.einsum("im,nim->ni", amp, np.sin(arg(x)))

        def gradient(x):
            return np.einsum("im,nim,imj->nij", amp, np.cos(arg(x)), waves)

        def hessian(x):
            return -np.einsum("im,nim,imj,imk->nijk", amp, np.sin(arg(x)), waves, waves)

        super().__init__(d, value, gradient, hessian, name)


def monomial_field(d, degree, terms, name):
    """Polynomial field from ``{(component, exponent): coefficient}``."""
    exps = exponents(d, degree)
    C = np.zeros((d, len(exps)))
    for (i, e), c in terms.items():
        C[i, exps.index(e)] = c
    return PolynomialField(C, degree, name)


def counterexample_field():
    """``(0, x_2^2)`` on R^2."""
    return monomial_field(2, 2, {(1, (0, 2)): 1.0}, "counterexample")


def identity_field(d):
    """``v(x) = x``; a member of every RT^k."""
    return monomial_field(d, 1, {(i, tuple(int(i == j) for j in range(d))): 1.0 for i in range(d)}, "identity")


def constant_field(c):
    c = np.asarray(c, dtype=float)
    d = len(c)
    return monomial_field(d, 0, {(i, (0,) * d): c[i] for i in range(d)}, "constant")


def _poly_catalog(d):
    """Fixed polynomial fields of total degree 0..3."""
    z = (0,) * d

    def e(*pairs):
        out = [0] * d
        for axis, power in pairs:
            out[axis] += power
        return tuple(out)

    fields = [
        monomial_field(d, 0, {(i, z): 1.0 + 0.5 * i for i in range(d)}, "poly0"),
        monomial_field(d, 1, {(0, e((1, 1))): 2.0, (1, e((0, 1))): -1.0, (d - 1, z): 0.5}, "poly1"),
        monomial_field(d, 2, {(0, e((1, 2))): 1.0, (1, e((0, 1), (1, 1))): 0.7, (d - 1, e((0, 2))): -0.3}, "poly2"),
        monomial_field(d, 3, {(0, e((0, 2), (1, 1))): 1.0, (1, e((1, 3))): -0.5, (d - 1, e((0, 1))): 0.2}, "poly3"),
    ]
    return fields


def trig_field(d):
    """``(sin pi x1 sin pi x2, cos pi x1 cos pi x2)`` in 2D, an analogous product field in 3D."""
    # sin a sin b = (cos(a - b) - cos(a + b)) / 2 and cos = sin(. + pi/2).
    pi = np.pi
    h = pi / 2
    if d == 2:
        amp = [[0.5, -0.5], [0.5, 0.5]]
        waves = [[[pi, -pi], [pi, pi]], [[pi, -pi], [pi, pi]]]
        phase = [[h, h], [h, h]]
    else:
        amp = [[0.5, -0.5], [0.5, 0.5], [0.5, -0.5]]
        waves = [[[pi, -pi, 0], [pi, pi, 0]], [[0, pi, -pi], [0, pi, pi]], [[pi, 0, -pi], [pi, 0, pi]]]
        phase = [[h, h], [h, h], [h, h]]
    return WaveField(amp, waves, phase, "trig")


def anisotropic_field(d, frequency=40.0):
    """``(sin x1, sin(f x2) / f[, sin(f x3) / f])``: steep variation across the thin directions."""
    amp = np.zeros((d, 1))
    waves = np.zeros((d, 1, d))
    amp[0, 0] = 1.0
    waves[0, 0, 0] = 1.0
    for i in range(1, d):
        amp[i, 0] = 1.0 / frequency
        waves[i, 0, i] = frequency
    return WaveField(amp, waves, np.zeros((d, 1)), "anisotropic")


def catalog(d=2):
    """Named test fields for dimension ``d``.

    Returns
    -------
    list of VectorField
    """
    out = _poly_catalog(d)
    out.append(identity_field(d))
    if d == 2:
        out.append(counterexample_field())
    out.append(trig_field(d))
    out.append(anisotropic_field(d))
    return out


def get_field(name, d=2):
    """Look up a catalog field by name."""
    for f in catalog(d):
        if f.name == name:
            return f
    names = ", ".join(f.name for f in catalog(d))
    raise KeyError(f"unknown field {name!r} for d={d}; choose from {names}")


def random_polynomial_field(d, degree, rng, name="random"):
    exps = exponents(d, degree)
    return PolynomialField(rng.uniform(-1, 1, size=(d, len(exps))), degree, name)


def pullback_field(field, pmap):
    """Reference-side field ``det(A) A^{-1} v(Phi(x_ref))`` with chain-ruled derivatives."""
    A = pmap.affine.matrix
    Ai = pmap.affine.matrix_inv
    det = pmap.det
    phi = pmap.affine

    def value(xr):
        return det * field.value(phi(xr)) @ Ai.T

    def gradient(xr):
        G = field.gradient(phi(xr))
        return det * np.einsum("ia,nab,bj->nij", Ai, G, A, optimize=True)

    def hessian(xr):
        H = field.hessian(phi(xr))
        return det * np.einsum("ia,nabc,bj,ck->nijk", Ai, H, A, A, optimize=True)

    return VectorField(field.dim, value, gradient, hessian, f"pullback({field.name})")


def pushforward_field(field, pmap):
    """Physical-side field ``A v_ref(Phi^{-1}(x)) / det(A)``."""
    A = pmap.affine.matrix
    Ai = pmap.affine.matrix_inv
    det = pmap.det
    inv = pmap.affine.inverse()

    def value(x):
        return field.value(inv(x)) @ A.T / det

    def gradient(x):
        G = field.gradient(inv(x))
        return np.einsum("ia,nab,bj->nij", A, G, Ai, optimize=True) / det

    def hessian(x):
        H = field.hessian(inv(x))
        return np.einsum("ia,nabc,bj,ck->nijk", A, H, Ai, Ai, optimize=True) / det

    return VectorField(field.dim, value, gradient, hessian, f"push({field.name})")
