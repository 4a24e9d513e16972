"""Affine maps, contravariant Piola maps and rotated direction frames."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import UnsupportedOrder


@dataclass(frozen=True, eq=False)
class AffineMap:
    """``x -> matrix @ x + offset``."""

    matrix: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        A = np.array(self.matrix, dtype=float)
        b = np.zeros(A.shape[0]) if self.offset is None else np.array(self.offset, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or b.shape != (A.shape[0],):
            raise ValueError("matrix must be square and offset a matching vector")
        if abs(np.linalg.det(A)) == 0.0:
            raise ValueError("affine map is singular")
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "offset", b)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @cached_property
    def det(self):
        return float(np.linalg.det(self.matrix))

    @cached_property
    def matrix_inv(self):
        return np.linalg.inv(self.matrix)

    def inverse(self):
        Ai = self.matrix_inv
        return AffineMap(Ai, -Ai @ self.offset)

    def compose(self, inner):
        """``self o inner``."""
        return AffineMap(self.matrix @ inner.matrix, self.matrix @ inner.offset + self.offset)

    def __call__(self, points):
        return affine_apply(self, points)


def affine_apply(amap, points):
    """Apply an affine map to one point (shape (d,)) or many (shape (n, d))."""
    x = np.asarray(points, dtype=float)
    return x @ amap.matrix.T + amap.offset


@dataclass(frozen=True, eq=False)
class PiolaMap:
    """Contravariant Piola transform ``v(x) = A v_ref(x_ref) / det A`` along an affine map."""

    affine: AffineMap

    @property
    def dim(self):
        return self.affine.dim

    @property
    def det(self):
        return self.affine.det

    def push(self, values):
        """Map field values at reference points to values at the image points."""
        v = np.asarray(values, dtype=float)
        return v @ self.affine.matrix.T / self.det

    def pull(self, values):
        """Inverse of :meth:`push`: ``det A * A^{-1} v``."""
        v = np.asarray(values, dtype=float)
        return self.det * (v @ self.affine.matrix_inv.T)

    def compose(self, inner):
        return PiolaMap(self.affine.compose(inner.affine))

    def inverse(self):
        return PiolaMap(self.affine.inverse())


def piola_push(pmap, field_value):
    """``(1/det A) A v_ref``."""
    return pmap.push(field_value)


def piola_for(decomp, which="full"):
    """Piola map of a canonical decomposition.

    ``which`` selects ``"full"`` (reference -> physical), ``"T"``
    (reference -> intermediate T) or ``"T0"`` (T -> physical).
    """
    if which == "T":
        return PiolaMap(AffineMap(decomp.A_T, np.zeros(decomp.dim)))
    if which == "T0":
        return PiolaMap(AffineMap(decomp.rotation, decomp.translation))
    if which == "full":
        return PiolaMap(AffineMap(decomp.A, decomp.translation))
    raise ValueError(f"unknown map {which!r}")


@dataclass(frozen=True, eq=False)
class DirectionFrame:
    """Direction vectors r_1..r_d of a decomposition and their rotated images.

    ``r`` and ``rotated`` are arrays of shape (d, d) holding one vector per
    row.
    """

    r: np.ndarray
    rotated: np.ndarray

    @classmethod
    def from_decomposition(cls, decomp):
        p = decomp.tilde_params
        if decomp.dim == 2:
            r = np.array([[1.0, 0.0], [p["s"], p["t"]]])
        else:
            sign = 1.0 if decomp.case_type == "i" else -1.0
            r = np.array([[1.0, 0.0, 0.0], [sign * p["s1"], p["t1"], 0.0], [p["s21"], p["s22"], p["t2"]]])
        return cls(r, r @ decomp.rotation.T)

    @classmethod
    def axes(cls, d):
        return cls(np.eye(d), np.eye(d))


def _directions(frame, multi_index):
    """Direction vectors repeated according to a multi-index."""
    return [frame.rotated[i] for i, n in enumerate(multi_index) for _ in range(int(n))]


def directional_derivative(field, frame, multi_index, points):
    """Iterated directional derivative along the rotated frame vectors.

    ``field`` must expose ``value``, ``gradient`` and (for order 2)
    ``hessian`` on arrays of points, with the derivative axes last. Works
    for vector fields (value shape (n, d)) and scalar fields (value shape
    (n,)).

    Returns
    -------
    ndarray
        Shape (n, d) for vector fields, (n,) for scalar fields.
    """
    order = int(np.sum(multi_index))
    if order > field.max_order:
        raise UnsupportedOrder(f"field {field.name!r} provides derivatives up to order {field.max_order}, requested {order}")
    x = np.atleast_2d(points)
    w = _directions(frame, multi_index)
    if order == 0:
        return field.value(x)
    if order == 1:
        return field.gradient(x) @ w[0]
    if order == 2:
        return field.hessian(x) @ w[1] @ w[0]
    raise UnsupportedOrder(f"directional derivatives are implemented up to order 2, requested {order}")


def coordinate_weights(rotation, weights):
    """Weight attached to each physical coordinate derivative.

    Entry ``i0`` is ``sum_i |rotation[i0, i]| * weights[i]``; for a
    permutation-like rotation this shows which weight multiplies which
    coordinate derivative.
    """
    return np.abs(np.asarray(rotation)) @ np.asarray(weights, dtype=float)
