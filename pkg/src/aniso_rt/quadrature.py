"""Quadrature on reference simplices and their faces.

All volume rules are collapsed (Duffy) tensor products of Gauss-Jacobi
rules: positive weights, interior points, exact up to any requested degree.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .errors import BadFaceIndex, UnsupportedDegree

MAX_DEGREE = 20

REFERENCE_VERTICES = {
    "T2": np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
    "T3_1": np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]),
    "T3_2": np.array([[0.0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 0, 1]]),
}


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """A quadrature rule on a simplex or on one face of a simplex.

    ``points`` are Cartesian coordinates in the ambient space and
    ``barycentric`` the same points in barycentric coordinates of the
    integration domain (for a face: of the face's own vertices, in
    increasing vertex order). ``normal`` and ``measure`` are only set for
    face rules.
    """

    domain: str
    points: np.ndarray
    barycentric: np.ndarray
    weights: np.ndarray
    exact_degree: int
    measure: float
    normal: np.ndarray = None
    face_index: int = None

    def integrate(self, values):
        """Weighted sum over the leading (point) axis of ``values``."""
        return np.tensordot(self.weights, np.asarray(values), axes=(0, 0))


def _check_degree(degree):
    if int(degree) != degree or degree < 0 or degree > MAX_DEGREE:
        raise UnsupportedDegree(f"quadrature degree must be an integer in [0, {MAX_DEGREE}], got {degree}")
    return int(degree)


@lru_cache(maxsize=None)
def _gauss_jacobi01(n, alpha):
    """n-point rule on [0, 1] for the weight (1 - t)^alpha."""
    if alpha == 0:
        xi, w = roots_legendre(n)
    else:
        xi, w = roots_jacobi(n, alpha, 0.0)
    t = 0.5 * (1.0 + xi)
    return t, w / 2.0 ** (alpha + 1)


@lru_cache(maxsize=None)
def _unit_simplex_rule(d, degree):
    """Cartesian points and weights on conv{0, e_1, ..., e_d}."""
    n = max(1, (degree + 2) // 2)
    if d == 1:
        t, w = _gauss_jacobi01(n, 0)
        return t[:, None], w
    if d == 2:
        u, wu = _gauss_jacobi01(n, 0)
        v, wv = _gauss_jacobi01(n, 1)
        U, V = np.meshgrid(u, v, indexing="ij")
        W = np.outer(wu, wv)
        pts = np.column_stack([(U * (1 - V)).ravel(), V.ravel()])
        return pts, W.ravel()
    if d == 3:
        u, wu = _gauss_jacobi01(n, 0)
        v, wv = _gauss_jacobi01(n, 1)
        s, ws = _gauss_jacobi01(n, 2)
        U, V, S = np.meshgrid(u, v, s, indexing="ij")
        W = wu[:, None, None] * wv[None, :, None] * ws[None, None, :]
        pts = np.column_stack([(U * (1 - V) * (1 - S)).ravel(), (V * (1 - S)).ravel(), S.ravel()])
        return pts, W.ravel()
    raise ValueError(f"unsupported dimension {d}")


def rule_on_simplex(vertices, degree, domain="simplex"):
    """Rule exact to ``degree`` on the simplex spanned by ``vertices``.

    ``vertices`` has shape (m + 1, n) with m the simplex dimension and n
    the ambient dimension (m <= n), so faces are covered too.
    """
    degree = _check_degree(degree)
    V = np.asarray(vertices, dtype=float)
    m = V.shape[0] - 1
    ref_pts, ref_w = _unit_simplex_rule(m, degree)
    bary = np.column_stack([1.0 - ref_pts.sum(axis=1), ref_pts])
    pts = bary @ V
    E = (V[1:] - V[0]).T
    measure = np.sqrt(abs(np.linalg.det(E.T @ E))) / factorial(m)
    weights = ref_w * (measure * factorial(m))
    return QuadratureRule(domain, pts, bary, weights, degree, float(measure))


def simplex_rule(d, degree, reference_id=None):
    """Volume rule on a reference simplex.

    ``reference_id`` selects ``"T2"``, ``"T3_1"`` or ``"T3_2"``; the default
    is the unit simplex of dimension ``d``.
    """
    if d not in (2, 3):
        raise ValueError(f"d must be 2 or 3, got {d}")
    if reference_id is None:
        reference_id = "T2" if d == 2 else "T3_1"
    V = REFERENCE_VERTICES[reference_id]
    if V.shape[1] != d:
        raise ValueError(f"reference {reference_id} is not {d}-dimensional")
    return rule_on_simplex(V, degree, domain=f"simplex d={d}")


def outward_normal(vertices, face_index):
    """Outward unit normal of the face opposite vertex ``face_index``."""
    V = np.asarray(vertices, dtype=float)
    d = V.shape[1]
    if not 0 <= face_index <= d:
        raise BadFaceIndex(f"face index {face_index} out of range for a {d}-simplex")
    F = np.delete(V, face_index, axis=0)
    E = F[1:] - F[0]
    # Null vector of the face's edge matrix.
    _, _, vt = np.linalg.svd(E)
    n = vt[-1]
    if np.dot(n, F[0] - V[face_index]) < 0:
        n = -n
    return n / np.linalg.norm(n)


def face_rule(d, face_index, degree, vertices=None):
    """Rule on the face opposite vertex ``face_index`` of a simplex.

    Without ``vertices`` the reference simplex T2 (d=2) or T3_1 (d=3) is
    used. The face's vertices keep their relative order from ``vertices``.
    """
    if vertices is None:
        vertices = REFERENCE_VERTICES["T2" if d == 2 else "T3_1"]
    V = np.asarray(vertices, dtype=float)
    if V.shape != (d + 1, d):
        raise ValueError(f"expected {d + 1} vertices in R^{d}, got shape {V.shape}")
    if not isinstance(face_index, (int, np.integer)) or not 0 <= face_index <= d:
        raise BadFaceIndex(f"face index {face_index} out of range for a {d}-simplex")
    normal = outward_normal(V, face_index)
    F = np.delete(V, face_index, axis=0)
    r = rule_on_simplex(F, degree, domain="edge" if d == 2 else "triangle-face")
    return QuadratureRule(r.domain, r.points, r.barycentric, r.weights, r.exact_degree, r.measure, normal, int(face_index))
