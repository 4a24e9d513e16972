"""Simplices, their canonical decomposition, and anisotropy parameters.

Every triangle or tetrahedron ``T0`` is written as ``T0 = Phi_T0(Phi_T(T_ref))``
where ``Phi_T(x) = A_T x`` with ``A_T = A_tilde @ diag(alphas)`` and
``Phi_T0(x) = A_T0 x + b_T0`` is a rigid motion (rotation, possibly with a
mirror). The labelling of the vertices follows the longest-edge rule in 2D
and the shortest-edge rule in 3D; see :func:`canonical_decompose`.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import factorial, sqrt

import numpy as np

from .errors import DegenerateSimplex
from .quadrature import REFERENCE_VERTICES

DEGENERACY_TOL = 1e-14

#: Reference element used for each decomposition type.
REFERENCE_IDS = ("T2", "T3_1", "T3_2")


def _exact_edges(P):
    """Rows ``P[j] - P[0]`` as exact rationals of the float coordinates."""
    base = [Fraction(float(c)) for c in P[0]]
    return [[Fraction(float(c)) - b for c, b in zip(row, base)] for row in P[1:]]


def _det(M):
    if len(M) == 1:
        return M[0][0]
    if len(M) == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    return (
        M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
        - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
        + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0])
    )


def exact_measure(points):
    """m-dimensional measure of the simplex spanned by ``points`` (m + 1 rows).

    The Gram determinant is evaluated in exact rational arithmetic, so thin
    simplices keep full relative accuracy; only the final square root and
    conversion round.
    """
    P = np.asarray(points, dtype=float)
    E = _exact_edges(P)
    m = len(E)
    if m == P.shape[1]:
        return abs(float(_det(E))) / factorial(m)
    G = [[sum(a * b for a, b in zip(E[i], E[j])) for j in range(m)] for i in range(m)]
    return sqrt(max(float(_det(G)), 0.0)) / factorial(m)


@dataclass(frozen=True, eq=False)
class Simplex:
    """A nondegenerate triangle or tetrahedron.

    Parameters
    ----------
    vertices : array_like, shape (d + 1, d)
    """

    vertices: np.ndarray

    def __post_init__(self):
        V = np.array(self.vertices, dtype=float)
        if V.ndim != 2 or V.shape[1] not in (2, 3) or V.shape[0] != V.shape[1] + 1:
            raise ValueError(f"a simplex needs d + 1 vertices in R^d with d in {{2, 3}}, got shape {V.shape}")
        if not np.all(np.isfinite(V)):
            raise ValueError("vertex coordinates must be finite")
        V.setflags(write=False)
        object.__setattr__(self, "vertices", V)
        h = self.diameter
        if h == 0.0 or self.volume < DEGENERACY_TOL * h**self.dim:
            raise DegenerateSimplex(f"simplex volume {self.volume:.3e} is below {DEGENERACY_TOL:g} * h^d (h = {h:.3e})")

    @property
    def dim(self):
        return self.vertices.shape[1]

    @property
    def edges(self):
        """Vertex index pairs (i, j), i < j, in lexicographic order."""
        return list(combinations(range(self.dim + 1), 2))

    @property
    def edge_lengths(self):
        V = self.vertices
        return np.array([np.linalg.norm(V[i] - V[j]) for i, j in self.edges])

    @property
    def diameter(self):
        return float(self.edge_lengths.max())

    @cached_property
    def volume(self):
        return exact_measure(self.vertices)

    def face_measures(self):
        """Measure of the face opposite each vertex."""
        out = []
        for i in range(self.dim + 1):
            F = np.delete(self.vertices, i, axis=0)
            E = F[1:] - F[0]
            out.append(np.sqrt(abs(np.linalg.det(E @ E.T))) / factorial(self.dim - 1))
        return np.array(out)

    @property
    def inradius(self):
        return self.dim * self.volume / self.face_measures().sum()

    @property
    def circumradius(self):
        V = self.vertices
        E = V[1:] - V[0]
        rhs = 0.5 * np.sum(E**2, axis=1)
        c = np.linalg.solve(E, rhs)
        return float(np.linalg.norm(c))


@dataclass(frozen=True, eq=False)
class CanonicalDecomposition:
    """Factorisation ``x0 = rotation @ A_tilde @ diag(alphas) @ x_ref + translation``.

    Attributes
    ----------
    alphas : ndarray, shape (d,)
    tilde_params : dict
        ``{"s", "t"}`` for d=2; ``{"s1", "t1", "s21", "s22", "t2"}`` for d=3.
    case_type : str or None
        ``"i"`` or ``"ii"`` for tetrahedra, None for triangles.
    rotation : ndarray, shape (d, d)
        Orthogonal matrix ``A_T0`` (determinant may be -1).
    translation : ndarray, shape (d,)
    reference_id : str
        One of ``"T2"``, ``"T3_1"``, ``"T3_2"``.
    vertex_permutation : tuple of int
        ``vertex_permutation[j]`` is the input index of canonical vertex
        ``x_{j+1}``.
    """

    alphas: np.ndarray
    tilde_params: dict
    case_type: str
    rotation: np.ndarray
    translation: np.ndarray
    reference_id: str
    vertex_permutation: tuple

    @property
    def dim(self):
        return len(self.alphas)

    @property
    def A_hat(self):
        return np.diag(self.alphas)

    @property
    def A_tilde(self):
        p = self.tilde_params
        if self.dim == 2:
            return np.array([[1.0, p["s"]], [0.0, p["t"]]])
        sign = 1.0 if self.case_type == "i" else -1.0
        return np.array([[1.0, sign * p["s1"], p["s21"]], [0.0, p["t1"], p["s22"]], [0.0, 0.0, p["t2"]]])

    @property
    def A_T(self):
        return self.A_tilde @ self.A_hat

    @property
    def A(self):
        """Full linear part ``A_T0 @ A_T`` of the reference-to-physical map."""
        return self.rotation @ self.A_T

    @property
    def reference_vertices(self):
        return REFERENCE_VERTICES[self.reference_id]

    def canonical_vertices(self):
        """Vertices of the intermediate simplex ``T = A_T(T_ref)``."""
        return self.reference_vertices @ self.A_T.T

    def reconstruct(self):
        """Physical vertices in canonical order x_1, ..., x_{d+1}."""
        return self.canonical_vertices() @ self.rotation.T + self.translation

    def as_dict(self):
        return {
            "alphas": [float(a) for a in self.alphas],
            "tilde_params": {k: float(v) for k, v in self.tilde_params.items()},
            "case_type": self.case_type,
            "rotation": self.rotation.tolist(),
            "translation": self.translation.tolist(),
            "reference_id": self.reference_id,
            "vertex_permutation": list(self.vertex_permutation),
        }


@dataclass(frozen=True)
class GeometricReport:
    h: float
    volume: float
    H_T: float
    H_T0: float
    ratio_H_h: float
    max_angle: float
    max_dihedral: float
    inradius_diameter: float
    circumradius: float
    mathscr_H: tuple
    good_element: bool
    gamma0: float
    decomposition: CanonicalDecomposition = field(repr=False, compare=False, default=None)

    def as_dict(self):
        out = {
            "h": self.h,
            "volume": self.volume,
            "H_T": self.H_T,
            "H_T0": self.H_T0,
            "ratio_H_h": self.ratio_H_h,
            "max_angle": self.max_angle,
            "max_dihedral": self.max_dihedral,
            "inradius_diameter": self.inradius_diameter,
            "circumradius": self.circumradius,
            "mathscr_H": list(self.mathscr_H),
            "good_element": self.good_element,
            "gamma0": self.gamma0,
        }
        return out


def _as_simplex(simplex):
    return simplex if isinstance(simplex, Simplex) else Simplex(simplex)


def _pick_edge(lengths, edges, candidates, largest):
    """Index into ``edges`` of the extreme-length candidate.

    Ties go to the lexicographically smallest vertex pair. Lengths within a
    relative 1e-12 count as tied so that rounding noise does not decide.
    """
    vals = np.array([lengths[c] for c in candidates])
    target = vals.max() if largest else vals.min()
    tol = 1e-12 * max(abs(target), 1e-300)
    tied = [c for c, v in zip(candidates, vals) if abs(v - target) <= tol]
    return min(tied, key=lambda c: edges[c])


def _frame(V, order):
    """Orthonormal frame and canonical coordinates for vertices in ``order``.

    Columns of the returned matrix are e_1 along x_2 - x_1, e_2 in the plane
    of x_1, x_2, x_3 with x_3 on its positive side, and (d=3) e_3 with x_4
    on its positive side.
    """
    d = V.shape[1]
    X = V[list(order)]
    rel = X[1:] - X[0]
    # Gram-Schmidt on the edge frame x_2 - x_1, x_3 - x_1, (x_4 - x_1).
    Q, R = np.linalg.qr(rel.T)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    Q = Q * signs
    return Q, X[0]


def canonical_decompose(simplex):
    """Canonical decomposition of a triangle or tetrahedron.

    Triangles: ``x_1`` is the vertex opposite the longest edge and ``x_2``
    the farther of the two remaining vertices from ``x_1``.

    Tetrahedra: ``L_min`` is the shortest edge and ``L_max`` the longest of
    the four edges sharing an end point with it. With ``P`` the end point
    shared by both edges, ``Q`` the other end of ``L_max`` and ``x_3`` the
    other end of ``L_min``, the remaining vertex ``x_4`` is tested against
    the plane bisecting ``PQ``: on ``P``'s side (closed) gives Type i with
    ``(x_1, x_2) = (P, Q)``; otherwise Type ii with ``(x_1, x_2) = (Q, P)``.

    Parameters
    ----------
    simplex : Simplex or array_like

    Returns
    -------
    CanonicalDecomposition

    Raises
    ------
    DegenerateSimplex
    """
    S = _as_simplex(simplex)
    V = S.vertices
    d = S.dim
    edges = S.edges
    L = S.edge_lengths
    all_edges = list(range(len(edges)))

    if d == 2:
        longest = edges[_pick_edge(L, edges, all_edges, largest=True)]
        x1 = ({0, 1, 2} - set(longest)).pop()
        a, b = longest
        la, lb = np.linalg.norm(V[a] - V[x1]), np.linalg.norm(V[b] - V[x1])
        # Farther vertex becomes x2; ties keep the smaller index.
        x2, x3 = (a, b) if la >= lb * (1 - 1e-12) else (b, a)
        order = (x1, x2, x3)
        Q, b0 = _frame(V, order)
        rel = V[list(order)] - b0
        alpha1 = np.linalg.norm(rel[1])
        alpha2 = np.linalg.norm(rel[2])
        s = rel[2] @ Q[:, 0] / alpha2
        # Heights from exact measures: small sines keep their relative accuracy.
        t = 2.0 * S.volume / (alpha1 * alpha2)
        return CanonicalDecomposition(
            alphas=np.array([alpha1, alpha2]),
            tilde_params={"s": float(s), "t": float(t)},
            case_type=None,
            rotation=Q,
            translation=b0,
            reference_id="T2",
            vertex_permutation=order,
        )

    e_min = edges[_pick_edge(L, edges, all_edges, largest=False)]
    adjacent = [c for c in all_edges if len(set(edges[c]) & set(e_min)) == 1]
    e_max = edges[_pick_edge(L, edges, adjacent, largest=True)]
    P = (set(e_min) & set(e_max)).pop()
    Qv = (set(e_max) - {P}).pop()
    x3 = (set(e_min) - {P}).pop()
    x4 = ({0, 1, 2, 3} - {P, Qv, x3}).pop()

    mid = 0.5 * (V[P] + V[Qv])
    axis = V[Qv] - V[P]
    # Signed offset of x4 toward Q; <= 0 means P's closed half-space.
    offset = (V[x4] - mid) @ axis / (axis @ axis)
    if offset <= 1e-12:
        case_type, order = "i", (P, Qv, x3, x4)
    else:
        case_type, order = "ii", (Qv, P, x3, x4)

    Q, b0 = _frame(V, order)
    rel = V[list(order)] - b0
    alpha1 = np.linalg.norm(rel[1])
    x3c = rel[2] @ Q
    x4c = rel[3] @ Q
    if case_type == "i":
        alpha2 = np.linalg.norm(rel[2])
        s1 = x3c[0] / alpha2
    else:
        alpha2 = np.linalg.norm(rel[2] - rel[1])
        s1 = (alpha1 - x3c[0]) / alpha2
    t1 = 2.0 * exact_measure(V[list(order[:3])]) / (alpha1 * alpha2)
    alpha3 = np.linalg.norm(rel[3])
    s21, s22, _ = x4c / alpha3
    t2 = 6.0 * S.volume / (alpha1 * alpha2 * t1 * alpha3)
    return CanonicalDecomposition(
        alphas=np.array([alpha1, alpha2, alpha3]),
        tilde_params={"s1": float(s1), "t1": float(t1), "s21": float(s21), "s22": float(s22), "t2": float(t2)},
        case_type=case_type,
        rotation=Q,
        translation=b0,
        reference_id="T3_1" if case_type == "i" else "T3_2",
        vertex_permutation=order,
    )


def simplex_from_parameters(alphas, tilde_params, case_type=None, rotation=None, translation=None):
    """Build the physical simplex for given canonical parameters.

    The inverse of :func:`canonical_decompose` up to labelling: returns the
    vertices x_1, ..., x_{d+1} in canonical order.
    """
    alphas = np.asarray(alphas, dtype=float)
    d = len(alphas)
    if d == 2:
        ref = "T2"
    else:
        ref = "T3_1" if case_type == "i" else "T3_2"
    dec = CanonicalDecomposition(
        alphas=alphas,
        tilde_params=dict(tilde_params),
        case_type=case_type if d == 3 else None,
        rotation=np.eye(d) if rotation is None else np.asarray(rotation, dtype=float),
        translation=np.zeros(d) if translation is None else np.asarray(translation, dtype=float),
        reference_id=ref,
        vertex_permutation=tuple(range(d + 1)),
    )
    return dec.reconstruct()


def param_H_T(decomp, volume, h):
    """``H_T = prod(alphas) / |T| * h``."""
    return float(np.prod(decomp.alphas) / volume * h)


def param_H_T0(simplex):
    """``H_T0 = h^2 / |T0| * min |L_i|`` (d=2) or ``* min_{i != j} |L_i||L_j|`` (d=3)."""
    S = _as_simplex(simplex)
    L = np.sort(S.edge_lengths)
    h = L[-1]
    m = L[0] if S.dim == 2 else L[0] * L[1]
    return float(h**2 / S.volume * m)


def mathscr_H(decomp):
    """Direction-weighted lengths (alpha_1, alpha_2 t, ...) of a decomposition."""
    a = decomp.alphas
    p = decomp.tilde_params
    if decomp.dim == 2:
        return np.array([a[0], a[1] * p["t"]])
    return np.array([a[0], a[1] * p["t1"], a[2] * p["t2"]])


def check_assumption1(decomp, M):
    """True when ``|s22| <= M * alpha_2 * t_1 / alpha_3`` (always true for d=2)."""
    if decomp.dim == 2:
        return True
    p = decomp.tilde_params
    return bool(abs(p["s22"]) <= M * decomp.alphas[1] * p["t1"] / decomp.alphas[2])


def assumption1_constant(decomp):
    """Smallest M for which the decomposition satisfies Assumption 1 (0 for d=2)."""
    if decomp.dim == 2:
        return 0.0
    p = decomp.tilde_params
    return float(abs(p["s22"]) * decomp.alphas[2] / (decomp.alphas[1] * p["t1"]))


def condition_numbers(decomp):
    """Spectral norms and condition numbers of ``A_hat`` and ``A_tilde``, and ``|det A_T|``."""
    sh = np.linalg.svd(decomp.A_hat, compute_uv=False)
    st = np.linalg.svd(decomp.A_tilde, compute_uv=False)
    return {
        "norm_Ahat": float(sh[0]),
        "cond_Ahat": float(sh[0] / sh[-1]),
        "norm_Atilde": float(st[0]),
        "cond_Atilde": float(st[0] / st[-1]),
        "det_AT": float(abs(np.linalg.det(decomp.A_T))),
        "norm_AT0": float(np.linalg.norm(decomp.rotation, 2)),
        "norm_AT0_inv": float(np.linalg.norm(np.linalg.inv(decomp.rotation), 2)),
    }


def _angle(u, v):
    c = u @ v / (np.linalg.norm(u) * np.linalg.norm(v))
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def face_angles(simplex):
    """All interior angles of all triangular faces (3 for d=2, 12 for d=3)."""
    S = _as_simplex(simplex)
    V = S.vertices
    out = []
    for tri in combinations(range(S.dim + 1), 3):
        for k in range(3):
            a = V[tri[k]]
            b, c = V[tri[(k + 1) % 3]], V[tri[(k + 2) % 3]]
            out.append(_angle(b - a, c - a))
    return np.array(out)


def dihedral_angles(simplex):
    """Interior dihedral angles along the six edges of a tetrahedron."""
    S = _as_simplex(simplex)
    if S.dim != 3:
        raise ValueError("dihedral angles need a tetrahedron")
    from .quadrature import outward_normal

    normals = [outward_normal(S.vertices, i) for i in range(4)]
    out = []
    # Faces opposite a and b share the edge formed by the two other vertices.
    for a, b in combinations(range(4), 2):
        c = -normals[a] @ normals[b]
        out.append(float(np.arccos(np.clip(c, -1.0, 1.0))))
    return np.array(out)


def angle_report(simplex, gamma0=10.0):
    """Geometric summary of a simplex.

    Parameters
    ----------
    simplex : Simplex or array_like
    gamma0 : float
        Threshold for the good-element verdict ``H_T0 / h <= gamma0``.

    Returns
    -------
    GeometricReport
    """
    S = _as_simplex(simplex)
    dec = canonical_decompose(S)
    h = S.diameter
    vol = S.volume
    HT0 = param_H_T0(S)
    max_dihedral = float(dihedral_angles(S).max()) if S.dim == 3 else float("nan")
    return GeometricReport(
        h=h,
        volume=vol,
        H_T=param_H_T(dec, vol, h),
        H_T0=HT0,
        ratio_H_h=HT0 / h,
        max_angle=float(face_angles(S).max()),
        max_dihedral=max_dihedral,
        inradius_diameter=2.0 * S.inradius,
        circumradius=S.circumradius,
        mathscr_H=tuple(float(x) for x in mathscr_H(dec)),
        good_element=bool(HT0 / h <= gamma0),
        gamma0=float(gamma0),
        decomposition=dec,
    )
