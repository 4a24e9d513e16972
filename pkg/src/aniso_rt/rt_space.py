"""Raviart-Thomas spaces on reference simplices and local RT interpolation.

The space ``RT^k = P^k(T)^d + x P^k(T)`` is spanned by the monomial
generators of ``P^k`` in each component plus ``x * x^e`` for exponents of
exact degree ``k``. Degrees of freedom are normal moments against an
orthonormal polynomial basis on each face (face ``i`` is opposite vertex
``i``), followed for ``k >= 1`` by interior moments against an orthonormal
basis of ``P^{k-1}`` in each component. Face and interior bases are
polynomials in barycentric coordinates, so they transport unchanged under
affine maps.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import UnisolvenceFailure
from .geometry import Simplex, canonical_decompose
from .polynomials import evaluate_monomials, exponents, homogeneous_exponents
from .quadrature import REFERENCE_VERTICES, _unit_simplex_rule, face_rule, rule_on_simplex
from .transforms import piola_for
from .fields import pullback_field

MAX_K = 2
UNISOLVENCE_COND_LIMIT = 1e12


def rt_dim(k, d):
    """Dimension of RT^k on a d-simplex."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if d == 2:
        return (k + 1) * (k + 3)
    if d == 3:
        return (k + 1) * (k + 2) * (k + 4) // 2
    raise ValueError(f"d must be 2 or 3, got {d}")


@lru_cache(maxsize=None)
def _orthonormal_barycentric(m, degree):
    """Monomials in barycentric coordinates 1..m of an m-simplex, orthonormalised.

    Returns (exps, T): basis values are ``evaluate_monomials(exps, lam[:, 1:]) @ T``,
    orthonormal for the mean inner product ``(1/|S|) int_S f g``.
    """
    exps = exponents(m, degree)
    pts, w = _unit_simplex_rule(m, 2 * degree)
    w = w / w.sum()
    P = evaluate_monomials(exps, pts)
    G = P.T @ (w[:, None] * P)
    L = np.linalg.cholesky(G)
    return exps, np.linalg.inv(L).T


def _barycentric_basis(lam, degree):
    m = lam.shape[1] - 1
    exps, T = _orthonormal_barycentric(m, degree)
    return evaluate_monomials(exps, lam[:, 1:]) @ T


def _face_count(k, d):
    return comb(k + d - 1, d - 1)


def moment_dofs(vertices, k, values, degree, face_signs=None, interior_dirs=None):
    """Evaluate the RT^k moment functionals of a field on a simplex.

    Parameters
    ----------
    vertices : ndarray, shape (d + 1, d)
    k : int
    values : callable
        Maps points (n, d) to field values (n, d).
    degree : int
        Quadrature degree.
    face_signs : float, optional
        Factor applied to every face moment (orientation of the map).
    interior_dirs : ndarray, shape (d, d), optional
        Row ``c`` is the direction tested by interior moments of component
        ``c`` (default: the coordinate axes).
    """
    V = np.asarray(vertices, dtype=float)
    d = V.shape[1]
    out = []
    for i in range(d + 1):
        r = face_rule(d, i, degree, V)
        fn = values(r.points) @ r.normal
        p = _barycentric_basis(r.barycentric, k)
        out.append(r.weights @ (fn[:, None] * p))
    out = np.concatenate(out)
    if face_signs is not None:
        out = out * face_signs
    if k >= 1:
        r = rule_on_simplex(V, degree)
        q = _barycentric_basis(r.barycentric, k - 1)
        vals = values(r.points)
        dirs = np.eye(d) if interior_dirs is None else np.asarray(interior_dirs)
        proj = vals @ dirs.T
        inner = np.einsum("n,nc,nj->cj", r.weights, proj, q)
        out = np.concatenate([out, inner.ravel()])
    return out


def _generators(k, d):
    """Coefficient arrays (N, d, n_monomials) over ``exponents(d, k + 1)``."""
    exps = exponents(d, k + 1)
    index = {e: i for i, e in enumerate(exps)}
    gens = []
    for c in range(d):
        for e in exponents(d, k):
            g = np.zeros((d, len(exps)))
            g[c, index[e]] = 1.0
            gens.append(g)
    for e in homogeneous_exponents(d, k):
        g = np.zeros((d, len(exps)))
        for c in range(d):
            raised = list(e)
            raised[c] += 1
            g[c, index[tuple(raised)]] = 1.0
        gens.append(g)
    return np.array(gens), exps


def _poly_values(coeffs, exps, x):
    """Values (n, N, d) of vector polynomials with coefficients (N, d, nm)."""
    M = evaluate_monomials(exps, x)
    return np.einsum("nm,jcm->njc", M, coeffs)


def _poly_divergence(coeffs, exps, x):
    d = coeffs.shape[1]
    unit = np.eye(d, dtype=int)
    return sum(evaluate_monomials(exps, x, unit[c]) @ coeffs[:, c, :].T for c in range(d))


@dataclass(frozen=True, eq=False)
class RTSpace:
    """RT^k on a reference element with a basis dual to the moment DOFs.

    Attributes
    ----------
    basis : ndarray, shape (N, d, n_monomials)
        Coefficients of each basis function over ``exps``.
    dof_descriptors : list of tuple
        ``("face", face_index, j)`` then ``("interior", component, j)``.
    """

    k: int
    d: int
    reference_id: str
    N: int
    basis: np.ndarray
    exps: tuple
    dof_descriptors: list
    moment_matrix: np.ndarray = field(repr=False)
    condition_number: float = 0.0

    @property
    def vertices(self):
        return REFERENCE_VERTICES[self.reference_id]

    @property
    def dof_degree(self):
        return 2 * self.k + 2

    def dofs(self, values, degree=None):
        """DOF vector of a field given as a callable on reference points."""
        if degree is None:
            degree = 2 * self.k + 8
        return moment_dofs(self.vertices, self.k, values, degree)

    def basis_values(self, x):
        return _poly_values(self.basis, self.exps, x)

    def basis_divergence(self, x):
        return _poly_divergence(self.basis, self.exps, x)

    def evaluate(self, coefficients, x):
        return np.einsum("j,njc->nc", coefficients, self.basis_values(np.atleast_2d(x)))

    def divergence(self, coefficients, x):
        return self.basis_divergence(np.atleast_2d(x)) @ coefficients


def _reference_for(d, reference_id):
    if reference_id is None:
        return "T2" if d == 2 else "T3_1"
    if REFERENCE_VERTICES[reference_id].shape[1] != d:
        raise ValueError(f"reference {reference_id} is not {d}-dimensional")
    return reference_id


@lru_cache(maxsize=None)
def build_space(k, d, reference_id=None):
    """Assemble RT^k on a reference element.

    Raises
    ------
    UnisolvenceFailure
        When the moment matrix has condition number above 1e12.
    """
    if not 0 <= k <= MAX_K:
        raise ValueError(f"k must be in 0..{MAX_K}, got {k}")
    ref = _reference_for(d, reference_id)
    V = REFERENCE_VERTICES[ref]
    gens, exps = _generators(k, d)
    N = rt_dim(k, d)
    assert len(gens) == N
    M = np.column_stack(
        [moment_dofs(V, k, lambda x, g=g: evaluate_monomials(exps, x) @ g.T, 2 * k + 2) for g in gens]
    )
    cond = float(np.linalg.cond(M))
    if not np.isfinite(cond) or cond > UNISOLVENCE_COND_LIMIT:
        raise UnisolvenceFailure(f"moment matrix for RT^{k} on {ref} has condition number {cond:.3e}")
    Minv = lu_solve(lu_factor(M), np.eye(N))
    basis = np.einsum("lcm,lj->jcm", gens, Minv)
    nf = _face_count(k, d)
    desc = [("face", i, j) for i in range(d + 1) for j in range(nf)]
    if k >= 1:
        nq = len(exponents(d, k - 1))
        desc += [("interior", c, j) for c in range(d) for j in range(nq)]
    basis.setflags(write=False)
    return RTSpace(k, d, ref, N, basis, exps, desc, M, cond)


def in_rt_space(coeffs, k, tol=1e-9):
    """Whether a vector polynomial (coefficients over ``exponents(d, k+1)``) lies in RT^k.

    The degree-(k+1) part must be ``x * r`` with ``r`` homogeneous of degree k.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    d = coeffs.shape[0]
    exps = exponents(d, k + 1)
    top = [i for i, e in enumerate(exps) if sum(e) == k + 1]
    target = coeffs[:, top].ravel()
    index = {exps[i]: n for n, i in enumerate(top)}
    cols = []
    for e in homogeneous_exponents(d, k):
        col = np.zeros((d, len(top)))
        for c in range(d):
            raised = list(e)
            raised[c] += 1
            col[c, index[tuple(raised)]] = 1.0
        cols.append(col.ravel())
    B = np.column_stack(cols)
    r, *_ = np.linalg.lstsq(B, target, rcond=None)
    scale = max(1.0, np.abs(coeffs).max())
    return bool(np.abs(B @ r - target).max() <= tol * scale)


@dataclass(frozen=True, eq=False)
class RTInterpolant:
    """An element of RT^k on a reference or physical simplex.

    ``piola`` is None for reference-element interpolants; otherwise values
    are pushed forward from the reference element.
    """

    space: RTSpace
    coefficients: np.ndarray
    piola: object = None
    decomposition: object = None

    def to_reference(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.piola is None:
            return x
        return self.piola.affine.inverse()(x)

    def evaluate(self, x):
        vals = self.space.evaluate(self.coefficients, self.to_reference(x))
        return vals if self.piola is None else self.piola.push(vals)

    def divergence(self, x):
        div = self.space.divergence(self.coefficients, self.to_reference(x))
        return div if self.piola is None else div / self.piola.det


def evaluate(interp, x):
    return interp.evaluate(x)


def divergence(interp, x):
    return interp.divergence(x)


def interpolate_reference(space, field, degree=None):
    """Interpolate a field given on the reference element of ``space``."""
    return RTInterpolant(space, space.dofs(field.value, degree))


def interpolate_physical(k, simplex, field, degree=None):
    """Local RT^k interpolant on a physical simplex via the Piola pullback.

    The field is pulled back through the canonical decomposition's map, its
    reference DOFs are taken, and the result is pushed forward.
    """
    S = simplex if isinstance(simplex, Simplex) else Simplex(simplex)
    dec = canonical_decompose(S)
    space = build_space(k, S.dim, dec.reference_id)
    pmap = piola_for(dec)
    coeffs = space.dofs(pullback_field(field, pmap).value, degree)
    return RTInterpolant(space, coeffs, pmap, dec)


def physical_dofs(k, simplex, field, degree=None):
    """Reference-equivalent DOFs computed with physical quadrature on the simplex.

    Face moments use the physical faces and normals and the sign of
    ``det A``; interior moments test against ``A^{-T} e_c``. The result
    equals the DOF vector used by :func:`interpolate_physical`.
    """
    S = simplex if isinstance(simplex, Simplex) else Simplex(simplex)
    dec = canonical_decompose(S)
    A = dec.A
    sign = np.sign(np.linalg.det(A))
    V = S.vertices[list(dec.vertex_permutation)]
    if degree is None:
        degree = 2 * k + 8
    dirs = np.linalg.inv(A)  # row c is A^{-T} e_c
    dofs = moment_dofs(V, k, field.value, degree, face_signs=sign, interior_dirs=dirs)
    nf = (S.dim + 1) * _face_count(k, S.dim)
    dofs[nf:] *= sign
    return dofs


def interpolate_direct(k, simplex, field, degree=None):
    """RT^k interpolant assembled directly on the physical simplex.

    Independent of the canonical decomposition: generators are monomials in
    scaled physical coordinates and the moment matrix is solved on the
    simplex itself. Returns a callable mapping points to values.
    """
    S = simplex if isinstance(simplex, Simplex) else Simplex(simplex)
    d = S.dim
    V = S.vertices
    c = V.mean(axis=0)
    h = S.diameter
    gens, exps = _generators(k, d)

    def gen_values(x, g):
        return evaluate_monomials(exps, (x - c) / h) @ g.T

    M = np.column_stack([moment_dofs(V, k, lambda x, g=g: gen_values(x, g), 2 * k + 2) for g in gens])
    if degree is None:
        degree = 2 * k + 8
    rhs = moment_dofs(V, k, field.value, degree)
    a = np.linalg.solve(M, rhs)

    def interpolant(x):
        x = np.atleast_2d(x)
        return np.einsum("j,njc->nc", a, _poly_values(gens, exps, (x - c) / h))

    return interpolant
