"""Interpolation errors, anisotropic bound quantities and mesh-family studies.

Unknown constants in the estimates are set to 1; every inequality is
checked as boundedness of ``lhs / rhs`` across a family, not as ``<= 1``.
Vector norms follow ``||v||_p^p = sum_i ||v_i||_p^p``.
"""

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import Assumption1Violated, UnsupportedOrder, WrongElementType
from .fields import ScalarField, VectorField, pullback_field
from .geometry import (
    Simplex,
    assumption1_constant,
    canonical_decompose,
    check_assumption1,
    dihedral_angles,
    face_angles,
    mathscr_H,
    param_H_T0,
)
from .mesh_io import FamilySpec, cap_triangle, generate_family
from .polynomials import multi_indices
from .quadrature import MAX_DEGREE, REFERENCE_VERTICES, rule_on_simplex
from .rt_space import build_space, interpolate_physical, interpolate_reference
from .transforms import DirectionFrame, piola_for

VARIANTS = ("classical", "RT61", "RT62", "RT616", "RT616b", "stability51", "stability58")
SCALING_LEMMAS = ("RT41", "RT42", "RT43", "RT12", "RT13", "RT14", "RT14b")

#: Printed as in the source estimate; possibly missing an order-(l+1) term.
RT616_NOTE = "RT616 computed as printed (only the h-weighted derivative term); may be a typo relative to RT616b"


def norm_degree(k):
    return min(MAX_DEGREE, 2 * k + 8)


def lp_norm(values, weights, p):
    """Quadrature L^p norm; vector values use the sum of componentwise p-th powers."""
    v = np.abs(np.asarray(values, dtype=float))
    if v.ndim > 1:
        v = v.reshape(v.shape[0], -1)
    if p == np.inf or p == "inf":
        return float(v.max()) if v.size else 0.0
    p = float(p)
    pw = v**p
    if pw.ndim > 1:
        pw = pw.sum(axis=1)
    return float((weights @ pw) ** (1.0 / p))


def _mixed(field, dirs, x):
    """Derivative of ``field`` along each vector in ``dirs`` (at most two)."""
    n = len(dirs)
    if n > field.max_order:
        raise UnsupportedOrder(f"{field.name!r} provides derivatives up to order {field.max_order}, requested {n}")
    if n == 0:
        return field.value(x)
    if n == 1:
        return field.gradient(x) @ dirs[0]
    if n == 2:
        return field.hessian(x) @ dirs[1] @ dirs[0]
    raise UnsupportedOrder(f"derivatives above order 2 are not available (requested {n})")


def _memo(fn):
    """Cache the last call, keyed on the identity of the point array."""
    last = [None, None]

    def wrapped(x):
        if last[0] is not x:
            last[0], last[1] = x, fn(x)
        return last[1]

    return wrapped


def _memo_field(f):
    """Same field with value/gradient/hessian cached for repeated quadrature points."""
    if isinstance(f, ScalarField):
        return ScalarField(f.dim, _memo(f.value), _memo(f.gradient), f.name)
    return VectorField(f.dim, _memo(f.value), _memo(f.gradient), _memo(f.hessian), f.name)


def _repeat(vectors, eps):
    return [vectors[i] for i, n in enumerate(eps) for _ in range(int(n))]


def _safe_ratio(lhs, rhs, tol=1e-13):
    if rhs > 0:
        return float(lhs / rhs)
    return 0.0 if lhs <= tol else float("inf")


class _Element:
    """Quadrature data shared by all bound terms on one element."""

    def __init__(self, simplex, field, p, degree):
        self.S = simplex
        self.dec = canonical_decompose(simplex)
        self.d = simplex.dim
        self.p = p
        self.field = _memo_field(field)
        self.frame = DirectionFrame.from_decomposition(self.dec)
        self.alphas = self.dec.alphas
        self.H = mathscr_H(self.dec)
        self.h = simplex.diameter
        self.H_T0 = param_H_T0(simplex)
        self.rule0 = rule_on_simplex(simplex.vertices, degree)
        self.ruleT = rule_on_simplex(self.dec.canonical_vertices(), degree)
        self.v_T = _memo_field(pullback_field(field, piola_for(self.dec, "T0")))
        self.type_ii = self.dec.case_type == "ii"

    def norm0(self, vals):
        return lp_norm(vals, self.rule0.weights, self.p)

    def normT(self, vals):
        return lp_norm(vals, self.ruleT.weights, self.p)

    def r0_sum(self, order, f=None, extra=()):
        """sum_{|eps|=order} alpha^eps || d^eps_{r0} [extra] f ||_{L^p(T0)}."""
        f = self.field if f is None else f
        x = self.rule0.points
        total = 0.0
        for eps in multi_indices(self.d, order):
            dirs = _repeat(self.frame.rotated, eps) + list(extra)
            total += np.prod(self.alphas**eps) * self.norm0(_mixed(f, dirs, x))
        return total

    def x_sum(self, order, f=None, extra=()):
        """sum_{|eps|=order} H^eps || d^eps_x [extra] f ||_{L^p(T)} on the intermediate simplex."""
        f = self.v_T if f is None else f
        x = self.ruleT.points
        axes = np.eye(self.d)
        total = 0.0
        for eps in multi_indices(self.d, order):
            dirs = _repeat(axes, eps) + list(extra)
            total += np.prod(self.H**eps) * self.normT(_mixed(f, dirs, x))
        return total


@dataclass
class BoundBreakdown:
    """Left-hand sides and right-hand-side bound quantities on one element."""

    k: int
    ell: int
    p: float
    h: float
    H_T0: float
    rho: float
    case_type: str
    assumption1_M: float
    lhs: float
    lhs_stability: float
    classical_rhs: float = None
    aniso_rhs_61: float = None
    aniso_rhs_62: float = None
    aniso_rhs_616: float = None
    aniso_rhs_616b: float = None
    stability_rhs_51: float = None
    stability_rhs_58: float = None
    notes: list = field(default_factory=list)

    _RHS = {
        "classical": "classical_rhs",
        "RT61": "aniso_rhs_61",
        "RT62": "aniso_rhs_62",
        "RT616": "aniso_rhs_616",
        "RT616b": "aniso_rhs_616b",
        "stability51": "stability_rhs_51",
        "stability58": "stability_rhs_58",
    }

    def rhs(self, variant):
        return getattr(self, self._RHS[variant])

    @property
    def ratios(self):
        out = {}
        for v in VARIANTS:
            r = self.rhs(v)
            if r is None:
                continue
            lhs = self.lhs_stability if v.startswith("stability") else self.lhs
            out[v] = _safe_ratio(lhs, r)
        return out

    def as_dict(self):
        out = asdict(self)
        out["p"] = "inf" if self.p == np.inf else self.p
        out["ratios"] = self.ratios
        return out


def _as_simplex(simplex):
    return simplex if isinstance(simplex, Simplex) else Simplex(simplex)


def error_lhs(k, simplex, field, p, degree=None):
    """``|| I^{RT^k} v - v ||_{L^p(T0)}`` by quadrature on the physical simplex."""
    S = _as_simplex(simplex)
    interp = interpolate_physical(k, S, field)
    rule = rule_on_simplex(S.vertices, norm_degree(k) if degree is None else degree)
    err = interp.evaluate(rule.points) - field.value(rule.points)
    return lp_norm(err, rule.weights, p)


def _applicable(variant, el):
    if variant in ("RT61", "RT62", "stability51"):
        return not el.type_ii
    if variant in ("RT616", "RT616b", "stability58"):
        return el.type_ii
    return True


def bound_rhs(k, ell, simplex, field, p, variant="all", M=10.0, degree=None):
    """Interpolation error and bound quantities on one simplex.

    Parameters
    ----------
    k : int
        RT order.
    ell : int
        Derivative order, ``0 <= ell <= k``; the bounds use ``ell + 1 <= 2``
        derivatives.
    simplex : Simplex or array_like
    field : VectorField
    p : float
        1, 2 or ``np.inf`` (the last only as a diagnostic).
    variant : str
        One of :data:`VARIANTS` or ``"all"``.
    M : float
        Assumption 1 constant for the H-weighted variants (d=3).

    Raises
    ------
    WrongElementType
        A specific variant requested for an element type it does not cover.
    Assumption1Violated
        RT62/RT616b requested on a tetrahedron failing Assumption 1.
    UnsupportedOrder
    """
    if not 0 <= ell <= k:
        raise UnsupportedOrder(f"need 0 <= ell <= k, got ell={ell}, k={k}")
    if ell + 1 > field.max_order:
        raise UnsupportedOrder(f"field {field.name!r} provides {field.max_order} derivatives, bounds need {ell + 1}")
    if variant != "all" and variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    S = _as_simplex(simplex)
    el = _Element(S, field, p, norm_degree(k) if degree is None else degree)
    dec = el.dec
    M_needed = assumption1_constant(dec)
    assumption_ok = check_assumption1(dec, M)

    if variant != "all":
        if not _applicable(variant, el):
            raise WrongElementType(f"variant {variant} does not apply to element type {dec.case_type or '2d'}")
        if variant in ("RT62", "RT616b") and not assumption_ok:
            raise Assumption1Violated(f"|s22| needs M >= {M_needed:.3g} > {M}")
        wanted = [variant]
    else:
        wanted = [v for v in VARIANTS if _applicable(v, el)]

    interp = interpolate_physical(k, S, field)
    x0 = el.rule0.points
    v0 = el.field.value(x0)
    Iv = interp.evaluate(x0)
    out = BoundBreakdown(
        k=k,
        ell=ell,
        p=p,
        h=el.h,
        H_T0=el.H_T0,
        rho=2.0 * S.inradius,
        case_type=dec.case_type,
        assumption1_M=M_needed,
        lhs=el.norm0(Iv - v0),
        lhs_stability=el.norm0(Iv),
    )
    ratio = el.H_T0 / el.h
    h = el.h
    div = el.field.divergence_field()
    rk0 = list(el.frame.rotated)
    rk = list(el.frame.r)

    for v in wanted:
        if v == "classical":
            grad = el.field.gradient(x0)
            out.classical_rhs = h / out.rho * h * el.norm0(grad)
        elif v == "RT61":
            out.aniso_rhs_61 = ratio * el.r0_sum(ell + 1) + h * el.r0_sum(ell, div)
        elif v == "RT62":
            if not assumption_ok:
                out.notes.append(f"RT62 skipped: Assumption 1 needs M >= {M_needed:.3g} > {M}")
                continue
            out.aniso_rhs_62 = ratio * el.x_sum(ell + 1) + h * el.x_sum(ell, el.v_T.divergence_field())
        elif v == "RT616":
            out.aniso_rhs_616 = ratio * h * sum(el.r0_sum(ell, extra=(r,)) for r in rk0)
            out.notes.append(RT616_NOTE)
        elif v == "RT616b":
            if not assumption_ok:
                out.notes.append(f"RT616b skipped: Assumption 1 needs M >= {M_needed:.3g} > {M}")
                continue
            out.aniso_rhs_616b = ratio * (el.x_sum(ell + 1) + h * sum(el.x_sum(ell, extra=(r,)) for r in rk))
        elif v == "stability51":
            out.stability_rhs_51 = ratio * (el.norm0(v0) + el.r0_sum(1)) + h * el.norm0(div.value(x0))
        elif v == "stability58":
            out.stability_rhs_58 = ratio * (el.norm0(v0) + h * sum(el.norm0(_mixed(el.field, [r], x0)) for r in rk0))
    return out


# --- scaling lemmas -------------------------------------------------------


def check_scaling_lemmas(simplex, field, p, which, order=1, M=10.0, degree=None):
    """Both sides of one scaling inequality with the constant set to 1.

    ``field`` is the physical field ``v0`` on the simplex; the reference
    field is its Piola pullback. ``order`` is ``|beta| + |gamma|`` for
    RT42/RT43 (0..2) and ``ell`` for RT12/RT13/RT14/RT14b (0..1). For the
    families of inequalities indexed by a component ``k`` and a
    multi-index, the worst ratio over all of them is reported.

    Returns
    -------
    dict
        ``which``, ``lhs``, ``rhs``, ``ratio`` and the maximising ``index``.

    Raises
    ------
    Assumption1Violated
        RT43/RT13/RT14b on a tetrahedron failing Assumption 1 for ``M``.
    WrongElementType
        RT14/RT14b on anything but a Type ii tetrahedron.
    """
    if which not in SCALING_LEMMAS:
        raise ValueError(f"unknown lemma {which!r}; choose from {', '.join(SCALING_LEMMAS)}")
    S = _as_simplex(simplex)
    deg = norm_degree(2) if degree is None else degree
    el = _Element(S, field, p, deg)
    dec = el.dec
    d = el.d
    if which in ("RT43", "RT13", "RT14b") and not check_assumption1(dec, M):
        raise Assumption1Violated(f"|s22| needs M >= {assumption1_constant(dec):.3g} > {M}")
    if which in ("RT14", "RT14b") and not el.type_ii:
        raise WrongElementType(f"{which} needs a Type ii tetrahedron")

    ref = rule_on_simplex(REFERENCE_VERTICES[dec.reference_id], deg)
    v_hat = _memo_field(pullback_field(field, piola_for(dec, "full")))
    xr = ref.points
    detAT = abs(np.linalg.det(dec.A_T))
    At = dec.A_tilde
    norm_At = np.linalg.norm(At, 2)
    norm_At_inv = np.linalg.norm(np.linalg.inv(At), 2)
    pp = float(p)
    alpha = el.alphas
    axes = np.eye(d)

    def nref(vals):
        return lp_norm(vals, ref.weights, p)

    best = None

    def consider(lhs, rhs, index):
        nonlocal best
        r = _safe_ratio(lhs, rhs)
        if best is None or r > best["ratio"]:
            best = {"which": which, "lhs": float(lhs), "rhs": float(rhs), "ratio": float(r), "index": index}

    if which == "RT41":
        x0 = el.rule0.points
        lhs = el.norm0(el.field.value(x0))
        comps = v_hat.value(xr)
        inner = sum(alpha[j] ** pp * nref(comps[:, j]) ** pp for j in range(d)) ** (1 / pp)
        consider(lhs, detAT ** ((1 - pp) / pp) * norm_At * inner, None)
    elif which in ("RT42", "RT43"):
        if not 0 <= order <= 2:
            raise UnsupportedOrder("RT42/RT43 need 0 <= |beta| + |gamma| <= 2")
        sigma = el.r0_sum(order) if which == "RT42" else el.x_sum(order)
        for kk in range(d):
            for delta in multi_indices(d, order):
                lhs = nref(_mixed(v_hat, _repeat(axes, delta), xr)[:, kk])
                rhs = detAT ** ((pp - 1) / pp) / alpha[kk] * norm_At_inv * sigma
                consider(lhs, rhs, {"k": kk + 1, "multi_index": delta.tolist()})
    elif which in ("RT12", "RT13"):
        if not 0 <= order <= 1:
            raise UnsupportedOrder("RT12/RT13 need ell in {0, 1}")
        div_hat = v_hat.divergence_field()
        if which == "RT12":
            sigma = el.r0_sum(order, el.field.divergence_field())
        else:
            sigma = el.x_sum(order, el.v_T.divergence_field())
        for beta in multi_indices(d, order):
            lhs = nref(_mixed(div_hat, _repeat(axes, beta), xr))
            consider(lhs, detAT ** ((pp - 1) / pp) * sigma, {"multi_index": beta.tolist()})
    else:  # RT14, RT14b
        if not 0 <= order <= 1:
            raise UnsupportedOrder("RT14/RT14b need ell in {0, 1}")
        for kk in range(d):
            if which == "RT14":
                sigma = el.r0_sum(order, extra=(el.frame.rotated[kk],))
            else:
                sigma = el.x_sum(order, extra=(el.frame.r[kk],))
            for beta in multi_indices(d, order):
                vals = _mixed(v_hat, _repeat(axes, beta) + [axes[kk]], xr)[:, kk]
                rhs = detAT ** ((pp - 1) / pp) * norm_At_inv * sigma
                consider(nref(vals), rhs, {"k": kk + 1, "multi_index": beta.tolist()})
    return best


def componentwise_stability(field_hat, k, p, reference_id, degree=None):
    """Ratios ``||(I u)_i|| / rhs_i`` of the component-wise stability estimates on a reference element.

    On ``T2``/``T3_1`` the right side is ``||u_i||_{W^{1,p}} + ||div u||``;
    on ``T3_2`` it is ``||u_i||_{W^{1,p}} + sum_{j != i} ||d u_j / d x_j||``.
    """
    space = build_space(k, field_hat.dim, reference_id)
    rule = rule_on_simplex(REFERENCE_VERTICES[reference_id], norm_degree(k) if degree is None else degree)
    x = rule.points
    w = rule.weights
    Iu = interpolate_reference(space, field_hat).evaluate(x)
    u = field_hat.value(x)
    G = field_hat.gradient(x)
    pp = float(p)
    d = field_hat.dim
    ratios = []
    for i in range(d):
        w1p = (lp_norm(u[:, i], w, p) ** pp + lp_norm(G[:, i, :], w, p) ** pp) ** (1 / pp)
        if reference_id == "T3_2":
            extra = sum(lp_norm(G[:, j, j], w, p) for j in range(d) if j != i)
        else:
            extra = lp_norm(np.trace(G, axis1=1, axis2=2), w, p)
        ratios.append(_safe_ratio(lp_norm(Iu[:, i], w, p), w1p + extra))
    return ratios


def random_simplex(d, rng, case_type=None, M=None, max_tries=1000, thin=3.0):
    """Random anisotropic simplex; optionally constrained to a tetrahedron type and Assumption 1."""
    for _ in range(max_tries):
        scales = 10.0 ** rng.uniform(-thin, 0.0, size=d)
        Q, _ = np.linalg.qr(rng.normal(size=(d, d)))
        V = rng.normal(size=(d + 1, d)) * scales @ Q.T + rng.normal(size=d)
        try:
            S = Simplex(V)
        except ValueError:
            continue
        dec = canonical_decompose(S)
        if case_type is not None and dec.case_type != case_type:
            continue
        if M is not None and not check_assumption1(dec, M):
            continue
        return S
    raise RuntimeError("could not sample a simplex with the requested properties")


def scaling_sweep(which, d, n_samples=500, seed=0, p=2, order=1, M=10.0, field_degree=3):
    """Sup of a scaling-lemma ratio over seeded random thin simplices and polynomial fields.

    Quadrature integrates ``|v|^2`` of the polynomial fields exactly, so
    the ``p = 2`` ratios are free of quadrature error.

    Returns a dict with the seed, the per-sample ratios and their maximum.
    """
    from .fields import random_polynomial_field

    rng = np.random.default_rng(seed)
    case = "ii" if which in ("RT14", "RT14b") else None
    needs_m = M if which in ("RT43", "RT13", "RT14b") and d == 3 else None
    ratios = []
    for _ in range(n_samples):
        S = random_simplex(d, rng, case_type=case, M=needs_m)
        f = random_polynomial_field(d, field_degree, rng)
        ratios.append(check_scaling_lemmas(S, f, p, which, order=order, M=M, degree=2 * field_degree)["ratio"])
    return {"which": which, "d": d, "seed": seed, "p": p, "order": order, "n": n_samples, "sup_ratio": max(ratios), "ratios": ratios}


# --- family studies --------------------------------------------------------


@dataclass
class StudyRow:
    level: int
    n_elements: int
    h: float
    H_T0: float
    H_over_h: float
    max_angle: float
    max_dihedral: float
    assumption1_M: float
    lhs: float
    lhs_stability: float
    rhs: dict
    ratio: dict
    order: float = None


CSV_COLUMNS = [
    "level", "n_elements", "h", "H_T0", "H_over_h", "max_angle", "max_dihedral", "assumption1_M",
    "lhs", "lhs_stability", "order",
] + [f"rhs_{v}" for v in VARIANTS] + [f"ratio_{v}" for v in VARIANTS]


def max_workers():
    """Thread cap from ``ANISO_RT_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("ANISO_RT_THREADS", "1")))
    except ValueError:
        return 1


def _element_job(args):
    V, k, ell, field, p, M, bounds = args
    S = Simplex(V)
    out = {
        "h": S.diameter,
        "H_T0": param_H_T0(S),
        "max_angle": float(face_angles(S).max()),
        "max_dihedral": float(dihedral_angles(S).max()) if S.dim == 3 else float("nan"),
    }
    out["H_over_h"] = out["H_T0"] / out["h"]
    if bounds:
        b = bound_rhs(k, ell, S, field, p, "all", M=M)
        out.update(lhs=b.lhs, lhs_stability=b.lhs_stability, assumption1_M=b.assumption1_M)
        out["rhs"] = {v: b.rhs(v) for v in VARIANTS}
        out["ratio"] = b.ratios
    else:
        interp = interpolate_physical(k, S, field)
        rule = rule_on_simplex(S.vertices, norm_degree(k))
        Iv = interp.evaluate(rule.points)
        out["lhs"] = lp_norm(Iv - field.value(rule.points), rule.weights, p)
        out["lhs_stability"] = lp_norm(Iv, rule.weights, p)
        out["assumption1_M"] = assumption1_constant(canonical_decompose(S))
    return out


def run_family_study(spec, k, field, p, ell=None, M=10.0, bounds=True):
    """Errors and bound quantities per refinement level of a mesh family.

    Per level, element errors are combined in l^p (``lhs``, ``rhs``) and
    element ratios by their maximum (``ratio``), which is what a
    level-independent constant must bound. With ``bounds=False`` only the
    errors and geometry are computed.

    Element work runs on ``ANISO_RT_THREADS`` threads; results keep the
    element order, so output does not depend on the thread count.

    Returns
    -------
    list of StudyRow
    """
    if isinstance(spec, str):
        spec = FamilySpec(spec)
    if spec.levels < 3:
        raise ValueError("a family study needs at least 3 levels")
    ell = k if ell is None else ell
    pp = float(p)

    def combine(vals):
        vals = np.asarray(vals, dtype=float)
        if pp == np.inf:
            return float(vals.max())
        return float((vals**pp).sum() ** (1 / pp))

    rows = []
    for level in range(spec.levels):
        mesh = generate_family(spec, level)
        jobs = [(V, k, ell, field, p, M, bounds) for V in mesh.simplices()]
        n = max_workers()
        if n > 1:
            with ThreadPoolExecutor(n) as pool:
                res = list(pool.map(_element_job, jobs))
        else:
            res = [_element_job(j) for j in jobs]
        rhs, ratio = {}, {}
        if bounds:
            for v in VARIANTS:
                vals = [r["rhs"][v] for r in res]
                if any(x is None for x in vals):
                    continue
                rhs[v] = combine(vals)
                ratio[v] = max(r["ratio"][v] for r in res)
        rows.append(
            StudyRow(
                level=level,
                n_elements=mesh.n_elements,
                h=max(r["h"] for r in res),
                H_T0=max(r["H_T0"] for r in res),
                H_over_h=max(r["H_over_h"] for r in res),
                max_angle=max(r["max_angle"] for r in res),
                max_dihedral=max(r["max_dihedral"] for r in res),
                assumption1_M=max(r["assumption1_M"] for r in res),
                lhs=combine([r["lhs"] for r in res]),
                lhs_stability=combine([r["lhs_stability"] for r in res]),
                rhs=rhs,
                ratio=ratio,
            )
        )
    for prev, row in zip(rows, rows[1:]):
        if prev.lhs > 0 and row.lhs > 0:
            row.order = float(np.log(prev.lhs / row.lhs) / np.log(prev.h / row.h))
    return rows


CAP_EPSILONS = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)


def cap_series(eps_values=CAP_EPSILONS, k=0, field=None, p=2, h=1.0):
    """Geometry, error and bound ratios on a sequence of flattening caps.

    As ``eps -> 0`` the largest angle tends to pi and ``H_T0 / h`` blows
    up, so the anisotropic bounds degrade together with the error.

    Returns
    -------
    list of dict
        One entry per ``eps`` with ``max_angle``, ``H_over_h``, ``lhs`` and
        the classical and RT61 ratios (when ``field`` is given).
    """
    out = []
    for eps in eps_values:
        S = Simplex(cap_triangle(eps, h))
        row = {"eps": float(eps), "h": S.diameter, "max_angle": float(face_angles(S).max())}
        row["H_T0"] = param_H_T0(S)
        row["H_over_h"] = row["H_T0"] / row["h"]
        if field is not None:
            b = bound_rhs(k, k, S, field, p, "all")
            row["lhs"] = b.lhs
            row["ratio"] = b.ratios
        out.append(row)
    return out


def sup_growth(rows, variant, after=3):
    """``sup_{all levels} ratio / sup_{levels <= after} ratio`` for one variant."""
    early = max(r.ratio[variant] for r in rows if r.level <= after)
    total = max(r.ratio[variant] for r in rows)
    return _safe_ratio(total, early)


def study_summary(spec, rows, k, field_name, p, seed=None):
    """JSON-ready summary: sup ratios, growth after level 3, observed orders and verdicts."""
    variants = sorted({v for r in rows for v in r.ratio}, key=VARIANTS.index)
    summary = {
        "schema": 1,
        "family": spec.name,
        "levels": spec.levels,
        "gamma": spec.exponent,
        "h0": spec.h0,
        "k": k,
        "field": field_name,
        "p": "inf" if p == np.inf else p,
        "sup_ratio": {v: max(r.ratio[v] for r in rows if v in r.ratio) for v in variants},
        "orders": [r.order for r in rows[1:]],
        "max_H_over_h": max(r.H_over_h for r in rows),
        "verdicts": {},
    }
    if seed is not None:
        summary["seed"] = seed
    if len(rows) > 4:
        for v in variants:
            if all(v in r.ratio for r in rows):
                g = sup_growth(rows, v)
                summary["verdicts"][v] = {"growth_after_level3": g, "bounded": bool(g <= 1.1)}
    return summary


def _csv_cell(x):
    if x is None or (isinstance(x, float) and np.isnan(x)):
        return ""
    return repr(float(x)) if isinstance(x, float) else x


def rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        base = [r.level, r.n_elements, r.h, r.H_T0, r.H_over_h, r.max_angle, r.max_dihedral, r.assumption1_M, r.lhs, r.lhs_stability, r.order]
        base += [r.rhs.get(v) for v in VARIANTS] + [r.ratio.get(v) for v in VARIANTS]
        w.writerow([_csv_cell(x) for x in base])
    return buf.getvalue()


def dumps(obj):
    """Deterministic JSON for reports."""

    def default(o):
        if isinstance(o, np.generic):
            return o.item()
        if isinstance(o, np.ndarray):
            return o.tolist()
        raise TypeError(type(o))

    return json.dumps(obj, indent=2, sort_keys=True, default=default, allow_nan=True)
