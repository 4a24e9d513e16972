"""Plain-text simplicial meshes and generators for anisotropic mesh families.

Text format (UTF-8, ``#`` starts a comment)::

    dim 2
    nodes 3
    0.0 0.0
    1.0 0.0
    0.0 1.0
    elements 1
    0 1 2

Indices are 0-based. Coordinates are written with 17 significant digits so
that ``parse_mesh(write_mesh(m))`` reproduces ``m`` exactly.
"""

from dataclasses import dataclass, field
from itertools import combinations
from math import factorial

import numpy as np

from .errors import BadSpec, DegenerateElement, IndexOutOfRange, ParseError
from .geometry import DEGENERACY_TOL

FAMILIES = ("shape_regular", "needle_2d", "cap_2d", "tet_type_i", "tet_type_ii", "sliver")

_DEFAULT_GAMMA = {"needle_2d": 2.0, "cap_2d": 3.0, "tet_type_i": 2.0, "tet_type_ii": 2.0, "sliver": 2.0}


@dataclass(frozen=True, eq=False)
class Mesh:
    dim: int
    nodes: np.ndarray
    elements: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float).reshape(-1, self.dim)
        elements = np.asarray(self.elements, dtype=int).reshape(-1, self.dim + 1)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "elements", elements)
        validate(self)

    @property
    def n_elements(self):
        return len(self.elements)

    def element_vertices(self, e):
        return self.nodes[self.elements[e]]

    def simplices(self):
        for e in range(self.n_elements):
            yield self.element_vertices(e)


def validate(mesh):
    if mesh.dim not in (2, 3):
        raise BadSpec(f"dim must be 2 or 3, got {mesh.dim}")
    n = len(mesh.nodes)
    for e, conn in enumerate(mesh.elements):
        bad = [int(i) for i in conn if i < 0 or i >= n]
        if bad:
            raise IndexOutOfRange(f"element {e} references node {bad[0]} but the mesh has {n} nodes")
        V = mesh.nodes[conn]
        E = V[1:] - V[0]
        vol = abs(np.linalg.det(E)) / factorial(mesh.dim)
        h = max(np.linalg.norm(V[i] - V[j]) for i, j in combinations(range(mesh.dim + 1), 2))
        if h == 0.0 or vol < DEGENERACY_TOL * h**mesh.dim:
            raise DegenerateElement(f"element {e} is degenerate (volume {vol:.3e})")


def is_conforming(mesh, tol=1e-12):
    """True when no face is shared by more than two elements and no node hangs on another element's face."""
    counts = {}
    for conn in mesh.elements:
        for f in combinations(sorted(int(i) for i in conn), mesh.dim):
            counts[f] = counts.get(f, 0) + 1
    if any(c > 2 for c in counts.values()):
        return False
    for conn in mesh.elements:
        V = mesh.nodes[conn]
        T = (V[1:] - V[0]).T
        lam = np.linalg.solve(T, (mesh.nodes - V[0]).T).T
        lam = np.column_stack([1 - lam.sum(axis=1), lam])
        inside = np.all(lam >= -tol, axis=1)
        inside[conn] = False
        if np.any(inside):
            return False
    return True


def write_mesh(mesh):
    lines = [f"dim {mesh.dim}", f"nodes {len(mesh.nodes)}"]
    lines += [" ".join(f"{c:.17g}" for c in row) for row in mesh.nodes]
    lines.append(f"elements {mesh.n_elements}")
    lines += [" ".join(str(int(i)) for i in row) for row in mesh.elements]
    return "\n".join(lines) + "\n"


def parse_mesh(text):
    """Parse the text format into a :class:`Mesh`.

    Raises
    ------
    ParseError
        With the offending 1-based line number.
    IndexOutOfRange, DegenerateElement
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    it = iter(rows)

    def header(keyword):
        try:
            lineno, tok = next(it)
        except StopIteration:
            raise ParseError(f"missing '{keyword}' header") from None
        if len(tok) != 2 or tok[0] != keyword:
            raise ParseError(f"expected '{keyword} <n>'", lineno)
        try:
            value = int(tok[1])
        except ValueError:
            raise ParseError(f"'{keyword}' needs an integer, got {tok[1]!r}", lineno) from None
        if value < 0:
            raise ParseError(f"'{keyword}' must be nonnegative", lineno)
        return value

    def body(count, width, conv, what):
        out = []
        for _ in range(count):
            try:
                lineno, tok = next(it)
            except StopIteration:
                raise ParseError(f"expected {count} {what} lines") from None
            if len(tok) != width:
                raise ParseError(f"{what} line needs {width} entries, got {len(tok)}", lineno)
            try:
                out.append([conv(t) for t in tok])
            except ValueError:
                raise ParseError(f"bad {what} entry in {tok}", lineno) from None
        return out

    dim = header("dim")
    if dim not in (2, 3):
        raise ParseError(f"dim must be 2 or 3, got {dim}", rows[0][0])
    nodes = body(header("nodes"), dim, float, "node")
    elements = body(header("elements"), dim + 1, int, "element")
    extra = next(it, None)
    if extra is not None:
        raise ParseError("unexpected trailing content", extra[0])
    return Mesh(dim, np.array(nodes, dtype=float).reshape(-1, dim), np.array(elements, dtype=int).reshape(-1, dim + 1))


def read_mesh(path):
    with open(path, encoding="utf-8") as fh:
        return parse_mesh(fh.read())


@dataclass(frozen=True)
class FamilySpec:
    """A refinement family of (patches of) simplices.

    Parameters
    ----------
    name : str
        One of :data:`FAMILIES`.
    levels : int
        Number of refinement levels; level ``L`` has scale ``h0 * 2**-L``.
    h0 : float
        Level-0 scale. For ``shape_regular`` it is the grid spacing of the
        unit square, so ``h0=0.25`` starts from a 4 x 4 grid.
    gamma : float, optional
        Anisotropy exponent; family-specific default when None.
    origin : tuple, optional
        Anchor point of anisotropic patches (the unit square/cube is used
        for ``shape_regular``).
    """

    name: str
    levels: int = 5
    h0: float = 1.0
    gamma: float = None
    origin: tuple = field(default=None)

    def __post_init__(self):
        if self.name not in FAMILIES:
            raise BadSpec(f"unknown family {self.name!r}; choose from {', '.join(FAMILIES)}")
        if self.levels < 1 or self.h0 <= 0:
            raise BadSpec("levels must be >= 1 and h0 > 0")

    @property
    def dim(self):
        return 2 if self.name in ("shape_regular", "needle_2d", "cap_2d") else 3

    @property
    def exponent(self):
        return _DEFAULT_GAMMA.get(self.name, 1.0) if self.gamma is None else float(self.gamma)

    def anchor(self):
        if self.origin is not None:
            return np.asarray(self.origin, dtype=float)
        return np.array([0.3, 0.2]) if self.dim == 2 else np.array([0.3, 0.2, 0.1])


def _structured_square(n):
    """Unit square split into n x n squares, each cut along its diagonal."""
    xs = np.linspace(0.0, 1.0, n + 1)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    nodes = np.column_stack([X.ravel(), Y.ravel()])
    idx = lambda i, j: i * (n + 1) + j  # noqa: E731
    elems = []
    for i in range(n):
        for j in range(n):
            a, b, c, d = idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)
            elems += [(a, b, c), (a, c, d)]
    return nodes, np.array(elems)


def generate_family(spec, level):
    """Deterministic mesh of ``spec`` at refinement ``level``.

    ``shape_regular`` meshes the unit square with ``n x n`` squares, each
    cut into two right triangles, where ``n = round(1 / h)``. The other families produce a
    small patch anchored at ``spec.anchor()`` with scale ``h = h0 2^-level``:

    * ``needle_2d``: an ``h x h**gamma`` rectangle cut into two right triangles;
    * ``cap_2d``: the triangle (0,0), (h,0), (h/2, h**gamma);
    * ``tet_type_i``: the corner tetrahedron with legs h, h**gamma, h**gamma;
    * ``tet_type_ii``: 0, h e1, h e1 + h**gamma e2, h**gamma e3 (shape of T3_2);
    * ``sliver``: (+-h/2, 0, 0), (0, +-h/2, h**gamma): all four points
      approach a common plane.
    """
    if level < 0:
        raise BadSpec("level must be nonnegative")
    h = spec.h0 * 2.0**-level
    g = spec.exponent
    if spec.name == "shape_regular":
        n = max(1, int(round(1.0 / h)))
        nodes, elems = _structured_square(n)
        return Mesh(2, nodes, elems)
    o = spec.anchor()
    a = h**g
    if spec.name == "needle_2d":
        nodes = np.array([[0, 0], [h, 0], [h, a], [0, a]], dtype=float)
        elems = [(0, 1, 2), (0, 2, 3)]
    elif spec.name == "cap_2d":
        nodes = np.array([[0, 0], [h, 0], [h / 2, a]], dtype=float)
        elems = [(0, 1, 2)]
    elif spec.name == "tet_type_i":
        nodes = np.array([[0, 0, 0], [h, 0, 0], [0, a, 0], [0, 0, 1.5 * a]], dtype=float)
        elems = [(0, 1, 2, 3)]
    elif spec.name == "tet_type_ii":
        nodes = np.array([[0, 0, 0], [h, 0, 0], [h, a, 0], [0, 0, 1.5 * a]], dtype=float)
        elems = [(0, 1, 2, 3)]
    elif spec.name == "sliver":
        nodes = np.array([[-h / 2, 0, 0], [h / 2, 0, 0], [0, -h / 2, a], [0, h / 2, a]], dtype=float)
        elems = [(0, 1, 2, 3)]
    else:  # pragma: no cover - guarded by FamilySpec
        raise BadSpec(spec.name)
    return Mesh(spec.dim, nodes + o, np.array(elems))


def cap_triangle(eps, h=1.0):
    """Isosceles cap (0,0), (h,0), (h/2, eps*h); its largest angle tends to pi as eps -> 0."""
    if eps <= 0 or h <= 0:
        raise BadSpec("cap needs eps > 0 and h > 0")
    return np.array([[0.0, 0.0], [h, 0.0], [h / 2, eps * h]])
