import numpy as np
import pytest

from aniso_rt.errors import BadSpec, DegenerateElement, IndexOutOfRange, ParseError
from aniso_rt.geometry import canonical_decompose, face_angles
from aniso_rt.mesh_io import (
    FAMILIES,
    FamilySpec,
    Mesh,
    cap_triangle,
    generate_family,
    is_conforming,
    parse_mesh,
    read_mesh,
    write_mesh,
)

ONE_TRIANGLE = """# a single triangle
dim 2
nodes 3
0 0
1 0
0 1
elements 1
0 1 2
"""


class TestFormat:
    def test_parse(self):
        m = parse_mesh(ONE_TRIANGLE)
        assert m.dim == 2 and m.n_elements == 1
        assert np.allclose(m.element_vertices(0), [[0, 0], [1, 0], [0, 1]])

    @pytest.mark.parametrize("name", FAMILIES)
    def test_round_trip(self, name):
        m = generate_family(FamilySpec(name), 2)
        again = parse_mesh(write_mesh(m))
        assert np.array_equal(again.nodes, m.nodes)
        assert np.array_equal(again.elements, m.elements)

    def test_read_file(self, tmp_path):
        p = tmp_path / "m.txt"
        p.write_text(ONE_TRIANGLE, encoding="utf-8")
        assert read_mesh(p).n_elements == 1

    def test_index_out_of_range(self):
        text = "dim 2\nnodes 4\n0 0\n1 0\n0 1\n1 1\nelements 1\n0 1 99\n"
        with pytest.raises(IndexOutOfRange):
            parse_mesh(text)

    def test_degenerate(self):
        with pytest.raises(DegenerateElement):
            Mesh(2, [[0, 0], [1, 0], [2, 0]], [[0, 1, 2]])

    @pytest.mark.parametrize(
        "text,line",
        [
            ("dim 2\nnodes 3\n0 0\n1 x\n0 1\nelements 0\n", 4),
            ("dim 2\nnode 3\n", 2),
            ("dim 2\nnodes 1\n0 0 0\nelements 0\n", 3),
            ("dim 2\nnodes 0\nelements 0\nextra\n", 4),
        ],
    )
    def test_parse_errors_carry_line(self, text, line):
        with pytest.raises(ParseError) as info:
            parse_mesh(text)
        assert info.value.line == line

    def test_empty_mesh(self):
        m = parse_mesh("dim 3\nnodes 0\nelements 0\n")
        assert m.n_elements == 0


class TestFamilies:
    def test_shape_regular_level0(self):
        m = generate_family(FamilySpec("shape_regular"), 0)
        assert m.n_elements == 2
        assert generate_family(FamilySpec("shape_regular", h0=0.25), 1).n_elements == 128

    @pytest.mark.parametrize("name", FAMILIES)
    def test_conforming(self, name):
        for level in range(3):
            assert is_conforming(generate_family(FamilySpec(name), level))

    def test_nonconforming_detected(self):
        m = Mesh(2, [[0, 0], [2, 0], [0, 2], [1, 0], [1, -1]], [[0, 1, 2], [0, 3, 4]])
        assert not is_conforming(m)

    def test_needle_aspect(self):
        m = generate_family(FamilySpec("needle_2d", gamma=2.0), 3)
        for V in m.simplices():
            a = canonical_decompose(V).alphas
            assert abs(a[1] / a[0] - a[0]) <= 0.1 * a[0]

    @pytest.mark.parametrize("name,case", [("tet_type_i", "i"), ("tet_type_ii", "ii")])
    def test_tetra_types(self, name, case):
        for level in range(1, 5):
            V = generate_family(FamilySpec(name), level).element_vertices(0)
            assert canonical_decompose(V).case_type == case

    def test_cap_angles_increase(self):
        angles = [face_angles(cap_triangle(eps)).max() for eps in (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)]
        assert all(a < b for a, b in zip(angles, angles[1:]))
        # law of cosines: the apex angle is pi - 2 atan(2 eps)
        assert np.isclose(angles[-1], np.pi - 2 * np.arctan(2e-5))

    def test_bad_spec(self):
        with pytest.raises(BadSpec):
            FamilySpec("octahedra")
        with pytest.raises(BadSpec):
            generate_family(FamilySpec("needle_2d"), -1)
        with pytest.raises(BadSpec):
            cap_triangle(0.0)
