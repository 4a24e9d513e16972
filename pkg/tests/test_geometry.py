import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aniso_rt.errors import DegenerateSimplex
from aniso_rt.geometry import (
    Simplex,
    angle_report,
    assumption1_constant,
    canonical_decompose,
    check_assumption1,
    condition_numbers,
    dihedral_angles,
    face_angles,
    mathscr_H,
    param_H_T,
    param_H_T0,
    simplex_from_parameters,
)

from conftest import random_simplices, simplices

REF2 = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
REF3 = np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])


def _rotation(rng, d):
    Q, _ = np.linalg.qr(rng.normal(size=(d, d)))
    return Q


class TestSimplex:
    def test_basic_measures(self):
        S = Simplex(REF2)
        assert S.dim == 2
        assert np.isclose(S.volume, 0.5)
        assert np.isclose(S.diameter, np.sqrt(2))
        assert np.isclose(S.inradius, 1 - 1 / np.sqrt(2))
        assert np.isclose(S.circumradius, np.sqrt(2) / 2)

    def test_tetra_measures(self):
        S = Simplex(REF3)
        assert np.isclose(S.volume, 1 / 6)
        assert np.isclose(S.face_measures().sum(), 1.5 + np.sqrt(3) / 2)

    @pytest.mark.parametrize(
        "V",
        [
            [[0, 0], [1, 0], [2, 0]],
            [[0, 0], [1, 1], [1, 1]],
            [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]],
        ],
    )
    def test_degenerate(self, V):
        with pytest.raises(DegenerateSimplex):
            Simplex(V)

    def test_bad_shape(self):
        with pytest.raises(ValueError):
            Simplex([[0, 0], [1, 0]])


class TestCanonicalDecomposition:
    def test_reference_triangle_is_its_own_decomposition(self):
        dec = canonical_decompose(REF2)
        assert np.allclose(dec.alphas, [1, 1])
        assert np.isclose(dec.tilde_params["s"], 0) and np.isclose(dec.tilde_params["t"], 1)
        assert np.allclose(np.abs(dec.rotation), np.eye(2))

    def test_reference_tetra_is_type_i(self):
        dec = canonical_decompose(REF3)
        assert dec.case_type == "i"
        assert dec.reference_id == "T3_1"
        assert np.allclose(dec.reconstruct(), REF3[list(dec.vertex_permutation)])

    def test_type_ii_example(self):
        # The fourth vertex lies beyond the bisecting plane of PQ.
        V = np.array([[0, 0, 0], [1, 0, 0], [1, 0.01, 0], [0, 0, 0.015]])
        dec = canonical_decompose(V)
        assert dec.case_type == "ii"
        assert dec.reference_id == "T3_2"
        assert np.allclose(dec.reconstruct(), V[list(dec.vertex_permutation)], atol=1e-14)

    @pytest.mark.parametrize("d", [2, 3])
    def test_reconstruction_on_random_thin_simplices(self, d):
        for S in random_simplices(d, 200, seed=d):
            dec = canonical_decompose(S)
            err = np.abs(dec.reconstruct() - S.vertices[list(dec.vertex_permutation)]).max()
            assert err <= 1e-10 * S.diameter
            assert np.isclose(abs(np.linalg.det(dec.rotation)), 1.0)
            assert np.allclose(dec.rotation.T @ dec.rotation, np.eye(d), atol=1e-12)

    def test_both_types_occur(self):
        types = {canonical_decompose(S).case_type for S in random_simplices(3, 200, seed=9)}
        assert types == {"i", "ii"}

    @settings(max_examples=200, deadline=None)
    @given(simplices(2))
    def test_triangle_parameter_ranges(self, S):
        dec = canonical_decompose(S)
        a1, a2 = dec.alphas
        s, t = dec.tilde_params["s"], dec.tilde_params["t"]
        assert a2 <= a1 * (1 + 1e-12)
        assert t > 0 and np.isclose(s**2 + t**2, 1)
        # the angle at x1 is the largest one, hence at least 60 degrees
        assert s <= 0.5 + 1e-12

    @settings(max_examples=200, deadline=None)
    @given(simplices(3))
    def test_tetra_parameter_ranges(self, S):
        dec = canonical_decompose(S)
        a1, a2, a3 = dec.alphas
        p = dec.tilde_params
        tol = 1e-9
        assert a2 <= a3 * (1 + tol) and a3 <= a1 * (1 + tol)
        assert p["s1"] > 0 and p["t1"] > 0 and p["t2"] > 0
        assert np.isclose(p["s1"] ** 2 + p["t1"] ** 2, 1)
        assert np.isclose(p["s21"] ** 2 + p["s22"] ** 2 + p["t2"] ** 2, 1)
        assert abs(p["s21"]) * a3 <= a1 / 2 * (1 + tol) or p["s21"] <= 0.5 + tol

    @settings(max_examples=100, deadline=None)
    @given(simplices(3), st.integers(0, 2**31))
    def test_invariant_under_rigid_motion(self, S, seed):
        rng = np.random.default_rng(seed)
        Q = _rotation(rng, 3)
        moved = Simplex(S.vertices @ Q.T + rng.normal(size=3))
        a, b = canonical_decompose(S), canonical_decompose(moved)
        assert np.allclose(a.alphas, b.alphas, rtol=1e-8)
        assert np.isclose(param_H_T0(S), param_H_T0(moved), rtol=1e-8)

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_from_parameters_round_trip(self, seed):
        for S in random_simplices(3, 20, seed=seed):
            dec = canonical_decompose(S)
            V = simplex_from_parameters(dec.alphas, dec.tilde_params, dec.case_type, dec.rotation, dec.translation)
            assert np.allclose(V, S.vertices[list(dec.vertex_permutation)], atol=1e-12 * S.diameter)
            again = canonical_decompose(V)
            assert again.case_type == dec.case_type
            assert np.allclose(again.alphas, dec.alphas)

    def test_from_parameters_canonical_frame(self):
        V = simplex_from_parameters([1.0, 0.5], {"s": 0.0, "t": 1.0})
        assert np.allclose(V, [[0, 0], [1, 0], [0, 0.5]])


class TestParameters:
    def test_reference_triangle_values(self):
        S = Simplex(REF2)
        assert np.isclose(param_H_T0(S), 4.0)
        dec = canonical_decompose(S)
        assert np.isclose(param_H_T(dec, S.volume, S.diameter), 2 * np.sqrt(2))

    def test_needle_and_cap(self):
        h = 1e-2
        needle = Simplex([[0, 0], [h, 0], [0, h**2]])
        cap = Simplex([[0, 0], [h, 0], [h / 2, h**2]])
        assert param_H_T0(needle) / needle.diameter < 3
        assert param_H_T0(cap) / cap.diameter > 0.5 / h

    @pytest.mark.parametrize("d", [2, 3])
    def test_lemma_bounds_on_sweep(self, d):
        for S in random_simplices(d, 300, seed=10 + d):
            dec = canonical_decompose(S)
            HT = param_H_T(dec, S.volume, S.diameter)
            HT0 = param_H_T0(S)
            assert 0.5 * HT0 < HT < 2 * HT0

    @pytest.mark.parametrize("d", [2, 3])
    def test_condition_numbers(self, d):
        for S in random_simplices(d, 300, seed=20 + d):
            dec = canonical_decompose(S)
            cn = condition_numbers(dec)
            HT = param_H_T(dec, S.volume, S.diameter)
            assert np.isclose(cn["det_AT"], S.volume * (2 if d == 2 else 6), rtol=1e-12)
            assert cn["norm_Atilde"] <= (np.sqrt(2) if d == 2 else 2.0) + 1e-12
            assert cn["cond_Atilde"] <= (1.0 if d == 2 else 2 / 3) * HT / S.diameter * (1 + 1e-12)
            assert np.isclose(cn["norm_AT0"], 1.0)
            assert np.isclose(cn["cond_Ahat"], dec.alphas.max() / dec.alphas.min())

    def test_mathscr_H(self):
        dec = canonical_decompose(np.array([[0, 0], [2.0, 0], [1.0, 0.5]]))
        H = mathscr_H(dec)
        assert np.isclose(H[0], dec.alphas[0])
        assert np.isclose(H[1], dec.alphas[1] * dec.tilde_params["t"])
        # alpha_1 * H_2 is twice the area
        assert np.isclose(H[0] * H[1], 1.0)


class TestAssumption1:
    def test_constant_is_tight(self):
        V = np.array([[0, 0, 0], [1, 0, 0], [1, 0.01, 0], [0, 0.3, 0.015]])
        dec = canonical_decompose(V)
        M = assumption1_constant(dec)
        assert check_assumption1(dec, M * (1 + 1e-9))
        if M > 0:
            assert not check_assumption1(dec, M * (1 - 1e-6))

    def test_triangles_always_pass(self):
        dec = canonical_decompose(REF2)
        assert check_assumption1(dec, 0.0)
        assert assumption1_constant(dec) == 0.0


class TestAngles:
    def test_right_triangle(self):
        assert np.isclose(face_angles(REF2).max(), np.pi / 2)
        assert np.isclose(face_angles(REF2).sum(), np.pi)

    def test_regular_tetra_dihedral(self):
        V = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1.0]])
        assert np.allclose(dihedral_angles(V), np.arccos(1 / 3))
        assert np.allclose(face_angles(V), np.pi / 3)

    def test_sliver_dihedral_tends_to_pi(self):
        prev = 0.0
        for a in [1e-1, 1e-2, 1e-3]:
            V = np.array([[-0.5, 0, 0], [0.5, 0, 0], [0, -0.5, a], [0, 0.5, a]])
            m = dihedral_angles(V).max()
            assert m > prev
            prev = m
        assert prev > np.pi - 0.01

    def test_report(self):
        rep = angle_report(REF2)
        assert rep.good_element and np.isnan(rep.max_dihedral)
        assert np.isclose(rep.H_T0, 4.0)
        cap = angle_report(np.array([[0, 0], [1, 0], [0.5, 1e-3]]))
        assert not cap.good_element
        assert set(rep.as_dict()) >= {"h", "H_T", "H_T0", "max_angle", "good_element", "gamma0"}
