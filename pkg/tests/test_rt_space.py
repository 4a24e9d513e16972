import numpy as np
import pytest

import aniso_rt.rt_space as rts
from aniso_rt.errors import UnisolvenceFailure
from aniso_rt.fields import PolynomialField, counterexample_field, get_field, random_polynomial_field
from aniso_rt.geometry import Simplex
from aniso_rt.polynomials import evaluate_monomials, exponents
from aniso_rt.quadrature import rule_on_simplex, simplex_rule
from aniso_rt.rt_space import (
    build_space,
    in_rt_space,
    interpolate_direct,
    interpolate_physical,
    interpolate_reference,
    physical_dofs,
    rt_dim,
)

from conftest import random_simplices

CASES = [(0, 2, None), (1, 2, None), (2, 2, None), (0, 3, None), (1, 3, None), (0, 3, "T3_2"), (1, 3, "T3_2")]


def _rt_member(space, rng):
    """Vector polynomial field given by random coefficients in the space's basis."""
    c = rng.normal(size=space.N)
    coeffs = np.einsum("j,jcm->cm", c, space.basis)
    return PolynomialField(coeffs, space.k + 1), coeffs


@pytest.mark.parametrize("k,d,expected", [(0, 2, 3), (1, 2, 8), (2, 2, 15), (0, 3, 4), (1, 3, 15), (2, 3, 36)])
def test_dimension(k, d, expected):
    assert rt_dim(k, d) == expected


@pytest.mark.parametrize("k,d,ref", CASES)
class TestSpace:
    def test_size_and_duality(self, k, d, ref):
        space = build_space(k, d, ref)
        assert space.N == rt_dim(k, d)
        D = np.array([space.dofs(lambda x, j=j: space.basis_values(x)[:, j, :]) for j in range(space.N)]).T
        assert np.allclose(D, np.eye(space.N), atol=1e-10)
        assert space.condition_number < 1e5

    def test_reproduces_members(self, k, d, ref, rng):
        space = build_space(k, d, ref)
        for _ in range(3):
            f, coeffs = _rt_member(space, rng)
            assert in_rt_space(coeffs, k)
            interp = interpolate_reference(space, f)
            x = rng.uniform(0, 0.3, size=(10, d))
            assert np.allclose(interp.evaluate(x), f.value(x), atol=1e-10)

    def test_commuting_divergence(self, k, d, ref):
        # div I v is the L2 projection of div v onto P^k.
        space = build_space(k, d, ref)
        f = get_field("trig", d)
        interp = interpolate_reference(space, f, degree=16)
        rule = rule_on_simplex(space.vertices, 16)
        q = evaluate_monomials(exponents(d, k), rule.points)
        resid = interp.divergence(rule.points) - f.divergence(rule.points)
        assert np.allclose(rule.weights @ (resid[:, None] * q), 0.0, atol=1e-10)


def test_lowest_order_basis_is_whitney():
    space = build_space(0, 2)
    x = np.random.default_rng(0).uniform(size=(5, 2))
    vals = space.basis_values(x)
    for i, xi in enumerate(space.vertices):
        assert np.allclose(vals[:, i, :], x - xi)


def test_in_rt_space_rejects_non_members():
    exps = exponents(2, 1)
    c = np.zeros((2, len(exps)))
    c[0, exps.index((1, 0))] = 1.0
    assert not in_rt_space(c, 0)  # (x1, 0)
    c[1, exps.index((0, 1))] = 1.0
    assert in_rt_space(c, 0)  # (x1, x2)


def test_counterexample_interpolant():
    space = build_space(0, 2)
    interp = interpolate_reference(space, counterexample_field())
    assert np.allclose(interp.coefficients, [1 / 3, 0, 0], atol=1e-14)
    rule = simplex_rule(2, 8)
    assert np.allclose(interp.evaluate(rule.points), rule.points / 3, atol=1e-14)
    err = interp.evaluate(rule.points)[:, 0] - counterexample_field().value(rule.points)[:, 0]
    # int_T x1^2 = 1/12, so the first component error is 1/(6 sqrt 3)
    assert np.isclose(np.sqrt(rule.weights @ err**2), 1 / (6 * np.sqrt(3)), atol=1e-13)


@pytest.mark.parametrize("k", [0, 1])
@pytest.mark.parametrize("d", [2, 3])
class TestPhysical:
    def test_pullback_equals_physical_dofs(self, k, d):
        f = get_field("trig", d)
        for S in random_simplices(d, 15, seed=40 + d, thin=2.0):
            a = interpolate_physical(k, S, f)
            assert np.allclose(physical_dofs(k, S, f), a.coefficients, atol=1e-9 * max(1, np.abs(a.coefficients).max()))

    def test_direct_build_agrees_on_polynomials(self, k, d, rng):
        f = random_polynomial_field(d, k + 2, rng)
        for S in random_simplices(d, 5, seed=50 + d, thin=1.5):
            x = rule_on_simplex(S.vertices, 3).points
            a = interpolate_physical(k, S, f).evaluate(x)
            b = interpolate_direct(k, S, f)(x)
            assert np.allclose(a, b, atol=1e-8 * max(1, np.abs(a).max()))

    def test_reproduces_physical_members(self, k, d, rng):
        # Piola images of RT^k are RT^k again, so physical members are fixed points.
        space = build_space(k, d)
        f, _ = _rt_member(space, rng)
        for S in random_simplices(d, 5, seed=60 + d, thin=2.0):
            rule = rule_on_simplex(S.vertices, 4)
            Iv = interpolate_physical(k, S, f).evaluate(rule.points)
            assert np.allclose(Iv, f.value(rule.points), atol=1e-9 * max(1, np.abs(Iv).max()))


def test_divergence_of_physical_interpolant():
    S = Simplex([[0.1, 0.0], [1.0, 0.2], [0.3, 0.9]])
    f = get_field("poly1", 2)
    interp = interpolate_physical(1, S, f)
    x = rule_on_simplex(S.vertices, 2).points
    assert np.allclose(interp.divergence(x), f.divergence(x))
    assert np.allclose(rts.divergence(interp, x), interp.divergence(x))
    assert np.allclose(rts.evaluate(interp, x), f.value(x))


def test_bad_order():
    with pytest.raises(ValueError):
        build_space(3, 2)
    with pytest.raises(ValueError):
        rt_dim(-1, 2)


def test_unisolvence_failure(monkeypatch):
    monkeypatch.setattr(rts, "UNISOLVENCE_COND_LIMIT", 1.0)
    rts.build_space.cache_clear()
    try:
        with pytest.raises(UnisolvenceFailure):
            build_space(1, 2)
    finally:
        monkeypatch.undo()
        rts.build_space.cache_clear()
