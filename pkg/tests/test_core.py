"""Coupling validation, Theta matrix, band bottoms, form bounds."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import surfint as si
from surfint.errors import (
    BetaNonzeroOnSigmaZero,
    BetaZeroOnSigmaBeta,
    NonRealAlpha,
    ValidationError,
)

finite = dict(allow_nan=False, allow_infinity=False)


def test_theta_frozen_example():
    # alpha=0, beta=1, gamma=2i collapses the diagonal to |1 +- i|^2 = 2
    th = si.theta_matrix(si.uniform_field(0.0, 1.0, 2j))
    expected = np.array([[2.0, -2j], [2j, 2.0]])
    assert np.allclose(th.entries, expected, atol=1e-14)
    assert np.allclose(th.eigenvalues(), [0.0, 4.0], atol=1e-12)


def test_theta_constrained_ignores_gamma():
    # on a constrained region gamma enters only through the trace constraint
    for g in [0.0, 1.0, 2j, -2.0, 1 + 1j]:
        th = si.theta_matrix(si.uniform_field(3.0, 0.0, g))
        assert th.kind == si.CONSTRAINED
        assert np.allclose(th.entries, 0.75 * np.ones((2, 2)), atol=1e-15)


@given(
    a=st.floats(-5, 5, **finite),
    b=st.floats(0.01, 10, **finite),
    gre=st.floats(-3, 3, **finite),
    gim=st.floats(-3, 3, **finite),
)
def test_theta_hermitian(a, b, gre, gim):
    th = si.theta_matrix(si.uniform_field(a, b, complex(gre, gim)))
    assert np.allclose(th.entries, th.entries.conj().T, atol=1e-13)


@given(a=st.floats(-5, 5, **finite), b=st.floats(0.01, 10, **finite), g=st.floats(-3, 3, **finite))
def test_theta_real_symmetric_for_real_gamma(a, b, g):
    th = si.theta_matrix(si.uniform_field(a, b, g))
    assert th.is_real_symmetric
    assert np.allclose(th.entries, th.entries.T, atol=1e-13)


def test_m_infinity_frozen_values():
    assert si.m_infinity(1, 4, 0) == pytest.approx(-0.25, abs=1e-15)
    assert si.m_infinity(0, 1, 2j) == pytest.approx(-16.0, abs=1e-12)
    assert si.m_infinity(2, 0, 0) == pytest.approx(-1.0, abs=1e-15)
    assert si.m_infinity(0, 2, 2j) == pytest.approx(-4.0, abs=1e-13)
    assert si.m_infinity(3, 0, 2j) == pytest.approx(-0.5625, abs=1e-15)
    assert si.m_infinity(0, 0, 5j) == 0.0


def test_m_infinity_gamma_zero_piecewise():
    # beta > 0, gamma = 0: m = -4/beta^2 while alpha*beta <= 4, then -alpha^2/4
    assert si.m_infinity(1, 2, 0) == pytest.approx(-1.0, abs=1e-14)
    assert si.m_infinity(2, 1, 0) == pytest.approx(-4.0, abs=1e-14)
    assert si.m_infinity(3, 4, 0) == pytest.approx(-2.25, abs=1e-14)  # alpha*beta = 12
    assert si.m_infinity(8, 1, 0) == pytest.approx(-16.0, abs=1e-13)  # -alpha^2/4
    # both branches coincide at the crossover alpha*beta = 4
    assert si.m_infinity(2, 2, 0) == pytest.approx(-1.0, abs=1e-14)


@given(
    a=st.floats(0, 10, **finite),
    b=st.floats(0, 10, **finite),
    gre=st.floats(-4, 4, **finite),
    gim=st.floats(-4, 4, **finite),
)
def test_m_infinity_defined_and_nonpositive(a, b, gre, gim):
    # the discriminant (4 + ab + |g|^2)^2 - 16ab is >= 0 on the whole
    # admissible domain, so this never raises NegativeDiscriminant
    m = si.m_infinity(a, b, complex(gre, gim))
    assert m <= 0.0


@given(
    a=st.floats(0, 10, **finite),
    b=st.floats(0, 10, **finite),
    gre=st.floats(-4, 4, **finite),
    gim=st.floats(-4, 4, **finite),
)
def test_m_infinity_monotone_in_alpha(a, b, gre, gim):
    g = complex(gre, gim)
    m1 = si.m_infinity(a, b, g)
    m2 = si.m_infinity(a + 0.5, b, g)
    assert m2 <= m1 + 1e-12


def test_m_infinity_rejects_bad_domain():
    with pytest.raises(ValidationError):
        si.m_infinity(-1.0, 1.0, 0.0)
    with pytest.raises(ValidationError):
        si.m_infinity(1.0, -1.0, 0.0)
    with pytest.raises(NonRealAlpha):
        si.m_infinity(1 + 1j, 1.0, 0.0)


def test_validate_coupling_partition_inference():
    f = si.validate_coupling(1.0, 2.0, 1j)
    assert f.single.kind == si.FREE
    f = si.validate_coupling(1.0, 0.0, 1j)
    assert f.single.kind == si.CONSTRAINED


def test_validate_coupling_partition_mismatches():
    with pytest.raises(BetaZeroOnSigmaBeta):
        si.validate_coupling(1.0, 0.0, 0.0, partition=si.FREE)
    with pytest.raises(BetaNonzeroOnSigmaZero):
        si.validate_coupling(1.0, 2.0, 0.0, partition=si.CONSTRAINED)
    with pytest.raises(NonRealAlpha):
        si.validate_coupling(1 + 2j, 1.0, 0.0)


def test_validate_coupling_reports_all_problems():
    with pytest.raises(ValidationError) as exc:
        si.validate_coupling({"a": 1.0, "b": 2 + 1j}, {"a": 1.0, "b": 1j}, {"a": 0.0, "b": 0.0})
    assert len(exc.value.problems) >= 2


def test_validate_coupling_multi_region():
    f = si.validate_coupling(
        {"top": 1.0, "bottom": 2.0},
        {"top": 1.0, "bottom": 0.0},
        {"top": 0.0, "bottom": 1j},
    )
    assert f.names() == ("top", "bottom")
    assert f.coupling("top").kind == si.FREE
    assert f.coupling("bottom").kind == si.CONSTRAINED
    with pytest.raises(ValidationError):
        _ = f.single


def test_constraint_coefficients_cover_gamma_two():
    # gamma = 2 forces the inner trace to vanish; gamma = -2 the outer one
    ci, ce = si.validate_coupling(0.0, 0.0, 2.0).single.constraint_coefficients()
    assert ci == 0.0 and ce == 2.0
    ci, ce = si.validate_coupling(0.0, 0.0, -2.0).single.constraint_coefficients()
    assert ci == 2.0 and ce == 0.0


def test_form_lower_bound_frozen():
    assert si.form_lower_bound(si.delta_field(2.0)).eta == pytest.approx(-1.0, abs=1e-12)
    assert si.form_lower_bound(si.delta_prime_field(1.0)).eta == pytest.approx(-2.0, abs=1e-12)
    # repulsive delta: Theta <= 0, eta clamps to a tiny negative value
    eta = si.form_lower_bound(si.delta_field(-2.0)).eta
    assert -1e-10 < eta < 0.0


def test_form_lower_bound_random_vectors():
    # -<Theta v, v> >= eta |v|^2 across couplings and 1000 random vectors
    rng = np.random.default_rng(20260817)
    fields = [
        si.delta_field(2.0),
        si.delta_prime_field(0.5),
        si.uniform_field(1.0, 2.0, 1 + 1j),
        si.uniform_field(3.0, 0.0, 2j),
        si.uniform_field(-1.0, 1.0, -0.5),
    ]
    for field in fields:
        eta = si.form_lower_bound(field).eta
        th = si.theta_matrix(field).entries
        v = rng.normal(size=(1000, 2)) + 1j * rng.normal(size=(1000, 2))
        surf = -np.einsum("ni,ij,nj->n", v.conj(), th, v).real
        assert np.all(surf >= eta * np.einsum("ni,ni->n", v.conj(), v).real - 1e-9)


def test_theta_scaling_with_beta():
    # the free-region matrix scales like 1/beta in its gamma block
    th1 = si.theta_matrix(si.uniform_field(0.0, 1.0, 1j)).entries
    th2 = si.theta_matrix(si.uniform_field(0.0, 2.0, 1j)).entries
    assert np.allclose(th1, 2.0 * th2, atol=1e-13)


def test_field_helpers():
    assert si.delta_field(1.5).single == si.RegionCoupling(1.5, 0.0, 0j, si.CONSTRAINED)
    assert si.delta_prime_field(2.0).single == si.RegionCoupling(0.0, 2.0, 0j, si.FREE)
    assert si.uniform_field(1, 2, 1j).single.gamma == 1j
