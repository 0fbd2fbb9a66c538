import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from delta_riemann.errors import ConfigError, QuadratureFailure
from delta_riemann.friction import (FrictionTerm, Trajectory, adaptive_quad, double_primitive_B,
                                    eval_alpha, primitive_A)


def quad_A(alpha, t):
    return integrate.quad(alpha, 0.0, t, epsabs=1e-13, epsrel=1e-13)[0]


def quad_B(alpha, t):
    # B(t) = int_0^t int_0^r alpha(s) ds dr, nested rather than the (t-s) kernel.
    return integrate.quad(lambda r: quad_A(alpha, r), 0.0, t, epsabs=1e-12, epsrel=1e-12)[0]


def test_alpha_values():
    assert eval_alpha(FrictionTerm.zero(), 3.0) == 0.0
    assert eval_alpha(FrictionTerm.constant(2.0), 5.0) == 2.0
    assert eval_alpha(FrictionTerm.degenerate(1.0, 2.0), 1.0) == pytest.approx(0.25, abs=1e-15)


def test_constant_primitives():
    f = FrictionTerm.constant(1.7)
    for t in (0.0, 0.3, 2.0, 9.5):
        assert primitive_A(f, t) == pytest.approx(1.7 * t, rel=1e-15, abs=0)
        assert double_primitive_B(f, t) == pytest.approx(1.7 * t * t / 2, rel=1e-15, abs=0)


def test_log_case_at_e_minus_one():
    f = FrictionTerm.degenerate(1.0, 1.0)
    assert primitive_A(f, math.e - 1.0) == pytest.approx(1.0, abs=1e-14)


def test_beta_two_values():
    f = FrictionTerm.degenerate(1.0, 2.0)
    assert primitive_A(f, 1.0) == pytest.approx(0.5, abs=1e-15)
    assert double_primitive_B(f, 1.0) == pytest.approx(1.0 - math.log(2.0), abs=1e-15)
    assert primitive_A(f, 1.0) == pytest.approx(quad_A(f.alpha, 1.0), abs=1e-12)
    assert double_primitive_B(f, 1.0) == pytest.approx(quad_B(f.alpha, 1.0), abs=1e-11)


def test_zero_family_vanishes():
    f = FrictionTerm.zero()
    t = np.linspace(0, 10, 7)
    assert np.all(primitive_A(f, t) == 0) and np.all(double_primitive_B(f, t) == 0)


@pytest.mark.parametrize("theta", [1.0, -1.0, 0.3])
@pytest.mark.parametrize("beta", [0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 1.0 + 1e-9])
def test_degenerate_closed_forms_vs_nested_quadrature(theta, beta):
    f = FrictionTerm.degenerate(theta, beta)
    for t in (1e-6, 0.4, 3.0, 10.0):
        assert f.primitive(t) == pytest.approx(quad_A(f.alpha, t), rel=1e-11, abs=1e-13)
        assert f.double_primitive(t) == pytest.approx(quad_B(f.alpha, t), rel=1e-10, abs=1e-12)


def test_small_t_no_cancellation():
    # B ~ theta t^2/2 for t -> 0; the closed forms must not lose it.
    for beta in (0.5, 1.0, 2.0, 3.0):
        f = FrictionTerm.degenerate(1.0, beta)
        t = 1e-9
        assert f.double_primitive(t) == pytest.approx(t * t / 2 - beta * t ** 3 / 6, rel=1e-14)
        assert f.primitive(t) == pytest.approx(t - beta * t * t / 2, rel=1e-14)


def test_general_matches_closed_form():
    g = FrictionTerm.general(lambda s: 1.0 / (1.0 + s) ** 2)
    d = FrictionTerm.degenerate(1.0, 2.0)
    for t in (0.0, 0.5, 1.0, 4.0):
        assert g.primitive(t) == pytest.approx(d.primitive(t), abs=1e-10)
        assert g.double_primitive(t) == pytest.approx(d.double_primitive(t), abs=1e-10)


def test_general_vectorized_and_oscillatory():
    g = FrictionTerm.general(np.cos)
    t = np.array([0.5, 2.0, 7.0])
    assert np.allclose(g.primitive(t), np.sin(t), atol=1e-10)
    assert np.allclose(g.double_primitive(t), 1 - np.cos(t), atol=1e-10)


def test_adaptive_quad_reversed_and_budget():
    assert adaptive_quad(np.exp, 1.0, 0.0) == pytest.approx(1.0 - math.e, abs=1e-12)
    with pytest.raises(QuadratureFailure):
        adaptive_quad(lambda s: 1.0 / np.sqrt(np.abs(s - 0.3)), 0.0, 1.0, tol=1e-14,
                      max_intervals=20)


def test_config_errors():
    with pytest.raises(ConfigError):
        FrictionTerm.degenerate(1.0, -0.5)
    with pytest.raises(ConfigError):
        FrictionTerm("quadratic")
    with pytest.raises(ConfigError):
        FrictionTerm.general(np.cos).to_json()


@pytest.mark.parametrize("f", [FrictionTerm.zero(), FrictionTerm.constant(-2.5),
                               FrictionTerm.degenerate(-1.0, 1.5)])
def test_json_round_trip(f):
    assert FrictionTerm.from_json(f.to_json()) == f


def test_trajectory():
    tr = Trajectory(1.5, FrictionTerm.constant(1.0))
    assert tr.position(2.0) == pytest.approx(5.0)
    assert tr.velocity(2.0) == pytest.approx(3.5)
    assert np.allclose(tr.position(np.array([0.0, 1.0])), [0.0, 2.0])


@settings(max_examples=60, deadline=None)
@given(theta=st.floats(-3, 3), beta=st.floats(0, 4), t=st.floats(0, 10))
def test_primitive_derivative_property(theta, beta, t):
    # A' = alpha and B' = A by central differences.
    f = FrictionTerm.degenerate(theta, beta)
    h = 1e-5
    lo, hi = max(t - h, 0.0), t + h
    dA = (f.primitive(hi) - f.primitive(lo)) / (hi - lo)
    dB = (f.double_primitive(hi) - f.double_primitive(lo)) / (hi - lo)
    mid = 0.5 * (lo + hi)
    assert dA == pytest.approx(f.alpha(mid), abs=1e-6 * (1 + abs(theta)))
    assert dB == pytest.approx(f.primitive(mid), abs=1e-6 * (1 + abs(theta)))
