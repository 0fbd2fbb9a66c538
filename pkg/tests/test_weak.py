import numpy as np
import pytest
from scipy.integrate import tanhsinh

from delta_riemann.errors import EmptyInput
from delta_riemann.friction import FrictionTerm
from delta_riemann.kk import DeltaShock, RiemannData, solve
from delta_riemann.model import State
from delta_riemann.pressureless import solve_pressureless
from delta_riemann.weak import (TestFunction, is_monotone_to_floor, kk_field, residual,
                                residual_kk, residual_pressureless, residual_sweep, scale_density)

ZERO = FrictionTerm.zero()
ORDERS = (8, 16, 32, 64)


def test_test_function_validation_and_json():
    phi = TestFunction(0.2, 1.0, 0.5, 0.25)
    assert TestFunction.from_json(phi.to_json()) == phi
    with pytest.raises(ValueError):
        TestFunction(0.0, 0.5, 1.0, 0.5)
    with pytest.raises(ValueError):
        TestFunction(0.0, 1.0, 0.0, 0.5)
    ph, phx, pht = phi.parts(np.array([0.2, 0.7, 5.0]), 1.0)
    assert ph[0] == pytest.approx(np.exp(-2.0)) and phx[0] == 0 and pht[0] == 0
    assert ph[1] == 0 and ph[2] == 0


def test_constant_state_is_annihilated():
    d = RiemannData(State(1.5, 0.3), State(1.5, 0.3), 1.0)
    sol = solve(d, ZERO)
    for phi in (TestFunction(0, 1, 1, 0.5), TestFunction(0.7, 2, 0.3, 1.5)):
        assert residual_kk(sol, d, ZERO, phi).max_abs <= 1e-13


def test_two_contact_with_constant_friction():
    d = RiemannData(State(1, 0), State(2, 1), 1.0)
    f = FrictionTerm.constant(1.0)
    rep = residual_kk(solve(d, f), d, f, TestFunction(1.0, 1.0, 2.0, 0.5), 64)
    assert rep.max_abs <= 1e-8


def test_kk_delta_with_degenerate_friction():
    d = RiemannData(State(1, 3), State(2, 0), 1.0)
    f = FrictionTerm.degenerate(1, 2)
    sol = solve(d, f)
    phi = TestFunction(float(sol.position(1.0)), 1.0, 1.0, 0.5)
    rep = residual_kk(sol, d, f, phi, 64)
    assert rep.max_abs <= 1e-8
    # Transformed and original forms are the same functional.
    assert residual_kk(sol, d, f, phi, 64, form="transformed").max_abs <= 1e-8
    # The line integral carries a non-trivial share of the balance.
    assert abs(rep.decomposition["line"][1]) > 1e-2


@pytest.mark.parametrize("left,right", [(State(1, 0), State(1, 1)), (State(1, 1), State(4, 0))])
def test_pressureless_exact(left, right):
    sol = solve_pressureless(left, right, ZERO)
    for x0 in (0.0, 0.3):
        rep = residual_pressureless(sol, left, right, ZERO, TestFunction(x0, 1.0, 1.0, 0.5), 64)
        assert rep.max_abs <= 1e-9


def test_perturbed_delta_is_detected():
    left, right = State(1, 1), State(4, 0)
    sol = solve_pressureless(left, right, ZERO)
    bad = DeltaShock(sol.u_delta0 + 0.1, sol.w_slope, sol.x_delta)
    # Keep the path but change the carried velocity.
    phi = TestFunction(float(sol.position(1.0)), 1.0, 1.0, 0.5)
    rep = residual_pressureless(bad, left, right, ZERO, phi, 64)
    assert abs(rep.r_momentum) > 1e-3


def _oracle_momentum(fld, phi):
    """Nested tanh-sinh quadrature of the momentum functional, region by region."""
    f = fld.friction
    xa, xb = phi.x0 - phi.rx, phi.x0 + phi.rx

    def inner(t):
        cuts = [np.full(t.shape, xa)] + [np.clip(w(t), xa, xb) for w in fld.waves] \
            + [np.full(t.shape, xb)]
        total = np.zeros(t.shape)
        for k, region in enumerate(fld.regions):

            def g(x, tt):
                rho, u = region(x, tt)
                ph, phx, pht = phi.parts(x, tt)
                return rho * u * pht + (rho * u * u + fld.mu * u) * phx + f.alpha(tt) * rho * ph
            total += tanhsinh(g, cuts[k], cuts[k + 1], args=(t,), atol=1e-14, rtol=1e-13).integral
        return total

    return tanhsinh(inner, phi.t0 - phi.rt, phi.t0 + phi.rt, atol=1e-13, rtol=1e-12).integral


def test_gauss_legendre_matches_tanh_sinh_oracle_on_non_solution():
    d = RiemannData(State(1, 0), State(2, 1), 1.0)
    f = FrictionTerm.constant(1.0)
    fld = scale_density(kk_field(solve(d, f), d, f), 1.1)
    phi = TestFunction(0.8, 1.0, 1.0, 0.5)
    ours = residual(fld, phi, 64).r_momentum
    ref = _oracle_momentum(fld, phi)
    assert abs(ref) > 1e-3
    assert ours == pytest.approx(ref, rel=1e-9, abs=1e-11)


def test_sweep_is_monotone_and_passes():
    d = RiemannData(State(1, 2), State(1, 0), 1.0)
    f = FrictionTerm.constant(1.0)
    sol = solve(d, f)
    xc = float(sol.position(1.0))
    phis = [TestFunction(xc + s, 1.0, 1.0, 0.5) for s in (-0.5, -0.25, 0.0, 0.25, 0.5)]
    table = residual_sweep(sol, d, f, phis, ORDERS)
    assert table.monotone and table.final() <= 1e-8
    assert [r.order for r in table.rows] == list(ORDERS)


def test_sweep_single_and_empty():
    left, right = State(1, 0), State(1, 1)
    sol = solve_pressureless(left, right, ZERO)
    table = residual_sweep(sol, (left, right), ZERO, [TestFunction(0.5, 1, 1, 0.5)], [16])
    assert len(table.rows) == 1
    with pytest.raises(EmptyInput):
        residual_sweep(sol, (left, right), ZERO, [], [16])


def test_monotone_to_floor():
    assert is_monotone_to_floor([1e-2, 1e-5, 1e-13, 5e-13], floor=1e-12)
    assert not is_monotone_to_floor([1e-2, 1e-1])
    assert not is_monotone_to_floor([1e-2, 1e-13, 1e-9], floor=1e-12)
