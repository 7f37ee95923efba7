import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.integrate
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from tfsamp.errors import CapabilityError, DomainError
from tfsamp.specfun import (
    HERMITE_CAP,
    WindowSpec,
    adaptive_gauss_legendre,
    hermite_eval,
    hermite_table,
    laguerre_eval,
    nu,
)


def test_hermite_zero_at_origin():
    assert hermite_eval(0, 0.0) == pytest.approx(2**0.25, rel=1e-14)
    assert abs(hermite_eval(1, 0.0)) < 1e-15


def test_hermite_cap():
    hermite_eval(HERMITE_CAP, 0.3)
    with pytest.raises(CapabilityError):
        hermite_eval(HERMITE_CAP + 1, 0.3)
    with pytest.raises(CapabilityError):
        WindowSpec.hermite(17)


def test_h0_normalisation_fine_grid():
    t = np.arange(-6, 6 + 2**-11, 2**-10)
    assert np.trapezoid(hermite_eval(0, t) ** 2, t) == pytest.approx(1, abs=1e-10)


def test_orthonormality():
    t = np.linspace(-8, 8, 8001)
    tab = hermite_table(8, t)
    gram = np.trapezoid(tab[:, None, :] * tab[None, :, :], t, axis=-1)
    assert np.max(np.abs(gram - np.eye(9))) < 1e-8


@pytest.mark.parametrize("n", range(5))
def test_against_symbolic_rodrigues(n):
    # independent derivation: c_n e^{pi t^2} d^n/dt^n e^{-2 pi t^2}, c_n > 0 fixed by the L2 norm
    t = sympy.symbols("t", real=True)
    expr = sympy.simplify(sympy.exp(sympy.pi * t**2) * sympy.diff(sympy.exp(-2 * sympy.pi * t**2), t, n))
    norm2 = sympy.integrate(expr**2, (t, -sympy.oo, sympy.oo))
    c = 1 / sympy.sqrt(norm2)
    f = sympy.lambdify(t, c * expr, "numpy")
    ts = np.linspace(-3, 3, 61)
    np.testing.assert_allclose(hermite_eval(n, ts), f(ts), atol=1e-12)


def test_laguerre_examples():
    assert laguerre_eval(0, 7.3) == 1
    assert laguerre_eval(1, 1.0) == 0
    assert laguerre_eval(2, 2.0) == pytest.approx(-1, abs=1e-15)


def _laguerre_exact(n, t):
    return sum(Fraction(math.comb(n, k) * (-1) ** k, math.factorial(k)) * Fraction(t) ** k
               for k in range(n + 1))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 8), st.floats(-50, 50))
def test_laguerre_recurrence_matches_sum(n, t):
    exact = float(_laguerre_exact(n, t))
    # condition of the alternating sum: relative check against the absolute-value sum
    scale = float(sum(Fraction(math.comb(n, k), math.factorial(k)) * abs(Fraction(t)) ** k
                      for k in range(n + 1)))
    assert abs(laguerre_eval(n, t) - exact) <= 1e-9 * max(abs(exact), 1e-3 * scale, 1e-300)


@pytest.mark.parametrize("R", [0.25, 0.5, 1.0, 2.0])
def test_nu_analytic(R):
    a = math.pi * R * R
    assert nu(0, R) == pytest.approx(1 - math.exp(-a), abs=1e-10)
    assert nu(1, R) == pytest.approx(1 - math.exp(-a) * (1 + a * a), abs=1e-10)


def test_nu_examples():
    assert nu(0, 1) == pytest.approx(0.956786, abs=1e-6)
    assert nu(1, 1) == pytest.approx(1 - math.exp(-math.pi) * (1 + math.pi**2), abs=1e-12)
    assert nu(1, 1) == pytest.approx(0.530283, abs=2e-6)
    assert nu(5, 1e-6) == pytest.approx(math.pi * 1e-12, rel=1e-5)
    with pytest.raises(DomainError):
        nu(0, 0.0)


@pytest.mark.parametrize("n", [2, 3, 6])
def test_nu_against_scipy_quad(n):
    for R in (0.3, 1.0, 1.7):
        ref, _ = scipy.integrate.quad(lambda t: laguerre_eval(n, t) ** 2 * math.exp(-t),
                                      0, math.pi * R * R, epsabs=1e-13, limit=200)
        assert nu(n, R) == pytest.approx(ref, abs=1e-11)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 6), st.floats(0.05, 2.5), st.floats(0.01, 0.5))
def test_nu_increasing_and_bounded(n, R, dR):
    assert nu(n, R) < nu(n, R + dR) <= 1 + 1e-12


def test_adaptive_quadrature_against_scipy():
    f = lambda t: np.sin(3 * t) * np.exp(-t * t)
    ours = adaptive_gauss_legendre(f, -1.0, 2.5)
    ref, _ = scipy.integrate.quad(f, -1.0, 2.5, epsabs=1e-14)
    assert ours == pytest.approx(ref, abs=1e-12)


def test_hat_norms_exact():
    nm = WindowSpec.hat(1.0).norms
    assert nm.l2 == pytest.approx(math.sqrt(2 / 3), rel=1e-15)
    assert nm.deriv_l2 == pytest.approx(math.sqrt(2), rel=1e-15)
    assert nm.t_weighted_l2 == pytest.approx(math.sqrt(1 / 15), rel=1e-15)
    assert nm.t_weighted_deriv_l2 == pytest.approx(math.sqrt(2 / 3), rel=1e-15)


@pytest.mark.parametrize("S", [0.5, 1.0, 2.0])
def test_sampled_hat_norms_converge(S):
    step = S / 2000
    t = np.arange(-S, S + step / 2, step)
    w = WindowSpec.sampled(np.clip(1 - np.abs(t) / S, 0, None), S, step)
    exact = WindowSpec.hat(S).norms
    assert w.norms.l2 == pytest.approx(exact.l2, rel=1e-5)
    assert w.norms.deriv_l2 == pytest.approx(exact.deriv_l2, rel=1e-2)
    assert w.norms.t_weighted_l2 == pytest.approx(exact.t_weighted_l2, rel=1e-5)
    assert w.norms.t_weighted_deriv_l2 == pytest.approx(exact.t_weighted_deriv_l2, rel=1e-2)


@pytest.mark.parametrize("n", range(0, 9, 2))
def test_hermite_norms_by_quadrature(n):
    t = np.linspace(-10, 10, 200001)
    h = hermite_eval(n, t)
    dh = np.gradient(h, t)
    nm = WindowSpec.hermite(n).norms
    assert nm.l2 == pytest.approx(math.sqrt(np.trapezoid(h * h, t)), rel=1e-8)
    assert nm.deriv_l2 == pytest.approx(math.sqrt(np.trapezoid(dh * dh, t)), rel=1e-5)
    assert nm.t_weighted_l2 == pytest.approx(math.sqrt(np.trapezoid((t * h) ** 2, t)), rel=1e-8)
    assert nm.t_weighted_deriv_l2 == pytest.approx(math.sqrt(np.trapezoid((t * dh) ** 2, t)), rel=1e-5)


def test_sampled_window_validation():
    with pytest.raises(DomainError):
        WindowSpec.sampled([1.0, 0.0], 1.0, 2.0)
    with pytest.raises(DomainError):
        WindowSpec.hat(0.0)


def test_window_roundtrip():
    for w in (WindowSpec.hermite(3), WindowSpec.hat(0.7, amplitude=2.0),
              WindowSpec.sampled([0.0, 1.0, 0.0], 1.0, 1.0)):
        back = WindowSpec.from_dict(w.to_dict())
        assert back.to_dict() == w.to_dict()
    assert WindowSpec.from_string("hat:1.5").S == 1.5
    with pytest.raises(DomainError):
        WindowSpec.from_string("gauss:1")
