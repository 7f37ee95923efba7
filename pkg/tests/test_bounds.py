import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfsamp.bounds import (
    BoundReport,
    CalibrationConstants,
    K_constant,
    compact_frame_bounds,
    explicit_main_bound_log,
    heisenberg_bound,
    lp_remez_log_constant,
    n2logn,
    planar_sampling_bound,
    planar_sampling_bound_closed,
    sunzhou_check,
    sup_remez_log_constant,
    thm_main_bound,
)
from tfsamp.errors import CapabilityError, DomainError
from tfsamp.specfun import WindowSpec

HAT = WindowSpec.hat(1.0)
NU01 = 1 - math.exp(-math.pi)


def test_K_example():
    expected = math.log(50 * math.pi) + 8 * math.pi - math.log(NU01) + 4 * math.log(8)
    assert K_constant(1.0, 0, 50 * math.pi, 1.0) == pytest.approx(expected, rel=1e-12)
    assert K_constant(1.0, 0, 50 * math.pi, 1.0) == pytest.approx(38.55, abs=0.01)
    assert K_constant(1.0, 0, 2.0, 2.0) == pytest.approx(8 * math.pi - math.log(NU01) + 4 * math.log(8))
    with pytest.raises(DomainError):
        K_constant(1.0, 0, 1.0, 0.0)


def test_K_scales_with_c():
    cal = CalibrationConstants(c_brudnyi=2.5)
    assert K_constant(0.7, 2, 3.0, 0.5, cal) == pytest.approx(2.5 * K_constant(0.7, 2, 3.0, 0.5))


@pytest.mark.parametrize("n", [0, 1, 2, 4])
def test_K_increasing_in_R_where_nu_term_allows(n):
    # d/dR [8 pi R^2 - ln nu_n(R)] = 16 pi R - nu'/nu; the log term decreases in R,
    # so K is increasing only once 16 pi R dominates nu'/nu (R >= 0.5 suffices here)
    Rs = np.linspace(0.5, 3.0, 26)
    K = [K_constant(R, n, 1.0, 1.0) for R in Rs]
    assert all(a < b for a, b in zip(K, K[1:]))


def test_K_not_monotone_for_small_R():
    # ln(1/nu_0(R)) ~ -2 ln R blows up as R -> 0 faster than 8 pi R^2 decays
    assert K_constant(0.05, 0, 1.0, 1.0) > K_constant(0.2, 0, 1.0, 1.0)


def test_main_bound_example():
    mb = thm_main_bound(0, 1.0, 0.5)
    assert mb.sigma == pytest.approx(2 - math.log(NU01), rel=1e-12)
    assert mb.sigma == pytest.approx(2.0442, abs=1e-4)
    assert math.exp(mb.eta_log) == pytest.approx(1 / NU01, rel=1e-12)
    assert math.exp(mb.eta_log) == pytest.approx(1.0452, abs=1e-4)


def test_main_bound_unit_base():
    cal = CalibrationConstants(C_numerical=1.0)
    mb = thm_main_bound(2, 0.8, 1.0, 2.0, cal)
    assert mb.bound_log == pytest.approx(mb.eta_log, abs=1e-15)


def test_main_bound_direct_evaluation():
    for n, R, g, C in [(0, 1.0, 0.3, 1.0), (1, 0.5, 0.7, 1.3), (2, 1.2, 0.9, 1.1)]:
        cal = CalibrationConstants(C)
        from tfsamp.specfun import nu

        sigma = C * (R * R + math.log(1 / nu(n, R)) + n2logn(n) + 1)
        eta = R * R / nu(n, R) * C ** (R * R + 1)
        direct = eta * (g / C) ** (-sigma)
        assert math.exp(thm_main_bound(n, R, g, 2, cal).bound_log) == pytest.approx(direct, rel=1e-12)


def test_main_bound_errors():
    for g in (0.0, -0.1, 1.01):
        with pytest.raises(DomainError):
            thm_main_bound(0, 1.0, g)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 4), st.floats(0.2, 2.0), st.floats(0.01, 0.99), st.floats(0.001, 0.5))
def test_main_bound_nonincreasing_in_gamma(n, R, g, dg):
    g2 = min(1.0, g + dg)
    assert thm_main_bound(n, R, g2).bound_log <= thm_main_bound(n, R, g).bound_log + 1e-12


@pytest.mark.parametrize("n", [0, 1, 2])
def test_main_bound_nondecreasing_in_R_on_sweep(n):
    for g in (0.25, 0.5, 1.0):
        a = thm_main_bound(n, 0.5, g).bound_log
        b = thm_main_bound(n, 1.0, g).bound_log
        assert b >= a


def test_n2logn():
    assert n2logn(0) == 0 and n2logn(1) == 0
    assert n2logn(3) == pytest.approx(9 * math.log(3))


def test_remez_constants_log_vs_direct():
    args = (0.6, 1, 2.0, 0.4, 0.3)
    K = K_constant(*args[:4])
    direct = math.exp(math.pi * 0.36 / 2) * (math.pi * 0.36 / 0.3) ** K
    assert math.exp(sup_remez_log_constant(*args)) == pytest.approx(direct, rel=1e-12)
    direct_lp = math.exp(math.pi * 0.36 / 2) * (2 * math.pi * 0.36 / 0.3) ** (K + 1)
    assert math.exp(lp_remez_log_constant(*args)) == pytest.approx(direct_lp, rel=1e-12)


def test_explicit_bound_matches_formula():
    from tfsamp.specfun import nu

    n, R, g = 1, 0.8, 0.6
    b = (R * R + math.log(1 / nu(n, R)) + 1) + 1
    direct = 2 * math.pi * R * R * math.exp(math.pi * R * R / 2) / nu(n, R) * (2 / g) ** b
    assert math.exp(explicit_main_bound_log(n, R, g)) == pytest.approx(direct, rel=1e-12)


def test_sunzhou_examples():
    sz = sunzhou_check(HAT, 0.2)
    a = 0.4 / math.pi
    assert sz.Delta == pytest.approx(a * (math.sqrt(2) + math.sqrt(1 / 15) + a * math.sqrt(2 / 3)), rel=1e-14)
    assert sz.Delta == pytest.approx(0.22616, abs=2e-5)
    assert sz.condition_met
    assert sz.A_lower == pytest.approx((math.sqrt(2 / 3) - sz.Delta) ** 2)
    tiny = sunzhou_check(HAT, 1e-9)
    assert tiny.A_lower == pytest.approx(2 / 3, rel=1e-8)
    assert not sunzhou_check(HAT, 2.0).condition_met


def test_compact_examples():
    fb = compact_frame_bounds(HAT, 0.4)
    assert fb.R_g == pytest.approx(math.pi / (4 * math.sqrt(3)), rel=1e-14)
    assert fb.R_g == pytest.approx(0.45345, abs=1e-5)
    assert fb.admissible
    assert fb.A == pytest.approx(0.01930, abs=1e-5)
    small = compact_frame_bounds(HAT, 1e-4)
    assert small.A * 3 * 1e-8 / (2 / 3) == pytest.approx(1, rel=1e-3)
    assert not compact_frame_bounds(HAT, 0.46).admissible
    with pytest.raises(CapabilityError):
        compact_frame_bounds(WindowSpec.hermite(0), 0.1)


def test_planar_examples():
    C = planar_sampling_bound(HAT, 0.4, 0.5)
    assert C == pytest.approx(431.8, abs=0.05)
    assert C == pytest.approx(planar_sampling_bound_closed(HAT, 0.4, 0.5), rel=1e-12)
    assert planar_sampling_bound(HAT, 0.4, 1.0) < C
    with pytest.raises(DomainError):
        planar_sampling_bound(HAT, 0.5, 0.5)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 3.0), st.floats(0.01, 0.99), st.floats(0.01, 1.0))
def test_planar_specialisation_identity(S, frac, g):
    w = WindowSpec.hat(S)
    from tfsamp.bounds import admissible_scale

    R = frac * admissible_scale(w)
    assert planar_sampling_bound(w, R, g) == pytest.approx(planar_sampling_bound_closed(w, R, g), rel=1e-12)


@pytest.mark.parametrize("S", [0.5, 1.0, 2.0])
def test_frame_monotonicity_suite(S):
    w = WindowSpec.hat(S)
    fb0 = compact_frame_bounds(w, 0.01)
    Rs = np.linspace(0.01, 0.999 * fb0.R_g, 40)
    deltas = [sunzhou_check(w, R).Delta for R in Rs]
    As = [compact_frame_bounds(w, R).A for R in Rs]
    assert all(a < b for a, b in zip(deltas, deltas[1:]))
    assert all(a > b for a, b in zip(As, As[1:]))
    # admissibility implies the Sun-Zhou condition
    assert all(sunzhou_check(w, R).condition_met for R in Rs)


def test_heisenberg_constant_polynomial():
    rep = heisenberg_bound(HAT, [1.0], 0.4, [0.5, 1.0], search_halfwidth=0.5)
    # the level set is all of C, gamma = 1
    expected = 1.0 * HAT.norms.l2**2 / planar_sampling_bound(HAT, 0.4, 1.0)
    assert rep.theoretical_value == pytest.approx(expected, rel=1e-12)
    assert rep.details["eps"] == 1.0


def test_heisenberg_zzbar_has_admissible_eps():
    coeffs = [0, 0, 0, 0, 1, 0]
    rep = heisenberg_bound(WindowSpec.hermite(0), coeffs, 1.0, [0.01, 0.1, 0.3], search_halfwidth=2)
    assert rep.theoretical_value is not None and rep.theoretical_value > 0


def test_heisenberg_no_admissible_eps():
    rep = heisenberg_bound(HAT, [1.0], 0.4, [2.0, 3.0], search_halfwidth=0.5)
    assert rep.theoretical_value is None and rep.verdict == "informational"
    with pytest.raises(DomainError):
        heisenberg_bound(HAT, [0.0, 0.0], 0.4, [1.0])


def test_report_compare_and_json():
    assert BoundReport.compare("x", 2.0, 2.05, tolerance=0.05).passed
    assert not BoundReport.compare("x", 2.0, 2.2, tolerance=0.05).passed
    assert BoundReport.compare("x", math.log(2.0), math.log(2.09), tolerance=0.05, log_domain=True).passed
    rep = BoundReport.compare("x", None, 3.0)
    assert rep.verdict == "informational"
    rep = BoundReport("y", math.inf, np.float64(1.5), inputs={"z": 1 + 2j})
    d = json.loads(json.dumps(rep.to_dict()))
    assert d["theoretical_value"] == "inf" and d["inputs"]["z"] == [1.0, 2.0]


def test_calibration_validation():
    with pytest.raises(DomainError):
        CalibrationConstants(kappa=0.0)
