import math

import numpy as np
import pytest

from kms.borderline import (
    ConvergenceError,
    DomainError,
    axis_crossings,
    b_curve,
    curve_derivative,
    default_trace,
    evaluate_curve,
    f_curve,
    f_curve_explicit,
    g,
    injectivity_report,
    solve_v,
    solve_v_array,
    trace_curve,
)
from kms.core import EigType
from reference_values import axis_values

T1, T2 = EigType.TYPE1, EigType.TYPE2


def test_g_matches_definition():
    for n in (2, 5, 9):
        u = np.linspace(-3, 3, 13)
        assert np.allclose(g(n, u), n * n * np.sin(u) ** 2 - np.sin(n * u) ** 2, atol=1e-12)
        assert np.all(g(n, u) >= 0)


def test_solve_v_root_and_zeros():
    r = solve_v(6, 1.1)
    assert r.v > 0
    lhs = math.sinh(6 * r.v) ** 2 - 36 * math.sinh(r.v) ** 2
    assert lhs == pytest.approx(g(6, 1.1), rel=1e-12)
    assert solve_v(6, 0.0).v == 0
    assert solve_v(6, math.pi).v == 0


def test_solve_v_domain_and_tolerance():
    with pytest.raises(DomainError):
        solve_v(5, 4.0)
    with pytest.raises(ValueError):
        solve_v(5, 0.3, tol=0)


def test_solve_v_convergence_error_is_a_kms_error():
    assert issubclass(ConvergenceError, RuntimeError)


def test_solve_v_small_u_is_not_cancelled():
    # v ~ u for small u; the cancellation-free form keeps full accuracy.
    v = solve_v_array(7, np.array([1e-6, 1e-4]))
    assert np.all(v > 0)
    assert v[1] / v[0] == pytest.approx(100, rel=1e-6)


@pytest.mark.parametrize("n", range(2, 13))
def test_axis_values(n):
    for t, want in zip((T1, T2), axis_values(n)):
        assert axis_crossings(n, t) == pytest.approx(want, abs=0)
        assert f_curve(n, 0.0, t) == pytest.approx(want[0], abs=1e-12)
        assert f_curve(n, math.pi, t) == pytest.approx(want[1], abs=1e-12)


def test_borderline_eigenvalue_modulus_is_n():
    u = np.linspace(-3.1, 3.1, 101)
    for n in (3, 8):
        for t in (T1, T2):
            assert np.allclose(np.abs(b_curve(n, u, t)), n, rtol=1e-13)
    assert b_curve(6, 0.0, T1) == pytest.approx(-6)
    assert b_curve(6, 0.0, T2) == pytest.approx(6)


def test_explicit_formula_agrees():
    for n in (3, 6, 11):
        for t in (T1, T2):
            for u in (-2.7, -0.9, 0.4, 1.3, 2.9):
                assert f_curve_explicit(n, u, t) == pytest.approx(f_curve(n, u, t), rel=1e-10)


def test_derivative_matches_finite_difference():
    h = 1e-6
    for n, t, u in ((5, T1, 0.7), (6, T2, 2.2), (9, T1, -1.4)):
        fd = (f_curve(n, u + h, t) - f_curve(n, u - h, t)) / (2 * h)
        assert curve_derivative(n, u, t) == pytest.approx(fd, rel=1e-6)


def test_derivative_domain():
    with pytest.raises(DomainError):
        curve_derivative(5, 0.0, T1)
    with pytest.raises(DomainError):
        curve_derivative(5, math.pi, T1)
    with pytest.raises(DomainError):
        evaluate_curve(5, 3.5, T1)


def test_trace_structure():
    c = trace_curve(6, T1)
    assert len(c) >= 2048
    assert np.all(np.diff(c.u) > 0)
    assert c.u[0] > -math.pi and c.u[-1] == pytest.approx(math.pi)
    p = c.polyline()
    assert p[0] == p[-1] and len(p) == len(c) + 1
    lo_x, hi_x, lo_y, hi_y = c.bbox()
    assert lo_x < 0 < hi_x and lo_y < 0 < hi_y
    s = c.samples[0]
    assert s.rho == c.rho[0] and s.type is T1


def test_trace_refines_to_tolerance():
    c = trace_curve(7, T2, base_samples=64, refine_tol=1e-3)
    chord = np.abs(np.diff(c.rho))
    assert chord.max() <= 1e-3 * 1.0001


def test_trace_arguments_checked():
    with pytest.raises(ValueError):
        trace_curve(5, T1, base_samples=8)
    with pytest.raises(ValueError):
        trace_curve(5, T1, refine_tol=0.0)


def test_default_trace_is_cached():
    assert default_trace(5, T1) is default_trace(5, T1)


def test_injectivity():
    rep = injectivity_report(default_trace(5, T1), 0.05)
    assert rep.min_distance > 1e-4
    with pytest.raises(ValueError):
        injectivity_report(default_trace(5, T1), 4.0)
