import cmath
import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from kms.borderline import b_curve, f_curve, solve_v
from kms.core import EigType, build_kms, dirichlet_ratio, format_complex, parse_complex
from kms.oracle import full_spectrum
from kms.relations import lambda_of_mu, rho_of_mu

dims = st.integers(min_value=2, max_value=12)
types = st.sampled_from([EigType.TYPE1, EigType.TYPE2])
finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
small = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


@settings(deadline=None, max_examples=200)
@given(dims, st.floats(min_value=-20, max_value=20, allow_nan=False))
def test_dirichlet_bounded(n, x):
    assert abs(dirichlet_ratio(n, x)) <= n * (1 + 1e-12)


@settings(deadline=None, max_examples=200)
@given(finite, finite)
def test_complex_literal_round_trip(a, b):
    z = complex(a, b)
    assert parse_complex(format_complex(z)) == z


@settings(deadline=None, max_examples=100)
@given(dims, st.floats(min_value=-math.pi, max_value=math.pi, allow_nan=False), types)
def test_curve_conjugation_and_modulus(n, u, t):
    assert abs(f_curve(n, -u, t) - np.conj(f_curve(n, u, t))) <= 1e-12 * (1 + abs(f_curve(n, u, t)))
    assert abs(abs(b_curve(n, u, t)) - n) <= 1e-9 * n


@settings(deadline=None, max_examples=100)
@given(dims, st.floats(min_value=-math.pi, max_value=math.pi, allow_nan=False))
def test_v_positive_and_symmetric(n, u):
    v = solve_v(n, u).v
    assert v > 0 if abs(u) not in (0.0, math.pi) else v == 0
    assert abs(solve_v(n, -u).v - v) <= 1e-12 * (1 + v)


@settings(deadline=None, max_examples=60)
@given(dims, types, st.floats(0.05, 3.0), st.floats(0.02, 1.0))
def test_relations_give_eigenvalues(n, t, x, y):
    mu = complex(x, y)
    rho = complex(rho_of_mu(mu, n, t))
    if not cmath.isfinite(rho) or abs(rho) > 5:
        return
    lam = complex(lambda_of_mu(mu, n, t))
    k = build_kms(n, rho)
    smin = np.linalg.svd(k - lam * np.eye(n), compute_uv=False)[-1]
    assert smin <= 1e-8 * (1 + np.linalg.norm(k, 2) + abs(lam))


@settings(deadline=None, max_examples=60)
@given(dims, small)
def test_spectrum_conjugate_and_multiplicities(n, rho):
    a = full_spectrum(n, rho)
    b = full_spectrum(n, rho.conjugate())
    assert sum(e.multiplicity for e in a.entries) == n
    va, vb = a.values(), np.conj(b.values())
    scale = 1 + np.max(np.abs(va))
    assert max(np.min(np.abs(vb - z)) for z in va) <= 1e-9 * scale
