"""Cusp-like singularities of the borderline curves and their local models.

A curve point rho0 = f(u0) with u0 != 0 is a cusp exactly when the
borderline eigenvalue there is -n, which is then a double eigenvalue.
Cusps are located from the 2*pi jumps of arg b(u), where b(u) crosses the
negative real axis.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .borderline import TracedCurve, b_curve, evaluate_curve
from .core import EigType, KmsError, check_dimension, xi
from .oracle import char_poly
from .relations import ExcludedRhoError, double_condition_residual, is_exceptional_rho

__all__ = [
    "CuspReport",
    "DoubleCheck",
    "CardioidFit",
    "ParabolaModel",
    "Opening",
    "InsufficientSamplesError",
    "find_cusps",
    "verify_double",
    "fit_cardioid",
    "puiseux_eta",
    "local_trace",
    "annotate_cusp",
    "small_u_series",
    "parabola_model",
    "double_scan",
]

SCAN_POINTS = 4096
DOUBLE_TOL = 1e-6
CARDIOID_WINDOW = 0.03
_MIN_FIT_SAMPLES = 12
_FIT_FLOOR = 1e-10


class InsufficientSamplesError(KmsError, ValueError):
    pass


class Opening(enum.Enum):
    TOWARD_MINUS_X = "toward -x"
    TOWARD_PLUS_X = "toward +x"


@dataclass(frozen=True)
class DoubleCheck:
    """Characteristic polynomial and its derivative at lambda = -n, scaled by term size."""

    n: int
    rho: complex
    p_at: float
    dp_at: float
    verdict: bool


@dataclass(frozen=True)
class CardioidFit:
    eta_abs: float
    psi: float
    bisector_angle: float
    fit_residual: float
    samples: int


@dataclass(frozen=True)
class CuspReport:
    type: EigType
    n: int
    u0: float
    rho0: complex
    lambda0: complex
    eta_abs: float = math.nan
    psi: float = math.nan
    bisector_angle: float = math.nan
    residuals: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ParabolaModel:
    """Leading behaviour ``y**2 ~ coefficient * |x - vertex|`` near the positive axis."""

    type: EigType
    n: int
    vertex: float
    coefficient: float
    opening: Opening

    def y_squared(self, x):
        x = np.asarray(x, dtype=float)
        if self.opening is Opening.TOWARD_MINUS_X:
            return self.coefficient * (self.vertex - x)
        return self.coefficient * (x - self.vertex)


def _phase_jumps(b: np.ndarray) -> np.ndarray:
    """Indices k where arg b jumps by about 2*pi between samples k and k+1."""
    d = np.diff(np.angle(b))
    return np.nonzero(np.abs(d) > math.pi)[0]


def _refine(n: int, t: EigType, lo: float, hi: float) -> float:
    # Im(b) changes sign where b crosses the negative axis.
    s_lo = math.copysign(1.0, b_curve(n, lo, t).imag)
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        s_mid = math.copysign(1.0, b_curve(n, mid, t).imag)
        if s_mid == s_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _cusp_at(n: int, t: EigType, u0: float) -> CuspReport:
    v0, rho0, lam0, drho = evaluate_curve(n, u0, t)
    mu0 = complex(u0, v0)
    residuals = {
        "curve_derivative": abs(drho),
        "double_condition": double_condition_residual(mu0, rho0, n, t),
        "oracle_double": math.nan,
    }
    if not is_exceptional_rho(n, rho0):
        chk = verify_double(n, rho0)
        residuals["oracle_double"] = max(chk.p_at, chk.dp_at)
    return CuspReport(t, n, float(u0), complex(rho0), complex(lam0), residuals=residuals)


def find_cusps(n: int, t: EigType, fit: bool = True, points: int = SCAN_POINTS) -> list[CuspReport]:
    """Cusps of the type-t borderline curve, ordered by u0.

    Each cusp in the lower half plane (0 < u0 < pi) is reported together
    with its conjugate at -u0.  With ``fit=True`` the cardioid parameters
    are filled in by :func:`annotate_cusp`.
    """
    n = check_dimension(n)
    t = EigType(t)
    u = np.linspace(0.0, math.pi, points + 2)[1:-1]
    b = b_curve(n, u, t)
    reports = []
    for k in _phase_jumps(b):
        u0 = _refine(n, t, float(u[k]), float(u[k + 1]))
        for uu in (u0, -u0):
            reports.append(_cusp_at(n, t, uu))
    if fit:
        reports = [annotate_cusp(rep) for rep in reports]
    return sorted(reports, key=lambda r: r.u0)


def local_trace(n: int, t: EigType, u0: float, window: float = CARDIOID_WINDOW, samples: int = 801) -> TracedCurve:
    """Uniform samples of the curve on a u-interval around u0 reaching about ``window`` in rho.

    Near a cusp ``|rho - rho0| ~ |f''(u0)| (u - u0)^2 / 2``, which fixes the
    interval half-width.  The interval never reaches u = 0 or +-pi.
    """
    n = check_dimension(n)
    t = EigType(t)
    h = 1e-5
    d2 = abs(evaluate_curve(n, u0 + h, t)[3] - evaluate_curve(n, u0 - h, t)[3]) / (2.0 * h)
    half = 1.5 * math.sqrt(2.0 * window / d2) if d2 > 0 else 0.1
    half = min(half, 0.9 * abs(u0), 0.9 * (math.pi - abs(u0)))
    u = u0 + half * np.linspace(-1.0, 1.0, samples)
    v, rho, lam, drho = evaluate_curve(n, u, t)
    return TracedCurve(t, n, u, v, rho, lam, drho, closed=False)


def annotate_cusp(cusp: CuspReport, trace: TracedCurve | None = None) -> CuspReport:
    """Fill in ``eta_abs`` (from :func:`puiseux_eta`), ``psi`` and ``bisector_angle``
    (from :func:`fit_cardioid`).  Uses :func:`local_trace` unless a trace is given;
    fields stay NaN when too few samples are available.
    """
    if trace is None:
        trace = local_trace(cusp.n, cusp.type, cusp.u0)
    try:
        cf = fit_cardioid(cusp.n, cusp, trace)
        eta = puiseux_eta(cusp, trace)
    except InsufficientSamplesError:
        return cusp
    return replace(cusp, eta_abs=abs(eta), psi=cf.psi, bisector_angle=cf.bisector_angle)


def verify_double(n: int, rho0: complex, tol: float = DOUBLE_TOL) -> DoubleCheck:
    """Test whether lambda = -n is a double root of det(lambda I - K_n(rho0)).

    ``p_at`` and ``dp_at`` are |p(-n)| and |p'(-n)| divided by the sum of
    the absolute values of the terms in the respective polynomial.
    """
    n = check_dimension(n)
    rho0 = complex(rho0)
    if is_exceptional_rho(n, rho0):
        raise ExcludedRhoError(f"rho={rho0} is one of the excluded values for n={n}")
    p = char_poly(n, rho0)
    lam = -float(n)
    p_at = float(abs(p(lam)) / p.eval_scale(lam))
    dp_at = float(abs(p.derivative(lam)) / p.derivative_scale(lam))
    return DoubleCheck(n, rho0, p_at, dp_at, bool(p_at < tol and dp_at < tol))


def _wrap(a: float) -> float:
    """Angle in (-pi, pi]."""
    r = math.remainder(a, 2.0 * math.pi)
    return math.pi if r == -math.pi else r


def _signed_sqrt(cusp: CuspReport, trace: TracedCurve, window: float):
    """Branch-consistent sqrt(rho - rho0) for trace samples near the cusp.

    The sign follows the side of u0, so ``s`` passes smoothly through zero.
    Returns ``(s, mask)`` with ``mask`` selecting the samples used.
    """
    d = np.asarray(trace.rho) - cusp.rho0
    r = np.abs(d)
    # Below the floor the offset from rho0 is mostly rounding.
    sel = (r < window) & (r > _FIT_FLOOR * max(1.0, abs(cusp.rho0)))
    if np.count_nonzero(sel) < _MIN_FIT_SAMPLES:
        raise InsufficientSamplesError(
            f"only {np.count_nonzero(sel)} samples within {window} of the cusp at {cusp.rho0}"
        )
    d, r = d[sel], r[sel]
    side = np.sign(np.remainder(np.asarray(trace.u)[sel] - cusp.u0 + math.pi, 2.0 * math.pi) - math.pi)
    # Both branches leave rho0 along the tip direction; put the sqrt cut opposite it.
    tip = np.exp(1j * np.angle(np.sum(d / r)))
    return side * np.sqrt(tip) * np.sqrt(d / tip), sel


def puiseux_eta(cusp: CuspReport, trace: TracedCurve, window: float = 0.01) -> complex:
    """Coefficient eta0 of ``lambda = -n + eta0 s + eta2 s^2 + ...``, ``s = sqrt(rho - rho0)``.

    Least squares on the traced eigenvalues with three terms of the
    expansion; eta0 is defined up to sign.
    """
    s, sel = _signed_sqrt(cusp, trace, window)
    lam = np.asarray(trace.lam)[sel] + cusp.n
    design = np.column_stack([s, s * s, s**3])
    coef, *_ = np.linalg.lstsq(design, lam, rcond=None)
    return complex(coef[0])


def fit_cardioid(
    n: int, cusp: CuspReport, trace: TracedCurve, window: float = CARDIOID_WINDOW
) -> CardioidFit:
    """Fit the local cardioid ``r = (2n^2/|eta|^2) [1 + cos(theta + 2 psi)]``.

    The cardioid is the rho-image of ``|lambda| = n`` under the one-term
    expansion ``lambda = -n + eta s``.  The next term of the expansion
    changes the opening of the cusp at the same order, so the fitted
    ``eta_abs`` is an effective value and generally differs from
    :func:`puiseux_eta`; ``psi`` (the tip direction) agrees with it.

    Writing ``s = +-sqrt(rho - rho0)`` with the sign taken from the side of
    u0 the sample lies on, the cardioid is the line
    ``Re(eta s) = |eta s|^2 / (2n)``, linear in ``z = 2n eta / |eta|^2``.
    Samples with ``|rho - rho0| < window`` are used.  ``fit_residual`` is the relative least-squares misfit.
    """
    n = check_dimension(n)
    s, sel = _signed_sqrt(cusp, trace, window)
    r = np.abs(s) ** 2
    # Re(z s) = |s|^2 with every row scaled to unit |s|.
    unit = s / np.abs(s)
    design = np.column_stack([unit.real, -unit.imag])
    rhs = np.sqrt(r)
    coef, *_ = np.linalg.lstsq(design, rhs, rcond=None)
    z = complex(coef[0], coef[1])
    eta = 2.0 * n * z / abs(z) ** 2
    fit_residual = float(np.linalg.norm(design @ coef - rhs) / np.linalg.norm(rhs))
    psi = math.remainder(math.atan2(eta.imag, eta.real), math.pi)
    return CardioidFit(abs(eta), psi, _wrap(math.pi - 2.0 * psi), fit_residual, int(sel.sum()))


def small_u_series(n: int, u: float, t: EigType) -> complex:
    """Truncated expansion of f_n^(t)(u) about u = 0, error O(u**6).

    For u < 0 the conjugate of the u > 0 expansion is returned.
    """
    n = check_dimension(n)
    t = EigType(t)
    u = float(u)
    s = n * n + 1
    uu = u * u
    if t is EigType.TYPE1:
        c4 = complex((n * n + 5 * n + 1) / 90.0, -s / 45.0)
        val = xi(n) * (1.0 - 1j * n / 3.0 * uu - n * c4 * uu * uu)
    else:
        c4 = complex((n * n - 5 * n + 1) / 10.0, s / 15.0)
        val = 1.0 - 1j * n * uu + n * c4 * uu * uu
    return val.conjugate() if u < 0 else val


def parabola_model(n: int, t: EigType) -> ParabolaModel:
    """Parabola approximating the type-t curve where it meets the positive real axis."""
    n = check_dimension(n)
    t = EigType(t)
    if t is EigType.TYPE1:
        x = xi(n)
        return ParabolaModel(t, n, x, 10.0 * n * x / (n * n + 5 * n + 1), Opening.TOWARD_MINUS_X)
    q = n * n - 5 * n + 1
    assert q != 0
    opening = Opening.TOWARD_MINUS_X if q < 0 else Opening.TOWARD_PLUS_X
    return ParabolaModel(t, n, 1.0, 10.0 * n / abs(q), opening)


def double_scan(n: int, t: EigType, points: int = SCAN_POINTS, tol: float = 1e-6) -> list[float]:
    """Values u in (-pi, 0) U (0, pi) where b(u) = -n, found independently of the phase scan.

    Minimises |b(u) + n| on a grid and polishes each local minimum below
    ``tol * n`` by golden-section search.
    """
    n = check_dimension(n)
    t = EigType(t)
    u = np.linspace(-math.pi, math.pi, 2 * points + 1)[1:-1]
    u = u[u != 0.0]
    dist = np.abs(b_curve(n, u, t) + n)
    found = []
    for k in range(1, len(u) - 1):
        if dist[k] <= dist[k - 1] and dist[k] < dist[k + 1]:
            lo, hi = float(u[k - 1]), float(u[k + 1])
            if lo < 0.0 < hi:
                continue
            um = _golden(lambda x: abs(b_curve(n, x, t) + n), lo, hi)
            if abs(b_curve(n, um, t) + n) < tol * n:
                found.append(um)
    return found


def _golden(fn, lo: float, hi: float, tol: float = 1e-13) -> float:
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - inv * (b - a), a + inv * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)

