"""Borderline curves: the rho values for which K_n(rho) has an eigenvalue of modulus n.

For u in [-pi, pi] the curve point is ``rho = f(u)`` with ``mu = u + i v``
and ``v = v(n, u) >= 0`` the unique root of

    sinh(n v)**2 - n**2 sinh(v)**2 = n**2 sin(u)**2 - sin(n u)**2.

Both sides are evaluated through the identities

    n - sin(n x)/sin(x)   = 2 * sum_k sin(c_k x / 2)**2
    sinh(n x)/sinh(x) - n = 2 * sum_k sinh(c_k x / 2)**2,  c_k = n-1-2k,

which avoid the cancellation of the textbook forms near u = 0.  Curve
points with pi/2 < |u| <= pi and u < 0 are obtained from the reduced
range [0, pi/2] by the reflections ``v(u) = v(-u) = v(pi - u)``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .core import EigType, KmsError, check_dimension, xi
from .relations import rho_of_mu

__all__ = [
    "ConvergenceError",
    "DomainError",
    "BorderlineSolve",
    "CurveSample",
    "TracedCurve",
    "InjectivityReport",
    "g",
    "solve_v",
    "solve_v_array",
    "f_curve",
    "f_curve_explicit",
    "b_curve",
    "curve_derivative",
    "evaluate_curve",
    "trace_curve",
    "default_trace",
    "injectivity_report",
    "axis_crossings",
]

_BISECT_STEPS = 60
_NEWTON_STEPS = 5
_SMALL_W = 1e-3
_MAX_REFINE_LEVELS = 20


class ConvergenceError(KmsError, RuntimeError):
    pass


class DomainError(KmsError, ValueError):
    pass


def _coeffs(n: int) -> np.ndarray:
    return np.arange(n - 1, -n, -2, dtype=float)


def _reduce(u):
    """Map u in [-pi, pi] to w in [0, pi/2]; also return the reflection flags."""
    u = np.asarray(u, dtype=float)
    a = np.abs(u)
    refl = a > math.pi / 2
    w = np.where(refl, math.pi - a, a)
    return w, u < 0, refl


def _g_reduced(n: int, w):
    c = _coeffs(n)
    s = np.sin(w)
    n_minus_u = 2.0 * np.sum(np.sin(np.multiply.outer(w, c) / 2.0) ** 2, axis=-1)
    return s * s * n_minus_u * (2.0 * n - n_minus_u)


def g(n: int, u):
    """n^2 sin^2(u) - sin^2(n u); non-negative by construction."""
    n = check_dimension(n)
    w, _, _ = _reduce(u)
    out = _g_reduced(n, w)
    return float(out) if np.ndim(out) == 0 else out


def _lhs(n: int, v):
    """sinh^2(n v) - n^2 sinh^2(v) and its derivative in v."""
    c = _coeffs(n)
    cv = np.multiply.outer(v, c)
    s_minus_n = 2.0 * np.sum(np.sinh(cv / 2.0) ** 2, axis=-1)
    ds = np.sum(c * np.sinh(cv), axis=-1)
    sh = np.sinh(v)
    s = s_minus_n + n
    val = sh * sh * s_minus_n * (s + n)
    deriv = np.sinh(2.0 * v) * s_minus_n * (s + n) + 2.0 * sh * sh * s * ds
    return val, deriv


def _log_g(n: int, w):
    """log g on the reduced range, free of underflow for tiny w > 0."""
    c = _coeffs(n)
    r = 2.0 * np.sum((np.sin(np.multiply.outer(w, c) / 2.0) / w[:, None]) ** 2, axis=-1)
    return 2.0 * np.log(np.sin(w)) + 2.0 * np.log(w) + np.log(r) + np.log(2.0 * n - r * w * w)


def _log_lhs(n: int, v):
    c = _coeffs(n)
    r = 2.0 * np.sum((np.sinh(np.multiply.outer(v, c) / 2.0) / v[:, None]) ** 2, axis=-1)
    return 2.0 * np.log(np.sinh(v)) + 2.0 * np.log(v) + np.log(r) + np.log(2.0 * n + r * v * v)


def _solve_small(n: int, w):
    """Root for small w, where v = w (1 + O(w^2)); bisection on log v in [w/2, 2w]."""
    target = _log_g(n, w)
    lo, hi = np.log(w / 2.0), np.log(2.0 * w)
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        above = _log_lhs(n, np.exp(mid)) >= target
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    return np.exp(0.5 * (lo + hi))


def solve_v_array(n: int, u) -> np.ndarray:
    """Vectorised root ``v(n, u)``; returns an array shaped like ``u``."""
    n = check_dimension(n)
    w, _, _ = _reduce(u)
    # g is even in w, which keeps slightly out-of-range u well defined.
    w = np.abs(np.atleast_1d(w))
    v = np.zeros_like(w)
    # Deep below the small-w range v = w to double precision.
    tiny = w < 1e-300
    v[tiny] = w[tiny]
    small = ~tiny & (w < _SMALL_W)
    if small.any():
        v[small] = _solve_small(n, w[small])
    target = _g_reduced(n, w)
    live = (target > 0.0) & ~small & ~tiny
    if not live.any():
        return v.reshape(np.shape(u))
    gt = target[live]
    hi = np.arcsinh(np.sqrt(gt + n * n * math.sinh(1.0) ** 2)) / n + 1.0
    for _ in range(200):
        short = _lhs(n, hi)[0] < gt
        if not short.any():
            break
        hi = np.where(short, 2.0 * hi, hi)
    lo = np.zeros_like(hi)
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        above = _lhs(n, mid)[0] >= gt
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    x = 0.5 * (lo + hi)
    for _ in range(_NEWTON_STEPS):
        val, deriv = _lhs(n, x)
        ok = deriv > 0
        step = np.where(ok, (val - gt) / np.where(ok, deriv, 1.0), 0.0)
        x = np.clip(x - step, lo, hi)
    v[live] = x
    return v.reshape(np.shape(u))


@dataclass(frozen=True)
class BorderlineSolve:
    n: int
    u: float
    v: float
    g: float
    residual: float


def solve_v(n: int, u: float, tol: float = 1e-12) -> BorderlineSolve:
    """Unique non-negative root v of the borderline equation at ``u``.

    ``residual`` is ``|sinh^2(nv) - n^2 sinh^2 v - g_n(u)|``; it must stay
    below ``tol * max(1, g_n(u))`` or :class:`ConvergenceError` is raised.
    """
    n = check_dimension(n)
    u = float(u)
    if not -math.pi <= u <= math.pi:
        raise DomainError(f"u must lie in [-pi, pi], got {u}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    v = float(solve_v_array(n, u))
    gu = g(n, u)
    residual = float(abs(_lhs(n, np.array(v))[0] - gu))
    if residual > tol * max(1.0, gu):
        raise ConvergenceError(f"v(n={n}, u={u}) residual {residual:.3e} above {tol:.1e}")
    return BorderlineSolve(n, u, v, gu, residual)


def _df_dmu(n: int, mu, t: EigType):
    """d rho / d mu for the type-t relation, written without small-mu cancellation."""
    c = _coeffs(n)
    half = (n - 1) / 2.0
    sin_mu = np.sin(mu)
    n_minus_d = 2.0 * np.sum(np.sin(np.multiply.outer(mu, c) / 2.0) ** 2, axis=-1)
    if t is EigType.TYPE1:
        return -sin_mu * n_minus_d / (2.0 * np.sin(half * mu) ** 2)
    return -sin_mu * (2.0 * n - n_minus_d) / (2.0 * np.cos(half * mu) ** 2)


def _dv_du(n: int, w, v):
    """dv/du on the reduced range, via implicit differentiation of g(u) = lhs(v)."""
    c = _coeffs(n)
    wc = np.multiply.outer(w, c)
    m = 2.0 * np.sum(np.sin(wc / 2.0) ** 2, axis=-1)
    dm = np.sum(c * np.sin(wc), axis=-1)
    out = np.empty_like(w)
    big = w >= _SMALL_W
    if big.any():
        s = np.sin(w[big])
        dg = 2.0 * s * np.cos(w[big]) * m[big] * (2.0 * n - m[big]) + 2.0 * s * s * dm[big] * (n - m[big])
        out[big] = dg / _lhs(n, v[big])[1]
    small = ~big
    if small.any():
        # Ratio of log-derivatives; g and lhs agree at the root, and nothing underflows.
        ws, vs = w[small], v[small]
        r = 2.0 * np.sum((np.sin(wc[small] / 2.0) / ws[:, None]) ** 2, axis=-1)
        dlog_g = 2.0 / np.tan(ws) + (dm[small] / ws) / (r * ws) - dm[small] / (2.0 * n - m[small])
        vc = np.multiply.outer(vs, c)
        q = 2.0 * np.sum((np.sinh(vc / 2.0) / vs[:, None]) ** 2, axis=-1)
        dq = np.sum(c * np.sinh(vc), axis=-1)
        dlog_l = 2.0 / np.tanh(vs) + (dq / vs) / (q * vs) + dq / (2.0 * n + q * vs * vs)
        out[small] = dlog_g / dlog_l
    return out


def evaluate_curve(n: int, u, t: EigType):
    """Evaluate ``(v, rho, lambda, drho/du)`` along the type-t borderline curve.

    Accepts a scalar or array ``u`` in [-pi, pi].  At u in {0, +-pi} the
    derivative is reported as its one-sided limit, 0.
    """
    n = check_dimension(n)
    t = EigType(t)
    u_arr = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any(np.abs(u_arr) > math.pi):
        raise DomainError("u must lie in [-pi, pi]")
    w, neg, refl = _reduce(u_arr)
    v = solve_v_array(n, w)
    mu = w + 1j * v

    # Reflection u -> pi - u maps type k onto type k (n odd) or the other type (n even).
    t_refl = t if n % 2 else t.other()
    rho = np.empty(len(w), dtype=complex)
    drho = np.zeros(len(w), dtype=complex)
    # Below this the derivative is O(u) and its factors underflow; report the limit 0.
    endpoint = w < 1e-150
    for typ, mask in ((t, ~refl), (t_refl, refl)):
        if not mask.any():
            continue
        rho[mask] = rho_of_mu(mu[mask], n, typ)
        inner = mask & ~endpoint
        if inner.any():
            dmu = 1.0 + 1j * _dv_du(n, w[inner], v[inner])
            drho[inner] = _df_dmu(n, mu[inner], typ) * dmu
    rho[refl] = -np.conj(rho[refl])
    drho[refl] = np.conj(drho[refl])
    rho[neg] = np.conj(rho[neg])
    drho[neg] = -np.conj(drho[neg])

    d = _dirichlet_reduced(n, mu)
    d[refl] = (-1.0) ** (n + 1) * np.conj(d[refl])
    d[neg] = np.conj(d[neg])
    lam = -d if t is EigType.TYPE1 else d

    if np.ndim(u) == 0:
        return float(v[0]), complex(rho[0]), complex(lam[0]), complex(drho[0])
    return v, rho, lam, drho


def _dirichlet_reduced(n: int, mu):
    c = _coeffs(n)
    n_minus_d = 2.0 * np.sum(np.sin(np.multiply.outer(mu, c) / 2.0) ** 2, axis=-1)
    return n - n_minus_d


def f_curve(n: int, u, t: EigType):
    """Curve point rho = f_n^(t)(u)."""
    return evaluate_curve(n, u, t)[1]


def b_curve(n: int, u, t: EigType):
    """Borderline eigenvalue b_n^(t)(u); its modulus is n."""
    return evaluate_curve(n, u, t)[2]


def curve_derivative(n: int, u, t: EigType):
    """d f_n^(t) / du on (-pi, 0) U (0, pi)."""
    u_arr = np.asarray(u, dtype=float)
    if np.any((u_arr == 0.0) | (np.abs(u_arr) >= math.pi)):
        raise DomainError("curve derivative is defined only for u in (-pi, 0) U (0, pi)")
    return evaluate_curve(n, u, t)[3]


def f_curve_explicit(n: int, u: float, t: EigType) -> complex:
    """Curve point from the separated real/imaginary-part formulas.

    Loses relative accuracy like ``eps / u**2`` near u = 0; kept as an
    independent check on :func:`f_curve`.
    """
    n = check_dimension(n)
    t = EigType(t)
    u = float(u)
    if u == 0.0 or abs(u) == math.pi:
        return complex(_axis_value(n, u, t))
    v = float(solve_v_array(n, u))
    sgn = 1.0 if t is EigType.TYPE1 else -1.0
    re = math.cos(u) * math.cosh(n * v) - sgn * math.cos(n * u) * math.cosh(v)
    im = -(math.sin(u) * math.sinh(n * v) - sgn * math.sin(n * u) * math.sinh(v))
    den = math.cosh((n - 1) * v) - sgn * math.cos((n - 1) * u)
    if den == 0.0:
        return complex(_axis_value(n, 0.0 if abs(u) < 1.0 else math.pi, t))
    return complex(re, im) / den


def _axis_value(n: int, u: float, t: EigType) -> float:
    if u == 0.0:
        return xi(n) if t is EigType.TYPE1 else 1.0
    even = n % 2 == 0
    if t is EigType.TYPE1:
        return -1.0 if even else -xi(n)
    return -xi(n) if even else -1.0


def axis_crossings(n: int, t: EigType) -> tuple[float, float]:
    """Real-axis values (f(0), f(pi)) of the type-t curve."""
    n = check_dimension(n)
    t = EigType(t)
    return _axis_value(n, 0.0, t), _axis_value(n, math.pi, t)


@dataclass(frozen=True)
class CurveSample:
    type: EigType
    u: float
    v: float
    rho: complex
    lam: complex
    drho_du: complex


@dataclass(frozen=True, eq=False)
class TracedCurve:
    """Samples of one borderline curve, ordered by u over (-pi, pi]."""

    type: EigType
    n: int
    u: np.ndarray
    v: np.ndarray
    rho: np.ndarray
    lam: np.ndarray
    drho: np.ndarray
    closed: bool = True

    def __len__(self) -> int:
        return len(self.u)

    @property
    def samples(self) -> list[CurveSample]:
        return [
            CurveSample(self.type, float(a), float(b), complex(c), complex(d), complex(e))
            for a, b, c, d, e in zip(self.u, self.v, self.rho, self.lam, self.drho)
        ]

    def polyline(self) -> np.ndarray:
        """Closed vertex list (first vertex repeated at the end)."""
        return np.append(self.rho, self.rho[:1])

    def bbox(self) -> tuple[float, float, float, float]:
        r = self.rho
        return float(r.real.min()), float(r.real.max()), float(r.imag.min()), float(r.imag.max())


def _uniform_grid(base_samples: int) -> np.ndarray:
    u = np.linspace(-math.pi, math.pi, base_samples + 1)
    u[0], u[-1] = -math.pi, math.pi
    u = u[np.abs(u) > 1e-12]
    return np.sort(np.append(u, 0.0))


def trace_curve(
    n: int,
    t: EigType,
    base_samples: int = 2048,
    refine_tol: float | None = None,
) -> TracedCurve:
    """Sample the type-t borderline curve adaptively.

    A uniform grid is bisected wherever the chord between neighbouring
    points exceeds ``refine_tol`` or where the tangent reverses and
    ``|df/du|`` falls below ten times the local parameter step (the
    neighbourhood of a cusp).  ``refine_tol`` defaults to 1e-3 of the bounding
    box diagonal of the uniform trace.
    """
    n = check_dimension(n)
    t = EigType(t)
    if base_samples < 16:
        raise ValueError("base_samples must be at least 16")
    u = _uniform_grid(base_samples)
    v, rho, lam, drho = evaluate_curve(n, u, t)
    if refine_tol is None:
        diag = math.hypot(np.ptp(rho.real), np.ptp(rho.imag))
        refine_tol = 1e-3 * diag
    if refine_tol <= 0:
        raise ValueError("refine_tol must be positive")

    for _ in range(_MAX_REFINE_LEVELS):
        h = np.diff(u)
        chord = np.abs(np.diff(rho))
        slope = np.minimum(np.abs(drho[:-1]), np.abs(drho[1:]))
        # A cusp reverses the tangent; the axis crossings only slow down.
        reverse = (drho[:-1] * np.conj(drho[1:])).real < 0
        split = (chord > refine_tol) | (reverse & (slope < 10.0 * h))
        split &= h > 1e-13
        if not split.any():
            break
        um = 0.5 * (u[:-1][split] + u[1:][split])
        vm, rm, lm, dm = evaluate_curve(n, um, t)
        order = np.argsort(np.concatenate([u, um]), kind="stable")
        u = np.concatenate([u, um])[order]
        v = np.concatenate([v, vm])[order]
        rho = np.concatenate([rho, rm])[order]
        lam = np.concatenate([lam, lm])[order]
        drho = np.concatenate([drho, dm])[order]

    keep = u > -math.pi
    return TracedCurve(t, n, u[keep], v[keep], rho[keep], lam[keep], drho[keep])


@functools.lru_cache(maxsize=64)
def default_trace(n: int, t: EigType) -> TracedCurve:
    """Trace with the default parameters, cached per (n, type)."""
    return trace_curve(n, EigType(t))


@dataclass(frozen=True)
class InjectivityReport:
    min_distance: float
    u_pair: tuple[float, float]
    rho_pair: tuple[complex, complex]
    pairs_checked: int


def injectivity_report(curve: TracedCurve, min_param_gap: float) -> InjectivityReport:
    """Smallest |rho(u) - rho(u')| over sample pairs at circular distance >= gap.

    Evidence for (not proof of) the absence of self-intersections.
    """
    if len(curve) < 64:
        raise ValueError("injectivity scan needs at least 64 samples")
    if min_param_gap > math.pi:
        raise ValueError(f"no sample pairs are {min_param_gap} apart on a 2*pi-periodic curve")
    u, rho = curve.u, curve.rho
    best = (math.inf, 0, 0)
    count = 0
    chunk = 512
    for start in range(0, len(u), chunk):
        du = np.abs(u[start : start + chunk, None] - u[None, :])
        du = np.minimum(du, 2.0 * math.pi - du)
        ok = du >= min_param_gap
        dist = np.where(ok, np.abs(rho[start : start + chunk, None] - rho[None, :]), np.inf)
        count += int(ok.sum())
        k = int(np.argmin(dist))
        i, j = divmod(k, len(u))
        if dist[i, j] < best[0]:
            best = (float(dist[i, j]), start + i, j)
    if count == 0:
        raise ValueError(f"no sample pairs are {min_param_gap} apart")
    _, i, j = best
    return InjectivityReport(
        best[0], (float(u[i]), float(u[j])), (complex(rho[i]), complex(rho[j])), count // 2
    )
