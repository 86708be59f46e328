"""Transcendental relations between the mode parameter mu, rho and lambda.

A type-1 eigenvalue of K_n(rho) is ``-sin(n mu)/sin(mu)`` where
``rho = sin((n+1)mu/2) / sin((n-1)mu/2)``; type-2 flips the sign of the
eigenvalue and uses cosines in the rho relation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import (
    EigType,
    KmsError,
    _cos_ratio,
    _sin_ratio,
    check_dimension,
    dirichlet_ratio,
    xi,
)

__all__ = [
    "EigClass",
    "PoleError",
    "ExcludedRhoError",
    "AsymptoticSpectrum",
    "lambda_of_mu",
    "rho_of_mu",
    "double_condition_residual",
    "is_exceptional_rho",
    "exceptional_rhos",
    "asymptotic_spectrum",
    "classify_eigenvalue",
    "borderline_band",
]

_POLE_TOL = 1e-12


class PoleError(KmsError, ZeroDivisionError):
    pass


class ExcludedRhoError(KmsError, ValueError):
    pass


class EigClass(enum.Enum):
    ORDINARY = "ordinary"
    BORDERLINE = "borderline"
    EXTRAORDINARY = "extraordinary"


def borderline_band(n: int) -> float:
    """Default half-width of the ``|lambda| = n`` classification band."""
    return 1e-9 * n


def lambda_of_mu(mu, n: int, t: EigType):
    """Eigenvalue attached to ``mu``: ``-/+ sin(n mu)/sin(mu)`` for type 1/2."""
    t = EigType(t)
    d = dirichlet_ratio(n, mu)
    return -d if t is EigType.TYPE1 else d


def rho_of_mu(mu, n: int, t: EigType):
    """Matrix parameter rho belonging to ``mu`` for the given eigenvalue type.

    Removable 0/0 points (including ``mu = 0``) are filled by
    l'Hopital's rule; a vanishing denominator with a non-vanishing
    numerator raises :class:`PoleError`.
    """
    n = check_dimension(n)
    t = EigType(t)
    scalar = np.ndim(mu) == 0
    z = np.atleast_1d(np.asarray(mu, dtype=complex))
    a, b = (n + 1) / 2.0, (n - 1) / 2.0
    # Only the pole test reads these; overflow there just means "not a pole".
    with np.errstate(over="ignore", invalid="ignore"):
        if t is EigType.TYPE1:
            num, den = np.sin(a * z), np.sin(b * z)
        else:
            num, den = np.cos(a * z), np.cos(b * z)
    out = np.empty_like(z)
    pole = np.abs(den) < _POLE_TOL
    regular = ~pole
    if regular.any():
        ratio = _sin_ratio if t is EigType.TYPE1 else _cos_ratio
        out[regular] = ratio(a, b, z[regular])
    if pole.any():
        if np.any(np.abs(num[pole]) >= _POLE_TOL):
            raise PoleError(f"rho relation has a pole at mu={z[pole][0]!r} (n={n}, {t.name})")
        zp = z[pole]
        if t is EigType.TYPE1:
            out[pole] = xi(n) * np.cos(a * zp) / np.cos(b * zp)
        else:
            out[pole] = xi(n) * np.sin(a * zp) / np.sin(b * zp)
    return complex(out[0]) if scalar else out


def exceptional_rhos(n: int) -> tuple[complex, ...]:
    x = xi(n)
    return (complex(-x), -1 + 0j, 0j, 1 + 0j, complex(x))


def is_exceptional_rho(n: int, rho: complex) -> bool:
    """True for the five values of rho excluded from the double-eigenvalue theorem."""
    return complex(rho) in exceptional_rhos(n)


def double_condition_residual(mu, rho: complex, n: int, t: EigType) -> float:
    """Residual of the repeated-eigenvalue condition for a type-``t`` eigenvalue.

    Type 1: ``|xi_n cos((n+1)mu/2) - rho cos((n-1)mu/2)|``;
    type 2 uses sines.  Zero (to rounding) iff the eigenvalue carried by
    ``mu`` is repeated.  At rho = +-xi_n the residual can vanish without a
    repeated eigenvalue; check :func:`is_exceptional_rho` before reading
    multiplicity into it.
    """
    n = check_dimension(n)
    t = EigType(t)
    rho = complex(rho)
    if rho in (-1 + 0j, 0j, 1 + 0j):
        raise ExcludedRhoError(f"double-eigenvalue condition undefined for rho={rho}")
    mu = complex(mu)
    f = np.cos if t is EigType.TYPE1 else np.sin
    a, b = (n + 1) / 2.0, (n - 1) / 2.0
    return float(abs(xi(n) * f(a * mu) - rho * f(b * mu)))


@dataclass(frozen=True)
class AsymptoticSpectrum:
    """Leading-order eigenvalues of K_n(rho) for large ``|rho|``.

    ``lambda0`` is the type-2 extraordinary eigenvalue, ``lambda1`` the
    type-1 one; the remaining ``n - 2`` eigenvalues tend to -1.
    """

    n: int
    rho: complex
    lambda0: complex
    lambda1: complex
    bulk_value: complex
    bulk_count: int

    def product(self) -> complex:
        return self.lambda0 * self.lambda1 * self.bulk_value**self.bulk_count


def asymptotic_spectrum(n: int, rho: complex) -> AsymptoticSpectrum:
    n = check_dimension(n)
    rho = complex(rho)
    top = 1.0 + 0j
    for _ in range(n - 1):
        top *= rho
    return AsymptoticSpectrum(n, rho, top, -top, -1.0 + 0j, n - 2)


def classify_eigenvalue(lam: complex, n: int, tol: float | None = None) -> EigClass:
    n = check_dimension(n)
    if tol is None:
        tol = borderline_band(n)
    if tol < 0:
        raise ValueError("tolerance must be non-negative")
    mag = abs(complex(lam))
    if abs(mag - n) <= tol:
        return EigClass.BORDERLINE
    return EigClass.EXTRAORDINARY if mag > n else EigClass.ORDINARY
