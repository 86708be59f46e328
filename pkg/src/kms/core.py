"""Matrix construction, complex literal I/O and scalar helpers.

Complex values are plain Python ``complex`` (a pair of 64-bit floats).
The text form used on the command line and in reports is ``a+bi``.
"""

from __future__ import annotations

import enum
import math
import re

import numpy as np

__all__ = [
    "EigType",
    "KmsError",
    "InvalidDimensionError",
    "ComplexFormatError",
    "build_kms",
    "signature_matrix",
    "xi",
    "dirichlet_ratio",
    "parse_complex",
    "format_complex",
    "check_dimension",
]


class KmsError(Exception):
    """Base class for all errors raised by this package."""


class InvalidDimensionError(KmsError, ValueError):
    pass


class ComplexFormatError(KmsError, ValueError):
    pass


class EigType(enum.IntEnum):
    """Eigenvalue family: type-1 (skew-symmetric eigenvector) or type-2 (symmetric)."""

    TYPE1 = 1
    TYPE2 = 2

    @classmethod
    def parse(cls, value) -> "EigType":
        if isinstance(value, EigType):
            return value
        text = str(value).strip().lower().removeprefix("type")
        try:
            return cls(int(text))
        except ValueError:
            raise ValueError(f"eigenvalue type must be 1 or 2, got {value!r}") from None

    def other(self) -> "EigType":
        return EigType.TYPE2 if self is EigType.TYPE1 else EigType.TYPE1


def check_dimension(n) -> int:
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {n!r}")
    return int(n)


def build_kms(n: int, rho: complex) -> np.ndarray:
    """Return the dense ``n x n`` matrix with entries ``rho**|j-k|``.

    Powers are formed by repeated multiplication so that no logarithm
    branch is involved.
    """
    n = check_dimension(n)
    powers = np.empty(n, dtype=complex)
    powers[0] = 1.0
    for m in range(1, n):
        powers[m] = powers[m - 1] * rho
    idx = np.arange(n)
    return powers[np.abs(idx[:, None] - idx[None, :])]


def signature_matrix(n: int) -> np.ndarray:
    """diag(1, -1, 1, ..., (-1)**(n-1))."""
    n = check_dimension(n)
    return np.diag((-1.0) ** np.arange(n))


def xi(n: int) -> float:
    """Threshold (n+1)/(n-1) where the type-1 borderline curve meets the positive axis."""
    n = check_dimension(n)
    return (n + 1) / (n - 1)


def dirichlet_ratio(n: int, x):
    """sin(n x) / sin(x) for real or complex ``x`` (scalar or array).

    The removable singularities at ``x = m*pi`` are filled with a short
    Taylor expansion about the nearest multiple of pi.
    """
    n = check_dimension(n)
    scalar = np.ndim(x) == 0
    z = np.atleast_1d(np.asarray(x, dtype=complex))
    out = np.empty_like(z)

    # sin(n (h + m pi)) / sin(h + m pi) = (-1)^(m (n-1)) sin(n h) / sin(h); working
    # with the reduced h keeps full relative accuracy next to the peaks.
    m = np.round(z.real / math.pi)
    h = z - m * math.pi
    sign = np.where((m * (n - 1)) % 2 == 0, 1.0, -1.0)
    near = np.abs(h) < 1e-5
    far = ~near
    if far.any():
        out[far] = sign[far] * _sin_ratio(float(n), 1.0, h[far])
    if near.any():
        hh = h[near] * h[near]
        out[near] = sign[near] * n * (1.0 - (n * n - 1) * hh / 6.0 + (n * n - 1) * (3 * n * n - 7) * hh * hh / 360.0)
    return complex(out[0]) if scalar else out


def _sin_ratio(a: float, b: float, z):
    """sin(a z) / sin(b z) for a, b > 0, safe against overflow for large |Im z|."""
    z = np.asarray(z, dtype=complex)
    big = np.abs(z.imag) * max(a, b) > 300.0
    if not big.any():
        return np.sin(a * z) / np.sin(b * z)
    out = np.empty_like(z)
    small = ~big
    out[small] = np.sin(a * z[small]) / np.sin(b * z[small])
    zb = z[big]
    # Factor out the dominant exponential of each sine.
    sgn = np.where(zb.imag >= 0, 1.0, -1.0)
    e_a = np.exp(2j * sgn * a * zb)
    e_b = np.exp(2j * sgn * b * zb)
    out[big] = np.exp(-1j * sgn * (a - b) * zb) * (1.0 - e_a) / (1.0 - e_b)
    return out


def _cos_ratio(a: float, b: float, z):
    """cos(a z) / cos(b z), same overflow handling as :func:`_sin_ratio`."""
    z = np.asarray(z, dtype=complex)
    big = np.abs(z.imag) * max(a, b) > 300.0
    if not big.any():
        return np.cos(a * z) / np.cos(b * z)
    out = np.empty_like(z)
    small = ~big
    out[small] = np.cos(a * z[small]) / np.cos(b * z[small])
    zb = z[big]
    sgn = np.where(zb.imag >= 0, 1.0, -1.0)
    e_a = np.exp(2j * sgn * a * zb)
    e_b = np.exp(2j * sgn * b * zb)
    out[big] = np.exp(-1j * sgn * (a - b) * zb) * (1.0 + e_a) / (1.0 + e_b)
    return out


_FLOAT = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_REAL_RE = re.compile(rf"^[+-]?{_FLOAT}$")
_IMAG_RE = re.compile(rf"^(?P<im>[+-]?(?:{_FLOAT})?)i$")
_FULL_RE = re.compile(rf"^(?P<re>[+-]?{_FLOAT})(?P<im>[+-](?:{_FLOAT})?)i$")


def _imag_value(text: str) -> float:
    if text in ("", "+"):
        return 1.0
    if text == "-":
        return -1.0
    return float(text)


def parse_complex(text: str) -> complex:
    """Parse ``"a+bi"``, ``"a-bi"``, ``"a"``, ``"bi"`` or ``"i"``.

    The unicode minus sign is accepted in place of ``-``.
    """
    s = str(text).strip().replace("\u2212", "-").replace(" ", "")
    if _REAL_RE.match(s):
        z = complex(float(s), 0.0)
    elif m := _IMAG_RE.match(s):
        z = complex(0.0, _imag_value(m.group("im")))
    elif m := _FULL_RE.match(s):
        z = complex(float(m.group("re")), _imag_value(m.group("im")))
    else:
        raise ComplexFormatError(f"cannot parse complex literal {text!r}")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ComplexFormatError(f"non-finite complex literal {text!r}")
    return z


def format_complex(z: complex, digits: int | None = None) -> str:
    """Format as ``a+bi``; with ``digits=None`` the text round-trips exactly."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ComplexFormatError(f"cannot format non-finite value {z!r}")
    if digits is None:
        re_text = repr(z.real)
        im_text = repr(abs(z.imag))
    else:
        re_text = f"{z.real:.{digits}f}"
        im_text = f"{abs(z.imag):.{digits}f}"
    sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
    return f"{re_text}{sign}{im_text}i"
