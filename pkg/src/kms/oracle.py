"""Dense-spectrum ground truth for K_n(rho).

Nothing here uses the transcendental relations, so every curve, cusp and
count produced elsewhere can be checked against it.  Two routes exist:

* ``char_poly`` + ``poly_roots``: Faddeev-LeVerrier coefficients and
  Aberth-Ehrlich iteration on them.  Fine for small n and moderate |rho|.
* the default ``full_spectrum`` route: the matrix is folded onto its
  symmetric / skew-symmetric invariant subspaces and each half-size block
  is solved by the same Aberth iteration, with the Newton ratio
  ``p/p' = 1 / tr((z I - B)^-1)`` taken from the block itself.  This
  avoids monomial coefficients and stays accurate up to n ~ 100.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import EigType, KmsError, build_kms, check_dimension
from .relations import EigClass, classify_eigenvalue

__all__ = [
    "AmbiguousTypeError",
    "OracleConvergenceError",
    "CharPoly",
    "SpectrumEntry",
    "SpectrumReport",
    "char_poly",
    "poly_roots",
    "aberth",
    "cluster_roots",
    "fold_blocks",
    "block_eigenvalues",
    "spectrum_split",
    "full_spectrum",
    "extraordinary_counts",
]

_MAX_ITER = 500
_NOISE = 1e-11
_GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


class AmbiguousTypeError(KmsError, ValueError):
    pass


class OracleConvergenceError(KmsError, RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class CharPoly:
    """Monic characteristic polynomial, descending powers.

    ``coeffs`` belong to ``q(x) = det(x I - K / scale)``; the polynomial in
    lambda is ``p(lam) = scale**n * q(lam / scale)``.  ``scale`` is 1 except
    for large n with |rho| > 1, where it keeps the coefficients in range.
    """

    n: int
    rho: complex
    coeffs: np.ndarray
    scale: float = 1.0

    def __call__(self, lam) -> complex:
        return self.scale**self.n * np.polyval(self.coeffs, np.asarray(lam) / self.scale)

    def derivative(self, lam) -> complex:
        d = np.polyder(self.coeffs)
        return self.scale ** (self.n - 1) * np.polyval(d, np.asarray(lam) / self.scale)

    def eval_scale(self, lam) -> float:
        """Sum of |term| magnitudes, the natural scale for ``|p(lam)|``."""
        x = abs(complex(lam)) / self.scale
        powers = x ** np.arange(self.n, -1, -1)
        return float(self.scale**self.n * np.sum(np.abs(self.coeffs) * powers))

    def derivative_scale(self, lam) -> float:
        x = abs(complex(lam)) / self.scale
        k = np.arange(self.n, 0, -1)
        powers = x ** (k - 1)
        return float(self.scale ** (self.n - 1) * np.sum(np.abs(self.coeffs[:-1]) * k * powers))


def char_poly(n: int, rho: complex) -> CharPoly:
    """Coefficients of det(lam I - K_n(rho)) by the Faddeev-LeVerrier recurrence.

    The recurrence loses accuracy roughly like ``eps * max|lam|**k`` in the
    k-th coefficient; it is meant for n up to ~16 with |rho| up to ~4.
    Raises OverflowError when a coefficient leaves the float range.
    """
    n = check_dimension(n)
    rho = complex(rho)
    scale = 1.0
    if n > 60 and abs(rho) > 1.0:
        scale = abs(rho) ** (n - 1)
    a = build_kms(n, rho) / scale
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    m = np.zeros((n, n), dtype=complex)
    eye = np.eye(n)
    with np.errstate(over="raise", invalid="raise"):
        try:
            for k in range(1, n + 1):
                m = a @ m + coeffs[k - 1] * eye
                coeffs[k] = -np.trace(a @ m) / k
        except FloatingPointError as exc:
            raise OverflowError(f"characteristic polynomial of K_{n}({rho}) overflows") from exc
    if not np.all(np.isfinite(coeffs)):
        raise OverflowError(f"characteristic polynomial of K_{n}({rho}) overflows")
    return CharPoly(n, rho, coeffs, scale)


def aberth(newton_ratio, z0: np.ndarray, tol: float = 1e-14, max_iter: int = _MAX_ITER, floor: float = 0.0):
    """Aberth-Ehrlich simultaneous iteration.

    ``newton_ratio(z)`` must return ``p(z) / p'(z)`` elementwise (0 where
    ``z`` is an exact root).  A root is frozen once its correction is below
    ``tol * (1 + |z|)``, or below ``floor + _NOISE * (1 + |z|)`` without
    having halved since the previous step (it has reached the rounding
    floor of the ratio).  Returns ``(roots, converged)``.
    """
    z = np.array(z0, dtype=complex)
    m = len(z)
    active = np.ones(m, dtype=bool)
    last = np.full(m, np.inf)
    for _ in range(max_iter):
        idx = np.nonzero(active)[0]
        ratio = newton_ratio(z[idx])
        diff = z[idx, None] - z[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / diff
            inv[np.arange(len(idx)), idx] = 0.0
            inv[~np.isfinite(inv)] = 0.0
            corr = ratio / (1.0 - ratio * inv.sum(axis=1))
        corr[~np.isfinite(corr)] = 0.0
        z[idx] -= corr
        size = np.abs(corr)
        scale = 1.0 + np.abs(z[idx])
        stalled = (size <= floor + _NOISE * scale) & (size > 0.5 * last[idx])
        done = (size <= tol * scale) | stalled
        last[idx] = size
        active[idx[done]] = False
        if not active.any():
            return z, True
    return z, False


def _initial_circle(center: complex, radius: float, m: int) -> np.ndarray:
    angles = 2.0 * math.pi * np.arange(m) / m + 0.4
    return center + radius * np.exp(1j * angles)


def cluster_roots(roots, radius: float = 1e-6) -> list[tuple[complex, int]]:
    """Merge roots closer than ``radius * (1 + |root|)``; returns (mean, count) pairs."""
    roots = [complex(r) for r in roots]
    parent = list(range(len(roots)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i] - roots[j]) <= radius * (1.0 + abs(roots[i])):
                parent[find(i)] = find(j)
    groups: dict[int, list[complex]] = {}
    for i, r in enumerate(roots):
        groups.setdefault(find(i), []).append(r)
    out = [(complex(np.mean(g)), len(g)) for g in groups.values()]
    return sorted(out, key=lambda p: (p[0].real, p[0].imag))


def poly_roots(p: CharPoly, tol: float = 1e-14, cluster: bool = True):
    """All roots of ``p`` by Aberth-Ehrlich iteration.

    With ``cluster=True`` returns ``[(root, multiplicity), ...]``; otherwise
    the raw root array.
    """
    c = np.asarray(p.coeffs, dtype=complex)
    if c.ndim != 1 or len(c) < 2 or c[0] != 1:
        raise ValueError("poly_roots expects a monic polynomial of degree >= 1")
    deg = len(c) - 1
    dc = np.polyder(c)

    def ratio(z):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.polyval(c, z) / np.polyval(dc, z)

    with np.errstate(divide="ignore"):
        bounds = np.abs(c[1:]) ** (1.0 / np.arange(1, deg + 1))
    radius = 2.0 * float(np.max(bounds)) if np.any(bounds > 0) else 1.0
    center = -c[1] / deg
    roots, ok = aberth(ratio, _initial_circle(center, radius, deg), tol)
    if not ok:
        # Rounding noise can keep corrections above tol; accept roots whose
        # residual is small against the term magnitudes.
        terms = np.abs(roots)[:, None] ** np.arange(deg, -1, -1)[None, :]
        resid = np.abs(np.polyval(c, roots)) / (terms @ np.abs(c))
        if np.max(resid) > 1e-10:
            raise OracleConvergenceError("Aberth iteration on the polynomial did not converge")
    roots = roots * p.scale
    if not cluster:
        return roots
    return cluster_roots(roots)


def fold_blocks(n: int, rho: complex) -> tuple[np.ndarray, np.ndarray]:
    """Compress K_n(rho) onto its skew-symmetric and symmetric subspaces.

    Returns ``(skew_block, sym_block)`` of sizes floor(n/2) and ceil(n/2).
    Their spectra are the type-1 and type-2 eigenvalues respectively.
    """
    n = check_dimension(n)
    k = build_kms(n, rho)
    half = n // 2
    # With the orthonormal basis (e_j -+ e_{n-1-j}) / sqrt 2 and centrosymmetry,
    # the blocks are K[j, l] -+ K[j, n-1-l]; no rounding from the 1/sqrt 2 factors.
    top = k[:half, :half]
    flip = k[:half, n - half:][:, ::-1]
    skew = top - flip
    if n % 2 == 0:
        return skew, top + flip
    m = half
    sym = np.empty((m + 1, m + 1), dtype=complex)
    sym[:m, :m] = top + flip
    col = math.sqrt(2.0) * k[:m, m]
    sym[:m, m] = col
    sym[m, :m] = col
    sym[m, m] = k[m, m]
    return skew, sym


def block_eigenvalues(b: np.ndarray, tol: float = 1e-14, z0=None) -> np.ndarray:
    """Eigenvalues of a small dense matrix by Aberth iteration on det(z I - B).

    ``z0`` optionally supplies starting values (e.g. the roots at a nearby
    parameter); by default they lie on a circle enclosing the Gershgorin discs.
    """
    b = np.asarray(b, dtype=complex)
    m = b.shape[0]
    if m == 1 or not np.any(b - np.diag(np.diag(b))):
        return np.diag(b).copy()
    eye = np.eye(m)

    def ratio(z):
        shifted = z[:, None, None] * eye - b[None, :, :]
        try:
            tr = np.trace(np.linalg.inv(shifted), axis1=1, axis2=2)
        except np.linalg.LinAlgError:
            tr = np.empty(len(z), dtype=complex)
            for i, mat in enumerate(shifted):
                try:
                    tr[i] = np.trace(np.linalg.inv(mat))
                except np.linalg.LinAlgError:
                    tr[i] = np.inf
        with np.errstate(divide="ignore", invalid="ignore"):
            out = 1.0 / tr
        out[~np.isfinite(out)] = 0.0
        return out

    # The inverse trace is only good to rounding relative to the block norm.
    norm_inf = float(np.max(np.sum(np.abs(b), axis=1)))
    if z0 is None:
        # Spectra mix one huge eigenvalue with an O(1) bulk, so spread the
        # starts over log-spaced radii instead of one enclosing circle.
        radii = np.geomspace(min(1e-2, norm_inf), max(norm_inf, 1e-2), m)
        z0 = radii * np.exp(1j * (0.4 + _GOLDEN_ANGLE * np.arange(m)))
    else:
        z0 = np.array(z0, dtype=complex)
        if z0.shape != (m,):
            raise ValueError(f"need {m} starting values, got {z0.shape}")
        # Coincident starts stall the Aberth correction.
        z0 = z0 + 1e-7 * (1.0 + np.abs(z0)) * np.exp(1j * (0.4 + np.arange(m)))
    roots, ok = aberth(ratio, z0, tol, floor=1e-12 * norm_inf)
    if not ok:
        # Defective double roots converge only linearly; accept anything whose
        # smallest singular value is at rounding level.
        norm = np.linalg.norm(b, 2)
        sv = np.array([np.linalg.svd(z * eye - b, compute_uv=False)[-1] for z in roots])
        if np.max(sv) > 1e-6 * (1.0 + norm):
            raise OracleConvergenceError("Aberth iteration on the block did not converge")
    return roots


def spectrum_split(n: int, rho: complex) -> tuple[np.ndarray, np.ndarray]:
    """Raw (unclustered) type-1 and type-2 eigenvalues of K_n(rho)."""
    skew, sym = fold_blocks(n, rho)
    return block_eigenvalues(skew), block_eigenvalues(sym)


@dataclass(frozen=True)
class SpectrumEntry:
    value: complex
    multiplicity: int
    type: EigType
    eig_class: EigClass


@dataclass(frozen=True)
class SpectrumReport:
    n: int
    rho: complex
    entries: list[SpectrumEntry] = field(default_factory=list)

    def values(self) -> np.ndarray:
        """All eigenvalues with multiplicity repeated."""
        return np.array([e.value for e in self.entries for _ in range(e.multiplicity)])

    def count(self, t: EigType, eig_class: EigClass = EigClass.EXTRAORDINARY) -> int:
        return sum(e.multiplicity for e in self.entries if e.type == t and e.eig_class == eig_class)

    def repeated(self) -> list[SpectrumEntry]:
        return [e for e in self.entries if e.multiplicity > 1]


def full_spectrum(
    n: int,
    rho: complex,
    tol: float | None = None,
    method: str = "blocks",
    cluster_radius: float = 1e-6,
) -> SpectrumReport:
    """Type-tagged, class-tagged spectrum of K_n(rho).

    ``method="blocks"`` (default) solves the folded blocks directly.
    ``method="charpoly"`` finds all roots of the LeVerrier polynomial and
    assigns each to the block whose eigenvalue lies nearest; a root that
    sits within ``cluster_radius`` of both blocks raises
    :class:`AmbiguousTypeError`.  ``tol`` is the borderline band passed to
    :func:`classify_eigenvalue`.
    """
    n = check_dimension(n)
    rho = complex(rho)
    t1, t2 = spectrum_split(n, rho)
    if method == "blocks":
        typed = [(z, EigType.TYPE1) for z in t1] + [(z, EigType.TYPE2) for z in t2]
    elif method == "charpoly":
        typed = _match_types(poly_roots(char_poly(n, rho), cluster=False), t1, t2, cluster_radius)
    else:
        raise ValueError(f"unknown method {method!r}")

    entries = []
    for t in (EigType.TYPE1, EigType.TYPE2):
        vals = [z for z, typ in typed if typ is t]
        for value, mult in cluster_roots(vals, cluster_radius):
            entries.append(SpectrumEntry(value, mult, t, classify_eigenvalue(value, n, tol)))
    return SpectrumReport(n, rho, entries)


def _match_types(roots, t1, t2, radius):
    n = len(t1) + len(t2)
    typed = []
    pool = {EigType.TYPE1: list(t1), EigType.TYPE2: list(t2)}
    for z in sorted(roots, key=abs, reverse=True):
        d = {t: min((abs(z - w) for w in pool[t]), default=math.inf) for t in pool}
        if max(d.values()) <= radius * (1.0 + abs(z)) and abs(z + n) > radius * n:
            raise AmbiguousTypeError(f"eigenvalue {z} matches both blocks")
        t = min(d, key=d.get)
        k = int(np.argmin([abs(z - w) for w in pool[t]]))
        pool[t].pop(k)
        typed.append((complex(z), t))
    return typed


def extraordinary_counts(n: int, rho: complex) -> tuple[int, int]:
    """Oracle count of eigenvalues with |lambda| > n, per type."""
    t1, t2 = spectrum_split(n, rho)
    return int(np.sum(np.abs(t1) > n)), int(np.sum(np.abs(t2) > n))
