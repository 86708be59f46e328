"""Extraordinary-eigenvalue counts from position relative to the borderline curves.

For each type k the count j_k(rho) is 0 in the component of the plane
(off the type-k curve) that contains the origin, 0 on the curve itself and
1 in the unbounded component.  Membership is decided by the winding number
of the traced polyline.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .borderline import TracedCurve, default_trace
from .core import EigType, KmsError, check_dimension, xi
from .oracle import OracleConvergenceError, block_eigenvalues, extraordinary_counts, fold_blocks

__all__ = [
    "Membership",
    "RegionQuery",
    "Region",
    "ScanResult",
    "OnCurveError",
    "AmbiguousRegionError",
    "winding_number",
    "winding_numbers",
    "segment_distance",
    "query_region",
    "count_extraordinary",
    "count_grid",
    "table1_counts",
    "real_axis_crossings",
    "region_labels",
    "scan_path",
    "exterior_bisector",
]

ON_CURVE_TOL = 1e-6
WINDING_TOL = 1e-9
_CHUNK = 1 << 21


class OnCurveError(KmsError, ValueError):
    pass


class AmbiguousRegionError(KmsError, RuntimeError):
    pass


class Membership(enum.Enum):
    INTERIOR = "interior"
    ON_CURVE = "on_curve"
    EXTERIOR = "exterior"
    OTHER = "other"


@dataclass(frozen=True)
class RegionQuery:
    """Per-type membership and counts at one rho.

    ``conjectural`` marks counts that rely on the curve being a Jordan curve
    (on-curve points); ``oracle_fallback`` marks points that landed in a
    component other than the origin's or the unbounded one, where the dense
    spectrum supplied the count.
    """

    rho: complex
    n: int
    membership: tuple[Membership, Membership]
    counts: tuple[int, int]
    conjectural: bool = False
    oracle_fallback: bool = False


@dataclass(frozen=True)
class Region:
    representative: complex
    label: tuple[int, int]
    cells: int
    unbounded: bool


@dataclass(frozen=True)
class ScanResult:
    n: int
    type: EigType
    start: complex
    direction: complex
    distances: np.ndarray
    pairs: np.ndarray  # (steps, 2) complex, ordered by decreasing modulus

    @property
    def pair_magnitudes(self) -> np.ndarray:
        return np.abs(self.pairs)


def _segments(curve: TracedCurve) -> tuple[np.ndarray, np.ndarray]:
    p = curve.polyline()
    return p[:-1], p[1:]


def _chunks(count: int, width: int):
    step = max(1, _CHUNK // max(width, 1))
    for lo in range(0, count, step):
        yield slice(lo, min(count, lo + step))


def segment_distance(points, curve: TracedCurve) -> np.ndarray:
    """Distance from each point to the closed polyline of ``curve``."""
    z = np.atleast_1d(np.asarray(points, dtype=complex))
    a, b = _segments(curve)
    ab = b - a
    len2 = np.abs(ab) ** 2
    len2[len2 == 0] = 1.0
    out = np.empty(len(z))
    for sl in _chunks(len(z), len(a)):
        rel = z[sl, None] - a[None, :]
        t = np.clip((rel * np.conj(ab)).real / len2, 0.0, 1.0)
        out[sl] = np.min(np.abs(rel - t * ab), axis=1)
    return out


def winding_numbers(points, curve: TracedCurve) -> np.ndarray:
    """Winding numbers of the closed polyline around each point (crossing-rule form)."""
    z = np.atleast_1d(np.asarray(points, dtype=complex))
    a, b = _segments(curve)
    out = np.zeros(len(z), dtype=int)
    for sl in _chunks(len(z), len(a)):
        x, y = z[sl].real[:, None], z[sl].imag[:, None]
        ay, by = a.imag[None, :], b.imag[None, :]
        left = (b.real - a.real)[None, :] * (y - ay) - (x - a.real[None, :]) * (by - ay)
        up = (ay <= y) & (by > y) & (left > 0)
        down = (ay > y) & (by <= y) & (left < 0)
        out[sl] = up.sum(axis=1) - down.sum(axis=1)
    return out


def winding_number(rho: complex, curve: TracedCurve, tol: float = WINDING_TOL) -> int:
    """Winding number of the traced curve around ``rho``.

    Raises :class:`OnCurveError` when ``rho`` is within ``tol`` of the polyline.
    """
    d = float(segment_distance(rho, curve)[0])
    if d < tol:
        raise OnCurveError(f"rho={rho} lies within {d:.3g} of the type-{int(curve.type)} curve")
    return int(winding_numbers(rho, curve)[0])


def _origin_winding(curve: TracedCurve) -> int:
    return int(winding_numbers(0j, curve)[0])


def _membership(n: int, w: np.ndarray, dist: np.ndarray, curve: TracedCurve, tol: float):
    w0 = _origin_winding(curve)
    mem = np.full(len(w), Membership.OTHER, dtype=object)
    mem[w == 0] = Membership.EXTERIOR
    if w0 != 0:
        mem[w == w0] = Membership.INTERIOR
    mem[dist < tol] = Membership.ON_CURVE
    return mem


_COUNT = {Membership.INTERIOR: 0, Membership.ON_CURVE: 0, Membership.EXTERIOR: 1}


def count_grid(n: int, rhos, tol: float = ON_CURVE_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Counts ``(j, flags)`` for many rho at once; ``j`` has shape (len, 2).

    ``flags`` is 1 where an oracle fallback was needed.
    """
    n = check_dimension(n)
    z = np.atleast_1d(np.asarray(rhos, dtype=complex))
    counts = np.zeros((len(z), 2), dtype=int)
    flags = np.zeros(len(z), dtype=int)
    for col, t in enumerate((EigType.TYPE1, EigType.TYPE2)):
        curve = default_trace(n, t)
        mem = _membership(n, winding_numbers(z, curve), segment_distance(z, curve), curve, tol)
        for i, m in enumerate(mem):
            if m is Membership.OTHER:
                counts[i, col] = extraordinary_counts(n, z[i])[col]
                flags[i] = 1
            else:
                counts[i, col] = _COUNT[m]
    return counts, flags


def query_region(n: int, rho: complex, tol: float = ON_CURVE_TOL) -> RegionQuery:
    n = check_dimension(n)
    rho = complex(rho)
    mems, counts = [], []
    fallback = False
    for col, t in enumerate((EigType.TYPE1, EigType.TYPE2)):
        curve = default_trace(n, t)
        m = _membership(
            n, winding_numbers(rho, curve), segment_distance(rho, curve), curve, tol
        )[0]
        mems.append(m)
        if m is Membership.OTHER:
            counts.append(extraordinary_counts(n, rho)[col])
            fallback = True
        else:
            counts.append(_COUNT[m])
    conjectural = Membership.ON_CURVE in mems
    return RegionQuery(rho, n, tuple(mems), tuple(counts), conjectural, fallback)


def count_extraordinary(n: int, rho: complex, tol: float = ON_CURVE_TOL) -> tuple[int, int]:
    """Numbers ``(j1, j2)`` of type-1 and type-2 eigenvalues with ``|lambda| > n``."""
    return query_region(n, rho, tol).counts


def table1_counts(n: int, rho: float) -> tuple[int, int]:
    """Extraordinary counts for real rho from the closed-form case table."""
    n = check_dimension(n)
    rho = float(rho)
    x = xi(n)
    if rho < -x or rho > x:
        return (1, 1)
    if rho < -1.0:
        return (1, 0) if n % 2 == 0 else (0, 1)
    if rho <= 1.0:
        return (0, 0)
    return (0, 1)


def real_axis_crossings(n: int) -> tuple[float, float, float, float]:
    """The four real rho where a borderline curve meets the axis."""
    x = xi(n)
    return (-x, -1.0, 1.0, x)


def region_labels(
    n: int, grid_resolution: int = 200, tol: float = ON_CURVE_TOL, margin: float = 0.1
) -> list[Region]:
    """Label the connected regions cut out by the two curves.

    A square grid over the padded bounding box is split into cells near a
    curve (within half a cell diagonal) and free cells; free cells are
    grouped by 4-connectivity.  Every free cell is counted and a region
    whose cells disagree raises :class:`AmbiguousRegionError`.
    """
    n = check_dimension(n)
    if grid_resolution < 8:
        raise ValueError("grid_resolution must be at least 8")
    curves = [default_trace(n, t) for t in (EigType.TYPE1, EigType.TYPE2)]
    boxes = np.array([c.bbox() for c in curves])
    lo_x, hi_x = boxes[:, 0].min(), boxes[:, 1].max()
    lo_y, hi_y = boxes[:, 2].min(), boxes[:, 3].max()
    span = max(hi_x - lo_x, hi_y - lo_y) * (1.0 + 2.0 * margin)
    cx, cy = 0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y)
    axis = (np.arange(grid_resolution) + 0.5) / grid_resolution - 0.5
    xs, ys = cx + span * axis, cy + span * axis
    h = span / grid_resolution
    grid = xs[None, :] + 1j * ys[:, None]
    flat = grid.ravel()

    dist = np.min([segment_distance(flat, c) for c in curves], axis=0)
    free = (dist > 0.5 * math.sqrt(2.0) * h).reshape(grid.shape)
    labels, count = ndimage.label(free)
    if count == 0:
        raise AmbiguousRegionError("grid resolution too coarse: no free cells")
    cells = np.nonzero(free.ravel())[0]
    j, _ = count_grid(n, flat[cells], tol)
    comp = labels.ravel()[cells]

    border = set(np.unique(np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]])))
    regions = []
    for k in range(1, count + 1):
        mask = comp == k
        codes = np.unique(j[mask, 0] * 2 + j[mask, 1])
        if len(codes) != 1:
            raise AmbiguousRegionError(
                f"region {k} mixes labels {sorted(codes.tolist())}; increase grid_resolution"
            )
        idx = cells[mask]
        rep = flat[idx[np.argmax(dist[idx])]]
        label = (int(codes[0] // 2), int(codes[0] % 2))
        regions.append(Region(complex(rep), label, int(mask.sum()), k in border))
    return sorted(regions, key=lambda r: (r.representative.real, r.representative.imag))


def exterior_bisector(cusp, step: float = 1e-3) -> complex:
    """Unit vector along the cusp's local bisector, oriented toward the exterior.

    ``cusp`` is a CuspReport with a fitted ``bisector_angle``.
    """
    if math.isnan(cusp.bisector_angle):
        raise ValueError("cusp has no fitted bisector")
    curve = default_trace(cusp.n, cusp.type)
    e = complex(math.cos(cusp.bisector_angle), math.sin(cusp.bisector_angle))
    probes = np.array([cusp.rho0 + step * e, cusp.rho0 - step * e])
    mem = _membership(
        cusp.n, winding_numbers(probes, curve), segment_distance(probes, curve), curve, ON_CURVE_TOL
    )
    if mem[0] is Membership.EXTERIOR and mem[1] is not Membership.EXTERIOR:
        return e
    if mem[1] is Membership.EXTERIOR and mem[0] is not Membership.EXTERIOR:
        return -e
    raise AmbiguousRegionError(f"bisector at {cusp.rho0} does not separate interior and exterior")


def _pick_pair(roots: np.ndarray, n: int) -> np.ndarray:
    mags = np.abs(roots)
    order = np.lexsort((-mags, np.abs(mags - n)))
    pair = roots[order[:2]]
    return pair[np.argsort(-np.abs(pair), kind="stable")]


def scan_path(
    n: int,
    t: EigType,
    start: complex,
    direction: complex,
    d_range: tuple[float, float],
    steps: int,
) -> ScanResult:
    """Follow rho = start + d * direction and record the two type-t eigenvalues nearest modulus n.

    Eigenvalues are ranked by ``| |lambda| - n |`` with ties going to the
    larger modulus; each recorded pair is ordered by decreasing modulus.
    """
    n = check_dimension(n)
    t = EigType(t)
    if steps < 2:
        raise ValueError("steps must be at least 2")
    direction = complex(direction)
    if direction == 0:
        raise ValueError("direction must be non-zero")
    direction /= abs(direction)
    lo, hi = map(float, d_range)
    d = np.linspace(lo, hi, int(steps))
    size = n // 2 if t is EigType.TYPE1 else n - n // 2
    if size < 2:
        raise ValueError(f"type-{int(t)} block of K_{n} has fewer than two eigenvalues")
    pairs = np.empty((len(d), 2), dtype=complex)
    prev = None
    for i, dd in enumerate(d):
        block = fold_blocks(n, complex(start) + dd * direction)[int(t) - 1]
        # Continue from the previous step's roots; fall back to a cold start.
        try:
            roots = block_eigenvalues(block, z0=prev)
        except OracleConvergenceError:
            if prev is None:
                raise
            roots = block_eigenvalues(block)
        prev = roots
        pairs[i] = _pick_pair(np.asarray(roots), n)
    return ScanResult(n, t, complex(start), direction, d, pairs)
