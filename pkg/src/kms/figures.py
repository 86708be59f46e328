"""Deterministic SVG figures: curves with region labels, borderline phase,
parabola overlay and bifurcation scans.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .borderline import b_curve, default_trace  # noqa: E402
from .classification import exterior_bisector, region_labels, scan_path  # noqa: E402
from .core import EigType, check_dimension, format_complex, xi  # noqa: E402
from .singularities import annotate_cusp, find_cusps, parabola_model  # noqa: E402

__all__ = ["FigureId", "FigureSpec", "emit_figure", "render_figure", "pick_cusp", "default_scan_range"]

_RC = {
    "svg.fonttype": "none",
    "svg.hashsalt": "kms",
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "axes.linewidth": 0.8,
    "lines.linewidth": 1.2,
    "path.simplify": False,
}


class FigureId(enum.Enum):
    CURVES = "curves"
    PHASE = "phase"
    PARABOLA = "parabola"
    BIFURCATION = "bifurcation"


@dataclass(frozen=True)
class FigureSpec:
    id: FigureId
    n: int
    type: EigType | None = None
    near: complex | None = None
    resolution: int = 160

    def __post_init__(self):
        object.__setattr__(self, "id", FigureId(self.id))
        object.__setattr__(self, "n", check_dimension(self.n))
        t = self.type
        if t is None:
            if self.id is FigureId.PHASE or self.id is FigureId.PARABOLA:
                t = EigType.TYPE1
            elif self.id is FigureId.BIFURCATION:
                raise ValueError("bifurcation figure needs an eigenvalue type")
        object.__setattr__(self, "type", None if t is None else EigType(t))


def pick_cusp(n: int, t: EigType, near: complex | None = None):
    """Detected cusp nearest ``near``; by default the first one with 0 < u0 < pi."""
    cusps = find_cusps(n, t, fit=False)
    if not cusps:
        raise ValueError(f"type-{int(t)} curve for n={n} has no cusps")
    if near is None:
        cusp = next(c for c in cusps if c.u0 > 0)
    else:
        cusp = min(cusps, key=lambda c: abs(c.rho0 - near))
    return annotate_cusp(cusp)


def default_scan_range(n: int) -> tuple[float, float]:
    h = 0.1 / n
    return (-h, h)


def _curves(ax, spec: FigureSpec) -> None:
    n = spec.n
    styles = {EigType.TYPE1: "-", EigType.TYPE2: "--"}
    for t in (EigType.TYPE1, EigType.TYPE2):
        p = default_trace(n, t).polyline()
        (line,) = ax.plot(p.real, p.imag, styles[t], color="black", lw=1.0, label=f"type {int(t)}")
        line.set_gid(f"curve-type{int(t)}")
    for k, reg in enumerate(region_labels(n, spec.resolution)):
        z = reg.representative
        txt = ax.text(z.real, z.imag, f"[{reg.label[0]},{reg.label[1]}]", ha="center", va="center", fontsize=7)
        txt.set_gid(f"label-{k}")
    ax.set_aspect("equal")
    ax.set_xlabel("Re rho")
    ax.set_ylabel("Im rho")
    ax.set_title(f"n = {n}")
    ax.legend(loc="upper right", fontsize=7, frameon=False)


def _phase(ax, spec: FigureSpec) -> None:
    n, t = spec.n, spec.type
    u = np.linspace(-math.pi, math.pi, 4001)
    phase = np.angle(b_curve(n, u, t))
    # Break the line at the 2 pi jumps.
    jumps = np.nonzero(np.abs(np.diff(phase)) > math.pi)[0]
    uu = np.insert(u, jumps + 1, np.nan)
    pp = np.insert(phase, jumps + 1, np.nan)
    (line,) = ax.plot(uu, pp, color="black")
    line.set_gid("phase")
    cusps = [c.u0 for c in find_cusps(n, t, fit=False)]
    if cusps:
        (marks,) = ax.plot(cusps, [math.pi] * len(cusps), "v", color="black", ms=4, ls="none")
        marks.set_gid("jump-markers")
    ax.set_xlim(-math.pi, math.pi)
    ax.set_ylim(-math.pi - 0.3, math.pi + 0.3)
    ax.set_xlabel("u")
    ax.set_ylabel("arg b(u)")
    ax.set_title(f"n = {n}, type {int(t)}")


def _parabola(ax, spec: FigureSpec) -> None:
    n, t = spec.n, spec.type
    model = parabola_model(n, t)
    trace = default_trace(n, t)
    sel = np.abs(trace.u) < 0.5
    order = np.argsort(trace.u[sel])
    rho = trace.rho[sel][order]
    (line,) = ax.plot(rho.real, rho.imag, "-", color="black")
    line.set_gid("curve")
    y = np.linspace(-1.0, 1.0, 401) * np.max(np.abs(rho.imag))
    sign = -1.0 if model.opening.value == "toward -x" else 1.0
    x = model.vertex + sign * y**2 / model.coefficient
    (par,) = ax.plot(x, y, "-.", color="black")
    par.set_gid("parabola")
    ax.plot([model.vertex], [0.0], "o", color="black", ms=3)
    ax.set_xlabel("Re rho")
    ax.set_ylabel("Im rho")
    ax.set_title(f"n = {n}, type {int(t)}, vertex {model.vertex:.6g}")


def _bifurcation(ax, spec: FigureSpec) -> None:
    n, t = spec.n, spec.type
    cusp = pick_cusp(n, t, spec.near)
    direction = exterior_bisector(cusp)
    scan = scan_path(n, t, cusp.rho0, direction, default_scan_range(n), 201)
    mags = scan.pair_magnitudes
    for k, style in enumerate(("-", "--")):
        (line,) = ax.plot(scan.distances, mags[:, k], style, color="black")
        line.set_gid(f"modulus-{'ab'[k]}")
    ax.axhline(n, color="gray", lw=0.6)
    ax.axvline(0.0, color="gray", lw=0.6)
    ax.set_xlabel("d")
    ax.set_ylabel("|lambda|")
    ax.set_title(f"n = {n}, type {int(t)}, C = {format_complex(cusp.rho0, 5)}")


_DRAW = {
    FigureId.CURVES: _curves,
    FigureId.PHASE: _phase,
    FigureId.PARABOLA: _parabola,
    FigureId.BIFURCATION: _bifurcation,
}


def render_figure(spec: FigureSpec) -> bytes:
    """SVG bytes for ``spec``; identical inputs give identical bytes."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5.0, 4.5))
        try:
            _DRAW[spec.id](ax, spec)
            fig.tight_layout()
            buf = io.BytesIO()
            fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
        finally:
            plt.close(fig)
    return buf.getvalue()


def emit_figure(spec: FigureSpec, sink) -> None:
    """Write the SVG to a path or a binary/text file object."""
    data = render_figure(spec)
    if isinstance(sink, (str, bytes)) or hasattr(sink, "__fspath__"):
        with open(sink, "wb") as fh:
            fh.write(data)
    elif isinstance(sink, io.TextIOBase):
        sink.write(data.decode("utf-8"))
    else:
        sink.write(data)
