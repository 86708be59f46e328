"""Command-line entry point: ``kms <subcommand> [flags]``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .borderline import TracedCurve, trace_curve
from .core import EigType, KmsError, check_dimension, format_complex, parse_complex
from .relations import EigClass

__all__ = ["main", "run", "emit_curve_csv", "read_curve_csv", "emit_scan_csv", "CURVE_HEADER", "SCAN_HEADER"]

CURVE_HEADER = ("u", "v", "re_rho", "im_rho", "re_lambda", "im_lambda", "re_drho", "im_drho")
SCAN_HEADER = ("d", "mag_a", "mag_b", "re_a", "im_a", "re_b", "im_b")


class UsageError(Exception):
    pass


def _num(x) -> str:
    """Shortest text that parses back to the same double (at most 17 significant digits)."""
    x = float(x)
    if x == 0.0:
        return "0"
    s = repr(x)
    return s[:-2] if s.endswith(".0") else s


def _write_rows(sink, header, rows) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_num(x) for x in row])


def emit_curve_csv(curve: TracedCurve, sink) -> None:
    """One row per sample: u, v, rho, lambda and d rho / du split into real and imaginary parts."""
    if len(curve) == 0:
        raise ValueError("cannot emit an empty trace")
    rows = zip(
        curve.u, curve.v, curve.rho.real, curve.rho.imag,
        curve.lam.real, curve.lam.imag, curve.drho.real, curve.drho.imag,
    )
    _write_rows(sink, CURVE_HEADER, rows)


def read_curve_csv(source, t: EigType, n: int) -> TracedCurve:
    """Inverse of :func:`emit_curve_csv`."""
    reader = csv.reader(source)
    header = tuple(next(reader))
    if header != CURVE_HEADER:
        raise ValueError(f"unexpected header {header}")
    data = np.array([[float(x) for x in row] for row in reader], dtype=float)
    if data.size == 0:
        raise ValueError("no samples")
    c = data[:, 2::2] + 1j * data[:, 3::2]
    return TracedCurve(EigType(t), check_dimension(n), data[:, 0], data[:, 1], c[:, 0], c[:, 1], c[:, 2])


def emit_scan_csv(scan, sink) -> None:
    a, b = scan.pairs[:, 0], scan.pairs[:, 1]
    rows = zip(scan.distances, np.abs(a), np.abs(b), a.real, a.imag, b.real, b.imag)
    _write_rows(sink, SCAN_HEADER, rows)


def _json_num(x):
    x = float(x)
    return None if math.isnan(x) else x


def _dump(obj, out) -> None:
    out.write(json.dumps(obj, indent=2, ensure_ascii=True))
    out.write("\n")


# argparse value types; ArgumentTypeError becomes a usage error (exit 2).


def _dim(text: str) -> int:
    try:
        return check_dimension(int(text))
    except (ValueError, KmsError):
        raise argparse.ArgumentTypeError(f"dimension must be an integer >= 2, got {text!r}") from None


def _etype(text: str) -> EigType:
    try:
        return EigType.parse(text)
    except (ValueError, KmsError):
        raise argparse.ArgumentTypeError(f"type must be 1 or 2, got {text!r}") from None


def _cplx(text: str) -> complex:
    try:
        return parse_complex(text)
    except KmsError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _real(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return x


def _positive_int(lo: int):
    def conv(text: str) -> int:
        try:
            k = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if k < lo:
            raise argparse.ArgumentTypeError(f"must be at least {lo}, got {k}")
        return k

    return conv


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kms", description="Eigenvalue structure of the complex KMS matrix K_n(rho).")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("trace", help="sample a borderline curve as CSV")
    s.add_argument("--n", type=_dim, required=True)
    s.add_argument("--type", type=_etype, required=True)
    s.add_argument("--samples", type=_positive_int(16), default=2048, help="base grid size before refinement")
    s.add_argument("--out")

    s = sub.add_parser("cusps", help="cusps of a borderline curve as JSON")
    s.add_argument("--n", type=_dim, required=True)
    s.add_argument("--type", type=_etype, required=True)
    s.add_argument("--json", action="store_true", help="full precision instead of 5 decimals for rho0 and lambda0")

    s = sub.add_parser("classify", help="extraordinary counts [j1, j2] at rho")
    s.add_argument("--n", type=_dim, required=True)
    s.add_argument("--rho", type=_cplx, required=True)
    s.add_argument("--tol", type=_real, default=None, help="on-curve distance (default 1e-6)")

    s = sub.add_parser("spectrum", help="typed and classified eigenvalues")
    s.add_argument("--n", type=_dim, required=True)
    s.add_argument("--rho", type=_cplx, required=True)
    s.add_argument("--raw-roots", action="store_true", help="unclustered roots with type tags")

    s = sub.add_parser("scan", help="the two eigenvalues nearest modulus n along a line, as CSV")
    s.add_argument("--n", type=_dim, required=True)
    s.add_argument("--type", type=_etype, required=True)
    s.add_argument("--start", type=_cplx, required=True)
    s.add_argument("--dir", type=_cplx, required=True)
    s.add_argument("--from", dest="d_from", type=_real, default=None, help="default -0.1/n")
    s.add_argument("--to", dest="d_to", type=_real, default=None, help="default 0.1/n")
    s.add_argument("--steps", type=_positive_int(2), default=201)
    s.add_argument("--out")

    s = sub.add_parser("regions", help="labelled regions cut out by both curves, as JSON")
    s.add_argument("--n", type=_dim, required=True)
    s.add_argument("--resolution", type=_positive_int(8), default=200)

    s = sub.add_parser("verify", help="run invariant suites")
    s.add_argument("--suite", choices=["core", "curves", "cusps", "classify", "oracle", "all"], default="all")

    s = sub.add_parser("figure", help="SVG figure")
    s.add_argument("--id", choices=["curves", "phase", "parabola", "bifurcation"], required=True)
    s.add_argument("--n", type=_dim, required=True)
    s.add_argument("--type", type=_etype, default=None)
    s.add_argument("--near", type=_cplx, default=None, help="bifurcation: use the cusp nearest this rho")
    s.add_argument("--resolution", type=_positive_int(8), default=160, help="curves: region grid size")
    s.add_argument("--out")
    return p


def _cusp_json(c, digits):
    return {
        "type": int(c.type),
        "n": c.n,
        "u0": c.u0,
        "rho0": format_complex(c.rho0, digits),
        "lambda0": format_complex(c.lambda0, digits),
        "eta_abs": _json_num(c.eta_abs),
        "psi": _json_num(c.psi),
        "bisector_angle": _json_num(c.bisector_angle),
        "residuals": {k: _json_num(v) for k, v in c.residuals.items()},
    }


def _cmd_trace(a, out):
    emit_curve_csv(trace_curve(a.n, a.type, base_samples=a.samples), out)


def _cmd_cusps(a, out):
    from .singularities import find_cusps

    digits = None if a.json else 5
    _dump([_cusp_json(c, digits) for c in find_cusps(a.n, a.type)], out)


def _cmd_classify(a, out):
    from .classification import ON_CURVE_TOL, query_region

    q = query_region(a.n, a.rho, ON_CURVE_TOL if a.tol is None else a.tol)
    obj = {"j1": q.counts[0], "j2": q.counts[1]}
    if q.conjectural:
        obj["conjectural"] = True
    if q.oracle_fallback:
        obj["oracle_fallback"] = True
    _dump(obj, out)


def _cmd_spectrum(a, out):
    from .oracle import full_spectrum, spectrum_split

    if a.raw_roots:
        t1, t2 = spectrum_split(a.n, a.rho)
        obj = [{"value": format_complex(z), "type": 1} for z in t1]
        obj += [{"value": format_complex(z), "type": 2} for z in t2]
    else:
        rep = full_spectrum(a.n, a.rho)
        obj = [
            {
                "value": format_complex(e.value),
                "multiplicity": e.multiplicity,
                "type": int(e.type),
                "class": e.eig_class.value if isinstance(e.eig_class, EigClass) else str(e.eig_class),
            }
            for e in rep.entries
        ]
    _dump(obj, out)


def _cmd_scan(a, out):
    from .classification import scan_path

    h = 0.1 / a.n
    lo = -h if a.d_from is None else a.d_from
    hi = h if a.d_to is None else a.d_to
    if a.dir == 0:
        raise UsageError("kms scan: error: --dir must be non-zero")
    emit_scan_csv(scan_path(a.n, a.type, a.start, a.dir, (lo, hi), a.steps), out)


def _cmd_regions(a, out):
    from .classification import region_labels

    regs = region_labels(a.n, a.resolution)
    _dump(
        [
            {
                "representative": format_complex(r.representative),
                "label": list(r.label),
                "cells": r.cells,
                "unbounded": r.unbounded,
            }
            for r in regs
        ],
        out,
    )


def _cmd_verify(a, out):
    from .verify import run_suites

    results = run_suites(a.suite)
    for r in results:
        out.write(f"{'PASS' if r.passed else 'FAIL'} {r.suite}/{r.name} ({r.seconds:.1f}s) {r.detail}\n")
    failed = sum(not r.passed for r in results)
    out.write(f"{len(results) - failed} passed, {failed} failed\n")
    return 1 if failed else 0


def _cmd_figure(a, out):
    from .figures import FigureSpec, render_figure

    try:
        spec = FigureSpec(a.id, a.n, a.type, a.near, a.resolution)
    except ValueError as exc:
        raise UsageError(f"kms figure: error: {exc}") from None
    return render_figure(spec)


_COMMANDS = {
    "trace": _cmd_trace,
    "cusps": _cmd_cusps,
    "classify": _cmd_classify,
    "spectrum": _cmd_spectrum,
    "scan": _cmd_scan,
    "regions": _cmd_regions,
    "verify": _cmd_verify,
    "figure": _cmd_figure,
}


def run(argv, stdout=None, stderr=None) -> int:
    """Parse ``argv`` and dispatch; returns the exit code (0 ok, 1 numerical failure, 2 usage)."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = _parser()
    try:
        args = parser.parse_args(list(argv))
    except UsageError as exc:
        stderr.write(f"{parser.format_usage()}{exc}\n")
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    buf = io.StringIO(newline="")
    try:
        result = _COMMANDS[args.command](args, buf)
    except UsageError as exc:
        stderr.write(f"{exc}\n")
        return 2
    except (KmsError, ArithmeticError, np.linalg.LinAlgError, ValueError) as exc:
        stderr.write(f"kms {args.command}: {type(exc).__name__}: {exc}\n")
        return 1

    code = 0
    if isinstance(result, bytes):
        data = result
    else:
        data = buf.getvalue().encode("ascii")
        code = int(result or 0)
    out_path = getattr(args, "out", None)
    if out_path:
        with open(out_path, "wb") as fh:
            fh.write(data)
    else:
        target = getattr(stdout, "buffer", None)
        if target is not None:
            stdout.flush()
            target.write(data)
            target.flush()
        else:
            stdout.write(data.decode("utf-8"))
    return code


def main() -> None:
    try:
        code = run(sys.argv[1:])
    except BrokenPipeError:
        # The reader went away (e.g. piped into head); not an error of ours.
        sys.stderr.close()
        code = 0
    sys.exit(code)


if __name__ == "__main__":
    main()
