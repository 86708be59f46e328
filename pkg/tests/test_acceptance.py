"""Acceptance criteria, each at its stated tolerance; one PASS/FAIL line per criterion."""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from kms.borderline import default_trace, f_curve, trace_curve
from kms.classification import count_extraordinary, count_grid, exterior_bisector, scan_path, segment_distance
from kms.core import EigType
from kms.oracle import extraordinary_counts, full_spectrum
from kms.singularities import annotate_cusp, find_cusps, parabola_model, small_u_series, verify_double
from reference_values import (
    PRINTED_CUSP_5_TYPE1,
    PRINTED_CUSP_7_TYPE1,
    PRINTED_CUSP_95_TYPE2,
    PRINTED_CUSPS_6_TYPE2_A,
    PRINTED_CUSPS_6_TYPE2_B,
    PRINTED_FAR_ORDINARY,
    axis_values,
    table_row,
)

T1, T2 = EigType.TYPE1, EigType.TYPE2


def _nearest(cusps, target):
    return min(abs(c.rho0 - target) for c in cusps)


def test_1_axis_crossings(accept):
    worst, slowest, stray = 0.0, 0.0, 0
    for n in range(2, 13):
        t0 = time.perf_counter()
        for t, (at0, atpi) in zip((T1, T2), axis_values(n)):
            worst = max(
                worst,
                abs(f_curve(n, 0.0, t) - at0),
                abs(f_curve(n, math.pi, t) - atpi),
                abs(f_curve(n, -math.pi, t) - atpi),
            )
            # Im(rho) keeps one sign on each open half of the curve.
            c = trace_curve(n, t)
            inner = (np.abs(c.u) > 1e-9) & (math.pi - np.abs(c.u) > 1e-9)
            s = np.sign(c.rho.imag[inner]) * np.sign(c.u[inner])
            stray += int(np.sum(s != s[0]))
        slowest = max(slowest, time.perf_counter() - t0)
    ok = worst <= 1e-10 and stray == 0 and slowest < 1.0
    accept("1 axis crossings n=2..12", ok, f"max error {worst:.1e}, other crossings {stray}, slowest n {slowest:.2f}s")


def test_2a_cusp_n5(accept):
    cusps = find_cusps(5, T1)
    d = max(_nearest(cusps, z) for z in PRINTED_CUSP_5_TYPE1)
    on_axis = [c for c in cusps if abs(c.rho0.real) < 1e-8]
    ok = d <= 1e-8 and len(on_axis) == 2
    accept("2a cusps n=5 type 1 at +-2i", ok, f"distance {d:.1e}, cusps on the imaginary axis {len(on_axis)}")


def test_2b_cusp_n7(accept):
    d = _nearest(find_cusps(7, T1), PRINTED_CUSP_7_TYPE1)
    accept("2b cusp n=7 type 1 at 0.77570-1.49222i", d <= 5e-5, f"distance {d:.1e}")


def test_2c_cusps_n6_first_pair(accept):
    cusps = find_cusps(6, T2)
    d = max(_nearest(cusps, z) for z in PRINTED_CUSPS_6_TYPE2_A)
    accept("2c cusps n=6 type 2 at 1.31+-1.12i", d <= 5e-3, f"distance {d:.1e}")


def test_2d_cusps_n6_second_pair(accept):
    cusps = find_cusps(6, T2)
    d = max(_nearest(cusps, z) for z in PRINTED_CUSPS_6_TYPE2_B)
    found = sorted((c.rho0 for c in cusps), key=lambda z: (z.real, z.imag))
    accept(
        "2d cusps n=6 type 2 at 0.51+-1.74i",
        d <= 5e-3,
        f"distance {d:.1e}; detected {', '.join(f'{z:.5f}' for z in found)}",
    )


@pytest.fixture(scope="module")
def cusps95():
    t0 = time.perf_counter()
    cusps = find_cusps(95, T2)
    return cusps, time.perf_counter() - t0


def test_2e_cusp_n95(accept, cusps95):
    cusps, _ = cusps95
    d = _nearest(cusps, PRINTED_CUSP_95_TYPE2)
    best = min(cusps, key=lambda c: abs(c.rho0 - PRINTED_CUSP_95_TYPE2)).rho0
    accept("2e cusp n=95 type 2 at 1.06795i", d <= 5e-6, f"distance {d:.1e} (nearest {best:.10f})")


def test_2f_cusp_n95_runtime(accept, cusps95):
    _, elapsed = cusps95
    accept("2f cusp search n=95 under 60 s", elapsed < 60.0, f"{elapsed:.1f}s")


def _off_curve(n, z, gap):
    d = np.minimum(segment_distance(z, default_trace(n, T1)), segment_distance(z, default_trace(n, T2)))
    return z[d > gap]


def test_3_double_equivalence(accept):
    worst, cusp_count = 0.0, 0
    for n in range(3, 11):
        for t in (T1, T2):
            for c in find_cusps(n, t, fit=False):
                chk = verify_double(n, c.rho0)
                worst = max(worst, chk.p_at, chk.dp_at)
                cusp_count += 1
    rng = np.random.default_rng(3)
    extra = 0
    for n in range(3, 11):
        z = _off_curve(n, 3.0 * np.sqrt(rng.uniform(size=40)) * np.exp(2j * np.pi * rng.uniform(size=40)), 1e-3)
        for rho in z[:25]:
            extra += len(full_spectrum(n, rho).repeated())
    ok = worst < 1e-6 and extra == 0
    accept("3 double-eigenvalue equivalence", ok, f"{cusp_count} cusps, max scaled residual {worst:.1e}, "
           f"repeated roots off the cusps {extra}")


def test_4_counting_agreement(accept):
    rng = np.random.default_rng(4)
    t0 = time.perf_counter()
    mismatches, used = 0, 0
    for n in range(3, 11):
        z = 3.0 * np.sqrt(rng.uniform(size=1100)) * np.exp(2j * np.pi * rng.uniform(size=1100))
        z = _off_curve(n, z, 1e-3)[:1000]
        j, _ = count_grid(n, z)
        for k, rho in enumerate(z):
            mismatches += int(tuple(j[k]) != extraordinary_counts(n, rho))
        used += len(z)
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 120.0
    accept("4 winding counts vs oracle", ok, f"{mismatches} mismatches over {used} points, {elapsed:.1f}s")


def test_5_real_axis_table(accept):
    x = np.linspace(-3.0, 3.0, 200)
    bad = 0
    for n in range(2, 11):
        j, _ = count_grid(n, x.astype(complex))
        for k, r in enumerate(x):
            want = table_row(n, r)
            bad += int(tuple(j[k]) != want) + int(extraordinary_counts(n, r) != want)
    accept("5 real-axis table n=2..10", bad == 0, f"{bad} mismatches over {200 * 9} points (winding and oracle)")


def test_6_asymptotics(accept):
    n, rho = 6, 15 + 12j
    rep = full_spectrum(n, rho)
    extra = sorted((e.value for e in rep.entries if abs(e.value) > n), key=lambda z: z.real)
    ordinary = [e.value for e in rep.entries if abs(e.value) <= n]
    lead = (rho ** (n - 1)).real

    def sig3(x):
        return float(f"{x:.3g}")

    real_ok = len(extra) == 2 and sig3(extra[0].real) == sig3(-abs(lead)) and sig3(extra[1].real) == sig3(abs(lead))
    far = max(ordinary, key=lambda z: abs(z + 1))
    far_ok = round(far.real, 2) == PRINTED_FAR_ORDINARY.real and round(far.imag, 2) == PRINTED_FAR_ORDINARY.imag
    accept(
        "6 asymptotics n=6 rho=15+12i",
        real_ok and far_ok,
        f"Re extraordinary {extra[0].real:.6g}, {extra[1].real:.6g} vs +-{abs(lead):.6g}; furthest ordinary {far:.4f}",
    )


def _cusp_near(n, t, target):
    c = min(find_cusps(n, t, fit=False), key=lambda c: abs(c.rho0 - target))
    return annotate_cusp(c)


def test_7a_scan_n7(accept):
    n = 7
    cusp = _cusp_near(n, T1, PRINTED_CUSP_7_TYPE1)
    scan = scan_path(n, T1, cusp.rho0, exterior_bisector(cusp), (-0.1 / n, 0.1 / n), 201)
    mags = scan.pair_magnitudes
    mid = mags[100]
    pos = mags[scan.distances > 0]
    at_zero = float(np.max(np.abs(mid - n)))
    one_above = bool(np.all(np.sum(pos > n, axis=1) == 1))
    ok = at_zero <= 1e-4 and one_above
    accept("7a scan n=7 type 1", ok, f"|mag - 7| at d=0 {at_zero:.1e}, exactly one above 7 for all d>0: {one_above}")


def test_7b_scan_n95(accept):
    n = 95
    cusp = _cusp_near(n, T2, PRINTED_CUSP_95_TYPE2)
    # The imaginary axis underlies the bisector; orient it toward the exterior.
    e = exterior_bisector(cusp)
    direction = 1j if e.imag > 0 else -1j
    scan = scan_path(n, T2, cusp.rho0, direction, (-0.1 / n, 0.1 / n), 201)
    neg, pos = scan.pairs[scan.distances < 0], scan.pairs[scan.distances > 0]
    mneg = np.abs(neg)
    coincide = float(np.max(np.abs(mneg[:, 0] - mneg[:, 1]) / mneg[:, 0]))
    imag = float(np.max(np.abs(pos.imag) / np.abs(pos)))
    negative = bool(np.all(pos.real < 0))
    distinct = bool(np.all(np.abs(pos[:, 0] - pos[:, 1]) > 0))
    ok = coincide < 1e-8 and imag < 1e-8 and negative and distinct and abs(e.real) < 1e-3
    accept(
        "7b scan n=95 type 2",
        ok,
        f"d<0 magnitude gap {coincide:.1e}; d>0 max |Im|/|lambda| {imag:.1e}, negative {negative}, distinct {distinct}",
    )


def test_8_series_and_parabola(accept):
    worst = math.inf
    for n in range(3, 11):
        for t in (T1, T2):
            u, errs = 0.08, []
            for _ in range(4):
                errs.append(abs(small_u_series(n, u, t) - f_curve(n, u, t)))
                u /= 2
            worst = min(worst, min(errs[k] / errs[k + 1] for k in range(3)))
    model = parabola_model(7, T1)
    c = default_trace(7, T1)
    sel = (np.abs(c.u) < 0.1) & (c.rho.imag != 0)
    y2 = c.rho.imag[sel] ** 2
    par = float(np.max(np.abs(y2 - model.y_squared(c.rho.real[sel])) / y2))
    ok = worst >= 32 and par < 0.05
    accept("8 series order and parabola", ok, f"smallest halving ratio {worst:.1f}, parabola error {par:.1e}")


@pytest.mark.slow
def test_9_verify_all(accept):
    t0 = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "kms.cli", "verify", "--suite", "all"], capture_output=True, text=True
    )
    elapsed = time.perf_counter() - t0
    failed = [line for line in proc.stdout.splitlines() if line.startswith("FAIL")]
    ok = proc.returncode == 0 and elapsed < 300.0
    detail = f"exit {proc.returncode}, {elapsed:.0f}s"
    if failed:
        detail += "; " + "; ".join(f.split(" (")[0] for f in failed)
    accept("9 kms verify --suite all", ok, detail)
