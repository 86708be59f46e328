"""Invariant suites behind ``kms verify``.

Each check is a function returning ``(passed, detail)``; checks are grouped
into suites and run with a fixed seed so that results are reproducible.
"""

from __future__ import annotations

import functools
import io
import math
import time
from dataclasses import dataclass

import numpy as np

from .borderline import b_curve, curve_derivative, default_trace, f_curve, solve_v_array, trace_curve
from .classification import (
    count_extraordinary,
    count_grid,
    real_axis_crossings,
    segment_distance,
    table1_counts,
)
from .core import EigType, build_kms, dirichlet_ratio, format_complex, parse_complex, xi
from .oracle import char_poly, extraordinary_counts, full_spectrum, spectrum_split
from .relations import asymptotic_spectrum, exceptional_rhos, lambda_of_mu, rho_of_mu
from .singularities import double_scan, find_cusps, parabola_model, small_u_series, verify_double

__all__ = ["CheckResult", "SUITES", "run_suite", "run_suites", "random_disk"]

SUITES = ("core", "curves", "cusps", "classify", "oracle")
SEED = 20240611

T1, T2 = EigType.TYPE1, EigType.TYPE2


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str
    seconds: float


_REGISTRY: dict[str, list] = {s: [] for s in SUITES}


def _check(suite: str, name: str):
    def deco(fn):
        _REGISTRY[suite].append((name, fn))
        return fn

    return deco


def random_disk(rng, count: int, radius: float) -> np.ndarray:
    """Uniform samples from the disc |z| <= radius."""
    r = radius * np.sqrt(rng.uniform(size=count))
    return r * np.exp(2j * math.pi * rng.uniform(size=count))


def _multiset_distance(a, b) -> float:
    """Largest distance from a point of either set to the nearest point of the other."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if len(a) != len(b):
        return math.inf
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=0).max(), d.min(axis=1).max()))


def _spectrum_scale(n: int, rho: complex) -> float:
    return 1.0 + float(np.max(np.sum(np.abs(build_kms(n, rho)), axis=1)))


# core


@_check("core", "dirichlet bound |sin nx / sin x| <= n")
def _dirichlet_bound(rng):
    worst, bad_equal, bad_peak = -math.inf, 0, 0
    for n in range(2, 13):
        x = rng.uniform(-20.0, 20.0, 10_000)
        peaks = math.pi * np.arange(-3, 4)
        x = np.concatenate([x, peaks, peaks + 1e-7])
        d = np.abs(dirichlet_ratio(n, x))
        worst = max(worst, float(np.max(d - n)))
        dist = np.abs(x - math.pi * np.round(x / math.pi))
        # |D| = n (1 - (n^2 - 1) h^2 / 6 + ...) at distance h from a peak, so a
        # 1e-9 deficit is reached at h ~ sqrt(6e-9 / (n (n^2 - 1))).
        window = max(1e-6, 2.0 * math.sqrt(6e-9 / (n * (n * n - 1))))
        bad_equal += int(np.sum((d >= n - 1e-9) & (dist >= window)))
        bad_peak += int(np.sum((dist < 1e-6) & (d < n - 1e-9)))
    ok = worst <= 1e-12 and bad_equal == 0 and bad_peak == 0
    return ok, f"max |D|-n = {worst:.1e}, near-equality away from peaks: {bad_equal}, peaks below n: {bad_peak}"


@_check("core", "sinh nv / sinh v > n")
def _sinh_bound(rng):
    worst = math.inf
    for n in range(2, 13):
        v = rng.uniform(-3.0, 3.0, 2000)
        v = v[np.abs(v) > 1e-3]
        r = np.real(dirichlet_ratio(n, 1j * v))
        worst = min(worst, float(np.min(r - n)))
    return worst > 0, f"min ratio - n = {worst:.2e}"


@_check("core", "det K = (1 - rho^2)^(n-1)")
def _det_identity(rng):
    worst = 0.0
    for rho in random_disk(rng, 500, 3.0):
        n = int(rng.integers(2, 13))
        d = np.linalg.det(build_kms(n, rho))
        e = (1.0 - rho * rho) ** (n - 1)
        worst = max(worst, abs(d - e) / abs(e))
    return worst < 1e-8, f"max relative error {worst:.1e}"


@_check("core", "complex literal round trip")
def _literal_round_trip(rng):
    z = rng.normal(size=200) * 10.0 ** rng.integers(-8, 8, 200) + 1j * rng.normal(size=200)
    z = np.concatenate([z, [0j, 1j, -1j, complex(0.0, -0.0), 2.5]])
    bad = [w for w in z if parse_complex(format_complex(w)) != w]
    return not bad, f"{len(bad)} mismatches"


@_check("core", "mu -> -mu leaves lambda and rho unchanged")
def _mu_even(rng):
    worst = 0.0
    for n in range(3, 11):
        mu = rng.uniform(-math.pi, math.pi, 100) + 1j * rng.uniform(-2.0, 2.0, 100)
        for t in (T1, T2):
            lam_a, lam_b = lambda_of_mu(mu, n, t), lambda_of_mu(-mu, n, t)
            rho_a, rho_b = rho_of_mu(mu, n, t), rho_of_mu(-mu, n, t)
            worst = max(
                worst,
                float(np.max(np.abs(lam_a - lam_b) / (1 + np.abs(lam_a)))),
                float(np.max(np.abs(rho_a - rho_b) / (1 + np.abs(rho_a)))),
            )
    return worst < 1e-13, f"max relative difference {worst:.1e}"


@_check("core", "asymptotic product matches (-1)^(n-1) rho^(2n-2)")
def _asymptotic_product(rng):
    worst = 0.0
    for rho in random_disk(rng, 100, 20.0):
        n = int(rng.integers(2, 13))
        a = asymptotic_spectrum(n, rho)
        want = (-1) ** (n - 1) * rho ** (2 * n - 2)
        worst = max(worst, abs(a.product() - want) / abs(want))
    return worst < 1e-12, f"max relative error {worst:.1e}"


# curves


@_check("curves", "v(u) = v(-u) = v(pi - u)")
def _v_symmetry(rng):
    worst = 0.0
    for n in range(2, 13):
        u = rng.uniform(-math.pi, math.pi, 400)
        v = solve_v_array(n, u)
        worst = max(
            worst,
            float(np.max(np.abs(v - solve_v_array(n, -u)))),
            float(np.max(np.abs(v - solve_v_array(n, math.pi - u)))),
        )
    return worst < 1e-12, f"max difference {worst:.1e}"


@_check("curves", "f(-u) = conj f(u)")
def _f_conjugate(rng):
    worst = 0.0
    for n in range(2, 13):
        u = rng.uniform(-math.pi, math.pi, 400)
        for t in (T1, T2):
            worst = max(worst, float(np.max(np.abs(f_curve(n, -u, t) - np.conj(f_curve(n, u, t))))))
    return worst < 1e-12, f"max difference {worst:.1e}"


@_check("curves", "even n: f1(pi - u) = -conj f2(u)")
def _even_mirror(rng):
    worst = 0.0
    for n in range(2, 13, 2):
        u = rng.uniform(0.0, math.pi, 400)
        worst = max(worst, float(np.max(np.abs(f_curve(n, math.pi - u, T1) + np.conj(f_curve(n, u, T2))))))
    return worst < 1e-11, f"max difference {worst:.1e}"


@_check("curves", "curve points carry a borderline eigenvalue of the right type")
def _curve_vs_oracle(rng):
    worst, wrong_type = 0.0, 0
    for n in range(3, 11):
        for t in (T1, T2):
            u = rng.uniform(-math.pi, math.pi, 50)
            rho = f_curve(n, u, t)
            lam = b_curve(n, u, t)
            for r, l in zip(rho, lam):
                split = spectrum_split(n, r)
                d = [float(np.min(np.abs(s - l))) if len(s) else math.inf for s in split]
                worst = max(worst, min(d) / n)
                wrong_type += int(d[int(t) - 1] > d[2 - int(t)])
    return worst < 1e-7 and wrong_type == 0, f"max distance/n {worst:.1e}, wrong type tags {wrong_type}"


@_check("curves", "real axis met only at the two crossing values")
def _axis_only(rng):
    bad = 0
    for n in range(2, 13):
        for t in (T1, T2):
            c = default_trace(n, t)
            near_axis = np.abs(c.rho.imag) < 1e-9
            at_ends = (np.abs(c.u) < 1e-6) | (math.pi - np.abs(c.u) < 1e-6)
            bad += int(np.sum(near_axis & ~at_ends))
    return bad == 0, f"{bad} stray axis samples"


@_check("curves", "curve CSV round trip is exact")
def _csv_round_trip(rng):
    from .cli import emit_curve_csv, read_curve_csv

    bad = 0
    for n, t in ((3, T1), (6, T2), (11, T1)):
        c = default_trace(n, t)
        buf = io.StringIO(newline="")
        emit_curve_csv(c, buf)
        text = buf.getvalue()
        back = read_curve_csv(io.StringIO(text), t, n)
        for name in ("u", "v", "rho", "lam", "drho"):
            bad += int(not np.array_equal(getattr(c, name), getattr(back, name)))
        bad += int("\r" in text) + int(text.count("\n") != len(c) + 1)
    return bad == 0, f"{bad} mismatching columns or line-ending faults"


@_check("curves", "trace, CSV and SVG output are deterministic")
def _determinism(rng):
    from .cli import run

    outs = []
    for _ in range(2):
        pair = []
        for argv in (["trace", "--n", "5", "--type", "2"], ["figure", "--id", "phase", "--n", "6"]):
            buf = _BytesOut()
            run(argv, stdout=buf)
            pair.append(buf.data())
        outs.append(pair)
    a = trace_curve(7, T1)
    b = trace_curve(7, T1)
    same = outs[0] == outs[1] and np.array_equal(a.rho, b.rho)
    return same, "byte-identical" if same else "outputs differ between runs"


class _BytesOut:
    def __init__(self):
        self.buffer = io.BytesIO()

    def flush(self):
        pass

    def write(self, text):
        self.buffer.write(text.encode("utf-8"))

    def data(self) -> bytes:
        return self.buffer.getvalue()


# cusps


@functools.lru_cache(maxsize=None)
def _cusps(n: int, t: EigType):
    return tuple(find_cusps(n, t, fit=False))


@_check("cusps", "each cusp is a double eigenvalue -n and vice versa")
def _one_to_one(rng):
    failures, unmatched = 0, 0
    for n in range(3, 11):
        for t in (T1, T2):
            cusps = _cusps(n, t)
            for c in cusps:
                if not verify_double(n, c.rho0).verdict:
                    failures += 1
            for u in double_scan(n, t):
                if not any(abs(u - c.u0) < 1e-6 for c in cusps):
                    unmatched += 1
    return failures == 0 and unmatched == 0, f"{failures} cusps fail the double test, {unmatched} doubles without cusp"


@_check("cusps", "df/du = 0 and b = -n at every cusp")
def _cusp_residuals(rng):
    worst_d, worst_b = 0.0, 0.0
    for n in range(3, 14):
        for t in (T1, T2):
            for c in _cusps(n, t):
                worst_d = max(worst_d, abs(curve_derivative(n, c.u0, t)))
                worst_b = max(worst_b, abs(b_curve(n, c.u0, t) + n) / n)
    return worst_d < 1e-6 and worst_b < 1e-8, f"max |df/du| {worst_d:.1e}, max |b+n|/n {worst_b:.1e}"


@_check("cusps", "two cusps on the imaginary axis for the listed n")
def _imaginary_cusps(rng):
    counts = {}
    for t, ns in ((T1, (5, 9, 13)), (T2, (3, 7, 11))):
        for n in ns:
            counts[(n, int(t))] = sum(abs(c.rho0.real) < 1e-8 for c in _cusps(n, t))
    ok = all(v == 2 for v in counts.values())
    return ok, ", ".join(f"n={n} type {t}: {v}" for (n, t), v in counts.items())


@_check("cusps", "no cusp on the real axis")
def _no_real_cusp(rng):
    worst = math.inf
    for n in range(2, 14):
        for t in (T1, T2):
            for c in _cusps(n, t):
                worst = min(worst, abs(c.rho0.imag))
    return worst > 1e-6, f"min |Im rho0| {worst:.2e}"


@_check("cusps", "n=7 parabola within 5% for |u| < 0.1")
def _parabola(rng):
    n = 7
    model = parabola_model(n, T1)
    c = default_trace(n, T1)
    sel = (np.abs(c.u) < 0.1) & (np.abs(c.rho.imag) > 0)
    y2 = c.rho.imag[sel] ** 2
    err = float(np.max(np.abs(y2 - model.y_squared(c.rho.real[sel])) / y2))
    return err < 0.05, f"max relative error {err:.2e} over {int(sel.sum())} samples"


@_check("cusps", "small-u series error is O(u^6)")
def _series_order(rng):
    worst = math.inf
    for n in (3, 6, 9):
        for t in (T1, T2):
            u = 0.08
            errs = []
            for _ in range(4):
                errs.append(abs(small_u_series(n, u, t) - f_curve(n, u, t)))
                u /= 2
            ratios = [errs[k] / errs[k + 1] for k in range(3)]
            worst = min(worst, min(ratios))
    return worst >= 32, f"smallest halving ratio {worst:.1f}"


# classify


@_check("classify", "winding counts equal oracle counts at random rho")
def _counts_vs_oracle(rng):
    mismatches, used = 0, 0
    for n in range(3, 11):
        z = random_disk(rng, 150, 3.0)
        d = np.minimum(segment_distance(z, default_trace(n, T1)), segment_distance(z, default_trace(n, T2)))
        z = z[d > 1e-3]
        j, _ = count_grid(n, z)
        for k, rho in enumerate(z):
            mismatches += int(tuple(j[k]) != extraordinary_counts(n, rho))
        used += len(z)
    return mismatches == 0, f"{mismatches} mismatches over {used} points"


@_check("classify", "real rho reproduces the case table")
def _table(rng):
    bad = 0
    for n in range(2, 11):
        cross = real_axis_crossings(n)
        x = np.linspace(-3.0, 3.0, 200)
        x = x[np.min(np.abs(x[:, None] - np.array(cross)[None, :]), axis=1) > 1e-9]
        j, _ = count_grid(n, x.astype(complex))
        for k, r in enumerate(x):
            want = table1_counts(n, r)
            bad += int(tuple(j[k]) != want) + int(extraordinary_counts(n, r) != want)
    return bad == 0, f"{bad} mismatches"


def _crossing_probe(n, t, u, delta):
    rho = complex(f_curve(n, u, t))
    normal = 1j * complex(curve_derivative(n, u, t))
    normal /= abs(normal)
    return rho - delta * normal, rho + delta * normal


@_check("classify", "crossing one curve changes that count by exactly one")
def _crossing(rng):
    bad, used = 0, 0
    for n in range(3, 11):
        for t in (T1, T2):
            same, other = default_trace(n, t), default_trace(n, t.other())
            cusps = np.array([c.rho0 for c in _cusps(n, t)])
            for u in rng.uniform(0.2, math.pi - 0.2, 6):
                if abs(curve_derivative(n, u, t)) < 0.1:
                    continue
                if len(cusps) and np.min(np.abs(cusps - complex(f_curve(n, u, t)))) < 0.05:
                    continue
                a, b = _crossing_probe(n, t, u, 1e-4)
                probes = np.array([a, b])
                # Each probe must see only the crossed branch, at the probe offset.
                if segment_distance(probes, other).min() < 1e-2 or segment_distance(probes, same).min() < 5e-5:
                    continue
                ja, jb = np.array(count_extraordinary(n, a)), np.array(count_extraordinary(n, b))
                oa, ob = np.array(extraordinary_counts(n, a)), np.array(extraordinary_counts(n, b))
                k = int(t) - 1
                for p, q in ((ja, jb), (oa, ob)):
                    bad += int(abs(int(p[k]) - int(q[k])) != 1 or p[1 - k] != q[1 - k])
                used += 1
    return bad == 0 and used > 0, f"{bad} faults over {used} crossings"


def _intersections(n: int) -> list[complex]:
    """Points off the real axis where the two curves cross."""
    p1, p2 = default_trace(n, T1).polyline(), default_trace(n, T2).polyline()
    a0, a1 = p1[:-1], p1[1:]
    out = []
    for k in range(len(p2) - 1):
        b0, b1 = p2[k], p2[k + 1]
        da, db = a1 - a0, b1 - b0
        den = (np.conj(da) * db).imag
        with np.errstate(divide="ignore", invalid="ignore"):
            s = (np.conj(b0 - a0) * db).imag / den
            r = (np.conj(b0 - a0) * da).imag / den
        hit = (den != 0) & (s >= 0) & (s < 1) & (r >= 0) & (r < 1)
        for i in np.nonzero(hit)[0]:
            z = a0[i] + s[i] * da[i]
            if abs(z.imag) > 1e-3:
                out.append(complex(z))
    return out


@_check("classify", "[0,0] and [1,1] sit opposite at curve intersections")
def _simultaneous(rng):
    bad, used = 0, 0
    for n in range(3, 9):
        for z in _intersections(n):
            angles = np.linspace(0.0, 2.0 * math.pi, 16, endpoint=False)
            probes = z + 1e-4 * np.exp(1j * angles)
            d = np.minimum(
                segment_distance(probes, default_trace(n, T1)), segment_distance(probes, default_trace(n, T2))
            )
            if np.min(d) < 1e-6:
                continue
            j, _ = count_grid(n, probes)
            codes = [tuple(r) for r in j]
            if set(codes) != {(0, 0), (0, 1), (1, 0), (1, 1)}:
                bad += 1
                continue
            # The point opposite a [0,0] probe lies in the [1,1] sector.
            for k, c in enumerate(codes):
                if c == (0, 0) and d[k] > 2e-5 and d[(k + 8) % 16] > 2e-5:
                    bad += int(codes[(k + 8) % 16] != (1, 1))
            used += 1
    return bad == 0 and used > 0, f"{bad} faults over {used} intersections"


@_check("classify", "labels symmetric under conjugation; even n swaps under -conj")
def _label_symmetry(rng):
    bad = 0
    for n in range(3, 11):
        z = random_disk(rng, 100, 3.0)
        d = np.minimum(segment_distance(z, default_trace(n, T1)), segment_distance(z, default_trace(n, T2)))
        z = z[d > 1e-3]
        j, _ = count_grid(n, z)
        jc, _ = count_grid(n, np.conj(z))
        bad += int(np.sum(np.any(j != jc, axis=1)))
        if n % 2 == 0:
            jm, _ = count_grid(n, -np.conj(z))
            bad += int(np.sum(np.any(j != jm[:, ::-1], axis=1)))
    return bad == 0, f"{bad} asymmetric labels"


# oracle


@_check("oracle", "multiplicities sum to n")
def _mult_sum(rng):
    bad = 0
    for rho in random_disk(rng, 200, 3.0):
        n = int(rng.integers(2, 17))
        bad += int(sum(e.multiplicity for e in full_spectrum(n, rho).entries) != n)
    return bad == 0, f"{bad} faults"


def _root_residual(rng, radius: float, count: int) -> float:
    worst = 0.0
    for rho in random_disk(rng, count, radius):
        n = int(rng.integers(2, 17))
        k = build_kms(n, rho)
        eye = np.eye(n)
        for lam in full_spectrum(n, rho).values():
            worst = max(worst, abs(np.linalg.det(lam * eye - k)) / (1.0 + abs(lam) ** n))
    return worst


@_check("oracle", "root residual |p(lambda)|/(1+|lambda|^n) < 1e-9, n <= 16, |rho| <= 4")
def _residual_full(rng):
    worst = _root_residual(rng, 4.0, 200)
    return worst < 1e-9, f"max residual {worst:.1e}"


@_check("oracle", "root residual < 1e-9, n <= 16, |rho| <= 1.5")
def _residual_small(rng):
    worst = _root_residual(rng, 1.5, 200)
    return worst < 1e-9, f"max residual {worst:.1e}"


@_check("oracle", "spectrum of K(conj rho) is the conjugate spectrum")
def _conjugation(rng):
    worst = 0.0
    for rho in random_disk(rng, 200, 3.0):
        n = int(rng.integers(2, 17))
        a = full_spectrum(n, rho).values()
        b = full_spectrum(n, np.conj(rho)).values()
        worst = max(worst, _multiset_distance(np.conj(a), b) / _spectrum_scale(n, rho))
    return worst < 1e-9, f"max distance / norm {worst:.1e}"


@_check("oracle", "K(-rho) has the same spectrum, types swapped iff n even")
def _sign_flip(rng):
    worst = 0.0
    for rho in random_disk(rng, 200, 3.0):
        n = int(rng.integers(2, 17))
        a1, a2 = spectrum_split(n, rho)
        b1, b2 = spectrum_split(n, -rho)
        if n % 2 == 0:
            b1, b2 = b2, b1
        scale = _spectrum_scale(n, rho)
        worst = max(worst, _multiset_distance(a1, b1) / scale, _multiset_distance(a2, b2) / scale)
    return worst < 1e-9, f"max typed distance / norm {worst:.1e}"


@_check("oracle", "repeated eigenvalues equal -n with multiplicity 2")
def _repeated_law(rng):
    bad, seen = 0, 0
    cases = [(int(rng.integers(3, 11)), complex(rho)) for rho in random_disk(rng, 500, 3.0)]
    # Cusp parameters are the places where a double root does occur.
    for n in (4, 5, 7):
        cases += [(n, c.rho0) for c in _cusps(n, T1)[:2]]
    for n, rho in cases:
        if any(abs(rho - e) < 1e-9 for e in exceptional_rhos(n)):
            continue
        for e in full_spectrum(n, rho).repeated():
            seen += 1
            bad += int(e.multiplicity > 2 or abs(e.value + n) > 1e-7 * n)
    return bad == 0, f"{seen} repeated roots, {bad} violate the law"


@_check("oracle", "relations map mu to an eigenvalue of K(rho)")
def _relations_vs_oracle(rng):
    worst = 0.0
    for n in range(3, 11):
        mu = rng.uniform(-math.pi, math.pi, 63) + 1j * rng.uniform(-2.0, 2.0, 63)
        for t in (T1, T2):
            for m in mu:
                try:
                    rho = complex(rho_of_mu(m, n, t))
                except ArithmeticError:
                    continue
                lam = complex(lambda_of_mu(m, n, t))
                spec = np.concatenate(spectrum_split(n, rho))
                worst = max(worst, float(np.min(np.abs(spec - lam))) / n)
    return worst < 1e-7, f"max distance/n {worst:.1e}"


@_check("oracle", "LeVerrier constant term equals (-1)^n det K for small n|rho|")
def _charpoly_constant(rng):
    worst = 0.0
    for rho in random_disk(rng, 200, 2.0):
        n = int(rng.integers(2, 7))
        p = char_poly(n, rho)
        c0 = p.coeffs[-1] * p.scale**n
        want = (-1) ** n * (1.0 - rho * rho) ** (n - 1)
        worst = max(worst, abs(c0 - want) / max(abs(want), 1e-300))
    return worst < 1e-8, f"max relative error {worst:.1e}"


def run_suite(name: str, seed: int = SEED) -> list[CheckResult]:
    if name not in _REGISTRY:
        raise ValueError(f"unknown suite {name!r}")
    results = []
    for k, (label, fn) in enumerate(_REGISTRY[name]):
        rng = np.random.default_rng([seed, SUITES.index(name), k])
        t0 = time.perf_counter()
        try:
            passed, detail = fn(rng)
        except Exception as exc:  # a crash is a failed check, not a crashed run
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, label, bool(passed), detail, time.perf_counter() - t0))
    return results


def run_suites(which: str = "all", seed: int = SEED) -> list[CheckResult]:
    names = SUITES if which == "all" else (which,)
    out = []
    for name in names:
        out.extend(run_suite(name, seed))
    return out
