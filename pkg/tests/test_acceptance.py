"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the lines are repeated in
the terminal summary under "acceptance criteria".
"""

import math
import time
import warnings

import mpmath as mp
import numpy as np
import pytest
from conftest import REF_ALPHA, REF_SETS, mp_hkdf, mp_mixed_fd

from hermfock import (
    BosonicParams,
    SeriesConvergenceWarning,
    StateParams,
    appendix_a_matrix,
    build_unitary,
    displaced_helstrom_coeff,
    displaced_KW_coeff,
    mehler_closed,
    mehler_series,
    mixed_deriv_quadexp,
    pure_coeff,
    rho_brute,
    rho_coeff,
    rho_matrix,
    rho_series_matrix,
    squeezed_special_coeff,
    thermal_coeff,
    unitary_matrix,
)
from hermfock.cli import main, mehler_grid

SEED = 7


def draw_bosonic(rng, rmax):
    alpha = rng.uniform(0, 2) * np.exp(1j * rng.uniform(-np.pi, np.pi))
    phi, theta = rng.uniform(-np.pi, np.pi, size=2)
    return BosonicParams(complex(alpha), phi, rng.uniform(0, rmax), theta)


def block(fn, dim):
    return np.array([[fn(m, n) for n in range(dim)] for m in range(dim)])


def block_relative(A, B):
    return float(np.abs(A - B).max() / np.abs(B).max())


def entry_relative(A, B):
    return float((np.abs(A - B) / np.maximum(np.abs(B), 1e-300)).max())


# photon-number scans over displacement, squeeze
# modulus, squeeze phase and thermal noise
SCAN_SETS = tuple(
    dict.fromkeys(
        [StateParams(a, 0.5, 0.5, 0.5) for a in (0.5, 1.0, REF_ALPHA, 1.5)]
        + [StateParams(REF_ALPHA, r, 0.5, 0.5) for r in (0.0, 0.25, 0.5, 1.0)]
        + [StateParams(REF_ALPHA, 1.0, th, 0.5) for th in (0.0, 0.5, math.pi / 2, math.pi)]
        + [StateParams(REF_ALPHA, 1.0, 0.5, nb) for nb in (0.0, 0.5, 1.0, 2.0)]
    )
)


def test_criterion_1_unitary_vs_appendix_a(acceptance):
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        p = draw_bosonic(rng, 1.5)
        worst = max(worst, float(np.abs(unitary_matrix(p, 26) - appendix_a_matrix(p, 26)).max()))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 10
    acceptance(1, ok, f"50 draws, m,n<=25: max |dU| = {worst:.2e} (tol 1e-10), {elapsed:.1f} s (< 10 s)")
    assert ok


def test_criterion_2_unitary_vs_brute(acceptance):
    rng = np.random.default_rng(SEED + 1)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(10):
        p = draw_bosonic(rng, 1.2)
        worst = max(worst, float(np.abs(unitary_matrix(p, 20) - build_unitary(p, 20)).max()))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 30
    acceptance(2, ok, f"10 draws, 20x20: max |dU| = {worst:.2e} (tol 1e-9), {elapsed:.1f} s (< 30 s)")
    assert ok


def test_criterion_3_triple_path(acceptance):
    rng = np.random.default_rng(SEED + 2)
    sets = [StateParams(**s) for s in REF_SETS]
    for _ in range(5):
        alpha = complex(rng.uniform(0, 2) * np.exp(1j * rng.uniform(-np.pi, np.pi)))
        sets.append(StateParams(alpha, rng.uniform(0, 1.2), rng.uniform(-np.pi, np.pi), rng.uniform(0, 2)))
    start = time.perf_counter()
    worst = 0.0
    for p in sets:
        closed = block(lambda m, n: rho_coeff(m, n, p), 15)
        series = rho_series_matrix(p, 15)
        brute = rho_brute(p, 15)
        worst = max(
            worst,
            float(np.abs(closed - series).max()),
            float(np.abs(closed - brute).max()),
            float(np.abs(series - brute).max()),
        )
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed < 60
    acceptance(
        3,
        ok,
        f"{len(sets)} sets (7 reference sets), 15x15: max pairwise dev = {worst:.2e} (tol 1e-8), "
        f"{elapsed:.1f} s (< 60 s)",
    )
    assert ok


def test_criterion_4_thermal(acceptance):
    worst = 0.0
    for nbar in (0.1, 0.5, 1, 3):
        p = StateParams(0, 0, 0, nbar)
        expected = block(lambda m, n: thermal_coeff(m, n, nbar), 41)
        worst = max(worst, float(np.abs(rho_matrix(p, 41) - expected).max()))
        diag = np.array([rho_coeff(m, m, p) for m in range(41)])
        worst = max(worst, float(np.abs(diag - np.diagonal(expected)).max()))
    ok = worst <= 1e-14
    acceptance(4, ok, f"alpha=0, r=0, m,n<=40, nbar in {{0.1,0.5,1,3}}: max dev = {worst:.2e} (tol 1e-14)")
    assert ok


def test_criterion_5_mehler(acceptance):
    grid = mehler_grid(100, seed=0, bound=0.8)
    worst, worst_point, failures, adaptive = 0.0, None, 0, 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SeriesConvergenceWarning)
        for p in grid:
            closed = mehler_closed(*p)
            err = abs(mehler_series(*p, 80) - closed) / abs(closed)
            failures += err > 1e-11
            if err > worst:
                worst, worst_point = err, p
            adaptive = max(adaptive, abs(mehler_series(*p) - closed) / abs(closed))
    # the same 80-term truncation at 50 digits, to separate truncation from rounding
    x, y, z, v, t = (mp.mpc(c) for c in worst_point)
    mp80 = mp.fsum(t**n / mp.factorial(n) * mp_hkdf(n, x, y) * mp_hkdf(n, z, v) for n in range(80))
    mp_err = abs(complex(mp80) - mehler_closed(*worst_point)) / abs(mehler_closed(*worst_point))
    ok = worst <= 1e-11
    w = abs(4 * worst_point[1] * worst_point[3] * worst_point[4] ** 2)
    acceptance(
        5,
        ok,
        f"100 points, |4yt^2v|<=0.8, 80 terms: {failures} points above 1e-11, max rel err {worst:.2e} "
        f"at |4yt^2v|={w:.2f} (80 terms at 50 digits: {mp_err:.2e}, so truncation not rounding); "
        f"adaptive series up to 500 terms: {adaptive:.2e}",
    )
    assert ok


def test_criterion_6_mixed_derivatives(acceptance):
    rng = np.random.default_rng(SEED + 5)
    worst = 0.0
    for _ in range(20):
        a, b, c, x, y = (complex(*rng.uniform(-0.7, 0.7, 2)) for _ in range(5))
        for m in range(5):
            for n in range(5):
                ref = complex(mp_mixed_fd(m, n, a, b, c, x, y))
                worst = max(worst, abs(mixed_deriv_quadexp(m, n, a, b, c, x, y) - ref) / abs(ref))
    ok = worst <= 1e-6
    acceptance(6, ok, f"20 forms, m,n<=4 vs Richardson differences: max rel err {worst:.2e} (tol 1e-6)")
    assert ok


def test_criterion_7_special_slices(acceptance):
    dim = 12
    results = []
    for alpha, nbar in [(0.9 + 0.3j, 0.5), (-1.5j, 2.0), (2.0, 1.0)]:
        ref = rho_matrix(StateParams(alpha, 0, 0, nbar), dim)
        kw = block(lambda m, n: displaced_KW_coeff(m, n, alpha, nbar), dim)
        results.append(("KW", block_relative(kw, ref), entry_relative(kw, ref)))
    for r, theta, nbar in [(0.6, 0.4, 0.5), (1.2, -2.0, 2.0), (1.0, 0.5, 0.0)]:
        ref = rho_matrix(StateParams(0, r, theta, nbar), dim)
        sq = block(lambda m, n: squeezed_special_coeff(m, n, r, theta, nbar), dim)
        # parity zeros are exact in both; compare the rest
        results.append(("squeezed", block_relative(sq, ref), entry_relative(sq[ref != 0], ref[ref != 0])))
    for alpha, r, theta in [(REF_ALPHA, 1.0, 0.5), (-0.4 + 1.1j, 0.3, 2.0)]:
        ref = rho_matrix(StateParams(alpha, r, theta, 0), dim)
        pure = block(lambda m, n: pure_coeff(m, n, alpha, r, theta), dim)
        results.append(("pure", block_relative(pure, ref), entry_relative(pure, ref)))
    worst = {name: max(b for n, b, _ in results if n == name) for name in ("KW", "squeezed", "pure")}
    worst_entry = max(e for *_, e in results)
    ok = max(worst.values()) <= 1e-10
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    acceptance(
        7,
        ok,
        f"12x12 blocks, relative max|A-B|/max|B|: {detail} (tol 1e-10); "
        f"entrywise relative (diagnostic) {worst_entry:.1e}",
    )
    assert ok


def test_criterion_8_laguerre_form(acceptance):
    rng = np.random.default_rng(SEED + 7)
    worst, worst_entry = 0.0, 0.0
    for nbar in (0.3, 1, 2):
        for alpha in [
            0.0,
            2.0,
            *(complex(rng.uniform(0, 2) * np.exp(1j * rng.uniform(-np.pi, np.pi))) for _ in range(3)),
        ]:
            ref = rho_matrix(StateParams(alpha, 0, 0, nbar), 16)
            hel = block(lambda m, n: displaced_helstrom_coeff(m, n, alpha, nbar), 16)
            worst = max(worst, block_relative(hel, ref))
            worst_entry = max(worst_entry, entry_relative(hel, ref))
    ok = worst <= 1e-10
    acceptance(
        8,
        ok,
        f"m,n<=15, nbar in {{0.3,1,2}}, |alpha|<=2: relative max|A-B|/max|B| = {worst:.1e} "
        f"(tol 1e-10); entrywise relative (diagnostic) {worst_entry:.1e}",
    )
    assert ok


def test_criterion_9_state_physics(acceptance):
    herm = psd = 0.0
    low_trace, low_purity = [], []
    for p in SCAN_SETS:
        rho = rho_matrix(p, 40, method="auto")
        herm = max(herm, float(np.abs(rho - rho.conj().T).max()))
        psd = min(psd, float(np.linalg.eigvalsh(rho).min()))
        trace60 = float(np.trace(rho_matrix(p, 60, method="auto")).real)
        if trace60 < 0.999:
            low_trace.append((p, trace60))
        if p.nbar == 0:
            purity = float(np.einsum("ij,ji->", rho, rho).real)
            if not 0.9999 <= purity <= 1 + 1e-10:
                low_purity.append((p, purity))
    ok = herm <= 1e-12 and psd >= -1e-10 and not low_trace and not low_purity

    def fmt(p):
        return f"(alpha={p.alpha:.2g}, r={p.r:g}, theta={p.theta:.3g}, nbar={p.nbar:g})"

    detail = (
        f"{len(SCAN_SETS)} scan sets: hermiticity {herm:.1e} (tol 1e-12), min eig {psd:.1e} "
        f"(>= -1e-10); partial trace at dim 60 below 0.999 for {len(low_trace)} sets"
    )
    if low_trace:
        detail += " [" + "; ".join(f"{fmt(p)} {t:.4f}" for p, t in low_trace) + "]"
    detail += f"; nbar=0 purity outside [0.9999, 1] for {len(low_purity)} sets"
    if low_purity:
        detail += " [" + "; ".join(f"{fmt(p)} {v:.5f}" for p, v in low_purity) + "]"
    acceptance(9, ok, detail)
    assert herm <= 1e-12 and psd >= -1e-10
    assert not low_trace, "truncated block misses more than 1e-3 of the population"
    assert not low_purity, "truncated block misses part of the pure state"


def test_criterion_10_cli_verify(acceptance, capsys, monkeypatch):
    import dataclasses

    from hermfock import state

    noisy_args = ["verify", "--alpha=1+0.3i", "--r", "1", "--theta", "0.5", "--nbar", "0.5"]
    code = main(noisy_args)
    report = capsys.readouterr().out
    clean = code == 0 and '"pass": true' in report

    caches = (state._derive_ext, state._factor_tables_ext)
    original = state._derive_ext.__wrapped__
    caught = []
    for field in ("J", "a", "b", "z_poly"):

        def corrupted(params, field=field):
            d = original(params)
            return dataclasses.replace(d, **{field: getattr(d, field) * 1.001})

        monkeypatch.setattr(state, "_derive_ext", corrupted)
        for c in caches:
            c.cache_clear()
        caught.append(main(noisy_args) == 1)
        capsys.readouterr()
    monkeypatch.undo()
    for c in caches:
        c.cache_clear()
    ok = clean and all(caught)
    acceptance(
        10,
        ok,
        f"verify on alpha=1+0.3i, r=1, theta=0.5, nbar=0.5 exits {code} with a JSON report; "
        f"{sum(caught)}/{len(caught)} single-constant mutations flip the verdict",
    )
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
