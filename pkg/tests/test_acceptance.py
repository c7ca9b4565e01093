"""Acceptance gate: one test and one printed verdict line per criterion.

Run with `pytest tests/test_acceptance.py -v -s` to see the verdict lines
alongside the per-test results.
"""

import cmath
import math
import time

import numpy as np

from obsgap import eigen_bounded as eb
from obsgap import kolmogorov as km
from obsgap import observability as ob
from obsgap import rfhe, saddle
from obsgap.spectral_core import (
    PHYSICAL,
    Grid1D,
    SampledField,
    coeff_identity_check,
    fourier_coeffs,
    l2_norm,
    line_grid_for_torus,
)

Z45 = cmath.exp(1j * math.pi / 4.0)
RAY = cmath.exp(-1j * math.pi / 4.0)


def verdict(num, name, checks, detail, t0):
    ok = all(checks)
    line = f"[{'PASS' if ok else 'FAIL'}] {num:02d} {name}: {detail} ({time.time() - t0:.1f}s)"
    print(line)
    assert ok, line


def default_evo():
    return rfhe.EvolutionParams(alpha=0.5, z=Z45, T=1.0)


def sweep_report(equation, h_list):
    cfg = ob.ExperimentConfig(equation=equation, evo=default_evo(), h_list=h_list)
    return ob.sweep(cfg)


def blowup_checks(rep):
    logq = [r.log_quotient for r in rep.rows]
    return [
        rep.failures == (),
        all(b > a for a, b in zip(logq, logq[1:])),
        rep.slope_log_quotient > 0,
        rep.slope_log_den < 0,
    ]


def test_01_saddle_order():
    t0 = time.time()
    phase = saddle.HoloFunction(
        lambda zeta: -np.conj(Z45) * cmath.sqrt(zeta + 1.0), radius=0.97
    )
    h_list = (0.1, 0.05, 0.02)
    errs = [
        saddle.evaluate(lambda _z: 1.0 + 0j, phase, h, 0.5, 0.9, rel_tol=1e-10).rel_err
        for h in h_list
    ]
    scaled = [e / math.sqrt(h) for e, h in zip(errs, h_list)]
    checks = [
        errs[0] > errs[1] > errs[2],
        max(scaled) / min(scaled) < 3.0,
    ]
    verdict(
        1,
        "saddle order",
        checks,
        f"rel errs {['%.4e' % e for e in errs]}, spread x{max(scaled) / min(scaled):.2f}",
        t0,
    )


def test_02_gaussian_baseline():
    t0 = time.time()
    flat = saddle.HoloFunction(lambda _zeta: 0.0 + 0j, radius=2.0)
    res = saddle.evaluate(lambda _z: 1.0 + 0j, flat, 0.01, 0.5, 1.0, rel_tol=1e-10)
    ratio = abs(res.estimate / res.oracle)
    checks = [
        abs(abs(res.oracle) - 0.250663) < 1e-5,
        0.999 <= ratio <= 1.001,
    ]
    verdict(
        2,
        "gaussian baseline",
        checks,
        f"oracle {abs(res.oracle):.6f}, estimate/oracle {ratio:.6f}",
        t0,
    )


def test_03_blowup_fractional_heat_torus():
    t0 = time.time()
    rep = sweep_report("rfhe_torus", (0.2, 0.1, 0.05, 0.025))
    verdict(
        3,
        "blow-up rfhe torus",
        blowup_checks(rep),
        f"slope q {rep.slope_log_quotient:+.4f}, slope den {rep.slope_log_den:+.4f}",
        t0,
    )


def test_04_blowup_kolmogorov_line():
    t0 = time.time()
    rep = sweep_report("kolm_line_v", (0.2, 0.1, 0.05))
    verdict(
        4,
        "blow-up kolmogorov line",
        blowup_checks(rep),
        f"slope q {rep.slope_log_quotient:+.4f}, slope den {rep.slope_log_den:+.4f}",
        t0,
    )


def test_05_blowup_kolmogorov_interval():
    t0 = time.time()
    rep = sweep_report("kolm_interval_v", (0.2, 0.1, 0.05))
    logq = [r.log_quotient for r in rep.rows]
    spec = km.KolmSolutionSpec.default(0.2, domain_v="interval")
    grid = Grid1D(-1.0, 1.0, 161)
    f = km.build_solution_interval(spec, 1.0, grid, np.array([-1.0, 0.0, 1.0]))
    peak = float(np.max(np.abs(f[:, 1])))
    residual = float(max(np.max(np.abs(f[:, 0])), np.max(np.abs(f[:, 2]))))
    checks = [
        rep.failures == (),
        all(b > a for a, b in zip(logq, logq[1:])),
        residual < 1e-6 * peak,
    ]
    verdict(
        5,
        "blow-up kolmogorov interval",
        checks,
        f"log q {['%+.3f' % v for v in logq]}, end residual {residual / peak:.2e} of peak",
        t0,
    )


def test_06_eigenvalue_asymptotic():
    t0 = time.time()
    ratios = []
    for xi in (8.0, 12.0, 16.0, 20.0):
        ed = eb.solve_rho(complex(xi))
        ratios.append(abs(ed.rho / eb.asymptotic_rho(xi)))
    gaps = [abs(r - 1.0) for r in ratios]
    fd_rel = []
    for xi in (5.0, 10.0, 15.0):
        ed = eb.solve_rho(complex(xi))
        fd_rel.append(abs(ed.lam / eb.fd_oracle(xi, 4000) - 1.0))
    checks = [
        gaps[0] > gaps[1] > gaps[2] > gaps[3],
        gaps[3] < 0.15,
        max(fd_rel) < 1e-6,
    ]
    verdict(
        6,
        "eigenvalue asymptotic",
        checks,
        f"ratios {['%.4f' % r for r in ratios]}, max fd dev {max(fd_rel):.2e}",
        t0,
    )


def test_07_agmon_bounds():
    t0 = time.time()
    sups, lows = [], []
    moduli = (5.0, 10.0, 15.0, 20.0)
    for r in moduli:
        ed = eb.solve_rho(r * RAY)
        sups.append(eb.agmon_upper_check(ed, 0.1))
        lows.append(eb.lower_bound_check(ed, 0.2))
    slope = float(np.polyfit(moduli, np.log(lows), 1)[0])
    checks = [
        max(sups) <= 1.01,
        all(b < a for a, b in zip(lows, lows[1:])),
        slope < 0,
    ]
    verdict(
        7,
        "agmon bounds",
        checks,
        f"weighted sup <= {max(sups):.6f}, flatness slope {slope:+.4f}",
        t0,
    )


def test_08_delta_product_growth():
    t0 = time.time()
    samples = eb.growth_samples(200)
    fit3 = eb.delta_growth_check(eb.ProductParams(mu=0.3), samples)
    fit15 = eb.delta_growth_check(eb.ProductParams(mu=0.15), samples)
    ratio = fit15.slope / fit3.slope
    checks = [
        fit3.max_residual < 0.5,
        0.35 <= ratio <= 0.65,
    ]
    verdict(
        8,
        "delta product growth",
        checks,
        f"max residual {fit3.max_residual:.4f}, slope ratio {ratio:.4f}",
        t0,
    )


def test_09_poisson_identity():
    t0 = time.time()
    h = 0.1
    cs = rfhe.CoherentStateSpec(xi0=1.0, h=h)
    cut = rfhe.CutoffSpec.for_xi0(1.0)
    # coefficient identity between the fold+FFT and direct-transform routes
    n_per = 256 * int(math.ceil(2.0 * math.pi * 12.0 / h / 256.0))
    grid = line_grid_for_torus(n_per, 23)
    f = rfhe.bandlimited_state(cs, cut, grid)
    dev = coeff_identity_check(f, h)
    # semigroup property of the torus evolution
    tg = Grid1D(-math.pi, math.pi, n_per, periodic=True)
    modes = np.arange(6, 15)
    coeffs = np.exp(-((h * modes - 1.0) ** 2) / (2.0 * h)).astype(complex)
    c0 = rfhe.FourierCoeffs(6, 14, coeffs)
    evo = default_evo()
    two_step = rfhe.evolve_torus(rfhe.evolve_torus(c0, evo, 0.45), evo, 0.3)
    one_step = rfhe.evolve_torus(c0, evo, 0.75)
    semi = float(np.max(np.abs(two_step.c - one_step.c)))
    # Plancherel on the periodized state
    vals = np.zeros(n_per, dtype=complex)
    amps = km.mode_amplitudes(km.KolmSolutionSpec.default(h), modes)
    for n_mode, a in zip(modes, amps):
        vals += a * np.exp(1j * n_mode * tg.nodes())
    per = SampledField(tg, vals, side=PHYSICAL)
    parseval = math.sqrt(2.0 * math.pi * float(np.sum(np.abs(fourier_coeffs(per).c) ** 2)))
    plancherel = abs(parseval / l2_norm(per) - 1.0)
    checks = [dev <= 1e-8, semi <= 1e-14, plancherel <= 1e-8]
    verdict(
        9,
        "poisson identity",
        checks,
        f"coeff dev {dev:.2e}, semigroup {semi:.2e}, plancherel {plancherel:.2e}",
        t0,
    )


def test_10_pointwise_estimates():
    t0 = time.time()
    cs = rfhe.CoherentStateSpec(xi0=1.0, h=0.2)
    cut = rfhe.CutoffSpec.for_xi0(1.0)
    rep = rfhe.verify_pointwise_bounds(
        cs, cut, default_evo(), (0.2, 0.1, 0.05), 0.5, t=1.0
    )
    checks = [
        rep.slope_out < 0,
        rep.max_in <= 2.0,
    ]
    verdict(
        10,
        "pointwise estimates",
        checks,
        f"off-band slope {rep.slope_out:+.4f}, max phase defect {rep.max_in:.4f}",
        t0,
    )
