"""Acceptance criteria 1-10, each at its stated tolerance.

Run ``pytest tests/test_acceptance.py`` and read the "acceptance criteria"
section of the summary: one PASS/FAIL line per criterion.
"""

import math
import subprocess
import sys

import numpy as np

from moshinsky2d import model, oracle, sweep
from moshinsky2d.model import SystemParams, derive_params

STRESS = [(n, lam) for n in (2, 50, 500) for lam in (0.1, 1.0, 1e2, 1e4)]


def random_params(count, seed=20240611):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(round(10 ** rng.uniform(math.log10(2), 4)))
        if rng.random() < 0.1:
            # attractive side, strictly inside the stability bound
            lam = -rng.uniform(0.0, 0.999) / (2 * n)
        else:
            lam = 10 ** rng.uniform(-4, 8)
        out.append(SystemParams(n, lam))
    return out


def rel(a, b):
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def strictly_decreasing(values):
    return all(b < a for a, b in zip(values, values[1:]))


def test_criterion_01_parameter_identities(acceptance_report):
    cfg = oracle.VerifyConfig()
    worst = max(
        oracle.check_param_identities(derive_params(p), cfg).deviation for p in random_params(1000)
    )
    ok = acceptance_report(1, "parameter identities", worst <= 1e-12, f"max rel dev {worst:.2e} (tol 1e-12)")
    assert ok


def test_criterion_02_free_limit(acceptance_report):
    worst = 0.0
    for n in (2, 50, 500):
        d = derive_params(SystemParams(n, 0.0))
        values = [
            model.occupancy(d, 0, 0),
            model.collective_occupancy(d, 0),
            model.participation_total(d),
            model.participation_collective(d),
            model.participation_fragment(d),
        ]
        worst = max(worst, max(abs(v - 1.0) for v in values))
    ok = acceptance_report(2, "non-interacting limit", worst <= 1e-14, f"max |x-1| {worst:.2e} (tol 1e-14)")
    assert ok


def test_criterion_03_nystrom_oracle(acceptance_report):
    worst, where = 0.0, ""
    for n, lam in STRESS:
        d = derive_params(SystemParams(n, lam))
        r_max = oracle.choose_radial_domain(d, 1e-14, 8, 6)
        for l in range(7):
            res = oracle.nystrom_spectrum(d, l, 200, r_max, refine=False)
            exact = np.array([model.occupancy(d, k, l) for k in range(9)])
            dev = float(np.max(np.abs(res.leading(9) - exact)))
            if dev > worst:
                worst, where = dev, f"N={n} lambda={lam:g} l={l}"
    ok = acceptance_report(
        3, "Nystrom vs analytic", worst <= 1e-8, f"max abs dev {worst:.2e} at {where} (tol 1e-8)"
    )
    assert ok


def test_criterion_04_bessel_reduction(acceptance_report):
    cfg = oracle.VerifyConfig()
    worst = 0.0
    for n, lam in STRESS:
        d = derive_params(SystemParams(n, lam))
        r_max = oracle.choose_radial_domain(d, cfg.domain_eps, cfg.n_check, cfg.l_check)
        worst = max(worst, oracle.check_fourier(d, cfg, r_max).deviation)
    ok = acceptance_report(4, "angular quadrature vs Bessel", worst <= 1e-10, f"max abs dev {worst:.2e} (tol 1e-10)")
    assert ok


def test_criterion_05_schmidt_reconstruction(acceptance_report):
    cfg = oracle.VerifyConfig(tail_eps=1e-10)
    results = []
    for n, lam in [(2, 1.0), (500, 1e2)]:
        results.append(oracle.check_reconstruction(derive_params(SystemParams(n, lam)), cfg))
    worst = max(r.deviation for r in results)
    ok = acceptance_report(5, "Schmidt reconstruction", worst <= 1e-8, f"max |defect - tail| {worst:.2e} (tol 1e-8)")
    assert ok


def test_criterion_06_participation_identity(acceptance_report):
    samples = random_params(1000) + [SystemParams(n, lam) for n, lam in STRESS]
    samples += [SystemParams(n, lam) for n in (2, 500) for lam in (0.0, 1e6, 1e8)]
    worst = 0.0
    for p in samples:
        d = derive_params(p)
        product = model.participation_fragment(d) * model.participation_collective(d)
        worst = max(worst, rel(model.participation_total(d), product))
    ok = acceptance_report(6, "K = kappa K_eta", worst <= 1e-14, f"max rel dev {worst:.2e} (tol 1e-14)")
    assert ok


def test_criterion_07_asymptotics(acceptance_report):
    lams = [1e4, 1e5, 1e6, 1e7, 1e8]
    ok, parts = True, []
    for n in (2, 500):
        eta_err, k_err = [], []
        for lam in lams:
            p = SystemParams(n, lam)
            d = derive_params(p)
            eta_err.append(rel(model.asymptotic_eta(p, 0), model.collective_occupancy(d, 0)))
            k_err.append(rel(model.asymptotic_k_eta(p), model.participation_collective(d)))
        ok &= strictly_decreasing(eta_err) and strictly_decreasing(k_err)
        ok &= eta_err[-1] < 0.05 and k_err[-1] < 0.05
        parts.append(f"N={n}: eta0 {eta_err[-1]:.1e}, K_eta {k_err[-1]:.1e}")
    detail = "; ".join(parts) + " at 1e8 (monotone, < 5%)"
    assert acceptance_report(7, "large-lambda asymptotics", ok, detail)


def test_criterion_08_condensation(acceptance_report):
    errors = []
    for n in (10**3, 10**4, 10**5, 10**6):
        p = SystemParams(n, 1.0)
        exact = 1.0 - model.occupancy(derive_params(p), 0, 0)
        errors.append(rel(exact, model.condensate_deficit_large_n(p)))
    ok = strictly_decreasing(errors) and errors[-1] <= 1e-2
    detail = f"rel err {errors[-1]:.2e} at N=1e6 (tol 1e-2), monotone from N=1e3: {strictly_decreasing(errors)}"
    assert acceptance_report(8, "condensate deficit", ok, detail)


def unimodal(values):
    peak = int(np.argmax(values))
    rising = all(b > a for a, b in zip(values[: peak + 1], values[1 : peak + 1]))
    falling = all(b < a for a, b in zip(values[peak:], values[peak + 1 :]))
    return rising and falling


def test_criterion_09_figure_shape(acceptance_report):
    opts = sweep.FigureOptions()
    header, rows = sweep.figure_data("fig2a", opts)
    i_lam, i_n, i_k = header.index("lambda"), header.index("N"), header.index("k_eta")
    peaks, shapes = {}, True
    for lam in sweep.FIG2A_LAMBDAS:
        series = sorted((r[i_n], r[i_k]) for r in rows if r[i_lam] == lam)
        ns = [s[0] for s in series]
        ks = [s[1] for s in series]
        shapes &= unimodal(ks)
        peaks[lam] = ns[int(np.argmax(ks))]
    spread = max(peaks.values()) / min(peaks.values())

    header_b, rows_b = sweep.figure_data("fig2b", opts)
    ns_b = [r[header_b.index("N")] for r in rows_b]
    eta0 = [r[header_b.index("eta0")] for r in rows_b]
    k_b = [sweep.evaluate(n, sweep.FIG2B_LAMBDA, 0).k_eta for n in ns_b]
    step_gap = abs(int(np.argmax(k_b)) - int(np.argmin(eta0)))

    ok = shapes and spread <= 10.0 and step_gap <= 1
    peak_text = ", ".join(f"{lam:g}->{n}" for lam, n in peaks.items())
    detail = f"unimodal {shapes}; argmax N per lambda {peak_text}; argmax K_eta vs argmin eta0 gap {step_gap} step(s)"
    assert acceptance_report(9, "figure shape", ok, detail)


def cli(*argv):
    proc = subprocess.run(
        [sys.executable, "-m", "moshinsky2d.cli", *argv, "--no-meta"],
        capture_output=True, check=False,
    )
    assert proc.returncode == 0, proc.stderr.decode()
    return proc.stdout


def test_criterion_10_determinism(acceptance_report):
    commands = [
        ["sweep", "--n-values", "log:2:10000:12", "--lambda-values", "log:0.01:1e8:12"],
        ["figure", "fig1a"],
        ["figure", "fig2a"],
    ]
    same = True
    for argv in commands:
        runs = [cli(*argv, "--jobs", "1") for _ in range(3)]
        runs.append(cli(*argv, "--jobs", "8"))
        same &= all(r == runs[0] for r in runs) and len(runs[0]) > 0
    detail = "sweep, fig1a, fig2a byte-identical over 3 runs and --jobs 1 vs 8" if same else "outputs differ"
    assert acceptance_report(10, "determinism", same, detail)
