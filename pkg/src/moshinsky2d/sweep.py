"""Sweep rows and figure-panel data grids."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import model
from .model import SystemParams

OBSERVABLES = ("eta", "k_eta", "k_total", "kappa", "lambda_nl", "condensate")

DEFAULT_L_REPORT = 5


def log_grid(lo: float, hi: float, points: int) -> list[float]:
    if lo <= 0 or hi <= 0:
        raise ValueError("log-spaced grid needs positive bounds")
    if points < 1:
        raise ValueError("grid needs at least one point")
    if points == 1:
        return [float(lo)]
    return [float(v) for v in np.logspace(math.log10(lo), math.log10(hi), points)]


def int_log_grid(lo: int, hi: int, points: int) -> list[int]:
    """Log-spaced integers, rounded and deduplicated."""
    values = np.rint(np.logspace(math.log10(lo), math.log10(hi), points)).astype(int)
    return [int(v) for v in np.unique(values)]


def parse_values(text: str, integer: bool = False) -> list:
    """``"1,10,100"`` or ``"log:LO:HI:POINTS"``."""
    text = text.strip()
    if text.startswith("log:"):
        try:
            _, lo, hi, points = text.split(":")
        except ValueError:
            raise ValueError(f"range spec must be log:LO:HI:POINTS, got {text!r}") from None
        if integer:
            return int_log_grid(int(float(lo)), int(float(hi)), int(points))
        return log_grid(float(lo), float(hi), int(points))
    items = [v for v in text.split(",") if v.strip()]
    if not items:
        raise ValueError("empty value list")
    if integer:
        out = []
        for v in items:
            f = float(v)
            if f != int(f):
                raise ValueError(f"expected an integer, got {v!r}")
            out.append(int(f))
        return out
    return [float(v) for v in items]


@dataclass(frozen=True)
class SweepRow:
    n_particles: int
    lam: float
    t: float
    eta: tuple
    k_eta: float
    k_total: float
    kappa: float
    lambda_00: float
    condensate_deficit: float

    def columns(self, observables=OBSERVABLES) -> list[tuple[str, float]]:
        cols = [("N", self.n_particles), ("lambda", self.lam), ("t", self.t)]
        if "eta" in observables:
            cols += [(f"eta{l}", v) for l, v in enumerate(self.eta)]
        if "k_eta" in observables:
            cols.append(("k_eta", self.k_eta))
        if "k_total" in observables:
            cols.append(("k_total", self.k_total))
        if "kappa" in observables:
            cols.append(("kappa", self.kappa))
        if "lambda_nl" in observables:
            cols.append(("lambda00", self.lambda_00))
        if "condensate" in observables:
            cols.append(("cond_deficit", self.condensate_deficit))
        return cols


def evaluate(n_particles: int, lam: float, l_report: int = DEFAULT_L_REPORT) -> SweepRow:
    """Every scalar observable at one ``(N, Lambda)``.

    ``condensate_deficit`` is the large-N estimate ``sqrt(Lambda/2N)``, NaN
    for attractive interactions.
    """
    p = SystemParams(n_particles, lam)
    d = model.derive_params(p)
    deficit = model.condensate_deficit_large_n(p) if lam >= 0 else math.nan
    return SweepRow(
        n_particles=n_particles,
        lam=float(lam),
        t=d.t,
        eta=tuple(model.collective_occupancy(d, l) for l in range(l_report + 1)),
        k_eta=model.participation_collective(d),
        k_total=model.participation_total(d),
        kappa=model.participation_fragment(d),
        lambda_00=model.occupancy(d, 0, 0),
        condensate_deficit=deficit,
    )


def _evaluate_args(args):
    return evaluate(*args)


def run_sweep(n_values, lambda_values, l_report: int = DEFAULT_L_REPORT, jobs: int = 1):
    """Rows in N-major, Lambda-minor order; every pair is validated before any work."""
    pairs = [(int(n), float(lam)) for n in n_values for lam in lambda_values]
    if not pairs:
        raise ValueError("sweep needs at least one N and one lambda")
    for n, lam in pairs:
        model.validate(n, lam)
    tasks = [(n, lam, l_report) for n, lam in pairs]
    if jobs <= 1 or len(tasks) == 1:
        return [_evaluate_args(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_evaluate_args, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


# -- figure panels -----------------------------------------------------------

PANELS = ("fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig3a", "fig3b")

FIG1_LAMBDA = (1e-2, 1e8, 60)
FIG2_N = (2, 10_000, 50)
FIG2A_LAMBDAS = (1.0, 1e2, 1e4)
FIG2B_LAMBDA = 1e2
FIG3_N = (2, 50, 500)


@dataclass(frozen=True)
class FigureOptions:
    lambda_min: float = FIG1_LAMBDA[0]
    lambda_max: float = FIG1_LAMBDA[1]
    lambda_points: int = FIG1_LAMBDA[2]
    n_min: int = FIG2_N[0]
    n_max: int = FIG2_N[1]
    n_points: int = FIG2_N[2]
    l_report: int | None = None
    n_values: tuple | None = None
    lambda_values: tuple | None = None


def lambda_axis(opts: FigureOptions) -> list[float]:
    """``Lambda = 0`` anchor followed by the log-spaced grid."""
    return [0.0] + log_grid(opts.lambda_min, opts.lambda_max, opts.lambda_points)


def n_axis(opts: FigureOptions) -> list[int]:
    return int_log_grid(opts.n_min, opts.n_max, opts.n_points)


def _asym(fn, p):
    return fn(p) if p.lam > 0 else math.nan


def figure_data(panel: str, opts: FigureOptions | None = None, jobs: int = 1):
    """Header and rows for one figure panel.

    Returns
    -------
    header : list of str
    rows : list of tuple
    """
    opts = opts or FigureOptions()
    if panel not in PANELS:
        raise KeyError(panel)
    if panel in ("fig1a", "fig1b", "fig1c", "fig1d"):
        n = 2 if panel in ("fig1a", "fig1c") else 500
        if opts.n_values:
            n = opts.n_values[0]
        lams = list(opts.lambda_values) if opts.lambda_values else lambda_axis(opts)
        if panel in ("fig1a", "fig1b"):
            l_rep = DEFAULT_L_REPORT if opts.l_report is None else opts.l_report
            rows_in = run_sweep([n], lams, l_rep, jobs)
            header = ["N", "lambda"] + [f"eta{l}" for l in range(l_rep + 1)]
            header += [f"eta{l}_asym" for l in range(l_rep + 1)]
            rows = []
            for row in rows_in:
                p = SystemParams(n, row.lam)
                asym = [_asym(lambda q, l=l: model.asymptotic_eta(q, l), p) for l in range(l_rep + 1)]
                rows.append((n, row.lam, *row.eta, *asym))
            return header, rows
        rows_in = run_sweep([n], lams, 0, jobs)
        header = ["N", "lambda", "k_eta", "k_eta_asym"]
        rows = [
            (n, r.lam, r.k_eta, _asym(model.asymptotic_k_eta, SystemParams(n, r.lam)))
            for r in rows_in
        ]
        return header, rows
    if panel == "fig2a":
        ns = list(opts.n_values) if opts.n_values else n_axis(opts)
        lams = list(opts.lambda_values) if opts.lambda_values else list(FIG2A_LAMBDAS)
        rows_in = run_sweep(ns, lams, 0, jobs)
        rows_in.sort(key=lambda r: (lams.index(r.lam), r.n_particles))
        return ["lambda", "N", "k_eta"], [(r.lam, r.n_particles, r.k_eta) for r in rows_in]
    if panel == "fig2b":
        ns = list(opts.n_values) if opts.n_values else n_axis(opts)
        lam = opts.lambda_values[0] if opts.lambda_values else FIG2B_LAMBDA
        l_rep = 2 if opts.l_report is None else opts.l_report
        rows_in = run_sweep(ns, [lam], l_rep, jobs)
        header = ["N", "lambda"] + [f"eta{l}" for l in range(l_rep + 1)]
        return header, [(r.n_particles, r.lam, *r.eta) for r in rows_in]
    # fig3a / fig3b
    ns = list(opts.n_values) if opts.n_values else list(FIG3_N)
    lams = list(opts.lambda_values) if opts.lambda_values else lambda_axis(opts)
    rows_in = run_sweep(ns, lams, 0, jobs)
    if panel == "fig3a":
        return ["N", "lambda", "k_total"], [(r.n_particles, r.lam, r.k_total) for r in rows_in]
    return ["N", "lambda", "kappa"], [(r.n_particles, r.lam, r.kappa) for r in rows_in]
