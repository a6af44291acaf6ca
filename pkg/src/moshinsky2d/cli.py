"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or validation
error, 3 resource limit.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import time

from . import __version__, model, oracle, sweep
from .errors import DomainError, ResourceLimitError

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

JOBS_ENV = "MOSHINSKY2D_JOBS"

PARAM_FIELDS = ("omega", "gamma", "a_norm", "b_coef", "c_coef", "t", "z2", "s")


class UsageError(Exception):
    pass


# -- formatting --------------------------------------------------------------


def fmt_csv(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def fmt_table(value) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def json_number(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def meta_block(args, extra=None) -> dict:
    meta = {"program": "moshinsky2d", "version": __version__, "command": args.command}
    meta["argv"] = " ".join(args.argv)
    meta["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    if extra:
        meta.update(extra)
    return meta


def render(args, header, rows, extra_meta=None, trailer=None) -> str:
    """Rows in the requested format; ``trailer`` is an optional ``(key, value)`` record."""
    out = io.StringIO()
    meta = None if args.no_meta else meta_block(args, extra_meta)
    if args.format == "csv":
        if meta:
            for key, value in meta.items():
                out.write(f"# {key}: {value}\n")
        out.write(",".join(header) + "\n")
        for row in rows:
            out.write(",".join(fmt_csv(v) for v in row) + "\n")
        if trailer:
            key, value = trailer
            out.write(f"{key},{',' * (len(header) - 2)}{fmt_csv(value)}\n")
    elif args.format == "json":
        doc = {}
        if meta:
            doc["meta"] = meta
        doc["rows"] = [{k: json_number(v) for k, v in zip(header, row)} for row in rows]
        if trailer:
            doc[trailer[0]] = trailer[1]
        out.write(json.dumps(doc, indent=1, allow_nan=False) + "\n")
    else:
        if meta and extra_meta:
            for key, value in extra_meta.items():
                out.write(f"# {key}: {value}\n")
        cells = [header] + [[fmt_table(v) for v in row] for row in rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
        for r in cells:
            out.write("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() + "\n")
        if trailer:
            out.write(f"{trailer[0]}: {fmt_table(trailer[1])}\n")
    return out.getvalue()


def emit(args, text: str) -> None:
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def extrapolation_meta(lams) -> dict:
    attractive = sorted({lam for lam in lams if lam < 0})
    if not attractive:
        return {}
    sys.stderr.write("warning: lambda < 0 lies outside the published range (extrapolated)\n")
    return {"extrapolated": ",".join(repr(v) for v in attractive)}


# -- commands ----------------------------------------------------------------


def system_params(args) -> model.SystemParams:
    if args.n is None or args.lam is None:
        raise UsageError("--n and --lambda are required")
    return model.SystemParams(args.n, args.lam)


def cmd_params(args) -> int:
    p = system_params(args)
    d = model.derive_params(p)
    header = ["N", "lambda"] + list(PARAM_FIELDS)
    row = (p.n_particles, float(p.lam)) + tuple(getattr(d, f) for f in PARAM_FIELDS)
    if args.format == "json":
        doc = {} if args.no_meta else {"meta": meta_block(args, extrapolation_meta([p.lam]))}
        doc["params"] = dict(zip(header, row))
        emit(args, json.dumps(doc, indent=1) + "\n")
        return EXIT_OK
    if args.format == "table":
        extra = extrapolation_meta([p.lam])
        lines = [f"{k:>8}  {fmt_table(v)}" for k, v in zip(header, row)]
        if extra:
            lines.append("    note  extrapolated (lambda < 0)")
        emit(args, "\n".join(lines) + "\n")
        return EXIT_OK
    emit(args, render(args, header, [row], extrapolation_meta([p.lam])))
    return EXIT_OK


def cmd_occupancies(args) -> int:
    p = system_params(args)
    d = model.derive_params(p)
    explicit = args.n_max is not None or args.l_max is not None
    if explicit and args.tail_eps is not None:
        raise UsageError("give either --tail-eps or --n-max/--l-max, not both")
    if explicit:
        if args.n_max is None or args.l_max is None:
            raise UsageError("explicit truncation needs both --n-max and --l-max")
        table = model.build_occupancy_table(
            d, n_max=args.n_max, l_max=args.l_max, max_entries=args.max_entries
        )
    else:
        eps = 1e-10 if args.tail_eps is None else args.tail_eps
        table = model.build_occupancy_table(d, eps, max_entries=args.max_entries)
    rows = table.sorted_entries()
    extra = {"n_max": table.n_max, "l_max": table.l_max}
    extra.update(extrapolation_meta([p.lam]))
    emit(args, render(args, ["n", "l", "occupancy"], rows, extra, ("tail_mass", table.tail_mass)))
    return EXIT_OK


def cmd_collective(args) -> int:
    p = system_params(args)
    d = model.derive_params(p)
    l_max = sweep.DEFAULT_L_REPORT if args.l_max is None else args.l_max
    rows = []
    for l in range(-l_max, l_max + 1):
        eta = model.collective_occupancy(d, l)
        rows.append((l, eta, p.n_particles * eta))
    emit(args, render(args, ["l", "eta", "particles"], rows, extrapolation_meta([p.lam])))
    return EXIT_OK


def cmd_participation(args) -> int:
    p = system_params(args)
    d = model.derive_params(p)
    k_eta = model.participation_collective(d)
    k_total = model.participation_total(d)
    kappa = model.participation_fragment(d)
    header = ["N", "lambda", "k_eta", "k_total", "kappa", "identity_residual", "k_eta_asym"]
    k_eta_asym = model.asymptotic_k_eta(p) if p.lam > 0 else math.nan
    row = (p.n_particles, float(p.lam), k_eta, k_total, kappa, k_total - kappa * k_eta, k_eta_asym)
    emit(args, render(args, header, [row], extrapolation_meta([p.lam])))
    return EXIT_OK


def figure_options(args) -> sweep.FigureOptions:
    kw = {}
    for name in ("lambda_min", "lambda_max", "lambda_points", "n_min", "n_max", "n_points"):
        value = getattr(args, name, None)
        if value is not None:
            kw[name] = value
    if args.l_max is not None:
        kw["l_report"] = args.l_max
    if args.n_values:
        kw["n_values"] = tuple(sweep.parse_values(args.n_values, integer=True))
    if args.lambda_values:
        kw["lambda_values"] = tuple(sweep.parse_values(args.lambda_values))
    return sweep.FigureOptions(**kw)


def cmd_figure(args) -> int:
    if args.panel not in sweep.PANELS:
        raise UsageError(f"unknown panel {args.panel!r}; valid: {', '.join(sweep.PANELS)}")
    opts = figure_options(args)
    header, rows = sweep.figure_data(args.panel, opts, jobs=args.jobs)
    lams = {row[header.index("lambda")] for row in rows}
    emit(args, render(args, header, rows, {"panel": args.panel, **extrapolation_meta(lams)}))
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.n_values is None and args.n is None:
        raise UsageError("sweep needs --n-values (or --n)")
    if args.lambda_values is None and args.lam is None:
        raise UsageError("sweep needs --lambda-values (or --lambda)")
    ns = sweep.parse_values(args.n_values, integer=True) if args.n_values else [args.n]
    lams = sweep.parse_values(args.lambda_values) if args.lambda_values else [args.lam]
    observables = sweep.OBSERVABLES
    if args.observables:
        observables = tuple(o.strip() for o in args.observables.split(","))
        bad = [o for o in observables if o not in sweep.OBSERVABLES]
        if bad:
            raise UsageError(f"unknown observables {bad}; valid: {', '.join(sweep.OBSERVABLES)}")
    l_report = sweep.DEFAULT_L_REPORT if args.l_max is None else args.l_max
    rows = sweep.run_sweep(ns, lams, l_report, jobs=args.jobs)
    header = [name for name, _ in rows[0].columns(observables)]
    data = [tuple(v for _, v in r.columns(observables)) for r in rows]
    emit(args, render(args, header, data, extrapolation_meta(lams)))
    return EXIT_OK


def cmd_verify(args) -> int:
    p = system_params(args)
    cfg = oracle.VerifyConfig(level=args.level)
    if args.nodes is not None:
        cfg = oracle.VerifyConfig(level=args.level, m=args.nodes)
    perturb = None
    if args.inject_t_scale is not None:
        scale = args.inject_t_scale
        perturb = lambda d: d.replace(t=d.t * scale)  # noqa: E731
    report = oracle.verify_all(p, cfg, perturb=perturb)
    if args.format == "json":
        doc = report.to_dict()
        if not args.no_meta:
            doc = {"meta": meta_block(args), **doc}
        emit(args, json.dumps(doc, indent=1) + "\n")
    else:
        lines = [f"verify N={p.n_particles} lambda={p.lam!r} level={args.level}"]
        for c in report.checks:
            status = "PASS" if c.passed else "FAIL"
            detail = f"  ({c.detail})" if c.detail else ""
            lines.append(
                f"  {status}  {c.name:<26} deviation={c.deviation:.3e}  "
                f"threshold={c.threshold:.1e}{detail}"
            )
        lines.append("all checks passed" if report.passed else "VERIFICATION FAILED")
        emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


COMMANDS = {
    "params": cmd_params,
    "occupancies": cmd_occupancies,
    "collective": cmd_collective,
    "participation": cmd_participation,
    "figure": cmd_figure,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


# -- argument parsing ----------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _default_jobs() -> int:
    raw = os.environ.get(JOBS_ENV)
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _common(sp, default_format="table"):
    sp.add_argument("--config", help="key = value file mirroring the flags; flags win")
    sp.add_argument("--n", type=int, help="number of bosons N (≥ 2)")
    sp.add_argument("--lambda", dest="lam", type=float, help="interaction strength Lambda")
    sp.add_argument("--format", choices=("csv", "json", "table"), default=default_format)
    sp.add_argument("--tail-eps", type=float)
    sp.add_argument("--n-max", type=int)
    sp.add_argument("--l-max", type=int)
    sp.add_argument("--out", help="output path (default: standard output)")
    sp.add_argument("--no-meta", action="store_true", help="omit metadata (byte-stable output)")
    sp.add_argument("--jobs", type=int, default=_default_jobs())


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="moshinsky2d", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = subs.add_parser("params", help="derived kernel parameters")
    _common(sp)
    sp = subs.add_parser("occupancies", help="natural-orbital occupancies with tail mass")
    _common(sp)
    sp.add_argument("--max-entries", type=int, default=model.MAX_TABLE_ENTRIES)
    sp = subs.add_parser("collective", help="collective occupancies eta_l")
    _common(sp)
    sp = subs.add_parser("participation", help="participations K_eta, K, kappa")
    _common(sp)
    sp = subs.add_parser("figure", help="data for one figure panel")
    sp.add_argument("panel", help=", ".join(sweep.PANELS))
    _common(sp, default_format="csv")
    sp.add_argument("--lambda-min", type=float)
    sp.add_argument("--lambda-max", type=float)
    sp.add_argument("--lambda-points", type=int)
    sp.add_argument("--n-min", type=int)
    sp.add_argument("--n-points", type=int)
    sp.add_argument("--n-values")
    sp.add_argument("--lambda-values")
    sp = subs.add_parser("sweep", help="observables over an (N, Lambda) grid")
    _common(sp, default_format="csv")
    sp.add_argument("--n-values", help="comma list or log:LO:HI:POINTS")
    sp.add_argument("--lambda-values", help="comma list or log:LO:HI:POINTS")
    sp.add_argument("--observables", help=",".join(sweep.OBSERVABLES))
    sp = subs.add_parser("verify", help="cross-check closed forms against the numerical oracle")
    _common(sp)
    sp.add_argument("--level", choices=("quick", "full"), default="quick")
    sp.add_argument("--nodes", type=int, help="Nystrom node count (default 200)")
    sp.add_argument("--inject-t-scale", type=float, help=argparse.SUPPRESS)
    return parser


def _coerce(action, raw: str):
    if isinstance(action, argparse._StoreTrueAction):
        lowered = raw.strip().lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise UsageError(f"config: {action.dest} expects a boolean, got {raw!r}")
    return raw  # argparse converts string defaults through the action type


def read_config(path: str) -> dict:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.lstrip("-").replace("-", "_")] = value
    return values


def apply_config(parser, argv):
    """Reparse with config-file values installed as subcommand defaults."""
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    try:
        values = read_config(args.config)
    except OSError as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from None
    sub = parser._subparsers._group_actions[0].choices[args.command]
    by_dest = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, raw in values.items():
        dest = "lam" if key == "lambda" else key
        if dest not in by_dest or dest in ("help", "config"):
            raise UsageError(f"config: unknown key {key!r}")
        defaults[dest] = _coerce(by_dest[dest], raw)
    for dest, value in defaults.items():
        by_dest[dest].default = value
    return parser.parse_args(argv)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = apply_config(parser, argv)
        args.argv = argv
        return COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"moshinsky2d: error: {exc}\n")
        return EXIT_USAGE
    except (DomainError, ValueError) as exc:
        sys.stderr.write(f"moshinsky2d: error: {exc}\n")
        return EXIT_USAGE
    except ResourceLimitError as exc:
        sys.stderr.write(f"moshinsky2d: error: {exc}\n")
        return EXIT_RESOURCE


if __name__ == "__main__":
    raise SystemExit(main())
