"""Command-line front end.

Subcommands::

    macpoly rho         evaluate rho_mu(t)
    macpoly moments     closed-form power/factorial moments and lattice-sum deltas
    macpoly recurrence  recurrence tables from both constructions
    macpoly quad        Gauss nodes and weights
    macpoly verify      identity reports at one parameter point
    macpoly sweep       identity reports over a parameter grid

Every option may also come from a JSON document given with ``--config``;
options on the command line take precedence.  Exit status is 0 when every
hard assertion holds, 1 on an assertion failure, 2 on a configuration error
and 3 on a numerical breakdown.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

import mpmath

from . import identities as ident
from .moments import factorial_moments, moment_bruteforce, power_moment
from .opoly import (
    BreakdownError,
    build_recurrence,
    build_recurrence_chebyshev,
    build_recurrence_stieltjes,
    gauss_rule,
    meixner_table,
)
from .specfun import DomainError, PrecisionContext, PrecisionError, rho
from .weight_measure import Params, TruncationError, truncate_measure

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_BREAKDOWN = 0, 1, 2, 3

DEFAULT_GRID = tuple(
    Params(nu, t, lam)
    for nu, t, lam in itertools.product((-0.5, 0.0, 1.5), (0.25, 1.0, 4.0), (0.2, 0.5, 0.8))
)

REPORT_KEYS = ("id", "nu", "t", "lambda", "n", "residual", "tolerance", "kind", "pass", "notes")


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass
class RunConfig:
    grid: list = field(default_factory=lambda: list(DEFAULT_GRID))
    N: int = 8
    n: int | None = None
    bits: int = 256
    tol_algebraic: float = 1e-30
    tol_fd: float = 1e-12
    fd_step: float = 1e-10
    ids: list | str = "all"
    output_format: str = "json"
    output_path: str | None = None
    workers: int = 1
    report_mode_strict: bool = False
    timestamp: bool = True
    mu: float | None = None
    rho_t: float | None = None
    family: str = "p"

    def context(self) -> PrecisionContext:
        try:
            return PrecisionContext(self.bits, self.tol_algebraic, self.tol_fd, self.fd_step,
                                    max(min(1e-25, self.tol_fd), self.tol_algebraic))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def id_list(self) -> list:
        if self.ids == "all":
            return ident.identity_ids()
        unknown = [i for i in self.ids if i not in ident.CATALOG]
        if unknown:
            raise ConfigError(f"unknown identity id(s): {', '.join(unknown)}")
        return sorted(set(self.ids))


# ---------------------------------------------------------------------------
# serialization


def _dec(x, ctx: PrecisionContext) -> str:
    """Decimal string that reads back to the same binary value at ctx.bits."""
    if isinstance(x, mpmath.mpf):
        return mpmath.nstr(x, ctx.dps + 1, strip_zeros=False, min_fixed=-1, max_fixed=1)
    return repr(x) if isinstance(x, float) else str(x)


def _num(x) -> str:
    return repr(float(x)) if not isinstance(x, str) else x


def _sort_key(r: ident.IdentityReport):
    return (r.id, float(r.params.nu), float(r.params.t), float(r.params.lam), r.n)


def _report_row(r: ident.IdentityReport, ctx: PrecisionContext) -> dict:
    return {
        "id": r.id,
        "nu": _num(r.params.nu),
        "t": _num(r.params.t),
        "lambda": _num(r.params.lam),
        "n": r.n,
        "residual": _dec(r.residual, ctx),
        "tolerance": repr(float(r.tolerance)),
        "kind": r.kind,
        "pass": r.passed,
        "notes": r.notes,
    }


def _meta(ctx: PrecisionContext, timestamp: bool) -> dict:
    meta = {"bits": ctx.bits, "tol_algebraic": repr(ctx.tol_algebraic),
            "tol_fd": repr(ctx.tol_fd), "fd_step": repr(ctx.fd_step)}
    if timestamp:
        meta["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return meta


def _write(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror}") from exc


def render_reports(reports, fmt: str, ctx: PrecisionContext, timestamp: bool = False) -> str:
    reports = sorted(reports, key=_sort_key)
    rows = [_report_row(r, ctx) for r in reports]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=REPORT_KEYS)
        writer.writeheader()
        for row in rows:
            writer.writerow({**row, "pass": "true" if row["pass"] else "false"})
        return buf.getvalue()
    if fmt != "json":
        raise ConfigError(f"unknown output format {fmt!r}")
    passed = sum(r.passed for r in reports)
    doc = {
        "meta": _meta(ctx, timestamp),
        "reports": rows,
        "summary": {"total": len(reports), "passed": passed, "failed": len(reports) - passed,
                    "report_mode": sum(r.report_mode for r in reports)},
    }
    return json.dumps(doc, indent=2) + "\n"


def emit_report(reports, fmt: str, path: str | None, ctx: PrecisionContext | None = None,
                timestamp: bool = False) -> None:
    """Write identity reports as JSON or CSV, sorted by (id, params, n)."""
    _write(render_reports(reports, fmt, ctx or PrecisionContext(), timestamp), path)


def _emit_table(rows: list, cfg: RunConfig, ctx: PrecisionContext, extra_meta=None) -> None:
    if cfg.output_format == "csv":
        buf = io.StringIO()
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
        _write(buf.getvalue(), cfg.output_path)
        return
    meta = _meta(ctx, cfg.timestamp)
    meta.update(extra_meta or {})
    _write(json.dumps({"meta": meta, "rows": rows}, indent=2) + "\n", cfg.output_path)


# ---------------------------------------------------------------------------
# subcommands


def _single_point(cfg: RunConfig) -> Params:
    if len(cfg.grid) != 1:
        raise ConfigError("this subcommand needs exactly one parameter point (--nu --t --lambda)")
    return cfg.grid[0]


def _cmd_rho(cfg: RunConfig, ctx: PrecisionContext) -> int:
    value = rho(cfg.mu, cfg.rho_t, ctx)
    _emit_table([{"mu": _num(cfg.mu), "t": _num(cfg.rho_t), "value": _dec(value, ctx)}], cfg, ctx)
    return EXIT_OK


def _cmd_moments(cfg: RunConfig, ctx: PrecisionContext) -> int:
    p = _single_point(cfg)
    top = cfg.n if cfg.n is not None else 6
    m = truncate_measure(p, max(top, 1), ctx)
    gammas = factorial_moments(p, top + 1, ctx)
    rows = []
    with ctx.working():
        for j in range(top + 1):
            mu_j = power_moment(j, p, ctx)
            mu_bf = moment_bruteforce(j, p, "power", ctx, measure=m)
            g_bf = moment_bruteforce(j, p, "factorial", ctx, measure=m)
            rows.append({
                "n": j,
                "power_moment": _dec(mu_j, ctx),
                "factorial_moment": _dec(gammas[j], ctx),
                "power_delta": _dec(abs(mu_j - mu_bf) / abs(mu_j), ctx),
                "factorial_delta": _dec(abs(gammas[j] - g_bf) / abs(gammas[j]), ctx),
            })
    _emit_table(rows, cfg, ctx, {"K": m.K})
    return EXIT_OK


def _cmd_recurrence(cfg: RunConfig, ctx: PrecisionContext) -> int:
    p = _single_point(cfg)
    N = cfg.N
    meta = {"family": cfg.family}
    if cfg.family == "q":
        cheb = ident.build_qfamily(p, N, ctx, "chebyshev").table
        stie = ident.build_qfamily(p, N, ctx, "stieltjes").table
        names = ("q", "h")
    else:
        cheb = build_recurrence_chebyshev(p, N, ctx)
        stie = build_recurrence_stieltjes(truncate_measure(p, N + 1, ctx), N, ctx)
        names = ("A", "B")
    meixner = None
    if float(p.t) == 0:
        meixner = meixner_table(p.nu, p.lam, N, ctx)
    rows, status = [], 0
    with ctx.working():
        for n in range(N):
            a_c, a_s = cheb.A[n + 1], stie.A[n + 1]
            b_c, b_s = cheb.B[n], stie.B[n]
            diff = max(abs(a_c - a_s) / (1 + abs(a_c)), abs(b_c - b_s) / (1 + abs(b_c)))
            row = {"n": n, f"{names[0]}_{{n+1}}": _dec(a_c, ctx), f"{names[1]}_n": _dec(b_c, ctx),
                   "disagreement": _dec(diff, ctx)}
            if meixner is not None:
                dm = max(abs(a_c**2 - meixner.A[n + 1] ** 2), abs(b_c - meixner.B[n]))
                row["meixner_delta"] = _dec(dm, ctx)
                status = max(status, dm > ctx.tol_identity)
            status = max(status, diff > ctx.tol_identity)
            rows.append(row)
    if meixner is not None:
        meta["meixner-limit"] = "mismatch" if status else "match"
    _emit_table(rows, cfg, ctx, meta)
    return EXIT_FAIL if status else EXIT_OK


def _cmd_quad(cfg: RunConfig, ctx: PrecisionContext) -> int:
    p = _single_point(cfg)
    nodes, wts = gauss_rule(build_recurrence(p, cfg.N, ctx), cfg.N, ctx)
    rows = [{"i": i, "node": _dec(x, ctx), "weight": _dec(w, ctx)}
            for i, (x, w) in enumerate(zip(nodes, wts))]
    _emit_table(rows, cfg, ctx)
    return EXIT_OK


def _verify_point(args):
    p, ids, ns, ctx = args
    out = []
    for id_ in ids:
        for n in ns:
            if ident.applicable(id_, p, n):
                out.append(ident.verify_identity(id_, p, n, ctx))
    return out


def run_reports(cfg: RunConfig, ctx: PrecisionContext) -> list:
    """IdentityReports for every (grid point, id, n) in the configuration."""
    ids = cfg.id_list()
    ns = [cfg.n] if cfg.n is not None else list(range(ident.DEFAULT_MAX_N + 1))
    if cfg.n is not None and not 0 <= cfg.n <= ident.MAX_N:
        raise ConfigError(f"n must lie in 0..{ident.MAX_N}")
    tasks = [(p, ids, ns, ctx) for p in cfg.grid]
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_verify_point, tasks))
    else:
        chunks = [_verify_point(t) for t in tasks]
    return sorted((r for chunk in chunks for r in chunk), key=_sort_key)


def _cmd_verify(cfg: RunConfig, ctx: PrecisionContext) -> int:
    reports = run_reports(cfg, ctx)
    if not reports:
        print("no identity applies to the requested (id, parameters, n)", file=sys.stderr)
    emit_report(reports, cfg.output_format, cfg.output_path, ctx, cfg.timestamp)
    failed = [r for r in reports if not r.passed and (cfg.report_mode_strict or not r.report_mode)]
    for r in failed:
        print(f"FAIL {r.id} {r.params.label()} n={r.n} residual={mpmath.nstr(r.residual, 4)}",
              file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {
    "rho": _cmd_rho,
    "moments": _cmd_moments,
    "recurrence": _cmd_recurrence,
    "quad": _cmd_quad,
    "verify": _cmd_verify,
    "sweep": _cmd_verify,
}


def dispatch(command: str, cfg: RunConfig) -> int:
    """Run one subcommand and map failures to exit codes."""
    try:
        ctx = cfg.context()
        return COMMANDS[command](cfg, ctx)
    except (ConfigError, DomainError, KeyError) as exc:
        print(f"macpoly: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BreakdownError, PrecisionError, TruncationError) as exc:
        print(f"macpoly: numerical breakdown: {exc}", file=sys.stderr)
        return EXIT_BREAKDOWN
    except OSError as exc:
        print(f"macpoly: {exc}", file=sys.stderr)
        return EXIT_CONFIG


# ---------------------------------------------------------------------------
# argument handling


def _params(nu, t, lam) -> Params:
    try:
        return Params(float(nu), float(t), float(lam))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid parameters (nu={nu}, t={t}, lambda={lam}): {exc}") from None


def _parse_grid(entries) -> list:
    grid = []
    for e in entries:
        if isinstance(e, dict):
            grid.append(_params(e.get("nu"), e.get("t"), e.get("lambda")))
        elif isinstance(e, (list, tuple)) and len(e) == 3:
            grid.append(_params(*e))
        else:
            raise ConfigError(f"grid entries must be [nu, t, lambda] or objects, got {e!r}")
    if not grid:
        raise ConfigError("empty parameter grid")
    return grid


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="JSON document with default options")
    common.add_argument("--nu", type=float)
    common.add_argument("--t", type=float)
    common.add_argument("--lambda", dest="lam", type=float)
    common.add_argument("--mu", type=float, help="order for the rho subcommand (default nu + 1)")
    common.add_argument("--n", type=int, help="polynomial or moment index")
    common.add_argument("--N", dest="N", type=int, help="table degree / number of Gauss nodes")
    common.add_argument("--bits", type=int)
    common.add_argument("--tol-algebraic", type=float)
    common.add_argument("--tol-fd", type=float)
    common.add_argument("--fd-step", type=float)
    common.add_argument("--id", help="comma-separated identity ids, or 'all'")
    common.add_argument("--grid", metavar="FILE", help="JSON list of [nu, t, lambda] points")
    common.add_argument("--family", choices=("p", "q"), help="recurrence family (default p)")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--workers", type=int)
    common.add_argument("--report-mode-strict", action="store_true", default=None,
                        help="count report-mode identities as hard assertions")
    common.add_argument("--no-timestamp", action="store_true", default=None,
                        help="omit the timestamp so that reports are byte-reproducible")

    parser = argparse.ArgumentParser(prog="macpoly", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "rho": "evaluate rho_mu(t)",
        "moments": "power and factorial moments with lattice-sum deltas",
        "recurrence": "recurrence tables from both constructions",
        "quad": "Gauss nodes and weights",
        "verify": "identity reports at one parameter point",
        "sweep": "identity reports over a parameter grid",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    doc = _load_json(args.config) if args.config else {}
    if not isinstance(doc, dict):
        raise ConfigError("the configuration document must be a JSON object")

    def pick(flag, key, default=None):
        value = getattr(args, flag)
        if value is not None:
            return value
        return doc.get(key, default)

    cfg = RunConfig()
    cfg.N = int(pick("N", "N", cfg.N))
    cfg.n = pick("n", "n")
    cfg.bits = int(pick("bits", "bits", cfg.bits))
    cfg.tol_algebraic = float(pick("tol_algebraic", "tol_algebraic", cfg.tol_algebraic))
    cfg.tol_fd = float(pick("tol_fd", "tol_fd", cfg.tol_fd))
    cfg.fd_step = float(pick("fd_step", "fd_step", cfg.fd_step))
    cfg.output_format = pick("format", "format", cfg.output_format)
    cfg.output_path = pick("out", "out")
    cfg.workers = int(pick("workers", "workers", cfg.workers))
    cfg.report_mode_strict = bool(pick("report_mode_strict", "report_mode_strict", False))
    cfg.timestamp = not pick("no_timestamp", "no_timestamp", False)
    cfg.mu = pick("mu", "mu")
    cfg.family = pick("family", "family", "p")
    if cfg.workers < 1:
        raise ConfigError("workers must be positive")
    if cfg.output_format not in ("json", "csv"):
        raise ConfigError(f"unknown format {cfg.output_format!r}")

    ids = pick("id", "ids", "all")
    if isinstance(ids, str):
        ids = "all" if ids == "all" else [s.strip() for s in ids.split(",") if s.strip()]
    cfg.ids = ids

    point = [pick("nu", "nu"), pick("t", "t"), pick("lam", "lambda")]
    if args.command == "rho":
        # rho_mu(t) needs only mu (or nu, with mu = nu + 1) and t
        if point[1] is None or (cfg.mu is None and point[0] is None):
            raise ConfigError("rho needs --t and one of --mu or --nu")
        cfg.mu = float(cfg.mu if cfg.mu is not None else float(point[0]) + 1)
        cfg.rho_t = float(point[1])
        return cfg
    if args.grid:
        cfg.grid = _parse_grid(_load_json(args.grid))
    elif any(v is not None for v in point):
        if any(v is None for v in point):
            raise ConfigError("--nu, --t and --lambda must be given together")
        cfg.grid = [_params(*point)]
    elif "grid" in doc:
        cfg.grid = _parse_grid(doc["grid"])
    elif args.command != "sweep":
        raise ConfigError(f"{args.command} needs --nu, --t and --lambda")
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"macpoly: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return dispatch(args.command, cfg)


if __name__ == "__main__":
    sys.exit(main())
