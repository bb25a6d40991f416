"""Command-line interface.

Subcommands:

    certify    build the resonator for (N, T) and emit the certificate report
    search     direct grid search for the sup of |D_N| over a t-window
    resonator  print the resonator construction for an X (or an (N, T) pair)
    oracle     run the brute-force cross-checks (diag / bijection)
    sweep      certify over lists of N / seeds, one row per configuration

Exit codes: 0 success, 2 bad usage or configuration, 3 resource or
quadrature budget exhausted.  Reports embed the package version, a hash
of the fully-resolved configuration, and a UTC timestamp; apart from the
timestamp the output is byte-deterministic for a fixed configuration.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import asdict, dataclass
from datetime import datetime, timezone

from . import __version__
from .errors import QuadratureError, ResourceLimitError
from .dirichlet import grid_sup, resonance_guided_search
from .moments import (
    DEFAULT_NU,
    DEFAULT_TERM_BUDGET,
    diagonal_sum,
    ratio_and_bounds,
)
from .multfn import (
    UnimodularCMF,
    archimedean_cmf,
    constant_one,
    steinhaus_sample,
)
from .ntcore import build_factor_table
from .oracle import (
    ToyResonator,
    diagonal_sum_bruteforce,
    parametrization_bijection_check,
)
from .resonator import (
    MIN_X,
    Resonator,
    build_resonator,
    degenerate_resonator,
    window_bounds,
)

DEFAULT_GRID_BUDGET = 20_000_000


@dataclass
class RunConfig:
    n: int = 1
    c: float | None = None
    t: float | None = None
    delta: float = 0.5
    gamma: float = 0.5
    f: str = "one"
    seed: int = 0
    eps: float | None = None
    nu: int = DEFAULT_NU
    alpha: float | None = None
    exact: str = "auto"
    window_lo: float | None = None
    window_hi: float | None = None
    guided: bool = False
    x: float | None = None
    toy: str | None = None
    budget_terms: int = DEFAULT_TERM_BUDGET
    budget_points: int = DEFAULT_GRID_BUDGET
    trace_stride: int = 0
    trace_out: str | None = None
    sieve_limit: int | None = None
    out: str | None = None
    format: str = "json"

    def validate(self) -> None:
        if self.n < 1:
            raise ValueError("N must be a positive integer")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")
        if self.nu < 2:
            raise ValueError("nu must be at least 2")
        if self.alpha is not None and not 0.0 < self.alpha < 0.5:
            raise ValueError("alpha must lie in (0, 1/2)")
        if self.format not in ("json", "csv"):
            raise ValueError(f"unknown format {self.format!r}")

    def resolve_t(self) -> float:
        if (self.c is None) == (self.t is None):
            raise ValueError("exactly one of --c and --t must be given")
        if self.t is not None:
            t = float(self.t)
        else:
            t = float(self.n) ** self.c
        if t < 1.0:
            raise ValueError("T must be at least 1")
        return t

    def resolve_x(self, t: float) -> float:
        if self.x is not None:
            return float(self.x)
        return t ** (1.0 - 2.0 * self.delta / 3.0)


def _parse_f(spec_str: str, seed: int, prime_limit: int) -> UnimodularCMF:
    if spec_str == "one":
        return constant_one()
    if spec_str == "steinhaus":
        return steinhaus_sample(seed, prime_limit)
    if spec_str.startswith("arch:"):
        return archimedean_cmf(float(spec_str.split(":", 1)[1]))
    raise ValueError(f"unknown coefficient function {spec_str!r}")


def _parse_toy(text: str) -> ToyResonator:
    values: dict[int, float] = {}
    for item in text.split(","):
        k, _, v = item.partition(":")
        values[int(k)] = float(v)
    return ToyResonator(values=values)


def _build_table(cfg: RunConfig, t: float, x: float):
    if cfg.sieve_limit is not None:
        limit = cfg.sieve_limit
    else:
        limit = max(1024, cfg.n + 1)
        if x >= MIN_X:
            _, hi = window_bounds(x)
            limit = max(limit, math.ceil(hi) + 16)
    return build_factor_table(limit)


def _resonator_for(cfg: RunConfig, x: float, table) -> Resonator:
    if x >= MIN_X:
        return build_resonator(x, table)
    return degenerate_resonator(x)


# Fields that route output rather than shape the computation; excluded from
# the report envelope so reruns of the same computation hash identically.
_ROUTING_FIELDS = ("out", "format", "trace_out")


def _config_dict(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    for k in _ROUTING_FIELDS:
        d.pop(k, None)
    return d


def _envelope(command: str, cfg: RunConfig, report: dict) -> dict:
    blob = json.dumps(_config_dict(cfg), sort_keys=True).encode()
    return {
        "artifact": "rescert",
        "version": __version__,
        "command": command,
        "config": _config_dict(cfg),
        "config_hash": hashlib.sha256(blob).hexdigest()[:16],
        "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "report": report,
    }


def _emit(payload, cfg: RunConfig, csv_rows=None) -> None:
    if cfg.format == "csv":
        if csv_rows is None:
            raise ValueError("csv output is not available for this command")
        header, rows = csv_rows
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if v is None else v for v in row])
        text = buf.getvalue()
    else:
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Subcommands.


def cmd_certify(cfg: RunConfig) -> int:
    t = cfg.resolve_t()
    x = cfg.resolve_x(t)
    table = _build_table(cfg, t, x)
    res = _resonator_for(cfg, x, table)
    f = _parse_f(cfg.f, cfg.seed, table.limit)
    report = ratio_and_bounds(
        res,
        f,
        cfg.n,
        t,
        cfg.delta,
        cfg.gamma,
        table,
        nu=cfg.nu,
        alpha=cfg.alpha,
        budget=cfg.budget_terms,
        exact_mode=cfg.exact,
    )
    payload = _envelope("certify", cfg, report.to_dict())
    _emit(payload, cfg, csv_rows=(report.csv_header(), [report.csv_row()]))
    return 0


def cmd_search(cfg: RunConfig) -> int:
    t = cfg.resolve_t()
    table = _build_table(cfg, t, 1.0)
    f = _parse_f(cfg.f, cfg.seed, table.limit)
    lo = cfg.window_lo if cfg.window_lo is not None else -t
    hi = cfg.window_hi if cfg.window_hi is not None else t
    trace_path = cfg.trace_out
    if cfg.trace_stride > 0 and trace_path is None:
        trace_path = "rescert_trace.csv"
    if cfg.guided:
        x = cfg.resolve_x(t)
        res = _resonator_for(cfg, x, table)
        result = resonance_guided_search(
            res,
            f,
            cfg.n,
            t,
            cfg.eps,
            table,
            window=(lo, hi),
            eval_budget=cfg.budget_points,
        )
    else:
        result = grid_sup(
            f,
            cfg.n,
            t,
            cfg.eps,
            table,
            window=(lo, hi),
            eval_budget=cfg.budget_points,
            trace_path=trace_path,
            trace_stride=cfg.trace_stride,
        )
    rd = result.as_dict()
    payload = _envelope("search", cfg, rd)
    _emit(payload, cfg, csv_rows=(list(rd), [list(rd.values())]))
    return 0


def cmd_resonator(cfg: RunConfig) -> int:
    if cfg.x is not None:
        x = float(cfg.x)
    else:
        x = cfg.resolve_x(cfg.resolve_t())
    table = _build_table(cfg, 1.0, x)
    res = _resonator_for(cfg, x, table)
    rep = {
        "x": res.x,
        "lam": res.lam,
        "window_lo": res.window_lo,
        "window_hi": res.window_hi,
        "prime_count": len(res.primes),
        "is_empty": res.is_empty,
        "is_degenerate": res.is_degenerate,
        "alpha_default": res.alpha_default,
        "primes_head": list(res.primes[:16]),
        "r_head": [res.r_p[p] for p in res.primes[:16]],
        "t_head": [res.t_p[p] for p in res.primes[:16]],
    }
    payload = _envelope("resonator", cfg, rep)
    _emit(payload, cfg, csv_rows=(list(rep), [list(rep.values())]))
    return 0


def cmd_oracle(cfg: RunConfig, op: str) -> int:
    if cfg.x is None:
        raise ValueError("oracle needs --x")
    x_int = math.floor(cfg.x)
    if op == "bijection":
        ok = parametrization_bijection_check(cfg.n, x_int)
        rep = {"op": "bijection", "n": cfg.n, "x": x_int, "match": bool(ok)}
    elif op == "diag":
        if cfg.toy is None:
            raise ValueError("oracle diag needs --toy (e.g. '1:1,2:1')")
        toy = _parse_toy(cfg.toy)
        brute = diagonal_sum_bruteforce(toy, cfg.n, float(x_int))
        table = build_factor_table(max(1024, x_int + 1, cfg.n + 1))
        param = diagonal_sum(toy, cfg.n, float(x_int), table, cfg.budget_terms)
        rep = {
            "op": "diag",
            "n": cfg.n,
            "x": x_int,
            "bruteforce": brute,
            "parametrized": param,
            "match": bool(math.isclose(brute, param, rel_tol=1e-12, abs_tol=1e-12)),
        }
    else:
        raise ValueError(f"unknown oracle op {op!r}")
    payload = _envelope("oracle", cfg, rep)
    _emit(payload, cfg, csv_rows=(list(rep), [list(rep.values())]))
    return 0


def cmd_sweep(cfg: RunConfig, n_list: list[int], seed_list: list[int]) -> int:
    rows = []
    reports = []
    header = None
    for n in n_list:
        for seed in seed_list:
            sub = RunConfig(**{**asdict(cfg), "n": n, "seed": seed})
            t = sub.resolve_t()
            x = sub.resolve_x(t)
            table = _build_table(sub, t, x)
            res = _resonator_for(sub, x, table)
            f = _parse_f(sub.f, sub.seed, table.limit)
            report = ratio_and_bounds(
                res,
                f,
                sub.n,
                t,
                sub.delta,
                sub.gamma,
                table,
                nu=sub.nu,
                alpha=sub.alpha,
                budget=sub.budget_terms,
                exact_mode=sub.exact,
            )
            if header is None:
                header = ["n", "seed"] + report.csv_header()
            rows.append([n, seed] + report.csv_row())
            reports.append({"n": n, "seed": seed, "report": report.to_dict()})
    payload = _envelope("sweep", cfg, reports)
    _emit(payload, cfg, csv_rows=(header or [], rows))
    return 0


# ---------------------------------------------------------------------------
# Argument parsing.


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with defaults for any flag")
    p.add_argument("--n", type=int)
    p.add_argument("--c", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--f", dest="f")
    p.add_argument("--seed", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--nu", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--exact", choices=("auto", "always", "never"))
    p.add_argument("--x", type=float)
    p.add_argument("--toy")
    p.add_argument("--window-lo", type=float)
    p.add_argument("--window-hi", type=float)
    p.add_argument("--guided", action="store_true", default=None)
    p.add_argument("--budget-terms", type=int)
    p.add_argument("--budget-points", type=int)
    p.add_argument("--trace-stride", type=int)
    p.add_argument("--trace-out")
    p.add_argument("--sieve-limit", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"))


def _merge_config(args: argparse.Namespace) -> RunConfig:
    base = RunConfig()
    merged = asdict(base)
    if getattr(args, "config", None):
        with open(args.config) as fh:
            file_cfg = json.load(fh)
        unknown = set(file_cfg) - set(merged)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        merged.update(file_cfg)
    for key in merged:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    return RunConfig(**merged)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rescert",
        description="resonance certificates for Dirichlet polynomial sups",
    )
    ap.add_argument("--version", action="version", version=f"rescert {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("certify", "search", "resonator", "sweep"):
        p = sub.add_parser(name)
        _add_common(p)
        if name == "sweep":
            p.add_argument("--n-list", required=True)
            p.add_argument("--seed-list", default="0")
    p = sub.add_parser("oracle")
    p.add_argument("op", choices=("diag", "bijection"))
    _add_common(p)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = _merge_config(args)
        cfg.validate()
        if args.command == "certify":
            return cmd_certify(cfg)
        if args.command == "search":
            return cmd_search(cfg)
        if args.command == "resonator":
            return cmd_resonator(cfg)
        if args.command == "oracle":
            return cmd_oracle(cfg, args.op)
        if args.command == "sweep":
            n_list = [int(s) for s in args.n_list.split(",") if s]
            seed_list = [int(s) for s in args.seed_list.split(",") if s]
            return cmd_sweep(cfg, n_list, seed_list)
        raise ValueError(f"unknown command {args.command!r}")
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ResourceLimitError, QuadratureError) as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
