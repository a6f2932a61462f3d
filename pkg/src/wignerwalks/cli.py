"""Command line front end.

Subcommands: enumerate, classify, reduce, verify, moments, report.
Settings come from an optional JSON/YAML config file and are overridden by
flags.  Exit codes: 0 ok, 1 verification failure, 2 config or input
error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from collections import Counter
from dataclasses import asdict, dataclass, field, fields, replace
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import bounds, classify, dyck, io, moments, reduction, walks
from .errors import BudgetExceeded, ConfigError, ValidationError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3


@dataclass
class RunConfig:
    s: list = field(default_factory=lambda: [1, 2, 3, 4, 5])
    n: list = field(default_factory=lambda: [2, 3, 4])
    V: object = "rademacher"  # name or list of rationals V_2, V_4, ...
    C0: float | None = None
    C1_cutoff: int = 10_000
    C2: float = bounds.C2
    eps: str = "1/8"
    mu: float = 1.0
    alpha: str = "1/25"
    U: float = 1.0
    q0: int = moments.Q0
    seed: int = 0
    trials: int = 2000
    lam: float = 0.5
    B_s: int = 12
    openness: str = "odd_edge"
    zero_diagonal: bool = False
    joint_slots: str = "s"  # "s" or "s+1"
    lemma_6_1_U: float = 2.0
    max_catalan: int = dyck.MAX_CATALAN
    max_walks: int = walks.MAX_WALKS
    max_index_paths: int = moments.MAX_INDEX_PATHS
    input: str | None = None
    out: str = "out"
    format: str = "csv"

    def validate(self) -> "RunConfig":
        if not self.s or not self.n:
            raise ConfigError("s and n ranges must be non-empty")
        if any(int(x) < 0 for x in self.s) or any(int(x) < 1 for x in self.n):
            raise ConfigError("s must be >= 0 and n >= 1")
        for name in ("max_catalan", "max_walks", "max_index_paths", "trials", "C1_cutoff"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if not 0 < self.eps_value < Fraction(1, 6):
            raise ConfigError("eps must lie in (0, 1/6)")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.joint_slots not in ("s", "s+1"):
            raise ConfigError("joint_slots must be 's' or 's+1'")
        if self.openness not in classify.OPENNESS_ALIASES:
            raise ConfigError(f"unknown openness rule {self.openness!r}")
        self.moment_sequence()
        return self

    @property
    def eps_value(self) -> Fraction:
        try:
            return Fraction(str(self.eps))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"eps is not a rational: {self.eps!r}") from None

    def moment_sequence(self) -> tuple[Fraction, ...]:
        if isinstance(self.V, str):
            if self.V not in moments.NAMED_LAWS:
                raise ConfigError(f"unknown moment sequence {self.V!r}")
            return moments.NAMED_LAWS[self.V]().moments(self.q0 // 2)
        try:
            V = tuple(Fraction(str(v)) for v in self.V)
        except (TypeError, ValueError, ZeroDivisionError):
            raise ConfigError(f"malformed moment sequence {self.V!r}") from None
        if not V or V[0] != 1 or any(v < 0 for v in V):
            raise ConfigError("moment sequence must start with V_2 = 1 and be non-negative")
        return V

    def spec(self, n: int) -> moments.MomentSpec:
        return moments.MomentSpec(n, self.moment_sequence(), zero_diagonal=self.zero_diagonal)

    def c0(self) -> float:
        if self.C0 is not None:
            return self.C0
        return bounds.constant_C0(self.U, bounds.constant_C1(self.C1_cutoff).value)


def _parse_range(text: str) -> list[int]:
    out: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def load_config(path: str | None) -> dict:
    if not path:
        return {}
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        if p.suffix in (".yaml", ".yml"):
            import yaml

            data = yaml.safe_load(text) or {}
        else:
            data = json.loads(text)
    except Exception as exc:  # parse errors from either library
        raise ConfigError(f"cannot parse config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    return data


def build_config(args: argparse.Namespace) -> RunConfig:
    data = load_config(args.config)
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("s", "n"):
        if key in data and not isinstance(data[key], list):
            data[key] = _parse_range(data[key])
    for key in known:
        value = getattr(args, key, None)
        if value is None:
            continue
        if key in ("s", "n"):
            value = _parse_range(value)
        elif key == "V" and "," in value:
            value = value.split(",")
        data[key] = value
    try:
        cfg = RunConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return cfg.validate()


# ------------------------------------------------------------------ helpers


def _emit_error(kind: str, message: str, **extra) -> None:
    print(json.dumps({"error": kind, "message": message, **extra}, sort_keys=True), file=sys.stderr)


def _load_or_enumerate(cfg: RunConfig) -> list[walks.Walk]:
    if cfg.input:
        return io.read_walks(cfg.input)
    return [w for s in cfg.s for w in walks.enumerate_even_walks(s, cap=cfg.max_walks)]


def _out(cfg: RunConfig, name: str) -> Path:
    return Path(cfg.out) / name


# ------------------------------------------------------------------ commands


def cmd_enumerate(cfg: RunConfig) -> int:
    for s in cfg.s:
        ws = walks.enumerate_even_walks(s, cap=cfg.max_walks)
        io.write_walks(_out(cfg, f"walks_s{s}.jsonl"), ws)
        by_nu: Counter = Counter()
        by_theta: Counter = Counter()
        for w in ws:
            by_nu[",".join(map(str, classify.profile(w).nu))] += 1
            by_theta[str(walks.dyck_of(w))] += 1
        summary = {"s": s, "walks": len(ws), "by_nu": dict(sorted(by_nu.items())), "by_theta": dict(sorted(by_theta.items()))}
        io.write_text(_out(cfg, f"summary_s{s}.json"), io.dump_json(summary))
        print(f"s={s}: {len(ws)} walks")
    return EXIT_OK


def cmd_classify(cfg: RunConfig) -> int:
    ws = _load_or_enumerate(cfg)
    lines = [json.dumps({"labels": list(w.labels), **classify.profile(w, cfg.openness).to_json()}, sort_keys=True) for w in ws]
    io.write_text(_out(cfg, "profiles.jsonl"), "".join(line + "\n" for line in lines))
    print(f"{len(ws)} profiles")
    return EXIT_OK


def cmd_reduce(cfg: RunConfig) -> int:
    ws = _load_or_enumerate(cfg)
    lines = []
    for w in ws:
        trace = reduction.reduce_full(w)
        rec = {
            "labels": list(w.labels),
            "reduced": list(trace.reduced.labels),
            "reduced_times": list(trace.reduced.times),
            "removed": [list(p) for p in trace.removed_step_pairs],
            **reduction.cells(w, trace).to_json(),
        }
        lines.append(json.dumps(rec, sort_keys=True))
    io.write_text(_out(cfg, "cells.jsonl"), "".join(line + "\n" for line in lines))
    print(f"{len(ws)} reductions")
    return EXIT_OK


def verify_reports(cfg: RunConfig) -> list[bounds.BoundReport]:
    """Every per-walk check for every walk, then the cell and grid checks."""
    V6 = moments.uniform().moments(6)
    supplied = io.read_walks(cfg.input) if cfg.input else None
    out: list[bounds.BoundReport] = []
    for s in cfg.s:
        ws = [w for w in supplied if w.s == s] if supplied is not None else None
        census = bounds.run_census(s, ws, V6=V6, U=cfg.lemma_6_1_U, openness=cfg.openness, cap=cfg.max_walks, keep_walks=True)
        out.extend(census.walk_reports())
        out.extend(census.fine_reports())
        out.extend(census.joint_reports(None if cfg.joint_slots == "s" else s + 1))
    out.extend(bounds.lemma_4_1_grid())
    out.extend(bounds.lemma_4_17_reports(10))
    return out


def cmd_verify(cfg: RunConfig) -> int:
    reports = verify_reports(cfg)
    failed = [r for r in reports if not r.satisfied]
    text = io.reports_csv(reports) if cfg.format == "csv" else io.dump_json([_report_json(r) for r in reports])
    io.write_text(_out(cfg, f"verify.{cfg.format}"), text)
    summary = Counter((r.bound_id, r.satisfied) for r in reports)
    for (bid, ok), c in sorted(summary.items()):
        print(f"{bid:32s} {'ok  ' if ok else 'FAIL'} {c}")
    if failed:
        io.write_text(_out(cfg, "witnesses.json"), io.dump_json([_report_json(r) for r in failed]))
        return EXIT_FAIL
    return EXIT_OK


def _report_json(r: bounds.BoundReport) -> dict:
    return {"bound_id": r.bound_id, "params": r.params, "lhs": io.fmt_value(r.lhs), "rhs": io.fmt_value(r.rhs), "satisfied": r.satisfied}


def moment_rows(cfg: RunConfig) -> list[tuple]:
    rows = []
    C0 = cfg.c0()
    for s in cfg.s:
        poly = moments.moment_polynomial(s, cfg.moment_sequence(), cfg.zero_diagonal, cap=cfg.max_walks)
        for n in cfg.n:
            spec = cfg.spec(n)
            exact = moments.exact_moment(s, spec, cap=cfg.max_walks)
            rows.append(io.moment_row(s, n, "exact", exact))
            rows.append(io.moment_row(s, n, "polynomial", poly.moment(n)))
            if n ** (2 * s) <= cfg.max_index_paths:
                rows.append(io.moment_row(s, n, "brute_force", moments.brute_force_moment(s, spec, cap=cfg.max_index_paths)))
            z = moments.z_decomposition(s, spec, C0, cfg.eps_value, cap=cfg.max_walks)
            if sum(z) != exact:
                raise AssertionError(f"Z-partition does not sum to the moment at s={s}, n={n}")
            for i, part in enumerate(z, 1):
                rows.append(io.moment_row(s, n, f"z{i}", part))
            if isinstance(cfg.V, str) and cfg.trials >= 2:
                mc = moments.mc_moment(s, n, cfg.V, cfg.trials, cfg.seed)
                rows.append(io.moment_row(s, n, "mc", estimate=mc.estimate, stderr=mc.stderr))
    return rows


def cmd_moments(cfg: RunConfig) -> int:
    rows = moment_rows(cfg)
    io.write_text(_out(cfg, "moments.csv"), io.csv_text(io.MOMENTS_HEADER, rows))
    for row in rows:
        if row[2] == "exact":
            print(f"s={row[0]} n={row[1]} exact={row[3]}/{row[4]}")
    return EXIT_OK


def cmd_report(cfg: RunConfig) -> int:
    law = cfg.V if isinstance(cfg.V, str) else "rademacher"
    C = cfg.c0() + 37
    rows = bounds.theorem_4_1_report(cfg.mu, cfg.s, law, U=cfg.U, trials=cfg.trials, seed=cfg.seed, B_s=cfg.B_s, C=C)
    header = ("s", "n", "estimate", "stderr", "ratio", "ratio_err", "catalan_ratio", "B", "log_bound", "verdict", "exact")
    table = [
        (r.s, r.n, r.estimate, r.stderr, r.ratio, r.ratio_err, r.catalan_ratio, r.B, r.log_bound, r.verdict, "" if r.exact is None else io.fmt_rational(r.exact))
        for r in rows
    ]
    io.write_text(_out(cfg, "scaling.csv"), io.csv_text(header, table))
    b_rows = []
    for s in range(1, cfg.B_s + 1):
        est = dyck.estimate_B(s, cfg.lam, "exhaustive", cap=cfg.max_catalan)
        b_rows.append((s, cfg.lam, est.value, est.stderr, est.mode))
    io.write_text(_out(cfg, "B_trend.csv"), io.csv_text(("s", "lambda", "B", "stderr", "mode"), b_rows))
    hist_rows = []
    for s in range(1, cfg.B_s + 1):
        for h, c in enumerate(dyck.max_height_histogram(s, cap=cfg.max_catalan)):
            if c:
                hist_rows.append((s, h, int(c)))
    io.write_text(_out(cfg, "height_histogram.csv"), io.csv_text(("s", "max_height", "count"), hist_rows))
    for r in rows:
        print(f"s={r.s:3d} n={r.n:4d} ratio={r.ratio:.6f} +- {r.ratio_err:.6f} {r.verdict}")
    return EXIT_OK


COMMANDS = {
    "enumerate": cmd_enumerate,
    "classify": cmd_classify,
    "reduce": cmd_reduce,
    "verify": cmd_verify,
    "moments": cmd_moments,
    "report": cmd_report,
}

DEFAULT_S = {"verify": "1-5", "report": "4-10", "enumerate": "0-4", "classify": "3", "reduce": "3", "moments": "1-3"}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wignerwalks", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON or YAML file with RunConfig keys")
        p.add_argument("--s", help="half-lengths, e.g. 1-5 or 2,4")
        p.add_argument("--n", help="matrix sizes, e.g. 2-4")
        p.add_argument("--V", help="moment sequence name or comma-separated rationals")
        p.add_argument("--C0", type=float)
        p.add_argument("--eps")
        p.add_argument("--mu", type=float)
        p.add_argument("--U", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--lam", type=float)
        p.add_argument("--openness")
        p.add_argument("--joint-slots", dest="joint_slots")
        p.add_argument("--max-walks", dest="max_walks", type=int)
        p.add_argument("--max-catalan", dest="max_catalan", type=int)
        p.add_argument("--max-index-paths", dest="max_index_paths", type=int)
        p.add_argument("--input", help="walk JSONL file instead of enumeration")
        p.add_argument("--out", help="output directory")
        p.add_argument("--format", choices=("csv", "json"))
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    if args.s is None and not args.config:
        args.s = DEFAULT_S[args.command]
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        _emit_error("config", str(exc))
        return EXIT_CONFIG
    except ValidationError as exc:
        _emit_error("validation", str(exc))
        return EXIT_CONFIG
    except BudgetExceeded as exc:
        _emit_error("budget", str(exc), what=exc.what, size=exc.size, cap=exc.cap)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
