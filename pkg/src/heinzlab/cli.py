"""Command-line front end for the verification lab."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import lab
from . import scalar as sc
from .core import GridFn, LabError
from .legendre import biconjugate_grid, conjugate_grid
from .quadrature import jacobi_rule

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2

LIST_KEYS = {"lambda_grid", "ab_grid", "p_grid", "spd_dims", "fn_p_grid", "grid_lambda_grid"}
INT_KEYS = {"ensemble_size", "seed", "nodes", "functional_size", "grid_n",
            "search_t_points", "search_lambda_points"}
MEANS = ("arithmetic", "geometric", "harmonic", "heron", "heinz")


class ConfigParse(LabError):
    """Malformed or unknown entry in a config file."""

    def __init__(self, lineno: Optional[int], msg: str):
        super().__init__(msg if lineno is None else f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass
class CliConfig:
    sweep: lab.SweepConfig = field(default_factory=lab.SweepConfig)
    fmt: str = "text"
    output: Optional[str] = None
    command: Optional[str] = None


def _parse_value(key, raw):
    if key in LIST_KEYS:
        parts = [p.strip() for p in raw.split(",") if p.strip()]
        conv = int if key == "spd_dims" else float
        return [conv(p) for p in parts]
    if key in INT_KEYS:
        return int(raw)
    return float(raw)


def parse_config_text(text: str) -> dict:
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    known = set(lab.SweepConfig.field_names())
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParse(lineno, f"expected key=value, got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigParse(lineno, f"unknown key {key!r}")
        try:
            out[key] = _parse_value(key, raw)
        except ValueError as exc:
            raise ConfigParse(lineno, f"bad value for {key}: {exc}") from None
    return out


def load_config(path=None, overrides: Optional[dict] = None) -> CliConfig:
    """Defaults, overridden by the file at ``path``, overridden by ``overrides``."""
    values = {}
    if path is not None:
        values.update(parse_config_text(Path(path).read_text()))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        sweep = lab.SweepConfig(**values)
    except ValueError as exc:
        raise ConfigParse(None, str(exc)) from None
    return CliConfig(sweep=sweep)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file")
    common.add_argument("--seed", type=int, help="override the sweep seed")
    common.add_argument("--format", dest="fmt", choices=("json", "csv", "text"), default="text")
    common.add_argument("--output", help="write the report here instead of stdout")

    p = argparse.ArgumentParser(prog="heinzlab", description="Verify Heinz/Heron mean inequalities.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=("scalar", "operator", "functional", "all"))
    sub.add_parser("counterexamples", parents=[common], help="reproduce the published counterexamples")
    sub.add_parser("search-open", parents=[common], help="search for negative values of alpha + beta^2")

    e = sub.add_parser("eval", help="evaluate a scalar mean")
    e.add_argument("mean", choices=MEANS)
    e.add_argument("--a", type=float, required=True)
    e.add_argument("--b", type=float, required=True)
    e.add_argument("--lambda", dest="lam", type=float, required=True)

    r = sub.add_parser("rule", help="print a Gauss-Jacobi rule as CSV")
    r.add_argument("--lambda", dest="lam", type=float, required=True)
    r.add_argument("--nodes", type=int, default=64)
    r.add_argument("--output")

    t = sub.add_parser("transform", help="Fenchel conjugate of a grid-function CSV")
    t.add_argument("--input", required=True)
    t.add_argument("--dual-lo", type=float)
    t.add_argument("--dual-hi", type=float)
    t.add_argument("-m", type=int, help="number of dual samples (default: input size)")
    t.add_argument("--biconjugate", action="store_true", help="return the biconjugate on the input grid")
    t.add_argument("--output")
    return p


def _emit(text: str, output: Optional[str]):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _render(rep: lab.Report, fmt: str) -> str:
    if fmt == "json":
        return rep.to_json()
    if fmt == "csv":
        return rep.to_csv()
    return rep.to_text()


def _run_report(args) -> int:
    cfg = load_config(args.config, {"seed": args.seed})
    cfg.fmt, cfg.output, cfg.command = args.fmt, args.output, args.command
    sweep = cfg.sweep
    if args.command == "verify":
        runner = {
            "scalar": lab.run_scalar_suite,
            "operator": lab.run_operator_suite,
            "functional": lab.run_functional_suite,
            "all": lab.run_all,
        }[args.suite]
        rep = runner(sweep)
    elif args.command == "counterexamples":
        rep = lab.reproduce_counterexamples()
        rep.config = dict(sweep.to_dict(), **rep.config)
    else:
        rep = lab.search_open_inequality(sweep)
    _emit(_render(rep, cfg.fmt), cfg.output)
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def _eval(args) -> int:
    a, b, lam = args.a, args.b, args.lam
    if args.mean in ("arithmetic", "geometric", "harmonic"):
        v = sc.weighted_mean(a, b, lam, args.mean)
    elif args.mean == "heron":
        v = sc.heron(a, b, lam)
    else:
        v = sc.heinz(a, b, lam)
    print(f"{float(v):.17g}")
    return EXIT_OK


def _rule(args) -> int:
    rule = jacobi_rule(args.lam, args.nodes)
    lines = ["node,weight"] + [f"{t!r},{w!r}" for t, w in zip(rule.nodes.tolist(), rule.weights.tolist())]
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def _transform(args) -> int:
    f = GridFn.from_csv(Path(args.input))
    if args.biconjugate:
        out = biconjugate_grid(f, m=args.m)
    else:
        out = conjugate_grid(f, args.dual_lo, args.dual_hi, args.m)
    _emit(out.to_csv(), args.output)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    handlers = {"eval": _eval, "rule": _rule, "transform": _transform}
    try:
        return handlers.get(args.command, _run_report)(args)
    except (LabError, ValueError, OSError) as exc:
        print(f"heinzlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
