"""Command-line front end (``hh``).

Every command prints a table (CSV by default, JSON with ``--format json``) to
stdout.  With ``--out DIR`` the table is also written to
``DIR/<command>-<timestamp>.<ext>`` next to a manifest holding the resolved
configuration, its hash and the tool version.  The timestamp honours
``SOURCE_DATE_EPOCH``.

Configuration comes from built-in defaults, then an optional ``--config``
file of ``key=value`` lines, then command-line flags.

Exit codes: 0 success, 1 failed check or violated constraint, 2 usage or
configuration error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import __version__
from . import central_ifs as ci
from . import core_map as cm
from . import symbolic as sy
from . import thermo as th
from . import verify as vf
from .errors import ConstraintViolation, HorseshoeError
from .serialize import render

PARAM_KEYS = ("lambda0", "lambda1", "beta0", "sigma", "beta1")
CONFIG_KEYS = {
    **{k: float for k in PARAM_KEYS},
    "depth": int,
    "tol": float,
    "format": str,
    "out": str,
}


class UsageError(Exception):
    """Bad flags or configuration; exit code 2."""


class CheckFailed(Exception):
    """A self-check or constraint failed; exit code 1."""


@dataclass
class RunConfig:
    params: cm.Params
    depth: int = th.DEFAULT_DEPTH
    tolerances: Dict[str, float] = field(default_factory=lambda: {"tol": 1e-10})
    output_dir: Optional[str] = None
    format: str = "csv"

    def as_dict(self):
        return {
            **self.params.as_dict(),
            "depth": self.depth,
            **self.tolerances,
            "format": self.format,
        }

    def digest(self):
        blob = json.dumps(self.as_dict(), sort_keys=True, default=repr).encode()
        return hashlib.sha256(blob).hexdigest()


def read_config_file(path) -> Dict[str, object]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = CONFIG_KEYS[key](val)
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {val!r}") from None
    return values


def resolve_config(args, validate=True) -> RunConfig:
    merged = dict(cm.DEFAULT_PARAMS.as_dict(), depth=th.DEFAULT_DEPTH, tol=1e-10, format="csv", out=None)
    if args.config:
        merged.update(read_config_file(args.config))
    for key in CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            merged[key] = v
    if merged["format"] not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got {merged['format']!r}")
    if not (th.MIN_DEPTH <= merged["depth"] <= th.MAX_DEPTH):
        raise UsageError(f"depth must lie in [{th.MIN_DEPTH}, {th.MAX_DEPTH}]")
    if not merged["tol"] > 0:
        raise UsageError("tol must be positive")
    raw = {k: merged[k] for k in PARAM_KEYS}
    params = cm.validate_params(**raw) if validate else cm.Params(**raw)
    return RunConfig(params, merged["depth"], {"tol": merged["tol"]}, merged["out"], merged["format"])


# ------------------------------------------------------------------ output


def _timestamp():
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = int(epoch) if epoch else int(time.time())
    return time.strftime("%Y%m%dT%H%M%SZ", time.gmtime(t))


def emit(command, cfg: RunConfig, columns, rows, out=None):
    text = render(cfg.format, columns, rows)
    (out or sys.stdout).write(text)
    if cfg.output_dir:
        d = Path(cfg.output_dir)
        d.mkdir(parents=True, exist_ok=True)
        stem = f"{command}-{_timestamp()}"
        (d / f"{stem}.{cfg.format}").write_text(text)
        manifest = {
            "command": command,
            "config": cfg.as_dict(),
            "config_sha256": cfg.digest(),
            "output": f"{stem}.{cfg.format}",
            "version": __version__,
        }
        (d / f"{stem}.manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True, default=repr) + "\n")


# ------------------------------------------------------------------ commands


def cmd_params_check(args):
    cfg = resolve_config(args, validate=False)
    rows = cm.check_constraints(cfg.params.as_dict())
    emit("params-check", cfg, ("name", "value", "bound", "ok"), rows)
    failed = [r for r in rows if not r[3]]
    if failed:
        name, value, bound, _ = failed[0]
        raise CheckFailed(str(ConstraintViolation(name, value, bound)))


def _parse_point(text):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"point must be xs,xc,xu, got {text!r}") from None
    if len(vals) != 3:
        raise UsageError(f"point must have three coordinates, got {text!r}")
    p = cm.Point3(*vals)
    if not p.in_cube():
        raise UsageError(f"point {text} is not in the unit cube")
    return p


def cmd_orbit(args):
    cfg = resolve_config(args)
    rec = cm.orbit(_parse_point(args.start), cfg.params, args.steps)
    rows = []
    for i, s in enumerate(rec.itinerary):
        p = rec.points[i]
        rows.append((i, p.xs, p.xc, p.xu, s))
    if rec.escaped_at is not None:
        p = rec.points[rec.escaped_at]
        rows.append((rec.escaped_at, p.xs, p.xc, p.xu, f"escape:{rec.escape_reason}"))
    emit("orbit", cfg, ("step", "xs", "xc", "xu", "symbol"), rows)


def cmd_itinerary(args):
    cfg = resolve_config(args)
    rec = cm.orbit(_parse_point(args.start), cfg.params, args.steps)
    row = (rec.itinerary, len(rec.itinerary), rec.escaped_at, rec.escape_reason, sy.is_admissible(rec.itinerary))
    emit("itinerary", cfg, ("itinerary", "length", "escaped_at", "escape_reason", "admissible"), [row])


def cmd_lyap(args):
    cfg = resolve_config(args)
    words = list(args.word or [])
    if args.max_period:
        if args.max_period > sy.MAX_PERIOD:
            raise UsageError(f"max-period exceeds {sy.MAX_PERIOD}")
        for n in range(1, args.max_period + 1):
            words.extend(sy.enumerate_periodic(n))
    if not words:
        raise UsageError("give --word or --max-period")
    rows = []
    for w in words:
        if not sy.is_cyclically_admissible(w):
            raise UsageError(f"word {w!r} is not cyclically admissible")
        lam = th.lyap_of_periodic(w, cfg.params.sigma)
        if isinstance(lam, tuple):
            rows.append((w, len(w), "Q", lam[0]))
            rows.append((w, len(w), "P", lam[1]))
        else:
            rows.append((w, len(w), "", lam))
    emit("lyap", cfg, ("word", "period", "branch", "lyap"), rows)


def cmd_pressure(args):
    cfg = resolve_config(args)
    t_max = args.t_min if args.t_max is None else args.t_max
    try:
        curve = th.pressure_curve(cfg.depth, args.t_min, t_max, args.steps, cfg.params.sigma)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = [(e.t, e.depth, e.p_low, e.p_high) for e in curve]
    emit("pressure", cfg, ("t", "depth", "p_low", "p_high"), rows)


def cmd_t0(args):
    cfg = resolve_config(args)
    tol = cfg.tolerances["tol"]
    root = th.find_t0(cfg.depth, tol, cfg.params.sigma)
    var = th.t0_variational(cfg.depth, cfg.params.sigma)
    rows = [(e.method, e.depth, e.t0_low, e.t0_high) for e in (root, var)]
    emit("t0", cfg, ("method", "depth", "t0_low", "t0_high"), rows)
    if not root.overlaps(var, slack=tol):
        raise CheckFailed(f"t0 estimates disagree: {root.t0_low}..{root.t0_high} vs {var.t0_low}..{var.t0_high}")
    if root.t0_high > sy.sft_entropy() + tol:
        raise CheckFailed("t0_high exceeds the topological entropy")


def cmd_measure(args):
    cfg = resolve_config(args)
    me = th.markov_equilibrium(cfg.depth, args.t, args.representative, cfg.params.sigma)
    m = "0" * min(cfg.depth, 6)
    words = [w for n in range(1, min(args.mass_len, min(cfg.depth, 6)) + 1) for w in sy.enumerate_words(n)]
    if m not in words:
        words.insert(0, m)
    columns = ["t", "depth", "representative", "entropy", "lyap_lo", "lyap_hi", "log_eigenvalue"]
    columns += [f"mass[{w}]" for w in words]
    row = [me.t, me.depth, me.representative, me.entropy, me.lyap_c[0], me.lyap_c[1], me.log_eigenvalue]
    row += [me.mass(w) for w in words]
    emit("measure", cfg, columns, [row])


def cmd_entropy(args):
    cfg = resolve_config(args)
    p0 = th.pressure(cfg.depth, 0.0, cfg.params.sigma)
    n = min(cfg.depth, sy.MAX_WORD_LENGTH)
    rows = [("closed_form", math.log((1 + math.sqrt(5)) / 2)),
            ("eigenvalue", sy.sft_entropy()),
            (f"log_count_ratio_{n}", math.log(len(sy.enumerate_words(n)) / len(sy.enumerate_words(n - 1)))),
            ("pressure_zero_t_low", p0.p_low),
            ("pressure_zero_t_high", p0.p_high)]
    emit("entropy", cfg, ("method", "value"), rows)


def cmd_verify(args):
    cfg = resolve_config(args)
    if abs(cfg.params.sigma - cm.DEFAULT_PARAMS.sigma) > 0:
        print("note: verification suites run at the default parameters", file=sys.stderr)
    try:
        checks = vf.run_suite(args.suite)
    except KeyError as exc:
        raise UsageError(str(exc)) from None
    rows = [(c.suite, c.name, c.passed, c.value, c.bound, c.detail) for c in checks]
    emit("verify", cfg, ("suite", "check", "passed", "value", "bound", "detail"), rows)
    failed = [c for c in checks if not c.passed]
    if failed:
        c = failed[0]
        raise CheckFailed(f"{c.suite}: {c.name}: value {c.value!r} vs bound {c.bound!r} {c.detail}".rstrip())


# ------------------------------------------------------------------ parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key=value configuration file")
    common.add_argument("--depth", type=int, help="transfer-matrix depth k")
    common.add_argument("--out", help="directory for output files and manifest")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--tol", type=float, help="bisection tolerance")
    for key in PARAM_KEYS:
        common.add_argument(f"--{key}", type=float)

    parser = _Parser(prog="hh", description="Partially hyperbolic horseshoe: exponents, pressure and t0.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("params-check", parents=[common], help="check the parameter constraints")
    p.set_defaults(func=cmd_params_check)

    for name, func in (("orbit", cmd_orbit), ("itinerary", cmd_itinerary)):
        p = sub.add_parser(name, parents=[common], help=f"{name} of a point under F")
        p.add_argument("--start", default="0,0,0", help="xs,xc,xu")
        p.add_argument("--steps", type=int, default=10)
        p.set_defaults(func=func)

    p = sub.add_parser("lyap", parents=[common], help="central exponents of periodic words")
    p.add_argument("--word", action="append", help="periodic word (repeatable)")
    p.add_argument("--max-period", type=int, help="all periodic words up to this period")
    p.set_defaults(func=cmd_lyap)

    p = sub.add_parser("pressure", parents=[common], help="pressure enclosures on a t-grid")
    p.add_argument("--t-min", type=float, default=0.0)
    p.add_argument("--t-max", type=float)
    p.add_argument("--steps", type=int, default=1)
    p.set_defaults(func=cmd_pressure)

    p = sub.add_parser("t0", parents=[common], help="locate the phase transition by both methods")
    p.set_defaults(func=cmd_t0)

    p = sub.add_parser("measure", parents=[common], help="depth-k Markov equilibrium statistics")
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--representative", choices=th.REPRESENTATIVES, default="upper")
    p.add_argument("--mass-len", type=int, default=2, help="report cylinders up to this length")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("entropy", parents=[common], help="topological entropy of the subshift")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("--suite", default="all", choices=sorted(vf.SUITES) + ["all"])
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
    except UsageError as exc:
        print(f"hh: error: {exc}", file=sys.stderr)
        return 2
    except CheckFailed as exc:
        print(f"hh: check failed: {exc}", file=sys.stderr)
        return 1
    except ConstraintViolation as exc:
        print(f"hh: {exc}", file=sys.stderr)
        return 1
    except HorseshoeError as exc:
        print(f"hh: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
