"""Command-line front end.

Subcommands write plot-ready datasets (CSV or JSON) to a file or stdout and
print a short summary on stderr.  Exit codes: 0 success, 1 usage error,
2 numerical-verification failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .datasets import (
    ASYMPTOTIC_COLUMNS,
    AVERAGE_COLUMNS,
    POSTSELECT_COLUMNS,
    ROW_TOL,
    SURFACE_COLUMNS,
    _checked,
    _matrix_fields,
    asymptotic_rows,
    average_rows,
    postselect_rows,
    surface_rows,
    validity_tol,
)
from .dynamics import oracle_evolve, resolved_step
from .entanglement import measures
from .errors import InvalidParameterError, NumericalError, StructureError, TruncationError
from .qcore import AtomicFamily, Family, ThermalSpec
from .verify import run_checks

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# value parsing
# --------------------------------------------------------------------------

_PI_RE = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*pi\s*$")


def parse_number(text: str) -> float:
    """Float, optionally with a ``pi`` suffix: ``0.75pi``, ``pi``, ``-2*pi``."""
    s = str(text).strip().lower()
    m = _PI_RE.match(s)
    if m:
        coef = m.group(1)
        if coef in (None, "+"):
            return math.pi
        return float(coef) * math.pi
    if s.startswith("-") and _PI_RE.match(s[1:]):
        return -parse_number(s[1:])
    try:
        return float(s)
    except ValueError:
        raise UsageError(f"not a number: {text!r}") from None


@dataclass(frozen=True)
class Grid:
    """Parsed grid. ``steps`` is None when the count is left to the caller."""
    start: float
    stop: float
    steps: int | None
    values: tuple | None = None  # explicit list

    def points(self, auto_step: float | None = None) -> np.ndarray:
        if self.values is not None:
            return np.array(self.values, dtype=float)
        steps = self.steps
        if steps is None:
            if auto_step is None:
                raise UsageError("grid needs a step count (start:stop:steps)")
            steps = max(2, int(math.ceil(abs(self.stop - self.start) / auto_step)) + 1)
        if steps == 1:
            return np.array([self.start])
        return np.linspace(self.start, self.stop, steps)


def parse_grid(text: str) -> Grid:
    """``start:stop:steps`` (steps = number of points), ``start:stop``,
    a comma list, or a single value."""
    s = str(text).strip()
    if not s:
        raise UsageError("empty grid")
    if ":" in s:
        parts = s.split(":")
        if len(parts) not in (2, 3):
            raise UsageError(f"grid must be start:stop[:steps], got {text!r}")
        start, stop = parse_number(parts[0]), parse_number(parts[1])
        steps = None
        if len(parts) == 3:
            try:
                steps = int(parts[2])
            except ValueError:
                raise UsageError(f"grid steps must be an integer, got {parts[2]!r}") from None
            if steps < 1:
                raise UsageError("grid steps must be >= 1")
        return Grid(start, stop, steps)
    vals = tuple(parse_number(v) for v in s.split(",") if v.strip())
    if not vals:
        raise UsageError("empty grid")
    return Grid(vals[0], vals[-1], len(vals), vals)


def read_config(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (x.strip() for x in line.split("=", 1))
            out[key.replace("-", "_").lower()] = value
    return out


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

@dataclass
class SweepConfig:
    command: str
    family: str | None = None
    beta_grid: str | None = None
    nbar: float | None = None
    kappa: float | None = None
    gt_grid: str | None = None
    epsilon_tail: float = 1e-12
    omega_over_g: float = 0.0
    output: str = "-"
    format: str = "csv"
    threads: int = 1
    window: float | None = None
    samples: int = 4001
    oracle: bool = False
    debug_arctan: bool = False
    extra: dict = field(default_factory=dict)

    def spec(self) -> ThermalSpec:
        if self.nbar is not None and self.kappa is not None:
            raise UsageError("give exactly one of --nbar / --kappa")
        if self.kappa is not None:
            return ThermalSpec.from_kappa(self.kappa, self.epsilon_tail)
        if self.nbar is None:
            raise UsageError("one of --nbar / --kappa is required")
        return ThermalSpec(self.nbar, self.epsilon_tail)

    def public(self) -> dict:
        d = asdict(self)
        d.pop("extra")
        return d


_CONVERT = {
    "family": str,
    "beta_grid": str,
    "beta": str,
    "nbar": parse_number,
    "kappa": parse_number,
    "gt_grid": str,
    "epsilon_tail": float,
    "omega_over_g": parse_number,
    "output": str,
    "format": str,
    "threads": int,
    "window": parse_number,
    "samples": int,
    "oracle": lambda v: str(v).lower() in ("1", "true", "yes", "on"),
    "debug_arctan": lambda v: str(v).lower() in ("1", "true", "yes", "on"),
}


def build_config(args: argparse.Namespace) -> SweepConfig:
    given = {k: v for k, v in vars(args).items()
             if k in _CONVERT and v is not None and v is not False}
    if getattr(args, "config", None):
        file_vals = read_config(args.config)
        unknown = sorted(set(file_vals) - set(_CONVERT))
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        # a thermal parameter on the command line replaces both from the file
        if "nbar" in given or "kappa" in given:
            file_vals.pop("nbar", None)
            file_vals.pop("kappa", None)
        if "beta" in given or "beta_grid" in given:
            file_vals.pop("beta", None)
            file_vals.pop("beta_grid", None)
        for key, raw in file_vals.items():
            if key not in given:
                try:
                    given[key] = _CONVERT[key](raw)
                except (ValueError, UsageError) as exc:
                    raise UsageError(f"config key {key}: {exc}") from None
    if "beta" in given and "beta_grid" in given:
        raise UsageError("give only one of --beta / --beta-grid")
    if "beta" in given:
        given["beta_grid"] = given.pop("beta")
    cfg = SweepConfig(command=args.command, **given)
    if cfg.format not in ("csv", "json"):
        raise UsageError(f"--format must be csv or json, got {cfg.format!r}")
    if cfg.threads < 1:
        raise UsageError("--threads must be >= 1")
    if cfg.samples < 2:
        raise UsageError("--samples must be >= 2")
    return cfg


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def render_csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def render_json(rows, metadata, **extra) -> str:
    doc = {"metadata": metadata, "rows": rows}
    doc.update(extra)
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def write_output(text: str, path: str) -> None:
    if path in ("-", ""):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def metadata(cfg: SweepConfig, spec: ThermalSpec | None) -> dict:
    md = {"config": cfg.public(), "version": __version__,
          "tolerances": {"density_validation": ROW_TOL}}
    if spec is not None:
        md.update(n_max=spec.n_max, tail_weight=spec.tail_weight,
                  kappa=spec.kappa if math.isfinite(spec.kappa) else None,
                  nbar=spec.nbar)
        md["tolerances"]["density_validation"] = validity_tol(spec)
        md["tolerances"]["epsilon_tail"] = spec.epsilon_tail
    return md


def emit(cfg, spec, rows, columns, **extra) -> None:
    if cfg.format == "csv":
        text = render_csv(rows, columns)
    else:
        text = render_json(rows, metadata(cfg, spec), **extra)
    write_output(text, cfg.output)
    where = "stdout" if cfg.output in ("-", "") else cfg.output
    info = f"; n_max={spec.n_max}, tail={spec.tail_weight:.2e}" if spec is not None else ""
    print(f"{cfg.command}: {len(rows)} rows -> {where}{info}", file=sys.stderr)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def _betas(cfg, default="0:pi:41"):
    return parse_grid(cfg.beta_grid or default).points()


def _gts(cfg, spec, default="0:10"):
    return parse_grid(cfg.gt_grid or default).points(resolved_step(spec))


def _check_gts(gts):
    if np.any(gts < 0):
        raise UsageError("gt grid must be >= 0")


def cmd_surface(cfg: SweepConfig) -> int:
    spec = cfg.spec()
    family = Family.parse(cfg.family or "Phi")
    gts = _gts(cfg, spec)
    _check_gts(gts)
    rows = surface_rows(family, _betas(cfg), spec, gts, cfg.omega_over_g, cfg.threads)
    emit(cfg, spec, rows, SURFACE_COLUMNS)
    return EXIT_OK


def cmd_evolve(cfg: SweepConfig) -> int:
    """Output state(s) for one beta; --oracle uses the brute-force sectors."""
    spec = cfg.spec()
    family = Family.parse(cfg.family or "Phi")
    betas = _betas(cfg, default="0")
    if len(betas) != 1:
        raise UsageError("evolve takes a single --beta")
    gts = _gts(cfg, spec)
    _check_gts(gts)
    if not cfg.oracle:
        rows = surface_rows(family, betas, spec, gts, cfg.omega_over_g, 1)
    else:
        fam = AtomicFamily(family, float(betas[0]))
        rows = []
        for gt in gts:
            rho = _checked(oracle_evolve(fam, spec, float(gt), cfg.omega_over_g), spec, f"gt={gt}")
            m = measures(rho)
            row = {"beta": float(betas[0]), "gt": float(gt), "nbar": spec.nbar,
                   "C": m.concurrence, "EOF": m.eof, "negativity": m.negativity}
            row.update(_matrix_fields(rho))
            rows.append(row)
    emit(cfg, spec, rows, SURFACE_COLUMNS)
    return EXIT_OK


def cmd_average(cfg: SweepConfig) -> int:
    spec = cfg.spec()
    if spec.nbar > 0 and cfg.window is None:
        raise UsageError("averaging at nbar > 0 needs an explicit --window")
    families = [Family.parse(cfg.family)] if cfg.family else list(Family)
    result = average_rows(families, _betas(cfg, default="0:pi:181"), spec, cfg.window,
                          cfg.samples, cfg.omega_over_g, cfg.threads)
    emit(cfg, spec, result.rows, AVERAGE_COLUMNS, crossings=result.crossings)
    for fam, roots in result.crossings.items():
        print(f"{fam} crossings: " + ", ".join(f"{r:.12f}" for r in roots), file=sys.stderr)
    return EXIT_OK


def cmd_postselect(cfg: SweepConfig) -> int:
    family = Family.parse(cfg.family or "Psi")
    if family is not Family.PSI:
        raise UsageError(
            "postselection requires --family Psi: a Phi-family output cannot be split "
            "into a maximally entangled part and an orthogonal remainder, so no "
            "maximally entangled state can be extracted")
    spec = cfg.spec()
    gts = _gts(cfg, spec)
    _check_gts(gts)
    rows, summary = postselect_rows(_betas(cfg), spec, gts, cfg.omega_over_g, cfg.threads)
    emit(cfg, spec, rows, POSTSELECT_COLUMNS, summary=summary)
    print(f"relative spread of per-beta maxima: {summary['relative_spread_of_maxima']:.4e}",
          file=sys.stderr)
    return EXIT_OK


def cmd_asymptotics(cfg: SweepConfig) -> int:
    spec = cfg.spec()
    if spec.nbar <= 0:
        raise UsageError("asymptotics needs a thermal field (nbar > 0 or finite kappa)")
    gts = parse_grid(cfg.gt_grid or "0:10:101").points()
    _check_gts(gts)
    rows = asymptotic_rows(spec, gts)
    emit(cfg, spec, rows, ASYMPTOTIC_COLUMNS)
    return EXIT_OK


def cmd_verify(cfg: SweepConfig) -> int:
    report = run_checks(cfg.epsilon_tail, cfg.omega_over_g, cfg.debug_arctan)
    lines = list(report.lines())
    text = "\n".join(lines) + "\n"
    if cfg.format == "json":
        text = json.dumps({
            "metadata": metadata(cfg, None),
            "warnings": report.warnings,
            "checks": [{"name": c.name, "max_deviation": c.deviation, "tol": c.tol,
                        "passed": c.passed} for c in report.checks],
            "passed": report.passed}, indent=1) + "\n"
    write_output(text, cfg.output)
    if not report.passed:
        failed = ", ".join(c.name for c in report.checks if not c.passed)
        print(f"verify: FAILED ({failed})", file=sys.stderr)
        return EXIT_NUMERICAL
    print("verify: all checks passed", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "surface": cmd_surface,
    "evolve": cmd_evolve,
    "average": cmd_average,
    "postselect": cmd_postselect,
    "verify": cmd_verify,
    "asymptotics": cmd_asymptotics,
}


# --------------------------------------------------------------------------
# argument parser
# --------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat key=value file; flags override its values")
    common.add_argument("--epsilon-tail", type=float, dest="epsilon_tail",
                        help="admissible thermal weight beyond n_max (default 1e-12)")
    common.add_argument("--omega-over-g", type=parse_number, dest="omega_over_g",
                        help="atomic frequency in units of g; only enters phases")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--output", "-o", help="output file ('-' for stdout)")

    sweep = _Parser(add_help=False)
    sweep.add_argument("--family", help="Phi or Psi")
    grp = sweep.add_mutually_exclusive_group()
    grp.add_argument("--beta", help="single angle (radians, 'pi' suffix allowed)")
    grp.add_argument("--beta-grid", dest="beta_grid", help="start:stop:steps or a,b,c")
    therm = sweep.add_mutually_exclusive_group()
    therm.add_argument("--nbar", type=parse_number, help="mean photon number")
    therm.add_argument("--kappa", type=parse_number, help="hbar Omega / 2kT")
    sweep.add_argument("--gt-grid", dest="gt_grid",
                       help="start:stop[:steps]; steps default to a resolved spacing")
    sweep.add_argument("--threads", type=int, help="worker threads (output order is fixed)")

    parser = _Parser(prog="twoatom", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("surface", parents=[common, sweep], help="C/EOF/negativity over beta x gt")
    p = sub.add_parser("evolve", parents=[common, sweep], help="output states for one beta")
    p.add_argument("--oracle", action="store_true", help="use the brute-force sector evolution")
    p = sub.add_parser("average", parents=[common, sweep], help="time-averaged mixtures")
    p.add_argument("--window", type=parse_number, help="averaging window in gt")
    p.add_argument("--samples", type=int, help="trapezoid samples over the window")
    sub.add_parser("postselect", parents=[common, sweep], help="postselection probability p1")
    sub.add_parser("asymptotics", parents=[common, sweep], help="h2 series/integral/hot table")
    p = sub.add_parser("verify", parents=[common], help="run the numerical self-checks")
    p.add_argument("--debug-arctan", action="store_true", dest="debug_arctan",
                   help="replace artanh by arctan in m+- (regression guard)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = build_config(args)
        return COMMANDS[cfg.command](cfg)
    except (UsageError, InvalidParameterError, StructureError) as exc:
        print(f"twoatom {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, TruncationError) as exc:
        print(f"twoatom {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"twoatom {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
