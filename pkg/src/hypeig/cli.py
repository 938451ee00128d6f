"""Command-line frontend.

Examples
--------
::

    hypeig --command eigen --n 3 --kappa 1 --r 3.14159265358979
    hypeig --command table --n 5 --r-grid 1:64:7,log --format csv
    hypeig --command compare --n 3 --r 2 --measure funk
    hypeig --command funk --n 2
    hypeig --command selftest

Exit status is 0 when every requested check passes, 1 on a numerical
failure or a failed check, and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .asymptotics import bounds, large_r_expansion, small_r_expansion
from .errors import HypeigError, ParameterError, PreconditionError
from .hyperball import METHODS, BallSpec, eigen

__all__ = ["RunConfig", "parse_grid", "build_parser", "run", "main"]

SCHEMA_VERSION = 1
COMMANDS = ("eigen", "table", "bounds", "compare", "funk", "selftest")
FORMATS = ("json", "csv", "plain")
TABLE_COLUMNS = ("r", "lambda_exact", "large_r", "small_r", "bf_lo", "bf_hi", "savo_lo", "savo_hi")

Record = Dict[str, object]


class UsageError(ParameterError):
    """Flags that are individually valid but do not fit the chosen command."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: Optional[int] = None
    kappa: float = 1.0
    r: Optional[float] = None
    r_grid: Optional[Tuple[float, ...]] = None
    method: Optional[str] = None
    fmt: str = "json"
    out: Optional[str] = None
    measure: str = "funk"
    tol: Optional[float] = None
    jobs: int = 1


def parse_grid(text: str) -> Tuple[float, ...]:
    """Parse ``start:stop:count[,log|lin]`` into strictly increasing positive abscissae.

    The spacing defaults to ``lin``. Both endpoints are included.

    Examples
    --------
    >>> parse_grid("1:64:7,log")
    (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)
    """
    body, _, spacing = text.partition(",")
    spacing = spacing.strip().lower() or "lin"
    parts = body.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid {text!r} is not of the form start:stop:count[,log|lin]")
    try:
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError as exc:
        raise UsageError(f"grid {text!r}: {exc}") from None
    if spacing not in ("log", "lin"):
        raise UsageError(f"grid spacing must be 'log' or 'lin', not {spacing!r}")
    if count < 1:
        raise UsageError("grid count must be at least 1")
    if not (math.isfinite(start) and math.isfinite(stop) and 0 < start):
        raise UsageError("grid endpoints must be positive and finite")
    if count == 1:
        if start != stop:
            raise UsageError("a one-point grid needs start == stop")
        return (start,)
    if not stop > start:
        raise UsageError("grid must be strictly increasing (stop > start)")
    pts = np.geomspace(start, stop, count) if spacing == "log" else np.linspace(start, stop, count)
    pts[0], pts[-1] = start, stop
    # geomspace rounds, so snap near-integers produced from integer endpoints
    vals = tuple(float(round(p)) if abs(p - round(p)) <= 1e-12 * abs(p) else float(p) for p in pts)
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise UsageError("grid points are not strictly increasing")
    return vals


# ---------------------------------------------------------------------------
# formatting


def _round15(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return None
        return float(f"{v:.15g}")
    return v


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def render(command: str, records: List[Record], fmt: str, *, single: bool) -> str:
    """Serialise records. Key order follows the first record; later keys are appended."""
    keys: List[str] = []
    for rec in records:
        keys.extend(k for k in rec if k not in keys)
    if fmt == "json":
        if single:
            obj = {"hypeig_schema": SCHEMA_VERSION, "command": command}
            obj.update({k: _round15(v) for k, v in records[0].items()})
        else:
            obj = {
                "hypeig_schema": SCHEMA_VERSION,
                "command": command,
                "rows": [{k: _round15(rec.get(k)) for k in keys} for rec in records],
            }
        return json.dumps(obj, indent=2, allow_nan=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys)
        for rec in records:
            w.writerow([_csv_cell(rec.get(k)) for k in keys])
        return buf.getvalue()
    # plain
    lines: List[str] = []
    for i, rec in enumerate(records):
        if i:
            lines.append("")
        width = max(len(k) for k in rec)
        for k, v in rec.items():
            cell = f"{v:.15g}" if isinstance(v, (float, np.floating)) else str(v)
            lines.append(f"{k:<{width}}  {cell}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands


def _spec(cfg: RunConfig, r: Optional[float] = None) -> BallSpec:
    if cfg.n is None:
        raise UsageError(f"--n is required for --command {cfg.command}")
    r = cfg.r if r is None else r
    if r is None:
        raise UsageError(f"--r is required for --command {cfg.command}")
    return BallSpec(cfg.n, cfg.kappa, r)


def _cmd_eigen(cfg: RunConfig) -> Tuple[List[Record], bool]:
    spec = _spec(cfg)
    res = eigen(spec, cfg.method)
    return [{"n": spec.n, "kappa": spec.kappa, "r": spec.r, **res.to_dict()}], True


def _cmd_bounds(cfg: RunConfig) -> Tuple[List[Record], bool]:
    spec = _spec(cfg)
    return [{"n": spec.n, "kappa": spec.kappa, "r": spec.r, **bounds(spec).to_dict()}], True


def _table_row(cfg: RunConfig, r: float) -> Record:
    spec = _spec(cfg, r)
    bs = bounds(spec)
    return {
        "r": r,
        "lambda_exact": eigen(spec, cfg.method).lam,
        "large_r": large_r_expansion(spec.n, spec.kappa, r),
        "small_r": small_r_expansion(spec.n, spec.kappa, r),
        "bf_lo": bs.bf_lower,
        "bf_hi": bs.bf_upper,
        "savo_lo": bs.savo_lower,
        "savo_hi": bs.savo_upper,
    }


def _cmd_table(cfg: RunConfig) -> Tuple[List[Record], bool]:
    grid = cfg.r_grid or ((cfg.r,) if cfg.r is not None else None)
    if grid is None:
        raise UsageError("--r-grid or --r is required for --command table")
    _spec(cfg, grid[0])  # validate n and kappa before fanning out
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(lambda r: _table_row(cfg, r), grid))  # map keeps grid order
    else:
        rows = [_table_row(cfg, r) for r in grid]
    for row in rows:
        lam = row["lambda_exact"]
        pairs = [("bf_lo", "bf_hi"), ("savo_lo", "savo_hi")]
        for lo_key, hi_key in pairs:
            lo, hi = row[lo_key], row[hi_key]
            if lo is not None and not (lo * (1 - 1e-10) <= lam <= hi * (1 + 1e-10)):
                print(f"warning: r={row['r']!r}: lambda {lam!r} outside [{lo_key}, {hi_key}]", file=sys.stderr)
    return rows, True


def _cmd_compare(cfg: RunConfig) -> Tuple[List[Record], bool]:
    from .mm_comparison import compare, measure_from_name

    spec = _spec(cfg)
    measure = measure_from_name(cfg.measure, spec.n, spec.kappa)
    rep = compare(measure, spec)
    rec = {"measure": measure.label, "n": spec.n, "kappa": spec.kappa, "r": spec.r, **rep.to_dict()}
    return [rec], bool(rep.inequality_ok)


def _cmd_funk(cfg: RunConfig) -> Tuple[List[Record], bool]:
    from .funk import funk_frequency_report, klein_frequency_report

    if cfg.n is None:
        raise UsageError("--n is required for --command funk")
    funk = funk_frequency_report(cfg.n)
    klein = klein_frequency_report(cfg.n)
    return [funk.to_dict(), klein.to_dict()], funk.ok and klein.ok


def _cmd_selftest(cfg: RunConfig) -> Tuple[List[Record], bool]:
    from .selftest import run_all

    results = run_all()
    rows = [res.to_dict() for res in results]
    for res in results:
        print(f"selftest {res.name}: {res.passed} passed, {res.failed} failed in {res.seconds:.1f} s", file=sys.stderr)
        for line in res.failures[:10]:
            print(f"selftest {res.name}: {line}", file=sys.stderr)
    return rows, all(res.ok for res in results)


_DISPATCH = {
    "eigen": _cmd_eigen,
    "bounds": _cmd_bounds,
    "table": _cmd_table,
    "compare": _cmd_compare,
    "funk": _cmd_funk,
    "selftest": _cmd_selftest,
}
_SINGLE = {"eigen", "bounds", "compare"}


@contextlib.contextmanager
def _tolerance(tol: Optional[float]) -> Iterator[None]:
    """Temporarily export ``HYPEIG_TOL`` so the root finders pick it up."""
    if tol is None:
        yield
        return
    old = os.environ.get("HYPEIG_TOL")
    os.environ["HYPEIG_TOL"] = repr(float(tol))
    try:
        yield
    finally:
        if old is None:
            os.environ.pop("HYPEIG_TOL", None)
        else:
            os.environ["HYPEIG_TOL"] = old


def run(cfg: RunConfig, stdout=None) -> int:
    """Execute ``cfg``, write the artifact and return the exit status."""
    stdout = stdout if stdout is not None else sys.stdout
    if cfg.command not in _DISPATCH:
        raise UsageError(f"unknown command {cfg.command!r}")
    if cfg.fmt not in FORMATS:
        raise UsageError(f"unknown format {cfg.fmt!r}")
    with _tolerance(cfg.tol):
        records, ok = _DISPATCH[cfg.command](cfg)
    text = render(cfg.command, records, cfg.fmt, single=cfg.command in _SINGLE)
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hypeig",
        description="First Dirichlet eigenvalues of hyperbolic balls, bounds, comparison and Funk-model checks.",
    )
    p.add_argument("--command", required=True, choices=COMMANDS)
    p.add_argument("--n", type=int, help="dimension (>= 2)")
    p.add_argument("--kappa", type=float, default=1.0, help="curvature scale; curvature is -kappa^2")
    where = p.add_mutually_exclusive_group()
    where.add_argument("--r", type=float, help="geodesic radius")
    where.add_argument("--r-grid", help="radius grid 'start:stop:count[,log|lin]' (table only)")
    p.add_argument("--method", choices=METHODS, help="force one eigenvalue method")
    p.add_argument("--format", dest="fmt", choices=FORMATS, default="json")
    p.add_argument("--out", help="write to this file instead of standard output")
    p.add_argument("--measure", default="funk",
                   help="hyperbolic, euclidean, funk, or a CSV path with columns rho,density (compare only)")
    p.add_argument("--tol", type=float, help="relative root tolerance; overrides HYPEIG_TOL")
    p.add_argument("--jobs", type=int, default=1, help="worker threads for table rows")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    grid = parse_grid(ns.r_grid) if ns.r_grid is not None else None
    if grid is not None and ns.command != "table":
        raise UsageError("--r-grid only applies to --command table")
    if ns.tol is not None and not 0 < ns.tol < 1:
        raise UsageError("--tol must lie in (0, 1)")
    if ns.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    return RunConfig(
        command=ns.command, n=ns.n, kappa=ns.kappa, r=ns.r, r_grid=grid, method=ns.method,
        fmt=ns.fmt, out=ns.out, measure=ns.measure, tol=ns.tol, jobs=ns.jobs,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad flags and 0 on --help
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
        return run(cfg)
    except PreconditionError as exc:
        # valid input whose measure fails a comparison hypothesis: a failed check
        print(f"hypeig: check failed ({exc.hypothesis}): {exc}", file=sys.stderr)
        return 1
    except ParameterError as exc:
        print(f"hypeig: usage error: {exc}", file=sys.stderr)
        return 2
    except (HypeigError, ArithmeticError) as exc:
        print(f"hypeig: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"hypeig: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
