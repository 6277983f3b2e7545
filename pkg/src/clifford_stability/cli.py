"""Command line front end.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 numeric or
geometry error. JSON floats carry 17 significant digits, CSV floats 12.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .oracle import CorrectionError, verify_mode, write_batch_csv
from .revolution import GeometryError
from .spectrum import morse_index, morse_index_grid, spectrum_table, thresholds
from .torus import make_torus
from .verify import run_checks, summary

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


# argument types ----------------------------------------------------------------


def _radius(text):
    try:
        r = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 < r < 1.0:
        raise argparse.ArgumentTypeError(f"radius must lie in (0, 1), got {text}")
    return r


def _positive(kind):
    def parse(text):
        try:
            x = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a {kind.__name__}: {text!r}")
        if not x > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return x

    return parse


def _nonnegative_int(text):
    try:
        x = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an int: {text!r}")
    if x < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return x


def _grid(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("grid must be start:stop:count")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    if count < 1:
        raise argparse.ArgumentTypeError("grid count must be >= 1")
    for x in (start, stop):
        if not 0.0 < x < 1.0:
            raise argparse.ArgumentTypeError("grid end points must lie in (0, 1)")
    return start, stop, count


@dataclass(frozen=True)
class RunConfig:
    command: str
    r: float | None = None
    grid: tuple | None = None
    kmax: int = 3
    lmax: int = 3
    l: int = 2
    n: int = 256
    step: float = 1e-2
    levels: int = 3
    tol: float = 5e-3
    format: str = "json"
    out: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.grid is not None and self.grid[2] < 1:
            raise UsageError("grid count must be >= 1")
        if not (self.tol > 0 and self.step > 0):
            raise UsageError("tolerances must be positive")

    @classmethod
    def from_namespace(cls, ns) -> "RunConfig":
        keys = cls.__dataclass_fields__
        return cls(**{k: v for k, v in vars(ns).items() if k in keys and v is not None})


# formatting ----------------------------------------------------------------------


def _json_text(obj, indent=2, _level=0):
    """JSON with every float written as ``%.17g``; non-finite floats become null."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj) + 0.0  # no negative zeros in output
        if not math.isfinite(x):
            return "null"
        text = format(x, ".17g")
        return text if any(c in text for c in ".en") else text + ".0"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_text(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _json_text(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cell(x):
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x) + 0.0, ".12g")
    return str(x)


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(x) for x in row])
    return buf.getvalue()


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _require_format(cfg, allowed):
    if cfg.format not in allowed:
        raise UsageError(f"{cfg.command} supports --format {', '.join(allowed)}")


# commands -----------------------------------------------------------------------

SPECTRUM_COLUMNS = ("k", "l", "c", "laplace", "lw", "lb", "lambda", "N", "E", "hessian", "sign", "multiplicity")


def cmd_spectrum(cfg: RunConfig) -> int:
    _require_format(cfg, ("json", "csv"))
    T = make_torus(cfg.r)
    rows = spectrum_table(T, cfg.kmax, cfg.lmax)
    if cfg.format == "csv":
        text = _csv_text(
            SPECTRUM_COLUMNS,
            [
                (e.mode.k, e.mode.l, e.c, e.laplace_symbol, e.lw, e.lb, e.lam, e.big_n, e.e, e.hessian, e.sign, e.multiplicity)
                for e in rows
            ],
        )
    else:
        text = _json_text({"r": T.r, "s": T.s, "modes": [e.to_dict() for e in rows]})
    _emit(text, cfg.out)
    return EXIT_OK


SWEEP_COLUMNS = ("r", "b", "morse_index", "morse_index_weighted", "stable")


def sweep_indices(radii, workers=1, chunk=2048) -> np.ndarray:
    """Morse indices for many radii, split into chunks across threads.

    Results are assembled in input order, so the output does not depend on
    ``workers``.
    """
    radii = np.asarray(radii, dtype=float)
    pieces = [radii[i : i + chunk] for i in range(0, radii.size, chunk)]
    if workers > 1 and len(pieces) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(morse_index_grid, pieces))
    else:
        parts = [morse_index_grid(p) for p in pieces]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=int)


def _sweep_rows(radii, workers):
    idx = sweep_indices(radii, workers)
    # every negative mode is an axis mode (k, 0) or (0, l) of multiplicity 2
    return [
        {
            "r": float(r),
            "b": make_torus(float(r)).b,
            "morse_index": int(i),
            "morse_index_weighted": 2 * int(i),
            "stable": bool(i == 0),
        }
        for r, i in zip(radii, idx)
    ]


def cmd_classify(cfg: RunConfig) -> int:
    _require_format(cfg, ("json", "csv"))
    rep = morse_index(make_torus(cfg.r))
    if cfg.format == "csv":
        text = _csv_text(SWEEP_COLUMNS, [(rep.r, rep.b, rep.morse_index, rep.morse_index_weighted, rep.stable)])
    else:
        text = _json_text(rep.to_dict())
    _emit(text, cfg.out)
    return EXIT_OK


def stability_svg(rows, width=720, height=360) -> str:
    """Static diagram: index staircase, stable band and threshold lines."""
    left, right, top, bottom = 50, 20, 20, 40
    pw, ph = width - left - right, height - top - bottom
    top_index = max([row["morse_index"] for row in rows] + [1])
    x = lambda r: left + pw * r
    y = lambda i: top + ph * (1.0 - i / top_index)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}"'
        f' viewBox="0 0 {width} {height}">',
        f'<rect x="{x(0.5):.2f}" y="{top}" width="{x(math.sqrt(3) / 2) - x(0.5):.2f}" height="{ph}"'
        ' fill="#d9f0d9"/>',
    ]
    lines = [(1.0 / l, "#999999") for l in range(2, 40)]
    lines += [(math.sqrt(k * k - 1.0) / k, "#bbbbdd") for k in range(2, 40)]
    for r, color in lines:
        parts.append(
            f'<line x1="{x(r):.2f}" y1="{top}" x2="{x(r):.2f}" y2="{top + ph}" stroke="{color}"'
            ' stroke-width="0.5"/>'
        )
    pts = " ".join(f"{x(row['r']):.2f},{y(row['morse_index']):.2f}" for row in rows)
    parts.append(f'<polyline points="{pts}" fill="none" stroke="#1f4e9c" stroke-width="1.5"/>')
    parts.append(
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>'
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>'
    )
    for t in (0.0, 0.25, 0.5, 0.75, 1.0):
        parts.append(
            f'<text x="{x(t):.2f}" y="{top + ph + 16}" font-size="11" text-anchor="middle">{t:g}</text>'
        )
    for i in range(top_index + 1):
        parts.append(f'<text x="{left - 8}" y="{y(i) + 4:.2f}" font-size="11" text-anchor="end">{i}</text>')
    parts.append(f'<text x="{left + pw / 2:.2f}" y="{height - 6}" font-size="12" text-anchor="middle">r</text>')
    parts.append(
        f'<text x="14" y="{top + ph / 2:.2f}" font-size="12" text-anchor="middle"'
        f' transform="rotate(-90 14 {top + ph / 2:.2f})">Morse index</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_sweep(cfg: RunConfig) -> int:
    if cfg.grid is None:
        raise UsageError("sweep needs --grid start:stop:count")
    start, stop, count = cfg.grid
    rows = _sweep_rows(np.linspace(start, stop, count), cfg.workers)
    if cfg.format == "svg":
        text = stability_svg(rows)
    elif cfg.format == "csv":
        text = _csv_text(SWEEP_COLUMNS, [[row[c] for c in SWEEP_COLUMNS] for row in rows])
    else:
        stable = [row["r"] for row in rows if row["stable"]]
        text = _json_text(
            {
                "grid": {"start": start, "stop": stop, "count": count},
                "stable_range": [min(stable), max(stable)] if stable else None,
                "rows": rows,
            }
        )
    _emit(text, cfg.out)
    return EXIT_OK


THRESHOLD_COLUMNS = ("family", "index", "r_exact", "r_root")


def cmd_thresholds(cfg: RunConfig) -> int:
    _require_format(cfg, ("json", "csv"))
    rows = thresholds(cfg.kmax)
    if cfg.format == "csv":
        text = _csv_text(THRESHOLD_COLUMNS, [(t.family, t.index, t.r_exact, t.r_root) for t in rows])
    else:
        text = _json_text(
            {"thresholds": [{"family": t.family, "index": t.index, "r_exact": t.r_exact, "r_root": t.r_root} for t in rows]}
        )
    _emit(text, cfg.out)
    return EXIT_OK


def cmd_oracle(cfg: RunConfig) -> int:
    _require_format(cfg, ("json", "csv"))
    if cfg.l < 1:
        raise UsageError("--l must be at least 1")
    out = verify_mode(make_torus(cfg.r), cfg.l, cfg.tol, cfg.step, cfg.levels, cfg.n, raise_on_failure=False)
    if cfg.format == "csv":
        buf = io.StringIO()
        write_batch_csv(out.reports, buf)
        text = buf.getvalue()
    else:
        text = _json_text(
            {
                "r": out.r,
                "l": out.l,
                "status": "PASS" if out.passed else "FAIL",
                "expected_negative": out.expected_negative,
                "messages": out.messages,
                "reports": [rep.to_dict() for rep in out.reports],
            }
        )
    _emit(text, cfg.out)
    for msg in out.messages:
        sys.stderr.write(f"oracle: {msg}\n")
    return EXIT_OK if out.passed else EXIT_VERIFY


def cmd_verify(cfg: RunConfig, as_json: bool) -> int:
    results = run_checks()
    report = summary(results)
    if as_json:
        text = _json_text(report)
    else:
        lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name:30s} {r.seconds:7.2f}s  {r.detail}" for r in results]
        lines.append(f"{report['status']}: {len(results) - len(report['failed'])}/{len(results)} checks passed"
                     f" in {report['seconds']:.1f}s")
        text = "\n".join(lines) + "\n"
    _emit(text, cfg.out)
    return EXIT_OK if report["status"] == "PASS" else EXIT_VERIFY


# parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="clifford-stability", description="Stability of CMC Clifford tori as constrained Willmore surfaces.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, formats=("json", "csv")):
        p.add_argument("--format", choices=formats, default="json")
        p.add_argument("--out", metavar="PATH", help="write to PATH instead of stdout")

    p = sub.add_parser("spectrum", help="eigenvalue table for modes k <= kmax, l <= lmax")
    p.add_argument("--r", type=_radius, required=True)
    p.add_argument("--kmax", type=_nonnegative_int, default=3)
    p.add_argument("--lmax", type=_nonnegative_int, default=3)
    common(p)

    p = sub.add_parser("classify", help="stability and Morse index at one radius")
    p.add_argument("--r", type=_radius, required=True)
    common(p)

    p = sub.add_parser("sweep", help="classify a grid of radii")
    p.add_argument("--grid", type=_grid, required=True, metavar="START:STOP:COUNT")
    p.add_argument("--workers", type=_positive(int), default=1)
    common(p, ("json", "csv", "svg"))

    p = sub.add_parser("thresholds", help="radii where a mode changes sign")
    p.add_argument("--kmax", type=_positive(int), default=6, help="largest k and l (>= 2)")
    common(p)

    p = sub.add_parser("oracle", help="finite-difference second variation for the (0, l) modes")
    p.add_argument("--r", type=_radius, required=True)
    p.add_argument("--l", type=_positive(int), default=2)
    p.add_argument("--n", type=_positive(int), default=256, help="profile samples (power of two)")
    p.add_argument("--step", type=_positive(float), default=1e-2)
    p.add_argument("--levels", type=_positive(int), default=3, help="Richardson levels")
    p.add_argument("--tol", type=_positive(float), default=5e-3)
    common(p)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.add_argument("--out", metavar="PATH")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_namespace(ns)
        if cfg.command == "spectrum":
            return cmd_spectrum(cfg)
        if cfg.command == "classify":
            return cmd_classify(cfg)
        if cfg.command == "sweep":
            return cmd_sweep(cfg)
        if cfg.command == "thresholds":
            return cmd_thresholds(cfg)
        if cfg.command == "oracle":
            return cmd_oracle(cfg)
        return cmd_verify(cfg, ns.json)
    except BrokenPipeError:
        # downstream reader closed early (e.g. piped into head)
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK
    except UsageError as exc:
        sys.stderr.write(f"{parser.prog}: error: {exc}\n")
        return EXIT_USAGE
    except (GeometryError, CorrectionError, ArithmeticError) as exc:
        sys.stderr.write(f"{parser.prog}: numeric error: {exc}\n")
        return EXIT_NUMERIC
    except ValueError as exc:
        # argument combinations the parser cannot see, e.g. a step too large for r
        sys.stderr.write(f"{parser.prog}: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
