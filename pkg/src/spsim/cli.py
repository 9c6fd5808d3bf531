"""Command-line front end: ``spsim compare | batch | generate``."""

from __future__ import annotations

import argparse
import csv
import sys
import warnings
from contextlib import contextmanager
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import reports
from .metrics import ComparisonConfig, ComparisonError, compare
from .synth import LineSpec, ideal_line, shifted_resonator_pair
from .touchstone import TouchstoneError, read_touchstone, save_touchstone

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_COMPARE = 2

MANIFEST_COLUMNS = ("label_model", "path_model", "label_meas", "path_meas")
DEFAULT_BANDS = "10e9,35e9,50e9"


def _err(msg: str):
    print(f"error: {msg}", file=sys.stderr)


def _warn(msg: str):
    print(f"warning: {msg}", file=sys.stderr)


@contextmanager
def _warnings_to_stderr():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            yield
        finally:
            for w in caught:
                _warn(str(w.message))


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _config(args, band_max=None) -> ComparisonConfig:
    return ComparisonConfig(
        f_norm=args.fnorm,
        band_min=args.fmin,
        band_max=band_max if band_max is not None else getattr(args, "fmax", None),
        direction=args.direction,
        nn_mode=args.nn,
    )


def _check_fnorm(f_norm: float, meas) -> None:
    steps = np.diff(meas.frequencies)
    if steps.size and f_norm <= float(np.median(steps)):
        _warn(
            f"f_norm = {f_norm:g} Hz is not above the median frequency step "
            f"{float(np.median(steps)):g} Hz of {meas.source_label}; scores become "
            "sensitive to sampling"
        )


def _write_element_files(report, a, b, stem: str, args) -> None:
    n = a.n_ports
    for e in report.elements():
        name = f"{stem}_{reports.element_name(e.element, n)}"
        if args.trace:
            path = Path(args.trace) / f"{name}_trace.csv"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(reports.trace_csv(e))
        if args.spiral:
            path = Path(args.spiral) / f"{name}_rif.csv"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(
                reports.spiral_csv(a, b, e.element, report.config_echo.f_norm, e.effective_band)
            )


def _print_report(report) -> None:
    n = len(report.per_element)
    lo, hi = report.effective_band
    print(f"{report.labels[0]} vs {report.labels[1]}  band [{lo:g}, {hi:g}] Hz  "
          f"f_norm {report.config_echo.f_norm:g} Hz  direction {report.config_echo.direction.value}")
    print(f"{'element':<10}{'d_mh':>14}{'SPS':>12}  tier")
    for e in report.elements():
        print(f"{reports.element_name(e.element, n):<10}{e.d_mh:>14.6g}"
              f"{reports.fmt_sps(e.sps):>12}  {e.tier.value}")
    print(f"{'matrix':<10}{report.d_mh_matrix:>14.6g}"
          f"{reports.fmt_sps(report.sps_matrix):>12}  {report.tier.value}")


def cmd_compare(args) -> int:
    with _warnings_to_stderr():
        try:
            a = read_touchstone(args.model)
            b = read_touchstone(args.meas)
        except (TouchstoneError, OSError) as exc:
            _err(str(exc))
            return EXIT_PARSE
        try:
            cfg = _config(args)
            _check_fnorm(cfg.f_norm, b)
            report = compare(a, b, cfg)
        except (ComparisonError, ValueError) as exc:
            _err(str(exc))
            return EXIT_COMPARE

    stem = f"{a.source_label}_vs_{b.source_label}"
    _print_report(report)
    if args.json:
        payload = {"generated_at": _timestamp(), **reports.report_to_dict(report)}
        reports.write_json(payload, Path(args.json) / f"{stem}.json")
    if args.csv:
        path = Path(args.csv) / f"{stem}.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(reports.summary_csv(report))
    _write_element_files(report, a, b, stem, args)
    return EXIT_OK


def _parse_bands(text: str) -> list[float]:
    try:
        bands = sorted(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad band list {text!r}") from None
    if not bands or any(b <= 0 for b in bands):
        raise argparse.ArgumentTypeError("band caps must be positive")
    return bands


def read_manifest(path: Path) -> list[dict]:
    """Rows of a CSV manifest; relative paths resolve against its folder."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in MANIFEST_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"manifest lacks columns: {', '.join(missing)}")
        rows = []
        for rec in reader:
            row = {k: (rec[k] or "").strip() for k in MANIFEST_COLUMNS}
            for k in ("path_model", "path_meas"):
                p = Path(row[k])
                row[k] = p if p.is_absolute() else path.parent / p
            rows.append(row)
    labels = [(r["label_model"], r["label_meas"]) for r in rows]
    if len(set(labels)) != len(labels):
        raise ValueError("manifest labels must be unique")
    return rows


def _run_row(row: dict, bands: list[float], args) -> dict:
    out = {"model": row["label_model"], "meas": row["label_meas"], "results": {}, "errors": {}}
    try:
        a = read_touchstone(row["path_model"])
        b = read_touchstone(row["path_meas"])
    except (TouchstoneError, OSError) as exc:
        out["errors"] = {band: str(exc) for band in bands}
        return out
    _check_fnorm(args.fnorm, b)
    stem = f"{row['label_model']}_vs_{row['label_meas']}"
    for band in bands:
        try:
            report = compare(a, b, _config(args, band_max=band))
        except ComparisonError as exc:
            out["errors"][band] = str(exc)
            continue
        out["results"][band] = report
        _write_element_files(report, a, b, f"{stem}_{reports.band_label(band)}", args)
    return out


def cmd_batch(args) -> int:
    manifest = Path(args.manifest)
    try:
        rows = read_manifest(manifest)
        _config(args)
    except (OSError, ValueError, KeyError) as exc:
        _err(f"cannot use manifest {manifest}: {exc}")
        return EXIT_PARSE
    bands = args.bands
    if not rows:
        _warn(f"manifest {manifest} has no rows")

    results = []
    with _warnings_to_stderr():
        for row in rows:
            results.append(_run_row(row, bands, args))

    failed = False
    for r in results:
        for band, msg in r["errors"].items():
            failed = True
            _err(f"{r['model']} vs {r['meas']} @ {reports.band_label(band)}: {msg}")

    table = reports.batch_csv(bands, results)
    print(table, end="")
    stem = manifest.stem
    if args.csv:
        path = Path(args.csv) / f"{stem}.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(table)
    if args.json:
        payload = {
            "generated_at": _timestamp(),
            "bands": bands,
            "rows": [
                {
                    "model": r["model"],
                    "meas": r["meas"],
                    "results": {
                        reports.band_label(b): reports.report_to_dict(rep, include_traces=False)
                        for b, rep in r["results"].items()
                    },
                    "errors": {reports.band_label(b): m for b, m in r["errors"].items()},
                }
                for r in results
            ],
        }
        reports.write_json(payload, Path(args.json) / f"{stem}.json")
    return EXIT_COMPARE if failed else EXIT_OK


def cmd_generate(args) -> int:
    grid = (args.fstart, args.fstop, args.fstep)
    try:
        if args.kind == "ideal-line":
            spec = LineSpec(args.length, args.delay, args.loss, args.f0, grid)
            net = ideal_line(spec, label=Path(args.out).stem)
            path = save_touchstone(net, Path(args.out).with_suffix(".s2p"), args.format)
            print(path)
        else:
            a, b = shifted_resonator_pair(args.fres, args.shift, args.q, grid, args.r)
            for net, tag in ((a, "a"), (b, "b")):
                print(save_touchstone(net, Path(f"{args.out}_{tag}.s2p"), args.format))
    except (ValueError, OSError) as exc:
        _err(str(exc))
        return EXIT_PARSE
    return EXIT_OK


def _add_compare_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fnorm", type=float, default=1e9, help="normalization frequency, Hz")
    p.add_argument("--fmin", type=float, default=0.0, help="lower band edge, Hz")
    p.add_argument("--direction", choices=["atob", "btoa", "sym"], default="atob")
    p.add_argument("--nn", choices=["points", "polyline"], default="points")
    p.add_argument("--json", metavar="DIR")
    p.add_argument("--csv", metavar="DIR")
    p.add_argument("--trace", metavar="DIR")
    p.add_argument("--spiral", metavar="DIR")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spsim", description="S-parameter similarity from modified Hausdorff distance"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compare", help="compare a model file with a measurement file")
    p.add_argument("model")
    p.add_argument("meas")
    p.add_argument("--fmax", type=float, default=None, help="upper band edge, Hz")
    _add_compare_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("batch", help="score every pair of a CSV manifest per band cap")
    p.add_argument("manifest")
    p.add_argument("--bands", type=_parse_bands, default=_parse_bands(DEFAULT_BANDS),
                   help="comma-separated band caps in Hz")
    _add_compare_flags(p)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("generate", help="write synthetic Touchstone fixtures")
    p.add_argument("kind", choices=["ideal-line", "shifted-resonator"])
    p.add_argument("--out", required=True,
                   help="output file (ideal-line) or prefix for <prefix>_a/_b.s2p")
    p.add_argument("--format", choices=["RI", "MA", "DB"], default="RI")
    p.add_argument("--fstart", type=float, default=10e6)
    p.add_argument("--fstop", type=float, default=50e9)
    p.add_argument("--fstep", type=float, default=10e6)
    p.add_argument("--length", type=float, default=0.0508, help="line length, m")
    p.add_argument("--delay", type=float, default=7e-9, help="delay per metre, s/m")
    p.add_argument("--loss", type=float, default=0.0, help="loss at f0, dB/m")
    p.add_argument("--f0", type=float, default=10e9, help="loss reference frequency, Hz")
    p.add_argument("--fres", type=float, default=5e9, help="resonance frequency, Hz")
    p.add_argument("--shift", type=float, default=0.1e9, help="resonance shift of B, Hz")
    p.add_argument("--q", type=float, default=20.0)
    p.add_argument("--r", type=float, default=0.05, help="branch resistance over Z0")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
