"""Serialization of similarity reports to JSON and CSV."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .geometry import to_rif
from .metrics import (
    ComparisonConfig,
    ElementReport,
    SimilarityReport,
    Tier,
    TierThresholds,
)
from .touchstone import NetworkData

SPS_DECIMALS = 4


def fmt_sps(sps: float) -> str:
    return f"{sps:.{SPS_DECIMALS}f}"


def band_label(f_hz: float) -> str:
    return f"{f_hz / 1e9:g}GHz"


def element_name(element: tuple[int, int], n_ports: int) -> str:
    i, j = element
    return f"S{i}{j}" if n_ports < 10 else f"S{i}_{j}"


def config_to_dict(cfg: ComparisonConfig) -> dict:
    return {
        "f_norm": cfg.f_norm,
        "band_min": cfg.band_min,
        "band_max": cfg.band_max,
        "direction": cfg.direction.value,
        "nn_mode": cfg.nn_mode.value,
        "tiers": {
            "good": cfg.tiers.good,
            "acceptable": cfg.tiers.acceptable,
            "inconclusive": cfg.tiers.inconclusive,
        },
    }


def config_from_dict(d: dict) -> ComparisonConfig:
    return ComparisonConfig(
        f_norm=d["f_norm"],
        band_min=d["band_min"],
        band_max=d["band_max"],
        direction=d["direction"],
        nn_mode=d["nn_mode"],
        tiers=TierThresholds(**d["tiers"]),
    )


def report_to_dict(report: SimilarityReport, include_traces: bool = True) -> dict:
    elements = []
    for e in report.elements():
        item = {
            "element": list(e.element),
            "d_mh": e.d_mh,
            "sps": e.sps,
            "tier": e.tier.value,
            "effective_band": list(e.effective_band),
        }
        if include_traces:
            item["trace"] = {
                "freq_hz": e.trace[:, 0].tolist(),
                "d_rif": e.trace[:, 1].tolist(),
            }
        elements.append(item)
    return {
        "labels": list(report.labels),
        "config": config_to_dict(report.config_echo),
        "effective_band": list(report.effective_band),
        "d_mh_matrix": report.d_mh_matrix,
        "sps_matrix": report.sps_matrix,
        "tier": report.tier.value,
        "elements": elements,
    }


def report_from_dict(d: dict) -> SimilarityReport:
    """Inverse of :func:`report_to_dict` (traces come back empty when they
    were not serialized)."""
    items = d["elements"]
    n = int(round(len(items) ** 0.5))
    reports = []
    for item in items:
        tr = item.get("trace")
        trace = (
            np.column_stack([tr["freq_hz"], tr["d_rif"]]) if tr else np.empty((0, 2))
        )
        reports.append(
            ElementReport(
                element=tuple(item["element"]),
                d_mh=item["d_mh"],
                sps=item["sps"],
                tier=Tier(item["tier"]),
                trace=trace,
                effective_band=tuple(item["effective_band"]),
            )
        )
    rows = tuple(tuple(reports[r * n:(r + 1) * n]) for r in range(n))
    return SimilarityReport(
        per_element=rows,
        d_mh_matrix=d["d_mh_matrix"],
        sps_matrix=d["sps_matrix"],
        tier=Tier(d["tier"]),
        config_echo=config_from_dict(d["config"]),
        labels=tuple(d["labels"]),
        effective_band=tuple(d["effective_band"]),
    )


def write_json(payload: dict, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2) + "\n")
    return path


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def summary_csv(report: SimilarityReport) -> str:
    """Per-element scores followed by a ``matrix`` row."""
    n = len(report.per_element)
    rows = [
        [element_name(e.element, n), repr(e.d_mh), fmt_sps(e.sps), e.tier.value]
        for e in report.elements()
    ]
    rows.append(["matrix", repr(report.d_mh_matrix), fmt_sps(report.sps_matrix), report.tier.value])
    return _csv_text(["element", "d_mh", "sps", "tier"], rows)


def trace_csv(element: ElementReport) -> str:
    return _csv_text(
        ["freq_hz", "d_rif"], [[repr(f), repr(d)] for f, d in element.trace.tolist()]
    )


def spiral_csv(a: NetworkData, b: NetworkData, element, f_norm: float, band) -> str:
    """RIF coordinates of one element for both datasets, tagged by source."""
    rows = []
    for tag, net in (("A", a), ("B", b)):
        cloud = to_rif(net, element, f_norm, band)
        for f, (x, y, z) in zip(cloud.source_freqs_hz.tolist(), cloud.points.tolist()):
            rows.append([tag, repr(f), repr(x), repr(y), repr(z)])
    return _csv_text(["source", "freq_hz", "re", "im", "z"], rows)


def batch_csv(bands: list[float], rows: list[dict]) -> str:
    """One line per manifest row: SPS per band cap, then tier per band cap.

    Each row dict holds ``model``, ``meas`` and ``results`` (band -> report,
    or None when the row failed).
    """
    labels = [band_label(b) for b in bands]
    header = ["model", "meas"] + [f"sps_{l}" for l in labels] + [f"tier_{l}" for l in labels]
    out = []
    for row in rows:
        results = row["results"]
        sps = [fmt_sps(results[b].sps_matrix) if results.get(b) else "ERROR" for b in bands]
        tiers = [results[b].tier.value if results.get(b) else "ERROR" for b in bands]
        out.append([row["model"], row["meas"], *sps, *tiers])
    return _csv_text(header, out)


def read_batch_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))
