"""Result serialization: JSON, summary tables, projection CSVs, SVG plots.

All floats in files are written with 9 significant digits, and every
output embeds the toolkit version, config hash, and PRNG identifier so
runs are diff-able and attributable.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile

import numpy as np

import grooveprobe
from grooveprobe.probe import PRNG_ID, ProbeConfig, ProbeResult

TARGET_COLUMNS = (("groove", "R_g"), ("dance", "R_d"), ("listen", "R_l"), ("party", "R_p"))

MISSING_CELL = "—"


def fmt9(value: float) -> str:
    """Format a float with 9 significant digits."""
    return format(float(value), ".9g")


def config_hash(payload: dict) -> str:
    """Stable short hash of a run configuration."""
    canonical = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(canonical.encode()).hexdigest()[:12]


def atomic_write_text(path: str, text: str) -> None:
    """Write via a temp file renamed into place."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def provenance_header(cfg_hash: str) -> str:
    """Comment lines identifying the producing run, for CSV outputs."""
    return (
        f"# grooveprobe {grooveprobe.__version__}\n"
        f"# config_hash={cfg_hash}\n"
        f"# prng={PRNG_ID}\n"
    )


def _round9(obj):
    if isinstance(obj, float):
        return float(fmt9(obj))
    if isinstance(obj, dict):
        return {k: _round9(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round9(v) for v in obj]
    return obj


def results_json(result: ProbeResult, config: ProbeConfig, cfg_hash: str) -> str:
    """Serialize one probe result, keys sorted, floats at 9 significant digits."""
    payload = {
        "representation": result.representation_name,
        "target": result.target,
        "alpha": config.alpha,
        "folds": config.folds,
        "seeds": list(config.seeds),
        "per_run_r2": list(result.per_run_r2),
        "mean_r2": result.mean_r2,
        "std_r2": result.std_r2,
        "predictions": result.predictions,
        "prng_id": PRNG_ID,
        "library_version": grooveprobe.__version__,
        "config_hash": cfg_hash,
    }
    return json.dumps(_round9(payload), sort_keys=True, indent=2) + "\n"


def summary_cell(mean: float, std: float) -> str:
    return f"{mean:.2f} ± {std:.2f}"


def _collect_cells(
    results: list[ProbeResult], representations: list[str]
) -> dict[str, dict[str, tuple[float, float]]]:
    table: dict[str, dict[str, tuple[float, float]]] = {r: {} for r in representations}
    for res in results:
        table.setdefault(res.representation_name, {})[res.target] = (
            res.mean_r2,
            res.std_r2,
        )
    return table


def summary_markdown(results: list[ProbeResult], representations: list[str]) -> str:
    """Markdown summary: rows per representation, one column per rating.

    The best cell per column is bold and the second best underlined,
    mirroring the usual results-table convention.
    """
    table = _collect_cells(results, representations)
    lines = [
        "| Representation | " + " | ".join(label for _, label in TARGET_COLUMNS) + " |",
        "|---" * (len(TARGET_COLUMNS) + 1) + "|",
    ]
    ranks: dict[str, dict[str, int]] = {}
    for target, _ in TARGET_COLUMNS:
        scored = [
            (table[rep][target][0], rep) for rep in table if target in table[rep]
        ]
        scored.sort(key=lambda t: -t[0])
        ranks[target] = {rep: i for i, (_, rep) in enumerate(scored)}
    for rep in representations:
        cells = []
        for target, _ in TARGET_COLUMNS:
            if target not in table.get(rep, {}):
                cells.append(MISSING_CELL)
                continue
            cell = summary_cell(*table[rep][target])
            rank = ranks[target].get(rep)
            if rank == 0 and len(ranks[target]) > 1:
                cell = f"**{cell}**"
            elif rank == 1:
                cell = f"<u>{cell}</u>"
            cells.append(cell)
        lines.append("| " + " | ".join([rep, *cells]) + " |")
    return "\n".join(lines) + "\n"


def summary_csv(results: list[ProbeResult], representations: list[str]) -> str:
    """CSV summary with the same mean ± std cells, no rank markers."""
    table = _collect_cells(results, representations)
    lines = ["representation," + ",".join(label for _, label in TARGET_COLUMNS)]
    for rep in representations:
        cells = [
            summary_cell(*table[rep][target]) if target in table.get(rep, {}) else MISSING_CELL
            for target, _ in TARGET_COLUMNS
        ]
        lines.append(",".join([rep, *cells]))
    return "\n".join(lines) + "\n"


def _axis_range(values: np.ndarray, pad: float = 0.05) -> tuple[float, float]:
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    span = hi - lo
    return lo - pad * span, hi + pad * span


def svg_scatter(
    x: np.ndarray,
    y: np.ndarray,
    xlabel: str,
    ylabel: str,
    identity_line: bool = True,
    colors: list[str] | None = None,
    legend: dict[str, str] | None = None,
) -> str:
    """Minimal static SVG scatter plot with axes and an optional identity line."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    width, height, margin = 480, 480, 64
    x0, x1 = _axis_range(x)
    y0, y1 = _axis_range(y)
    if identity_line:
        lo = min(x0, y0)
        hi = max(x1, y1)
        x0 = y0 = lo
        x1 = y1 = hi

    def sx(v):
        return margin + (v - x0) / (x1 - x0) * (width - 2 * margin)

    def sy(v):
        return height - margin - (v - y0) / (y1 - y0) * (height - 2 * margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" '
        f'stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="{height - 16}" text-anchor="middle" '
        f'font-size="14">{xlabel}</text>',
        f'<text x="18" y="{height / 2:.1f}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 18 {height / 2:.1f})">{ylabel}</text>',
        f'<text x="{margin}" y="{height - margin + 18}" text-anchor="middle" '
        f'font-size="11">{x0:.2f}</text>',
        f'<text x="{width - margin}" y="{height - margin + 18}" text-anchor="middle" '
        f'font-size="11">{x1:.2f}</text>',
        f'<text x="{margin - 8}" y="{height - margin}" text-anchor="end" '
        f'font-size="11">{y0:.2f}</text>',
        f'<text x="{margin - 8}" y="{margin + 4}" text-anchor="end" '
        f'font-size="11">{y1:.2f}</text>',
    ]
    if identity_line:
        parts.append(
            f'<line x1="{sx(x0):.2f}" y1="{sy(x0):.2f}" x2="{sx(x1):.2f}" '
            f'y2="{sy(x1):.2f}" stroke="#888" stroke-dasharray="4 3"/>'
        )
    for i, (xv, yv) in enumerate(zip(x, y)):
        color = colors[i] if colors else "#1f5fbf"
        parts.append(
            f'<circle cx="{sx(xv):.2f}" cy="{sy(yv):.2f}" r="4" fill="{color}" '
            f'fill-opacity="0.7"/>'
        )
    if legend:
        ly = margin
        for label, color in legend.items():
            parts.append(
                f'<circle cx="{width - margin + 10}" cy="{ly}" r="4" fill="{color}"/>'
                f'<text x="{width - margin + 18}" y="{ly + 4}" font-size="11">{label}</text>'
            )
            ly += 18
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
