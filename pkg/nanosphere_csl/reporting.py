# reporting.py
"""Tabular output: pandas frames for every result kind and their CSV/table
serialisation. Every emitted file starts with a `# config_hash=` line."""
import io
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import markdown2
import numpy as np
import pandas as pd

from .exceptions import OutputError
from .physics_modules.dynamics import LinearModel, StabilityReport
from .physics_modules.noise import NoiseBudget
from .physics_modules.sweep import DiscriminatorReport, SweepResult, relative_difference

# 12 significant digits
FLOAT_FORMAT = "%.11e"
FORMATS = ("csv", "table")

SWEEP_COLUMNS = [
    "omega1", "omega2",
    "D_t1", "D_c1", "D_a1", "lambda_sph1",
    "D_t2", "D_c2", "D_a2", "lambda_sph2",
    "stable", "E_N_off", "E_N_on", "rel_diff",
]
RATES_COLUMNS = ["mode", "omega", "D_t", "D_c", "D_a", "lambda_sph", "total_no_csl", "total_csl"]
PLOT_SERIES = ["D_t1", "D_c1", "D_a1", "lambda_sph1", "total_no_csl1", "total_csl1", "E_N_off", "E_N_on"]
PARAMETER_COLUMNS = {"R": "R", "lambda": "lambda"}


def budget_columns(pair: Sequence[NoiseBudget]) -> Dict[str, float]:
    row = {}
    for b in pair:
        j = b.mode_index
        row.update({f"D_t{j}": b.D_t, f"D_c{j}": b.D_c, f"D_a{j}": b.D_a, f"lambda_sph{j}": b.lambda_sph})
    return row


def sweep_frame(result: SweepResult) -> pd.DataFrame:
    if result.has_variant(False) and result.has_variant(True):
        rel = relative_difference(result)
    else:
        rel = np.full(len(result.points), np.nan)
    rows = []
    for point, ratio in zip(result.points, rel):
        row = {"omega1": point.derived.omega1, "omega2": point.derived.omega2}
        row.update(budget_columns(point.budgets))
        row.update({"stable": point.stable, "E_N_off": point.E_N_off, "E_N_on": point.E_N_on,
                    "rel_diff": ratio})
        rows.append(row)
    frame = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
    column = PARAMETER_COLUMNS.get(result.spec.parameter)
    if column is not None:
        frame.insert(0, column, [p.value for p in result.points])
    return frame


def rates_frame(pair: Sequence[NoiseBudget], omegas: Sequence[float]) -> pd.DataFrame:
    rows = [
        {
            "mode": b.mode_index, "omega": omega, "D_t": b.D_t, "D_c": b.D_c, "D_a": b.D_a,
            "lambda_sph": b.lambda_sph, "total_no_csl": b.total_without_csl, "total_csl": b.total_with_csl,
        }
        for b, omega in zip(pair, omegas)
    ]
    return pd.DataFrame(rows, columns=RATES_COLUMNS)


def model_frame(model: LinearModel, report: StabilityReport) -> pd.DataFrame:
    """Long form: (block, row, col, value) for A, D, the eigenvalues and the verdict."""
    rows = []
    for block, matrix in (("A", model.drift), ("D", model.diffusion)):
        for i, name_i in enumerate(model.ordering):
            for j, name_j in enumerate(model.ordering):
                rows.append({"block": block, "row": name_i, "col": name_j, "value": matrix[i, j]})
    for k, eig in enumerate(report.eigenvalues):
        rows.append({"block": "eigenvalue", "row": str(k), "col": "re", "value": eig.real})
        rows.append({"block": "eigenvalue", "row": str(k), "col": "im", "value": eig.imag})
    rows.append({"block": "stability", "row": "abscissa", "col": "", "value": report.abscissa})
    rows.append({"block": "stability", "row": "stable", "col": "", "value": float(report.stable)})
    return pd.DataFrame(rows, columns=["block", "row", "col", "value"])


def entanglement_frame(records: List[Dict]) -> pd.DataFrame:
    return pd.DataFrame(records)


def plot_data(frame: pd.DataFrame, x: str = "omega1") -> pd.DataFrame:
    """(x, y, series) triples for external plotting."""
    data = frame.copy()
    data["total_no_csl1"] = data["D_t1"] + data["D_c1"] + data["D_a1"]
    data["total_csl1"] = data["total_no_csl1"] + data["lambda_sph1"]
    long = data.melt(id_vars=[x], value_vars=PLOT_SERIES, var_name="series", value_name="y")
    return long.rename(columns={x: "x"})[["x", "y", "series"]]


def emit(frame: pd.DataFrame, config_hash: str, fmt: str = "csv") -> bytes:
    if fmt not in FORMATS:
        raise ValueError(f"unknown output format {fmt!r}, expected one of {FORMATS}")
    buffer = io.StringIO()
    buffer.write(f"# config_hash={config_hash}\n")
    if fmt == "csv":
        frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", na_rep="nan")
    else:
        buffer.write(frame.to_string(index=False, float_format=lambda v: FLOAT_FORMAT % v, na_rep="nan"))
        buffer.write("\n")
    return buffer.getvalue().encode("utf-8")


def write_bytes(path, data: bytes) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "wb") as f:
            f.write(data)
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e}") from e
    return path


def write_text(path, text: str) -> Path:
    return write_bytes(path, text.encode("utf-8"))


def summary_markdown(title: str, result: SweepResult, report: Optional[DiscriminatorReport]) -> str:
    frame = sweep_frame(result)
    lines = [
        f"# {title}",
        "",
        f"- Config hash: `{result.metadata.config_hash}`",
        f"- Constants: {result.metadata.constants_version}",
        f"- Stable points: {int(frame['stable'].sum())} of {len(frame)}",
    ]
    for column, label in (("E_N_off", "without CSL"), ("E_N_on", "with CSL")):
        values = frame[column].to_numpy(dtype=float)
        if np.any(np.isfinite(values)):
            k = int(np.nanargmax(values))
            lines.append(f"- Peak E_N {label}: {values[k]:.4f} at omega1 = {frame['omega1'].iloc[k]:.4g} s^-1")
    if report is not None:
        lines += [
            "",
            "## Low-frequency discriminator",
            "",
            f"- Verdict: **{report.verdict}**",
            f"- Slope sign without / with CSL: {report.sign_off:+d} / {report.sign_on:+d}",
            f"- Mean relative gap over the window: {report.mean_gap:.3f}",
            f"- Relative gap at the leftmost window point: {report.leftmost_gap:.3f}",
            f"- Window: omega1 in [{report.window[0]:.4g}, {report.window[-1]:.4g}] s^-1",
        ]
    return "\n".join(lines) + "\n"


def render_html(markdown_text: str) -> str:
    return markdown2.markdown(markdown_text)
