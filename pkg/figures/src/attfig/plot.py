"""Render the two standard panels of an estimation run.

Input CSVs come from the simulator (one row per integrator step) with the
fixed column order

    step,time,zeta_norm_deg,domega_norm,trace_P,measured,contained

Panel (a) shows attitude and angular velocity estimation errors against
time, panel (b) the uncertainty size tr(P); vertical markers indicate
measurement instants. Several runs overlay with legend labels taken from
the file names. Inputs are never modified and the output is deterministic
for identical inputs.
"""

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

EXPECTED_COLUMNS = ["step", "time", "zeta_norm_deg", "domega_norm", "trace_P",
                    "measured", "contained"]


class SchemaError(Exception):
    """CSV does not match the simulator record schema."""


@dataclass
class RunData:
    label: str
    time: np.ndarray
    zeta_deg: np.ndarray
    domega: np.ndarray
    trace_P: np.ndarray
    measured: np.ndarray


@dataclass
class PlotSpec:
    runs: list
    out: str
    log_errors: bool = True
    dpi: int = 150
    _loaded: list = field(default_factory=list, repr=False)


def load_run(path) -> RunData:
    """Parse one record CSV, validating the schema before reading any data."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file (no header row)") from None
        if header != EXPECTED_COLUMNS:
            missing = [c for c in EXPECTED_COLUMNS if c not in header]
            extra = [c for c in header if c not in EXPECTED_COLUMNS]
            bad = (missing + extra or ["column order"])[0]
            raise SchemaError(f"{path}: unexpected schema (offending column: {bad})")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    try:
        data = np.array([[float(r[1]), float(r[2]), float(r[3]), float(r[4]), float(r[5])]
                         for r in rows])
    except (ValueError, IndexError) as exc:
        raise SchemaError(f"{path}: malformed row ({exc})") from exc
    return RunData(
        label=path.stem,
        time=data[:, 0],
        zeta_deg=data[:, 1],
        domega=data[:, 2],
        trace_P=data[:, 3],
        measured=data[:, 4] > 0.5,
    )


def plot_run(spec: PlotSpec) -> str:
    """Render the two-panel figure for one or more runs; returns the output path.

    All inputs are validated before any drawing, so a failure never leaves
    a partial output file.
    """
    runs = [load_run(p) for p in spec.runs]
    if not runs:
        raise SchemaError("no input runs given")

    fig, (ax_err, ax_tr) = plt.subplots(1, 2, figsize=(11.0, 4.2))
    single = len(runs) == 1
    for run in runs:
        suffix = "" if single else f" [{run.label}]"
        ax_err.plot(run.time, run.zeta_deg, lw=1.2, label=f"attitude error (deg){suffix}")
        ax_err.plot(run.time, run.domega, lw=1.2, ls="--", label=f"rate error{suffix}")
        ax_tr.plot(run.time, run.trace_P, lw=1.2, label=f"tr(P){suffix}")
    instants = sorted({t for run in runs for t in run.time[run.measured]})
    for ax in (ax_err, ax_tr):
        for t in instants:
            ax.axvline(t, color="0.8", lw=0.6, zorder=0)
        ax.set_xlabel("time")
        if spec.log_errors:
            ax.set_yscale("log")
    ax_err.set_title("estimation errors")
    ax_err.legend(fontsize=8)
    ax_tr.set_title("uncertainty size")
    ax_tr.legend(fontsize=8)
    fig.tight_layout()

    out = Path(spec.out)
    # pinned metadata keeps the bytes identical across renders
    metadata = {"Date": None} if out.suffix.lower() == ".svg" else {"Software": "attfig"}
    fig.savefig(out, dpi=spec.dpi, metadata=metadata)
    plt.close(fig)
    return str(out)
