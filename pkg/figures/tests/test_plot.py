import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from attfig.cli import main
from attfig.plot import PlotSpec, SchemaError, load_run, plot_run

REPO_ROOT = Path(__file__).resolve().parents[2]
SEC5_CONFIG = REPO_ROOT / "scenarios" / "paper_sec5_full.json"

HEADER = "step,time,zeta_norm_deg,domega_norm,trace_P,measured,contained\n"


def synthetic_csv(path, n=40, meas_every=10):
    rows = [HEADER]
    for k in range(n + 1):
        measured = k > 0 and k % meas_every == 0
        zeta = 120.0 if k < meas_every else 1.5 / (1 + 0.05 * k)
        rows.append(f"{k},{0.01 * k},{zeta},{0.3 / (1 + k)},{50.0 / (1 + k)},"
                    f"{int(measured)},{'' if not measured else 1}\n")
    path.write_text("".join(rows))
    return path


@pytest.fixture(scope="module")
def sec5_csv(tmp_path_factory):
    """The quarter-orbit experiment CSV, produced through the simulator CLI."""
    out_dir = tmp_path_factory.mktemp("sec5")
    result = subprocess.run(
        [sys.executable, "-m", "attbound.cli", "simulate",
         "--config", str(SEC5_CONFIG), "--out", str(out_dir)],
        capture_output=True, text=True,
    )
    assert result.returncode == 0, result.stderr
    return out_dir / "trial_0.csv"


def test_acceptance_8_smoke_on_experiment_csv(sec5_csv, tmp_path):
    out = tmp_path / "sec5.png"
    assert main(["plot", "--runs", str(sec5_csv), "--out", str(out)]) == 0
    assert out.exists() and out.stat().st_size > 0
    # the plotted error series drops at the first measurement marker
    run = load_run(sec5_csv)
    first = int(np.argmax(run.measured))
    assert run.zeta_deg[first] < 0.1 * run.zeta_deg[first - 1]
    assert run.trace_P[first] < 0.1 * run.trace_P[first - 1]
    print(f"\nACCEPTANCE 8 PASS: rendered {out.stat().st_size} bytes from {sec5_csv.name}")


def test_empty_csv_clean_error_no_partial_output(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    out = tmp_path / "fig.png"
    with pytest.raises(SchemaError):
        plot_run(PlotSpec(runs=[str(empty)], out=str(out)))
    assert not out.exists()


def test_header_only_csv_is_rejected(tmp_path):
    bare = tmp_path / "bare.csv"
    bare.write_text(HEADER)
    with pytest.raises(SchemaError, match="no data rows"):
        load_run(bare)


def test_schema_mismatch_names_offending_column(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("step,time,zeta_norm_deg,wrong_name,trace_P,measured,contained\n0,0,1,1,1,0,\n")
    out = tmp_path / "fig.png"
    assert main(["plot", "--runs", str(bad), "--out", str(out)]) == 2
    err = capsys.readouterr().err
    assert "domega_norm" in err or "wrong_name" in err
    assert not out.exists()


def test_two_run_overlay_and_linear_flag(tmp_path):
    a = synthetic_csv(tmp_path / "full.csv")
    b = synthetic_csv(tmp_path / "attitude_only.csv")
    out = tmp_path / "compare.png"
    assert main(["plot", "--runs", str(a), str(b), "--out", str(out), "--linear"]) == 0
    assert out.exists() and out.stat().st_size > 0


def test_output_is_deterministic(tmp_path):
    src = synthetic_csv(tmp_path / "run.csv")
    out1, out2 = tmp_path / "a.png", tmp_path / "b.png"
    plot_run(PlotSpec(runs=[str(src)], out=str(out1)))
    plot_run(PlotSpec(runs=[str(src)], out=str(out2)))
    assert out1.read_bytes() == out2.read_bytes()


def test_svg_output(tmp_path):
    src = synthetic_csv(tmp_path / "run.csv")
    out = tmp_path / "fig.svg"
    assert main(["plot", "--runs", str(src), "--out", str(out)]) == 0
    assert out.read_text().startswith("<?xml")


def test_inputs_are_read_only(tmp_path):
    src = synthetic_csv(tmp_path / "run.csv")
    before = src.read_bytes()
    plot_run(PlotSpec(runs=[str(src)], out=str(tmp_path / "fig.png")))
    assert src.read_bytes() == before
