import shutil
import subprocess

import numpy as np
import pytest

from mcat_plot.cli import main
from mcat_plot.render import render_traces
from mcat_plot.traces import EXPECTED_HEADER, TraceFormatError, read_trace

HEADER = EXPECTED_HEADER


def write_trace(path, n=40, aux=True, seed=0, offset=0.0):
    """Fabricate a completion-style trace in the documented CSV format."""
    rng = np.random.default_rng(seed)
    f = 100.0 * np.exp(-0.05 * np.arange(n)) + 36.0 + offset
    g = 10.0 * np.exp(-0.04 * np.arange(n)) * (1 + 0.1 * rng.random(n))
    lines = [HEADER]
    for k in range(n):
        a = "" if not aux else repr(float(0.4 * np.exp(-0.03 * k) + 0.1))
        lines.append(f"{k},{float(f[k])!r},{float(g[k])!r},0.1,n/a,{k * 1000},{a}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


class TestReader:
    def test_reads_valid_trace(self, tmp_path):
        t = read_trace(write_trace(tmp_path / "a.csv"))
        assert t.label == "a"
        assert len(t.iters) == 40
        assert t.has_aux

    def test_rejects_bad_header(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("iteration,loss\n0,1\n", encoding="utf-8")
        with pytest.raises(TraceFormatError):
            read_trace(p)

    def test_rejects_empty(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text("", encoding="utf-8")
        with pytest.raises(TraceFormatError):
            read_trace(p)

    def test_rejects_nonfinite(self, tmp_path):
        p = tmp_path / "nan.csv"
        p.write_text(HEADER + "\n0,nan,1.0,0.1,n/a,0,\n", encoding="utf-8")
        with pytest.raises(TraceFormatError):
            read_trace(p)

    def test_empty_aux_allowed(self, tmp_path):
        t = read_trace(write_trace(tmp_path / "na.csv", aux=False))
        assert not t.has_aux


class TestRender:
    def test_three_panels_two_curves(self, tmp_path):
        traces = [
            read_trace(write_trace(tmp_path / "comp_rgd.csv", seed=1)),
            read_trace(write_trace(tmp_path / "comp_catalyst.csv", seed=2, offset=-1.0)),
        ]
        out = tmp_path / "fig.png"
        summary = render_traces(traces, out)
        assert summary.n_panels == 3
        assert summary.n_curves == 2
        assert out.exists() and out.stat().st_size > 0

    def test_two_panels_without_aux(self, tmp_path):
        traces = [read_trace(write_trace(tmp_path / "a.csv", aux=False))]
        summary = render_traces(traces, tmp_path / "fig.png")
        assert summary.n_panels == 2
        assert summary.n_curves == 1

    def test_idempotent_overwrite(self, tmp_path):
        traces = [read_trace(write_trace(tmp_path / "a.csv"))]
        out = tmp_path / "fig.png"
        first = render_traces(traces, out, log_scale=True)
        second = render_traces(traces, out, log_scale=True)
        assert (first.n_panels, first.n_curves) == (second.n_panels, second.n_curves)
        assert out.exists()


class TestEndToEnd:
    def test_real_completion_traces(self, tmp_path, capsys):
        # drive the solver CLI (the external interface) and render its output
        mcat = shutil.which("mcat")
        if mcat is None:
            pytest.skip("mcat CLI not installed")
        proc = subprocess.run(
            [mcat, "complete", "--rows", "30", "--cols", "40", "--rank", "2",
             "--density", "0.4", "--lambda", "0.01", "--noise", "0.05",
             "--solver", "rgd", "--solver", "catalyst", "--iters", "15",
             "--seed", "4", "--out", str(tmp_path / "comp")],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        out = tmp_path / "fig.png"
        code = main([str(tmp_path / "comp_rgd.csv"), str(tmp_path / "comp_catalyst.csv"),
                     "--out", str(out), "--log"])
        assert code == 0
        assert "3 panels, 2 curves" in capsys.readouterr().out
        assert out.stat().st_size > 0


class TestCli:
    def test_renders_completion_pair(self, tmp_path, capsys):
        a = write_trace(tmp_path / "comp_rgd.csv", seed=3)
        b = write_trace(tmp_path / "comp_catalyst.csv", seed=4, offset=-0.5)
        out = tmp_path / "fig.png"
        code = main([str(a), str(b), "--out", str(out), "--log"])
        assert code == 0
        assert "3 panels, 2 curves" in capsys.readouterr().out
        assert out.stat().st_size > 0

    def test_corrupted_header_exit_2(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("iter,f_value,grad_norm\n0,1,2\n", encoding="utf-8")
        assert main([str(bad), "--out", str(tmp_path / "fig.png")]) == 2

    def test_missing_file_exit_2(self, tmp_path):
        assert main([str(tmp_path / "absent.csv"), "--out", str(tmp_path / "fig.png")]) == 2
