"""Multi-panel convergence figures from benchmark traces."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .traces import TraceFile

PANELS = (
    ("f_value", "loss"),
    ("grad_norm", "gradient norm"),
    ("aux", "auxiliary metric"),
)


@dataclass(frozen=True)
class RenderSummary:
    out_path: Path
    n_panels: int
    n_curves: int

    def __str__(self) -> str:
        return f"wrote {self.out_path}: {self.n_panels} panels, {self.n_curves} curves"


def render_traces(traces: list[TraceFile], out_path, log_scale: bool = False) -> RenderSummary:
    """One labeled curve per trace in each panel; the aux panel appears only
    when at least one input carries aux values."""
    if not traces:
        raise ValueError("at least one trace is required")
    with_aux = any(t.has_aux for t in traces)
    panels = [p for p in PANELS if p[0] != "aux" or with_aux]

    fig, axes = plt.subplots(1, len(panels), figsize=(4.2 * len(panels), 3.4))
    if len(panels) == 1:
        axes = [axes]
    for ax, (column, title) in zip(axes, panels):
        for trace in traces:
            if column == "aux":
                pairs = [(k, a) for k, a in zip(trace.iters, trace.aux) if a is not None]
                if not pairs:
                    continue
                xs, ys = zip(*pairs)
            else:
                xs = trace.iters
                ys = getattr(trace, column + "s")
            ax.plot(xs, ys, label=trace.label, linewidth=1.4)
        ax.set_xlabel("iteration")
        ax.set_ylabel(title)
        if log_scale:
            ax.set_yscale("log")
        ax.legend(fontsize="small")
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=130)
    plt.close(fig)
    return RenderSummary(out_path=out_path, n_panels=len(panels), n_curves=len(traces))
