"""CSV trace format shared by the benchmark CLI and downstream plotting."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import math

from .errors import ParseError

TRACE_COLUMNS = ("iter", "f_value", "grad_norm", "kappa", "branch", "elapsed_ns", "aux")
TRACE_HEADER = ",".join(TRACE_COLUMNS)
BRANCHES = ("bar", "tilde", "n/a")


@dataclass
class TraceRow:
    iter: int
    f_value: float
    grad_norm: float
    kappa: float
    branch: str
    elapsed_ns: int
    aux: float | None = None

    def validate(self) -> None:
        if self.iter < 0:
            raise ValueError("iter must be nonnegative")
        if not math.isfinite(self.f_value):
            raise ValueError("f_value must be finite")
        if self.branch not in BRANCHES:
            raise ValueError(f"branch must be one of {BRANCHES}")


def _fmt(x: float) -> str:
    return repr(float(x))


def write_trace_csv(path, rows: list[TraceRow]) -> None:
    last_iter = -1
    lines = [TRACE_HEADER]
    for row in rows:
        row.validate()
        if row.iter <= last_iter:
            raise ValueError("iterations must strictly increase within a trace")
        last_iter = row.iter
        aux = "" if row.aux is None else _fmt(row.aux)
        lines.append(
            f"{row.iter},{_fmt(row.f_value)},{_fmt(row.grad_norm)},{_fmt(row.kappa)},"
            f"{row.branch},{row.elapsed_ns},{aux}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_trace_csv(path) -> list[TraceRow]:
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln]
    if not lines:
        raise ParseError(f"empty trace file {path}")
    if lines[0] != TRACE_HEADER:
        raise ParseError(f"unexpected header in {path}: {lines[0]!r}")
    rows = []
    last_iter = -1
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(TRACE_COLUMNS):
            raise ParseError(f"expected {len(TRACE_COLUMNS)} fields", line=lineno)
        try:
            row = TraceRow(
                iter=int(parts[0]),
                f_value=float(parts[1]),
                grad_norm=float(parts[2]),
                kappa=float(parts[3]),
                branch=parts[4],
                elapsed_ns=int(parts[5]),
                aux=None if parts[6] == "" else float(parts[6]),
            )
            row.validate()
            for v in (row.f_value, row.grad_norm, row.kappa):
                if not math.isfinite(v):
                    raise ValueError("non-finite numeric column")
            if row.aux is not None and not math.isfinite(row.aux):
                raise ValueError("non-finite aux")
        except (ValueError, IndexError) as exc:
            raise ParseError(str(exc), line=lineno) from exc
        if row.iter <= last_iter:
            raise ParseError("iterations must strictly increase", line=lineno)
        last_iter = row.iter
        rows.append(row)
    return rows
