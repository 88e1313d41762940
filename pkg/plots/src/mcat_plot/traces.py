"""Reader for mcat benchmark CSV traces.

The file contract is the only coupling to the solver package: a header line
``iter,f_value,grad_norm,kappa,branch,elapsed_ns,aux`` followed by rows whose
numeric columns parse as finite reals (aux may be empty).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

EXPECTED_HEADER = "iter,f_value,grad_norm,kappa,branch,elapsed_ns,aux"


class TraceFormatError(ValueError):
    """The file does not follow the trace CSV contract."""


@dataclass
class TraceFile:
    path: Path
    label: str
    iters: list[int]
    f_values: list[float]
    grad_norms: list[float]
    kappas: list[float]
    branches: list[str]
    aux: list[float | None]

    @property
    def has_aux(self) -> bool:
        return any(a is not None for a in self.aux)


def read_trace(path) -> TraceFile:
    path = Path(path)
    lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln]
    if not lines:
        raise TraceFormatError(f"{path}: empty trace file")
    if lines[0] != EXPECTED_HEADER:
        raise TraceFormatError(f"{path}: unexpected header {lines[0]!r}")
    if len(lines) == 1:
        raise TraceFormatError(f"{path}: no data rows")
    out = TraceFile(path=path, label=path.stem, iters=[], f_values=[], grad_norms=[],
                    kappas=[], branches=[], aux=[])
    last_iter = None
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 7:
            raise TraceFormatError(f"{path}:{lineno}: expected 7 fields, got {len(parts)}")
        try:
            it = int(parts[0])
            numeric = [float(parts[i]) for i in (1, 2, 3)]
            elapsed = int(parts[5])
            aux = None if parts[6] == "" else float(parts[6])
        except ValueError as exc:
            raise TraceFormatError(f"{path}:{lineno}: {exc}") from exc
        if any(not math.isfinite(v) for v in numeric) or (aux is not None and not math.isfinite(aux)):
            raise TraceFormatError(f"{path}:{lineno}: non-finite value")
        if last_iter is not None and it <= last_iter:
            raise TraceFormatError(f"{path}:{lineno}: iterations must increase")
        last_iter = it
        out.iters.append(it)
        out.f_values.append(numeric[0])
        out.grad_norms.append(numeric[1])
        out.kappas.append(numeric[2])
        out.branches.append(parts[4])
        out.aux.append(aux)
    return out
