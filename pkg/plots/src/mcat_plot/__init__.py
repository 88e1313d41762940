from .render import RenderSummary, render_traces
from .traces import TraceFile, TraceFormatError, read_trace

__version__ = "0.1.0"
__all__ = ["RenderSummary", "TraceFile", "TraceFormatError", "read_trace", "render_traces"]
