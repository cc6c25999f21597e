"""Figure rendering for frontlab CSV/JSON/JSONL outputs."""

from .figures import KINDS, render
from .io import SchemaError, read_events, read_summary, read_table

__version__ = "0.1.0"

__all__ = ["KINDS", "render", "SchemaError", "read_table", "read_events",
           "read_summary"]
