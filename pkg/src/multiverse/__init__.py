"""Multiverse analysis toolchain: DSL compiler, parallel runner, stats
engine, and a local visualization server."""

__version__ = "0.1.0"

from .errors import EmptyMultiverseError, RunError, SpecError  # noqa: F401
from .parser import parse_spec  # noqa: F401
from .enumerator import build_summary, enumerate, enumerate_paths  # noqa: F401
from .synthesizer import synthesize, write_universes  # noqa: F401
