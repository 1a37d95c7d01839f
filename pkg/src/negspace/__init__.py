"""Negative-space collaboration engine: a shared virtual volume glued between
two remote displays, with head-coupled projection, replicated puzzle sessions,
and a reference-frame awareness analyzer."""

__version__ = "0.1.0"

from . import awareness, board, geometry, protocol, runtime, tasks
from .errors import NegspaceError

__all__ = ["awareness", "board", "geometry", "protocol", "runtime", "tasks",
           "NegspaceError", "__version__"]
