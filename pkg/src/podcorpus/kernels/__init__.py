"""Hot-loop kernels with a compiled backend and a pure-Python fallback.

The compiled extension is used when it was built and ``PODCORPUS_PURE_PYTHON``
is unset. ``BACKEND`` names the active one; ``get_backend`` gives direct
access to either for tests and benchmarks.
"""
from __future__ import annotations

import importlib
import os
from types import ModuleType

from . import _python

try:
    from . import _native
except ImportError:  # extension not built
    _native = None

if _native is not None and not os.environ.get("PODCORPUS_PURE_PYTHON"):
    _active: ModuleType = _native
    BACKEND = "native"
else:
    _active = _python
    BACKEND = "python"

viterbi_trellis = _active.viterbi_trellis
levenshtein = _active.levenshtein


def available_backends() -> list[str]:
    return ["python"] + (["native"] if _native is not None else [])


def get_backend(name: str) -> ModuleType:
    if name == "python":
        return _python
    if name == "native":
        if _native is None:
            raise ImportError("podcorpus.kernels._native is not built")
        return importlib.import_module(f"{__name__}._native")
    raise ValueError(f"unknown kernel backend {name!r}")
