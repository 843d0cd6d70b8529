"""Backend selection for the exact elimination kernel.

The compiled extension is used when it was built; ``STRINGTOP_PURE=1``
forces the pure-Python implementation.
"""

import os

from stringtop import _kernel_py

try:
    from stringtop import _kernel as _compiled
except ImportError:
    _compiled = None

BACKENDS = {"python": _kernel_py}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled


def use_backend(name: str) -> str:
    """Switch the module-level kernel functions; returns the previous backend."""
    global BACKEND, rref_int, independent_rows
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} is not available (have {sorted(BACKENDS)})")
    previous = globals().get("BACKEND")
    impl = BACKENDS[name]
    BACKEND = name
    rref_int = impl.rref_int
    independent_rows = impl.independent_rows
    return previous


use_backend("python" if os.environ.get("STRINGTOP_PURE") == "1" or _compiled is None
            else "compiled")

__all__ = ["BACKEND", "BACKENDS", "rref_int", "independent_rows", "use_backend"]
