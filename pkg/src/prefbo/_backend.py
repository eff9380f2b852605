"""Select the compiled Gibbs kernels when available, else the fallback.

Set PREFBO_PURE_PYTHON=1 to force the fallback (useful for benchmarking and
for checking that both backends walk the same chain).
"""

import os

if os.environ.get("PREFBO_PURE_PYTHON"):
    _impl = None
else:
    try:
        from prefbo import _gibbs_core as _impl
    except ImportError:
        _impl = None

if _impl is None:
    from prefbo import _gibbs_fallback as _impl

    BACKEND = "python"
else:
    BACKEND = "compiled"

tn_below_zero = _impl.tn_below_zero
tn_below_zero_batch = _impl.tn_below_zero_batch
gibbs_sweeps = _impl.gibbs_sweeps


def active_backend():
    """'compiled' if the C extension is in use, else 'python'."""
    return BACKEND
