"""Select the integration kernel at import time.

The compiled ``_kernels`` extension is preferred. Setting the environment
variable ``WHORLSIM_PURE_PYTHON=1`` forces the pure-Python fallback.
"""
import os

from . import _kernels_py

if os.environ.get("WHORLSIM_PURE_PYTHON", "") not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

if _compiled is not None:
    FieldKernel = _compiled.FieldKernel
    BACKEND = "cython"
else:
    FieldKernel = _kernels_py.FieldKernel
    BACKEND = "python"

PyFieldKernel = _kernels_py.FieldKernel
CompiledFieldKernel = None if _compiled is None else _compiled.FieldKernel

TIME_LIMIT = _kernels_py.TIME_LIMIT
LEFT_WINDOW = _kernels_py.LEFT_WINDOW
STEP_UNDERFLOW = _kernels_py.STEP_UNDERFLOW
EQUILIBRIUM_CAPTURE = _kernels_py.EQUILIBRIUM_CAPTURE
