"""Select the compiled kernels when available, the numpy ones otherwise.

``PUBCHOICE_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _kernels_py as python_kernels

try:
    from . import _kernels as compiled_kernels
except ImportError:  # extension not built
    compiled_kernels = None

if compiled_kernels is not None and not os.environ.get("PUBCHOICE_PURE_PYTHON"):
    kernels = compiled_kernels
    NAME = "cython"
else:
    kernels = python_kernels
    NAME = "python"

AVAILABLE = {"python": python_kernels}
if compiled_kernels is not None:
    AVAILABLE["cython"] = compiled_kernels
