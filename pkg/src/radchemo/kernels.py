"""Kernel backend selection.

The compiled extension is used when it was built; setting
``RADCHEMO_PURE_PYTHON=1`` forces the pure-Python implementation.
"""
import os

from . import _pykernels

if os.environ.get("RADCHEMO_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"
thomas = _impl.thomas
shoot = _impl.shoot
