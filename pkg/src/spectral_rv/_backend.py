"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
fallback is used. Setting ``SPECTRAL_RV_PURE=1`` forces the fallback.
"""

import logging
import os

from . import _kernels_py

log = logging.getLogger(__name__)


def _load():
    if os.environ.get("SPECTRAL_RV_PURE", "") not in ("", "0"):
        return _kernels_py, "python"
    try:
        from . import _kernels
    except ImportError as exc:  # extension not built
        log.debug("compiled kernels unavailable (%s); using numpy fallback", exc)
        return _kernels_py, "python"
    return _kernels, "compiled"


kernels, BACKEND = _load()


def fourier_sum(x, w, s, sign=1.0):
    import numpy as np

    return kernels.fourier_sum(
        np.ascontiguousarray(x, dtype=np.float64),
        np.ascontiguousarray(w, dtype=np.complex128),
        np.ascontiguousarray(s, dtype=np.float64),
        float(sign),
    )


def bessel_k0(x, split=2.0):
    import numpy as np

    return kernels.bessel_k0(np.ascontiguousarray(x, dtype=np.float64), float(split))
