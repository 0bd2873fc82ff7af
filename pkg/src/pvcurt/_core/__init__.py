"""Kernel backend selection.

The compiled Cython kernels are preferred; the pure-Python module is a
drop-in fallback with identical semantics. Set ``PVCURT_PURE_PYTHON=1`` to
force the fallback (used by the benchmark and the equivalence tests).
"""

import os

from . import _pykernels

if os.environ.get("PVCURT_PURE_PYTHON"):
    kernels = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as kernels

        BACKEND = "compiled"
    except ImportError:
        kernels = _pykernels
        BACKEND = "python"

# Shared vector layouts (see _pykernels module docstring).
RED_SIZE = 6
RED_T, RED_VDC, RED_INTV, RED_ID, RED_IQ, RED_IPV = range(6)

FUL_SIZE = 14
(
    FUL_T,
    FUL_VDC,
    FUL_ID,
    FUL_IQ,
    FUL_INTV,
    FUL_INTID,
    FUL_INTIQ,
    FUL_IPV,
    FUL_MD,
    FUL_MQ,
    FUL_UD,
    FUL_UQ,
    FUL_VSD,
    FUL_VSQ,
) = range(14)

ACC_SIZE = 3

DP_SIZE = 8
DP_IPH, DP_I0, DP_A, DP_RS, DP_RSH, DP_NS, DP_NP, DP_VOC = range(8)

PP_SIZE = 19
(
    PP_KPV,
    PP_KIV,
    PP_KPI,
    PP_KII,
    PP_ILIM,
    PP_IVCAP,
    PP_IICAP,
    PP_MMAX,
    PP_ED,
    PP_OMEGA,
    PP_LF,
    PP_RL,
    PP_LTOT,
    PP_RTOT,
    PP_LLEAK,
    PP_RLEAK,
    PP_CDC,
    PP_VCOLLAPSE,
    PP_WLO,
) = range(19)
