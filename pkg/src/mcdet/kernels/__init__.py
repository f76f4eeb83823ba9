"""Hot-loop kernels with a compiled core and a NumPy fallback.

The Cython extension is used when it was built for this interpreter;
otherwise the pure implementations take over transparently. Set
``MCDET_PURE_PYTHON=1`` to force the fallback (used by the benchmark).
"""

import os

if os.environ.get("MCDET_PURE_PYTHON"):
    from mcdet.kernels._pykernels import (  # noqa: F401
        kmeans_lloyd,
        sequential_detect,
        viterbi_decode,
    )

    BACKEND = "python"
else:
    try:
        from mcdet.kernels._ckernels import (  # noqa: F401
            kmeans_lloyd,
            sequential_detect,
            viterbi_decode,
        )

        BACKEND = "cython"
    except ImportError:
        from mcdet.kernels._pykernels import (  # noqa: F401
            kmeans_lloyd,
            sequential_detect,
            viterbi_decode,
        )

        BACKEND = "python"
