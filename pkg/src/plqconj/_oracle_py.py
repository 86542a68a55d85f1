"""Pure numpy grid maximum (fallback for the compiled kernel)."""
import numpy as np


def grid_max(S, X, F, chunk=2_000_000):
    S = np.ascontiguousarray(S, dtype=np.float64)
    X = np.ascontiguousarray(X, dtype=np.float64)
    F = np.ascontiguousarray(F, dtype=np.float64)
    out = np.full(len(S), -np.inf)
    step = max(1, chunk // max(1, len(S)))
    for k in range(0, len(X), step):
        blk = S @ X[k : k + step].T - F[k : k + step]
        np.maximum(out, blk.max(axis=1), out=out)
    return out
