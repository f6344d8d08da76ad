"""Numpy pivot kernel (fallback when the extension is not compiled)."""

from __future__ import annotations

import numpy as np

DROP_TOL = 1e-11


def pivot(T: np.ndarray, d: np.ndarray, r: int, j: int) -> None:
    """Pivot tableau ``T`` and reduced-cost row ``d`` in place on ``T[r, j]``.

    Only rows with a nonzero in column ``j`` and columns with a nonzero in
    row ``r`` are touched. Entries falling below ``DROP_TOL`` are zeroed.
    """
    prow = T[r]
    cols = np.flatnonzero(prow)
    vals = prow[cols] / prow[j]
    prow[cols] = vals
    prow[j] = 1.0
    vals = prow[cols]

    col = T[:, j].copy()
    col[r] = 0.0
    rows = np.flatnonzero(col)
    if rows.size:
        block = T[np.ix_(rows, cols)]
        block -= np.outer(col[rows], vals)
        block[np.abs(block) < DROP_TOL] = 0.0
        T[np.ix_(rows, cols)] = block
        T[rows, j] = 0.0

    dj = d[j]
    if dj != 0.0:
        dv = d[cols] - dj * vals
        dv[np.abs(dv) < DROP_TOL] = 0.0
        d[cols] = dv
        d[j] = 0.0
