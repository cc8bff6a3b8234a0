from __future__ import annotations

import numpy as np

from ..errors import DegenerateInputError
from ..matcore import ObservedMatrix


def persistent_fill(observed: ObservedMatrix) -> np.ndarray:
    """Fill each missing sample with the latest earlier observed sample in
    the same column (rows are sampling instants).

    Missing samples before a column's first observation take that first
    observed value instead.
    """
    values, mask = observed.values, observed.mask.astype(bool)
    empty = np.flatnonzero(~mask.any(axis=0))
    if empty.size:
        raise DegenerateInputError(
            f"column {int(empty[0]) + 1} (1-based) has no observed entries"
        )
    n1 = values.shape[0]
    rows = np.arange(n1)[:, None]
    last = np.where(mask, rows, -1)
    np.maximum.accumulate(last, axis=0, out=last)
    first = mask.argmax(axis=0)
    src = np.where(last < 0, first[None, :], last)
    return np.take_along_axis(values, src, axis=0)
