"""Dynamic time warping between two cepstral sequences."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DimMismatch, EmptySequence


@dataclass(frozen=True)
class AlignmentPath:
    """Monotone frame pairing from (0, 0) to (T_a - 1, T_b - 1)."""

    pairs: np.ndarray
    cost: float

    def __len__(self):
        return len(self.pairs)

    @property
    def a_index(self) -> np.ndarray:
        return self.pairs[:, 0]

    @property
    def b_index(self) -> np.ndarray:
        return self.pairs[:, 1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["i", "j"])
        writer.writerows(self.pairs.tolist())
        return buf.getvalue()


def _as_matrix(x) -> np.ndarray:
    return np.asarray(getattr(x, "coeffs", x), dtype=np.float64)


def local_distances(a, b, exclude_c0: bool = True) -> np.ndarray:
    a, b = _as_matrix(a), _as_matrix(b)
    if exclude_c0:
        a, b = a[:, 1:], b[:, 1:]
    return cdist(a, b)


def dtw_align(a, b, exclude_c0: bool = True) -> AlignmentPath:
    """Globally optimal DTW path with steps (1,0), (0,1), (1,1).

    ``a`` and ``b`` are MelCepstra or T x M arrays.  The local distance is
    Euclidean over c_1.. (or all coefficients when ``exclude_c0`` is false),
    and the path cost is the sum of local distances over visited cells.
    Ties are broken towards the diagonal step, then (1,0), then (0,1).
    """
    a, b = _as_matrix(a), _as_matrix(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[0] == 0 or b.shape[0] == 0:
        raise EmptySequence(f"cannot align sequences of shape {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[1]:
        raise DimMismatch(f"feature dims differ: {a.shape[1]} vs {b.shape[1]}")

    d = local_distances(a, b, exclude_c0)
    ta, tb = d.shape
    acc = np.full((ta + 1, tb + 1), np.inf)
    acc[0, 0] = 0.0
    for i in range(1, ta + 1):
        prev = acc[i - 1]
        best_prev = np.minimum(prev[:-1], prev[1:])
        row = acc[i]
        di = d[i - 1]
        for j in range(1, tb + 1):
            left = row[j - 1]
            m = best_prev[j - 1]
            row[j] = di[j - 1] + (m if m <= left else left)

    i, j = ta, tb
    pairs = [(ta - 1, tb - 1)]
    while (i, j) != (1, 1):
        diag, up, left = acc[i - 1, j - 1], acc[i - 1, j], acc[i, j - 1]
        if diag <= up and diag <= left:
            i, j = i - 1, j - 1
        elif up <= left:
            i -= 1
        else:
            j -= 1
        pairs.append((i - 1, j - 1))
    pairs.reverse()
    return AlignmentPath(np.asarray(pairs, dtype=np.int64), float(acc[ta, tb]))
