"""Recover a fiducial set from a probability table by linear compression."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..errors import ProbabilityRangeError, ShapeError
from ..utils.config import PROBABILITY_TOLERANCE, RANK_TOLERANCE

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FiducialCompression:
    """A maximal independent set of effects and the map rebuilding the rest.

    Attributes:
        fiducial_rows: Indices of the selected rows (effects), ascending.
        reconstruction: R x k matrix with ``table ~= reconstruction @ table[fiducial_rows]``.
        singular_values: Singular values of the table, descending.
    """

    fiducial_rows: tuple[int, ...]
    reconstruction: np.ndarray
    singular_values: np.ndarray

    @property
    def rank(self) -> int:
        return len(self.fiducial_rows)

    def predict(self, fiducial_probabilities: np.ndarray) -> np.ndarray:
        """All effect probabilities from the fiducial ones (columns are states)."""
        return self.reconstruction @ np.asarray(fiducial_probabilities, dtype=float)


def compress_to_fiducials(
    table: np.ndarray,
    tol: float = RANK_TOLERANCE,
    range_tol: float = PROBABILITY_TOLERANCE,
) -> FiducialCompression:
    """Select fiducial effects from a table of probabilities.

    The number of selected rows is the numerical rank (singular values
    above ``tol`` times the largest); rows are chosen by column-pivoted QR
    and every row is expressed in terms of them by least squares.

    Args:
        table: Rows are candidate effects, columns sampled states.
        tol: Relative rank tolerance.
        range_tol: Allowed excursion of entries outside [0, 1].

    Raises:
        ShapeError: On an empty table.
        ProbabilityRangeError: If an entry is not a probability.
    """
    table = np.asarray(table, dtype=float)
    if table.ndim != 2 or table.size == 0:
        raise ShapeError(f"Probability table must be a non-empty matrix, got shape {table.shape}")
    low, high = float(table.min()), float(table.max())
    if low < -range_tol:
        raise ProbabilityRangeError(low, range_tol)
    if high > 1 + range_tol:
        raise ProbabilityRangeError(high, range_tol)

    singular = np.linalg.svd(table, compute_uv=False)
    rank = 0 if singular[0] == 0 else int(np.sum(singular > tol * singular[0]))
    if rank == 0:
        return FiducialCompression((), np.zeros((len(table), 0)), singular)

    _, _, pivots = scipy.linalg.qr(table.T, mode="economic", pivoting=True)
    rows = tuple(sorted(int(p) for p in pivots[:rank]))
    coefficients, *_ = np.linalg.lstsq(table[list(rows)].T, table.T, rcond=None)
    logger.debug("compressed %d effects to %d fiducials", len(table), rank)
    return FiducialCompression(rows, coefficients.T, singular)
