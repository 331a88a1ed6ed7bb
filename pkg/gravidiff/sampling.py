"""Grid evaluation over z-rows with a bounded thread pool."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np

from .models import Grid

logger = logging.getLogger(__name__)

RowFunction = Callable[[float, np.ndarray], np.ndarray]


@dataclass
class ComplexAmplitudeField:
    """
    Complex amplitudes on a Grid, stored as an (nz, nx) array.

    Row i belongs to grid.zs()[i], column j to grid.xs()[j].
    """

    grid: Grid
    amplitudes: np.ndarray
    diagnostics: List[str] = field(default_factory=list)

    def __post_init__(self):
        expected = (self.grid.nz, self.grid.nx)
        if self.amplitudes.shape != expected:
            raise ValueError(f"Amplitude array has shape {self.amplitudes.shape}, expected {expected}")
        if not np.all(np.isfinite(self.amplitudes)):
            raise ValueError("Amplitude field contains non-finite entries")

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def column(self, x: float) -> np.ndarray:
        """Amplitudes along z at the grid column nearest to x."""
        j = int(np.argmin(np.abs(self.grid.xs() - x)))
        return self.amplitudes[:, j]


def evaluate_rows(row_fn: RowFunction, grid: Grid, threads: int = 1) -> np.ndarray:
    """
    Evaluate row_fn(z, xs) for every z of the grid.

    Rows are independent, so the result does not depend on the thread count.

    Args:
        row_fn: Function returning the complex row at height z
        grid: Sampling grid
        threads: Maximum worker threads

    Returns:
        Complex array of shape (nz, nx)
    """
    xs = grid.xs()
    zs = grid.zs()
    workers = max(1, min(int(threads), len(zs)))
    logger.debug(f"Evaluating {grid.nz}x{grid.nx} grid with {workers} thread(s)")

    if workers == 1:
        rows = [row_fn(float(z), xs) for z in zs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda z: row_fn(float(z), xs), zs))

    return np.vstack([np.asarray(row, dtype=complex).reshape(1, -1) for row in rows])
