"""Uniform grids on the real line and sampled complex-valued functions.

Everything downstream (Jost solves, singular integrals, RHP collocation) works on
uniform grids; the two types here carry the samples plus the small amount of
metadata (spacing, tail magnitudes) the solvers key their diagnostics on.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import SchemaError, ValidationError

TAIL_THRESHOLD = 1e-8   # decay warning level, matches the 1e-6..1e-3 target band


@dataclass(frozen=True)
class RealGrid:
    """Uniform sampling of [z_min, z_max] with n points including both endpoints."""

    z_min: float
    z_max: float
    n: int

    def __post_init__(self):
        if self.n < 8:
            raise ValidationError(f"grid needs n >= 8, got {self.n}")
        if not (self.z_min < 0.0 < self.z_max):
            raise ValidationError(
                f"grid must straddle 0, got [{self.z_min}, {self.z_max}]")

    @property
    def h(self) -> float:
        return (self.z_max - self.z_min) / (self.n - 1)

    def points(self) -> np.ndarray:
        return np.linspace(self.z_min, self.z_max, self.n)

    @classmethod
    def symmetric(cls, half_width: float, n: int) -> "RealGrid":
        return cls(-half_width, half_width, n)


@dataclass
class GridFunction:
    """Complex samples of a function on a RealGrid."""

    grid: RealGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.n,):
            raise ValidationError(
                f"expected {self.grid.n} samples, got shape {self.values.shape}")

    @classmethod
    def from_callable(cls, grid: RealGrid, f) -> "GridFunction":
        return cls(grid, np.asarray(f(grid.points()), dtype=complex))

    @classmethod
    def zeros(cls, grid: RealGrid) -> "GridFunction":
        return cls(grid, np.zeros(grid.n, dtype=complex))

    def tail_magnitudes(self) -> tuple[float, float]:
        return abs(self.values[0]), abs(self.values[-1])

    def tails_decay(self, threshold: float = TAIL_THRESHOLD) -> bool:
        lo, hi = self.tail_magnitudes()
        return lo <= threshold and hi <= threshold

    def copy(self) -> "GridFunction":
        return GridFunction(self.grid, self.values.copy())

    # --- CSV serialization: columns z, re, im with a grid header line ---

    def to_csv(self, path_or_buf) -> None:
        buf = path_or_buf if hasattr(path_or_buf, "write") else open(path_or_buf, "w")
        try:
            buf.write(f"# grid {self.grid.z_min!r} {self.grid.z_max!r} {self.grid.n}\n")
            buf.write("z,re,im\n")
            for z, v in zip(self.grid.points(), self.values):
                buf.write(f"{z!r},{v.real!r},{v.imag!r}\n")
        finally:
            if buf is not path_or_buf:
                buf.close()

    @classmethod
    def from_csv(cls, path_or_buf) -> "GridFunction":
        buf = path_or_buf if hasattr(path_or_buf, "read") else open(path_or_buf)
        try:
            header = buf.readline().split()
            if len(header) != 5 or header[0] != "#" or header[1] != "grid":
                raise SchemaError("expected '# grid z_min z_max n' header")
            grid = RealGrid(float(header[2]), float(header[3]), int(header[4]))
            data = np.loadtxt(io.StringIO(buf.read()), delimiter=",", skiprows=1)
            if data.shape != (grid.n, 3):
                raise SchemaError(f"expected {grid.n} rows of z,re,im")
            return cls(grid, data[:, 1] + 1j*data[:, 2])
        finally:
            if buf is not path_or_buf:
                buf.close()
