"""Uniform periodic grids, sampled functions and spectral primitives.

Every function handled by the package is modelled as a trigonometric
polynomial on a torus of period ``L`` sampled at ``N`` points per axis.
On that class the discrete Fourier transform, spectral shifts and the
rectangle rule are exact, so all operators built on top of them are exact
for the representable functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import GridMismatchError, InvalidConfigError, InvalidInputError

__all__ = [
    "Grid",
    "SampledFunction",
    "Spectrum",
    "dft",
    "idft",
    "quadrature",
    "periodic_shift_sample",
    "read_csv",
    "write_csv",
]


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with ``n`` points per axis on ``[0, period)^dim``.

    Parameters
    ----------
    dim : int
        Spatial dimension, 1 or 2.
    n : int
        Points per axis; a power of two, at least 8.
    period : float
        Torus period per axis.
    """

    dim: int = 1
    n: int = 512
    period: float = 2 * math.pi

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise InvalidConfigError(f"dim must be 1 or 2, got {self.dim}")
        if self.n < 8 or self.n & (self.n - 1):
            raise InvalidConfigError(f"n must be a power of two >= 8, got {self.n}")
        if not (self.period > 0 and math.isfinite(self.period)):
            raise InvalidConfigError(f"period must be positive, got {self.period}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def size(self) -> int:
        return self.n**self.dim

    @property
    def spacing(self) -> float:
        return self.period / self.n

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def volume(self) -> float:
        return self.period**self.dim

    @property
    def nyquist(self) -> float:
        """Largest represented angular frequency, ``pi * n / period``."""
        return math.pi * self.n / self.period

    @property
    def axis_points(self) -> np.ndarray:
        return np.arange(self.n) * self.spacing

    def coordinates(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of shape ``self.shape``, one per axis."""
        return tuple(np.meshgrid(*([self.axis_points] * self.dim), indexing="ij"))

    def integer_frequencies(self) -> np.ndarray:
        """Integer frequencies along one axis in FFT order, valued in (-n/2, n/2]."""
        k = np.fft.fftfreq(self.n, d=1.0 / self.n)
        k[self.n // 2] = self.n // 2
        return k

    def angular_frequencies(self) -> tuple[np.ndarray, ...]:
        """Angular frequency arrays of shape ``self.shape`` (FFT order)."""
        w = 2 * math.pi / self.period * self.integer_frequencies()
        return tuple(np.meshgrid(*([w] * self.dim), indexing="ij"))

    def frequency_modulus(self) -> np.ndarray:
        """``|xi|`` at every represented frequency (FFT order)."""
        return np.sqrt(sum(w**2 for w in self.angular_frequencies()))

    def signed_offsets(self) -> tuple[np.ndarray, ...]:
        """Signed periodic coordinates in ``[-period/2, period/2)`` of every grid point."""
        m = np.fft.fftfreq(self.n, d=1.0 / self.n) * self.spacing
        return tuple(np.meshgrid(*([m] * self.dim), indexing="ij"))

    def distance_to(self, x0) -> np.ndarray:
        """Periodic distance from every grid point to ``x0``."""
        x0 = np.broadcast_to(np.asarray(x0, dtype=float), (self.dim,))
        total = np.zeros(self.shape)
        for axis, c in enumerate(self.coordinates()):
            d = np.abs(c - x0[axis]) % self.period
            total += np.minimum(d, self.period - d) ** 2
        return np.sqrt(total)

    def origin_distance(self) -> np.ndarray:
        """Periodic distance from the origin, i.e. ``|x|`` on the torus."""
        return np.sqrt(sum(o**2 for o in self.signed_offsets()))

    def check_values(self, values, name="values") -> np.ndarray:
        arr = np.asarray(values)
        if arr.shape != self.shape:
            raise GridMismatchError(f"{name} has shape {arr.shape}, grid expects {self.shape}")
        return arr


class SampledFunction:
    """Complex samples of a periodic function on a :class:`Grid`."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values):
        arr = np.array(values, dtype=complex)
        if arr.size != grid.size:
            raise InvalidInputError(f"expected {grid.size} samples, got {arr.size}")
        arr = arr.reshape(grid.shape)
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("sampled function contains non-finite values")
        arr.setflags(write=False)
        self.grid = grid
        self.values = arr

    @classmethod
    def from_callable(cls, grid: Grid, func) -> "SampledFunction":
        return cls(grid, func(*grid.coordinates()))

    def abs(self) -> np.ndarray:
        return np.abs(self.values)

    def __mul__(self, c):
        return SampledFunction(self.grid, self.values * c)

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, SampledFunction):
            return NotImplemented
        if other.grid != self.grid:
            raise GridMismatchError("cannot add functions on different grids")
        return SampledFunction(self.grid, self.values + other.values)

    def __sub__(self, other):
        return self + (-1) * other

    def __repr__(self):
        return f"SampledFunction(grid={self.grid!r})"


class Spectrum:
    """Unitary (orthonormal) DFT coefficients of a sampled function, in FFT order."""

    __slots__ = ("grid", "coefficients")

    def __init__(self, grid: Grid, coefficients):
        arr = np.array(coefficients, dtype=complex).reshape(grid.shape)
        arr.setflags(write=False)
        self.grid = grid
        self.coefficients = arr

    def energy(self) -> float:
        """Coefficient-domain energy; equals ``quadrature(|f|**2)`` by Parseval."""
        return float(np.sum(np.abs(self.coefficients) ** 2) * self.grid.cell_volume)

    def coefficient(self, *freq: int) -> complex:
        """Coefficient at integer frequency ``freq`` (one integer per axis)."""
        idx = tuple(int(k) % self.grid.n for k in freq)
        return complex(self.coefficients[idx])


def dft(f: SampledFunction) -> Spectrum:
    return Spectrum(f.grid, np.fft.fftn(f.values, norm="ortho"))


def idft(spectrum: Spectrum) -> SampledFunction:
    return SampledFunction(spectrum.grid, np.fft.ifftn(spectrum.coefficients, norm="ortho"))


def quadrature(f, grid: Grid | None = None):
    """Rectangle-rule integral over the torus.

    Exact for trigonometric polynomials whose bandwidth is below the grid's
    Nyquist frequency.
    """
    if isinstance(f, SampledFunction):
        grid, values = f.grid, f.values
        if not np.any(values.imag):
            values = values.real
    else:
        if grid is None:
            raise InvalidInputError("a grid is required to integrate a raw array")
        values = grid.check_values(f)
    if not np.all(np.isfinite(values)):
        raise InvalidInputError("cannot integrate non-finite values")
    total = np.sum(values) * grid.cell_volume
    return complex(total) if np.iscomplexobj(total) else float(total)


def shift_multiplier(grid: Grid, offset) -> np.ndarray:
    """Spectral multiplier ``exp(i <xi, offset>)`` realizing ``f(x) -> f(x + offset)``."""
    offset = np.broadcast_to(np.asarray(offset, dtype=float), (grid.dim,))
    phase = sum(w * h for w, h in zip(grid.angular_frequencies(), offset))
    return np.exp(1j * phase)


def periodic_shift_sample(f: SampledFunction, offset) -> SampledFunction:
    """Samples of ``x -> f(x + offset)`` for an arbitrary real offset.

    Band-limited interpolation: the spectrum is multiplied by
    ``exp(i <xi, offset>)``, which is exact on the trigonometric model.
    """
    spec = np.fft.fftn(f.values) * shift_multiplier(f.grid, offset)
    return SampledFunction(f.grid, np.fft.ifftn(spec))


# -- CSV ingestion -----------------------------------------------------------


def _parse_header(line: str) -> dict:
    fields = {}
    for token in line.lstrip("#").split():
        if "=" in token:
            key, value = token.split("=", 1)
            fields[key.strip()] = value.strip()
    return fields


def read_csv(path, period: float = 2 * math.pi) -> SampledFunction:
    """Read a sampled function written by :func:`write_csv`.

    One value per line, ``re`` or ``re,im``. An optional header line
    ``# dim=<d> n=<N> period=<L>`` fixes the grid; 2D files require it and
    store values in row-major order.
    """
    header = {}
    values = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            header.update(_parse_header(line))
            continue
        parts = line.split(",")
        try:
            if len(parts) == 1:
                values.append(complex(float(parts[0]), 0.0))
            elif len(parts) == 2:
                values.append(complex(float(parts[0]), float(parts[1])))
            else:
                raise ValueError
        except ValueError:
            raise InvalidInputError(f"{path}:{lineno}: expected 're' or 're,im', got {raw!r}") from None
    dim = int(header.get("dim", 1))
    period = float(header.get("period", period))
    if "n" in header:
        n = int(header["n"])
    elif dim == 1:
        n = len(values)
    else:
        raise InvalidInputError(f"{path}: 2D files need a '# dim=2 n=<N> period=<L>' header")
    grid = Grid(dim=dim, n=n, period=period)
    if len(values) != grid.size:
        raise InvalidInputError(f"{path}: expected {grid.size} values, found {len(values)}")
    return SampledFunction(grid, np.array(values))


def write_csv(path, f: SampledFunction) -> None:
    """Write ``f`` so that :func:`read_csv` returns bit-identical samples."""
    g = f.grid
    lines = [f"# dim={g.dim} n={g.n} period={g.period!r}"]
    real = not np.any(f.values.imag)
    for z in f.values.ravel():
        lines.append(repr(float(z.real)) if real else f"{float(z.real)!r},{float(z.imag)!r}")
    Path(path).write_text("\n".join(lines) + "\n")
