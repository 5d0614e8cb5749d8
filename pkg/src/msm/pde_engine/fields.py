"""Periodic grids and the field containers shared by the wave solvers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import PreconditionError

BAND_LIMIT = 1e-8


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True)
class Grid1D:
    n: int
    length: float

    def __post_init__(self):
        if not _is_pow2(self.n):
            raise PreconditionError(f"node count {self.n} is not a power of two")
        if not self.length > 0:
            raise PreconditionError("domain length must be positive")

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.n) * self.dx

    @property
    def shape(self):
        return (self.n,)

    @property
    def cell(self) -> float:
        return self.dx

    def wavenumbers(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    def rwavenumbers(self) -> np.ndarray:
        return 2 * np.pi * np.fft.rfftfreq(self.n, d=self.dx)

    @property
    def k_nyquist(self) -> float:
        return np.pi / self.dx

    def meta(self) -> dict:
        return {"n": self.n, "length": self.length, "dx": self.dx}


@dataclass(frozen=True)
class Grid2D:
    """Periodic grid in the (x, z) plane; arrays are indexed ``[ix, iz]``."""

    nx: int
    nz: int
    lx: float
    lz: float

    def __post_init__(self):
        if not (_is_pow2(self.nx) and _is_pow2(self.nz)):
            raise PreconditionError("node counts must be powers of two")
        if not (self.lx > 0 and self.lz > 0):
            raise PreconditionError("domain lengths must be positive")

    @property
    def shape(self):
        return (self.nx, self.nz)

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def dz(self) -> float:
        return self.lz / self.nz

    @property
    def cell(self) -> float:
        return self.dx * self.dz

    def mesh(self):
        x = np.arange(self.nx) * self.dx
        z = np.arange(self.nz) * self.dz
        return np.meshgrid(x, z, indexing="ij")

    def wavenumbers(self):
        qx = 2 * np.pi * np.fft.fftfreq(self.nx, d=self.dx)
        qz = 2 * np.pi * np.fft.fftfreq(self.nz, d=self.dz)
        return np.meshgrid(qx, qz, indexing="ij")

    def meta(self) -> dict:
        return {"nx": self.nx, "nz": self.nz, "lx": self.lx, "lz": self.lz}


def upper_band_fraction(values: np.ndarray) -> float:
    """Fraction of spectral power at wavenumbers above half the Nyquist value (per axis)."""
    spec = np.abs(np.fft.fftn(values)) ** 2
    total = spec.sum()
    if total == 0:
        return 0.0
    mask = np.zeros(values.shape, dtype=bool)
    for axis, n in enumerate(values.shape):
        f = np.abs(np.fft.fftfreq(n))
        shape = [1] * values.ndim
        shape[axis] = n
        mask |= (f > 0.25).reshape(shape)
    return float(spec[mask].sum() / total)


@dataclass(frozen=True)
class EnvelopeField:
    grid: object
    values: np.ndarray
    k: float
    omega: float
    t: float = 0.0
    check_band: bool = True

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.grid.shape:
            raise PreconditionError(f"values shape {v.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "values", v)
        if self.check_band:
            frac = upper_band_fraction(v)
            if frac >= BAND_LIMIT:
                raise PreconditionError(f"envelope is not slowly varying: upper-band power fraction {frac:.3g}")

    def mass(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.cell)


@dataclass(frozen=True)
class WaveField:
    grid: Grid1D
    u: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        for name in ("u", "v"):
            a = np.asarray(getattr(self, name))
            if np.iscomplexobj(a):
                if np.max(np.abs(a.imag), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(a.real), initial=0.0)):
                    raise ValueError(f"{name} must be real")
                a = a.real
            a = a.astype(float)
            if a.shape != self.grid.shape:
                raise PreconditionError(f"{name} shape {a.shape} does not match grid")
            object.__setattr__(self, name, a)


@dataclass
class Trajectory:
    """Snapshots of a time integration together with run metadata."""

    times: np.ndarray
    states: list
    meta: dict = field(default_factory=dict)

    @property
    def final(self):
        return self.states[-1]

    def __len__(self):
        return len(self.states)


def gaussian_envelope(grid: Grid1D, amplitude: float, width: float, center: float | None = None) -> np.ndarray:
    """``amplitude * exp(-((x - center)/width)**2)``, centred mid-domain by default."""
    c = grid.length / 2 if center is None else center
    return amplitude * np.exp(-(((grid.x - c) / width) ** 2)) + 0j


def spectral_interpolate(values: np.ndarray, n_fine: int) -> np.ndarray:
    """Band-limited interpolation of periodic samples onto ``n_fine`` points."""
    n = values.shape[0]
    if n_fine == n:
        return values.copy()
    if n_fine < n:
        raise ValueError("target grid must not be coarser")
    spec = np.fft.fft(values)
    out = np.zeros(n_fine, dtype=complex)
    h = n // 2
    out[:h] = spec[:h]
    out[-h:] = spec[-h:]
    # Split the Nyquist bin symmetrically.
    out[h] = 0.5 * spec[h]
    out[-h] = 0.5 * spec[h]
    return np.fft.ifft(out) * (n_fine / n)
