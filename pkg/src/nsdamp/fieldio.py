"""Binary snapshot format for coefficient-space fields.

Layout: an 8-byte magic tag, then a little-endian header
(uint32 n_modes, float64 period, uint32 component_count, uint32 layout_tag),
then the coefficients of each component in row-major wavenumber order as
interleaved re/im pairs of 64-bit floats.  layout_tag 1 is the half-spectrum
(rfft along z) layout used throughout this package.
"""

from __future__ import annotations

import struct

import numpy as np

from .spectral import TorusGrid, VectorFieldK, ScalarFieldK

MAGIC = b"NSDF0001"
LAYOUT_RFFT_Z = 1
_HEADER = struct.Struct("<Id II")


def write_field(path, field) -> None:
    coeffs = field.coeffs if field.coeffs.ndim == 4 else field.coeffs[None]
    g = field.grid
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(_HEADER.pack(g.n, g.period, coeffs.shape[0], LAYOUT_RFFT_Z))
        fh.write(np.ascontiguousarray(coeffs).astype("<c16").tobytes())


def read_field(path, grid: TorusGrid):
    """Load a field onto an existing grid (n and period must match)."""
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise ValueError(f"{path}: not a field snapshot (bad magic)")
        n, period, ncomp, layout = _HEADER.unpack(fh.read(_HEADER.size))
        if layout != LAYOUT_RFFT_Z:
            raise ValueError(f"{path}: unsupported layout tag {layout}")
        if n != grid.n or abs(period - grid.period) > 1e-12 * period:
            raise ValueError(f"{path}: field is {n}^3/period={period:g}, grid is "
                             f"{grid.n}^3/period={grid.period:g}")
        raw = np.frombuffer(fh.read(), dtype="<c16")
    shape = (ncomp,) + grid.spectral_shape
    if raw.size != np.prod(shape):
        raise ValueError(f"{path}: truncated coefficient payload")
    coeffs = raw.reshape(shape).astype(complex)
    if ncomp == 1:
        return ScalarFieldK(grid, coeffs[0])
    if ncomp == 3:
        return VectorFieldK(grid, coeffs)
    raise ValueError(f"{path}: unsupported component count {ncomp}")
