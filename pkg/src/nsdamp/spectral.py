"""Spectral kernel on the periodic torus.

Fields live as Fourier coefficients in the half-spectrum (rfft) layout:
shape (n, n, n//2 + 1) per component, wavenumbers k = (2*pi/period) * m
with integer m in [-n/2, n/2) per axis.  Transform convention: the forward
transform is the plain unnormalized DFT sum over the n^3 sample points and
the inverse carries the 1/n^3 factor (numpy/scipy default), so

    u(x_j) = (1/n^3) sum_k  u_hat(k) exp(i k . x_j).

Nyquist modes (m = -n/2 on any axis) are forced to zero.  Pointwise
products (convective term, damping term) are evaluated on an oversampled
grid of pad_factor * n points per axis; with pad_factor >= 1.5 quadratic
products are alias-free on the retained modes.

The mean (k = 0) mode convention: Leray projection zeroes it (the
projector matrix is undefined there), homogeneous norms of negative order
exclude it and require mean-free input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .damping import DampingLaw, eval_law

# Friedrich cutoff keeps modes with |k| strictly inside the ball of radius R
# (indicator of the open ball); boundary modes |k| == R are dropped.
CUTOFF_BALL_CONVENTION = "open"

_FFT_WORKERS = -1


def _rfftn(a):
    return sfft.rfftn(a, axes=(-3, -2, -1), workers=_FFT_WORKERS)


def _irfftn(a, shape):
    return sfft.irfftn(a, s=shape, axes=(-3, -2, -1), workers=_FFT_WORKERS)


@dataclass
class TorusGrid:
    """Cubic periodic grid descriptor: n modes per axis, physical period,
    and the oversampling factor used for pointwise products."""

    n: int
    period: float = 2.0 * np.pi
    pad_factor: float = 2.0

    def __post_init__(self):
        if self.n < 4 or self.n % 2:
            raise ValueError("n must be even and >= 4")
        if self.period <= 0:
            raise ValueError("period must be positive")
        if self.pad_factor not in (1, 1.5, 2):
            raise ValueError("pad_factor must be one of {1, 1.5, 2}")
        n = self.n
        self.scale = 2.0 * np.pi / self.period
        self.volume = self.period ** 3
        self.n_pad = int(round(n * self.pad_factor))
        # integer mode numbers, fftfreq order on full axes, rfftfreq on z
        m_full = np.fft.fftfreq(n, d=1.0 / n)
        m_half = np.arange(n // 2 + 1, dtype=float)
        self.kx = (self.scale * m_full).reshape(n, 1, 1)
        self.ky = (self.scale * m_full).reshape(1, n, 1)
        self.kz = (self.scale * m_half).reshape(1, 1, n // 2 + 1)
        self.k2 = self.kx ** 2 + self.ky ** 2 + self.kz ** 2
        self.kmag = np.sqrt(self.k2)
        # multiplicity of each stored mode in the full spectrum
        w = np.full(n // 2 + 1, 2.0)
        w[0] = 1.0
        w[-1] = 1.0  # z-Nyquist plane, zeroed anyway
        self.mult = w.reshape(1, 1, n // 2 + 1)
        nyq = n // 2
        mask = np.ones((n, n, n // 2 + 1), dtype=bool)
        mask[nyq, :, :] = False
        mask[:, nyq, :] = False
        mask[:, :, -1] = False
        self.keep_mask = mask  # False on Nyquist planes
        self._neg = (-np.arange(n)) % n
        # norm prefactor: ||u||_{L^2}^2 = volume/n^6 * sum w |u_hat|^2
        self.norm_fac = self.volume / float(n) ** 6

    def __eq__(self, other):
        return (isinstance(other, TorusGrid)
                and (self.n, self.period, self.pad_factor)
                == (other.n, other.period, other.pad_factor))

    @property
    def spectral_shape(self):
        return (self.n, self.n, self.n // 2 + 1)

    @property
    def physical_shape(self):
        return (self.n, self.n, self.n)

    def physical_points(self):
        """Sample coordinates along one axis (same for all three)."""
        return np.arange(self.n) * (self.period / self.n)

    def max_resolved_radius(self) -> float:
        """Largest |k| representable after Nyquist zeroing."""
        return self.scale * np.sqrt(3.0) * (self.n // 2 - 1)

    def default_cutoff_radius(self) -> float:
        """Ball radius at which truncation and dealiasing coincide:
        min(pad * n/3, n/2) in integer mode units."""
        return self.scale * min(self.pad_factor * self.n / 3.0, self.n / 2.0)

    # -- padded-grid plumbing for pointwise products -------------------

    def pad_embed(self, coeffs):
        """Embed base coefficients into the padded half-spectrum, scaled so
        that irfftn on the padded grid evaluates the same trig polynomial."""
        M = self.n_pad
        out = np.zeros(coeffs.shape[:-3] + (M, M, M // 2 + 1), dtype=complex)
        h = self.n // 2
        pos = slice(0, h)
        bneg = slice(self.n - (h - 1), self.n)
        pneg = slice(M - (h - 1), M)
        for sx, dx in ((pos, pos), (bneg, pneg)):
            for sy, dy in ((pos, pos), (bneg, pneg)):
                out[..., dx, dy, 0:h] = coeffs[..., sx, sy, 0:h]
        out *= self.pad_factor ** 3
        return out

    def pad_extract(self, coeffs_pad):
        """Take base-grid coefficients out of a padded half-spectrum
        (adjoint of pad_embed, including the 1/pad^3 scaling)."""
        M = self.n_pad
        out = np.zeros(coeffs_pad.shape[:-3] + self.spectral_shape, dtype=complex)
        h = self.n // 2
        pos = slice(0, h)
        bneg = slice(self.n - (h - 1), self.n)
        pneg = slice(M - (h - 1), M)
        for sx, dx in ((pos, pos), (pneg, bneg)):
            for sy, dy in ((pos, pos), (pneg, bneg)):
                out[..., dx, dy, 0:h] = coeffs_pad[..., sx, sy, 0:h]
        out /= self.pad_factor ** 3
        return out

    def to_padded_physical(self, coeffs):
        M = self.n_pad
        return _irfftn(self.pad_embed(coeffs), (M, M, M))

    def from_padded_physical(self, values):
        return self.pad_extract(_rfftn(values))

    def hermitify(self, coeffs):
        """Symmetrize the kz = 0 plane in place (real physical field)."""
        neg = self._neg
        plane = coeffs[..., 0]
        sym = plane[..., neg, :][..., :, neg]
        coeffs[..., 0] = 0.5 * (plane + np.conj(sym))
        return coeffs


@dataclass
class VectorFieldK:
    """Three-component velocity-like field in coefficient space."""

    grid: TorusGrid
    coeffs: np.ndarray  # (3, n, n, n//2+1) complex
    divergence_free: bool = False

    def __post_init__(self):
        if self.coeffs.shape != (3,) + self.grid.spectral_shape:
            raise ValueError(f"coefficient shape {self.coeffs.shape} does not "
                             f"match grid {self.grid.spectral_shape}")

    def copy(self):
        return VectorFieldK(self.grid, self.coeffs.copy(), self.divergence_free)

    @staticmethod
    def zeros(grid, divergence_free=True):
        return VectorFieldK(grid, np.zeros((3,) + grid.spectral_shape, complex),
                            divergence_free)


@dataclass
class ScalarFieldK:
    grid: TorusGrid
    coeffs: np.ndarray  # (n, n, n//2+1) complex

    def __post_init__(self):
        if self.coeffs.shape != self.grid.spectral_shape:
            raise ValueError("coefficient shape does not match grid")

    def copy(self):
        return ScalarFieldK(self.grid, self.coeffs.copy())


# -- transforms --------------------------------------------------------

def forward_transform(grid: TorusGrid, values) -> "VectorFieldK | ScalarFieldK":
    """Physical samples -> coefficients (unnormalized forward sum)."""
    values = np.asarray(values, dtype=float)
    if values.shape == (3,) + grid.physical_shape:
        c = _rfftn(values)
        c[:, ~grid.keep_mask] = 0.0
        return VectorFieldK(grid, c)
    if values.shape == grid.physical_shape:
        c = _rfftn(values)
        c[~grid.keep_mask] = 0.0
        return ScalarFieldK(grid, c)
    raise ValueError(f"sample shape {values.shape} does not match grid "
                     f"{grid.physical_shape}")


def inverse_transform(field):
    """Coefficients -> physical samples on the base grid (carries 1/n^3)."""
    g = field.grid
    return _irfftn(field.coeffs, g.physical_shape)


# -- norms and inner products ------------------------------------------

def _comp_coeffs(field):
    c = field.coeffs
    return c if c.ndim == 4 else c[None]


def l2_inner(a, b) -> float:
    """Real L^2 inner product of two (real) fields via coefficients."""
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")
    g = a.grid
    ca, cb = _comp_coeffs(a), _comp_coeffs(b)
    s = np.sum(g.mult * np.real(ca * np.conj(cb)))
    return float(g.norm_fac * s)


def l2_norm_sq(field) -> float:
    g = field.grid
    c = _comp_coeffs(field)
    return float(g.norm_fac * np.sum(g.mult * (c.real ** 2 + c.imag ** 2)))


def l2_norm(field) -> float:
    return float(np.sqrt(l2_norm_sq(field)))


def mean_mode_magnitude(field) -> float:
    c = _comp_coeffs(field)
    return float(np.max(np.abs(c[:, 0, 0, 0])))


def sobolev_norm(field, s: float, homogeneous: bool = False) -> float:
    """H^s (weight (1+|k|^2)^s) or homogeneous Hdot^s (weight |k|^(2s),
    k = 0 excluded) norm; normalized so s = 0 equals the L^2 norm."""
    g = field.grid
    c = _comp_coeffs(field)
    mag2 = c.real ** 2 + c.imag ** 2
    if not homogeneous:
        w = (1.0 + g.k2) ** s
        return float(np.sqrt(g.norm_fac * np.sum(g.mult * w * mag2)))
    if s < 0 and mean_mode_magnitude(field) > 1e-13 * (1.0 + np.sqrt(np.sum(mag2))):
        raise ValueError("homogeneous norm of negative order requires a "
                         "mean-free field")
    k2 = g.k2.copy()
    k2[0, 0, 0] = 1.0  # excluded below; avoids 0**negative
    w = k2 ** s
    w[0, 0, 0] = 0.0
    return float(np.sqrt(g.norm_fac * np.sum(g.mult * w * mag2)))


def hermitian_violation(field) -> float:
    """Max asymmetry of the kz=0 plane, relative to the field size."""
    g = field.grid
    c = _comp_coeffs(field)
    neg = g._neg
    plane = c[..., 0]
    sym = np.conj(plane[..., neg, :][..., :, neg])
    denom = 1.0 + np.max(np.abs(c))
    return float(np.max(np.abs(plane - sym)) / denom)


def divergence_max(u: VectorFieldK) -> float:
    g = u.grid
    c = u.coeffs
    d = g.kx * c[0] + g.ky * c[1] + g.kz * c[2]
    return float(np.max(np.abs(d)))


def coeff_norm(field) -> float:
    """Plain coefficient-space l2 norm (multiplicity-weighted)."""
    g = field.grid
    c = _comp_coeffs(field)
    return float(np.sqrt(np.sum(g.mult * (c.real ** 2 + c.imag ** 2))))


# -- projections and multipliers ---------------------------------------

def leray_project(u: VectorFieldK) -> VectorFieldK:
    """Per-mode orthogonal projection onto divergence-free fields;
    the k = 0 mode is zeroed (mean-free convention)."""
    g = u.grid
    c = u.coeffs
    k2 = g.k2.copy()
    k2[0, 0, 0] = 1.0
    kdotu = (g.kx * c[0] + g.ky * c[1] + g.kz * c[2]) / k2
    out = np.empty_like(c)
    out[0] = c[0] - g.kx * kdotu
    out[1] = c[1] - g.ky * kdotu
    out[2] = c[2] - g.kz * kdotu
    out[:, 0, 0, 0] = 0.0
    return VectorFieldK(g, out, divergence_free=True)


def friedrich_cutoff(u, radius: float):
    """Sharp Fourier truncation onto |k| < radius (open ball)."""
    if radius < 0:
        raise ValueError("cutoff radius must be >= 0")
    g = u.grid
    mask = g.kmag < radius
    c = u.coeffs * mask
    if isinstance(u, VectorFieldK):
        return VectorFieldK(g, c, u.divergence_free)
    return ScalarFieldK(g, c)


def gradient(p: ScalarFieldK) -> VectorFieldK:
    g = p.grid
    c = np.stack([1j * g.kx * p.coeffs, 1j * g.ky * p.coeffs, 1j * g.kz * p.coeffs])
    return VectorFieldK(g, c)


def divergence(u: VectorFieldK) -> ScalarFieldK:
    g = u.grid
    c = 1j * (g.kx * u.coeffs[0] + g.ky * u.coeffs[1] + g.kz * u.coeffs[2])
    return ScalarFieldK(g, c)


def laplacian(field):
    g = field.grid
    c = -g.k2 * field.coeffs
    if isinstance(field, VectorFieldK):
        return VectorFieldK(g, c, field.divergence_free)
    return ScalarFieldK(g, c)


# -- nonlinear assembly -------------------------------------------------

_PAIRS = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))
_PAIR_INDEX = {(i, j): a for a, (i, j) in enumerate(_PAIRS)}
for (i, j), a in list(_PAIR_INDEX.items()):
    _PAIR_INDEX[(j, i)] = a


def _require_divergence_free(u: VectorFieldK):
    if u.divergence_free:
        return
    if divergence_max(u) > 1e-10 * (1.0 + coeff_norm(u)):
        raise ValueError("nonlinear term requires a divergence-free field")


def _padded_velocity(u: VectorFieldK):
    return u.grid.to_padded_physical(u.coeffs)


def _convective_from_physical(grid: TorusGrid, u_phys) -> np.ndarray:
    """div(u (x) u) coefficients from padded physical velocity samples."""
    prods = np.empty((6,) + u_phys.shape[1:])
    for a, (i, j) in enumerate(_PAIRS):
        np.multiply(u_phys[i], u_phys[j], out=prods[a])
    phat = grid.from_padded_physical(prods)
    kvec = (grid.kx, grid.ky, grid.kz)
    out = np.empty((3,) + grid.spectral_shape, dtype=complex)
    for i in range(3):
        acc = kvec[0] * phat[_PAIR_INDEX[i, 0]]
        acc = acc + kvec[1] * phat[_PAIR_INDEX[i, 1]]
        acc = acc + kvec[2] * phat[_PAIR_INDEX[i, 2]]
        out[i] = 1j * acc
    return out


def _damping_from_physical(grid: TorusGrid, u_phys, law: DampingLaw):
    """f(|u|)u coefficients plus the collocation integral of f(|u|)|u|^2."""
    mag2 = u_phys[0] ** 2 + u_phys[1] ** 2 + u_phys[2] ** 2
    mag = np.sqrt(mag2)
    fmag = np.asarray(eval_law(law, mag))
    w = fmag[None] * u_phys
    what = grid.from_padded_physical(w)
    quad = grid.volume / grid.n_pad ** 3
    dissipation = float(quad * np.sum(fmag * mag2))
    return what, dissipation


def nonlinear_term(u: VectorFieldK) -> VectorFieldK:
    """div(u (x) u), formed alias-free on the padded grid (pad >= 1.5)."""
    _require_divergence_free(u)
    c = _convective_from_physical(u.grid, _padded_velocity(u))
    return VectorFieldK(u.grid, c)


def damping_term(u: VectorFieldK, law: DampingLaw):
    """Spectral coefficients of f(|u|)u and the collocation dissipation
    integral D(u) = integral of f(|u|) |u|^2 (always >= 0)."""
    what, dissipation = _damping_from_physical(u.grid, _padded_velocity(u), law)
    return VectorFieldK(u.grid, what), dissipation


def damping_dissipation(u: VectorFieldK, law: DampingLaw) -> float:
    """Collocation integral of f(|u|)|u|^2 only (no forward transforms)."""
    g = u.grid
    u_phys = _padded_velocity(u)
    mag2 = u_phys[0] ** 2 + u_phys[1] ** 2 + u_phys[2] ** 2
    mag = np.sqrt(mag2)
    fmag = np.asarray(eval_law(law, mag))
    return float(g.volume / g.n_pad ** 3 * np.sum(fmag * mag2))


def pressure_recover(u: VectorFieldK, law: DampingLaw):
    """Pressure from the velocity: pi = (-Lap)^{-1} div[div(u(x)u) + f(|u|)u],
    mean-zero gauge.  Returns (pi, ||pi||_{H^-2}) -- the norm of order -2
    (any order below -3/2 is finite on the torus)."""
    g = u.grid
    u_phys = _padded_velocity(u)
    conv = _convective_from_physical(g, u_phys)
    damp, _ = _damping_from_physical(g, u_phys, law)
    total = conv + damp
    k2 = g.k2.copy()
    k2[0, 0, 0] = 1.0
    pi = 1j * (g.kx * total[0] + g.ky * total[1] + g.kz * total[2]) / k2
    pi[0, 0, 0] = 0.0
    out = ScalarFieldK(g, pi)
    return out, sobolev_norm(out, -2.0)


def lp_product_probe(u: ScalarFieldK, v: ScalarFieldK, s1: float, s2: float):
    """Both sides of the product estimate ||uv||_{Hdot^{s1+s2-3/2}} <=
    C (||u||_{Hdot^{s1}} ||v||_{Hdot^{s2}} + ||u||_{Hdot^{s2}} ||v||_{Hdot^{s1}}).

    Returns (lhs, rhs_factor); the constant C is not specified, callers
    record the empirical ratio.  The product is formed alias-free on the
    padded grid; for negative product order its mean is removed (torus
    substitute for the decay of L^2 functions on the whole space).
    """
    if s1 + s2 <= 0:
        raise ValueError("need s1 + s2 > 0")
    if s1 >= 1.5:
        raise ValueError("need s1 < 3/2")
    if u.grid != v.grid:
        raise ValueError("fields live on different grids")
    g = u.grid
    s_prod = s1 + s2 - 1.5
    up = g.to_padded_physical(u.coeffs)
    vp = g.to_padded_physical(v.coeffs)
    prod = ScalarFieldK(g, g.from_padded_physical(up * vp))
    if s_prod < 0:
        prod.coeffs[0, 0, 0] = 0.0
    lhs = sobolev_norm(prod, s_prod, homogeneous=True)
    rhs = (sobolev_norm(u, s1, True) * sobolev_norm(v, s2, True)
           + sobolev_norm(u, s2, True) * sobolev_norm(v, s1, True))
    return lhs, rhs


# -- field constructors --------------------------------------------------

def random_field(grid: TorusGrid, seed, slope: float = 0.0,
                 divergence_free: bool = False, n_components: int = 3):
    """Seeded random coefficients with magnitude |k|^slope, random phases;
    real, mean-free, Nyquist-free.  Optionally Leray-projected."""
    rng = np.random.default_rng(seed)
    shape = (n_components,) + grid.spectral_shape
    c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    k = grid.kmag.copy()
    k[0, 0, 0] = 1.0
    c *= k ** slope
    c *= grid.keep_mask
    c[:, 0, 0, 0] = 0.0
    grid.hermitify(c)
    c[:, ~grid.keep_mask] = 0.0
    if n_components == 1:
        return ScalarFieldK(grid, c[0])
    out = VectorFieldK(grid, c)
    if divergence_free:
        out = leray_project(out)
    return out


def taylor_green(grid: TorusGrid, amplitude: float = 1.0) -> VectorFieldK:
    """Taylor-Green vortex at the fundamental wavenumber (divergence-free)."""
    x = grid.physical_points() * grid.scale
    X, Y, Z = np.meshgrid(x, x, x, indexing="ij")
    u = np.empty((3,) + grid.physical_shape)
    u[0] = amplitude * np.sin(X) * np.cos(Y) * np.cos(Z)
    u[1] = -amplitude * np.cos(X) * np.sin(Y) * np.cos(Z)
    u[2] = 0.0
    out = forward_transform(grid, u)
    out.divergence_free = True
    return out
