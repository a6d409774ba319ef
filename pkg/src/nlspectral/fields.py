"""Periodic fields on (-pi, pi)^d stored as truncated Fourier coefficients.

The expansion convention is u(x) = sum_xi uhat(xi) exp(i xi.x) over the
integer lattice; every field is zero-mean (the xi = 0 coefficient is pinned
to zero) and real-valued fields satisfy uhat(-xi) = conj(uhat(xi)).

Coefficients live in a dense cube of shape (2N+1,)*d followed by the
component shape: () for scalars, (d,) for vectors, (d, d) for gradient-type
matrix fields.
"""

from dataclasses import dataclass

import numpy as np

_MASK = (1 << 64) - 1


@dataclass
class SpectralField:
    bound: int
    dimension: int
    coeffs: np.ndarray
    real: bool = True

    def __post_init__(self):
        d, n = self.dimension, 2 * self.bound + 1
        if self.coeffs.shape[:d] != (n,) * d:
            raise ValueError(
                f"coefficient cube {self.coeffs.shape[:d]} does not match N={self.bound}"
            )
        self._zero_mean()

    # -- basic structure ----------------------------------------------------

    @property
    def component_shape(self):
        return self.coeffs.shape[self.dimension:]

    def _zero_mean(self):
        self.coeffs[(self.bound,) * self.dimension] = 0.0

    def copy(self):
        return SpectralField(self.bound, self.dimension, self.coeffs.copy(), self.real)

    def at(self, xi):
        return self.coeffs[tuple(int(c) + self.bound for c in xi)]

    def set_mode(self, xi, value, hermitian=None):
        """Assign one coefficient; mirrors the conjugate when keeping realness."""
        if all(c == 0 for c in xi):
            raise ValueError("the zero mode is pinned to zero")
        self.coeffs[tuple(int(c) + self.bound for c in xi)] = value
        if hermitian if hermitian is not None else self.real:
            self.coeffs[tuple(-int(c) + self.bound for c in xi)] = np.conj(value)
        return self

    @classmethod
    def zeros(cls, dimension, bound, component_shape=(), real=True):
        shape = (2 * bound + 1,) * dimension + tuple(component_shape)
        return cls(bound, dimension, np.zeros(shape, dtype=complex), real)

    # -- arithmetic ----------------------------------------------------------

    def _like(self, coeffs, real=None):
        return SpectralField(self.bound, self.dimension, coeffs,
                             self.real if real is None else real)

    def __add__(self, other):
        return self._like(self.coeffs + other.coeffs, self.real and other.real)

    def __sub__(self, other):
        return self._like(self.coeffs - other.coeffs, self.real and other.real)

    def __mul__(self, scalar):
        out = self._like(self.coeffs * scalar, self.real and np.isrealobj(scalar))
        out._zero_mean()
        return out

    __rmul__ = __mul__

    def multiply_modes(self, multiplier):
        """Per-mode multiplication; multiplier broadcasts over components."""
        out = self.coeffs * multiplier
        return SpectralField(self.bound, self.dimension, out, real=False)


def lattice_grid(bound, dimension):
    """Integer frequency arrays, one (2N+1,)*d cube per axis."""
    axes = [np.arange(-bound, bound + 1)] * dimension
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=0)


def l2_norm(field):
    """Coefficient-space L2 norm (sum |uhat|^2)^(1/2); grid L2 is (2 pi)^(d/2) times this."""
    return float(np.sqrt(np.sum(np.abs(field.coeffs) ** 2)))


def inner(f, g):
    """Coefficient-space inner product sum f.conj(g); real for real fields."""
    val = complex(np.sum(f.coeffs * np.conj(g.coeffs)))
    return val.real if f.real and g.real else val


def s_norm(field, table):
    """Energy norm (sum |lambda(xi)|^2 |uhat(xi)|^2)^(1/2)."""
    if table is None:
        raise ValueError("energy norms need a symbol table")
    weight = table.abs2()
    extra = field.coeffs.ndim - weight.ndim
    w = weight.reshape(weight.shape + (1,) * extra)
    return float(np.sqrt(np.sum(w * np.abs(field.coeffs) ** 2)))


def h1_seminorm(field):
    """(sum |xi|^2 |uhat|^2)^(1/2), the local counterpart of the energy norm."""
    k2 = np.sum(lattice_grid(field.bound, field.dimension) ** 2, axis=0)
    extra = field.coeffs.ndim - k2.ndim
    w = k2.reshape(k2.shape + (1,) * extra)
    return float(np.sqrt(np.sum(w * np.abs(field.coeffs) ** 2)))


def norms(field, table=None, lame=None):
    """L2, energy and (optionally) elasticity V-norm of a field.

    The V entry needs both a symbol table and Lame constants (mu, lambda);
    it uses the symbol quadratic form 2 E(u) of the elastic energy.
    """
    out = {"l2": l2_norm(field)}
    if table is not None:
        out["s"] = s_norm(field, table)
        if lame is not None:
            from .solvers import navier_decompose, navier_quadratic_form

            dec = navier_decompose(table, *lame)
            out["v"] = float(np.sqrt(out["l2"] ** 2 + navier_quadratic_form(dec, field)))
    return out


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------

def grid_points(size, dimension):
    """Uniform sample grid x_j = -pi + 2 pi j / size per axis."""
    x = -np.pi + 2.0 * np.pi * np.arange(size) / size
    return np.stack(np.meshgrid(*([x] * dimension), indexing="ij"), axis=0)


def forward_transform(samples, bound, dimension=None):
    """Project grid samples onto the truncated lattice; returns (field, mean).

    The sample cube may carry trailing component axes.  The grid must have at
    least 2N+1 points per axis.  The removed mean is reported instead of kept.
    """
    samples = np.asarray(samples)
    if dimension is None:
        dimension = samples.ndim
    d = dimension
    size = samples.shape[0]
    if any(s != size for s in samples.shape[:d]):
        raise ValueError("sample grid must be cubic")
    if size < 2 * bound + 1:
        raise ValueError(f"grid size {size} too small for truncation N={bound}")
    axes = tuple(range(d))
    hat = np.fft.fftshift(np.fft.fftn(samples, axes=axes), axes=axes) / size**d
    center = size // 2
    cube = hat[tuple(slice(center - bound, center + bound + 1) for _ in range(d))]
    # grid starts at -pi, so bin xi carries a (-1)^(sum xi) phase
    modes = lattice_grid(bound, d)
    phase = (-1.0) ** np.sum(modes, axis=0)
    cube = cube * phase.reshape(phase.shape + (1,) * (samples.ndim - d))
    mean = cube[(bound,) * d].copy()
    real = bool(np.isrealobj(samples))
    field = SpectralField(bound, d, np.ascontiguousarray(cube), real)
    return field, mean


def evaluate(field, size):
    """Sample the field on a uniform size^d grid via zero-padded inverse FFT."""
    d = field.dimension
    n = 2 * field.bound + 1
    if size < n:
        raise ValueError("evaluation grid must resolve the truncation")
    comp = field.component_shape
    full = np.zeros((size,) * d + comp, dtype=complex)
    modes = lattice_grid(field.bound, d)
    phase = (-1.0) ** np.sum(modes, axis=0)
    cube = field.coeffs * phase.reshape(phase.shape + (1,) * len(comp))
    slices = tuple(np.arange(-field.bound, field.bound + 1) % size for _ in range(d))
    full[np.ix_(*slices, *[np.arange(s) for s in comp])] = cube
    vals = np.fft.ifftn(full, axes=tuple(range(d))) * size**d
    return vals.real if field.real else vals


def evaluate_at(field, points):
    """Direct mode summation at arbitrary points, shape (..., d) -> (..., comp)."""
    pts = np.asarray(points, dtype=float)
    modes = lattice_grid(field.bound, field.dimension).reshape(field.dimension, -1)
    flat = field.coeffs.reshape((modes.shape[1],) + field.component_shape)
    phase = np.exp(1j * np.tensordot(pts, modes, axes=(-1, 0)))
    vals = np.tensordot(phase, flat, axes=(-1, 0))
    return vals.real if field.real else vals


def to_csv(field, path):
    """Snapshot the coefficients: one row per lattice mode, Re/Im per component."""
    d = field.dimension
    modes = lattice_grid(field.bound, d).reshape(d, -1).T
    flat = field.coeffs.reshape(len(modes), -1)
    with open(path, "w", newline="\n") as fh:
        heads = [f"xi{i + 1}" for i in range(d)]
        for c in range(flat.shape[1]):
            heads += [f"re{c + 1}", f"im{c + 1}"]
        fh.write(",".join(heads) + "\n")
        for mode, row in zip(modes, flat):
            cells = [str(int(m)) for m in mode]
            for z in row:
                cells += [f"{z.real:.17g}", f"{z.imag:.17g}"]
            fh.write(",".join(cells) + "\n")


# ---------------------------------------------------------------------------
# reproducible random fields
# ---------------------------------------------------------------------------

def _splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, (z ^ (z >> 31))


def _uniforms(seed, count):
    """Deterministic uniforms in [0, 1) from a 64-bit splitmix generator."""
    out = np.empty(count)
    state = seed & _MASK
    for i in range(count):
        state, z = _splitmix64(state)
        out[i] = (z >> 11) * (1.0 / (1 << 53))
    return out


def random_field(seed, bound, decay, dimension=2, components=0):
    """Reproducible real band-limited field with |uhat| ~ (1+|xi|^2)^(-decay/2).

    The phase stream comes from a fixed 64-bit generator walked over the
    lattice in C order, so coefficients are identical across platforms and
    numpy versions.  components=0 gives a scalar field, d a vector field.
    """
    if decay < 0:
        raise ValueError("spectral decay must be nonnegative")
    d = dimension
    cshape = () if components == 0 else (components,)
    n = 2 * bound + 1
    ncomp = 1 if components == 0 else components
    phases = _uniforms(seed, n**d * ncomp).reshape((n,) * d + cshape)
    grid = lattice_grid(bound, d)
    k2 = np.sum(grid**2, axis=0)
    amp = (1.0 + k2) ** (-decay / 2.0)
    # fill the lexicographically positive half, then mirror conjugates; this
    # keeps |uhat| exactly proportional to the decay profile
    pos = np.zeros(k2.shape, dtype=bool)
    prior_zero = np.ones(k2.shape, dtype=bool)
    for c in range(d):
        pos |= prior_zero & (grid[c] > 0)
        prior_zero &= grid[c] == 0
    half = np.where(
        pos.reshape(pos.shape + (1,) * len(cshape)),
        amp.reshape(k2.shape + (1,) * len(cshape)) * np.exp(2j * np.pi * phases),
        0.0,
    )
    rev = tuple(slice(None, None, -1) for _ in range(d))
    coeffs = half + np.conj(half[rev])
    return SpectralField(bound, d, coeffs, real=True)
