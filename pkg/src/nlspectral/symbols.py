"""Fourier symbols of the half-ball nonlocal operators on the integer lattice.

The nonlocal gradient with orientation n acts on the mode exp(i xi.x) as
multiplication by a complex d-vector lambda(xi) whose parts are

    Re lambda(xi) = 2 int_{half ball} w_delta(|s|) (s/|s|) (cos(xi.s) - 1) ds
    Im lambda(xi) = Lambda(|xi|) xi/|xi|

with the radial factor

    Lambda(k) = int_{full ball} w_delta(|s|) (s.e/|s|) sin(k s.e) ds

independent of both the orientation and the unit vector e.  Tables are
filled by tensor quadrature vectorized over the lattice: frequencies are
rotated into the orientation frame, integrated there, and the resulting
vectors rotated back.  Conjugate symmetry lambda(-xi) = conj(lambda(xi))
halves the work and holds exactly as computed.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import quadrature as quad
from .errors import KernelError, QuadratureConvergenceError
from .kernels import KernelSpec, from_config

UNIT_TOL = 1e-14
_CHUNK = 4_000_000  # max entries of a phase tensor chunk


@dataclass(frozen=True)
class Orientation:
    """Unit vector selecting the half-space of interaction."""

    vec: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vec, dtype=float)
        object.__setattr__(self, "vec", v)
        if abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
            raise ValueError(f"orientation must be unit length, |n| = {np.linalg.norm(v)!r}")

    @classmethod
    def from_angle(cls, alpha):
        return cls(np.array([math.cos(alpha), math.sin(alpha)]))

    @classmethod
    def from_vector(cls, v):
        v = np.asarray(v, dtype=float)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise ValueError("cannot orient along the zero vector")
        return cls(v / norm)

    @property
    def dimension(self):
        return len(self.vec)


@dataclass
class SymbolTable:
    """Cached symbols lambda(xi) over the lattice cube [-N, N]^d minus 0.

    ``lam`` has shape (2N+1,)*d + (d,) indexed by xi + N per axis.
    ``lambda_radial_map`` caches the radial factor keyed by the integer
    |xi|^2.  Local tables (``is_local``) carry lambda(xi) = i xi and are the
    delta -> 0 counterparts used by the error studies.
    """

    kernel: KernelSpec | None
    orientation: Orientation | None
    bound: int
    lam: np.ndarray
    lambda_radial_map: dict = field(default_factory=dict)
    tol: float = quad.DEFAULT_TOL
    is_local: bool = False

    @property
    def dimension(self):
        return self.lam.ndim - 1

    def lam_at(self, xi):
        idx = tuple(int(c) + self.bound for c in xi)
        return self.lam[idx]

    def lam_neg(self):
        """Symbol of the reflected orientation: lambda_{-n} = -conj(lambda_n)."""
        return -np.conj(self.lam)

    def abs2(self):
        return np.sum(np.abs(self.lam) ** 2, axis=-1)


def lattice_modes(bound, dimension):
    """All nonzero integer frequencies in the cube, shape (Q, d)."""
    axes = [np.arange(-bound, bound + 1)] * dimension
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dimension)
    return grid[np.any(grid != 0, axis=1)]


def _positive_half(modes):
    """Lexicographically positive representative of each (xi, -xi) pair."""
    mask = np.zeros(len(modes), dtype=bool)
    prior_zero = np.ones(len(modes), dtype=bool)
    for c in range(modes.shape[1]):
        mask |= prior_zero & (modes[:, c] > 0)
        prior_zero &= modes[:, c] == 0
    return modes[mask]


def _node_counts(kernel, kmax, n_radial=None, n_angular=None):
    d = kernel.dimension
    nr = n_radial if n_radial is not None else 24 + int(kmax)
    if d == 2:
        na = n_angular if n_angular is not None else 32 + int(2.0 * kmax)
    else:
        na = n_angular if n_angular is not None else (
            16 + int(1.2 * kmax),
            32 + 2 * int(kmax),
        )
    return nr, na


def _half_rule_arrays(kernel, nr, na):
    """Scaled radial nodes/weights and reference-frame angular data."""
    r, vr = quad.scaled_radial_rule(kernel, panels=1, n_nodes=nr)
    if kernel.dimension == 2:
        theta, va = quad.half_angles_2d(na)
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    else:
        nodes, va = quad.hemisphere_angles_3d(*na)
        dirs = quad.reference_directions(3, nodes)
    return r, vr, dirs, va


def _re_lambda(kernel, xi_rot, nr, na):
    """Real part of the symbol in the reference frame, vectorized over modes."""
    r, vr, dirs, va = _half_rule_arrays(kernel, nr, na)
    q_total, d = xi_rot.shape
    out = np.empty((q_total, d))
    proj = xi_rot @ dirs.T                      # (Q, J)
    wdir = va[:, None] * dirs                   # (J, d)
    chunk = max(1, _CHUNK // (len(r) * len(dirs)))
    for lo in range(0, q_total, chunk):
        hi = min(q_total, lo + chunk)
        phase = r[None, :, None] * proj[lo:hi, None, :]
        cosm1 = np.cos(phase)
        cosm1 -= 1.0
        out[lo:hi] = 2.0 * np.einsum("qij,i,jc->qc", cosm1, vr, wdir)
    return out


def _lambda_radial_many(kernel, ks, nr, na):
    """Radial symbol factor Lambda at the magnitudes ks, via the full ball.

    2D reduces to four quarter-disk integrals, 3D to the polar integral of
    the sphere with the azimuth integrated out.
    """
    r, vr = quad.scaled_radial_rule(kernel, panels=1, n_nodes=nr)
    if kernel.dimension == 2:
        theta, va = quad.quarter_angles_2d(na if isinstance(na, int) else na[0])
        c = np.cos(theta)
        front = 4.0
    else:
        phi, va = quad.sphere_polar_rule(na if isinstance(na, int) else na[0])
        c = np.cos(phi)
        front = 2.0 * math.pi
    ks = np.asarray(ks, dtype=float)
    phase = ks[:, None, None] * r[None, :, None] * c[None, None, :]
    return front * np.einsum("kij,i,j->k", np.sin(phase), vr, va * c)


def _m_full_ball(kernel, ks, nr, na):
    """Orientation-free mass factor m(k) = int w_delta (cos(xi.s) - 1) ds."""
    r, vr = quad.scaled_radial_rule(kernel, panels=1, n_nodes=nr)
    if kernel.dimension == 2:
        theta, va = quad.quarter_angles_2d(na if isinstance(na, int) else na[0])
        c = np.cos(theta)
        front = 4.0
    else:
        phi, va = quad.sphere_polar_rule(na if isinstance(na, int) else na[0])
        c = np.cos(phi)
        front = 2.0 * math.pi
    ks = np.asarray(ks, dtype=float)
    phase = ks[:, None, None] * r[None, :, None] * c[None, None, :]
    cosm1 = np.cos(phase) - 1.0
    return front * np.einsum("kij,i,j->k", cosm1, vr, va)


def _bump(nr, na):
    if isinstance(na, tuple):
        return int(nr * 1.5) + 1, (int(na[0] * 1.5) + 1, int(na[1] * 1.5) + 2)
    return int(nr * 1.5) + 1, int(na * 1.5) + 1


def build_table(kernel, orientation, bound, tol=quad.DEFAULT_TOL,
                n_radial=None, n_angular=None, max_bumps=3, oversample=1):
    """Build the symbol table for (kernel, orientation) up to |xi|_inf <= N.

    Every entry is verified by recomputation on a refined rule; construction
    raises QuadratureConvergenceError if refinement fails to settle within
    tol (relative, per table) and KernelError if any symbol magnitude
    degenerates to zero.  ``oversample`` multiplies the automatic node
    counts (the "quad.panels" config knob).
    """
    if bound < 1:
        raise ValueError("lattice bound must be at least 1")
    d = kernel.dimension
    n = np.asarray(orientation.vec if isinstance(orientation, Orientation) else orientation,
                   dtype=float)
    orientation = orientation if isinstance(orientation, Orientation) else Orientation(n)
    if len(n) != d:
        raise ValueError("orientation dimension does not match the kernel")

    half = _positive_half(lattice_modes(bound, d)).astype(float)
    kmax = kernel.horizon * math.sqrt(d) * bound
    nr, na = _node_counts(kernel, kmax, n_radial, n_angular)
    for _ in range(max(0, int(oversample) - 1)):
        nr, na = _bump(nr, na)

    R = quad.frame_matrix(n)
    xi_rot = half @ R                 # coordinates of xi in the frame basis
    q2 = np.rint(np.sum(half**2, axis=1)).astype(int)
    q2_unique = np.unique(q2)
    ks = np.sqrt(q2_unique.astype(float))

    re_prev = lam_prev = None
    for attempt in range(max_bumps + 1):
        re_frame = _re_lambda(kernel, xi_rot, nr, na)
        lam_rad = _lambda_radial_many(kernel, ks, nr, na)
        if re_prev is not None:
            scale = max(float(np.max(np.abs(re_frame))), float(np.max(np.abs(lam_rad))), 1e-300)
            err = max(
                float(np.max(np.abs(re_frame - re_prev))),
                float(np.max(np.abs(lam_rad - lam_prev))),
            )
            if err <= tol * scale:
                break
        re_prev, lam_prev = re_frame, lam_rad
        nr, na = _bump(nr, na)
    else:
        raise QuadratureConvergenceError(
            f"symbol quadrature did not settle within tol={tol} for N={bound}"
        )

    rad_map = {int(q): float(v) for q, v in zip(q2_unique, lam_rad)}
    re_abs = re_frame @ R.T
    norms = np.sqrt(q2.astype(float))
    im_abs = (np.array([rad_map[int(q)] for q in q2]) / norms)[:, None] * half

    lam = np.zeros((2 * bound + 1,) * d + (d,), dtype=complex)
    idx_pos = tuple((half + bound).astype(int).T)
    idx_neg = tuple((-half + bound).astype(int).T)
    val = re_abs + 1j * im_abs
    lam[idx_pos] = val
    lam[idx_neg] = np.conj(val)

    table = SymbolTable(kernel, orientation, bound, lam, rad_map, tol)
    _validate(table)
    return table


def _validate(table):
    modes = lattice_modes(table.bound, table.dimension)
    idx = tuple((modes + table.bound).T)
    mags = np.sqrt(table.abs2()[idx])
    if np.any(mags == 0.0):
        raise KernelError("degenerate kernel: a symbol magnitude vanished")
    d = table.dimension
    ratio = mags / np.linalg.norm(modes, axis=1)
    bound = math.sqrt(2.0) * d * (1.0 + 1e-9)
    if float(np.max(ratio)) > bound:
        raise KernelError(
            f"symbol bound violated: max |lambda|/|xi| = {float(np.max(ratio))!r}"
        )


def local_table(dimension, bound):
    """The delta -> 0 counterpart: lambda(xi) = i xi through the same layout."""
    modes = lattice_modes(bound, dimension)
    lam = np.zeros((2 * bound + 1,) * dimension + (dimension,), dtype=complex)
    idx = tuple((modes + bound).T)
    lam[idx] = 1j * modes
    rad = {int(q): math.sqrt(q) for q in np.unique(np.sum(modes**2, axis=1))}
    return SymbolTable(None, None, bound, lam, rad, 0.0, is_local=True)


def lambda_radial(kernel, k, tol=quad.DEFAULT_TOL, n_radial=None, n_angular=None):
    """Radial symbol factor Lambda_delta(k) for a single magnitude k >= 0."""
    if k == 0.0:
        return 0.0
    nr, na = _node_counts(kernel, kernel.horizon * k, n_radial, n_angular)
    prev = None
    for _ in range(4):
        val = float(_lambda_radial_many(kernel, [k], nr, na)[0])
        if prev is not None and abs(val - prev) <= tol * max(abs(val), 1e-300):
            return val
        prev = val
        nr, na = _bump(nr, na)
    raise QuadratureConvergenceError(f"Lambda quadrature did not converge at k={k}")


def mass_factor(kernel, k, tol=quad.DEFAULT_TOL):
    """Full-ball factor m_delta(k) <= 0 multiplying the drift direction."""
    if k == 0.0:
        return 0.0
    nr, na = _node_counts(kernel, kernel.horizon * k)
    prev = None
    for _ in range(4):
        val = float(_m_full_ball(kernel, [k], nr, na)[0])
        if prev is not None and abs(val - prev) <= tol * max(abs(val), 1e-300):
            return val
        prev = val
        nr, na = _bump(nr, na)
    raise QuadratureConvergenceError(f"mass-factor quadrature did not converge at k={k}")


def star_symbol(kernel, kvec, xi, tol=quad.DEFAULT_TOL):
    """Symbol of the drift-stabilized radial gradient.

    mu(xi) = i Lambda(|xi|) xi/|xi| + m(|xi|) kvec: the first term is the
    radially symmetric (full ball, orientation-free) gradient, the second the
    orientation-dependent stabilization along the constant vector kvec.
    """
    xi = np.asarray(xi, dtype=float)
    k = float(np.linalg.norm(xi))
    if k == 0.0:
        raise ValueError("star symbol undefined at xi = 0")
    kvec = np.asarray(kvec, dtype=float)
    mu = 1j * lambda_radial(kernel, k, tol) * xi / k
    if np.any(kvec != 0.0):
        mu = mu + mass_factor(kernel, k, tol) * kvec
    return mu


def star_table(kernel, kvec, bound, tol=quad.DEFAULT_TOL):
    """Dense lattice table of the star symbol, for operator application."""
    d = kernel.dimension
    modes = lattice_modes(bound, d)
    q2 = np.sum(modes**2, axis=1)
    q2_unique = np.unique(q2)
    ks = np.sqrt(q2_unique.astype(float))
    kmax = kernel.horizon * float(np.max(ks))
    nr, na = _node_counts(kernel, kmax)
    nr2, na2 = _bump(nr, na)
    lam_rad = _lambda_radial_many(kernel, ks, nr2, na2)
    mvals = _m_full_ball(kernel, ks, nr2, na2)
    err = max(
        float(np.max(np.abs(lam_rad - _lambda_radial_many(kernel, ks, nr, na)))),
        float(np.max(np.abs(mvals - _m_full_ball(kernel, ks, nr, na)))),
    )
    if err > tol * max(float(np.max(np.abs(lam_rad))), 1e-300):
        raise QuadratureConvergenceError("star-symbol quadrature did not settle")
    lookup = {int(q): (lr, mv) for q, lr, mv in zip(q2_unique, lam_rad, mvals)}
    kvec = np.asarray(kvec, dtype=float)
    table = np.zeros((2 * bound + 1,) * d + (d,), dtype=complex)
    for mode, q in zip(modes, q2):
        lr, mv = lookup[int(q)]
        idx = tuple(mode + bound)
        table[idx] = 1j * lr * mode / math.sqrt(q) + mv * kvec
    return table


def averaged_energy_density(kernel, xi, samples=64, tol=quad.DEFAULT_TOL):
    """Orientation average of |lambda(xi)|^2 over the circle of orientations.

    Equals Lambda(|xi|)^2 plus the angular mean of |Re lambda|^2; the uniform
    trapezoid over `samples` orientations is spectrally accurate since the
    integrand is smooth and periodic in the orientation angle.
    """
    if kernel.dimension != 2:
        raise KernelError("orientation averaging is defined on the circle (d = 2)")
    if samples < 8:
        raise ValueError("need at least 8 orientation samples")
    xi = np.asarray(xi, dtype=float)
    k = float(np.linalg.norm(xi))
    if k == 0.0:
        raise ValueError("undefined at xi = 0")
    kmax = kernel.horizon * k
    nr, na = _node_counts(kernel, kmax)
    nr, na = _bump(nr, na)
    lam_rad = float(_lambda_radial_many(kernel, [k], nr, na)[0])
    angles = 2.0 * math.pi * np.arange(samples) / samples
    # rotate xi into each orientation frame instead of rotating the rule
    cos_a, sin_a = np.cos(angles), np.sin(angles)
    xi_rot = np.stack(
        [cos_a * xi[0] + sin_a * xi[1], -sin_a * xi[0] + cos_a * xi[1]], axis=1
    )
    re = _re_lambda(kernel, xi_rot, nr, na)
    return lam_rad**2 + float(np.mean(np.sum(re**2, axis=1)))


def verify_bounds(table):
    """Lattice extremes of the symbol magnitude, for coercivity reports."""
    modes = lattice_modes(table.bound, table.dimension)
    idx = tuple((modes + table.bound).T)
    mags = np.sqrt(table.abs2()[idx])
    ratio = mags / np.linalg.norm(modes, axis=1)
    return {
        "min_abs": float(np.min(mags)),
        "max_abs": float(np.max(mags)),
        "max_ratio": float(np.max(ratio)),
        "argmin": tuple(int(c) for c in modes[int(np.argmin(mags))]),
    }


# ---------------------------------------------------------------------------
# portable text cache
# ---------------------------------------------------------------------------

def save_table(table, path):
    """Write the table as decimal text, one lattice mode per line."""
    if table.is_local:
        raise ValueError("local tables are analytic; nothing to cache")
    k = table.kernel
    if k.family == "tabulated":
        raise ValueError("tabulated kernels are not supported by the text cache")
    hdr = (
        f"# nlspectral-symbols d={k.dimension} N={table.bound} family={k.family} "
        f"beta={'' if k.beta is None else repr(k.beta)} delta={k.horizon!r} "
        f"n={','.join(repr(float(c)) for c in table.orientation.vec)} tol={table.tol!r}"
    )
    lines = [hdr]
    modes = lattice_modes(table.bound, table.dimension)
    for mode in modes:
        lam = table.lam_at(mode)
        nums = []
        for comp in lam:
            nums.append(f"{comp.real:.17g}")
            nums.append(f"{comp.imag:.17g}")
        lines.append(" ".join([*(str(int(c)) for c in mode), *nums]))
    for q, v in sorted(table.lambda_radial_map.items()):
        lines.append(f"L {q} {v:.17g}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_table(path):
    with open(path) as fh:
        text = fh.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    hdr = lines[0]
    if not hdr.startswith("# nlspectral-symbols"):
        raise ValueError(f"not a symbol cache: {path}")
    fields = dict(tok.split("=", 1) for tok in hdr.split()[2:])
    d = int(fields["d"])
    bound = int(fields["N"])
    cfg = {"family": fields["family"], "dimension": d, "delta": float(fields["delta"])}
    if fields.get("beta"):
        cfg["beta"] = float(fields["beta"])
    kernel = from_config(cfg)
    orientation = Orientation(np.array([float(c) for c in fields["n"].split(",")]))
    lam = np.zeros((2 * bound + 1,) * d + (d,), dtype=complex)
    rad = {}
    for ln in lines[1:]:
        toks = ln.split()
        if toks[0] == "L":
            rad[int(toks[1])] = float(toks[2])
            continue
        mode = tuple(int(t) + bound for t in toks[:d])
        vals = [float(t) for t in toks[d:]]
        lam[mode] = [complex(vals[2 * i], vals[2 * i + 1]) for i in range(d)]
    return SymbolTable(kernel, orientation, bound, lam, rad, float(fields["tol"]))
