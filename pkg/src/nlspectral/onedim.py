"""One-sided 1D operators and the bond-kernel form of their Dirichlet energy.

The one-sided gradients are

    G^{+-} u(x) = +-2 int_0^delta w_delta(s) (u(x +- s) - u(x)) ds

with Fourier symbols lambda^{+-}(xi) = +-2 int_0^delta w_delta(s)
(exp(+-i xi s) - 1) ds.  For integrable kernels the one-sided Dirichlet
energy coincides with a two-point (bond) energy whose even kernel is

    rho(a) = 2 a^2 int_0^delta w_delta(b) (w_delta(a) - w_delta(a+b)) db,

supported on (-delta, delta) with unit L1 mass; it is nonnegative when the
profile is non-increasing and may change sign otherwise.  Non-integrable
profiles are handled by clamping the kernel near the origin and letting the
clamp radius shrink: the clamped bond kernels increase monotonically and
their mass tends to one.
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import quadrature as quad
from .errors import KernelError
from .kernels import epsilon_cutoff, eval_kernel

_GL_X, _GL_W = leggauss(32)

# The clamp defect of the bond-kernel mass is the squared first moment of
# the clamped kernel, 1 - beta eps^(2-beta) + O(eps^2), so the ladder must
# descend to ~5e-7 for the mass to land within 1e-6 of one at beta = 1.
DEFAULT_EPS_SEQUENCE = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 5e-7)
MESH_SIZE = 2048


def graded_mesh(delta, size=MESH_SIZE):
    """Interior mesh of (0, delta) clustered at both endpoints."""
    t = (np.arange(size) + 0.5) / size
    return delta * (t**2 * (3.0 - 2.0 * t))


def _gl_panels(edges, n=32):
    """Composite Gauss-Legendre nodes/weights for the given panel edges."""
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        nodes.append(mid + half * _GL_X)
        weights.append(half * _GL_W)
    return np.concatenate(nodes), np.concatenate(weights)


def _geometric_edges(a, b, ratio=2.0):
    """Panel edges from a to b growing geometrically away from a."""
    if a <= 0.0:
        return [a, b]
    edges = [a]
    while edges[-1] * ratio < b:
        edges.append(edges[-1] * ratio)
    edges.append(b)
    return edges


@dataclass
class RhoKernel:
    """Even bond kernel tabulated on a graded mesh of (0, delta).

    ``k_part``/``h_part`` store the two pieces of the defining split (the
    diagonal product term and the shifted cross term) whose sum is rho; they
    are kept for internal-consistency tests.  ``value`` re-evaluates rho by
    quadrature at arbitrary points; ``nodes``/``weights`` give a one-sided
    quadrature rule for integrals of rho(a)/a^2 against smooth functions,
    which is exactly the bond-kernel measure of the induced diffusion.
    """

    delta: float
    mesh: np.ndarray
    values: np.ndarray
    k_part: np.ndarray
    h_part: np.ndarray
    l1_mass: float
    nodes: np.ndarray
    weights: np.ndarray
    epsilon: float = 0.0

    def value(self, a):
        return np.interp(np.abs(a), self.mesh, self.values)

    def to_csv(self, path):
        with open(path, "w", newline="\n") as fh:
            fh.write("a,rho\n")
            for a, v in zip(self.mesh, self.values):
                fh.write(f"{a:.17g},{v:.17g}\n")


def _cross_edges(kernel, a, top):
    """Panel edges resolving both factors of w(b) w(a+b) on (0, top).

    Clamped singular profiles vary over decades above the clamp radius, so
    the edges grow geometrically away from the clamp (in both the b and the
    a+b coordinate); smooth profiles only need their breakpoints.
    """
    delta = kernel.horizon
    breaks = [delta * r for r in kernel.breakpoints()]
    pts = {0.0, top}
    for e in breaks:
        if 0.0 < e < top:
            pts.add(e)
        if 0.0 < e - a < top:
            pts.add(e - a)
    if kernel.family == "fractional" and kernel.cutoff_rho > 0.0:
        eps = kernel.cutoff_rho * delta
        for anchor in (eps, eps - a):
            if anchor <= 0.0:
                anchor = min(eps, top) * 0.5
            for g in _geometric_edges(anchor, top):
                if 0.0 < g < top:
                    pts.add(g)
    return sorted(pts)


def _rho_pointwise(kernel, a_values):
    """rho(a), k-part and h-part at the given abscissae, by panel quadrature."""
    delta = kernel.horizon
    wmass = quad.integrate_interval(kernel, 0.0, delta, lambda s: np.ones_like(s),
                                    tol=1e-12)
    w_at = eval_kernel(kernel, a_values)
    rho = np.empty_like(a_values)
    kp = np.empty_like(a_values)
    hp = np.empty_like(a_values)
    for i, a in enumerate(a_values):
        top = delta - a
        kp[i] = 2.0 * a * a * w_at[i] * wmass
        if top <= 0.0:
            hp[i] = 0.0
            rho[i] = kp[i]
            continue
        b, wb = _gl_panels(_cross_edges(kernel, a, top))
        cross = float(np.sum(wb * eval_kernel(kernel, b) * eval_kernel(kernel, a + b)))
        hp[i] = -2.0 * a * a * cross
        rho[i] = kp[i] + hp[i]
    return rho, kp, hp


def _endpoint_graded_edges(delta, extra=(), start=1e-7):
    """Panel edges of (0, delta) clustered geometrically at both endpoints."""
    left = _geometric_edges(delta * start, delta * 0.5)
    right = [delta - e for e in _geometric_edges(delta * start, delta * 0.5)]
    return sorted({0.0, delta} | set(left) | set(right)
                  | {e for e in extra if 0.0 < e < delta})


def _bond_rule(kernel, rho_fn, delta, extra=()):
    """One-sided quadrature rule (nodes, weights) for int_0^delta rho(a)/a^2 g(a) da."""
    a, wa = _gl_panels(_endpoint_graded_edges(delta, extra))
    return a, wa * rho_fn(a) / (a * a)


def rho_from_kernel(kernel, mesh_size=MESH_SIZE):
    """Bond kernel of an integrable 1D kernel, by direct quadrature.

    Rejects non-integrable kernels (fractional with beta >= 1); those go
    through rho_regularized.
    """
    if kernel.dimension != 1:
        raise KernelError("rho is a one-dimensional construction")
    if not kernel.is_integrable:
        raise KernelError(
            "kernel is not integrable; use rho_regularized for the clamped limit"
        )
    delta = kernel.horizon
    mesh = graded_mesh(delta, mesh_size)
    rho, kp, hp = _rho_pointwise(kernel, mesh)

    def rho_fn(a):
        r, _, _ = _rho_pointwise(kernel, np.atleast_1d(np.abs(a)))
        return r

    mass = _rho_mass(rho_fn, delta)
    nodes, weights = _bond_rule(kernel, rho_fn, delta)
    return RhoKernel(delta, mesh, rho, kp, hp, mass, nodes, weights)


def _rho_mass(rho_fn, delta, eps_break=None):
    """Two-sided L1 mass 2 int_0^delta rho(a) da with endpoint-graded panels."""
    extra = (eps_break,) if eps_break else ()
    a, wa = _gl_panels(_endpoint_graded_edges(delta, extra))
    return 2.0 * float(np.sum(wa * rho_fn(a)))


def rho_regularized(kernel, eps_sequence=DEFAULT_EPS_SEQUENCE, mesh_size=MESH_SIZE):
    """Clamped bond kernels for a non-increasing 1D kernel, plus their limit.

    Returns (levels, limit): one RhoKernel per clamp radius eps (decreasing)
    and the finest level standing in for the eps -> 0 limit.  Monotone
    increase in shrinking eps is verified on the mesh.
    """
    if kernel.dimension != 1:
        raise KernelError("rho is a one-dimensional construction")
    if not kernel.is_nonincreasing:
        raise KernelError("regularized rho needs a non-increasing kernel profile")
    eps_sequence = sorted(eps_sequence, reverse=True)
    if eps_sequence[0] >= kernel.horizon:
        raise KernelError("clamp radii must be below the horizon")
    delta = kernel.horizon
    mesh = graded_mesh(delta, mesh_size)
    levels = []
    prev = None
    for eps in eps_sequence:
        clamped = epsilon_cutoff(kernel, eps)
        rho, kp, hp = _rho_pointwise(clamped, mesh)
        if prev is not None and np.any(rho < prev - 1e-9 * np.max(np.abs(rho))):
            raise KernelError("clamped bond kernels failed to increase monotonically")
        prev = rho

        def rho_fn(a, _c=clamped):
            r, _, _ = _rho_pointwise(_c, np.atleast_1d(np.abs(a)))
            return r

        mass = _rho_mass(rho_fn, delta, eps_break=eps)
        nodes, weights = _bond_rule(clamped, rho_fn, delta, extra=(eps,))
        levels.append(RhoKernel(delta, mesh, rho, kp, hp, mass, nodes, weights,
                                epsilon=eps))
    return levels, levels[-1]


# ---------------------------------------------------------------------------
# one-sided symbols and energies
# ---------------------------------------------------------------------------

def one_sided_symbol(kernel, xi, sign=1, tol=1e-12):
    """Fourier symbol of G^{+-} at the frequencies xi (vectorized).

    lambda^+ = 2 int_0^delta w_delta(s)(exp(i xi s) - 1) ds and
    lambda^- = -conj(lambda^+): the real part flips with the side, the
    imaginary part does not.
    """
    if kernel.dimension != 1:
        raise KernelError("one-sided operators are one-dimensional")
    xi = np.asarray(xi, dtype=float)

    def level(panels, n_nodes):
        s, w = quad._interval_rule(kernel, 0.0, kernel.horizon, panels, n_nodes)
        ph = np.multiply.outer(xi, s)
        re = 2.0 * np.sum(w * (np.cos(ph) - 1.0), axis=-1)
        im = 2.0 * np.sum(w * np.sin(ph), axis=-1)
        return np.sign(sign) * re + 1j * im

    lam = level(2, 48)
    check = level(3, 64)
    scale = max(float(np.max(np.abs(lam))), 1e-300)
    if float(np.max(np.abs(lam - check))) > tol * scale:
        raise quad.QuadratureConvergenceError("one-sided symbol quadrature did not settle")
    return check


def one_sided_energy(kernel, u, sign=1):
    """Dirichlet energy sum |lambda^{+-}(xi)|^2 |uhat(xi)|^2 of a 1D field."""
    xi = np.arange(-u.bound, u.bound + 1, dtype=float)
    lam = one_sided_symbol(kernel, xi, sign)
    mag2 = np.abs(lam) ** 2
    w = mag2.reshape(mag2.shape + (1,) * len(u.component_shape))
    return float(np.sum(w * np.abs(u.coeffs) ** 2))


def bond_energy(rho, u, grid=512):
    """Bond-form energy 2 int_0^delta rho(a) int |(u(x+a)-u(x))/a|^2 dx/(2pi) da.

    The x-integral is a uniform trapezoid over the period (exact for
    band-limited integrands); u is sampled by direct mode summation.  The
    result is comparable with one_sided_energy, both in coefficient
    normalization.  No Fourier symbol enters this path.
    """
    from .fields import evaluate_at

    if grid < 4 * u.bound + 2:
        grid = 4 * u.bound + 2
    x = -np.pi + 2.0 * np.pi * np.arange(grid) / grid
    a, wa = rho.nodes, rho.weights
    ux = evaluate_at(u, x[:, None])
    uxa = evaluate_at(u, (x[:, None] + a[None, :])[..., None])
    diff2 = np.abs(uxa - ux[:, None]) ** 2
    x_mean = np.mean(diff2, axis=0)
    return 2.0 * float(np.sum(wa * x_mean))


def energy_equivalence_check(kernel, u, rho=None):
    """Compare the spectral one-sided energy with the bond-form energy.

    Returns a dict with both values and their relative gap.
    """
    if rho is None:
        rho = rho_from_kernel(kernel)
    e_plus = one_sided_energy(kernel, u, sign=1)
    e_rho = bond_energy(rho, u)
    gap = abs(e_plus - e_rho) / max(e_plus, e_rho, 1e-300)
    return {"e_plus": e_plus, "e_rho": e_rho, "gap": gap}


def sine_rho_closed_form(a):
    """Closed-form bond kernel of the sine-profile kernel at horizon 1."""
    a = np.asarray(a, dtype=float)
    abs_a = np.abs(a)
    return (
        np.pi * a**2 * np.sin(np.pi * abs_a)
        + (np.pi**2 * a**2 / 4.0)
        * ((abs_a - 1.0) * np.cos(np.pi * a) - np.sin(np.pi * abs_a) / np.pi)
    )
