"""Per-mode application of the nonlocal operators to spectral fields.

Everything on the fast path is multiplication by cached symbols: gradient by
lambda (outer product for vector fields), adjoint divergence by the reflected
symbol -conj(lambda), diffusion by -|lambda|^2, curl by the complex cross
product lambda x (componentwise, no conjugation: forced by linearity of the
defining integral over exp(i xi.x)).  The physical-space integral form lives
only in the quadrature oracle at the bottom, which never touches symbols.
"""

import numpy as np

from . import quadrature as quad
from .fields import SpectralField
from .errors import KernelError


def _check(table, field, components=None):
    if field.bound != table.bound or field.dimension != table.dimension:
        raise ValueError("field truncation/dimension does not match the table")
    if components is not None and field.component_shape != components:
        raise ValueError(
            f"expected component shape {components}, got {field.component_shape}"
        )


def gradient(table, u):
    """Nonlocal gradient: scalar -> vector, vector -> (derivative, component) matrix."""
    _check(table, u)
    lam = table.lam
    if u.component_shape == ():
        out = lam * u.coeffs[..., None]
    elif u.component_shape == (table.dimension,):
        out = lam[..., :, None] * u.coeffs[..., None, :]
    else:
        raise ValueError("gradient expects a scalar or d-vector field")
    # conjugate symmetry of the table keeps real fields real
    return SpectralField(u.bound, u.dimension, out, real=u.real)


def divergence(table, u):
    """Adjoint nonlocal divergence of a vector field: -conj(lambda).uhat."""
    _check(table, u, (table.dimension,))
    out = -np.sum(np.conj(table.lam) * u.coeffs, axis=-1)
    return SpectralField(u.bound, u.dimension, out, real=u.real)


def diffusion(table, u):
    """Composition divergence(gradient(.)): multiply by -|lambda|^2."""
    _check(table, u)
    mult = -table.abs2()
    out = u.coeffs * mult.reshape(mult.shape + (1,) * len(u.component_shape))
    return SpectralField(u.bound, u.dimension, out, real=u.real)


def curl3d(table, v, sign=1):
    """Nonlocal curl lambda x vhat (componentwise complex cross product).

    sign=-1 applies the reflected-orientation curl, whose symbol is
    -conj(lambda).
    """
    if table.dimension != 3:
        raise KernelError("curl needs a 3D table")
    _check(table, v, (3,))
    lam = table.lam if sign > 0 else table.lam_neg()
    out = np.cross(lam, v.coeffs)
    return SpectralField(v.bound, v.dimension, out, real=v.real)


def strain(table, u):
    """Symmetric part of the gradient of a displacement field."""
    g = gradient(table, u)
    sym = 0.5 * (g.coeffs + np.swapaxes(g.coeffs, -1, -2))
    return SpectralField(u.bound, u.dimension, sym, real=u.real)


def star_gradient(kernel, kvec, u, tol=quad.DEFAULT_TOL):
    """Drift-stabilized radial gradient of a scalar field."""
    from .symbols import star_table

    if u.component_shape != ():
        raise ValueError("star gradient acts on scalar fields")
    mu = star_table(kernel, kvec, u.bound, tol)
    out = mu * u.coeffs[..., None]
    return SpectralField(u.bound, u.dimension, out, real=False)


# ---------------------------------------------------------------------------
# 1D averaging and the doubly nonlocal composition
# ---------------------------------------------------------------------------

def averaging_symbol(eta, xi, tol=1e-12, mass_tol=1e-8):
    """Symbol of the two-point averaging operator with window eta.

    a(xi) = 1/2 + (1/2) int eta(|z|) cos(xi z) dz.  eta is any object with
    ``epsilon`` (half-width) and a vectorized ``profile(z)`` for z >= 0 whose
    two-sided mass is 1; non-unit mass is rejected.
    """
    from numpy.polynomial.legendre import leggauss

    x, w = leggauss(96)
    z = 0.5 * eta.epsilon * (x + 1.0)
    wz = 0.5 * eta.epsilon * w * eta.profile(z)
    mass = 2.0 * float(np.sum(wz))
    if abs(mass - 1.0) > mass_tol:
        raise ValueError(f"averaging window must have unit mass, got {mass!r}")
    xi = np.asarray(xi, dtype=float)
    return 0.5 + np.sum(wz * np.cos(np.multiply.outer(xi, z)), axis=-1)


class AveragingWindow:
    """Constant-profile unit-mass window eta_eps(z) = 1/(2 eps) on [-eps, eps]."""

    def __init__(self, epsilon):
        if epsilon <= 0:
            raise ValueError("window half-width must be positive")
        self.epsilon = float(epsilon)

    def profile(self, z):
        z = np.asarray(z, dtype=float)
        return np.where(np.abs(z) <= self.epsilon, 0.5 / self.epsilon, 0.0)


def bond_symbol(gamma, xi):
    """Symbol of the two-point diffusion with bond kernel gamma.

    ell(xi) = 2 int_{-delta}^{delta} gamma(|a|) (cos(xi a) - 1) da, computed
    with gamma's own quadrature rule (``gamma.nodes``/``gamma.weights`` over
    (0, delta), one-sided).
    """
    xi = np.asarray(xi, dtype=float)
    a, w = gamma.nodes, gamma.weights
    return 4.0 * np.sum(w * (np.cos(np.multiply.outer(xi, a)) - 1.0), axis=-1)


def averaging_1d(eta, u, tol=1e-12):
    """Apply the averaging operator to a 1D spectral field."""
    if u.dimension != 1:
        raise ValueError("averaging_1d acts on 1D fields")
    xi = np.arange(-u.bound, u.bound + 1, dtype=float)
    mult = averaging_symbol(eta, xi, tol)
    out = u.coeffs * mult.reshape(mult.shape + (1,) * len(u.component_shape))
    return SpectralField(u.bound, u.dimension, out, real=u.real)


def double_laplacian_1d(gamma, eta, u, tol=1e-12):
    """Doubly nonlocal Laplacian: bond diffusion composed with averaging.

    Diagonal in Fourier space with symbol ell_gamma(xi) * a_eta(xi).
    """
    if u.dimension != 1:
        raise ValueError("double_laplacian_1d acts on 1D fields")
    xi = np.arange(-u.bound, u.bound + 1, dtype=float)
    mult = bond_symbol(gamma, xi) * averaging_symbol(eta, xi, tol)
    out = u.coeffs * mult.reshape(mult.shape + (1,) * len(u.component_shape))
    return SpectralField(u.bound, u.dimension, out, real=u.real)


def double_symbol_direct(gamma, eta, xi):
    """Unfactored tensor quadrature of the doubly nonlocal symbol.

    Integrates the four-point combination cos(xi(y+r)) - 1 - cos(xi r) +
    cos(xi y) over the product of the two windows; used as the independent
    side of the factorization check.
    """
    from numpy.polynomial.legendre import leggauss

    x, w = leggauss(96)
    r = 0.5 * eta.epsilon * (x + 1.0)
    wr = 0.5 * eta.epsilon * w * eta.profile(r)
    y, wy = gamma.nodes, gamma.weights
    xi = np.asarray(xi, dtype=float)
    ky = np.multiply.outer(xi, y)
    kr = np.multiply.outer(xi, r)
    # two-sided in both variables via even symmetry of the windows
    four = (
        np.cos(ky[..., :, None] + kr[..., None, :])
        + np.cos(ky[..., :, None] - kr[..., None, :])
        - 2.0
        - 2.0 * np.cos(kr)[..., None, :]
        + 2.0 * np.cos(ky)[..., :, None]
    )
    return 2.0 * np.einsum("...yr,y,r->...", four, wy, wr)


# ---------------------------------------------------------------------------
# physical-space oracle (direct quadrature of the defining integral)
# ---------------------------------------------------------------------------

def gradient_oracle(kernel, orientation, u_callable, points, tol=quad.DEFAULT_TOL,
                    panels=1, n_radial=32, n_angular=48):
    """Evaluate the nonlocal gradient of a scalar function by direct quadrature.

    2 int w_delta(|s|) (s/|s|) (u(x+s) - u(x)) ds at each row of ``points``,
    with u given analytically (periodic extension included by the caller's
    formula).  This path never forms Fourier symbols.
    """
    rule = quad.halfball_rule(kernel, panels, tol, n_radial, n_angular)
    r, dirs, w = quad.rule_points(rule, kernel, orientation)
    pts = np.asarray(points, dtype=float)
    offsets = r[:, None] * dirs
    shifted = pts[:, None, :] + offsets[None, :, :]
    du = u_callable(shifted) - u_callable(pts)[:, None]
    return 2.0 * np.einsum("k,pk,kc->pc", w, du, dirs)


def divergence_oracle(kernel, orientation, u_callable, points, tol=quad.DEFAULT_TOL,
                      panels=1, n_radial=32, n_angular=48):
    """Direct quadrature of the adjoint divergence of a vector function.

    2 int w_delta(|s|) (s/|s|) . (u(x) - u(x - s)) ds at each row of
    ``points``; the companion of gradient_oracle for vector fields.
    """
    rule = quad.halfball_rule(kernel, panels, tol, n_radial, n_angular)
    r, dirs, w = quad.rule_points(rule, kernel, orientation)
    pts = np.asarray(points, dtype=float)
    offsets = r[:, None] * dirs
    shifted = pts[:, None, :] - offsets[None, :, :]
    du = u_callable(pts)[:, None, :] - u_callable(shifted)
    return 2.0 * np.einsum("k,pkc,kc->p", w, du, dirs)


def affine_gradient_oracle(kernel, orientation, matrix, tol=quad.DEFAULT_TOL):
    """Direct quadrature of the gradient of u(x) = A x + b (any x, by translation).

    Returns the constant matrix produced by the integral; consistency demands
    it equal A^T (gradient indexed as (derivative, component)).
    """
    A = np.asarray(matrix, dtype=float)

    def f(r, dirs):
        # s (x) (A s)/|s| = r dir (x) (A dir)
        au = dirs @ A.T
        return 2.0 * r[:, None, None] * dirs[:, :, None] * au[:, None, :]

    flat = quad.integrate_halfball(
        kernel, orientation, lambda r, u: f(r, u).reshape(len(r), -1), tol=tol
    )
    d = kernel.dimension
    return flat.reshape(d, d)
