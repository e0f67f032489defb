"""Closed-form solitons of i u_t + u_xx + i(|u|^2 u)_x = 0 and the algebraic
N-soliton built from pole data.

A single soliton is parameterized by (omega, v, x0, gamma) with v^2 < 4*omega:

    u(x,t) = phi(s) * exp(i[-gamma + omega t + (v/2)(x - v t) - (3/4) C(s)]),
    s = x - v t - x0,
    phi(s)^2 = (4 omega - v^2) / [ sqrt(omega) (cosh(k s) - v/(2 sqrt(omega))) ],
    k = sqrt(4 omega - v^2),

where C(s) = int_{+inf}^s phi^2 dy has the global closed form

    C(s) = 4 [ atan(c tanh(k s / 2)) - atan(c) ],   c = sqrt((1+b)/(1-b)),
    b = v / (2 sqrt(omega)),

so no quadrature is needed anywhere. The pole <-> parameter maps are

    omega = 4|z1|^2,  v = -4 Re z1,
    x0 = 2 ln(|c1| / (2 Im z1)) / k,   gamma = arg c1 + arg(z1)/2.

The amplitude peaks at s = 0 with phi(0) = [sqrt(omega)/(4 omega - v^2)
* (1 - v/(2 sqrt(omega)))]^(-1/2) and carries total mass 4(pi - arg z1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class SolitonParams:
    omega: float
    v: float
    x0: float
    gamma: float

    def __post_init__(self):
        if self.omega <= 0:
            raise ValidationError(f"omega must be positive, got {self.omega}")
        if self.v**2 >= 4*self.omega:
            raise ValidationError(
                f"need v^2 < 4*omega, got v={self.v}, omega={self.omega}")

    @property
    def k(self) -> float:
        """Decay rate sqrt(4*omega - v^2) of |u|^2."""
        return float(np.sqrt(4*self.omega - self.v**2))


def params_from_pole(z1: complex, c1: complex) -> SolitonParams:
    """Physical soliton parameters for a pole z1 (Im z1 > 0) and norming constant c1."""
    z1, c1 = complex(z1), complex(c1)
    if z1.imag <= 0:
        raise ValidationError(f"pole must lie in the upper half plane, got {z1}")
    if c1 == 0:
        raise ValidationError("norming constant must be nonzero")
    omega = 4*abs(z1)**2
    v = -4*z1.real
    k = np.sqrt(4*omega - v**2)
    x0 = 2*np.log(abs(c1)/(2*z1.imag))/k
    gamma = np.angle(c1) + 0.5*np.angle(z1)
    return SolitonParams(omega, v, float(x0), float(gamma))


def pole_from_params(p: SolitonParams) -> tuple[complex, complex]:
    """Inverse of ``params_from_pole``; roundtrips to ~1e-14."""
    z1 = complex(-p.v, np.sqrt(4*p.omega - p.v**2))/4
    mod = 2*z1.imag*np.exp(0.5*p.x0*p.k)
    arg = p.gamma - 0.5*np.angle(z1)
    return z1, mod*np.exp(1j*arg)


def amplitude(s, omega: float, v: float):
    """The traveling amplitude profile phi_{omega,v}(s)."""
    s = np.asarray(s, dtype=float)
    k = np.sqrt(4*omega - v**2)
    b = v/(2*np.sqrt(omega))
    return ((4*omega - v**2)/np.sqrt(omega)/(np.cosh(k*s) - b))**0.5


def modulus_integral(s, omega: float, v: float):
    """C(s) = int_{+inf}^s phi_{omega,v}^2(y) dy in closed form (is <= 0)."""
    s = np.asarray(s, dtype=float)
    k = np.sqrt(4*omega - v**2)
    b = v/(2*np.sqrt(omega))
    c = np.sqrt((1 + b)/(1 - b))
    return 4.0*(np.arctan(c*np.tanh(0.5*k*s)) - np.arctan(c))


def one_soliton(x, t: float, p: SolitonParams):
    """Evaluate the soliton; vectorized over x."""
    x = np.asarray(x, dtype=float)
    s = x - p.v*t - p.x0
    phase = (-p.gamma + p.omega*t + 0.5*p.v*(x - p.v*t)
             - 0.75*modulus_integral(s, p.omega, p.v))
    return amplitude(s, p.omega, p.v)*np.exp(1j*phase)


def soliton_mass(p: SolitonParams) -> float:
    """L^2 mass int phi^2 = 8 atan(sqrt((1+b)/(1-b)))."""
    b = p.v/(2*np.sqrt(p.omega))
    return float(8*np.arctan(np.sqrt((1 + b)/(1 - b))))


# --------------------------------------------------------------------------
# algebraic N-soliton: residue conditions only, solved as two N x N systems
# --------------------------------------------------------------------------

def _pole_arrays(poles):
    zs = np.array([complex(p[0]) if isinstance(p, tuple) else complex(p.z)
                   for p in poles])
    cs = np.array([complex(p[1]) if isinstance(p, tuple) else complex(p.c)
                   for p in poles])
    if np.any(zs.imag <= 0):
        raise ValidationError("all poles must lie in the upper half plane")
    if len(set(np.round(zs, 14))) != len(zs):
        raise ValidationError("poles must be pairwise distinct")
    return zs, cs


def first_quadrant_sqrt(z: complex) -> complex:
    """The square root of z in the (closed) first quadrant."""
    lam = complex(np.sqrt(complex(z)))
    if lam.real < 0 or (lam.real == 0 and lam.imag < 0):
        lam = -lam
    return lam


def _residue_factors(zs, cs, x, t):
    """nu_k (pole at z_k, first column) and om_k = -conj(nu_k)/(4 conj z_k)."""
    lams = np.array([first_quadrant_sqrt(z) for z in zs])
    nu = 2j*lams*cs*np.exp(2j*x[..., None]*zs + 4j*t*zs**2)
    om = -np.conj(cs)/(2j*np.conj(lams))*np.exp(-2j*x[..., None]*np.conj(zs)
                                                - 4j*t*np.conj(zs)**2)
    return nu, om


def n_soliton_moments(poles, x, t: float):
    """Residue matrices summed: returns (mom12, mom21) of lim z (m - 1), per x.

    The pole-only inverse problem reduces to m = 1 + sum_k [A_k/(z - z_k)
    + B_k/(z - conj z_k)] with A_k carried by the first column and B_k by the
    second; the residue conditions close into two N x N linear systems coupling
    (first columns of A) with (top entries of B), and (bottom A) with (bottom B).
    """
    zs, cs = _pole_arrays(poles)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    nu, om = _residue_factors(zs, cs, x, t)     # shapes (nx, N)
    nn = nu.shape[1]
    # K[k, j] = 1/(conj z_k - z_j),  Kt[k, j] = 1/(z_k - conj z_j)
    K = 1.0/(np.conj(zs)[:, None] - zs[None, :])
    Kt = 1.0/(zs[:, None] - np.conj(zs)[None, :])
    eye = np.eye(nn)
    # p_k = om_k (1 + sum_j a_j/(conj z_k - z_j)),  a_k = nu_k sum_j p_j/(z_k - conj z_j)
    # eliminating a gives (I - D_om K D_nu Kt) p = om
    mat_p = eye[None, :, :] - np.einsum("xk,kj,xj,jl->xkl", om, K, nu, Kt)
    p = np.linalg.solve(mat_p, om[..., None])[..., 0]
    # b_k = nu_k (1 + sum_j q_j/(z_k - conj z_j)),  q_k = om_k sum_j b_j/(conj z_k - z_j)
    mat_b = eye[None, :, :] - np.einsum("xk,kj,xj,jl->xkl", nu, Kt, om, K)
    b = np.linalg.solve(mat_b, nu[..., None])[..., 0]
    return p.sum(axis=1), b.sum(axis=1)


def n_soliton(poles, x, t: float):
    """Evaluate the N-soliton on a grid of x at time t.

    x must cover the solution's support well past its decay on the right, since
    the phase unwinding integrates |w|^2 inward from +infinity; the function
    extends the grid internally and interpolates back, so any x array works.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    zs, cs = _pole_arrays(poles)
    # extension: rightmost support estimate from per-pole center + decay width
    k_dec = 2*zs.imag
    centers = np.array([params_from_pole(z, c).x0 + (-4*z.real)*t
                        for z, c in zip(zs, cs)])
    right = max(float(np.max(x)), float(np.max(centers + 45.0/k_dec)))
    h = min(0.02, 0.1/float(np.max(np.abs(zs)))/4)
    if x.size > 1:
        h = min(h, float(np.min(np.diff(np.sort(x)))))
    x_ext = np.arange(float(np.min(x)), right + h, h)
    mom12, _ = n_soliton_moments(poles, x_ext, t)
    w = -4.0*mom12
    aw2 = np.abs(w)**2
    # T(x) = int_{+inf}^x |w|^2, accumulated from the right end (tail ~ 0 there)
    rev = np.concatenate([[0.0], np.cumsum(0.5*(aw2[:-1] + aw2[1:])*np.diff(x_ext))])
    T = rev - rev[-1]
    u_ext = w*np.exp(-1j*T)
    if x_ext.size == x.size and np.allclose(x_ext, x):
        return u_ext
    from scipy.interpolate import CubicSpline
    spl_re = CubicSpline(x_ext, u_ext.real)
    spl_im = CubicSpline(x_ext, u_ext.imag)
    return spl_re(x) + 1j*spl_im(x)


def n_soliton_point(poles, x: float, t: float) -> complex:
    """Scalar convenience wrapper around ``n_soliton``."""
    return complex(n_soliton(poles, np.array([float(x)]), t)[0])
