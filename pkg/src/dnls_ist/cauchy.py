"""Singular-integral machinery: Cauchy integrals off the line, the Hilbert
transform on a uniform grid, Plemelj projections, and dense complex solves.

The Hilbert transform uses the discrete kernel of the infinite uniform lattice,
K_m = -2/(pi m) for odd m and 0 otherwise (sign fixed by the kernel 1/(s - z)),
applied by zero-padded FFT convolution. For smooth data decaying inside the
window this reproduces the principal-value transform of the line to near machine
precision, unlike the circle (periodized) multiplier whose kernel differs from
1/(s - z) at O(1/L^2). The Plemelj combinations

    P+ = (Id - iH)/2,      P- = -(Id + iH)/2

then satisfy P+ - P- = Id exactly at the discrete level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from .errors import SingularSystemError, ValidationError
from .grids import GridFunction, TAIL_THRESHOLD

PIVOT_RCOND = 1e-13          # relative pivot floor for solve_dense
RESIDUAL_BOUND = 1e-10       # postcondition on ||Ax - b||_inf / ||b||_inf


@lru_cache(maxsize=16)
def _hilbert_kernel_fft(n: int) -> np.ndarray:
    """FFT of the lattice Hilbert kernel, zero-padded for linear convolution."""
    m = np.arange(-(n - 1), n)
    kernel = np.zeros(2*n - 1)
    odd = (np.abs(m) % 2 == 1)
    kernel[odd] = -2.0/(np.pi*m[odd])
    size = 1
    while size < 4*n:
        size *= 2
    return np.fft.fft(np.concatenate([kernel, np.zeros(size - (2*n - 1))])), size


def hilbert_values(values: np.ndarray) -> np.ndarray:
    """Lattice Hilbert transform of a sample vector (grid spacing cancels)."""
    values = np.asarray(values, dtype=complex)
    n = values.size
    kf, size = _hilbert_kernel_fft(n)
    vf = np.fft.fft(values, size)
    full = np.fft.ifft(vf*kf)
    return full[n - 1:2*n - 1]


@lru_cache(maxsize=8)
def hilbert_matrix(n: int) -> np.ndarray:
    """Dense Toeplitz matrix of the lattice Hilbert kernel (for Nystrom assembly)."""
    m = np.arange(n)
    col = np.zeros(n)
    odd = (m % 2 == 1)
    col[odd] = -2.0/(np.pi*m[odd])
    return sla.toeplitz(col, -col)


def projection_matrices(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Dense P+ and P- collocation matrices on an n-point grid."""
    h_mat = hilbert_matrix(n)
    eye = np.eye(n)
    p_plus = 0.5*(eye - 1j*h_mat)
    return p_plus, p_plus - eye


def hilbert_transform(h: GridFunction, warn_tails: bool = True) -> GridFunction:
    """Principal-value Hilbert transform (1/pi) pv int h(s)/(s - z) ds.

    Emits a decay warning flag through ``GridFunction.tails_decay`` semantics:
    the transform is meaningful on the line only if h decays at the grid ends.
    """
    if warn_tails and not h.tails_decay(TAIL_THRESHOLD):
        import warnings
        warnings.warn("grid function does not decay at the ends; "
                      "Hilbert transform carries the truncation error",
                      stacklevel=2)
    return GridFunction(h.grid, hilbert_values(h.values))


def project_plus(h: GridFunction) -> GridFunction:
    """Upper boundary value of the Cauchy transform, P+ = (Id - iH)/2."""
    return GridFunction(h.grid, 0.5*(h.values - 1j*hilbert_values(h.values)))


def project_minus(h: GridFunction) -> GridFunction:
    """Lower boundary value with Plemelj sign, P- = -(Id + iH)/2 = P+ - Id."""
    return GridFunction(h.grid, 0.5*(h.values - 1j*hilbert_values(h.values)) - h.values)


def cauchy_offline(h: GridFunction, z: complex) -> complex:
    """Cauchy integral (1/2pi i) int h(s)/(s - z) ds for z off the real line."""
    z = complex(z)
    if abs(z.imag) <= 10*np.finfo(float).eps*max(1.0, abs(z)):
        raise ValidationError(f"evaluation point {z} is (numerically) on the real axis")
    s = h.grid.points()
    weights = np.full(h.grid.n, h.grid.h)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    return complex(np.sum(weights*h.values/(s - z))/(2j*np.pi))


def cauchy_offline_many(h: GridFunction, zs: np.ndarray) -> np.ndarray:
    """Vectorized ``cauchy_offline`` over an array of off-line points."""
    zs = np.asarray(zs, dtype=complex)
    bad = np.abs(zs.imag) <= 10*np.finfo(float).eps*np.maximum(1.0, np.abs(zs))
    if np.any(bad):
        raise ValidationError("evaluation points on the real axis")
    s = h.grid.points()
    weights = np.full(h.grid.n, h.grid.h)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    return np.sum((weights*h.values)[None, :]/(s[None, :] - zs[:, None]), axis=1)/(2j*np.pi)


@dataclass
class DenseComplexSystem:
    """Square complex linear system with its post-factorization condition estimate."""

    matrix: np.ndarray
    rhs: np.ndarray
    condition: float | None = field(default=None)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        self.rhs = np.asarray(self.rhs, dtype=complex)
        m = self.matrix.shape[0]
        if self.matrix.shape != (m, m):
            raise ValidationError(f"matrix must be square, got {self.matrix.shape}")
        if self.rhs.shape[0] != m:
            raise ValidationError("rhs length does not match matrix")


def solve_dense(sys: DenseComplexSystem) -> np.ndarray:
    """LU solve with pivot-threshold singularity detection and residual check."""
    a = sys.matrix
    lu, piv = sla.lu_factor(a, check_finite=False)
    diag = np.abs(np.diag(lu))
    scale = np.max(np.abs(a))
    if scale == 0 or np.min(diag) < PIVOT_RCOND*scale:
        cond = np.inf if np.min(diag) == 0 else scale/np.min(diag)
        sys.condition = cond
        raise SingularSystemError(
            f"matrix numerically singular (pivot ratio {np.min(diag)/scale:.2e})",
            condition=cond)
    anorm = np.linalg.norm(a, 1)
    gecon = sla.get_lapack_funcs("gecon", (lu,))
    rcond, _ = gecon(lu, anorm)
    sys.condition = np.inf if rcond == 0 else 1.0/rcond
    x = sla.lu_solve((lu, piv), sys.rhs, check_finite=False)
    rhs_norm = np.max(np.abs(sys.rhs))
    if rhs_norm > 0:
        residual = np.max(np.abs(a.dot(x) - sys.rhs))/rhs_norm
        if residual > RESIDUAL_BOUND:
            raise SingularSystemError(
                f"solve residual {residual:.2e} exceeds {RESIDUAL_BOUND:.0e}",
                condition=sys.condition)
    return x
