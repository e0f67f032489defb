"""Direct scattering for the derivative NLS spectral problem.

The Kaup-Newell system psi_x = [-i lam^2 sigma3 + lam Q(u)] psi is transformed to
Zakharov-Shabat form in z = lam^2. The transformed Jost solutions obey constant-
coefficient-in-z linear ODEs obtained by differentiating their Volterra equations:

    M' = (2iz E22 + Q1(x)) M,   M(-X) = e1        (analytic in Im z > 0)
    N' = (-2iz E11 + Q2(x)) N,  N(+X) = e2        (analytic in Im z > 0)

with

    Q1 = (1/2i) [[|u|^2, u], [-2i conj(u_x) - conj(u)|u|^2, -|u|^2]]
    Q2 = (1/2i) [[|u|^2, -2i u_x + u|u|^2], [-conj(u), -|u|^2]]

(the sign of the u|u|^2 term in Q2 is fixed by the Lax-pair consistency identity
T2' + T2(-i lam^2(sigma3+1) + lam Q) = (Q2 - 2iz E11) T2).

Integration is fixed-step RK4 with the oscillatory factor e^{2iz(x - x_j)} pulled
out per step (local integrating factor), vectorized over a batch of z. Transfer
data on the real axis come from boundary values of M alone:

    a(z)  = M1(z; +X)
    r-(z) = M2(z; +X) e^{-2iXz} / a(z),      r+(z) = r-(z)/(4z)

and satisfy |a|^2 (1 + conj(r+) r-) = 1 identically; the residual of that identity
is the solver's accuracy gauge. Eigenvalues are zeros of a in Im z > 0 located by
the argument principle on rectangles plus Newton refinement; norming constants
come from the pointwise proportionality M(z_k; x) = 2i lam_k gamma_k e^{2i x z_k}
P+(z_k; x) with P+ = -(1/4z) [[1, u], [-conj(u), -|u|^2 - 4z]] N.
"""

from __future__ import annotations

import io
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (EigenvalueSearchError, NormingConstantError, ResonanceError,
                     SchemaError, ValidationError)
from .grids import GridFunction, RealGrid, TAIL_THRESHOLD
from .scattering import PoleData, ScatteringData
from .solitons import first_quadrant_sqrt

RESONANCE_THRESHOLD = 1e-3     # min |a| on the real grid, else outside the admissible set
SIMPLICITY_THRESHOLD = 1e-6    # |a'(z_k)| floor for simple zeros
RATIO_SPREAD_WARN = 1e-4
RATIO_SPREAD_ERROR = 1e-2


# --------------------------------------------------------------------------
# potential
# --------------------------------------------------------------------------

@dataclass
class Potential:
    """Complex samples of u on a symmetric uniform x-grid [-X, X]."""

    x_grid: RealGrid
    u: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=complex)
        if self.u.shape != (self.x_grid.n,):
            raise ValidationError(
                f"expected {self.x_grid.n} samples, got {self.u.shape}")
        self._cache = {}

    @classmethod
    def from_callable(cls, f, half_width: float = 20.0, n: int = 2048) -> "Potential":
        grid = RealGrid.symmetric(half_width, n)
        return cls(grid, np.asarray(f(grid.points()), dtype=complex))

    @property
    def x(self) -> np.ndarray:
        return self.x_grid.points()

    @property
    def u_x(self) -> np.ndarray:
        """Spectral derivative (grid treated as one period of length n*h)."""
        if "u_x" not in self._cache:
            n = self.x_grid.n
            k = 2*np.pi*np.fft.fftfreq(n, d=self.x_grid.h)
            self._cache["u_x"] = np.fft.ifft(1j*k*np.fft.fft(self.u))
        return self._cache["u_x"]

    @property
    def mass(self) -> float:
        return float(np.trapezoid(np.abs(self.u)**2, dx=self.x_grid.h))

    def right_tail_integral(self) -> np.ndarray:
        """R(x) = int_x^{+X} |u|^2 dy on the grid."""
        aw2 = np.abs(self.u)**2
        seg = 0.5*(aw2[:-1] + aw2[1:])*self.x_grid.h
        return np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])

    @property
    def w(self) -> np.ndarray:
        """Phase companion u e^{i int_{+inf}^x |u|^2} (pointwise |w| = |u|)."""
        return self.u*np.exp(-1j*self.right_tail_integral())

    @property
    def v(self) -> np.ndarray:
        """Companion conj(u) e^{-(1/2i) int_{+inf}^x |u|^2} (pointwise |v| = |u|)."""
        return np.conj(self.u)*np.exp(-0.5j*self.right_tail_integral())

    def tails_decay(self, threshold: float = TAIL_THRESHOLD) -> bool:
        return bool(abs(self.u[0]) <= threshold and abs(self.u[-1]) <= threshold)

    # CSV: columns x, re(u), im(u) with header "# potential X n"
    def to_csv(self, path_or_buf) -> None:
        buf = path_or_buf if hasattr(path_or_buf, "write") else open(path_or_buf, "w")
        try:
            buf.write(f"# potential {self.x_grid.z_max!r} {self.x_grid.n}\n")
            buf.write("x,re,im\n")
            for x, v in zip(self.x, self.u):
                buf.write(f"{x!r},{v.real!r},{v.imag!r}\n")
        finally:
            if buf is not path_or_buf:
                buf.close()

    @classmethod
    def from_csv(cls, path_or_buf) -> "Potential":
        buf = path_or_buf if hasattr(path_or_buf, "read") else open(path_or_buf)
        try:
            header = buf.readline().split()
            if len(header) != 4 or header[:2] != ["#", "potential"]:
                raise SchemaError("expected '# potential X n' header")
            half_width, n = float(header[2]), int(header[3])
            data = np.loadtxt(io.StringIO(buf.read()), delimiter=",", skiprows=1)
            if data.shape != (n, 3):
                raise SchemaError(f"expected {n} rows of x,re,im")
            return cls(RealGrid.symmetric(half_width, n), data[:, 1] + 1j*data[:, 2])
        finally:
            if buf is not path_or_buf:
                buf.close()


# --------------------------------------------------------------------------
# transformed potentials Q1, Q2
# --------------------------------------------------------------------------

def q1_matrix(u: complex, u_x: complex) -> np.ndarray:
    au2 = abs(u)**2
    return np.array([[au2, u],
                     [-2j*np.conj(u_x) - np.conj(u)*au2, -au2]], dtype=complex)/2j


def q2_matrix(u: complex, u_x: complex) -> np.ndarray:
    au2 = abs(u)**2
    return np.array([[au2, -2j*u_x + u*au2],
                     [-np.conj(u), -au2]], dtype=complex)/2j


def _q1_entries(u, u_x):
    au2 = np.abs(u)**2
    f = 1.0/2j
    return f*au2, f*u, f*(-2j*np.conj(u_x) - np.conj(u)*au2), -f*au2


def _q2_entries(u, u_x):
    au2 = np.abs(u)**2
    f = 1.0/2j
    return f*au2, f*(-2j*u_x + u*au2), -f*np.conj(u), -f*au2


# --------------------------------------------------------------------------
# Jost solver
# --------------------------------------------------------------------------

@dataclass
class JostSolution:
    """Trajectory of one transformed Jost solution at a batch of spectral points.

    values has shape (nx, nz, 2) and lives on the potential's x-grid; the
    boundary seed (e1 at -X for "M-", e2 at +X for "N+", mirrored for the lower
    half plane variants) is exact and ``boundary_deviation`` records how far the
    opposite end has moved from the free solution, as a plain diagnostic.
    """

    z: np.ndarray
    which: str
    x_grid: RealGrid
    values: np.ndarray = field(repr=False)
    boundary_deviation: np.ndarray | None = None

    def at_end(self) -> np.ndarray:
        """State at the end the integration ran towards, shape (nz, 2)."""
        return self.values[-1] if self.which in ("M-", "N-") else self.values[0]


def _fine_samples(pot: Potential, refine: int):
    """u, u_x resampled on the half-step grid of the refined integrator mesh.

    Cubic splines on the sample grid; consistent with the integrator's O(h^4).
    """
    key = ("fine", refine)
    if key not in pot._cache:
        x = pot.x
        nfine = 2*refine*(pot.x_grid.n - 1) + 1
        xf = np.linspace(x[0], x[-1], nfine)
        uf = (CubicSpline(x, pot.u.real)(xf) + 1j*CubicSpline(x, pot.u.imag)(xf))
        ux = pot.u_x
        uxf = (CubicSpline(x, ux.real)(xf) + 1j*CubicSpline(x, ux.imag)(xf))
        pot._cache[key] = (xf, uf, uxf)
    return pot._cache[key]


def _q_mass(pot: Potential) -> float:
    """L^1-type size of the transformed potential, drives the refinement model."""
    au = np.abs(pot.u)
    dens = au**2 + np.abs(pot.u_x) + 0.5*au**3
    return float(np.trapezoid(dens, dx=pot.x_grid.h))


def auto_refine(pot: Potential, z_scale: float, target: float = 1e-7) -> int:
    """Substeps per grid cell so the RK4 phase error stays below target.

    Error model: total ~ (2 z h')^4 / 120 * mass(Q); solved for the refinement.
    """
    mass = max(_q_mass(pot), 1e-3)
    h = pot.x_grid.h
    q = 2*abs(z_scale)*h*(mass/(120.0*target))**0.25
    return int(np.clip(np.ceil(q), 1, 64))


def _sweep(q11, q12, q21, q22, z, h, osc_on_second: bool, reverse: bool,
           seed: np.ndarray, keep_stride: int):
    """Shared RK4 core with per-step integrating factor.

    The state is V with M = diag(1, E) V (osc_on_second) or N = diag(1/E', 1) W
    (first-component oscillation); both reduce to the same stage structure

        D(x) = [[q11, q12 * E(x)], [q21 / E(x), q22]],  E(x) = e^{2iz (x - x_j)}

    q-arrays are sampled on the half-step grid; ``reverse`` integrates from the
    right end. Returns the trajectory at every ``keep_stride``-th full node.
    """
    z = np.asarray(z, dtype=complex)
    nz = z.size
    n_half = len(q11)
    nst = (n_half - 1)//2
    if reverse:
        h = -h
    eh = np.exp(2j*z*(h/2))
    ef = eh*eh
    v1 = np.full(nz, seed[0], dtype=complex)
    v2 = np.full(nz, seed[1], dtype=complex)
    n_keep = nst//keep_stride + 1
    out = np.empty((n_keep, nz, 2), dtype=complex)
    k_out = 0 if not reverse else n_keep - 1

    def record(a, b, idx):
        out[idx, :, 0] = a
        out[idx, :, 1] = b

    record(v1, v2, k_out)
    for j in range(nst):
        i0 = (2*j if not reverse else n_half - 1 - 2*j)
        i1 = i0 + (1 if not reverse else -1)
        i2 = i0 + (2 if not reverse else -2)
        a0, b0, c0, d0 = q11[i0], q12[i0], q21[i0], q22[i0]
        a1, b1, c1, d1 = q11[i1], q12[i1], q21[i1], q22[i1]
        a2, b2, c2, d2 = q11[i2], q12[i2], q21[i2], q22[i2]
        b1e, c1e = b1*eh, c1/eh
        b2e, c2e = b2*ef, c2/ef
        k11 = a0*v1 + b0*v2
        k12 = c0*v1 + d0*v2
        t1, t2 = v1 + 0.5*h*k11, v2 + 0.5*h*k12
        k21 = a1*t1 + b1e*t2
        k22 = c1e*t1 + d1*t2
        t1, t2 = v1 + 0.5*h*k21, v2 + 0.5*h*k22
        k31 = a1*t1 + b1e*t2
        k32 = c1e*t1 + d1*t2
        t1, t2 = v1 + h*k31, v2 + h*k32
        k41 = a2*t1 + b2e*t2
        k42 = c2e*t1 + d2*t2
        v1 = v1 + h*(k11 + 2*k21 + 2*k31 + k41)/6.0
        v2 = v2 + h*(k12 + 2*k22 + 2*k32 + k42)/6.0
        # leave the local frame: the oscillating component picks up E(full step)
        if osc_on_second:
            v2 = v2*ef
        else:
            v1 = v1/ef
        if (j + 1) % keep_stride == 0:
            k_out += 1 if not reverse else -1
            record(v1, v2, k_out)
    return out


def solve_jost(pot: Potential, z, which: str = "M-", refine: int | None = None,
               keep_trajectory: bool = False) -> JostSolution:
    """Integrate one transformed Jost system at a batch of spectral points z.

    which selects the solution and its boundary end: "M-" and "N+" (Im z >= 0)
    or "M+" and "N-" (Im z <= 0).
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if which in ("M-", "N+") and np.any(z.imag < -1e-12):
        raise ValidationError(f"{which} requires Im z >= 0")
    if which in ("M+", "N-") and np.any(z.imag > 1e-12):
        raise ValidationError(f"{which} requires Im z <= 0")
    if which not in ("M-", "N+", "M+", "N-"):
        raise ValidationError(f"unknown Jost solution {which!r}")
    if refine is None:
        refine = auto_refine(pot, float(np.max(np.abs(z))) if z.size else 1.0)
    xf, uf, uxf = _fine_samples(pot, refine)
    if which in ("M-", "M+"):
        q11, q12, q21, q22 = _q1_entries(uf, uxf)
        osc_on_second = True
        seed = (1.0, 0.0)
        reverse = which == "M+"
    else:
        q11, q12, q21, q22 = _q2_entries(uf, uxf)
        osc_on_second = False
        seed = (0.0, 1.0)
        reverse = which == "N+"
    h_fine = (xf[1] - xf[0])*2
    keep = refine if keep_trajectory else (pot.x_grid.n - 1)*refine
    traj = _sweep(q11, q12, q21, q22, z, h_fine, osc_on_second, reverse, seed, keep)
    free = np.array(seed, dtype=complex)
    seed_state = traj[-1] if reverse else traj[0]
    deviation = np.max(np.abs(seed_state - free[None, :]), axis=1)
    return JostSolution(z=z, which=which, x_grid=pot.x_grid,
                        values=traj, boundary_deviation=deviation)


# --------------------------------------------------------------------------
# transfer data on the real axis
# --------------------------------------------------------------------------

@dataclass
class TransferData:
    """a(z), r+(z), r-(z) on the real grid plus the off-line evaluator for a."""

    a: GridFunction
    r_plus: GridFunction
    r_minus: GridFunction
    c0: float
    conservation_defect: float
    _pot: Potential = field(repr=False, default=None)
    _refine: int = field(repr=False, default=1)

    def a_offline(self, z) -> np.ndarray:
        """a(z) for Im z >= 0 by direct integration (batched)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        sol = solve_jost(self._pot, z, "M-", refine=self._refine)
        return sol.at_end()[:, 0]

    def to_csv(self, path_or_buf) -> None:
        g = self.a.grid
        buf = path_or_buf if hasattr(path_or_buf, "write") else open(path_or_buf, "w")
        try:
            buf.write(f"# transfer {g.z_min!r} {g.z_max!r} {g.n} {self.c0!r}\n")
            buf.write("z,re_a,im_a,re_rp,im_rp,re_rm,im_rm\n")
            for z, a, rp, rm in zip(g.points(), self.a.values,
                                    self.r_plus.values, self.r_minus.values):
                buf.write(f"{z!r},{a.real!r},{a.imag!r},{rp.real!r},{rp.imag!r},"
                          f"{rm.real!r},{rm.imag!r}\n")
        finally:
            if buf is not path_or_buf:
                buf.close()


def compute_transfer(pot: Potential, zgrid: RealGrid,
                     refine: int | None = None,
                     resonance_threshold: float = RESONANCE_THRESHOLD) -> TransferData:
    """Transfer coefficient a and reflection coefficients r± on the real grid."""
    if not pot.tails_decay():
        warnings.warn("potential tails exceed the decay threshold; "
                      "transfer data carry the truncation error", stacklevel=2)
    z = zgrid.points()
    if refine is None:
        refine = auto_refine(pot, float(np.max(np.abs(z))))
    big_x = pot.x_grid.z_max
    end = solve_jost(pot, z, "M-", refine=refine).at_end()
    a_vals = end[:, 0]
    min_a = float(np.min(np.abs(a_vals)))
    if min_a < resonance_threshold:
        raise ResonanceError(
            f"min |a| = {min_a:.3e} on the real grid is below "
            f"{resonance_threshold:.0e}: potential admits (near-)resonances")
    r_minus_vals = end[:, 1]*np.exp(-2j*big_x*z)/a_vals
    r_plus_vals = _divide_by_4z(r_minus_vals, z)
    c0 = 1.0/float(np.max(np.abs(a_vals[z < 0]))) if np.any(z < 0) else 1.0
    defect = float(np.max(np.abs(
        np.abs(a_vals)**2*(1.0 + np.conj(r_plus_vals)*r_minus_vals) - 1.0)))
    return TransferData(a=GridFunction(zgrid, a_vals),
                        r_plus=GridFunction(zgrid, r_plus_vals),
                        r_minus=GridFunction(zgrid, r_minus_vals),
                        c0=c0, conservation_defect=defect,
                        _pot=pot, _refine=refine)


def _divide_by_4z(r_minus: np.ndarray, z: np.ndarray) -> np.ndarray:
    """r+ = r-/(4z), with the z = 0 node (odd grids) filled by quadratic
    extrapolation from its neighbors to avoid the 0/0."""
    out = np.empty_like(r_minus)
    zero = np.abs(z) < 1e-14
    nz = ~zero
    out[nz] = r_minus[nz]/(4*z[nz])
    if np.any(zero):
        for i in np.nonzero(zero)[0]:
            sel = [i - 3, i - 2, i - 1, i + 1, i + 2, i + 3]
            sel = [j for j in sel if 0 <= j < len(z)]
            coef = np.polyfit(z[sel], out[sel], 2)
            out[i] = np.polyval(coef, z[i])
    return out


# --------------------------------------------------------------------------
# eigenvalues (zeros of a in the upper half plane)
# --------------------------------------------------------------------------

def _rect_contour(x0, x1, y0, y1, pts_per_side):
    t = np.linspace(0.0, 1.0, pts_per_side, endpoint=False)
    bottom = x0 + t*(x1 - x0) + 1j*y0
    right = x1 + 1j*(y0 + t*(y1 - y0))
    top = x1 - t*(x1 - x0) + 1j*y1
    left = x0 + 1j*(y1 - t*(y1 - y0))
    return np.concatenate([bottom, right, top, left, [x0 + 1j*y0]])


def _winding(vals: np.ndarray) -> int:
    dphi = np.angle(vals[1:]/vals[:-1])
    return int(np.round(np.sum(dphi)/(2*np.pi)))


def _winding_adaptive(a_of, x0, x1, y0, y1, pts0=64, max_pts=2048):
    pts = pts0
    while True:
        contour = _rect_contour(x0, x1, y0, y1, pts)
        vals = a_of(contour)
        if np.min(np.abs(vals)) < 1e-9:
            raise EigenvalueSearchError(
                "a(z) vanishes on a search-rectangle boundary; "
                "shift the region and retry")
        steps = np.abs(np.angle(vals[1:]/vals[:-1]))
        if np.max(steps) < np.pi/2:
            return _winding(vals)
        pts *= 2
        if pts > max_pts:
            raise EigenvalueSearchError(
                "contour sampling did not resolve arg(a); "
                "raise the resolution or shrink the region")


def a_derivative(a_of, z0: complex, radius: float = 0.01, nodes: int = 32) -> complex:
    """a'(z0) by the Cauchy integral over a small circle (spectrally accurate)."""
    theta = 2*np.pi*np.arange(nodes)/nodes
    ring = z0 + radius*np.exp(1j*theta)
    vals = a_of(ring)
    return complex(np.mean(vals*np.exp(-1j*theta))/radius)


def find_eigenvalues(pot: Potential, region: tuple | None = None,
                     z_max: float = 30.0, refine: int | None = None,
                     newton_tol: float = 1e-10, max_subdiv: int = 24) -> list[complex]:
    """Zeros of a(z) inside a rectangle in the upper half plane.

    region = (re_min, re_max, im_min, im_max); the default follows from z_max.
    Subdivides until every box winds at most once, then Newton-refines; raises
    if the refined roots disagree with the winding count.
    """
    if region is None:
        region = (-z_max/2, z_max/2, 0.01, z_max/2)
    x0, x1, y0, y1 = region
    if y0 < 0.01:
        raise ValidationError("search region must clear the real axis by >= 0.01")
    if refine is None:
        refine = auto_refine(pot, max(abs(x0), abs(x1), y1), target=1e-10)

    def a_of(zs):
        return solve_jost(pot, zs, "M-", refine=refine).at_end()[:, 0]

    boxes = [(x0, x1, y0, y1)]
    roots: list[complex] = []
    total = _winding_adaptive(a_of, x0, x1, y0, y1)
    found = 0
    subdiv = 0
    while boxes:
        bx0, bx1, by0, by1 = boxes.pop()
        wind = _winding_adaptive(a_of, bx0, bx1, by0, by1)
        if wind == 0:
            continue
        if wind > 1 and subdiv < max_subdiv:
            subdiv += 1
            xm, ym = 0.5*(bx0 + bx1), 0.5*(by0 + by1)
            boxes += [(bx0, xm, by0, ym), (xm, bx1, by0, ym),
                      (bx0, xm, ym, by1), (xm, bx1, ym, by1)]
            continue
        zk = complex(0.5*(bx0 + bx1), 0.5*(by0 + by1))
        rad = min(0.01, 0.25*(by1 - by0))
        for _ in range(40):
            az = complex(a_of(np.array([zk]))[0])
            if abs(az) <= newton_tol:
                break
            ap = a_derivative(a_of, zk, radius=min(rad, zk.imag/2))
            step = az/ap
            zk = zk - step
            if zk.imag <= 0:
                zk = complex(zk.real, 1e-3)
        else:
            raise EigenvalueSearchError(
                f"Newton did not reach |a| <= {newton_tol:.0e} in box "
                f"[{bx0},{bx1}]x[{by0},{by1}] (last |a| = {abs(az):.2e})")
        ap = a_derivative(a_of, zk, radius=min(0.01, zk.imag/2))
        if abs(ap) < SIMPLICITY_THRESHOLD:
            raise EigenvalueSearchError(
                f"zero at {zk} is not numerically simple (|a'| = {abs(ap):.2e})")
        if all(abs(zk - r) > 1e-8 for r in roots):
            roots.append(zk)
            found += 1
    if found != total:
        raise EigenvalueSearchError(
            f"winding count {total} but {found} refined roots; "
            "Newton lost a zero or boxes overlapped")
    return sorted(roots, key=lambda z: (z.real, z.imag))


# --------------------------------------------------------------------------
# norming constants
# --------------------------------------------------------------------------

def norming_constants(pot: Potential, z_k: complex,
                      refine: int | None = None) -> tuple[complex, complex, complex]:
    """(lambda_k, gamma_k, c_k) for a verified simple zero z_k of a.

    gamma_k is the componentwise ratio M(z_k;x) / (2i lam_k e^{2ixz_k} P+(z_k;x))
    averaged over the central half of the x-grid; its x-variation is the
    diagnostic for spurious zeros. c_k = gamma_k / a'(z_k).
    """
    z_k = complex(z_k)
    if z_k.imag <= 0:
        raise ValidationError("eigenvalue must lie in the upper half plane")
    if refine is None:
        refine = auto_refine(pot, abs(z_k) + 1.0, target=1e-10)
    lam = first_quadrant_sqrt(z_k)
    zz = np.array([z_k])
    m_traj = solve_jost(pot, zz, "M-", refine=refine, keep_trajectory=True).values[:, 0, :]
    n_traj = solve_jost(pot, zz, "N+", refine=refine, keep_trajectory=True).values[:, 0, :]
    x = pot.x
    u = pot.u
    p1 = -(n_traj[:, 0] + u*n_traj[:, 1])/(4*z_k)
    p2 = -(-np.conj(u)*n_traj[:, 0] + (-np.abs(u)**2 - 4*z_k)*n_traj[:, 1])/(4*z_k)
    pref = 2j*lam*np.exp(2j*x*z_k)
    n = len(x)
    sl = slice(n//4, 3*n//4)
    ratios = []
    for m_comp, p_comp in ((m_traj[:, 0], p1), (m_traj[:, 1], p2)):
        denom = pref[sl]*p_comp[sl]
        ok = np.abs(denom) > 1e-12*np.max(np.abs(denom))
        ratios.append((m_comp[sl][ok]/denom[ok]))
    all_ratios = np.concatenate(ratios)
    gamma = complex(np.mean(all_ratios))
    spread = float(np.std(all_ratios)/max(abs(gamma), 1e-300))
    if spread > RATIO_SPREAD_ERROR:
        raise NormingConstantError(
            f"norming ratio varies by {spread:.2e} across x: spurious zero "
            "or unresolved eigenfunction")
    if spread > RATIO_SPREAD_WARN:
        warnings.warn(f"norming ratio spread {spread:.2e} above "
                      f"{RATIO_SPREAD_WARN:.0e}", stacklevel=2)

    def a_of(zs):
        return solve_jost(pot, zs, "M-", refine=refine).at_end()[:, 0]

    ap = a_derivative(a_of, z_k, radius=min(0.01, z_k.imag/2))
    if abs(ap) < SIMPLICITY_THRESHOLD:
        raise EigenvalueSearchError(
            f"|a'({z_k})| = {abs(ap):.2e} below the simplicity threshold")
    return lam, gamma, gamma/ap


# --------------------------------------------------------------------------
# full forward map
# --------------------------------------------------------------------------

def forward(pot: Potential, zgrid: RealGrid | None = None,
            region: tuple | None = None, refine: int | None = None) -> ScatteringData:
    """Potential -> scattering data {r±; poles (z_k, lam_k, c_k); c0}."""
    if zgrid is None:
        zgrid = RealGrid.symmetric(30.0, 2048)
    transfer = compute_transfer(pot, zgrid, refine=refine)
    z_max = max(abs(zgrid.z_min), abs(zgrid.z_max))
    zeros = find_eigenvalues(pot, region=region, z_max=z_max)
    poles = []
    for z_k in zeros:
        lam, _, c_k = norming_constants(pot, z_k)
        poles.append(PoleData(z=z_k, lam=lam, c=c_k))
    return ScatteringData(zgrid=zgrid, r_plus=transfer.r_plus,
                          r_minus=transfer.r_minus, poles=tuple(poles),
                          c0=transfer.c0)
