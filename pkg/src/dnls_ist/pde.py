"""Independent split-step spectral integrator for i u_t + u_xx + i(|u|^2 u)_x = 0.

Used purely as a brute-force cross-check of the scattering-side time evolution.
Strang splitting on a periodic domain: the linear half u_t = i u_xx is exact in
Fourier space (phase e^{-i k^2 dt}); the nonlinear half u_t = -(|u|^2 u)_x is
advanced by classical RK4 with spectral differentiation and 2/3 dealiasing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BlowUpError, ValidationError
from .direct import Potential

STABILITY_BOUND = 1.0        # empirical guard on dt * k_max^2 for the splitting
BLOWUP_FACTOR = 10.0


@dataclass
class EvolutionConfig:
    dt: float
    t_end: float
    dealias_fraction: float = 2.0/3.0
    record_stride: int = 0     # 0: keep only the final state

    def __post_init__(self):
        if self.dt <= 0:
            raise ValidationError("dt must be positive")
        if not (0 < self.dealias_fraction <= 1):
            raise ValidationError("dealias fraction must lie in (0, 1]")

    @classmethod
    def default_for(cls, pot: Potential, t_end: float) -> "EvolutionConfig":
        k_max = np.pi/pot.x_grid.h
        return cls(dt=min(1e-4, STABILITY_BOUND/k_max**2), t_end=t_end)

    def check_stability(self, pot: Potential) -> float:
        k_max = np.pi/pot.x_grid.h
        return float(self.dt*k_max**2)


def evolve_pde(pot: Potential, cfg: EvolutionConfig):
    """Advance the potential to t_end; returns the final Potential, or
    (final, frames) when cfg.record_stride > 0."""
    if not pot.tails_decay(1e-6):
        import warnings
        warnings.warn("initial data do not decay at the domain ends; "
                      "periodic wrap-around will pollute the evolution",
                      stacklevel=2)
    if cfg.check_stability(pot) > STABILITY_BOUND*(1 + 1e-9):
        import warnings
        warnings.warn(
            f"dt*k_max^2 = {cfg.check_stability(pot):.2f} exceeds the splitting "
            f"stability bound {STABILITY_BOUND}", stacklevel=2)
    n = pot.x_grid.n
    k = 2*np.pi*np.fft.fftfreq(n, d=pot.x_grid.h)
    keep = np.abs(k) <= cfg.dealias_fraction*np.max(np.abs(k))
    amp0 = float(np.max(np.abs(pot.u)))
    nsteps = int(np.ceil(cfg.t_end/cfg.dt - 1e-12))
    u = pot.u.copy()
    frames = []

    def flux_derivative(v):
        vf = np.fft.fft(np.abs(v)**2*v)
        return np.fft.ifft(1j*k*np.where(keep, vf, 0.0))

    def nonlinear_half(v, h):
        k1 = -flux_derivative(v)
        k2 = -flux_derivative(v + 0.5*h*k1)
        k3 = -flux_derivative(v + 0.5*h*k2)
        k4 = -flux_derivative(v + h*k3)
        return v + h*(k1 + 2*k2 + 2*k3 + k4)/6.0

    t = 0.0
    for step in range(nsteps):
        h = min(cfg.dt, cfg.t_end - t)
        u = nonlinear_half(u, 0.5*h)
        u = np.fft.ifft(np.exp(-1j*k**2*h)*np.fft.fft(u))
        u = nonlinear_half(u, 0.5*h)
        t += h
        if amp0 > 0 and np.max(np.abs(u)) > BLOWUP_FACTOR*amp0:
            raise BlowUpError(f"amplitude exceeded {BLOWUP_FACTOR}x initial at t={t:.4f}")
        if cfg.record_stride and (step + 1) % cfg.record_stride == 0:
            frames.append((t, Potential(pot.x_grid, u.copy())))
    final = Potential(pot.x_grid, u)
    return (final, frames) if cfg.record_stride else final


@dataclass
class CompareMetrics:
    sup: float
    l2: float
    weighted_l2: float

    def as_dict(self) -> dict:
        return {"sup": self.sup, "l2": self.l2, "weighted_l2": self.weighted_l2}


def resample(pot: Potential, grid) -> Potential:
    """Band-limited resampling onto another grid with the same half-width;
    spline + zero-extension when the domains differ."""
    same_domain = (abs(grid.z_min - pot.x_grid.z_min) < 1e-12
                   and abs(grid.z_max - pot.x_grid.z_max) < 1e-12)
    if same_domain and grid.n == pot.x_grid.n:
        return Potential(grid, pot.u.copy())
    if same_domain:
        # zero-padded FFT interpolation of the n-point periodic extension
        n, m = pot.x_grid.n, grid.n
        spec = np.fft.fft(pot.u)
        out_spec = np.zeros(m, dtype=complex)
        if m >= n:
            half = n//2
            out_spec[:half] = spec[:half]
            out_spec[m - (n - half):] = spec[half:]
            if n % 2 == 0 and m > n:
                # split the Nyquist bin symmetrically
                out_spec[m - half] *= 0.5
                out_spec[half] = out_spec[m - half]
        else:
            # downsample: keep the low band (higher bins must be negligible)
            half = m//2
            out_spec[:half] = spec[:half]
            out_spec[half:] = spec[n - (m - half):]
        vals = np.fft.ifft(out_spec)*(m/n)
        return Potential(grid, vals)
    from scipy.interpolate import CubicSpline
    x_old, x_new = pot.x, grid.points()
    re = CubicSpline(x_old, pot.u.real, extrapolate=False)(x_new)
    im = CubicSpline(x_old, pot.u.imag, extrapolate=False)(x_new)
    vals = np.nan_to_num(re) + 1j*np.nan_to_num(im)
    return Potential(grid, vals)


def compare(u1: Potential, u2: Potential) -> CompareMetrics:
    """Sup, L^2 and weighted-L^2 (<x> weight) distances, resampling u2 if needed."""
    if u2.x_grid != u1.x_grid:
        u2 = resample(u2, u1.x_grid)
    diff = u1.u - u2.u
    x = u1.x
    h = u1.x_grid.h
    sup = float(np.max(np.abs(diff)))
    l2 = float(np.sqrt(np.trapezoid(np.abs(diff)**2, dx=h)))
    wl2 = float(np.sqrt(np.trapezoid((1 + x**2)*np.abs(diff)**2, dx=h)))
    return CompareMetrics(sup=sup, l2=l2, weighted_l2=wl2)
