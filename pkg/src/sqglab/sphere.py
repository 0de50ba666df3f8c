"""Closed-form sphere-rotation backend.

The steady rotation of the unit sphere (stream -cos(colatitude), a degree-1
eigenfunction) decouples the linearized problem harmonic by harmonic: for a
spherical harmonic of degree n with azimuthal action i n, the mode amplitude
is a pure phase

    xi(t) = exp(-i omega_n t),     omega_n = n (2 / (n(n+1)))^(1 - beta/2),

and the translated Jacobi amplitude

    s(t) = (i/n) (n(n+1)/2)^(1 - beta/2) (xi(t) - 1)

vanishes exactly at T_n(beta) = (2 pi / n) (n(n+1)/2)^(1 - beta/2).  For
beta = 1 these conjugate times accumulate at pi sqrt(2); for beta < 1 they
spread out.  No spherical grid is built: everything is exact per mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .jacobi import OperatorSample

PI_SQRT2 = float(np.pi * np.sqrt(2.0))


@dataclass(frozen=True)
class SphereMode:
    n: int
    beta: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"harmonic degree must be >= 1, got {self.n}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")

    @property
    def eigenvalue(self) -> float:
        return float(self.n * (self.n + 1))

    @property
    def omega(self) -> float:
        """Phase speed of the mode amplitude."""
        return self.n * (2.0 / self.eigenvalue) ** (1.0 - self.beta / 2.0)


def closed_form(t, mode: SphereMode):
    """Exact (xi, sigma_amplitude) at time(s) t."""
    t = np.asarray(t, dtype=float)
    xi = np.exp(-1j * mode.omega * t)
    amp = (1j / mode.n) * (mode.eigenvalue / 2.0) ** (1.0 - mode.beta / 2.0)
    return xi, amp * (xi - 1.0)


def conjugate_time(n: int, beta: float) -> float:
    """First vanishing time of the mode-n Jacobi amplitude."""
    mode = SphereMode(n, beta)  # validates
    return (2.0 * np.pi / n) * (mode.eigenvalue / 2.0) ** (1.0 - beta / 2.0)


def integrate_mode(mode: SphereMode, dt: float, t_final: float):
    """RK4 integration of xi' = -i omega xi, sigma' = xi; returns samples."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    nsteps = int(round(t_final / dt))
    times = np.linspace(0.0, nsteps * dt, nsteps + 1)
    xi = np.empty(nsteps + 1, dtype=complex)
    sigma = np.empty(nsteps + 1, dtype=complex)
    xi[0], sigma[0] = 1.0, 0.0
    w = mode.omega
    x, s = 1.0 + 0.0j, 0.0 + 0.0j
    for i in range(nsteps):
        k1x, k1s = -1j * w * x, x
        k2x, k2s = -1j * w * (x + dt / 2 * k1x), x + dt / 2 * k1x
        k3x, k3s = -1j * w * (x + dt / 2 * k2x), x + dt / 2 * k2x
        k4x, k4s = -1j * w * (x + dt * k3x), x + dt * k3x
        x = x + dt / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        s = s + dt / 6 * (k1s + 2 * k2s + 2 * k3s + k4s)
        xi[i + 1], sigma[i + 1] = x, s
    return times, xi, sigma


def first_sigma_zero(mode: SphereMode, dt: float = 1e-4,
                     t_max: float | None = None) -> float:
    """First positive zero of |sigma| from the integrated samples.

    |sigma| does not change sign, so the zero is refined as a root of
    d|sigma|^2/dt = 2 Re(conj(sigma) xi), bracketed around the first local
    minimum of |sigma| below half its running maximum.
    """
    if t_max is None:
        t_max = 1.25 * conjugate_time(mode.n, mode.beta)
    times, xi, sigma = integrate_mode(mode, dt, t_max)
    mag = np.abs(sigma)
    peak = np.maximum.accumulate(mag)
    deriv = 2.0 * np.real(np.conj(sigma) * xi)
    for i in range(1, len(times) - 1):
        if mag[i] <= mag[i - 1] and mag[i] <= mag[i + 1] and mag[i] < 0.5 * peak[i]:
            from scipy.interpolate import CubicSpline

            sp = CubicSpline(times[i - 1:i + 2], deriv[i - 1:i + 2])
            try:
                return float(brentq(sp, times[i - 1], times[i + 1]))
            except ValueError:
                return float(times[i])
    raise ValueError("no sigma zero found below t_max")


def sphere_phi_samples(degrees, beta: float, times) -> list[OperatorSample]:
    """Block-diagonal Phi(t) over the listed harmonic degrees.

    Each complex mode amplitude s(t) becomes the real 2x2 rotation-scaling
    block [[Re s, -Im s], [Im s, Re s]] (real/imaginary Jacobi pair), so
    the torus detection pipeline applies unchanged.
    """
    degrees = list(degrees)
    out = []
    for t in np.asarray(times, dtype=float):
        m = np.zeros((2 * len(degrees), 2 * len(degrees)))
        for j, n in enumerate(degrees):
            _, s = closed_form(t, SphereMode(n, beta))
            b = 2 * j
            m[b, b] = s.real
            m[b, b + 1] = -s.imag
            m[b + 1, b] = s.imag
            m[b + 1, b + 1] = s.real
        out.append(OperatorSample(float(t), m, "Phi"))
    return out


SCAN_HEADER = "n,beta,T_n"
SCAN_FOOTER = "# limit pi*sqrt(2) = 4.442882938158366"


def cluster_scan(beta: float, n_max: int):
    """Table of (n, T_n(beta)) with spread statistics.

    Returns (rows, min_gap, dist_to_limit) where min_gap is the smallest
    |T_{n+1} - T_n| and dist_to_limit is |T_{n_max} - pi sqrt(2)|.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    rows = [(n, beta, conjugate_time(n, beta)) for n in range(1, n_max + 1)]
    t_vals = np.array([r[2] for r in rows])
    min_gap = float(np.min(np.abs(np.diff(t_vals))))
    dist = float(abs(t_vals[-1] - PI_SQRT2))
    return rows, min_gap, dist


def cluster_scan_csv(beta: float, n_max: int) -> str:
    rows, _, _ = cluster_scan(beta, n_max)
    lines = [SCAN_HEADER]
    for n, b, tn in rows:
        lines.append(f"{n},{b:.17g},{tn:.17g}")
    lines.append(SCAN_FOOTER)
    return "\n".join(lines) + "\n"
