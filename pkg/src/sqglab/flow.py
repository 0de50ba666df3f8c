"""Flow map, back-to-labels map and Jacobian of a time-dependent velocity.

The forward map gamma(t) is advanced as particles seeded at the grid
points, gamma_dot(t, x) = u(t, gamma(t, x)); the inverse map is obtained
by transporting the label displacement fields with the same velocity.
Both are stored as periodic displacement fields on the fixed grid.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .spectral import (
    MAGIC_FLOW,
    ScalarField,
    SpectralGrid,
    TWO_PI,
    grid,
    multiply_dealiased,
    interpolate,
)


class NumericalAbort(RuntimeError):
    """Non-finite values appeared during time stepping."""


@dataclass(frozen=True)
class FlowMap:
    """Sampled diffeomorphism x -> x + displacement(x), periodic."""

    grid: SpectralGrid
    disp_x: np.ndarray
    disp_y: np.ndarray

    @classmethod
    def identity(cls, g: SpectralGrid):
        z = np.zeros((g.n, g.n))
        return cls(g, z, z.copy())

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        return self.grid.x + self.disp_x, self.grid.y + self.disp_y

    def displacement_fields(self) -> tuple[ScalarField, ScalarField]:
        g = self.grid
        return (ScalarField.from_values(g, self.disp_x, zero_mean=False),
                ScalarField.from_values(g, self.disp_y, zero_mean=False))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.disp_x)) and np.all(np.isfinite(self.disp_y)))


def jacobian(fm: FlowMap) -> np.ndarray:
    """D gamma as a (2, 2, N, N) array via spectral differentiation."""
    g = fm.grid
    fx, fy = fm.displacement_fields()
    out = np.empty((2, 2, g.n, g.n))
    out[0, 0] = np.fft.ifft2(g.ikx * fx.coeff).real * g.n**2 + 1.0
    out[0, 1] = np.fft.ifft2(g.iky * fx.coeff).real * g.n**2
    out[1, 0] = np.fft.ifft2(g.ikx * fy.coeff).real * g.n**2
    out[1, 1] = np.fft.ifft2(g.iky * fy.coeff).real * g.n**2 + 1.0
    return out


def jacobian_det_error(fm: FlowMap) -> float:
    """max |det D gamma - 1| over the grid."""
    j = jacobian(fm)
    det = j[0, 0] * j[1, 1] - j[0, 1] * j[1, 0]
    return float(np.max(np.abs(det - 1.0)))


def advance_forward(fm: FlowMap, sampler, t: float, dt: float) -> FlowMap:
    """One RK4 particle step of gamma_dot = u(t, gamma).

    ``sampler(t, x, y)`` returns velocity components (ux, uy) at the
    given point arrays.
    """
    x0, y0 = fm.grid.x, fm.grid.y
    dx, dy = fm.disp_x, fm.disp_y

    def vel(tt, ax, ay):
        ux, uy = sampler(tt, (x0 + ax).ravel(), (y0 + ay).ravel())
        return ux.reshape(ax.shape), uy.reshape(ay.shape)

    k1x, k1y = vel(t, dx, dy)
    k2x, k2y = vel(t + dt / 2, dx + dt / 2 * k1x, dy + dt / 2 * k1y)
    k3x, k3y = vel(t + dt / 2, dx + dt / 2 * k2x, dy + dt / 2 * k2y)
    k4x, k4y = vel(t + dt, dx + dt * k3x, dy + dt * k3y)
    ndx = dx + dt / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
    ndy = dy + dt / 6 * (k1y + 2 * k2y + 2 * k3y + k4y)
    if not (np.all(np.isfinite(ndx)) and np.all(np.isfinite(ndy))):
        raise NumericalAbort("non-finite particle positions")
    return FlowMap(fm.grid, ndx, ndy)


def label_rhs(a: ScalarField, ux: ScalarField, uy: ScalarField,
              u_component: ScalarField) -> ScalarField:
    """d_t a = -u . grad(a) - u_i for a label displacement component."""
    g = a.grid
    ax = ScalarField(g, g.ikx * a.coeff)
    ay = ScalarField(g, g.iky * a.coeff)
    adv = multiply_dealiased(ux, ax) + multiply_dealiased(uy, ay)
    return ScalarField(g, -adv.coeff - u_component.coeff)


def advance_back_to_labels(labels: tuple[ScalarField, ScalarField], sampler_fields,
                           t: float, dt: float) -> tuple[ScalarField, ScalarField]:
    """One RK4 step of the label transport equations d_t A + u . grad A = 0.

    ``labels`` holds the displacement parts (A - id); ``sampler_fields(t)``
    returns the velocity component ScalarFields on the grid.
    """
    a1, a2 = labels

    def deriv(tt, b1, b2):
        ux, uy = sampler_fields(tt)
        return label_rhs(b1, ux, uy, ux), label_rhs(b2, ux, uy, uy)

    k1 = deriv(t, a1, a2)
    k2 = deriv(t + dt / 2, a1 + dt / 2 * k1[0], a2 + dt / 2 * k1[1])
    k3 = deriv(t + dt / 2, a1 + dt / 2 * k2[0], a2 + dt / 2 * k2[1])
    k4 = deriv(t + dt, a1 + dt * k3[0], a2 + dt * k3[1])
    n1 = a1 + (dt / 6) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    n2 = a2 + (dt / 6) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    return n1, n2


def labels_to_flowmap(labels: tuple[ScalarField, ScalarField]) -> FlowMap:
    a1, a2 = labels
    return FlowMap(a1.grid, a1.values(), a2.values())


def inverse_consistency(fwd: FlowMap, inv: FlowMap, method: str = "fourier") -> float:
    """max |gamma(gamma^-1(x)) - x| over the grid (periodic distance)."""
    g = fwd.grid
    ix, iy = inv.points()
    fx, fy = fwd.displacement_fields()
    pts = np.column_stack([ix.ravel(), iy.ravel()])
    dx = interpolate(fx, pts, method=method)
    dy = interpolate(fy, pts, method=method)
    rx = np.mod(ix.ravel() + dx - g.x.ravel() + np.pi, TWO_PI) - np.pi
    ry = np.mod(iy.ravel() + dy - g.y.ravel() + np.pi, TWO_PI) - np.pi
    return float(np.max(np.hypot(rx, ry)))


def transport_check(theta_t: ScalarField, fm: FlowMap, theta0: ScalarField,
                    method: str = "fourier") -> float:
    """Relative L2 size of theta(t) o gamma(t) - theta_0.

    This is the computable form of the coadjoint conservation law.
    """
    n0 = theta0.norm_l2()
    if n0 == 0.0:
        raise ValueError("transport_check needs a nonzero reference field")
    px, py = fm.points()
    vals = interpolate(theta_t, np.column_stack([px.ravel(), py.ravel()]),
                       method=method).reshape(px.shape)
    comp = ScalarField.from_values(fm.grid, vals, zero_mean=False)
    return (comp - theta0).norm_l2() / n0


def save_flowmap(path, fm: FlowMap):
    """Checkpoint: magic "GSQGF", version, N, then 2 coefficient channels."""
    fx, fy = fm.displacement_fields()
    with open(path, "wb") as fh:
        fh.write(MAGIC_FLOW)
        fh.write(struct.pack("<II", 1, fm.grid.n))
        fh.write(np.ascontiguousarray(fx.coeff, dtype="<c16").tobytes())
        fh.write(np.ascontiguousarray(fy.coeff, dtype="<c16").tobytes())


def load_flowmap(path) -> FlowMap:
    with open(path, "rb") as fh:
        magic = fh.read(5)
        if magic != MAGIC_FLOW:
            raise ValueError(f"bad magic {magic!r}, expected {MAGIC_FLOW!r}")
        version, n = struct.unpack("<II", fh.read(8))
        if version != 1:
            raise ValueError(f"unsupported version {version}")
        cx = np.frombuffer(fh.read(16 * n * n), dtype="<c16").reshape(n, n)
        cy = np.frombuffer(fh.read(16 * n * n), dtype="<c16").reshape(n, n)
    g = grid(n)
    dx = np.fft.ifft2(cx.astype(complex)).real * n**2
    dy = np.fft.ifft2(cy.astype(complex)).real * n**2
    return FlowMap(g, dx, dy)
