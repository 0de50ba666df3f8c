"""Conjugate-point counting machinery: spectra, thresholds and the bound.

The count works entirely with exact truncated spectra (torus lattice or
sphere n(n+1) values); the Weyl asymptotic is reported alongside for
comparison only.  The two run-dependent constants are

    delta = inf_t ||Ad_{gamma(t)}^-1||_{L2}^-2      (beta-independent)
    C     = sharpest constant with ||K0 v||_{-b/2}^2 <= C ||psi_v||_{b/2}^2

on the computational subspace; pairs (k, n) whose Laplacian eigenvalue
falls below the threshold

    lambda_n < (C T^2 / (4 delta^2 k^2 pi^2))^(1 / (1 - beta))

are counted with multiplicity, giving the upper bound aleph_beta on the
number of conjugate points in [0, T].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline

from .euler_arnold import GeodesicRecord
from .jacobi import GalerkinBasis, k0_matrix, make_basis, _compose_many
from .spectral import TWO_PI, VectorFieldExact, frac_laplacian


class CoverageError(ValueError):
    """Stored spectrum does not reach the requested eigenvalue range."""


@dataclass(frozen=True)
class Spectrum:
    """Laplacian eigenvalues with multiplicities on a reference surface."""

    source: str
    eigenvalues: np.ndarray   # sorted ascending, strictly positive
    multiplicities: np.ndarray
    coverage: float           # counts are exact for lambda <= coverage
    area: float

    @classmethod
    def torus(cls, k_max: int):
        """Lattice eigenvalues |k|^2, k in Z^2 \\ {0}, complete to k_max^2."""
        r = np.arange(-k_max, k_max + 1)
        k2 = (r[:, None] ** 2 + r[None, :] ** 2).ravel()
        k2 = k2[(k2 > 0) & (k2 <= k_max**2)]
        vals, counts = np.unique(k2, return_counts=True)
        return cls("torus", vals.astype(float), counts, float(k_max**2),
                   float(TWO_PI**2))

    @classmethod
    def sphere(cls, n_max: int):
        """n(n+1) with multiplicity 2n+1 on the unit sphere."""
        n = np.arange(1, n_max + 1)
        return cls("sphere", (n * (n + 1)).astype(float), 2 * n + 1,
                   float(n_max * (n_max + 1)), float(4.0 * np.pi))


def weyl_count(spectrum: Spectrum, lam: float) -> int:
    """Exact N(lambda) = #{n : lambda_n <= lambda} with multiplicity."""
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if lam > spectrum.coverage:
        raise CoverageError(
            f"lambda = {lam:.6g} exceeds spectrum coverage {spectrum.coverage:.6g}; "
            f"rebuild with a larger cutoff"
        )
    return int(np.sum(spectrum.multiplicities[spectrum.eigenvalues <= lam]))


def weyl_asymptotic(spectrum: Spectrum, lam: float) -> float:
    """The asymptotic device N(lambda) ~ (area / 2 pi) lambda."""
    return spectrum.area / (2.0 * np.pi) * lam


def _count_below(spectrum: Spectrum, lam: float) -> int:
    if lam > spectrum.coverage:
        raise CoverageError(
            f"threshold {lam:.6g} exceeds spectrum coverage {spectrum.coverage:.6g}"
        )
    return int(np.sum(spectrum.multiplicities[spectrum.eigenvalues < lam]))


# ---------------------------------------------------------------------------
# run-dependent constants

def operator_l2_norm(matrix: np.ndarray, tol: float = 1e-12,
                     max_iter: int = 10_000) -> float:
    """Largest singular value by power iteration on A^T A (deterministic)."""
    d = matrix.shape[0]
    v = np.ones(d) / np.sqrt(d)
    ata = matrix.T @ matrix
    lam = 0.0
    for _ in range(max_iter):
        w = ata @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v_new = w / nw
        if abs(nw - lam) <= tol * max(nw, 1.0):
            return float(np.sqrt(nw))
        lam, v = nw, v_new
    raise RuntimeError(f"power iteration did not converge in {max_iter} steps")


def ad_inverse_matrix(d, basis: GalerkinBasis) -> np.ndarray:
    """Matrix of Ad_{gamma^-1} v = grad_perp(psi_v o gamma) in basis coords."""
    g = basis.grid
    c = _compose_many(basis.coeffs, g, d.forward)
    w = np.zeros_like(g.k2)
    nz = g.k2 > 0
    w[nz] = g.k2[nz] ** (1.0 - basis.beta / 2.0)
    e = basis.coeffs.reshape(basis.dim, -1)
    return (np.conj(e) @ (w.reshape(-1)[:, None] * c.reshape(basis.dim, -1).T)).real \
        * TWO_PI**2


def ad_matrix(d, basis: GalerkinBasis) -> np.ndarray:
    """Matrix of Ad_gamma v = grad_perp(psi_v o gamma^-1) in basis coords."""
    g = basis.grid
    c = _compose_many(basis.coeffs, g, d.inverse)
    w = np.zeros_like(g.k2)
    nz = g.k2 > 0
    w[nz] = g.k2[nz] ** (1.0 - basis.beta / 2.0)
    e = basis.coeffs.reshape(basis.dim, -1)
    return (np.conj(e) @ (w.reshape(-1)[:, None] * c.reshape(basis.dim, -1).T)).real \
        * TWO_PI**2


def delta_inf(record: GeodesicRecord, cutoff: int = 6) -> float:
    """inf over snapshots of ||Ad_{gamma(t)}^-1||_{L2}^-2.

    Uses the beta = 0 (L2 velocity) inner product regardless of the
    geodesic's beta, matching the constant's beta-independence.
    """
    basis = make_basis(record.psi0.grid, cutoff, beta=0.0)
    best = np.inf
    for d in record.diffeos:
        norm = operator_l2_norm(ad_inverse_matrix(d, basis))
        best = min(best, norm**-2)
    if not best > 0:
        raise RuntimeError("degenerate adjoint norm")
    return float(best)


def c_constant(u0: VectorFieldExact, beta: float, basis: GalerkinBasis) -> float:
    """Sharpest C with ||K0 v||_{-beta/2}^2 <= C ||psi_v||_{beta/2}^2.

    Generalized eigenvalue problem on the truncated space: the left side is
    |K x|^2 in the beta-orthonormal coordinates, the right side the Gram
    matrix of the stream functions in the order-beta/2 homogeneous norm.
    """
    k = k0_matrix(u0, beta, basis).matrix
    g = basis.grid
    w = np.zeros_like(g.k2)
    nz = g.k2 > 0
    w[nz] = g.k2[nz] ** (beta / 2.0)
    e = basis.coeffs.reshape(basis.dim, -1)
    gram = (np.conj(e) @ (w.reshape(-1)[:, None] * e.T)).real * TWO_PI**2
    vals = sla.eigh(k.T @ k, gram, eigvals_only=True)
    return float(max(vals[-1], 0.0))


def c_constant_supnorm(u0: VectorFieldExact, beta: float) -> float:
    """Sup-norm alternative: ||grad (-Lap)^(1-beta/2) psi_u0||_inf^2."""
    s = frac_laplacian(u0.stream, 1.0 - beta / 2.0)
    g = s.grid
    sx = np.fft.ifft2(g.ikx * s.coeff).real * g.n**2
    sy = np.fft.ifft2(g.iky * s.coeff).real * g.n**2
    return float(np.max(sx**2 + sy**2))


def sphere_rotation_constants(beta: float, n_max: int) -> tuple[float, float]:
    """(delta, C) for the steady rotation of the sphere, truncated at n_max.

    The rotation acts by isometries, so every adjoint is an isometry and
    delta = 1 exactly.  C is maximized over modes (n, m), |m| <= n, where
    K0 multiplies by i m 2^(1-beta/2) lambda_n^(beta/2-1).
    """
    n = np.arange(1, n_max + 1)
    lam = n * (n + 1.0)
    c = np.max(n**2 * 2.0 ** (2.0 - beta) / lam)
    return 1.0, float(c)


# ---------------------------------------------------------------------------
# the bound

@dataclass(frozen=True)
class MorseInput:
    delta: float
    c: float
    t_horizon: float
    beta: float
    spectrum: Spectrum

    def __post_init__(self):
        if not 0.0 <= self.beta < 1.0:
            raise ValueError(f"the count requires beta in [0, 1), got {self.beta}")
        if self.delta <= 0 or self.c < 0 or self.t_horizon <= 0:
            raise ValueError("delta, T must be positive and C nonnegative")


@dataclass(frozen=True)
class MorseBound:
    aleph: int
    per_k: list          # (k, threshold, count)
    k_max: int
    aleph_weyl: float


def threshold(inp: MorseInput, k: int) -> float:
    base = inp.c * inp.t_horizon**2 / (4.0 * inp.delta**2 * k**2 * np.pi**2)
    return base ** (1.0 / (1.0 - inp.beta))


def morse_bound(inp: MorseInput) -> MorseBound:
    """aleph_beta = #{(k, n) : lambda_n below the k-threshold}."""
    if inp.c == 0.0:
        return MorseBound(0, [], 0, 0.0)
    lam1 = float(inp.spectrum.eigenvalues[0])
    per_k = []
    total = 0
    weyl_total = 0.0
    k = 1
    while True:
        th = threshold(inp, k)
        if th <= lam1:
            break
        cnt = _count_below(inp.spectrum, th)
        if cnt == 0:
            break
        per_k.append((k, th, cnt))
        total += cnt
        weyl_total += weyl_asymptotic(inp.spectrum, th)
        k += 1
    k_max = per_k[-1][0] if per_k else 0
    return MorseBound(total, per_k, k_max, weyl_total)


BOUND_HEADER = "beta,T,delta,C,k_max,aleph_exact,aleph_weyl"


def bound_csv_rows(entries) -> str:
    lines = [BOUND_HEADER]
    for (beta, t, delta, c, b) in entries:
        lines.append(f"{beta:.17g},{t:.17g},{delta:.17g},{c:.17g},"
                     f"{b.k_max},{b.aleph},{b.aleph_weyl:.17g}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# index form

def index_form(times, w_coords, k0: np.ndarray, ad_mats=None,
               v_coords=None, endpoint_tol: float = 1e-10) -> float:
    """Quadrature of the rewritten index form in beta-orthonormal coordinates.

    I(v, w) = int_0^T (Ad w')...(Ad v') + (K0 v) . w' dt with trajectories
    sampled on ``times`` and required to vanish at both endpoints.  With
    ``ad_mats`` None the adjoint is the identity (steady isometric case or
    u0 = 0).
    """
    times = np.asarray(times, dtype=float)
    w = np.asarray(w_coords, dtype=float)
    v = w if v_coords is None else np.asarray(v_coords, dtype=float)
    for traj, name in ((w, "w"), (v, "v")):
        if np.linalg.norm(traj[0]) > endpoint_tol or np.linalg.norm(traj[-1]) > endpoint_tol:
            raise ValueError(f"trajectory {name} must vanish at the endpoints")
    dw = CubicSpline(times, w, axis=0)(times, 1)
    dv = CubicSpline(times, v, axis=0)(times, 1)
    if ad_mats is not None:
        a = np.asarray(ad_mats)
        adw = np.einsum("tij,tj->ti", a, dw)
        adv = np.einsum("tij,tj->ti", a, dv)
    else:
        adw, adv = dw, dv
    kin = np.einsum("ti,ti->t", adv, adw)
    rot = np.einsum("ij,tj,ti->t", k0, v, dw)
    return float(simpson(kin + rot, x=times))


def sphere_mode_k0(mode) -> np.ndarray:
    """K0 block of a sphere mode in its real Jacobi-pair coordinates."""
    w = mode.omega
    return np.array([[0.0, -w], [w, 0.0]])


def sphere_negative_direction(mode, t_horizon: float, samples: int = 2001):
    """Endpoint-vanishing trajectory with negative index past T_n.

    z(t) = sin(pi t / T) exp(-i omega t / 2): the sine envelope enforces
    the endpoints and the half-frequency phase twist aligns with the
    Jacobi rotation, giving I = (T/2)(pi^2/T^2 - omega^2/4) < 0 exactly
    when T exceeds the first conjugate time.
    """
    t = np.linspace(0.0, t_horizon, samples)
    z = np.sin(np.pi * t / t_horizon) * np.exp(-0.5j * mode.omega * t)
    return t, np.column_stack([z.real, z.imag])
