"""Galerkin-truncated Jacobi-field solver along a simulated geodesic.

A real cos/sin basis of exact fields over a half-lattice of wavevectors,
orthonormalized in the beta metric, turns the operators of the linearized
problem into dense matrices:

    Lambda(t) w = Ad*_gamma Ad_gamma w      (symmetric positive-definite)
    K0 w        = ad*_w u0                  (antisymmetric)

The solution operator Phi(t) of the linearized Cauchy problem is evolved
as the first-order system m = Lambda w, m' = -K0 Lambda^-1 m, v' = w, and
split into the absolutely-continuous part Omega = int Lambda^-1 and the
compact remainder Gamma.  Conjugate points are flagged from the smallest
singular value of Phi(t)/t.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize_scalar

from .euler_arnold import GeodesicRecord
from .group_ops import DiffeoSample, coadjoint_algebra
from .spectral import (
    ScalarField,
    SpectralGrid,
    TWO_PI,
    VectorFieldExact,
    check_beta,
    gradient_perp,
    interpolate_many,
)


@dataclass(frozen=True)
class GalerkinBasis:
    """Real trigonometric streams over 0 < |k| <= K, beta-orthonormalized."""

    grid: SpectralGrid
    cutoff: int
    beta: float
    modes: list = field(repr=False)       # (kx, ky, "cos"|"sin")
    coeffs: np.ndarray = field(repr=False)  # (d, N, N) stream coefficients

    @property
    def dim(self) -> int:
        return len(self.modes)

    def field_of(self, coords: np.ndarray) -> ScalarField:
        c = np.tensordot(np.asarray(coords, dtype=float), self.coeffs, axes=(0, 0))
        return ScalarField(self.grid, c)

    def vector_of(self, coords: np.ndarray) -> VectorFieldExact:
        return gradient_perp(self.field_of(coords))

    def coords_of(self, psi: ScalarField) -> np.ndarray:
        """Coordinates <e_j, f>_beta of the exact field with stream psi."""
        g = self.grid
        w = np.zeros_like(g.k2)
        nz = g.k2 > 0
        w[nz] = g.k2[nz] ** (1.0 - self.beta / 2.0)
        flat = (w * psi.coeff).reshape(-1)
        return (np.conj(self.coeffs.reshape(self.dim, -1)) @ flat).real * TWO_PI**2

    def gram(self) -> np.ndarray:
        g = self.grid
        w = np.zeros_like(g.k2)
        nz = g.k2 > 0
        w[nz] = g.k2[nz] ** (1.0 - self.beta / 2.0)
        e = self.coeffs.reshape(self.dim, -1)
        return (np.conj(e) @ (w.reshape(-1)[:, None] * e.T)).real * TWO_PI**2


def make_basis(g: SpectralGrid, cutoff: int, beta: float) -> GalerkinBasis:
    """Half-lattice basis {cos(k.x), sin(k.x)} with unit beta norm."""
    check_beta(beta)
    if cutoff < 2:
        raise ValueError("basis cutoff must be >= 2")
    if cutoff > g.cutoff:
        raise ValueError(f"basis cutoff {cutoff} exceeds dealias cutoff {g.cutoff}")
    modes = []
    for kx in range(-cutoff, cutoff + 1):
        for ky in range(-cutoff, cutoff + 1):
            if kx == 0 and ky == 0:
                continue
            if kx**2 + ky**2 > cutoff**2:
                continue
            if kx < 0 or (kx == 0 and ky < 0):
                continue  # one representative per +-k pair
            modes.append((kx, ky, "cos"))
            modes.append((kx, ky, "sin"))
    coeffs = np.zeros((len(modes), g.n, g.n), dtype=complex)
    for j, (kx, ky, kind) in enumerate(modes):
        k2 = float(kx**2 + ky**2)
        # field norm: ||grad_perp cos(k.x)||_beta^2 = |k|^(2-beta) 2 pi^2
        scale = 1.0 / np.sqrt(k2 ** (1.0 - beta / 2.0) * 2.0 * np.pi**2)
        ip, im = (kx % g.n, ky % g.n), ((-kx) % g.n, (-ky) % g.n)
        if kind == "cos":
            coeffs[j][ip] += 0.5 * scale
            coeffs[j][im] += 0.5 * scale
        else:
            coeffs[j][ip] += -0.5j * scale
            coeffs[j][im] += 0.5j * scale
    return GalerkinBasis(g, cutoff, beta, modes, coeffs)


@dataclass(frozen=True)
class OperatorSample:
    """Dense matrix representation of one of the Jacobi-analysis operators."""

    t: float
    matrix: np.ndarray
    role: str  # Lambda | K0 | Phi | Omega | Gamma

    def symmetry_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.T)))

    def antisymmetry_error(self) -> float:
        return float(np.max(np.abs(self.matrix + self.matrix.T)))


def k0_matrix(u0: VectorFieldExact, beta: float, basis: GalerkinBasis) -> OperatorSample:
    """Matrix of K0 w = ad*_w u0 in the basis coordinates."""
    check_beta(beta)
    d = basis.dim
    m = np.empty((d, d))
    for j in range(d):
        ej = basis.vector_of(np.eye(d)[j])
        m[:, j] = basis.coords_of(coadjoint_algebra(ej, u0, beta).stream)
    return OperatorSample(0.0, m, "K0")


def _compose_many(coeffs: np.ndarray, g: SpectralGrid, fm) -> np.ndarray:
    """R_fm applied to a stack of streams: evaluate at fm(grid), re-project."""
    px, py = fm.points()
    vals = interpolate_many(coeffs, g, px.ravel(), py.ravel())
    out = np.fft.fft2(vals.reshape(-1, g.n, g.n)) / g.n**2
    out *= g.dealias_mask
    out[:, 0, 0] = 0.0
    return out


def lambda_matrix(d: DiffeoSample, beta: float, basis: GalerkinBasis) -> OperatorSample:
    """Assemble Lambda(t) column-wise (batched over the whole basis)."""
    check_beta(beta)
    g = basis.grid
    w_fwd = np.zeros_like(g.k2)
    nz = g.k2 > 0
    w_fwd[nz] = g.k2[nz] ** (1.0 - beta / 2.0)
    w_bwd = np.zeros_like(g.k2)
    w_bwd[nz] = g.k2[nz] ** (beta / 2.0 - 1.0)

    c = _compose_many(basis.coeffs, g, d.inverse)     # R_gamma^-1
    c *= w_fwd                                        # (-Lap)^(1-b/2)
    c = _compose_many(c, g, d.forward)                # R_gamma
    c *= w_bwd                                        # (-Lap)^(b/2-1)

    w_ip = np.zeros_like(g.k2)
    w_ip[nz] = g.k2[nz] ** (1.0 - beta / 2.0)
    e = basis.coeffs.reshape(basis.dim, -1)
    mat = (np.conj(e) @ (w_ip.reshape(-1)[:, None] * c.reshape(basis.dim, -1).T)).real
    return OperatorSample(d.t, mat * TWO_PI**2, "Lambda")


def lambda_inverse(sample: OperatorSample) -> np.ndarray:
    try:
        return np.linalg.inv(sample.matrix)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"Lambda({sample.t}) is singular; raise the resolution or lower "
            f"the basis cutoff"
        ) from exc


def lambda_samples(record: GeodesicRecord, basis: GalerkinBasis,
                   beta: float) -> list[OperatorSample]:
    return [lambda_matrix(d, beta, basis) for d in record.diffeos]


class _MatrixInterpolant:
    """Piecewise-linear interpolation of operator samples in time."""

    def __init__(self, times, matrices):
        self.times = np.asarray(times)
        self.matrices = np.asarray(matrices)

    def __call__(self, t: float) -> np.ndarray:
        ts = self.times
        if t <= ts[0]:
            return self.matrices[0]
        if t >= ts[-1]:
            return self.matrices[-1]
        i = int(np.searchsorted(ts, t) - 1)
        s = (t - ts[i]) / (ts[i + 1] - ts[i])
        return (1 - s) * self.matrices[i] + s * self.matrices[i + 1]


def evolve_phi(record: GeodesicRecord, basis: GalerkinBasis, beta: float,
               substeps: int = 10,
               lambdas: list[OperatorSample] | None = None) -> list[OperatorSample]:
    """Phi(t_i) at the record snapshot times; Phi(0) = 0, Phi'(0) = I."""
    check_beta(beta)
    if lambdas is None:
        lambdas = lambda_samples(record, basis, beta)
    times = np.asarray(record.times)
    lam = _MatrixInterpolant(times, [s.matrix for s in lambdas])
    k0 = k0_matrix(record.u0(), beta, basis).matrix
    d = basis.dim

    m = np.eye(d)       # m = Lambda w, m(0) = Lambda(0) w0 = w0
    v = np.zeros((d, d))
    out = [OperatorSample(0.0, v.copy(), "Phi")]

    def deriv(t, state):
        m_, v_ = state
        w = np.linalg.solve(lam(t), m_)
        return -k0 @ w, w

    for i in range(len(times) - 1):
        h = (times[i + 1] - times[i]) / substeps
        t = times[i]
        for _ in range(substeps):
            s = (m, v)
            k1 = deriv(t, s)
            k2 = deriv(t + h / 2, (m + h / 2 * k1[0], v + h / 2 * k1[1]))
            k3 = deriv(t + h / 2, (m + h / 2 * k2[0], v + h / 2 * k2[1]))
            k4 = deriv(t + h, (m + h * k3[0], v + h * k3[1]))
            m = m + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            v = v + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            t += h
        out.append(OperatorSample(times[i + 1], v.copy(), "Phi"))
    return out


def omega_gamma_split(record: GeodesicRecord, basis: GalerkinBasis, beta: float,
                      phi_samples: list[OperatorSample],
                      lambdas: list[OperatorSample] | None = None):
    """Omega/Gamma quadratures and the decomposition residual.

    Returns (omega_samples, gamma_samples, residual) with
    residual = max_i ||Phi_i - Omega_i - Gamma_i|| / ||Phi_i|| over t_i > 0.
    """
    if lambdas is None:
        lambdas = lambda_samples(record, basis, beta)
    times = np.asarray(record.times)
    if len(phi_samples) != len(times):
        raise ValueError("phi samples do not match the record sampling")
    lam_inv = np.array([lambda_inverse(s) for s in lambdas])
    phi = np.array([s.matrix for s in phi_samples])
    omega = cumulative_simpson(lam_inv, x=times, axis=0, initial=0.0)
    integrand = np.einsum("tij,jk,tkl->til",
                          lam_inv, k0_matrix(record.u0(), beta, basis).matrix, phi)
    gamma = -cumulative_simpson(integrand, x=times, axis=0, initial=0.0)
    resid = 0.0
    for i in range(1, len(times)):
        denom = np.linalg.norm(phi[i])
        if denom > 0:
            resid = max(resid, np.linalg.norm(phi[i] - omega[i] - gamma[i]) / denom)
    om = [OperatorSample(t, o, "Omega") for t, o in zip(times, omega)]
    ga = [OperatorSample(t, g_, "Gamma") for t, g_ in zip(times, gamma)]
    return om, ga, float(resid)


@dataclass(frozen=True)
class ConjugateReport:
    times: np.ndarray            # sample times (t > 0)
    sigma_min: np.ndarray        # smallest singular value of Phi(t)/t
    det_sign: np.ndarray
    detected: list               # (t_conj, multiplicity)
    threshold: float

    def csv(self) -> str:
        lines = ["t,sigma_min,det_sign"]
        for t, s, d in zip(self.times, self.sigma_min, self.det_sign):
            lines.append(f"{t:.17g},{s:.17g},{d:.0f}")
        lines.append("t_conj,multiplicity")
        for t, m in self.detected:
            lines.append(f"{t:.17g},{m}")
        return "\n".join(lines) + "\n"


def detect_conjugate(phi_samples: list[OperatorSample],
                     threshold: float | None = None,
                     threshold_factor: float = 1e-3) -> ConjugateReport:
    """Flag zeros of the Jacobi solution operator from sigma_min(Phi/t).

    Local minima of the trace falling below the threshold are refined by
    bisection on a determinant sign change when one is present; otherwise
    the location of the minimum is reported.  The default threshold is
    scale-free: threshold_factor times the median of the trace.
    """
    pts = [(s.t, s.matrix / s.t) for s in phi_samples if s.t > 0]
    if len(pts) < 3:
        raise ValueError("need at least 3 samples with t > 0")
    times = np.array([p[0] for p in pts])
    mats = np.array([p[1] for p in pts])
    svals = np.array([np.linalg.svd(m, compute_uv=False) for m in mats])
    sig = svals[:, -1]
    dets = np.array([np.sign(np.linalg.det(m)) for m in mats])
    thr = threshold if threshold is not None else threshold_factor * float(np.median(sig))

    spline = CubicSpline(times, mats, axis=0)

    def sigma_at(t):
        return float(np.linalg.svd(spline(t), compute_uv=False)[-1])

    def det_at(t):
        return float(np.linalg.det(spline(t)))

    detected = []
    for i in range(len(times)):
        is_min = ((i == 0 or sig[i] <= sig[i - 1])
                  and (i == len(times) - 1 or sig[i] <= sig[i + 1]))
        if not is_min:
            continue
        lo = times[max(i - 1, 0)]
        hi = times[min(i + 1, len(times) - 1)]
        if np.sign(det_at(lo)) != np.sign(det_at(hi)) and lo < hi:
            a, b = lo, hi
            fa = det_at(a)
            for _ in range(80):
                mid = 0.5 * (a + b)
                fm = det_at(mid)
                if np.sign(fm) == np.sign(fa):
                    a, fa = mid, fm
                else:
                    b = mid
            t_star = 0.5 * (a + b)
        else:
            res = minimize_scalar(sigma_at, bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-12})
            t_star = float(res.x)
        if sigma_at(t_star) >= thr:
            continue
        mult = int(np.sum(np.linalg.svd(spline(t_star), compute_uv=False) < thr))
        detected.append((float(t_star), max(mult, 1)))
    # deduplicate refined times that collapsed together
    dedup = []
    for t, m in sorted(detected):
        if dedup and abs(t - dedup[-1][0]) < 1e-9:
            continue
        dedup.append((t, m))
    return ConjugateReport(times, sig, dets, dedup, thr)
