"""Spectral core: fields, multipliers, brackets, interpolation, checkpoints."""

import numpy as np
import pytest

from sqglab.spectral import (
    GridMismatchError,
    MeanNonzeroError,
    ScalarField,
    frac_laplacian,
    gradient_perp,
    grid,
    inner_product_beta,
    interpolate,
    load_field,
    multiply_dealiased,
    norm_beta,
    poisson_bracket,
    save_field,
)


def random_field(g, seed, kmax=5):
    rng = np.random.default_rng(seed)
    c = np.zeros((g.n, g.n), dtype=complex)
    for kx in range(-kmax, kmax + 1):
        for ky in range(-kmax, kmax + 1):
            if kx == 0 and ky == 0:
                continue
            c[kx % g.n, ky % g.n] = rng.normal() + 1j * rng.normal()
    vals = np.real(np.fft.ifft2(c * g.n * g.n))
    return ScalarField.from_values(g, vals)


def test_grid_cache_and_wavenumbers():
    g = grid(32)
    assert grid(32) is g
    assert g.kx[1, 0] == 1
    assert g.ky[0, 1] == 1
    assert g.kx[31, 0] == -1
    # Nyquist column is dropped from derivative multipliers
    assert np.all(g.ikx[16, :] == 0)
    assert np.all(g.iky[:, 16] == 0)


def test_from_function_and_values_roundtrip():
    g = grid(32)
    f = ScalarField.from_function(g, lambda x, y: np.cos(2 * x) + np.sin(y))
    vals = f.values()
    xg, yg = g.x, g.y
    assert np.allclose(vals, np.cos(2 * xg) + np.sin(yg), atol=1e-13)
    assert abs(f.mean()) < 1e-14


def test_norm_l2_matches_quadrature():
    g = grid(48)
    f = random_field(g, 3)
    quad = np.sqrt(np.mean(f.values() ** 2) * (2 * np.pi) ** 2)
    assert np.isclose(f.norm_l2(), quad, rtol=1e-12)


def test_frac_laplacian_semigroup_and_inverse():
    g = grid(32)
    f = random_field(g, 4)
    a = frac_laplacian(frac_laplacian(f, 0.3), 0.45)
    b = frac_laplacian(f, 0.75)
    assert np.max(np.abs(a.coeff - b.coeff)) < 1e-12
    back = frac_laplacian(frac_laplacian(f, -0.5), 0.5)
    assert np.max(np.abs(back.coeff - f.coeff)) < 1e-12


def test_frac_laplacian_single_mode_eigenvalue():
    g = grid(32)
    f = ScalarField.from_function(g, lambda x, y: np.cos(2 * x + y))
    out = frac_laplacian(f, 0.5)
    expected = 5.0 ** 0.5
    assert np.allclose(out.values(), expected * f.values(), atol=1e-12)


def test_frac_laplacian_rejects_nonzero_mean_inverse():
    g = grid(32)
    f = ScalarField.from_values(g, np.ones((32, 32)) + np.cos(g.x),
                                zero_mean=False)
    with pytest.raises(MeanNonzeroError):
        frac_laplacian(f, -1.0)


def test_gradient_perp_orientation():
    # grad_perp psi = (-psi_y, psi_x); for psi = -cos y the field is (-sin y, 0)
    g = grid(32)
    psi = ScalarField.from_function(g, lambda x, y: -np.cos(y))
    ux, uy = gradient_perp(psi).component_values()
    assert np.allclose(ux, -np.sin(g.y), atol=1e-13)
    assert np.allclose(uy, 0.0, atol=1e-13)


def test_poisson_bracket_closed_form():
    # {cos x, cos y} = -f_x g_y + f_y g_x = -sin x sin y
    g = grid(32)
    f = ScalarField.from_function(g, lambda x, y: np.cos(x))
    h = ScalarField.from_function(g, lambda x, y: np.cos(y))
    br = poisson_bracket(f, h)
    assert np.allclose(br.values(), -np.sin(g.x) * np.sin(g.y), atol=1e-13)


def test_poisson_bracket_antisymmetry_and_self():
    g = grid(32)
    f, h = random_field(g, 5), random_field(g, 6)
    anti = poisson_bracket(f, h) + poisson_bracket(h, f)
    assert np.max(np.abs(anti.coeff)) < 1e-12
    assert np.max(np.abs(poisson_bracket(f, f).coeff)) < 1e-12


def test_dealias_kills_high_modes_in_products():
    g = grid(32)
    cutoff = g.n // 3
    f = ScalarField.from_function(g, lambda x, y: np.cos(cutoff * x))
    p = multiply_dealiased(f, f)
    # cos^2 has a 2*cutoff mode, past the mask; only the mean survives
    c = p.coeff.copy()
    assert abs(c[0, 0] - 0.5) < 1e-13
    c[0, 0] = 0.0
    assert np.max(np.abs(c)) < 1e-13


def test_interpolate_fourier_is_exact_off_grid():
    g = grid(32)
    f = ScalarField.from_function(g, lambda x, y: np.cos(3 * x - 2 * y))
    rng = np.random.default_rng(7)
    pts = rng.uniform(0, 2 * np.pi, size=(50, 2))
    vals = interpolate(f, pts, method="fourier")
    assert np.allclose(vals, np.cos(3 * pts[:, 0] - 2 * pts[:, 1]), atol=1e-12)


def test_interpolate_bicubic_close_to_fourier():
    g = grid(64)
    f = random_field(g, 8, kmax=4)
    rng = np.random.default_rng(9)
    pts = rng.uniform(0, 2 * np.pi, size=(200, 2))
    a = interpolate(f, pts, method="fourier")
    b = interpolate(f, pts, method="bicubic")
    scale = np.max(np.abs(a))
    assert np.max(np.abs(a - b)) / scale < 1e-5


def test_inner_product_beta_single_mode():
    # psi = cos(k.x): <psi, psi>_beta = |k|^(2-beta) * 2 pi^2
    g = grid(32)
    psi = ScalarField.from_function(g, lambda x, y: np.cos(2 * x + y))
    for beta in (0.0, 0.5, 1.0):
        got = inner_product_beta(psi, psi, beta)
        want = 5.0 ** (1.0 - beta / 2.0) * 2.0 * np.pi ** 2
        assert np.isclose(got, want, rtol=1e-12)
        assert np.isclose(norm_beta(psi, beta) ** 2, want, rtol=1e-12)


def test_grid_mismatch_rejected():
    f = random_field(grid(32), 10)
    h = random_field(grid(64), 10)
    with pytest.raises(GridMismatchError):
        _ = f + h


def test_checkpoint_roundtrip(tmp_path):
    g = grid(32)
    f = random_field(g, 11)
    p = tmp_path / "f.gsqg"
    save_field(p, f)
    f2 = load_field(p)
    assert f2.grid.n == 32
    assert np.array_equal(f2.coeff, f.coeff)


def test_checkpoint_bad_magic(tmp_path):
    p = tmp_path / "bad.gsqg"
    p.write_bytes(b"NOPE" + b"\x00" * 64)
    with pytest.raises(ValueError):
        load_field(p)
