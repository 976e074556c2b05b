"""Outer reconstruction, Herglotz maps, Hilbert transform."""

import numpy as np
import pytest
from scipy.integrate import quad

from hardylab.grid import make_grid, quadrature, taylor_coefficients
from hardylab.outer import (
    NotLogIntegrableError,
    herglotz_map,
    hilbert_transform,
    outer_from_modulus,
)


def test_hilbert_transform_of_cosine():
    g = make_grid(256)
    t = g.angles
    # conjugate of cos(kt) is sin(kt)
    for k in (1, 3, 10):
        h = hilbert_transform(np.cos(k * t))
        assert np.allclose(h, np.sin(k * t), atol=1e-12)


def test_outer_constant_modulus():
    g = make_grid(512)
    w = outer_from_modulus(g.samples(np.full(512, 0.7)))
    for z in (0.0, 0.5, 0.3 + 0.4j):
        assert abs(w(z) - 0.7) < 1e-12
    assert np.allclose(w.boundary_modulus().values, 0.7)


def test_outer_value_at_zero_is_geometric_mean():
    g = make_grid(1024)
    u = 0.5 + 0.3 * np.cos(g.angles) ** 2
    w = outer_from_modulus(g.samples(u))
    expected = np.exp(quadrature(g.samples(np.log(u))).real)
    assert abs(w(0.0) - expected) < 1e-12


def test_outer_reconstructs_one_minus_z():
    # oracle: 1 - z is the outer function with modulus 2|sin(t/2)|
    g = make_grid(2**13)
    u = 2.0 * np.abs(np.sin(g.angles / 2))
    w = outer_from_modulus(g.samples(u))
    c = taylor_coefficients(w.boundary(), 6)
    unimodular = c[0] / abs(c[0])
    c = c / unimodular
    expected = np.array([1.0, -1.0, 0, 0, 0, 0, 0])
    assert np.max(np.abs(c - expected)) < 1e-4


def test_outer_reconstruction_error_halves_with_n():
    errs = []
    for n in (2**11, 2**12):
        g = make_grid(n)
        u = 2.0 * np.abs(np.sin(g.angles / 2))
        w = outer_from_modulus(g.samples(u))
        c = taylor_coefficients(w.boundary(), 2)
        errs.append(abs(c[1] + 1.0))
    assert errs[1] <= 0.6 * errs[0]


def test_outer_modulus_matches_target_on_grid():
    g = make_grid(512)
    u = np.exp(-0.5 + 0.4 * np.cos(g.angles) + 0.2 * np.sin(3 * g.angles))
    w = outer_from_modulus(g.samples(u))
    assert np.allclose(w.boundary_modulus().values, u, rtol=1e-13)
    assert np.allclose(np.abs(w.boundary().values), u, rtol=1e-13)


def test_outer_not_log_integrable():
    g = make_grid(2**12)
    t = np.abs(g.signed_angles())
    with pytest.raises(NotLogIntegrableError):
        outer_from_modulus(g.samples(np.exp(-1.0 / t)))
    w = outer_from_modulus(g.samples(np.exp(-1.0 / t)), strict=False)
    assert w.log_divergent
    # the boundary modulus is still the prescribed one
    assert np.allclose(w.boundary().values.real, np.exp(-1.0 / t))


def test_herglotz_constant():
    g = make_grid(256)
    u = herglotz_map(g.samples(np.full(256, 3.0)))
    assert abs(u(0.0) - 3.0) < 1e-13
    assert abs(u(0.4 - 0.2j) - 3.0) < 1e-12


def test_herglotz_one_plus_cos():
    # oracle: direct kernel expansion gives U(z) = 1 + z for u = 1 + cos t
    def oracle(z, terms=40):
        total = quad(lambda t: (1 + np.cos(t)) / (2 * np.pi), 0, 2 * np.pi)[0]
        for k in range(1, terms):
            ck = quad(
                lambda t: ((1 + np.cos(t)) * np.cos(k * t)) / (2 * np.pi),
                0, 2 * np.pi)[0] - 1j * quad(
                lambda t: ((1 + np.cos(t)) * np.sin(k * t)) / (2 * np.pi),
                0, 2 * np.pi)[0]
            total += 2 * ck * z**k
        return total

    g = make_grid(2**12)
    u = herglotz_map(g.samples(1.0 + np.cos(g.angles)))
    for z in (0.0, 0.5j, -0.7):
        assert abs(oracle(z) - (1 + z)) < 1e-9
        assert abs(u(z) - (1 + z)) < 1e-6


def test_herglotz_at_zero_is_mean():
    g = make_grid(2048)
    vals = np.abs(np.sin(g.angles / 2)) ** 2
    u = herglotz_map(g.samples(vals))
    assert abs(u(0.0) - 0.5) < 1e-12


def test_herglotz_positivity():
    g = make_grid(1024)
    rng = np.random.default_rng(11)
    u = herglotz_map(g.samples(rng.random(1024)))
    pts = 0.99 * np.exp(2j * np.pi * rng.random(1000)) * rng.random(1000)
    assert np.all(u(pts).real >= -1e-8)


def test_herglotz_boundary_real_part():
    g = make_grid(512)
    data = 1.0 + 0.5 * np.sin(g.angles)
    u = herglotz_map(g.samples(data))
    assert np.allclose(u.boundary().values.real, data, atol=1e-12)
