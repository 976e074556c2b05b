"""Symbol catalog: boundary moduli, level sets, self-map checks."""

import numpy as np
import pytest

from hardylab.grid import make_grid, log_integral
from hardylab.symbols import (
    beta_exp,
    boundary_contact_fraction,
    boundary_trace,
    constant,
    custom_outer,
    extreme_not_exposed,
    half,
    hs_extremal,
    lens,
    level_sets,
    parse_symbol,
)
from hardylab.grid import GridError


def _lattice(radius=0.999, n_r=10, n_t=100):
    r = np.linspace(0.1, radius, n_r)
    t = 2 * np.pi * (np.arange(n_t) + 0.5) / n_t
    return (r[:, None] * np.exp(1j * t[None, :])).ravel()


# ---------------------------------------------------------------- lens

def test_lens_fixes_origin():
    assert abs(lens(0.5)(0.0)) < 1e-15


def test_lens_near_identity_limit():
    lam = lens(0.999)
    z = _lattice()
    assert np.max(np.abs(lam(z) - z)) < 1e-2


def test_lens_boundary_exponent():
    # fit of log(1 - |lambda*|) against log |t| over t in [1e-4, 1e-1]
    lam = lens(0.5)
    t = np.logspace(-4, -1, 60)
    slope = np.polyfit(np.log(t), np.log(lam.co_modulus_of_angle(t)), 1)[0]
    assert abs(slope - 0.5) < 0.05


@pytest.mark.parametrize("theta", [0.25, 0.5, 0.75])
def test_lens_self_map(theta):
    lam = lens(theta)
    assert np.max(np.abs(lam(_lattice()))) <= 1.0 - 1e-9


def test_lens_trace_inside_disk():
    g = make_grid(2**12)
    tr, mod = boundary_trace(lens(0.5), g)
    assert np.all(np.abs(tr.values) < 1.0)
    assert np.all(mod.values < 1.0)
    assert np.allclose(np.abs(tr.values), mod.values, atol=1e-14)


def test_lens_rejects_bad_theta():
    for theta in (0.0, 1.0, -0.3, 2.0):
        with pytest.raises(ValueError):
            lens(theta)


# ---------------------------------------------------------------- half

def test_half_basics():
    phi = half()
    assert phi(0.0) == 0.5
    g = make_grid(256)
    tr, mod = boundary_trace(phi, g)
    assert np.allclose(tr.values, (1 + g.points) / 2, atol=1e-15)
    assert np.allclose(mod.values, np.abs(np.cos(g.angles / 2)), atol=1e-14)


def test_half_sup_approaches_one():
    phi = half()
    sups = [np.max(np.abs(phi(r * np.exp(1j * np.linspace(0, 2 * np.pi, 512)))))
            for r in (0.9, 0.99, 0.999)]
    assert np.all(np.diff(sups) > 0)
    assert sups[-1] > 0.999


# ---------------------------------------------------------------- beta_exp

def test_beta_exp_modulus_at_pi():
    for beta in (0.5, 1.0, 2.0):
        assert abs(beta_exp(beta).modulus_of_angle(np.pi) - np.exp(-1)) < 1e-14


def test_beta_exp_level_mass_rate():
    # c_k drops like 2^{-k/beta}
    g = make_grid(2**14)
    ls = level_sets(beta_exp(2.0), g, 12)
    k = np.arange(4, 13)
    slope = np.polyfit(k, np.log2(ls.masses[4:13]), 1)[0]
    assert abs(slope + 0.5) < 0.1


def test_beta_two_matches_half_map_scale():
    # the beta=2 modulus at the rescaled angle t/sqrt(2) tracks |cos(t/2)|:
    # exp(-sin^2(t/(2 sqrt 2))) >= cos(t/2) - 1e-2 for |t| <= 1
    t = np.linspace(-1, 1, 201)
    lhs = beta_exp(2.0).modulus_of_angle(t / np.sqrt(2))
    assert np.all(lhs >= np.cos(t / 2) - 1e-2)


def test_beta_exp_self_map():
    phi = beta_exp(2.0)
    vals = phi(_lattice())
    assert np.max(np.abs(vals)) <= 1.0 - 1e-9


def test_beta_exp_trace_modulus_closed_form():
    g = make_grid(2**12)
    tr, mod = boundary_trace(beta_exp(1.5), g)
    t = g.signed_angles()
    expected = np.exp(-np.abs(np.sin(t / 2)) ** 1.5)
    assert np.allclose(mod.values, expected, rtol=1e-14)
    assert np.allclose(np.abs(tr.values), expected, rtol=1e-12)


def test_beta_exp_interior_matches_trace_away_from_contact():
    # Herglotz evaluation close to the boundary agrees with the
    # transform-based trace away from the contact angle.  The radius keeps
    # N(1-r) = 8 so the kernel quadrature aliasing r^N stays below 1e-3.
    from hardylab.outer import outer_from_modulus

    n = 2**13
    g = make_grid(n)
    phi = beta_exp(2.0)
    w = outer_from_modulus(phi.modulus(g))
    t = g.signed_angles()
    sel = np.abs(t) > 1e-2
    probe = (1.0 - 8.0 / n) * g.points[sel][::64]
    evald = w(probe)
    traced = phi.trace(g).values[sel][::64]
    assert np.max(np.abs(evald - traced)) < 1e-3


# ------------------------------------------------- extreme / hs-extremal

def test_extreme_modulus_values():
    phi = extreme_not_exposed()
    assert abs(phi.modulus_of_angle(np.pi) - (1 - np.exp(-1 / np.pi))) < 1e-14
    g = make_grid(2**14)
    mod = phi.modulus(g)
    res = log_integral(g.samples(mod.values))
    assert not res.divergent  # |phi*| itself is log-integrable


def test_extreme_co_modulus_not_log_integrable():
    phi = extreme_not_exposed()
    g = make_grid(2**14)
    co = phi.co_modulus_of_angle(g.signed_angles())
    res = log_integral(g.samples(np.maximum(co, 1e-320)))
    assert res.divergent


def test_extreme_boundary_contact_fractions_vanish():
    # proxy for m({|phi*| = 1}) = 0: super-level fractions decrease with delta
    phi = extreme_not_exposed()
    g = make_grid(2**14)
    fr = boundary_contact_fraction(phi.modulus(g), [1e-6, 1e-12, 1e-24])
    assert np.all(np.diff(fr) < 0)
    assert fr[1] < 0.02


def test_hs_extremal_bounded_below():
    phi = hs_extremal()
    g = make_grid(2**14)
    mod = phi.modulus(g).values
    floor = 1 - np.exp(-np.exp(1 / np.pi))
    assert np.all(mod >= floor - 1e-15)
    assert floor > 0.74


def test_hs_extremal_co_modulus_not_log_integrable():
    # log(1 - |phi*|) = -e^{1/|t|} has a divergent integral (substitute
    # s = 1/t: the integrand e^s/s^2 is not integrable at infinity), so the
    # refinement oracle reports divergence at every grid size.
    phi = hs_extremal()
    for n in (2**10, 2**12, 2**14):
        g = make_grid(n)
        co = phi.co_modulus_of_angle(g.signed_angles())
        res = log_integral(g.samples(np.maximum(co, 1e-320)))
        assert res.divergent


# ---------------------------------------------------------------- custom

def test_custom_outer_matches_table():
    g = make_grid(512)
    u = 0.3 + 0.2 * np.cos(g.angles)
    phi = custom_outer(g.angles, u)
    assert np.allclose(phi.modulus(g).values, u, atol=1e-12)
    tr = phi.trace(g)
    assert np.allclose(np.abs(tr.values), u, rtol=1e-12)


def test_custom_outer_validation():
    with pytest.raises(ValueError):
        custom_outer([0.0, 1.0], [0.5, 1.5])


# ---------------------------------------------------------------- levels

def test_level_sets_constant_symbol():
    g = make_grid(256)
    ls = level_sets(constant(0.5), g, 5)
    assert ls.masses[0] == 1.0
    assert np.all(ls.masses[1:] == 0.0)


def test_level_sets_nested_masks():
    g = make_grid(2**12)
    ls = level_sets(half(), g, 9)
    for k in range(1, 10):
        assert np.all(ls.mask(k) <= ls.mask(k - 1))
    assert np.all(np.diff(ls.masses) <= 0)


def test_level_sets_half_closed_form():
    # oracle: solve 1 - cos(t/2) = 2^-k, so c_k = 2 arccos(1 - 2^-k) / pi
    g = make_grid(2**16)
    ls = level_sets(half(), g, 13)
    for k in range(6, 13):
        oracle = 2 * np.arccos(1 - 2.0**-k) / (2 * np.pi) * 2
        assert abs(ls.masses[k] / oracle - 1.0) < 0.1


def test_level_sets_resolution_guard():
    g = make_grid(256)
    with pytest.raises(GridError):
        level_sets(half(), g, 7)


def test_level_sets_custom_thresholds():
    g = make_grid(2**12)
    thresholds = np.concatenate([[1.0], 4.0 ** (-np.arange(1, 7) / 3.0)])
    ls = level_sets(half(), g, thresholds=thresholds)
    assert ls.k_max == 6
    assert np.all(np.diff(ls.masses) <= 0)


# ---------------------------------------------------------------- parsing

def test_parse_symbol_roundtrip():
    assert parse_symbol("half").kind == "half"
    assert parse_symbol("lens:0.5").params == (0.5,)
    assert parse_symbol("betaexp:2.0").params == (2.0,)
    assert parse_symbol("extreme").kind == "extreme"
    assert parse_symbol("hsx").kind == "hsx"
    with pytest.raises(ValueError):
        parse_symbol("moebius:0.1")


def test_parse_symbol_outer_file(tmp_path):
    g = make_grid(64)
    u = 0.4 + 0.1 * np.sin(g.angles)
    path = tmp_path / "mod.csv"
    np.savetxt(path, np.column_stack([g.angles, u]), delimiter=",")
    phi = parse_symbol(f"outer:{path}")
    assert np.allclose(phi.modulus(g).values, u, atol=1e-12)
