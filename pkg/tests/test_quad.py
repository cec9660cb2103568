import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from circquad.errors import DerivativeUnavailable, DomainError
from circquad.interp import HermiteData, hermite_fundamentals, lagrange_fundamentals
from circquad.laurent import LaurentPoly
from circquad.measure import RogersSzego, moment
from circquad.paraorth import TWO_PI, configure
from circquad.quad import (cmv_weights_closed, exp_series_integral, get_integrand, integrate_laurent,
                           interpolatory_rule, interpolatory_weights_uniform, mixed_rule,
                           pole_series_integral, reference_integral, rule_on_mimic_nodes, step_integral,
                           step_theta, uniform_rule, uniform_window)
from circquad.regress import build_mixed

from strategies import circle_points, qs

PI = math.pi


def test_integrate_laurent_uses_moments():
    mu = RogersSzego(0.5)
    assert integrate_laurent(mu, LaurentPoly(-1, [2, 0, 3])) == pytest.approx(5 * 0.5 ** 0.5)
    assert integrate_laurent(mu, LaurentPoly(0, [0])) == 0


def test_table2_first_weights():
    w = uniform_rule(RogersSzego(0.8), 12, 0.0).weights
    assert abs(w[0] - 0.439838082705365) < 1e-12
    w = uniform_rule(RogersSzego(0.5), 10, PI / 3).weights
    assert abs(w[0] - (0.136489850028398 - 0.000014950498919j)) < 1e-12


def test_formula_rejects_bad_split():
    with pytest.raises(DomainError):
        interpolatory_weights_uniform(RogersSzego(0.5), 10, 3, 3, 0.0)


@given(qs, st.integers(1, 30), st.floats(0, TWO_PI), st.sampled_from([1, -1]))
def test_closed_form_matches_formula(q, N, th, eps):
    mu = RogersSzego(q)
    a, b = uniform_window(N, eps)
    w1 = interpolatory_weights_uniform(mu, N, -a, b, th)
    w2 = cmv_weights_closed(mu, N, th, eps)
    assert np.max(np.abs(w1 - w2)) < 1e-12
    assert abs(np.sum(w1) - 1) < 1e-10


@given(qs, st.integers(1, 15).map(lambda k: 2 * k + 1), st.floats(0, TWO_PI))
def test_odd_N_weights_real(q, N, th):
    assert np.max(np.abs(cmv_weights_closed(RogersSzego(q), N, th).imag)) < 1e-14


@given(qs, st.integers(1, 15).map(lambda k: 2 * k), st.floats(0, TWO_PI))
def test_even_N_constant_imaginary_part(q, N, th):
    im = cmv_weights_closed(RogersSzego(q), N, th).imag
    assert np.allclose(np.abs(im), np.abs(im[0]), atol=1e-14)
    assert np.allclose(im[::2], -im[1::2], atol=1e-14)


@pytest.mark.parametrize("th", [0.0, PI])
def test_even_N_real_at_zero_and_pi(th):
    assert np.max(np.abs(cmv_weights_closed(RogersSzego(0.6), 10, th).imag)) < 1e-14


@given(circle_points(max_size=9, min_gap=0.3), qs)
def test_interpolatory_rule_exact_on_window(z, q):
    mu = RogersSzego(q)
    rule = interpolatory_rule(mu, z)
    a, b = rule.window
    for k in range(a, b + 1):
        assert abs(rule.apply(z ** k) - moment(mu, -k)) < 1e-9


@given(circle_points(max_size=8, min_gap=0.3), qs)
def test_weights_are_integrated_fundamentals(z, q):
    mu = RogersSzego(q)
    rule = interpolatory_rule(mu, z)
    w = [integrate_laurent(mu, f) for (f,) in lagrange_fundamentals(z).L]
    assert np.allclose(rule.weights, w, atol=1e-9)


def test_table3_case2_weight_set():
    cfg = configure(RogersSzego(0.9), 9, -PI / 6, 4)
    w = rule_on_mimic_nodes(RogersSzego(0.9), cfg).weights
    assert np.min(np.abs(w - (0.018604143064766 - 0.013341862967978j))) < 1e-12


def test_mixed_rule_equals_integrated_approximant():
    mu = RogersSzego(0.7)
    cfg = configure(mu, 14, 0.0, 6)
    F = get_integrand("exp")
    v = F.sample(cfg)
    L = build_mixed(v, cfg, r=10)
    rule = mixed_rule(mu, L, lagrange_fundamentals(cfg.selected_z))
    assert abs(rule.apply(v[list(cfg.selected_index)]) - L.integrate(mu)) < 1e-12


def test_mixed_rule_with_derivatives():
    mu = RogersSzego(0.5)
    cfg = configure(mu, 20, 0.0, 8)
    F = get_integrand("exp_half")
    nu = [2, 1, 1, 2, 1, 1, 1, 1]
    hd = HermiteData.from_function(cfg.selected_z, nu, F.jet, 5)
    v = F.sample(cfg)
    L = build_mixed(v, cfg, r=13, hermite=hd)
    rule = mixed_rule(mu, L, hermite_fundamentals(cfg.selected_z, nu, 5))
    ders = [[F.jet(z, l) for l in range(1, n)] for z, n in zip(cfg.selected_z, nu)]
    assert abs(rule.apply(v[list(cfg.selected_index)], ders) - L.integrate(mu)) < 1e-12
    with pytest.raises(DerivativeUnavailable):
        rule.apply(v[list(cfg.selected_index)])


@pytest.mark.parametrize("q", [0.01, 0.25, 0.5, 0.8, 0.95])
def test_reference_exp_against_series(q):
    mu = RogersSzego(q)
    ref = reference_integral(mu, get_integrand("exp"))
    assert abs(ref - exp_series_integral(q)) < 1e-12
    for method in ("trapezoid", "hermite"):
        if method == "hermite" and q < 0.3:
            continue  # the unwrapped Gaussian is too wide for a modest node count
        assert abs(reference_integral(mu, get_integrand("exp"), method=method) - ref) < 1e-12


def test_exp_series_mpmath():
    mp.mp.dps = 30
    q = mp.mpf("0.7")
    exact = mp.nsum(lambda k: q ** (k * k / 2) / mp.factorial(k), [0, mp.inf])
    assert abs(exp_series_integral(0.7) - float(exact)) < 1e-15


@pytest.mark.parametrize("q", [0.01, 0.2, 0.5, 0.9])
@pytest.mark.parametrize("name,alpha", [("pole_far", (1 + 1j) / 5), ("pole_near", 0.8 + 0.5j)])
def test_reference_pole_against_series(q, name, alpha):
    ref = reference_integral(RogersSzego(q), get_integrand(name))
    assert abs(ref - pole_series_integral(q, alpha, terms=2000)) < 1e-11


@pytest.mark.parametrize("q", [0.01, 0.05, 0.5, 0.8, 0.9])
def test_reference_step_against_closed_form(q):
    ref = reference_integral(RogersSzego(q), get_integrand("step"))
    assert abs(ref - step_integral(q)) < 1e-10


def test_step_function_values():
    assert step_theta(PI / 4) == 10 and step_theta(PI) == -10
    assert step_theta(PI / 2) == 0 and step_theta(2 * PI) == 10 and step_theta(-PI / 4) == -10
    # angles generated as theta0 + 2 pi j / N land on the jump up to roundoff
    assert step_theta(PI / 3 + TWO_PI * 1 / 12) == 0
    assert step_theta(np.array([0.0 + TWO_PI * 6 / 6])) == 10


def test_integrand_derivatives():
    e = get_integrand("exp")
    assert e.jet(0.3, 4) == pytest.approx(np.exp(0.3))
    p = get_integrand("pole_far")
    z, a = 0.5j, (1 + 1j) / 5
    assert p.jet(z, 1) == pytest.approx(-1 / (z - a) ** 2)
    with pytest.raises(DerivativeUnavailable):
        get_integrand("step").jet(1.0, 1)
    with pytest.raises(DomainError):
        get_integrand("sin")


@given(qs, st.integers(2, 24), st.floats(0, TWO_PI))
def test_rules_integrate_one(q, N, th):
    mu = RogersSzego(q)
    cfg = configure(mu, N, th)
    one = get_integrand("one").sample(cfg)
    assert abs(uniform_rule(mu, N, th).apply(one) - 1) < 1e-12
    assert abs(rule_on_mimic_nodes(mu, cfg).apply(one[list(cfg.selected_index)]) - 1) < 1e-12
    if N - cfg.m >= 1:
        assert abs(build_mixed(one, cfg, r=N).integrate(mu) - 1) < 1e-12


def test_rule_csv():
    text = uniform_rule(RogersSzego(0.5), 4, 0.0).to_csv()
    assert text.splitlines()[0] == "theta,weight_re,weight_im" and len(text.splitlines()) == 5
