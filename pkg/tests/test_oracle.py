import math

import pytest
from scipy import integrate

from multivax.oracle import (
    PinnedR0,
    deaths_closed_form,
    lemma_uuu,
    pinned_regime_check,
    stabilized_I,
    stabilized_R,
    uuu_convergence,
)


def test_lemma_constant_rate():
    c = 0.3
    for t in (1.0, 5.0):
        assert lemma_uuu(2.0, lambda s: c, t, 1.0) == pytest.approx(2.0 * c * math.exp(c))


def test_lemma_zero_alpha_and_linear_rate():
    assert lemma_uuu(0.0, lambda s: s, 2.0, 1.0) == 0.0
    assert lemma_uuu(1.5, lambda s: s, 2.0, 1.0) == pytest.approx(1.5 * math.exp(1.5))
    with pytest.raises(ValueError):
        lemma_uuu(1.0, lambda s: s, 1.0, 2.0)


def test_stabilized_I():
    assert stabilized_I(5.0, 1.0, 0.04, 0.002, 300.0, 100.0) == 5.0
    assert stabilized_I(5.0, 0.7, 0.04, 0.002, 100.0, 100.0) == 5.0
    assert stabilized_I(5.0, 0.5, 0.04, 0.002, 200.0, 100.0) == pytest.approx(5 * math.exp(-2.1))


def test_stabilized_R():
    th, rr, Ist = 0.04, 2e-5, 3.0
    assert stabilized_R(th, rr, lambda s: Ist, 400.0, 50.0) == pytest.approx(th * Ist * math.exp(-rr * Ist * 50.0))
    path = lambda s: stabilized_I(Ist, 0.8, th, 0.002, s, 0.0)
    assert stabilized_R(th, rr, path, 100.0, 0.0) == pytest.approx(th * path(100.0))
    want = th * path(40.0) * math.exp(-rr * integrate.quad(path, 40.0, 100.0)[0])
    assert stabilized_R(th, rr, path, 100.0, 60.0) == pytest.approx(want, rel=1e-10)


def test_deaths_closed_form():
    assert deaths_closed_form(5.0, 0.5, 0.04, 0.002, 100.0, 100.0) == 0.0
    assert deaths_closed_form(5.0, 1.0, 0.04, 0.002, 100.0, 300.0) == pytest.approx(0.002 * 5 * 200)
    near = deaths_closed_form(5.0, 1.0 - 1e-9, 0.04, 0.002, 100.0, 300.0)
    assert near == pytest.approx(0.002 * 5 * 200, rel=1e-6)
    quad = 0.002 * integrate.quad(lambda t: stabilized_I(5.0, 0.5, 0.04, 0.002, t, 100.0), 100.0, 300.0)[0]
    assert deaths_closed_form(5.0, 0.5, 0.04, 0.002, 100.0, 300.0) == pytest.approx(quad, rel=1e-10)


def test_manufactured_line_converges_first_order():
    study = uuu_convergence((0.2, 0.1, 0.05))
    assert abs(study.order - 1.0) <= 0.2
    assert study.errors[0] > study.errors[1] > study.errors[2]


def test_pinned_controller_is_quiet_below_target():
    from multivax import make_preset

    spec, s = make_preset("single_vaccine")
    ctl = PinnedR0(1.0, t_on=0.0)
    assert not ctl.request(10.0, s, 0.9, spec, 0.05).any()
    assert ctl.request(10.0, s, 1.5, spec, 0.05)[0, 0] > 0


def test_pinned_regime_matches_closed_form():
    chk = pinned_regime_check(r_star=0.95)
    assert chk.I_rel_err < 0.03
    assert chk.deaths_rel_err < 0.03
