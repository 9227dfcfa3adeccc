import numpy as np
import pytest

from multivax import Mesh, Threshold, VaccineSchedule, Zero, deaths, doses, make_preset, preset_model, r0, run
from multivax.observables import UnsupportedModel, burst_starts, local_maxima


def test_r0_at_datum():
    spec, s = make_preset("single_vaccine")
    assert r0(spec, s) == pytest.approx(0.095 / 0.042)
    assert r0(spec, spec.initial_state([0.0], [5.0], 0.05)) == 0.0


def test_r0_needs_one_class():
    spec, s = make_preset("two_classes")
    with pytest.raises(UnsupportedModel):
        r0(spec, s)


def test_sign_matches_growth(runs):
    ts = runs("single_vaccine", Zero())
    assert np.all(np.sign(ts.dIdt[:, 0]) == np.sign(ts.r0 - 1.0))


def test_deaths_and_doses_reference(runs):
    ts = runs("single_vaccine", Zero())
    d, gap = deaths(ts, 0.0, 730.0)
    assert d == pytest.approx(15.1, rel=0.1)
    assert abs(gap) < 1e-6 * 100
    assert doses(ts, 0.0, 730.0)[1] == 0.0


def test_deaths_and_doses_full_campaign(runs):
    ts = runs("single_vaccine", Threshold(0.0))
    assert deaths(ts, 0.0, 730.0)[0] == pytest.approx(3.59, rel=0.1)
    assert doses(ts, 0.0, 730.0)[1] == pytest.approx(326, rel=0.1)


def test_vaccine_two_only_uses_no_vaccine_one(runs):
    ts = runs("two_vaccines", VaccineSchedule(((1, 30.0, 730.0),)))
    per, _ = doses(ts, 0.0, 730.0)
    assert per[0] == 0.0 and per[1] > 0


def test_no_mortality_no_deaths():
    spec = preset_model("sir5", mu=0.0)
    ts = run(spec, spec.initial_state([95.0], [5.0], 0.5), Zero(), Mesh(dt=0.5, horizon_T=50.0))
    assert deaths(ts, 0.0, 50.0)[0] == 0.0


def test_window_must_be_on_grid(runs):
    ts = runs("single_vaccine", Zero())
    with pytest.raises(ValueError):
        deaths(ts, 10.0, 5.0)
    with pytest.raises(ValueError):
        deaths(ts, 0.0, 800.0)


def test_local_maxima_ignores_ripples():
    t = np.linspace(0, 10, 1001)
    y = np.sin(t) + 1e-9 * np.sin(400 * t)
    peaks = local_maxima(t, y)
    assert len(peaks) == 2
    assert peaks == pytest.approx([np.pi / 2, 5 * np.pi / 2], abs=0.02)


def test_burst_starts():
    t = np.arange(0.0, 11.0)
    cum = np.cumsum([0, 1, 1, 0, 0, 0, 1, 1, 1, 0, 0.0])
    assert list(burst_starts(t, cum)) == [0.0, 5.0]
