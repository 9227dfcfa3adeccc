import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from multivax import Mesh, NumericalFailure, R0Feedback, Threshold, Zero, make_preset, preset_model, run, step
from multivax.integrator import advect
from multivax.state import DelayLine, total_population
from multivax.strategies import AgeFeedback, SplitSchedule, VaccineSchedule


def test_advect_zero_line():
    line, expiry = advect(DelayLine.empty(10.0, 0.5), 0.5)
    assert expiry == 0.0 and not line.density.any()


def test_advect_releases_last_cell():
    line = DelayLine.empty(10.0, 0.5)
    line.density[-1] = 1.0 / 0.5  # unit mass
    out, expiry = advect(line, 0.5)
    assert expiry == pytest.approx(1.0)
    assert not out.density.any()


def test_advect_moves_one_cell():
    line = DelayLine.empty(10.0, 0.5)
    line.density[3] = 2.0
    out, _ = advect(line, 0.5)
    assert out.density[4] == 2.0 and out.density.sum() == 2.0
    assert line.density[3] == 2.0  # input untouched


def test_advect_mesh_mismatch():
    with pytest.raises(ValueError):
        advect(DelayLine.empty(10.0, 0.5), 0.25)


def test_one_step_from_initial_datum():
    spec, s = make_preset("single_vaccine")
    s1 = step(spec, s, Zero(), 0.05)
    assert s1.classes[0].I == pytest.approx(5 + 0.265 * 0.05, rel=1e-12)
    assert s1.classes[0].S == pytest.approx(95 - 0.475 * 0.05, rel=1e-12)
    assert s1.t == pytest.approx(0.05)
    assert s.classes[0].I == 5.0


def test_corrector_empties_susceptibles():
    spec, s = make_preset("single_vaccine")
    s.classes[0].S = 0.01
    s.t = 40.0
    s1 = step(spec, s, Threshold(0.0), 0.05)
    c = s1.classes[0]
    infected = 1e-3 * 5 * 0.01 * 0.05
    assert c.S == 0.0
    # lines are empty, so nothing expires back into S
    assert c.cum_doses[0] == pytest.approx(0.01 - infected, rel=1e-12)
    assert c.vaccine_lines[0].density[0] * 0.05 == pytest.approx(c.cum_doses[0])


def test_no_mortality_conserves_everything():
    spec = preset_model("single_vaccine", mu=0.0)
    init = spec.initial_state([95.0], [5.0], 0.25)
    ts = run(spec, init, Threshold(10.0), Mesh(dt=0.25, horizon_T=200.0))
    assert ts.total_deaths == 0.0
    assert np.allclose(ts.living.sum(axis=1), 100.0, rtol=1e-12)


def test_reference_and_two_class_deaths(runs):
    ref = runs("single_vaccine", Zero())
    assert ref.total_deaths == pytest.approx(15.1, rel=0.1)
    tc = runs("two_classes", Zero())
    assert tc.cum_deaths[-1] == pytest.approx([1.67, 11.5], rel=0.1)
    assert tc.total_deaths == pytest.approx(13.2, rel=0.1)


def test_series_layout(runs):
    ts = runs("single_vaccine", Zero())
    assert ts.n == 731
    assert ts.t[0] == 0.0 and ts.t[-1] == 730.0
    assert np.all(np.diff(ts.t) > 0)


def test_non_finite_rates_fail_loudly():
    spec = preset_model("single_vaccine")
    s = spec.initial_state([95.0], [5.0], 0.05)
    s.classes[0].I = float("nan")
    with pytest.raises(NumericalFailure):
        step(spec, s, Zero(), 0.05)


def test_oversized_step_fails():
    spec = preset_model("single_vaccine", theta=3.0)
    with pytest.raises(NumericalFailure):
        run(spec, spec.initial_state([95.0], [5.0], 1.0), Zero(), Mesh(dt=1.0, horizon_T=10.0))


def test_initial_mesh_mismatch():
    spec, init = make_preset("single_vaccine", dt=0.05)
    with pytest.raises(ValueError):
        run(spec, init, Zero(), Mesh(dt=0.1))


STRATEGIES = st.one_of(
    st.builds(Threshold, st.floats(0, 100), t_on=st.floats(0, 20), rate=st.floats(0, 20)),
    st.builds(R0Feedback, st.floats(0, 20), st.floats(0, 3), t_on=st.floats(0, 20)),
    st.builds(SplitSchedule, st.floats(0, 20), t_on=st.floats(0, 20)),
    st.builds(lambda r: VaccineSchedule(((0, 5.0, 30.0), (1, 30.0, 60.0)), r), st.floats(0, 20)),
)


@given(strategy=STRATEGIES, I0=st.floats(0.0, 50.0))
def test_conservation_and_nonnegativity(strategy, I0):
    preset = "two_vaccines" if isinstance(strategy, (SplitSchedule, VaccineSchedule)) else "single_vaccine"
    spec = preset_model(preset)
    init = spec.initial_state([100.0 - I0], [I0], 0.5)
    ts = run(spec, init, strategy, Mesh(dt=0.5, horizon_T=60.0))
    lost = ts.living[0].sum() - ts.living[-1].sum()
    assert abs(lost - ts.total_deaths) < 1e-9 * 100
    assert ts.clamped_deficit[-1] < 1e-8 * 100
    assert np.all(ts.S >= 0) and np.all(ts.I >= 0) and np.all(ts.cum_doses >= 0)


def test_two_class_conservation_with_feedback():
    spec, init = make_preset("two_classes", dt=0.5)
    ts = run(spec, init, AgeFeedback(rate=5.0), Mesh(dt=0.5, horizon_T=300.0))
    assert abs(total_population(init) - ts.living[-1].sum() - ts.total_deaths) < 1e-9


def test_halving_the_mesh_barely_moves_deaths(runs):
    coarse = runs("single_vaccine", Zero())
    fine = runs("single_vaccine", Zero(), dt=0.025)
    assert abs(fine.total_deaths - coarse.total_deaths) < 0.02 * coarse.total_deaths
