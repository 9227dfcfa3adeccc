import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from multivax import make_preset, preset_model
from multivax.models import assemble_rhs, infection_pressure, pressure_matrix


def test_pressure_single_class():
    spec, s = make_preset("single_vaccine")
    assert infection_pressure(spec, s) == pytest.approx([0.475])


def test_pressure_two_classes():
    spec, s = make_preset("two_classes")
    assert infection_pressure(spec, s)[0] == pytest.approx((3e-3 * 1 + 1e-3 * 4) * 42)


def test_zero_infected_zero_pressure():
    spec, _ = make_preset("two_classes")
    s = spec.initial_state([42.0, 53.0], [0.0, 0.0], 0.05)
    assert np.all(infection_pressure(spec, s) == 0.0)


def test_rhs_at_initial_datum():
    spec, s = make_preset("single_vaccine")
    d = assemble_rhs(spec, s, np.zeros((1, 1)))
    assert d.dI[0] == pytest.approx(0.475 - 0.042 * 5)
    assert d.dS[0] == pytest.approx(-0.475)


def test_rhs_all_zero_state():
    spec, _ = make_preset("single_vaccine")
    s = spec.initial_state([0.0], [0.0], 0.05)
    d = assemble_rhs(spec, s, np.zeros((1, 1)))
    assert d.dS[0] == 0.0 and d.dI[0] == 0.0
    assert d.living_rate(0.05) == 0.0


def test_preset_parameters():
    spec, s = make_preset("single_vaccine")
    assert (s.classes[0].S, s.classes[0].I) == (95.0, 5.0)
    assert spec.vaccine_profiles[0][0][0].horizon == 180.0
    assert spec.recovered_profiles[0][0].horizon == 180.0
    tv = preset_model("two_vaccines")
    assert [row[0].horizon for row in tv.vaccine_profiles[0]] == [300.0, 120.0]
    tc = preset_model("two_classes")
    assert tc.theta[0] == pytest.approx(6.0e-2)
    assert tc.mu[1] == pytest.approx(2.0e-3)
    assert [tc.vaccine_profiles[a][0][0].horizon for a in range(2)] == [200.0, 160.0]
    assert preset_model("sir4").k == 0 and preset_model("sir5").k == 0
    with pytest.raises(KeyError):
        preset_model("nope")


def test_r0_initial_value():
    spec, s = make_preset("single_vaccine")
    N = pressure_matrix(spec, s)
    assert N[0, 0] / 0.042 == pytest.approx(0.095 / 0.042)


@given(
    S=st.floats(0.0, 100.0),
    I=st.floats(0.0, 50.0),
    fill=st.floats(0.0, 1.0),
    doses=st.floats(0.0, 5.0),
    preset=st.sampled_from(["single_vaccine", "two_vaccines", "infinite_TV", "infinite_TR", "sir4"]),
)
def test_structural_conservation(S, I, fill, doses, preset):
    spec, s = make_preset(preset, dt=0.5)
    c = s.classes[0]
    c.S, c.I = S, I
    for line in c.vaccine_lines + [c.recovered_line]:
        line.density[:] = fill
        if line.unbounded:
            line.lumped_tail = 10 * fill
    d = assemble_rhs(spec, s, np.full((1, spec.k), doses))
    assert d.living_rate(0.5) == pytest.approx(-spec.mu[0] * I, rel=1e-9, abs=1e-9)
