import numpy as np
import pytest

from multivax import Mesh, make_preset
from multivax.integrator import advect
from multivax.state import DelayLine, cell_count, line_mass, total_population


def test_initial_totals():
    _, s = make_preset("single_vaccine")
    assert total_population(s) == pytest.approx(100.0, rel=1e-12)
    _, s2 = make_preset("two_classes")
    assert total_population(s2) == pytest.approx(100.0, rel=1e-12)


def test_empty_state_total_is_zero():
    spec, _ = make_preset("single_vaccine")
    assert total_population(spec.initial_state([0.0], [0.0], 0.05)) == 0.0


def test_line_mass_constant_density():
    line = DelayLine.empty(180.0, 0.05)
    assert line_mass(line) == 0.0
    line.density[:] = 0.3
    assert abs(line_mass(line) - 0.3 * 180.0) <= 0.3 * 0.05 + 1e-12


def test_line_mass_counts_boundary_inflow():
    dt, p, n = 0.1, 2.0, 50
    line = DelayLine.empty(30.0, dt)
    for _ in range(n):
        line, _ = advect(line, dt)
        line.density[0] = p
    assert line_mass(line) == pytest.approx(p * n * dt, rel=1e-12)


def test_unbounded_line_has_tail():
    line = DelayLine.empty(float("inf"), 0.5, ramp_end=10.0)
    assert line.unbounded
    assert line.n_cells == cell_count(10.0, 0.5) + 1
    line.lumped_tail = 3.0
    assert line_mass(line) == 3.0


def test_mesh_validation():
    with pytest.raises(ValueError):
        Mesh(dt=0.0)
    with pytest.raises(ValueError):
        Mesh(dt=0.05, stride=0.07)
    with pytest.raises(ValueError):
        Mesh(horizon_T=-1.0)
    assert Mesh().n_steps == 14600
    with pytest.raises(ValueError):
        Mesh(dt=2.0).check_line_horizon(1.0)


def test_copy_is_deep():
    _, s = make_preset("single_vaccine")
    c = s.copy()
    c.classes[0].vaccine_lines[0].density[0] = 7.0
    c.classes[0].S = 0.0
    assert s.classes[0].vaccine_lines[0].density[0] == 0.0
    assert s.classes[0].S == 95.0
    assert np.all(s.classes[0].recovered_line.density == 0.0)
