import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from multivax import (
    AgeClassFirst,
    AgeFeedback,
    AgeHalfHalf,
    R0Feedback,
    SplitSchedule,
    Threshold,
    VaccineSchedule,
    Zero,
    make_preset,
)
from multivax.strategies import dose_request


def _single(S=95.0, I=5.0, preset="single_vaccine"):
    spec, s = make_preset(preset)
    s.classes[0].S, s.classes[0].I = S, I
    return s


def test_threshold_waits_for_campaign():
    assert dose_request(Threshold(10.0), 10.0, _single(), 2.0)[0, 0] == 0.0


def test_threshold_stops_below_level():
    assert dose_request(Threshold(10.0), 50.0, _single(S=5.0), 2.0)[0, 0] == 0.0
    assert dose_request(Threshold(10.0), 50.0, _single(S=50.0), 2.0)[0, 0] == 1.0


def test_r0_feedback():
    assert dose_request(R0Feedback(4.0, 1.0), 50.0, _single(S=20.0), 1.2)[0, 0] == 4.0
    assert dose_request(R0Feedback(4.0, 1.0), 50.0, _single(S=20.0), 0.9)[0, 0] == 0.0
    with pytest.raises(ValueError):
        dose_request(R0Feedback(4.0, 1.0), 50.0, _single(), None)


def test_age_feedback_follows_infected():
    _, s = make_preset("two_classes")
    assert dose_request(AgeFeedback(), 50.0, s, None)[:, 0] == pytest.approx([0.2, 0.8])


def test_age_feedback_without_infected():
    _, s = make_preset("two_classes")
    for c in s.classes:
        c.I = 0.0
    assert not dose_request(AgeFeedback(), 50.0, s, None).any()


def test_class_first_switches():
    _, s = make_preset("two_classes")
    before = dose_request(AgeClassFirst(1), 100.0, s, None)[:, 0]
    after = dose_request(AgeClassFirst(1), 400.0, s, None)[:, 0]
    assert list(before) == [0.0, 1.0] and list(after) == [1.0, 0.0]
    assert list(dose_request(AgeHalfHalf(), 100.0, s, None)[:, 0]) == [0.5, 0.5]


def test_schedules():
    s = _single(preset="two_vaccines")
    sched = VaccineSchedule(((0, 30.0, 380.0), (1, 380.0, 730.0)))
    assert list(dose_request(sched, 379.99, s, 1.0)[0]) == [1.0, 0.0]
    assert list(dose_request(sched, 380.0, s, 1.0)[0]) == [0.0, 1.0]
    assert list(dose_request(SplitSchedule(), 100.0, s, 1.0)[0]) == [0.5, 0.5]
    assert not dose_request(Zero(), 100.0, s, 1.0).any()


@given(
    t=st.floats(0, 730),
    S=st.floats(0, 100),
    I=st.floats(0, 100),
    r0=st.floats(0, 5),
    strategy=st.sampled_from(
        [Threshold(10.0), R0Feedback(2.0, 0.5), SplitSchedule(), VaccineSchedule(((1, 0.0, 730.0),))]
    ),
)
def test_requests_nonnegative_and_bounded(t, S, I, r0, strategy):
    s = _single(S, I, "two_vaccines")
    req = dose_request(strategy, t, s, r0)
    assert np.all(req >= 0) and req.sum() <= strategy.rate_cap() + 1e-12
    if S == 0:
        assert not req.any()
