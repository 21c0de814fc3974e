import math

import pytest
from hypothesis import given, strategies as st

from planar_rg.domains import ComplexDomain, DomainError, contains

finite = st.floats(-2, 2, allow_nan=False)


def test_watson_excludes_negative_axis():
    w = ComplexDomain.watson(0.1, math.pi / 4)
    assert contains(w, 0.05)
    assert not contains(w, -0.05)
    assert contains(w, 0)


def test_cauchy_disk_excludes_origin():
    assert not contains(ComplexDomain.cauchy_disk(0.2), 0)


@pytest.mark.parametrize("delta", [0, -1.0])
def test_nonpositive_radius_rejected(delta):
    with pytest.raises(DomainError):
        ComplexDomain.ball(delta)


def test_bad_aperture_rejected():
    with pytest.raises(DomainError):
        ComplexDomain.watson(0.1, 2.0)


@given(finite, finite, st.floats(0.1, 2))
def test_cauchy_disk_is_a_euclidean_disk(x, y, delta):
    z = complex(x, y)
    d = abs(z - delta / 2) - delta / 2
    if abs(d) < 1e-9 or z == 0:
        return
    assert contains(ComplexDomain.cauchy_disk(delta), z) == (d < 0)


@given(finite, finite, st.floats(0.1, 2))
def test_cauchy_disk_inside_ball_and_watson(x, y, delta):
    z = complex(x, y)
    # the disk touches the imaginary axis at 0, where the sector test is a tie
    if abs(z) > 1e-9 and contains(ComplexDomain.cauchy_disk(delta), z):
        assert contains(ComplexDomain.ball(delta), z)
        assert contains(ComplexDomain.watson(delta, math.pi / 2), z)


@given(finite, finite, st.floats(0.1, 1.5), st.floats(0.1, 1.5))
def test_watson_monotone_in_aperture(x, y, t1, t2):
    z = complex(x, y)
    small, large = sorted((t1, t2))
    if contains(ComplexDomain.watson(1.0, large), z):
        assert contains(ComplexDomain.watson(1.0, small), z)


def test_dict_round_trip():
    w = ComplexDomain.watson(0.3, 1.0)
    assert ComplexDomain.from_dict(w.to_dict()) == w
