import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from farfield.acoustics.core import (
    MIN_VOLUME,
    Position,
    RoomSpec,
    T60Band,
    absorption_for_t60,
    eyring_t60,
    sabine_absorption_for_t60,
    sabine_t60,
    t60_band_from_volume,
    t60_from_volume,
)
from farfield.acoustics.reference import ROOM_TYPE_T60, reference_table
from farfield.exceptions import AcousticsDomainError, GeometryError

volumes = st.floats(min_value=MIN_VOLUME * 1.001, max_value=1e6, allow_nan=False)


@pytest.mark.parametrize("volume, expected", [(200, 0.603), (1000, 0.837), (10000, 1.171)])
def test_t60_from_volume_matches_conference_rooms(volume, expected):
    assert abs(t60_from_volume(volume) - expected) < 0.01


def test_law_reproduces_reference_conference_row():
    for volume, t60 in ROOM_TYPE_T60["conference_room"]:
        assert abs(t60_from_volume(volume) - t60) <= 0.01


@pytest.mark.parametrize("volume", [0.0, -5.0, 3.0, MIN_VOLUME])
def test_t60_from_volume_rejects_small_volumes(volume):
    with pytest.raises(AcousticsDomainError, match="3.1"):
        t60_from_volume(volume)


def test_band_around_volume_law():
    band = t60_band_from_volume(1000)
    assert band.center_s == pytest.approx(0.837, abs=1e-3)
    assert band.low_s == pytest.approx(0.669, abs=1e-3)
    assert band.high_s == pytest.approx(1.004, abs=1e-3)


def test_band_is_unit_at_t60_one_second():
    band = t60_band_from_volume(math.exp(1.165 / 0.145))
    assert band.low_s == pytest.approx(0.8)
    assert band.high_s == pytest.approx(1.2)


def test_band_near_domain_boundary_is_tiny():
    band = t60_band_from_volume(3.13)
    assert 0 < band.low_s <= band.high_s < 0.01


@given(volumes, volumes)
def test_volume_law_is_increasing(v1, v2):
    if v1 < v2:
        assert t60_from_volume(v1) < t60_from_volume(v2)


@given(volumes)
def test_band_contains_center(volume):
    band = t60_band_from_volume(volume)
    assert band.contains(t60_from_volume(volume))
    assert 0 < band.low_s <= band.center_s <= band.high_s


def test_t60_band_around_scales_center():
    band = T60Band.around(0.5, 0.1)
    assert (band.low_s, band.high_s) == pytest.approx((0.45, 0.55))


def test_absorption_eyring_example():
    # 5 x 5 x 4 m: V = 100 m^3, S = 130 m^2
    alpha = absorption_for_t60((5.0, 5.0, 4.0), 0.5)
    assert alpha == pytest.approx(1 - math.exp(-0.2477), abs=1e-4)
    assert alpha == pytest.approx(0.2194, abs=1e-4)


def test_absorption_long_t60_goes_to_zero():
    assert 0 < absorption_for_t60((5.0, 5.0, 4.0), 1e6) < 1e-6


def test_absorption_stays_below_one_where_sabine_does_not():
    dims = (40.0, 40.0, 20.0)
    assert sabine_absorption_for_t60(dims, 0.1) > 1
    assert 0 < absorption_for_t60(dims, 0.1) < 1


@pytest.mark.parametrize("t60", [0.0, -0.3, float("nan")])
def test_absorption_rejects_non_positive_t60(t60):
    with pytest.raises(AcousticsDomainError):
        absorption_for_t60((5.0, 5.0, 4.0), t60)


@given(st.floats(0.05, 5.0), st.floats(0.05, 5.0))
def test_absorption_decreases_with_t60(t1, t2):
    dims = (7.0, 5.0, 3.0)
    a1, a2 = absorption_for_t60(dims, t1), absorption_for_t60(dims, t2)
    assert 0 < a1 < 1 and 0 < a2 < 1
    if t1 < t2:
        assert a1 >= a2


@given(st.floats(1.0, 30.0))
def test_eyring_and_sabine_agree_for_small_absorption(t60):
    dims = (6.0, 5.0, 3.0)
    sabine = sabine_absorption_for_t60(dims, t60)
    if sabine < 0.1:
        assert abs(absorption_for_t60(dims, t60) - sabine) / sabine < 0.05


def test_forward_predictions_invert_absorption():
    dims = (8.0, 6.0, 3.0)
    room = RoomSpec.uniform(dims, absorption_for_t60(dims, 0.7))
    assert eyring_t60(room) == pytest.approx(0.7, rel=1e-9)
    assert sabine_t60(room) > eyring_t60(room)


def test_room_spec_geometry():
    room = RoomSpec.uniform((10.0, 10.0, 5.0), 0.3)
    assert room.volume() == 500.0
    assert room.surface_area() == 2 * (100 + 50 + 50)
    assert room.wall_areas().sum() == pytest.approx(room.surface_area())
    assert room.mean_absorption() == pytest.approx(0.3)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"length_m": 0.0, "width_m": 3.0, "height_m": 3.0},
        {"length_m": 3.0, "width_m": 3.0, "height_m": 3.0, "absorption": (0.0,) * 6},
        {"length_m": 3.0, "width_m": 3.0, "height_m": 3.0, "absorption": (0.5,) * 5},
        {"length_m": 3.0, "width_m": 3.0, "height_m": 3.0, "absorption": (1.2,) * 6},
    ],
)
def test_room_spec_validation(kwargs):
    with pytest.raises(GeometryError):
        RoomSpec(**kwargs)


def test_position_margin_validation():
    room = RoomSpec.uniform((4.0, 4.0, 3.0), 0.5)
    Position(0.3, 2.0, 1.5).validate_in(room)
    with pytest.raises(GeometryError, match="x="):
        Position(0.2, 2.0, 1.5).validate_in(room)
    with pytest.raises(GeometryError, match="z="):
        Position(2.0, 2.0, 2.9).validate_in(room)
    assert Position(0, 0, 0).distance_to(Position(3, 4, 0)) == pytest.approx(5.0)


def test_reference_table_shape():
    table = reference_table()
    assert list(table.columns) == ["room_type", "volume_m3", "t60_s"]
    assert len(table) == 12
    assert set(table["room_type"]) == set(ROOM_TYPE_T60)
