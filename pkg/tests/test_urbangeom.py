"""Street segmentation and enclosure geometry."""

import math

import numpy as np
import pytest

from convpca import urbangeom as ug
from convpca.synthdata import gen_canyon_scene


def test_remainder_merges_into_previous():
    segs = ug.segment_streets([[(0, 0), (100, 0)]], interval=40.0)
    assert [pytest.approx(s.length) for s in segs] == [40.0, 60.0]


def test_remainder_kept_when_half_interval():
    segs = ug.segment_streets([[(0, 0), (100, 0)]], interval=35.0)
    # 100 = 35 + 35 + 30; 30 >= 17.5 stays its own piece
    assert [pytest.approx(s.length) for s in segs] == [35.0, 35.0, 30.0]


def test_single_interval_center():
    segs = ug.segment_streets([[(0, 0), (0, 40)]], interval=40.0)
    assert len(segs) == 1
    np.testing.assert_allclose(segs[0].center, [0, 20])
    assert segs[0].azimuth == pytest.approx(0.0)  # due north


def test_azimuth_east_west():
    segs = ug.segment_streets([[(0, 0), (50, 0)]], interval=50.0)
    assert segs[0].azimuth == pytest.approx(math.pi / 2)


def test_arc_lengths_sum(rng):
    pts = np.cumsum(rng.uniform(-10, 10, size=(30, 2)), axis=0)
    total = np.hypot(*np.diff(pts, axis=0).T).sum()
    segs = ug.segment_streets([pts], interval=17.0)
    assert sum(s.length for s in segs) == pytest.approx(total, abs=1e-9)


def test_zero_length_polyline_rejected():
    with pytest.raises(ug.GeometryError):
        ug.segment_streets([[(1, 1), (1, 1)]])


def test_center_is_arc_midpoint(rng):
    pts = [(0, 0), (30, 0), (30, 30)]  # total 60
    segs = ug.segment_streets([pts], interval=60.0)
    np.testing.assert_allclose(segs[0].center, [30, 0])


# --- enclosure ------------------------------------------------------------

def _profile(scene):
    street, buildings = scene
    segs = ug.segment_streets([street], interval=40.0)
    return ug.street_profile(segs[0], buildings)


def test_symmetric_canyon():
    res = _profile(gen_canyon_scene(10, 10, 10, 10))
    assert res.side_status == "both"
    assert res.mean_height == pytest.approx(10.0)
    assert res.width == pytest.approx(20.0)
    assert res.enclosure == pytest.approx(0.5)


def test_asymmetric_heights_mean_rule():
    res = _profile(gen_canyon_scene(6, 14, 5, 5))
    assert res.mean_height == pytest.approx(10.0)
    assert res.width == pytest.approx(10.0)
    assert res.enclosure == pytest.approx(1.0)


@pytest.mark.parametrize("deg", [37.0, 123.4, 280.1])
def test_rotation_invariance(deg):
    base = _profile(gen_canyon_scene(8, 12, 6, 9))
    rot = _profile(gen_canyon_scene(8, 12, 6, 9, rotation=math.radians(deg)))
    assert rot.enclosure == pytest.approx(base.enclosure, abs=1e-9)
    assert rot.width == pytest.approx(base.width, abs=1e-9)


def test_translation_invariance():
    base = _profile(gen_canyon_scene(8, 12, 6, 9))
    moved = _profile(gen_canyon_scene(8, 12, 6, 9, center=(1234.5, -987.1)))
    assert moved.enclosure == pytest.approx(base.enclosure, abs=1e-9)


def test_scaling_halves_enclosure():
    street, buildings = gen_canyon_scene(10, 10, 10, 10)
    scaled = [ug.BuildingFootprint(polygon=b.polygon * 2.0, height=b.height)
              for b in buildings]
    segs = ug.segment_streets([street * 2.0], interval=80.0)
    res = ug.street_profile(segs[0], scaled)
    assert res.enclosure == pytest.approx(0.25)  # heights fixed, widths doubled


def test_one_sided_scene():
    res = _profile(gen_canyon_scene(0, 12, 10, 10))
    assert res.side_status in ("left_only", "right_only")
    assert res.enclosure is None


def test_open_scene():
    res = _profile(gen_canyon_scene(0, 0, 10, 10))
    assert res.side_status == "none"
    assert res.enclosure is None


def test_far_buildings_ignored():
    res = _profile(gen_canyon_scene(10, 10, 60, 60))  # beyond the 50 m cap
    assert res.side_status == "none"


def test_nearest_building_wins():
    street, near = gen_canyon_scene(10, 10, 8, 8)
    _, far = gen_canyon_scene(30, 30, 20, 20)
    segs = ug.segment_streets([street], interval=40.0)
    res = ug.street_profile(segs[0], near + far)
    assert res.width == pytest.approx(16.0)
    assert res.mean_height == pytest.approx(10.0)


def test_bad_height_rejected():
    with pytest.raises(ug.GeometryError):
        ug.BuildingFootprint(polygon=[(0, 0), (1, 0), (1, 1)], height=0.0)
