import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from o2i.errors import DomainError, SceneError
from o2i.geometry import (Building, PathKind, Scene, Terminal, TxSite, Wall, WallMaterial,
                          enumerate_paths, incidence_angle, is_wall_illuminated, reflection_path,
                          wall_entry_point)

from conftest import GLASS30, box

X_AXIS_WALL = Wall((0.0, 0.0), (20.0, 0.0), (0.0, -1.0), GLASS30)


def test_wall_normals_point_outward(canyon):
    for b in canyon.buildings:
        cx, cy = b.centroid
        for w in b.walls:
            dx, dy = w.end[0] - w.start[0], w.end[1] - w.start[1]
            nx, ny = w.outward_normal
            assert abs(nx * dx + ny * dy) < 1e-9
            assert abs(math.hypot(nx, ny) - 1.0) < 1e-12
            mx, my = (w.start[0] + w.end[0]) / 2, (w.start[1] + w.end[1]) / 2
            assert (cx - mx) * nx + (cy - my) * ny < 0


def test_clockwise_footprint_rejected():
    with pytest.raises(SceneError, match="counter-clockwise"):
        Building.from_footprint([(0, 0), (0, 1), (1, 1), (1, 0)], 10, GLASS30)


def test_self_intersecting_footprint_rejected():
    with pytest.raises(SceneError):
        Building.from_footprint([(0, 0), (2, 2), (2, 0), (0, 2)], 10, GLASS30)


def test_nonpositive_heights_rejected():
    with pytest.raises(SceneError):
        Building.from_footprint([(0, 0), (1, 0), (1, 1)], 0, GLASS30)
    with pytest.raises(SceneError):
        TxSite((0, 0, 0))


@pytest.mark.parametrize("terminal, entry, depth", [
    ((5.0, -6.0), (5.0, 0.0), 6.0),
    ((25.0, -6.0), (20.0, 0.0), math.sqrt(25 + 36)),
])
def test_wall_entry_point(terminal, entry, depth):
    e, d = wall_entry_point(X_AXIS_WALL, Terminal((*terminal, 1.5), 0))
    assert e == pytest.approx(entry, abs=1e-12)
    assert d == pytest.approx(depth, abs=1e-12)


def test_aisle_depth_is_six_metres(canyon):
    for x in (1.0, 17.5, 42.0, 59.0):
        t = canyon.terminal((x, -6.0, 1.5))
        north = canyon.buildings[0].walls[2]
        assert wall_entry_point(north, t)[1] == pytest.approx(6.0, abs=1e-12)


@pytest.mark.parametrize("tx, entry, cos_phi", [
    ((5, -30, 0), (5, 0), 1.0),
    ((35, -30, 0), (5, 0), math.sqrt(0.5)),
    ((5, -30, 40), (5, 0, 0), 0.6),
])
def test_incidence_angle_examples(tx, entry, cos_phi):
    assert math.cos(incidence_angle(tx, entry, X_AXIS_WALL)) == pytest.approx(cos_phi, abs=1e-12)


def test_incidence_angle_back_side_raises():
    with pytest.raises(DomainError):
        incidence_angle((5, 30, 10), (5, 0), X_AXIS_WALL)


def test_illumination(facade_scene):
    north = facade_scene.buildings[0].walls[2]
    south = facade_scene.buildings[0].walls[0]
    tx = facade_scene.tx("T")
    assert is_wall_illuminated(tx, north, facade_scene)
    assert not is_wall_illuminated(tx, south, facade_scene)


def test_illumination_blocked_by_other_footprint():
    scene = Scene.build([box(-50, -25, 50, 0), box(0, 10, 10, 20)], [TxSite((5, 30, 10), "T")])
    north = scene.buildings[0].walls[2]
    tx = scene.tx("T")
    # oracle: the blocker spans x 0..10 between y 10 and 20, the ray x=5 crosses it
    assert not is_wall_illuminated(tx, north, scene, point=(5, 0))
    assert is_wall_illuminated(tx, north, scene, point=(40, 0)) == (not _crosses_box(
        (5, 30), (40, 0), (0, 10, 10, 20)))


def _crosses_box(p, q, bx):
    # brute-force sampling of the segment against the open box
    x0, y0, x1, y1 = bx
    for t in np.linspace(0, 1, 20001)[1:-1]:
        x, y = p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])
        if x0 < x < x1 and y0 < y < y1:
            return True
    return False


def test_rooftop_tx_not_shadowed_by_own_building():
    scene = Scene.build([box(-50, -25, 50, 0), box(-10, 20, 20, 40)], [TxSite((5, 30, 25), "T")])
    assert is_wall_illuminated(scene.tx("T"), scene.buildings[0].walls[2], scene, point=(5, 0))


def test_reflection_hand_construction(mirror_scene):
    host, opp = mirror_scene.buildings
    tx = mirror_scene.tx("T")
    term = mirror_scene.terminal((10.0, -2.0, 1.5))
    path = reflection_path(tx, opp.walls[0], host.walls[2], term, mirror_scene)
    assert path is not None and path.kind is PathKind.REFLECTED
    assert path.outdoor_range == pytest.approx(math.hypot(10, 20), abs=1e-12)
    assert path.reflection_point == pytest.approx((7.5, 5.0), abs=1e-12)
    assert path.entry_point == pytest.approx((10.0, 0.0), abs=1e-12)
    assert path.grazing_angle == pytest.approx(math.atan2(15, 7.5), abs=1e-12)
    assert path.incidence_angle == pytest.approx(math.atan2(2.5, 5), abs=1e-12)
    assert path.indoor_depth == pytest.approx(2.0)


def test_reflection_off_facade_is_absent():
    scene = Scene.build([box(6, -4, 15, 0), box(20, 5, 50, 15)], [TxSite((0, -10, 1.5), "T")])
    host, opp = scene.buildings
    term = scene.terminal((10.0, -2.0, 1.5))
    assert reflection_path(scene.tx("T"), opp.walls[0], host.walls[2], term, scene) is None


def test_reflection_reflector_behind_tx_is_absent():
    scene = Scene.build([box(6, -4, 15, 0), box(-50, 5, 50, 15)], [TxSite((0, 10, 1.5), "T")])
    host, opp = scene.buildings
    term = scene.terminal((10.0, -2.0, 1.5))
    assert reflection_path(scene.tx("T"), opp.walls[0], host.walls[2], term, scene) is None


def test_reflection_same_wall_raises(mirror_scene):
    host = mirror_scene.buildings[0]
    term = mirror_scene.terminal((10.0, -2.0, 1.5))
    with pytest.raises(DomainError):
        reflection_path(mirror_scene.tx("T"), host.walls[2], host.walls[2], term, mirror_scene)


def test_single_facing_wall_gives_one_direct_path(facade_scene):
    term = facade_scene.terminal((5.0, -6.0, 1.5))
    paths = enumerate_paths(facade_scene, facade_scene.tx("T"), term)
    assert [p.kind for p in paths] == [PathKind.DIRECT]
    assert paths[0].outdoor_range == pytest.approx(30.0)
    assert paths[0].incidence_angle == pytest.approx(0.0, abs=1e-12)
    assert paths[0].indoor_depth == pytest.approx(6.0)


def test_corner_tx_gives_direct_and_side():
    scene = Scene.build([box(0, -25, 60, 0)], [TxSite((95, 10, 25), "T")])
    paths = enumerate_paths(scene, scene.tx("T"), scene.terminal((30, -6, 1.5)))
    assert [p.kind for p in paths] == [PathKind.DIRECT, PathKind.SIDE_WALL]
    assert paths[0].entry_wall.index == 2
    assert paths[1].entry_wall.index == 1
    assert paths[1].indoor_depth == pytest.approx(30.0)


def test_canyon_three_paths_by_hand(canyon):
    tx = canyon.tx("Tx1")
    paths = enumerate_paths(canyon, tx, canyon.terminal((30.0, -6.0, 1.5)))
    kinds = [p.kind for p in paths]
    assert kinds == [PathKind.DIRECT, PathKind.SIDE_WALL, PathKind.REFLECTED]
    direct, side, refl = paths
    # direct: entry (30, 0, 1.5), standoff 10 m
    r = math.sqrt(65 ** 2 + 10 ** 2 + 23.5 ** 2)
    assert direct.outdoor_range == pytest.approx(r, abs=1e-9)
    assert math.cos(direct.incidence_angle) == pytest.approx(10 / r, abs=1e-12)
    # side: east wall x=60, entry (60, -6), standoff 35 m
    r1 = math.sqrt(35 ** 2 + 16 ** 2 + 23.5 ** 2)
    assert side.outdoor_range == pytest.approx(r1, abs=1e-9)
    assert math.cos(side.incidence_angle) == pytest.approx(35 / r1, abs=1e-12)
    # reflected off 7C south (y=30): image (95, 50), reflection point (69, 30)
    assert refl.outdoor_range == pytest.approx(math.sqrt(65 ** 2 + 50 ** 2 + 23.5 ** 2), abs=1e-9)
    assert refl.reflection_point == pytest.approx((69.0, 30.0), abs=1e-9)
    assert refl.reflector.index == 4


def test_no_path_gives_empty_list():
    # both walls facing the tx are shadowed and no blocker facade faces it
    scene = Scene.build([box(0, 0, 10, 10), box(-15, -8, 20, -2), box(-8, -2, -2, 20)],
                        [TxSite((-20, -20, 30), "T")])
    assert enumerate_paths(scene, scene.tx("T"), scene.terminal((5, 5, 1.5))) == []


@st.composite
def wall_and_tx(draw):
    ax, ay = draw(st.floats(-100, 100)), draw(st.floats(-100, 100))
    ang = draw(st.floats(0, 2 * math.pi))
    length = draw(st.floats(1, 80))
    bx, by = ax + length * math.cos(ang), ay + length * math.sin(ang)
    n = ((by - ay) / length, -(bx - ax) / length)
    t = draw(st.floats(0, 1))
    entry = (ax + t * (bx - ax), ay + t * (by - ay), draw(st.floats(0, 10)))
    ds = draw(st.floats(0.5, 200))
    along = draw(st.floats(-200, 200))
    tx = (entry[0] + ds * n[0] + along * math.cos(ang), entry[1] + ds * n[1] + along * math.sin(ang),
          draw(st.floats(0.1, 60)))
    return Wall((ax, ay), (bx, by), n, GLASS30), tx, entry, ds


@given(wall_and_tx())
def test_incidence_equals_arccos_standoff_over_range(case):
    wall, tx, entry, _ = case
    ds = wall.signed_distance(tx)
    r = math.dist(tx, entry)
    assert abs(incidence_angle(tx, entry, wall) - math.acos(min(ds / r, 1.0))) < 1e-9


@settings(max_examples=50, deadline=None)
@given(st.floats(-500, 500), st.floats(-500, 500))
def test_translation_invariance(dx, dy):
    from o2i.fileio import fixture_scene

    scene = fixture_scene()
    moved = scene.translated(dx, dy)
    for label, pos in (("Tx1", (30.0, -6.0, 1.5)), ("Tx2", (12.0, -6.0, 1.5)), ("Tx1", (50.0, 36.0, 1.5))):
        a = enumerate_paths(scene, scene.tx(label), scene.terminal(pos))
        b = enumerate_paths(moved, moved.tx(label), moved.terminal((pos[0] + dx, pos[1] + dy, pos[2])))
        assert [p.kind for p in a] == [p.kind for p in b]
        for p, q in zip(a, b):
            assert q.outdoor_range == pytest.approx(p.outdoor_range, abs=1e-9)
            assert q.incidence_angle == pytest.approx(p.incidence_angle, abs=1e-9)
            assert q.indoor_depth == pytest.approx(p.indoor_depth, abs=1e-9)


def test_paths_have_distinct_kinds_and_lit_walls(canyon):
    rng = np.random.default_rng(7)
    for _ in range(200):
        x, y = rng.uniform(0, 60), rng.uniform(-25, 0)
        tx = canyon.tx_sites[rng.integers(2)]
        term = canyon.terminal((x, y, 1.5))
        paths = enumerate_paths(canyon, tx, term)
        kinds = [p.kind for p in paths]
        assert len(kinds) == len(set(kinds))
        for p in paths:
            if p.kind is not PathKind.REFLECTED:
                assert is_wall_illuminated(tx, p.entry_wall, canyon, point=p.entry_point)
            else:
                assert p.reflector.building != term.host_building
