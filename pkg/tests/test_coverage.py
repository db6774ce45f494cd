import math

import numpy as np
import pytest

from o2i.coverage import coverage_grid
from o2i.errors import DomainError
from o2i.linkbudget import LinkBudget
from o2i.propagation import PropagationConstants, oi_path_gain


@pytest.mark.parametrize("tx, pos", [("Tx1", (30.0, -6.0)), ("Tx2", (12.0, -20.0)),
                                     ("Tx2", (0.0, 40.0)), ("Tx1", (55.5, -0.5))])
def test_single_cell_matches_point_prediction(canyon, tx, pos):
    g = coverage_grid(canyon, canyon.tx(tx), pos, 1.0, 1, 1)
    ref = oi_path_gain(canyon, canyon.tx(tx), canyon.terminal((*pos, 1.5)))
    assert g.gain_linear[0, 0] == pytest.approx(ref.total_linear, rel=1e-12)


def test_grid_matches_point_predictions_everywhere(canyon):
    tx = canyon.tx("Tx2")
    g = coverage_grid(canyon, tx, (-5.0, -30.0), 7.0, 12, 10)
    for j, y in enumerate(g.ys):
        for i, x in enumerate(g.xs):
            b = canyon.building_at((x, y))
            if b < 0:
                assert math.isnan(g.gain_linear[j, i])
                continue
            ref = oi_path_gain(canyon, tx, canyon.terminal((x, y, 1.5))).total_linear
            assert g.gain_linear[j, i] == pytest.approx(ref, rel=1e-12, abs=1e-300)


def test_aisle_decays_with_range(canyon):
    # 6 m behind the north facade, walking away from the Tx foot point
    tx = canyon.tx("Tx2")
    g = coverage_grid(canyon, tx, (30.0, -6.0), 1.0, 30, 1)
    pg = g.path_gain_db[0]
    assert np.all(np.diff(pg) <= 1e-9)
    assert pg[0] - pg[-1] > 2.0


def test_all_outdoor_grid(canyon):
    g = coverage_grid(canyon, canyon.tx("Tx1"), (0.0, 5.0), 2.0, 5, 5)
    assert np.isnan(g.gain_linear).all()
    rows = g.to_csv().splitlines()[1:]
    assert all(r.endswith(",NA,NA,NA") for r in rows)


def test_csv_layout(canyon):
    g = coverage_grid(canyon, canyon.tx("Tx1"), (10.0, -10.0), 2.5, 3, 2)
    lines = g.to_csv().splitlines()
    assert lines[0] == "x,y,path_gain_db,snr_db,dominant"
    assert [tuple(line.split(",")[:2]) for line in lines[1:]] == [
        ("10.0000", "-10.0000"), ("12.5000", "-10.0000"), ("15.0000", "-10.0000"),
        ("10.0000", "-7.5000"), ("12.5000", "-7.5000"), ("15.0000", "-7.5000")]


def test_snr_is_path_gain_plus_budget(canyon):
    g = coverage_grid(canyon, canyon.tx("Tx1"), (5.0, -20.0), 5.0, 8, 4)
    assert np.allclose(g.snr_db, g.path_gain_db + 152.0, equal_nan=True)
    louder = coverage_grid(canyon, canyon.tx("Tx1"), (5.0, -20.0), 5.0, 8, 4,
                           budget=LinkBudget(tx_power_dbm=40.0))
    assert np.allclose(louder.snr_db - g.snr_db, 10.0, equal_nan=True)


def test_repeat_runs_byte_identical(canyon):
    args = (canyon, canyon.tx("Tx2"), (-10.0, -30.0), 1.5, 40, 30)
    assert coverage_grid(*args).to_csv() == coverage_grid(*args).to_csv()


@pytest.mark.parametrize("workers", [2, 3, 7, 64])
def test_worker_count_is_bit_exact(canyon, workers):
    args = (canyon, canyon.tx("Tx1"), (-10.0, -30.0), 1.5, 40, 30)
    a, b = coverage_grid(*args), coverage_grid(*args, workers=workers)
    assert np.array_equal(a.gain_linear, b.gain_linear, equal_nan=True)
    assert np.array_equal(a.dominant, b.dominant)


def test_wall_materials_flag_changes_grid(canyon):
    args = (canyon, canyon.tx("Tx1"), (40.0, -20.0), 2.0, 10, 5)
    a = coverage_grid(*args)
    b = coverage_grid(*args, consts=PropagationConstants(wall_materials=True))
    assert not np.array_equal(a.gain_linear, b.gain_linear)


@pytest.mark.parametrize("kw", [{"spacing": 0.0}, {"nx": 0}, {"ny": -1}])
def test_invalid_grid(canyon, kw):
    args = {"origin": (0.0, 0.0), "spacing": 1.0, "nx": 2, "ny": 2} | kw
    with pytest.raises(DomainError):
        coverage_grid(canyon, canyon.tx("Tx1"), **args)
