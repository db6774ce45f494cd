import math

import pytest

from o2i.fileio import fixture_scene
from o2i.geometry import Scene, TxSite, WallMaterial

GLASS30 = WallMaterial(2.5e-5, 0.3, "low-e 30%")


def box(x0, y0, x1, y1, height=20.0, material=GLASS30, label=""):
    return {"footprint": [(x0, y0), (x1, y0), (x1, y1), (x0, y1)], "height": height,
            "materials": material, "label": label}


@pytest.fixture
def canyon():
    return fixture_scene("fig3_canyon")


@pytest.fixture
def facade_scene():
    """One building whose north wall lies on y = 0, tx 30 m out on its normal."""
    return Scene.build([box(-50, -25, 50, 0, label="H")], [TxSite((5.0, 30.0, 1.5), "T")])


@pytest.fixture
def mirror_scene():
    """Host wall y=0 (x 6..15) facing a reflector facade y=5 (x -50..50)."""
    return Scene.build(
        [box(6, -4, 15, 0, label="host"), box(-50, 5, 50, 15, label="opposite")],
        [TxSite((0.0, -10.0, 1.5), "T")],
    )


def free_space_factor(freq=28e9):
    lam = 299_792_458.0 / freq
    return lam * lam / (8 * math.pi ** 2)
