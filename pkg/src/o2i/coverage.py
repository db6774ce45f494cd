"""Path-gain / SNR grids over a plan-view area."""

from __future__ import annotations

import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .calibration import fmt
from .errors import DomainError
from .geometry import KIND_BY_INDEX, Scene, TxSite, _tx_building
from .linkbudget import LinkBudget, snr_db
from .propagation import PropagationConstants

NA = "NA"
CSV_HEADER = "x,y,path_gain_db,snr_db,dominant"


@dataclass
class CoverageGrid:
    origin: tuple[float, float]
    spacing: float
    nx: int
    ny: int
    gain_linear: np.ndarray   # (ny, nx); NaN outdoors
    dominant: np.ndarray      # (ny, nx) kernel kind codes
    budget: LinkBudget

    @property
    def xs(self) -> np.ndarray:
        return self.origin[0] + self.spacing * np.arange(self.nx)

    @property
    def ys(self) -> np.ndarray:
        return self.origin[1] + self.spacing * np.arange(self.ny)

    @property
    def path_gain_db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 10.0 * np.log10(self.gain_linear)

    @property
    def snr_db(self) -> np.ndarray:
        return snr_db(self.path_gain_db, self.budget)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        xs, ys = self.xs, self.ys
        pg, snr = self.path_gain_db, self.snr_db
        for j in range(self.ny):
            for i in range(self.nx):
                kind = int(self.dominant[j, i])
                if kind == K.KIND_OUTDOOR:
                    buf.write(f"{fmt(xs[i])},{fmt(ys[j])},{NA},{NA},{NA}\n")
                    continue
                label = KIND_BY_INDEX[kind].value if kind >= 0 else "none"
                buf.write(f"{fmt(xs[i])},{fmt(ys[j])},{fmt(pg[j, i])},{fmt(snr[j, i])},{label}\n")
        return buf.getvalue()


def coverage_grid(scene: Scene, tx: TxSite, origin: tuple[float, float], spacing: float,
                  nx: int, ny: int, z: float = 1.5, consts: PropagationConstants | None = None,
                  budget: LinkBudget | None = None, workers: int = 1) -> CoverageGrid:
    """Evaluate total path gain on an ``ny x nx`` grid (row-major from ``origin``).

    Rows are split across ``workers`` threads; every cell is computed
    independently, so the result does not depend on the worker count.
    """
    if not spacing > 0:
        raise DomainError(f"grid spacing must be > 0, got {spacing}")
    if nx < 1 or ny < 1:
        raise DomainError(f"grid needs nx, ny >= 1, got {nx}x{ny}")
    consts = consts or PropagationConstants()
    budget = budget or LinkBudget()
    a = scene.arrays
    xs = float(origin[0]) + float(spacing) * np.arange(nx)
    ys = float(origin[1]) + float(spacing) * np.arange(ny)
    gain = np.empty((ny, nx))
    kind = np.empty((ny, nx), dtype=np.int64)
    kv = consts.kernel_vector()
    tx_b = _tx_building(scene, tx)
    tx_, ty_, tz_ = (float(v) for v in tx.position)

    def run(rows):
        K.coverage_rows(xs, ys, float(z), tx_, ty_, tz_, a.walls, a.normals, a.wall_building,
                        a.wall_teff, a.bstart, tx_b, kv, consts.wall_materials,
                        rows[0], rows[1], gain, kind)

    workers = max(1, int(workers))
    if workers == 1 or ny == 1:
        run((0, ny))
    else:
        bounds = np.linspace(0, ny, min(workers, ny) + 1).astype(int)
        chunks = [(int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, chunks))
    return CoverageGrid((float(origin[0]), float(origin[1])), float(spacing), nx, ny, gain, kind,
                        budget)
