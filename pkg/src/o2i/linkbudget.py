"""Noise floor, SNR and coverage range along a 1-D path-gain profile."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, NoCoverage, NonMonotone
from .geometry import PathGeometry, PathKind, Wall, WallMaterial
from .propagation import PropagationConstants, term_gain, to_db

# thermal noise density at 290 K
KT_DBM_HZ = -174.0


@dataclass(frozen=True)
class LinkBudget:
    tx_power_dbm: float = 30.0
    tx_gain_dbi: float = 25.0
    rx_gain_dbi: float = 12.0
    bandwidth_hz: float = 100e6
    noise_figure_db: float = 9.0
    snr_threshold_db: float = 8.0

    def __post_init__(self):
        if not self.bandwidth_hz > 0:
            raise DomainError(f"bandwidth must be > 0, got {self.bandwidth_hz}")
        for name in ("tx_power_dbm", "tx_gain_dbi", "rx_gain_dbi", "noise_figure_db",
                     "snr_threshold_db"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    @property
    def noise_floor_dbm(self) -> float:
        return noise_floor_dbm(self.bandwidth_hz, self.noise_figure_db)

    @property
    def threshold_path_gain_db(self) -> float:
        """Path gain at which SNR equals the threshold."""
        return self.snr_threshold_db - (snr_db(0.0, self))


@dataclass(frozen=True)
class CoverageRange:
    range_m: float
    unbounded: bool = False

    def __float__(self) -> float:
        return self.range_m


def noise_floor_dbm(bandwidth_hz: float, noise_figure_db: float) -> float:
    if not bandwidth_hz > 0:
        raise DomainError(f"bandwidth must be > 0, got {bandwidth_hz}")
    return KT_DBM_HZ + 10.0 * math.log10(bandwidth_hz) + noise_figure_db


def snr_db(path_gain_db: float, budget: LinkBudget | None = None) -> float:
    b = budget or LinkBudget()
    return (b.tx_power_dbm + b.tx_gain_dbi + b.rx_gain_dbi + path_gain_db
            - noise_floor_dbm(b.bandwidth_hz, b.noise_figure_db))


def coverage_range(profile: Callable[[float], float], budget: LinkBudget | None = None,
                   search: tuple[float, float] = (1.0, 1000.0), tol: float = 0.01) -> CoverageRange:
    """Largest range in ``search`` whose SNR meets the budget threshold.

    ``profile`` maps range (m) to path gain (dB) and must be non-increasing;
    it is sampled on a 1 m grid first and rejected if it rises by more than
    0.1 dB anywhere.  The crossing is then bisected to ``tol`` metres.
    """
    b = budget or LinkBudget()
    r_min, r_max = map(float, search)
    if not 0 < r_min < r_max:
        raise DomainError(f"search window must satisfy 0 < r_min < r_max, got {search}")

    def margin(r: float) -> float:
        return snr_db(profile(r), b) - b.snr_threshold_db

    grid = np.append(np.arange(r_min, r_max, 1.0), r_max)
    pg = np.array([profile(float(r)) for r in grid])
    rises = np.diff(pg)
    if np.any(rises > 0.1):
        i = int(np.argmax(rises > 0.1))
        raise NonMonotone(f"profile rises by {rises[i]:.3f} dB between {grid[i]:g} and {grid[i + 1]:g} m")
    if margin(r_min) < 0:
        raise NoCoverage(f"SNR {snr_db(profile(r_min), b):.2f} dB at r_min={r_min:g} m is below "
                         f"the {b.snr_threshold_db:g} dB threshold")
    if margin(r_max) >= 0:
        return CoverageRange(r_max, unbounded=True)
    # first grid sample failing the threshold brackets the crossing
    fail = int(np.argmax(snr_db(0.0, b) + pg - b.snr_threshold_db < 0))
    lo, hi = float(grid[max(fail - 1, 0)]), float(grid[fail])
    if margin(lo) < 0:
        lo = r_min
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if margin(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return CoverageRange(lo)


def _facade_wall() -> Wall:
    return Wall((0.0, 0.0), (1.0, 0.0), (0.0, -1.0), WallMaterial(1.0), -1, -1)


def normal_incidence_profile(depth: float = 6.0, consts: PropagationConstants | None = None):
    """Direct-path gain vs range with the tx always on the facade normal."""
    consts = consts or PropagationConstants()
    wall = _facade_wall()

    def profile(r: float) -> float:
        return to_db(term_gain(PathGeometry(PathKind.DIRECT, r, 0.0, depth, wall, (0.0, 0.0)), consts))

    return profile


def standoff_profile(standoff_m: float, depth: float = 6.0, consts: PropagationConstants | None = None):
    """Direct-path gain vs range for a terminal sliding along a facade at fixed standoff.

    cos(phi) = standoff / r, so the profile is only defined for r >= standoff.
    """
    consts = consts or PropagationConstants()
    wall = _facade_wall()

    def profile(r: float) -> float:
        if r < standoff_m:
            raise DomainError(f"range {r} m is shorter than the standoff {standoff_m} m")
        phi = math.acos(min(standoff_m / r, 1.0))
        return to_db(term_gain(PathGeometry(PathKind.DIRECT, r, phi, depth, wall, (0.0, 0.0)), consts))

    return profile
