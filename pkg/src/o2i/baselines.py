"""Reference models: slope-intercept fits and the 3GPP TR 38.901 UMa O2I path loss.

Only deterministic mean terms are evaluated; the shadow-fading and
penetration-loss spreads are exposed as metadata for reporting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, RangeError

# TR 38.901 uses c = 3.0e8 m/s in the breakpoint distance
C_3GPP = 3.0e8

SHADOW_FADING_STD_DB = {"los": 4.0, "nlos": 6.0}
O2I_PENETRATION_STD_DB = {"high": 6.5, "low": 4.4}


@dataclass(frozen=True)
class SlopeInterceptModel:
    exponent_n: float
    intercept_1m_db: float

    def __post_init__(self):
        if not (math.isfinite(self.exponent_n) and math.isfinite(self.intercept_1m_db)):
            raise DomainError("slope-intercept parameters must be finite")

    def __call__(self, range_m: float) -> float:
        return slope_intercept_pg(self, range_m)


@dataclass(frozen=True)
class GppO2iParams:
    frequency: float = 28e9
    bs_height: float = 25.0
    ut_height: float = 1.5
    glass_fraction: float = 0.3
    indoor_depth: float = 6.0
    los: bool = True
    loss_model: str = "high"

    def __post_init__(self):
        if self.bs_height <= 0 or self.ut_height <= 0:
            raise DomainError("antenna heights must be > 0")
        if not 0.0 <= self.glass_fraction <= 1.0:
            raise DomainError(f"glass_fraction must lie in [0, 1], got {self.glass_fraction}")
        if self.indoor_depth < 0:
            raise DomainError(f"indoor_depth must be >= 0, got {self.indoor_depth}")
        if self.loss_model not in ("high", "low"):
            raise DomainError(f"loss_model must be 'high' or 'low', got {self.loss_model!r}")

    @property
    def shadow_fading_std_db(self) -> float:
        return SHADOW_FADING_STD_DB["los" if self.los else "nlos"]

    @property
    def penetration_std_db(self) -> float:
        return O2I_PENETRATION_STD_DB[self.loss_model]


def slope_intercept_pg(model: SlopeInterceptModel, range_m: float) -> float:
    """Path gain (dB, negative) of a slope-intercept model at ``range_m``."""
    if range_m <= 0:
        raise DomainError(f"range must be > 0, got {range_m}")
    return -(model.intercept_1m_db + 10.0 * model.exponent_n * math.log10(range_m))


def breakpoint_distance(frequency: float, bs_height: float, ut_height: float, h_e: float = 1.0) -> float:
    """UMa effective breakpoint distance d'_BP (m)."""
    return 4.0 * (bs_height - h_e) * (ut_height - h_e) * frequency / C_3GPP


def gpp_uma_basic_pl(frequency: float, d2d: float, bs_height: float = 25.0,
                     ut_height: float = 1.5, los: bool = True) -> float:
    """Mean UMa path loss (dB) from TR 38.901 Table 7.4.1-1, no shadow fading.

    LOS is dual-slope about the breakpoint; NLOS is max(LOS, PL'_NLOS).
    Raises RangeError outside 10 m <= d2d <= 5 km or 0.5-100 GHz.
    """
    fc = frequency / 1e9
    if not 0.5 <= fc <= 100.0:
        raise RangeError(f"frequency {fc:g} GHz outside the 0.5-100 GHz validity range")
    if not 10.0 <= d2d <= 5000.0:
        raise RangeError(f"2-D distance {d2d:g} m outside the 10-5000 m validity range")
    d3d = math.hypot(d2d, bs_height - ut_height)
    d_bp = breakpoint_distance(frequency, bs_height, ut_height)
    if d2d <= d_bp:
        pl_los = 28.0 + 22.0 * math.log10(d3d) + 20.0 * math.log10(fc)
    else:
        pl_los = (28.0 + 40.0 * math.log10(d3d) + 20.0 * math.log10(fc)
                  - 9.0 * math.log10(d_bp ** 2 + (bs_height - ut_height) ** 2))
    if los:
        return pl_los
    pl_nlos = 13.54 + 39.08 * math.log10(d3d) + 20.0 * math.log10(fc) - 0.6 * (ut_height - 1.5)
    return max(pl_los, pl_nlos)


def material_losses(frequency: float, loss_model: str = "high") -> tuple[float, float]:
    """(glass, concrete) penetration losses in dB; IRR glass for the high-loss model."""
    fc = frequency / 1e9
    glass = 23.0 + 0.3 * fc if loss_model == "high" else 2.0 + 0.2 * fc
    return glass, 5.0 + 4.0 * fc


def gpp_o2i_tw_loss(frequency: float, glass_fraction: float = 0.3, loss_model: str = "high") -> float:
    """Through-wall loss (dB) of a wall that is ``glass_fraction`` glass and the rest concrete."""
    if not 0.0 <= glass_fraction <= 1.0:
        raise DomainError(f"glass_fraction must lie in [0, 1], got {glass_fraction}")
    l_glass, l_concrete = material_losses(frequency, loss_model)
    mix = (glass_fraction * 10.0 ** (-l_glass / 10.0)
           + (1.0 - glass_fraction) * 10.0 ** (-l_concrete / 10.0))
    return 5.0 - 10.0 * math.log10(mix)


def gpp_o2i_components(params: GppO2iParams, d2d: float) -> tuple[float, float, float]:
    """(basic path loss, through-wall loss, indoor loss) in dB."""
    pl_b = gpp_uma_basic_pl(params.frequency, d2d, params.bs_height, params.ut_height, params.los)
    pl_tw = gpp_o2i_tw_loss(params.frequency, params.glass_fraction, params.loss_model)
    return pl_b, pl_tw, 0.5 * params.indoor_depth


def gpp_o2i_pg(params: GppO2iParams, d2d: float) -> float:
    """Deterministic O2I path gain (dB, negative)."""
    pl_b, pl_tw, pl_in = gpp_o2i_components(params, d2d)
    return -(pl_b + pl_tw + pl_in)
