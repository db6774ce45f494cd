"""Outdoor-to-indoor mmWave path gain and coverage prediction."""

from ._kernels import BACKEND
from .baselines import (GppO2iParams, SlopeInterceptModel, gpp_o2i_pg, gpp_o2i_tw_loss,
                        gpp_uma_basic_pl, slope_intercept_pg)
from .calibration import (FitResult, MeasurementRecord, compare_models, fit_slope_intercept,
                          model_rmse)
from .coverage import CoverageGrid, coverage_grid
from .errors import (DegenerateFit, DomainError, GeometryError, NoCoverage, NonMonotone,
                     O2IError, RangeError, SceneError)
from .geometry import (Building, PathGeometry, PathKind, Scene, Terminal, TxSite, Wall,
                       WallMaterial, enumerate_paths, incidence_angle, is_wall_illuminated,
                       reflection_path, wall_entry_point)
from .linkbudget import LinkBudget, coverage_range, noise_floor_dbm, snr_db
from .propagation import (PathGainBreakdown, PropagationConstants, indoor_absorption,
                          oi_path_gain, reflection_coefficient_sq, term_gain)

__version__ = "0.1.0"
