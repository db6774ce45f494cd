"""Slope-intercept fitting and per-model RMSE scoring of path-gain measurements."""

from __future__ import annotations

import csv
import io
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .baselines import GppO2iParams, SlopeInterceptModel, gpp_o2i_pg
from .errors import DegenerateFit, DomainError, O2IError
from .geometry import Scene
from .propagation import PropagationConstants, oi_path_gain

log = logging.getLogger(__name__)

OVERALL = "Overall"
TABLE_COLUMNS = ("subset", "n", "intercept_db", "fit_rmse_db", "gpp_rmse_db", "theory_rmse_db")


@dataclass(frozen=True)
class MeasurementRecord:
    range: float
    path_gain_db: float
    subset_label: str = ""
    position: Optional[tuple[float, float, float]] = None
    tx_label: Optional[str] = None

    def __post_init__(self):
        if not self.range > 0:
            raise DomainError(f"record range must be > 0, got {self.range}")
        if not math.isfinite(self.path_gain_db):
            raise DomainError(f"record path gain must be finite, got {self.path_gain_db}")


@dataclass(frozen=True)
class FitResult:
    exponent_n: float
    intercept_1m_db: float
    rmse_db: float
    n_records: int

    @property
    def model(self) -> SlopeInterceptModel:
        return SlopeInterceptModel(self.exponent_n, self.intercept_1m_db)


def fit_slope_intercept(records: Sequence[MeasurementRecord]) -> FitResult:
    """Least-squares path loss = intercept + n * 10 log10(range).

    RMSE uses the population divisor N.
    """
    if len(records) < 2:
        raise DegenerateFit(f"need at least 2 records, got {len(records)}")
    x = 10.0 * np.log10(np.array([r.range for r in records], dtype=np.float64))
    pl = -np.array([r.path_gain_db for r in records], dtype=np.float64)
    xm = x.mean()
    sxx = np.sum((x - xm) ** 2)
    if sxx == 0.0 or np.ptp(x) == 0.0:
        raise DegenerateFit("all records share the same range")
    n = float(np.sum((x - xm) * (pl - pl.mean())) / sxx)
    intercept = float(pl.mean() - n * xm)
    resid = pl - (intercept + n * x)
    return FitResult(n, intercept, float(np.sqrt(np.mean(resid ** 2))), len(records))


def model_rmse(records: Sequence[MeasurementRecord],
               predictor: Callable[[MeasurementRecord], float]) -> float:
    """Root-mean-square difference (dB) between ``predictor(record)`` and the measurements."""
    if not records:
        raise DomainError("model_rmse needs at least one record")
    err = np.array([predictor(r) - r.path_gain_db for r in records], dtype=np.float64)
    return float(np.sqrt(np.mean(err ** 2)))


def range_predictor(model: Callable[[float], float]) -> Callable[[MeasurementRecord], float]:
    return lambda rec: model(rec.range)


def group_records(records: Iterable[MeasurementRecord]) -> dict[str, list[MeasurementRecord]]:
    groups: dict[str, list[MeasurementRecord]] = defaultdict(list)
    for r in records:
        groups[r.subset_label].append(r)
    return {k: groups[k] for k in sorted(groups)}


@dataclass
class ComparisonRow:
    subset: str
    fit: Optional[FitResult]
    gpp_rmse_db: float
    theory_rmse_db: float


@dataclass
class ComparisonTable:
    rows: list[ComparisonRow]
    skipped: dict[str, str] = field(default_factory=dict)

    def row(self, subset: str) -> ComparisonRow:
        for r in self.rows:
            if r.subset == subset:
                return r
        raise KeyError(subset)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TABLE_COLUMNS)
        for r in self.rows:
            fit = r.fit
            w.writerow([r.subset,
                        fmt(fit.exponent_n) if fit else "NA",
                        fmt(fit.intercept_1m_db) if fit else "NA",
                        fmt(fit.rmse_db) if fit else "NA",
                        fmt(r.gpp_rmse_db), fmt(r.theory_rmse_db)])
        for subset, reason in self.skipped.items():
            buf.write(f"# skipped: {subset}: {reason}\n")
        return buf.getvalue()


def fmt(v: float) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "NA"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    s = f"{v:.4f}"
    return "0.0000" if s == "-0.0000" else s


def _predictors(scene: Scene, consts: PropagationConstants, gpp: GppO2iParams):
    def theory(rec: MeasurementRecord) -> float:
        tx = scene.tx(rec.tx_label)
        return oi_path_gain(scene, tx, scene.terminal(rec.position), consts).total_db

    def gpp_pg(rec: MeasurementRecord) -> float:
        tx = scene.tx(rec.tx_label)
        d2d = math.dist(tx.position[:2], rec.position[:2])
        p = GppO2iParams(gpp.frequency, tx.position[2], rec.position[2], gpp.glass_fraction,
                         gpp.indoor_depth, gpp.los, gpp.loss_model)
        return gpp_o2i_pg(p, d2d)

    return theory, gpp_pg


def _check_geometry(records, scene: Scene) -> Optional[str]:
    for r in records:
        if r.position is None or r.tx_label is None:
            return "record without terminal position or tx label"
        try:
            scene.tx(r.tx_label)
        except KeyError:
            return f"unknown tx label {r.tx_label!r}"
        if scene.building_at(r.position) < 0:
            return f"terminal {r.position[:2]} is outside every building"
    return None


def compare_models(records: Iterable[MeasurementRecord], scene: Scene,
                   consts: PropagationConstants | None = None,
                   gpp_params: GppO2iParams | None = None) -> ComparisonTable:
    """Per-subset and pooled fit / 3GPP / theory RMSE table.

    Subsets whose records cannot be placed in ``scene`` are reported in
    ``skipped`` and left out of the pooled row.
    """
    consts = consts or PropagationConstants()
    gpp_params = gpp_params or GppO2iParams(frequency=consts.frequency)
    theory, gpp_pg = _predictors(scene, consts, gpp_params)
    rows, skipped, pooled = [], {}, []
    for subset, recs in group_records(records).items():
        reason = _check_geometry(recs, scene)
        if reason is not None:
            log.warning("skipping subset %s: %s", subset, reason)
            skipped[subset] = reason
            continue
        try:
            rows.append(_score(subset, recs, theory, gpp_pg))
        except O2IError as exc:
            skipped[subset] = str(exc)
            continue
        pooled.extend(recs)
    if pooled:
        rows.append(_score(OVERALL, pooled, theory, gpp_pg))
    return ComparisonTable(rows, skipped)


def _score(subset, recs, theory, gpp_pg) -> ComparisonRow:
    try:
        fit = fit_slope_intercept(recs)
    except DegenerateFit:
        fit = None
    return ComparisonRow(subset, fit, model_rmse(recs, gpp_pg), model_rmse(recs, theory))
