"""Three-path outdoor-to-indoor path gain.

Each admissible path contributes

    lambda^2 cos^2(phi) T exp(-kappa_in d) R / (8 pi^2 rho^2)

where T is the wall transmission, d the indoor depth, R the reflector's
power reflection coefficient (1 for unreflected paths) and rho the range
(``r1 + d1`` for the side-wall path).  Path powers add incoherently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import DomainError
from .geometry import PathGeometry, PathKind, Scene, Terminal, TxSite, enumerate_paths

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class PropagationConstants:
    """Model constants; defaults are the 28 GHz values for low-E glass office buildings.

    With ``wall_materials`` set, each path takes its transmission from the
    entry wall's material instead of ``t_eff`` / ``t_eff_side``.
    """

    frequency: float = 28e9
    t_eff: float = 2.5e-5
    t_eff_side: float = 1.5e-4
    kappa_in: float = 0.12
    n2: float = math.sqrt(5.0)
    wall_materials: bool = False

    def __post_init__(self):
        if not self.frequency > 0:
            raise DomainError(f"frequency must be > 0, got {self.frequency}")
        for name in ("t_eff", "t_eff_side"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise DomainError(f"{name} must lie in (0, 1], got {v}")
        if not self.kappa_in >= 0:
            raise DomainError(f"kappa_in must be >= 0, got {self.kappa_in}")
        if not self.n2 > 1:
            raise DomainError(f"n2 must be > 1, got {self.n2}")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency

    @property
    def front_factor(self) -> float:
        """lambda^2 / (8 pi^2)."""
        return self.wavelength ** 2 / (8.0 * math.pi ** 2)

    def kernel_vector(self) -> np.ndarray:
        return np.array([self.front_factor, self.t_eff, self.t_eff_side, self.kappa_in, self.n2])


@dataclass(frozen=True)
class Term:
    kind: PathKind
    linear: float
    db: float
    geometry: PathGeometry


@dataclass(frozen=True)
class PathGainBreakdown:
    total_linear: float
    total_db: float
    terms: tuple[Term, ...] = field(default=())

    @property
    def dominant(self) -> PathKind | None:
        if not self.terms:
            return None
        return max(self.terms, key=lambda t: t.linear).kind


def to_db(linear: float) -> float:
    return 10.0 * math.log10(linear) if linear > 0 else -math.inf


def reflection_coefficient_sq(grazing_angle: float, n2: float = math.sqrt(5.0)) -> float:
    """Power reflection coefficient of a glass/concrete facade at grazing angle (rad)."""
    if grazing_angle < 0:
        raise DomainError(f"grazing angle must be >= 0, got {grazing_angle}")
    if not n2 > 0:
        raise DomainError(f"n2 must be > 0, got {n2}")
    return K.reflection_coeff_sq(float(grazing_angle), float(n2))


def indoor_absorption(depth: float, kappa_in: float = 0.12) -> float:
    """Power factor exp(-kappa_in * depth) for ``depth`` metres inside the building."""
    if depth < 0:
        raise DomainError(f"indoor depth must be >= 0, got {depth}")
    return math.exp(-kappa_in * depth)


def term_gain(path: PathGeometry, consts: PropagationConstants | None = None) -> float:
    """Linear power gain of a single path."""
    consts = consts or PropagationConstants()
    if path.indoor_depth < 0:
        raise DomainError(f"indoor depth must be >= 0, got {path.indoor_depth}")
    if consts.wall_materials:
        t = path.entry_wall.material.t_eff
    else:
        t = consts.t_eff_side if path.kind is PathKind.SIDE_WALL else consts.t_eff
    rng = path.outdoor_range
    refl = 1.0
    if path.kind is PathKind.SIDE_WALL:
        rng = path.outdoor_range + path.indoor_depth
    elif path.kind is PathKind.REFLECTED:
        refl = reflection_coefficient_sq(path.grazing_angle, consts.n2)
    return K.term_gain_value(consts.front_factor, path.incidence_angle, t, consts.kappa_in,
                             path.indoor_depth, rng, refl)


def breakdown(paths, consts: PropagationConstants | None = None) -> PathGainBreakdown:
    terms = []
    total = 0.0
    for p in paths:
        g = term_gain(p, consts)
        total += g
        terms.append(Term(p.kind, g, to_db(g), p))
    return PathGainBreakdown(total, to_db(total), tuple(terms))


def oi_path_gain(scene: Scene, tx: TxSite, terminal: Terminal,
                 consts: PropagationConstants | None = None) -> PathGainBreakdown:
    """Outdoor-to-indoor path gain summed over all admissible paths.

    No admissible path gives ``total_linear == 0`` and ``total_db == -inf``.
    """
    consts = consts or PropagationConstants()
    return breakdown(enumerate_paths(scene, tx, terminal, consts), consts)
