"""2.5-D scene model and ray-optics path construction.

Buildings are footprint polygons in plan (counter-clockwise, metres) with one
wall per edge.  Transmitters and terminals carry a height, so ranges and
incidence angles are 3-D while occlusion is tested on the 2-D footprints.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from . import _kernels as K
from .errors import DomainError, GeometryError, SceneError

# boundary tolerance for point-in-footprint tests (m)
BOUNDARY_TOL = 1e-9


class PathKind(enum.Enum):
    DIRECT = "Direct"
    SIDE_WALL = "SideWall"
    REFLECTED = "Reflected"

    @property
    def index(self) -> int:
        return _KIND_INDEX[self]


_KIND_INDEX = {PathKind.DIRECT: K.KIND_DIRECT, PathKind.SIDE_WALL: K.KIND_SIDE,
               PathKind.REFLECTED: K.KIND_REFLECTED}
KIND_BY_INDEX = {v: k for k, v in _KIND_INDEX.items()}


@dataclass(frozen=True)
class WallMaterial:
    t_eff: float
    glass_fraction: float = 0.3
    label: str = ""

    def __post_init__(self):
        if not 0.0 < self.t_eff <= 1.0:
            raise SceneError(f"t_eff must lie in (0, 1], got {self.t_eff!r}")
        if not 0.0 <= self.glass_fraction <= 1.0:
            raise SceneError(f"glass_fraction must lie in [0, 1], got {self.glass_fraction!r}")

    @classmethod
    def from_db(cls, t_eff_db: float, glass_fraction: float = 0.3, label: str = "") -> "WallMaterial":
        return cls(10.0 ** (t_eff_db / 10.0), glass_fraction, label)

    @property
    def t_eff_db(self) -> float:
        return 10.0 * math.log10(self.t_eff)


@dataclass(frozen=True)
class Wall:
    start: tuple[float, float]
    end: tuple[float, float]
    outward_normal: tuple[float, float]
    material: WallMaterial
    index: int = -1
    building: int = -1

    @property
    def length(self) -> float:
        return math.dist(self.start, self.end)

    def signed_distance(self, point: Sequence[float]) -> float:
        """Horizontal distance of ``point`` from the wall line, positive on the outward side."""
        nx, ny = self.outward_normal
        return (point[0] - self.start[0]) * nx + (point[1] - self.start[1]) * ny


def _signed_area(pts: Sequence[tuple[float, float]]) -> float:
    n = len(pts)
    return 0.5 * sum(pts[i][0] * pts[(i + 1) % n][1] - pts[(i + 1) % n][0] * pts[i][1]
                     for i in range(n))


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return (v > 0) - (v < 0)

    def on_seg(a, b, c):
        return (min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    if o1 != o2 and o3 != o4:
        return True
    return ((o1 == 0 and on_seg(p1, p2, q1)) or (o2 == 0 and on_seg(p1, p2, q2))
            or (o3 == 0 and on_seg(q1, q2, p1)) or (o4 == 0 and on_seg(q1, q2, p2)))


def is_simple_polygon(pts: Sequence[tuple[float, float]]) -> bool:
    n = len(pts)
    for i in range(n):
        a1, a2 = pts[i], pts[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or j == (i + 1) % n:
                continue
            if _segments_cross(a1, a2, pts[j], pts[(j + 1) % n]):
                return False
    return True


@dataclass(frozen=True)
class Building:
    """A footprint polygon extruded to ``height``; walls map 1:1 to edges.

    Edge ``i`` runs from ``footprint[i]`` to ``footprint[i + 1]`` (wrapping).
    """

    footprint: tuple[tuple[float, float], ...]
    height: float
    walls: tuple[Wall, ...]
    label: str = ""

    @classmethod
    def from_footprint(cls, footprint, height, materials, label="", index=-1, wall_offset=0):
        pts = tuple((float(x), float(y)) for x, y in footprint)
        if len(pts) < 3:
            raise SceneError(f"building {label!r}: footprint needs at least 3 vertices")
        if height <= 0:
            raise SceneError(f"building {label!r}: height must be > 0")
        if _signed_area(pts) <= 0:
            raise SceneError(f"building {label!r}: footprint must be counter-clockwise")
        if not is_simple_polygon(pts):
            raise SceneError(f"building {label!r}: footprint self-intersects")
        if isinstance(materials, WallMaterial):
            materials = [materials] * len(pts)
        if len(materials) != len(pts):
            raise SceneError(f"building {label!r}: {len(materials)} walls for {len(pts)} edges")
        walls = []
        for i, mat in enumerate(materials):
            (ax, ay), (bx, by) = pts[i], pts[(i + 1) % len(pts)]
            length = math.hypot(bx - ax, by - ay)
            if length == 0:
                raise SceneError(f"building {label!r}: repeated vertex {i}")
            normal = ((by - ay) / length, -(bx - ax) / length)
            walls.append(Wall((ax, ay), (bx, by), normal, mat, wall_offset + i, index))
        return cls(pts, float(height), tuple(walls), label)

    @property
    def centroid(self) -> tuple[float, float]:
        xs, ys = zip(*self.footprint)
        return sum(xs) / len(xs), sum(ys) / len(ys)

    def contains(self, point: Sequence[float], tol: float = BOUNDARY_TOL) -> bool:
        arrays = _flatten([self])
        return bool(K.point_in_building(float(point[0]), float(point[1]), arrays.walls,
                                        0, len(self.walls), tol))


@dataclass(frozen=True)
class TxSite:
    position: tuple[float, float, float]
    label: str = ""

    def __post_init__(self):
        if self.position[2] <= 0:
            raise SceneError(f"tx {self.label!r}: height must be > 0")


@dataclass(frozen=True)
class Terminal:
    position: tuple[float, float, float]
    host_building: int


@dataclass(frozen=True)
class PathGeometry:
    kind: PathKind
    outdoor_range: float
    incidence_angle: float
    indoor_depth: float
    entry_wall: Wall
    entry_point: tuple[float, float]
    grazing_angle: Optional[float] = None
    reflection_point: Optional[tuple[float, float]] = None
    reflector: Optional[Wall] = None

    def __post_init__(self):
        if not self.outdoor_range > 0:
            raise DomainError(f"outdoor_range must be > 0, got {self.outdoor_range}")
        if not self.indoor_depth >= 0:
            raise DomainError(f"indoor_depth must be >= 0, got {self.indoor_depth}")
        if not 0 <= self.incidence_angle < math.pi / 2:
            raise DomainError(f"incidence_angle must lie in [0, pi/2), got {self.incidence_angle}")
        if self.grazing_angle is not None and not 0 < self.grazing_angle <= math.pi / 2:
            raise DomainError(f"grazing_angle must lie in (0, pi/2], got {self.grazing_angle}")


@dataclass
class SceneArrays:
    walls: np.ndarray          # (W, 4) x1 y1 x2 y2
    normals: np.ndarray        # (W, 2)
    wall_building: np.ndarray  # (W,) int64
    wall_teff: np.ndarray      # (W,)
    bstart: np.ndarray         # (B + 1,) int64 wall offsets


def _flatten(buildings: Sequence[Building]) -> SceneArrays:
    rows, normals, owner, teff, bstart = [], [], [], [], [0]
    for b, bld in enumerate(buildings):
        for w in bld.walls:
            rows.append((*w.start, *w.end))
            normals.append(w.outward_normal)
            owner.append(b)
            teff.append(w.material.t_eff)
        bstart.append(len(rows))
    return SceneArrays(
        walls=np.asarray(rows, dtype=np.float64).reshape(-1, 4),
        normals=np.asarray(normals, dtype=np.float64).reshape(-1, 2),
        wall_building=np.asarray(owner, dtype=np.int64),
        wall_teff=np.asarray(teff, dtype=np.float64),
        bstart=np.asarray(bstart, dtype=np.int64),
    )


@dataclass(frozen=True)
class Scene:
    buildings: tuple[Building, ...]
    tx_sites: tuple[TxSite, ...] = field(default=())
    unit: str = "m"

    def __post_init__(self):
        if self.unit != "m":
            raise SceneError(f"only metre scenes are supported, got unit {self.unit!r}")

    @classmethod
    def build(cls, buildings: Sequence[dict], tx_sites: Sequence[TxSite] = ()) -> "Scene":
        """Assemble a scene from dicts with ``footprint``, ``height``, ``materials``, ``label``."""
        out, offset = [], 0
        for i, spec in enumerate(buildings):
            bld = Building.from_footprint(spec["footprint"], spec["height"], spec["materials"],
                                          spec.get("label", f"B{i}"), i, offset)
            offset += len(bld.walls)
            out.append(bld)
        return cls(tuple(out), tuple(tx_sites))

    @cached_property
    def arrays(self) -> SceneArrays:
        return _flatten(self.buildings)

    @property
    def walls(self) -> tuple[Wall, ...]:
        return tuple(w for b in self.buildings for w in b.walls)

    def tx(self, label: str) -> TxSite:
        for t in self.tx_sites:
            if t.label == label:
                return t
        raise KeyError(f"no tx site labelled {label!r}")

    def building_at(self, point: Sequence[float]) -> int:
        """Index of the building whose footprint holds ``point`` (boundary included), or -1."""
        a = self.arrays
        return int(K.locate_building(float(point[0]), float(point[1]), a.walls, a.bstart,
                                     BOUNDARY_TOL))

    def terminal(self, position: Sequence[float]) -> Terminal:
        """Place a terminal, locating its host building."""
        pos = tuple(float(v) for v in position)
        if len(pos) == 2:
            pos = (*pos, 1.5)
        host = self.building_at(pos)
        if host < 0:
            raise GeometryError(f"terminal at {pos[:2]} is not inside any building")
        return Terminal(pos, host)

    def translated(self, dx: float, dy: float) -> "Scene":
        blds = []
        for i, b in enumerate(self.buildings):
            blds.append(Building.from_footprint(
                [(x + dx, y + dy) for x, y in b.footprint], b.height,
                [w.material for w in b.walls], b.label, i, b.walls[0].index))
        txs = tuple(TxSite((t.position[0] + dx, t.position[1] + dy, t.position[2]), t.label)
                    for t in self.tx_sites)
        return Scene(tuple(blds), txs, self.unit)


def _xyz(p) -> tuple[float, float, float]:
    if isinstance(p, (TxSite, Terminal)):
        p = p.position
    return (float(p[0]), float(p[1]), float(p[2]) if len(p) > 2 else 0.0)


def wall_entry_point(wall: Wall, terminal: Terminal) -> tuple[tuple[float, float], float]:
    """Point of ``wall`` nearest the terminal and the horizontal indoor depth to it."""
    px, py = terminal.position[0], terminal.position[1]
    ex, ey = K.project_clamped(px, py, *wall.start, *wall.end)
    return (ex, ey), math.hypot(px - ex, py - ey)


def incidence_angle(tx, entry: Sequence[float], wall: Wall) -> float:
    """Angle (rad) between the ray tx->entry and the wall's inward normal.

    ``tx`` is a TxSite or a 3-D point; ``entry`` may be 2-D (height 0) or 3-D.  ``cos`` of the result equals
    d_s / r with d_s the horizontal standoff of the tx from the wall plane.
    """
    tx_, ty_, tz_ = _xyz(tx)
    ex, ey, ez = _xyz(entry)
    ds, _, phi = K.incidence(tx_, ty_, tz_, ex, ey, ez, *wall.start, *wall.outward_normal)
    if ds <= 0:
        raise DomainError(f"tx is not on the outward side of the wall (d_s={ds:.6g})")
    return phi


def standoff(tx: TxSite, wall: Wall) -> float:
    return wall.signed_distance(tx.position)


def _tx_building(scene: Scene, tx: TxSite) -> int:
    # a rooftop site does not shadow itself
    return scene.building_at(tx.position)


def is_wall_illuminated(tx: TxSite, wall: Wall, scene: Scene,
                        point: Optional[Sequence[float]] = None) -> bool:
    """Back-face test plus 2-D occlusion of the segment tx->``point``.

    ``point`` defaults to the wall midpoint; pass a terminal's entry point to
    test the ray that actually matters for it.
    """
    if wall.signed_distance(tx.position) <= 0:
        return False
    if point is None:
        point = ((wall.start[0] + wall.end[0]) / 2, (wall.start[1] + wall.end[1]) / 2)
    a = scene.arrays
    return not K.segment_blocked(float(tx.position[0]), float(tx.position[1]),
                                 float(point[0]), float(point[1]),
                                 a.walls, a.wall_building, _tx_building(scene, tx))


def reflection_path(tx: TxSite, reflector: Wall, entry_wall: Wall, terminal: Terminal,
                    scene: Scene) -> Optional[PathGeometry]:
    """Specular path tx -> reflector -> entry_wall built with the image method.

    Returns None when the reflection point falls off the reflector, either leg
    is blocked, or the ray would reach the entry wall from inside.
    """
    if reflector == entry_wall or (reflector.index >= 0 and reflector.index == entry_wall.index):
        raise DomainError("reflector and entry wall must be different walls")
    if reflector.building >= 0 and reflector.building == entry_wall.building:
        raise DomainError("reflector must belong to a different building than the entry wall")
    (ex, ey), depth = wall_entry_point(entry_wall, terminal)
    a = scene.arrays
    m, fw = _wall_slot(scene, reflector), _wall_slot(scene, entry_wall)
    buf = np.empty(6)
    tx_, ty_, tz_ = _xyz(tx.position)
    ok = K.reflected_candidate(tx_, ty_, tz_, ex, ey, float(terminal.position[2]), m, fw,
                               a.walls, a.normals, a.wall_building, _tx_building(scene, tx), buf)
    if not ok:
        return None
    return PathGeometry(PathKind.REFLECTED, float(buf[0]), float(buf[1]), depth, entry_wall,
                        (ex, ey), float(buf[2]), (float(buf[3]), float(buf[4])), reflector)


def _wall_slot(scene: Scene, wall: Wall) -> int:
    if 0 <= wall.index < len(scene.arrays.walls):
        row = scene.arrays.walls[wall.index]
        if tuple(row) == (*wall.start, *wall.end):
            return wall.index
    for i, row in enumerate(scene.arrays.walls):
        if tuple(row) == (*wall.start, *wall.end):
            return i
    raise GeometryError("wall does not belong to the scene")


def path_table(scene: Scene, tx: TxSite, terminal: Terminal, consts) -> np.ndarray:
    """Raw (3, NCOL) kernel table for one terminal; see ``_kernels``."""
    a = scene.arrays
    out = np.empty((3, K.NCOL))
    tx_, ty_, tz_ = _xyz(tx.position)
    px, py, pz = terminal.position
    K.cell_paths(tx_, ty_, tz_, float(px), float(py), float(pz), terminal.host_building,
                 a.walls, a.normals, a.wall_building, a.wall_teff, a.bstart,
                 _tx_building(scene, tx), consts.kernel_vector(), consts.wall_materials, out)
    return out


def enumerate_paths(scene: Scene, tx: TxSite, terminal: Terminal, consts=None) -> list[PathGeometry]:
    """Admissible subset of {Direct, SideWall, Reflected} paths for a terminal.

    Direct enters through the nearest illuminated wall of the host building,
    SideWall through the other illuminated wall with the largest side-term
    gain, and Reflected is the strongest image-method reflection off any wall
    of another building into the Direct entry point (or the nearest wall when
    there is no Direct path).
    """
    from .propagation import PropagationConstants

    consts = consts or PropagationConstants()
    table = path_table(scene, tx, terminal, consts)
    walls = scene.walls
    paths = []
    for k in range(3):
        row = table[k]
        if row[K.VALID] != 1.0:
            continue
        kind = KIND_BY_INDEX[k]
        wall = walls[int(row[K.WALL])]
        if kind is PathKind.REFLECTED:
            entry, _ = wall_entry_point(wall, terminal)
            paths.append(PathGeometry(kind, float(row[K.RANGE]), float(row[K.PHI]),
                                      float(row[K.DEPTH]), wall, entry, float(row[K.GRAZING]),
                                      (float(row[K.RX]), float(row[K.RY])),
                                      walls[int(row[K.REFLECTOR])]))
        else:
            paths.append(PathGeometry(kind, float(row[K.RANGE]), float(row[K.PHI]),
                                      float(row[K.DEPTH]), wall,
                                      (float(row[K.RX]), float(row[K.RY]))))
    return paths
