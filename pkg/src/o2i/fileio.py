"""Scene JSON and measurement CSV readers/writers."""

from __future__ import annotations

import csv
import json
import math
from importlib import resources
from pathlib import Path
from typing import Any

from .calibration import MeasurementRecord
from .errors import DomainError, SceneError
from .geometry import Building, Scene, TxSite, WallMaterial

MEASUREMENT_HEADER = ("subset", "range_m", "path_gain_db")
MEASUREMENT_OPTIONAL = ("x", "y", "z", "tx_label")


def _num(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SceneError(f"{where}: expected a number, got {value!r}")
    v = float(value)
    if not math.isfinite(v):
        raise SceneError(f"{where}: must be finite")
    return v


def _material(spec: Any, where: str) -> WallMaterial:
    if not isinstance(spec, dict):
        raise SceneError(f"{where}: expected an object")
    has_lin, has_db = "t_eff" in spec, "t_eff_db" in spec
    if has_lin == has_db:
        raise SceneError(f"{where}: exactly one of 't_eff' or 't_eff_db' is required")
    glass = _num(spec.get("glass_fraction", 0.3), f"{where}.glass_fraction")
    label = str(spec.get("label", ""))
    if has_lin:
        return WallMaterial(_num(spec["t_eff"], f"{where}.t_eff"), glass, label)
    t_db = _num(spec["t_eff_db"], f"{where}.t_eff_db")
    if t_db > 0:
        raise SceneError(f"{where}.t_eff_db: must be <= 0 dB, got {t_db}")
    return WallMaterial.from_db(t_db, glass, label)


def scene_from_dict(doc: dict) -> Scene:
    if not isinstance(doc, dict):
        raise SceneError("scene document must be an object")
    unit = doc.get("scene", {}).get("unit", doc.get("unit", "m"))
    if unit != "m":
        raise SceneError(f"scene.unit: only 'm' is supported, got {unit!r}")
    blds = doc.get("buildings")
    if not isinstance(blds, list) or not blds:
        raise SceneError("buildings: expected a non-empty array")
    buildings, offset = [], 0
    for i, b in enumerate(blds):
        where = f"buildings[{i}]"
        if not isinstance(b, dict):
            raise SceneError(f"{where}: expected an object")
        fp = b.get("footprint")
        if not isinstance(fp, list):
            raise SceneError(f"{where}.footprint: expected an array of [x, y]")
        pts = []
        for j, p in enumerate(fp):
            if not isinstance(p, (list, tuple)) or len(p) != 2:
                raise SceneError(f"{where}.footprint[{j}]: expected [x, y]")
            pts.append((_num(p[0], f"{where}.footprint[{j}]"), _num(p[1], f"{where}.footprint[{j}]")))
        walls = b.get("walls")
        if not isinstance(walls, list):
            raise SceneError(f"{where}.walls: expected an array")
        mats = [_material(w, f"{where}.walls[{j}]") for j, w in enumerate(walls)]
        height = _num(b.get("height"), f"{where}.height")
        try:
            bld = Building.from_footprint(pts, height, mats, str(b.get("label", f"B{i}")), i, offset)
        except SceneError as exc:
            raise SceneError(f"{where}: {exc}") from None
        offset += len(bld.walls)
        buildings.append(bld)
    txs = []
    for i, t in enumerate(doc.get("tx_sites", [])):
        where = f"tx_sites[{i}]"
        if not isinstance(t, dict):
            raise SceneError(f"{where}: expected an object")
        pos = tuple(_num(t.get(k), f"{where}.{k}") for k in ("x", "y", "z"))
        try:
            txs.append(TxSite(pos, str(t.get("label", f"Tx{i + 1}"))))
        except SceneError as exc:
            raise SceneError(f"{where}: {exc}") from None
    labels = [t.label for t in txs]
    if len(set(labels)) != len(labels):
        raise SceneError("tx_sites: labels must be unique")
    return Scene(tuple(buildings), tuple(txs))


def scene_to_dict(scene: Scene) -> dict:
    return {
        "scene": {"unit": scene.unit},
        "buildings": [
            {
                "label": b.label,
                "height": b.height,
                "footprint": [list(p) for p in b.footprint],
                "walls": [{"t_eff": w.material.t_eff, "glass_fraction": w.material.glass_fraction,
                           "label": w.material.label} for w in b.walls],
            }
            for b in scene.buildings
        ],
        "tx_sites": [{"x": t.position[0], "y": t.position[1], "z": t.position[2], "label": t.label}
                     for t in scene.tx_sites],
    }


def load_scene(path: str | Path) -> Scene:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SceneError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return scene_from_dict(doc)


def dump_scene(scene: Scene, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scene_to_dict(scene), indent=2) + "\n", encoding="utf-8")


def fixture_scene(name: str = "fig3_canyon") -> Scene:
    """Load a scene shipped with the package."""
    text = resources.files("o2i.data").joinpath(f"{name}.json").read_text(encoding="utf-8")
    return scene_from_dict(json.loads(text))


def fixture_path(name: str = "fig3_canyon") -> Path:
    return Path(str(resources.files("o2i.data").joinpath(f"{name}.json")))


class MeasurementFormatError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


def read_measurements(path: str | Path) -> list[MeasurementRecord]:
    """Parse ``subset,range_m,path_gain_db[,x,y,z,tx_label]`` rows.

    Line numbers in errors count the header as line 1.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_measurements(fh)


def parse_measurements(lines) -> list[MeasurementRecord]:
    reader = csv.reader(lines)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise MeasurementFormatError(1, "empty file") from None
    if tuple(header[:3]) != MEASUREMENT_HEADER:
        raise MeasurementFormatError(1, f"header must start with {','.join(MEASUREMENT_HEADER)}")
    extra = tuple(header[3:])
    if extra and extra != MEASUREMENT_OPTIONAL:
        raise MeasurementFormatError(1, f"optional columns must be {','.join(MEASUREMENT_OPTIONAL)}")
    records = []
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise MeasurementFormatError(line, f"expected {len(header)} fields, got {len(row)}")
        try:
            rng = float(row[1])
        except ValueError:
            raise MeasurementFormatError(line, f"range_m is not a number: {row[1]!r}") from None
        try:
            pg = float(row[2])
        except ValueError:
            raise MeasurementFormatError(line, f"path_gain_db is not a number: {row[2]!r}") from None
        pos, tx = None, None
        if extra:
            try:
                pos = (float(row[3]), float(row[4]), float(row[5]))
            except ValueError:
                raise MeasurementFormatError(line, "x, y, z must be numbers") from None
            tx = row[6].strip()
        try:
            records.append(MeasurementRecord(rng, pg, row[0].strip(), pos, tx))
        except DomainError as exc:
            raise MeasurementFormatError(line, str(exc)) from None
    return records


def write_measurements(records, path_or_buf) -> None:
    with_geom = any(r.position is not None for r in records)
    own = isinstance(path_or_buf, (str, Path))
    fh = open(path_or_buf, "w", newline="", encoding="utf-8") if own else path_or_buf
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MEASUREMENT_HEADER + (MEASUREMENT_OPTIONAL if with_geom else ()))
        for r in records:
            row = [r.subset_label, repr(r.range), repr(r.path_gain_db)]
            if with_geom:
                row += [repr(v) for v in r.position] + [r.tx_label]
            w.writerow(row)
    finally:
        if own:
            fh.close()
