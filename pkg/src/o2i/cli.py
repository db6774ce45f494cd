"""``o2i`` batch command line: predict, coverage, fit, compare, budget.

Exit codes: 0 ok, 1 model error, 2 bad input (arguments, scene or CSV),
3 geometry error (e.g. terminal outside every building).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .baselines import GppO2iParams
from .calibration import OVERALL, compare_models, fit_slope_intercept, fmt, group_records
from .coverage import coverage_grid
from .errors import DegenerateFit, GeometryError, O2IError, SceneError
from .fileio import MeasurementFormatError, load_scene, read_measurements
from .linkbudget import (LinkBudget, coverage_range, noise_floor_dbm, normal_incidence_profile,
                         snr_db, standoff_profile)
from .propagation import PropagationConstants, oi_path_gain

EXIT_MODEL, EXIT_INPUT, EXIT_GEOMETRY = 1, 2, 3


class CliError(Exception):
    def __init__(self, msg: str, code: int):
        super().__init__(msg)
        self.code = code


def _add_prop_flags(p):
    g = p.add_argument_group("propagation constants")
    g.add_argument("--freq-ghz", type=float, default=28.0)
    g.add_argument("--t-eff-db", type=float, default=None, help="front-wall transmission (dB, default -46.02)")
    g.add_argument("--t-eff-side-db", type=float, default=None, help="side-wall transmission (dB, default -38.24)")
    g.add_argument("--kappa", type=float, default=0.12, help="indoor absorption (Np/m on power)")
    g.add_argument("--n2", type=float, default=math.sqrt(5.0), help="reflector refraction index")
    g.add_argument("--wall-materials", action="store_true",
                   help="take wall transmission from the scene's wall materials")


def _add_budget_flags(p):
    g = p.add_argument_group("link budget")
    g.add_argument("--tx-dbm", type=float, default=30.0)
    g.add_argument("--tx-dbi", type=float, default=25.0)
    g.add_argument("--rx-dbi", type=float, default=12.0)
    g.add_argument("--bw-mhz", type=float, default=100.0)
    g.add_argument("--nf-db", type=float, default=9.0)
    g.add_argument("--snr-db", type=float, default=8.0)


def _add_gpp_flags(p):
    g = p.add_argument_group("3GPP UMa O2I baseline")
    los = g.add_mutually_exclusive_group()
    los.add_argument("--gpp-los", dest="gpp_los", action="store_true", default=True)
    los.add_argument("--gpp-nlos", dest="gpp_los", action="store_false")
    g.add_argument("--glass-fraction", type=float, default=0.3)
    g.add_argument("--indoor-depth", type=float, default=6.0)


def _consts(a) -> PropagationConstants:
    kw = {"frequency": a.freq_ghz * 1e9, "kappa_in": a.kappa, "n2": a.n2,
          "wall_materials": a.wall_materials}
    if a.t_eff_db is not None:
        kw["t_eff"] = 10.0 ** (a.t_eff_db / 10.0)
    if a.t_eff_side_db is not None:
        kw["t_eff_side"] = 10.0 ** (a.t_eff_side_db / 10.0)
    return PropagationConstants(**kw)


def _budget(a) -> LinkBudget:
    return LinkBudget(a.tx_dbm, a.tx_dbi, a.rx_dbi, a.bw_mhz * 1e6, a.nf_db, a.snr_db)


def _gpp(a, consts: PropagationConstants) -> GppO2iParams:
    return GppO2iParams(frequency=consts.frequency, glass_fraction=a.glass_fraction,
                        indoor_depth=a.indoor_depth, los=a.gpp_los)


def _scene_and_tx(a):
    scene = load_scene(a.scene)
    try:
        tx = scene.tx(a.tx)
    except KeyError:
        raise CliError(f"--tx: no tx site labelled {a.tx!r} (have: "
                       f"{', '.join(t.label for t in scene.tx_sites)})", EXIT_INPUT) from None
    return scene, tx


def cmd_predict(a, out):
    scene, tx = _scene_and_tx(a)
    consts, budget = _consts(a), _budget(a)
    terminal = scene.terminal(a.at)
    res = oi_path_gain(scene, tx, terminal, consts)
    snr = snr_db(res.total_db, budget)
    if a.json:
        for t in res.terms:
            g = t.geometry
            out.write(json.dumps({
                "kind": t.kind.value, "path_gain_db": round(t.db, 4),
                "range_m": round(g.outdoor_range, 4),
                "incidence_deg": round(math.degrees(g.incidence_angle), 4),
                "indoor_depth_m": round(g.indoor_depth, 4),
                "grazing_deg": None if g.grazing_angle is None else round(math.degrees(g.grazing_angle), 4),
            }) + "\n")
        out.write(json.dumps({"kind": "total", "path_gain_db": _json_db(res.total_db),
                              "snr_db": _json_db(snr)}) + "\n")
        return 0
    out.write(f"{'term':<10} {'gain_db':>10} {'range_m':>10} {'phi_deg':>8} {'depth_m':>8}\n")
    for t in res.terms:
        g = t.geometry
        out.write(f"{t.kind.value:<10} {fmt(t.db):>10} {fmt(g.outdoor_range):>10} "
                  f"{math.degrees(g.incidence_angle):>8.2f} {g.indoor_depth:>8.2f}\n")
    out.write(f"{'total':<10} {fmt(res.total_db):>10}\n")
    out.write(f"{'snr_db':<10} {fmt(snr):>10}\n")
    return 0


def _json_db(v: float):
    return round(v, 4) if math.isfinite(v) else None


def cmd_coverage(a, out):
    scene, tx = _scene_and_tx(a)
    grid = coverage_grid(scene, tx, tuple(a.origin), a.spacing, a.nx, a.ny, a.z,
                         _consts(a), _budget(a), a.workers)
    text = grid.to_csv()
    if a.output:
        with open(a.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    return 0


def cmd_fit(a, out):
    records = read_measurements(a.measurements)
    if a.subset:
        keep = set(a.subset)
        records = [r for r in records if r.subset_label in keep]
    groups = group_records(records)
    out.write("subset,n,intercept_db,rmse_db,n_records\n")
    rows = list(groups.items())
    if len(groups) > 1 or not groups:
        rows.append((OVERALL, records))
    for label, recs in rows:
        try:
            f = fit_slope_intercept(recs)
        except DegenerateFit as exc:
            out.write(f"# {label}: {exc}\n")
            continue
        out.write(f"{label},{fmt(f.exponent_n)},{fmt(f.intercept_1m_db)},{fmt(f.rmse_db)},{f.n_records}\n")
    return 0


def cmd_compare(a, out):
    records = read_measurements(a.measurements)
    scene = load_scene(a.scene)
    consts = _consts(a)
    table = compare_models(records, scene, consts, _gpp(a, consts))
    out.write(table.to_csv())
    return 0


def _profile(spec: str, depth: float, consts):
    if spec == "normal":
        return normal_incidence_profile(depth, consts), 1.0
    if spec.startswith("standoff:"):
        try:
            ds = float(spec.split(":", 1)[1])
        except ValueError:
            raise CliError(f"--profile: bad standoff in {spec!r}", EXIT_INPUT) from None
        if ds <= 0:
            raise CliError("--profile: standoff must be > 0", EXIT_INPUT)
        return standoff_profile(ds, depth, consts), ds
    raise CliError(f"--profile: expected 'normal' or 'standoff:<d_s>', got {spec!r}", EXIT_INPUT)


def cmd_budget(a, out):
    consts, budget = _consts(a), _budget(a)
    profile, r_min = _profile(a.profile, a.depth, consts)
    nf = noise_floor_dbm(budget.bandwidth_hz, budget.noise_figure_db)
    out.write(f"noise_floor_dbm,{fmt(nf)}\n")
    out.write(f"threshold_path_gain_db,{fmt(budget.threshold_path_gain_db)}\n")
    res = coverage_range(profile, budget, (r_min, a.r_max))
    out.write(f"coverage_range_m,{res.range_m:.2f}\n")
    out.write(f"unbounded_in_window,{str(res.unbounded).lower()}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="o2i", description="mmWave outdoor-to-indoor coverage prediction")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("predict", help="per-path and total path gain for one terminal")
    s.add_argument("scene")
    s.add_argument("--tx", required=True)
    s.add_argument("--at", nargs=3, type=float, required=True, metavar=("X", "Y", "Z"))
    s.add_argument("--json", action="store_true", help="one JSON object per line")
    _add_prop_flags(s)
    _add_budget_flags(s)
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("coverage", help="path gain / SNR grid as CSV")
    s.add_argument("scene")
    s.add_argument("--tx", required=True)
    s.add_argument("--origin", nargs=2, type=float, required=True, metavar=("X0", "Y0"))
    s.add_argument("--spacing", type=float, required=True)
    s.add_argument("--nx", type=int, required=True)
    s.add_argument("--ny", type=int, required=True)
    s.add_argument("--z", type=float, default=1.5, help="terminal height (m)")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("-o", "--output")
    _add_prop_flags(s)
    _add_budget_flags(s)
    s.set_defaults(func=cmd_coverage)

    s = sub.add_parser("fit", help="slope-intercept fit per subset and pooled")
    s.add_argument("measurements")
    s.add_argument("--subset", action="append")
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("compare", help="fit / 3GPP / theory RMSE table")
    s.add_argument("measurements")
    s.add_argument("scene")
    _add_prop_flags(s)
    _add_gpp_flags(s)
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("budget", help="noise floor and coverage range on a canonical profile")
    s.add_argument("--profile", default="normal", help="normal | standoff:<d_s>")
    s.add_argument("--depth", type=float, default=6.0, help="indoor depth (m)")
    s.add_argument("--r-max", type=float, default=1000.0)
    _add_prop_flags(s)
    _add_budget_flags(s)
    s.set_defaults(func=cmd_budget)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except CliError as exc:
        print(f"o2i: {exc}", file=sys.stderr)
        return exc.code
    except (SceneError, MeasurementFormatError, OSError) as exc:
        print(f"o2i: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GeometryError as exc:
        print(f"o2i: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except (O2IError, ValueError) as exc:
        print(f"o2i: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
