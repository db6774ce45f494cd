"""Scalar hot kernels for path enumeration and coverage grids.

Every function here works on a flattened scene (plain float/int arrays) so it
can be compiled with ``numba.njit``.  Set ``O2I_DISABLE_NUMBA=1`` to run the
pure-Python/numpy fallback instead; the occlusion test then switches to a
vectorised numpy implementation and everything else runs uncompiled.

Row layout of the ``(3, NCOL)`` path table filled by :func:`cell_paths`
(row 0 direct, row 1 side wall, row 2 reflected):

    VALID, WALL, RANGE, PHI, DEPTH, GRAZING, RX, RY, GAIN, REFLECTOR
"""

from __future__ import annotations

import math
import os

import numpy as np

_DISABLE = os.environ.get("O2I_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLE:
        raise ImportError
    import numba

    USE_NUMBA = True

    def jit(fn):
        return numba.njit(cache=True, nogil=True)(fn)

except ImportError:
    USE_NUMBA = False

    def jit(fn):
        return fn


BACKEND = "numba" if USE_NUMBA else "numpy"

# segment parameter tolerance; touching a segment at its own endpoints is not a block
EPS = 1e-9

KIND_DIRECT = 0
KIND_SIDE = 1
KIND_REFLECTED = 2
KIND_NONE = -2
KIND_OUTDOOR = -1

NCOL = 10
VALID, WALL, RANGE, PHI, DEPTH, GRAZING, RX, RY, GAIN, REFLECTOR = range(NCOL)


@jit
def project_clamped(px, py, ax, ay, bx, by):
    dx = bx - ax
    dy = by - ay
    t = ((px - ax) * dx + (py - ay) * dy) / (dx * dx + dy * dy)
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return ax + t * dx, ay + t * dy


@jit
def reflection_coeff_sq(grazing, n2):
    return 0.3 + 0.7 * math.exp(-(4.0 / n2) * grazing)


@jit
def term_gain_value(lam_fac, phi, t_eff, kappa, depth, rng, refl):
    c = math.cos(phi)
    return lam_fac * c * c * t_eff * math.exp(-kappa * depth) * refl / (rng * rng)


@jit
def incidence(sx, sy, sz, ex, ey, ez, ax, ay, nx, ny):
    """Standoff, 3-D range and incidence angle of the ray S->E on a wall.

    The angle is taken with ``atan2`` of the tangential and normal components
    of the ray, which equals ``arccos(d_s / r)`` without its loss of precision
    near normal incidence.
    """
    ds = (sx - ax) * nx + (sy - ay) * ny
    vx = ex - sx
    vy = ey - sy
    vz = ez - sz
    r = math.sqrt(vx * vx + vy * vy + vz * vz)
    # v . n == -ds for E on the wall line
    tx = vx + ds * nx
    ty = vy + ds * ny
    tang = math.sqrt(tx * tx + ty * ty + vz * vz)
    return ds, r, math.atan2(tang, ds)


@jit
def _segment_blocked_loop(px, py, qx, qy, walls, wall_building, skip):
    rx = qx - px
    ry = qy - py
    for w in range(walls.shape[0]):
        if wall_building[w] == skip:
            continue
        ax = walls[w, 0]
        ay = walls[w, 1]
        sx = walls[w, 2] - ax
        sy = walls[w, 3] - ay
        den = rx * sy - ry * sx
        if den == 0.0:
            continue
        apx = ax - px
        apy = ay - py
        t = (apx * sy - apy * sx) / den
        u = (apx * ry - apy * rx) / den
        if EPS < t < 1.0 - EPS and -EPS <= u <= 1.0 + EPS:
            return True
    return False


def _segment_blocked_numpy(px, py, qx, qy, walls, wall_building, skip):
    rx = qx - px
    ry = qy - py
    ax = walls[:, 0]
    ay = walls[:, 1]
    sx = walls[:, 2] - ax
    sy = walls[:, 3] - ay
    den = rx * sy - ry * sx
    live = (wall_building != skip) & (den != 0.0)
    if not live.any():
        return False
    den = den[live]
    apx = ax[live] - px
    apy = ay[live] - py
    # near-parallel pairs overflow to +-inf, which correctly counts as a miss
    with np.errstate(over="ignore"):
        t = (apx * sy[live] - apy * sx[live]) / den
        u = (apx * ry - apy * rx) / den
    hit = (t > EPS) & (t < 1.0 - EPS) & (u >= -EPS) & (u <= 1.0 + EPS)
    return bool(hit.any())


segment_blocked = _segment_blocked_loop if USE_NUMBA else _segment_blocked_numpy


@jit
def point_in_building(px, py, walls, w0, w1, tol):
    """1 if (px, py) is inside or within ``tol`` of the footprint boundary, else 0."""
    inside = False
    for w in range(w0, w1):
        ax = walls[w, 0]
        ay = walls[w, 1]
        bx = walls[w, 2]
        by = walls[w, 3]
        ex, ey = project_clamped(px, py, ax, ay, bx, by)
        if math.hypot(px - ex, py - ey) <= tol:
            return 1
        if (ay > py) != (by > py):
            xc = ax + (py - ay) * (bx - ax) / (by - ay)
            if px < xc:
                inside = not inside
    return 1 if inside else 0


@jit
def locate_building(px, py, walls, bstart, tol):
    for b in range(bstart.shape[0] - 1):
        if point_in_building(px, py, walls, bstart[b], bstart[b + 1], tol) == 1:
            return b
    return -1


@jit
def reflected_candidate(tx, ty, tz, ex, ey, ez, m, fw, walls, normals, wall_building, tx_building, out):
    """Image-method reflection off wall ``m`` into entry point E on wall ``fw``.

    Fills ``out`` = (range, phi, grazing, rx, ry, rz) and returns True when the
    specular path exists, reaches E from outside ``fw``, and is unobstructed.
    """
    ax = walls[m, 0]
    ay = walls[m, 1]
    bx = walls[m, 2]
    by = walls[m, 3]
    nx = normals[m, 0]
    ny = normals[m, 1]
    d_tx = (tx - ax) * nx + (ty - ay) * ny
    if d_tx <= 0.0:
        return False
    d_e = (ex - ax) * nx + (ey - ay) * ny
    if d_e <= 0.0:
        return False
    ix = tx - 2.0 * d_tx * nx
    iy = ty - 2.0 * d_tx * ny
    s = d_tx / (d_tx + d_e)
    rx = ix + s * (ex - ix)
    ry = iy + s * (ey - iy)
    rz = tz + s * (ez - tz)
    dx = bx - ax
    dy = by - ay
    u = ((rx - ax) * dx + (ry - ay) * dy) / (dx * dx + dy * dy)
    if u < 0.0 or u > 1.0:
        return False
    fax = walls[fw, 0]
    fay = walls[fw, 1]
    fnx = normals[fw, 0]
    fny = normals[fw, 1]
    d_r, _, phi = incidence(rx, ry, rz, ex, ey, ez, fax, fay, fnx, fny)
    if d_r <= 0.0:
        return False
    # incoming leg tx->R: normal component -d_tx, tangential part below
    vx = rx - tx + d_tx * nx
    vy = ry - ty + d_tx * ny
    vz = rz - tz
    grazing = math.atan2(d_tx, math.sqrt(vx * vx + vy * vy + vz * vz))
    if segment_blocked(tx, ty, rx, ry, walls, wall_building, tx_building):
        return False
    if segment_blocked(rx, ry, ex, ey, walls, wall_building, -1):
        return False
    ux = ex - ix
    uy = ey - iy
    uz = ez - tz
    out[0] = math.sqrt(ux * ux + uy * uy + uz * uz)
    out[1] = phi
    out[2] = grazing
    out[3] = rx
    out[4] = ry
    out[5] = rz
    return True


@jit
def cell_paths(tx, ty, tz, px, py, pz, host, walls, normals, wall_building, wall_teff,
               bstart, tx_building, consts, use_material, out):
    """Admissible direct / side-wall / reflected paths for one terminal.

    ``consts`` = (lambda^2 / (8 pi^2), t_eff, t_eff_side, kappa_in, n2).
    """
    lam_fac = consts[0]
    kappa = consts[3]
    n2 = consts[4]
    for k in range(3):
        for c in range(NCOL):
            out[k, c] = 0.0
        out[k, WALL] = -1.0
        out[k, REFLECTOR] = -1.0

    w0 = bstart[host]
    w1 = bstart[host + 1]
    nw = w1 - w0
    lit = np.zeros(nw, dtype=np.bool_)
    cand = np.empty((nw, 5))  # ex, ey, depth, r, phi

    direct = -1
    nearest = -1
    for i in range(nw):
        w = w0 + i
        ex, ey = project_clamped(px, py, walls[w, 0], walls[w, 1], walls[w, 2], walls[w, 3])
        depth = math.hypot(px - ex, py - ey)
        ds, r, phi = incidence(tx, ty, tz, ex, ey, pz, walls[w, 0], walls[w, 1],
                               normals[w, 0], normals[w, 1])
        cand[i, 0] = ex
        cand[i, 1] = ey
        cand[i, 2] = depth
        cand[i, 3] = r
        cand[i, 4] = phi
        if nearest < 0 or depth < cand[nearest, 2]:
            nearest = i
        if ds > 0.0 and not segment_blocked(tx, ty, ex, ey, walls, wall_building, tx_building):
            lit[i] = True
            if direct < 0 or depth < cand[direct, 2]:
                direct = i

    if direct >= 0:
        t_eff = wall_teff[w0 + direct] if use_material else consts[1]
        out[0, VALID] = 1.0
        out[0, WALL] = w0 + direct
        out[0, RANGE] = cand[direct, 3]
        out[0, PHI] = cand[direct, 4]
        out[0, DEPTH] = cand[direct, 2]
        out[0, RX] = cand[direct, 0]
        out[0, RY] = cand[direct, 1]
        out[0, GAIN] = term_gain_value(lam_fac, cand[direct, 4], t_eff, kappa,
                                       cand[direct, 2], cand[direct, 3], 1.0)

        best = -1.0
        for i in range(nw):
            if i == direct or not lit[i]:
                continue
            t_side = wall_teff[w0 + i] if use_material else consts[2]
            g = term_gain_value(lam_fac, cand[i, 4], t_side, kappa, cand[i, 2],
                                cand[i, 3] + cand[i, 2], 1.0)
            if g > best:
                best = g
                out[1, VALID] = 1.0
                out[1, WALL] = w0 + i
                out[1, RANGE] = cand[i, 3]
                out[1, PHI] = cand[i, 4]
                out[1, DEPTH] = cand[i, 2]
                out[1, RX] = cand[i, 0]
                out[1, RY] = cand[i, 1]
                out[1, GAIN] = g

    front = direct if direct >= 0 else nearest
    if front >= 0:
        fw = w0 + front
        ex = cand[front, 0]
        ey = cand[front, 1]
        depth = cand[front, 2]
        t_eff = wall_teff[fw] if use_material else consts[1]
        buf = np.empty(6)
        best = -1.0
        for m in range(walls.shape[0]):
            if wall_building[m] == host:
                continue
            if not reflected_candidate(tx, ty, tz, ex, ey, pz, m, fw, walls, normals,
                                       wall_building, tx_building, buf):
                continue
            refl = reflection_coeff_sq(buf[2], n2)
            g = term_gain_value(lam_fac, buf[1], t_eff, kappa, depth, buf[0], refl)
            if g > best:
                best = g
                out[2, VALID] = 1.0
                out[2, WALL] = fw
                out[2, RANGE] = buf[0]
                out[2, PHI] = buf[1]
                out[2, DEPTH] = depth
                out[2, GRAZING] = buf[2]
                out[2, RX] = buf[3]
                out[2, RY] = buf[4]
                out[2, GAIN] = g
                out[2, REFLECTOR] = m


@jit
def coverage_rows(xs, ys, z, tx, ty, tz, walls, normals, wall_building, wall_teff, bstart,
                  tx_building, consts, use_material, row0, row1, gain_out, kind_out):
    """Fill rows ``row0:row1`` of the (ny, nx) linear-gain and dominant-kind grids.

    Outdoor cells get NaN gain and kind -1; indoor cells without any admissible
    path get gain 0 and kind -2.
    """
    table = np.empty((3, NCOL))
    for j in range(row0, row1):
        for i in range(xs.shape[0]):
            host = locate_building(xs[i], ys[j], walls, bstart, 1e-9)
            if host < 0:
                gain_out[j, i] = np.nan
                kind_out[j, i] = KIND_OUTDOOR
                continue
            cell_paths(tx, ty, tz, xs[i], ys[j], z, host, walls, normals, wall_building,
                       wall_teff, bstart, tx_building, consts, use_material, table)
            total = 0.0
            kind = KIND_NONE
            best = -1.0
            for k in range(3):
                if table[k, VALID] == 1.0:
                    total += table[k, GAIN]
                    if table[k, GAIN] > best:
                        best = table[k, GAIN]
                        kind = k
            gain_out[j, i] = total
            kind_out[j, i] = kind
