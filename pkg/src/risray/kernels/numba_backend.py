"""JIT-compiled sweep backend.

Same algorithm and constants as the numpy backend, compiled per point with
``numba.njit(parallel=True)``.  Parallelism is over receive points only and
each point accumulates its path fields sequentially in cell-major order, so
results are independent of the thread count.  No fast-math: rounding must
match the reference implementations.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

_EPS_PARAM = 1e-6
_EPS_M = 1e-6
_EPS_PARALLEL = 1e-15
_EPS_GRAZE = 1e-9
_EPS_POL = 1e-9


@njit(cache=True)
def _segment_hits_rect(ax, ay, az, bx, by, bz, r, r_origin, r_normal, r_ux, r_uy, r_half):
    """Open-interval occlusion test of segment a-b against rectangle ``r``."""
    dx = bx - ax
    dy = by - ay
    dz = bz - az
    length = np.sqrt(dx * dx + dy * dy + dz * dz)
    if length <= 2.0 * _EPS_M:
        return False
    nx = r_normal[r, 0]
    ny = r_normal[r, 1]
    nz = r_normal[r, 2]
    denom = dx * nx + dy * ny + dz * nz
    if abs(denom) < _EPS_PARALLEL:
        return False
    t = (
        (r_origin[r, 0] - ax) * nx
        + (r_origin[r, 1] - ay) * ny
        + (r_origin[r, 2] - az) * nz
    ) / denom
    t_len = t * length
    if t_len <= _EPS_M or t_len >= length - _EPS_M:
        return False
    hx = ax + t * dx - r_origin[r, 0]
    hy = ay + t * dy - r_origin[r, 1]
    hz = az + t * dz - r_origin[r, 2]
    u = hx * r_ux[r, 0] + hy * r_ux[r, 1] + hz * r_ux[r, 2]
    v = hx * r_uy[r, 0] + hy * r_uy[r, 1] + hz * r_uy[r, 2]
    return abs(u) <= r_half[r, 0] and abs(v) <= r_half[r, 1]


@njit(cache=True)
def _walk_chain(
    sx, sy, sz, px, py, pz,
    si, seq_flat, seq_start, img,
    r_origin, r_normal, r_ux, r_uy, r_half, r_blocking,
    pts,
):
    """Forward walk start -> bounces -> point; fills ``pts`` rows 0..k+1.

    Returns (ok, k, total_length)."""
    s0 = seq_start[si]
    s1 = seq_start[si + 1]
    k = s1 - s0
    pts[0, 0] = sx
    pts[0, 1] = sy
    pts[0, 2] = sz
    cx, cy, cz = sx, sy, sz
    for j in range(k):
        sid = seq_flat[s0 + j]
        nx = r_normal[sid, 0]
        ny = r_normal[sid, 1]
        nz = r_normal[sid, 2]
        dx = img[s0 + j, 0] - cx
        dy = img[s0 + j, 1] - cy
        dz = img[s0 + j, 2] - cz
        dn = dx * nx + dy * ny + dz * nz
        if dn >= 0.0:
            return False, k, 0.0
        t = (
            (r_origin[sid, 0] - cx) * nx
            + (r_origin[sid, 1] - cy) * ny
            + (r_origin[sid, 2] - cz) * nz
        ) / dn
        if t <= _EPS_PARAM:
            return False, k, 0.0
        cx = cx + t * dx
        cy = cy + t * dy
        cz = cz + t * dz
        hx = cx - r_origin[sid, 0]
        hy = cy - r_origin[sid, 1]
        hz = cz - r_origin[sid, 2]
        u = hx * r_ux[sid, 0] + hy * r_ux[sid, 1] + hz * r_ux[sid, 2]
        v = hx * r_uy[sid, 0] + hy * r_uy[sid, 1] + hz * r_uy[sid, 2]
        if abs(u) > r_half[sid, 0] or abs(v) > r_half[sid, 1]:
            return False, k, 0.0
        pts[j + 1, 0] = cx
        pts[j + 1, 1] = cy
        pts[j + 1, 2] = cz
    if k > 0:
        last = seq_flat[s1 - 1]
        front = (
            (px - cx) * r_normal[last, 0]
            + (py - cy) * r_normal[last, 1]
            + (pz - cz) * r_normal[last, 2]
        )
        if front <= 0.0:
            return False, k, 0.0
    pts[k + 1, 0] = px
    pts[k + 1, 1] = py
    pts[k + 1, 2] = pz

    total = 0.0
    n_rect = r_origin.shape[0]
    for i in range(k + 1):
        ax = pts[i, 0]
        ay = pts[i, 1]
        az = pts[i, 2]
        bx = pts[i + 1, 0]
        by = pts[i + 1, 1]
        bz = pts[i + 1, 2]
        dx = bx - ax
        dy = by - ay
        dz = bz - az
        total += np.sqrt(dx * dx + dy * dy + dz * dz)
        excl0 = seq_flat[s0 + i - 1] if i >= 1 else -1
        excl1 = seq_flat[s0 + i] if i < k else -1
        for r in range(n_rect):
            if not r_blocking[r] or r == excl0 or r == excl1:
                continue
            if _segment_hits_rect(
                ax, ay, az, bx, by, bz, r, r_origin, r_normal, r_ux, r_uy, r_half
            ):
                return False, k, 0.0
    return True, k, total


@njit(cache=True)
def _rx_pattern_value(cos_r, rx_kind, rx_param):
    if rx_kind == 0:
        return 1.0
    if rx_kind == 1:
        if cos_r <= 0.0:
            return 0.0
        return cos_r**rx_param
    if rx_kind == 2:
        s2 = 1.0 - cos_r * cos_r
        if s2 < 1e-24:
            return 0.0
        val = (np.cos(rx_param * cos_r) - np.cos(rx_param)) / np.sqrt(s2)
        return val * val
    return max(cos_r, 0.0)


@njit(cache=True)
def _path_value(
    pts, k, total, si, seq_flat, seq_start,
    base,
    panel_normal, pol_axis,
    r_normal, r_ux, surf_eps_c,
    lam, rx_kind, rx_param, rx_gain, rx_axis,
    vector_mode,
):
    """Complex contribution of one walked path; (ok, value)."""
    s0 = seq_start[si]
    d0x = pts[1, 0] - pts[0, 0]
    d0y = pts[1, 1] - pts[0, 1]
    d0z = pts[1, 2] - pts[0, 2]
    h0 = np.sqrt(d0x * d0x + d0y * d0y + d0z * d0z)
    d0x /= h0
    d0y /= h0
    d0z /= h0
    f_out = d0x * panel_normal[0] + d0y * panel_normal[1] + d0z * panel_normal[2]
    if f_out < 0.0:
        f_out = 0.0
    amp = base * np.sqrt(f_out)

    # field state: scalar, or explicit complex components in vector mode
    ex = 0.0 + 0.0j
    ey = 0.0 + 0.0j
    ez = 0.0 + 0.0j
    if vector_mode:
        dot_a = d0x * pol_axis[0] + d0y * pol_axis[1] + d0z * pol_axis[2]
        tx_ = pol_axis[0] - dot_a * d0x
        ty_ = pol_axis[1] - dot_a * d0y
        tz_ = pol_axis[2] - dot_a * d0z
        t_norm = np.sqrt(tx_ * tx_ + ty_ * ty_ + tz_ * tz_)
        if t_norm < _EPS_POL:
            return False, 0.0 + 0.0j
        ex = amp * (tx_ / t_norm)
        ey = amp * (ty_ / t_norm)
        ez = amp * (tz_ / t_norm)

    for j in range(k):
        sid = seq_flat[s0 + j]
        dx = pts[j + 1, 0] - pts[j, 0]
        dy = pts[j + 1, 1] - pts[j, 1]
        dz = pts[j + 1, 2] - pts[j, 2]
        h = np.sqrt(dx * dx + dy * dy + dz * dz)
        dx /= h
        dy /= h
        dz /= h
        nx = r_normal[sid, 0]
        ny = r_normal[sid, 1]
        nz = r_normal[sid, 2]
        c = -(dx * nx + dy * ny + dz * nz)
        if c < _EPS_GRAZE:
            return False, 0.0 + 0.0j
        eps_c = surf_eps_c[sid]
        w = np.sqrt(eps_c - (1.0 - c * c))
        r_s = (c - w) / (c + w)
        if vector_mode:
            r_p = (eps_c * c - w) / (eps_c * c + w)
            crx = dy * nz - dz * ny
            cry = dz * nx - dx * nz
            crz = dx * ny - dy * nx
            c_norm = np.sqrt(crx * crx + cry * cry + crz * crz)
            if c_norm < _EPS_GRAZE:
                sxh = r_ux[sid, 0]
                syh = r_ux[sid, 1]
                szh = r_ux[sid, 2]
            else:
                sxh = crx / c_norm
                syh = cry / c_norm
                szh = crz / c_norm
            drx = dx + 2.0 * c * nx
            dry = dy + 2.0 * c * ny
            drz = dz + 2.0 * c * nz
            pix = syh * dz - szh * dy
            piy = szh * dx - sxh * dz
            piz = sxh * dy - syh * dx
            prx = syh * drz - szh * dry
            pry = szh * drx - sxh * drz
            prz = sxh * dry - syh * drx
            e_s = sxh * ex + syh * ey + szh * ez
            e_p = pix * ex + piy * ey + piz * ez
            ex = r_s * e_s * sxh + r_p * e_p * prx
            ey = r_s * e_s * syh + r_p * e_p * pry
            ez = r_s * e_s * szh + r_p * e_p * prz
        else:
            amp = amp * r_s

    ax = pts[k + 1, 0] - pts[k, 0]
    ay = pts[k + 1, 1] - pts[k, 1]
    az = pts[k + 1, 2] - pts[k, 2]
    ah = np.sqrt(ax * ax + ay * ay + az * az)
    ax /= ah
    ay /= ah
    az /= ah
    cos_r = -(ax * rx_axis[0] + ay * rx_axis[1] + az * rx_axis[2])
    f_r = _rx_pattern_value(cos_r, rx_kind, rx_param)
    factor = np.sqrt(rx_gain * f_r) * (lam / (4.0 * np.pi * total))
    phase = np.exp(-2j * np.pi * total / lam)
    if vector_mode:
        proj = rx_axis[0] * ex + rx_axis[1] * ey + rx_axis[2] * ez
        return True, factor * phase * proj
    return True, factor * phase * amp


@njit(parallel=True, cache=True)
def _sweep(
    points,
    el_centers, el_base, el_visible,
    panel_normal, panel_center, pol_axis,
    seq_flat, seq_start,
    r_origin, r_normal, r_ux, r_uy, r_half, r_blocking,
    surf_eps_c,
    lam, rx_kind, rx_param, rx_gain, rx_axis,
    vector_mode, center_prune, k_max,
):
    n_pts = points.shape[0]
    n_el = el_centers.shape[0]
    n_seq = seq_start.shape[0] - 1
    acc = np.zeros(n_pts, dtype=np.complex128)
    n_paths = np.zeros(n_pts, dtype=np.int32)
    n_refl = np.zeros(n_pts, dtype=np.int32)

    for p in prange(n_pts):
        px = points[p, 0]
        py = points[p, 1]
        pz = points[p, 2]

        # receive-point images, laid out parallel to seq_flat
        img = np.empty((seq_flat.shape[0], 3))
        for si in range(n_seq):
            s0 = seq_start[si]
            s1 = seq_start[si + 1]
            cx, cy, cz = px, py, pz
            for j in range(s1 - 1, s0 - 1, -1):
                sid = seq_flat[j]
                dist = (
                    (cx - r_origin[sid, 0]) * r_normal[sid, 0]
                    + (cy - r_origin[sid, 1]) * r_normal[sid, 1]
                    + (cz - r_origin[sid, 2]) * r_normal[sid, 2]
                )
                cx -= 2.0 * dist * r_normal[sid, 0]
                cy -= 2.0 * dist * r_normal[sid, 1]
                cz -= 2.0 * dist * r_normal[sid, 2]
                img[j, 0] = cx
                img[j, 1] = cy
                img[j, 2] = cz

        pts = np.empty((k_max + 2, 3))
        seq_ok = np.ones(n_seq, dtype=np.uint8)
        if center_prune:
            for si in range(n_seq):
                ok, _, _ = _walk_chain(
                    panel_center[0], panel_center[1], panel_center[2],
                    px, py, pz, si, seq_flat, seq_start, img,
                    r_origin, r_normal, r_ux, r_uy, r_half, r_blocking, pts,
                )
                seq_ok[si] = 1 if ok else 0

        total_field = 0.0 + 0.0j
        paths_here = 0
        refl_here = 0
        for m in range(n_el):
            if not el_visible[m]:
                continue
            for si in range(n_seq):
                if seq_ok[si] == 0:
                    continue
                ok, k, total = _walk_chain(
                    el_centers[m, 0], el_centers[m, 1], el_centers[m, 2],
                    px, py, pz, si, seq_flat, seq_start, img,
                    r_origin, r_normal, r_ux, r_uy, r_half, r_blocking, pts,
                )
                if not ok:
                    continue
                ok2, value = _path_value(
                    pts, k, total, si, seq_flat, seq_start,
                    el_base[m],
                    panel_normal, pol_axis,
                    r_normal, r_ux, surf_eps_c,
                    lam, rx_kind, rx_param, rx_gain, rx_axis,
                    vector_mode,
                )
                if not ok2:
                    continue
                total_field += value
                paths_here += 1
                if k > 0:
                    refl_here += 1
        acc[p] = total_field
        n_paths[p] = paths_here
        n_refl[p] = refl_here
    return acc, n_paths, n_refl


def sweep_numba(packed, points):
    """Field, path count, and reflected-path count at each receive point."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    k_max = 0
    for si in range(packed.n_sequences):
        k_max = max(k_max, int(packed.seq_start[si + 1] - packed.seq_start[si]))
    return _sweep(
        points,
        packed.el_centers, packed.el_base, packed.el_visible,
        packed.panel_normal, packed.panel_center, packed.pol_axis,
        packed.seq_flat, packed.seq_start,
        packed.r_origin, packed.r_normal, packed.r_ux, packed.r_uy,
        packed.r_half, packed.r_blocking,
        packed.surf_eps_c,
        packed.lam, packed.rx_kind, packed.rx_param, packed.rx_gain,
        packed.rx_axis,
        packed.mode_vector, packed.center_prune, k_max,
    )
