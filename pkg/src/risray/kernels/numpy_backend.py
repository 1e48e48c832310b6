"""Pure-numpy sweep backend: vectorized over receive points.

For every (cell, bounce-sequence) pair the specular chain is walked for all
points at once; per-point accumulation happens in the same cell-major,
sequence-minor order as the compiled backend, so the two agree to floating
rounding.  Lanes that fail any geometric, occlusion, grazing, or
polarization-degeneracy check are masked out of both the field sum and the
path census.
"""

from __future__ import annotations

import numpy as np

from .pack import PackedScene

_EPS_PARAM = 1e-6  # parametric cutoff for bounce-point hits
_EPS_M = 1e-6  # open-interval margin for occlusion, meters
_EPS_PARALLEL = 1e-15
_EPS_GRAZE = 1e-9
_EPS_POL = 1e-9


def _unit(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = np.linalg.norm(v, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = v / n[..., None]
    return u, n


def _images(packed: PackedScene, points: np.ndarray, si: int) -> np.ndarray:
    """Receive-point images for sequence ``si``: (k, P, 3), aimed at in
    bounce order."""
    s0, s1 = packed.seq_start[si], packed.seq_start[si + 1]
    k = s1 - s0
    img = np.empty((k, points.shape[0], 3))
    cur = points
    for j in range(k - 1, -1, -1):
        sid = packed.seq_flat[s0 + j]
        n = packed.r_normal[sid]
        o = packed.r_origin[sid]
        cur = cur - 2.0 * ((cur - o) @ n)[:, None] * n
        img[j] = cur
    return img


def _walk(
    packed: PackedScene,
    start: np.ndarray,
    points: np.ndarray,
    si: int,
    img: np.ndarray,
) -> tuple[list[np.ndarray], np.ndarray, np.ndarray]:
    """Forward specular walk from ``start`` to every point.

    Returns (chain point list, valid mask, unfolded length); the chain has
    k + 2 entries of shape (P, 3).
    """
    p_count = points.shape[0]
    s0, s1 = packed.seq_start[si], packed.seq_start[si + 1]
    ids = packed.seq_flat[s0:s1]
    k = len(ids)
    valid = np.ones(p_count, dtype=bool)
    cur = np.broadcast_to(start, (p_count, 3))
    pts = [cur]
    with np.errstate(divide="ignore", invalid="ignore"):
        for j, sid in enumerate(ids):
            n = packed.r_normal[sid]
            o = packed.r_origin[sid]
            d = img[j] - cur
            dn = d @ n
            valid &= dn < 0.0  # must approach the front face
            t = ((o - cur) @ n) / dn
            valid &= t > _EPS_PARAM
            hit = cur + t[:, None] * d
            rel = hit - o
            u = rel @ packed.r_ux[sid]
            v = rel @ packed.r_uy[sid]
            with np.errstate(invalid="ignore"):
                valid &= (np.abs(u) <= packed.r_half[sid, 0]) & (
                    np.abs(v) <= packed.r_half[sid, 1]
                )
            pts.append(hit)
            cur = hit
        if k:
            n_last = packed.r_normal[ids[-1]]
            valid &= ((points - cur) @ n_last) > 0.0
        pts.append(points)

        total = np.zeros(p_count)
        for i in range(len(pts) - 1):
            a, b = pts[i], pts[i + 1]
            seg = b - a
            length = np.linalg.norm(seg, axis=1)
            total += length
            excl0 = ids[i - 1] if i >= 1 else -1
            excl1 = ids[i] if i < k else -1
            for r in range(packed.r_origin.shape[0]):
                if not packed.r_blocking[r] or r == excl0 or r == excl1:
                    continue
                n = packed.r_normal[r]
                denom = seg @ n
                safe = np.abs(denom) >= _EPS_PARALLEL
                t = np.where(safe, ((packed.r_origin[r] - a) @ n) / np.where(safe, denom, 1.0), -1.0)
                t_len = t * length
                inside = safe & (t_len > _EPS_M) & (t_len < length - _EPS_M)
                hp = a + t[:, None] * seg
                rel = hp - packed.r_origin[r]
                u = rel @ packed.r_ux[r]
                v = rel @ packed.r_uy[r]
                hit_rect = (
                    inside
                    & (np.abs(u) <= packed.r_half[r, 0])
                    & (np.abs(v) <= packed.r_half[r, 1])
                )
                valid &= ~hit_rect
    return pts, valid, total


def _rx_pattern(packed: PackedScene, cos_r: np.ndarray) -> np.ndarray:
    if packed.rx_kind == 0:
        return np.ones_like(cos_r)
    if packed.rx_kind == 1:
        with np.errstate(invalid="ignore"):
            return np.where(cos_r > 0.0, np.abs(cos_r) ** packed.rx_param, 0.0)
    if packed.rx_kind == 2:
        s2 = 1.0 - cos_r * cos_r
        tiny = s2 < 1e-24
        st = np.sqrt(np.where(tiny, 1.0, s2))
        val = (np.cos(packed.rx_param * cos_r) - np.cos(packed.rx_param)) / st
        return np.where(tiny, 0.0, val * val)
    return np.maximum(cos_r, 0.0)


def _path_contrib(
    packed: PackedScene,
    pts: list[np.ndarray],
    valid: np.ndarray,
    total: np.ndarray,
    ids: np.ndarray,
    base: complex,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-point complex contribution and the surviving-lane mask."""
    with np.errstate(divide="ignore", invalid="ignore"):
        u0, _ = _unit(pts[1] - pts[0])
        f_out = np.maximum(u0 @ packed.panel_normal, 0.0)
        amp = base * np.sqrt(f_out)

        if packed.mode_vector:
            t_out = packed.pol_axis - (u0 @ packed.pol_axis)[:, None] * u0
            t_hat, t_norm = _unit(t_out)
            valid = valid & (t_norm >= _EPS_POL)
            field = amp[:, None] * t_hat.astype(np.complex128)
        else:
            field = amp

        for j, sid in enumerate(ids):
            d_hat, _ = _unit(pts[j + 1] - pts[j])
            n = packed.r_normal[sid]
            c = -(d_hat @ n)
            valid = valid & (c >= _EPS_GRAZE)
            eps_c = packed.surf_eps_c[sid]
            w = np.sqrt(eps_c - (1.0 - c * c) + 0j)
            r_s = (c - w) / (c + w)
            if packed.mode_vector:
                r_p = (eps_c * c - w) / (eps_c * c + w)
                cross = np.cross(d_hat, np.broadcast_to(n, d_hat.shape))
                s_hat, c_norm = _unit(cross)
                degen = c_norm < _EPS_GRAZE
                s_hat = np.where(degen[:, None], packed.r_ux[sid], s_hat)
                d_ref = d_hat + 2.0 * c[:, None] * n
                p_in = np.cross(s_hat, d_hat)
                p_ref = np.cross(s_hat, d_ref)
                e_s = np.einsum("ij,ij->i", s_hat, field)
                e_p = np.einsum("ij,ij->i", p_in, field)
                field = (
                    (r_s * e_s)[:, None] * s_hat.astype(np.complex128)
                    + (r_p * e_p)[:, None] * p_ref.astype(np.complex128)
                )
            else:
                field = field * r_s

        d_ar, _ = _unit(pts[-1] - pts[-2])
        cos_r = -(d_ar @ packed.rx_axis)
        f_r = _rx_pattern(packed, cos_r)
        factor = (
            np.sqrt(packed.rx_gain * f_r)
            * (packed.lam / (4.0 * np.pi * total))
            * np.exp(-2j * np.pi * total / packed.lam)
        )
        if packed.mode_vector:
            proj = field @ packed.rx_axis.astype(np.complex128)
            contrib = factor * proj
        else:
            contrib = factor * field
    return np.where(valid, contrib, 0.0 + 0.0j), valid


def sweep_numpy(
    packed: PackedScene, points: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Field, path count, and reflected-path count at each receive point."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    p_count = points.shape[0]
    acc = np.zeros(p_count, dtype=np.complex128)
    n_paths = np.zeros(p_count, dtype=np.int32)
    n_refl = np.zeros(p_count, dtype=np.int32)

    images = [_images(packed, points, si) for si in range(packed.n_sequences)]
    seq_ok = np.ones((packed.n_sequences, p_count), dtype=bool)
    if packed.center_prune:
        for si in range(packed.n_sequences):
            _, ok, _ = _walk(packed, packed.panel_center, points, si, images[si])
            seq_ok[si] = ok

    for m in range(packed.n_elements):
        if not packed.el_visible[m]:
            continue
        base = complex(packed.el_base[m])
        for si in range(packed.n_sequences):
            if not seq_ok[si].any():
                continue
            s0, s1 = packed.seq_start[si], packed.seq_start[si + 1]
            ids = packed.seq_flat[s0:s1]
            pts, valid, total = _walk(
                packed, packed.el_centers[m], points, si, images[si]
            )
            valid &= seq_ok[si]
            if not valid.any():
                continue
            contrib, valid = _path_contrib(packed, pts, valid, total, ids, base)
            acc += np.where(valid, contrib, 0.0 + 0.0j)
            n_paths += valid.astype(np.int32)
            if len(ids):
                n_refl += valid.astype(np.int32)
    return acc, n_paths, n_refl
