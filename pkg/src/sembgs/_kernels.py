"""Compiled per-pixel kernels for the sample-consensus segmenters.

All kernels are sequential; results do not depend on thread scheduling, and
every random decision is drawn ahead of time by the caller so the RNG stream
is consumed identically no matter how the kernels are invoked.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# LBSP sample points, kept in sync with lbsp.OFFSETS.
_LBSP_DY = np.array([-2, -2, -2, -1, -1, -1, 0, 0, 0, 0, 1, 1, 1, 2, 2, 2], dtype=np.int64)
_LBSP_DX = np.array([-2, 0, 2, -1, 0, 1, -2, -1, 1, 2, -1, 0, 1, -2, 0, 2], dtype=np.int64)

# 8-neighborhood used for sample diffusion.
_NBR_DY = np.array([-1, -1, -1, 0, 0, 1, 1, 1], dtype=np.int64)
_NBR_DX = np.array([-1, 0, 1, -1, 1, -1, 0, 1], dtype=np.int64)

L1_MAX = 765.0  # three channels, 255 each


@njit(cache=True, inline="always")
def _pop16(x):
    x = x - ((x >> 1) & 0x5555)
    x = (x & 0x3333) + ((x >> 2) & 0x3333)
    x = (x + (x >> 4)) & 0x0F0F
    return (x + (x >> 8)) & 0x001F


@njit(cache=True)
def lbsp_kernel(img, rel_threshold, out):
    h, w = img.shape[0], img.shape[1]
    for y in range(h):
        for x in range(w):
            for c in range(3):
                center = np.int64(img[y, x, c])
                thr = rel_threshold * center
                bits = np.uint16(0)
                for k in range(16):
                    ny = y + _LBSP_DY[k]
                    nx = x + _LBSP_DX[k]
                    if ny < 0:
                        ny = 0
                    elif ny >= h:
                        ny = h - 1
                    if nx < 0:
                        nx = 0
                    elif nx >= w:
                        nx = w - 1
                    d = np.int64(img[ny, nx, c]) - center
                    if d < 0:
                        d = -d
                    if d <= thr:
                        bits |= np.uint16(1) << np.uint16(k)
                out[y, x, c] = bits


@njit(cache=True)
def subsense_classify_kernel(img, desc, bank_color, bank_desc, r_map,
                             color_base, lbsp_base, min_matches, mask, dmin):
    h, w = img.shape[0], img.shape[1]
    n = bank_color.shape[2]
    for y in range(h):
        for x in range(w):
            r = r_map[y, x]
            color_thr = 3.0 * color_base * r
            lbsp_thr = lbsp_base * np.int64(r)
            i0 = np.int64(img[y, x, 0])
            i1 = np.int64(img[y, x, 1])
            i2 = np.int64(img[y, x, 2])
            d0 = np.int64(desc[y, x, 0])
            d1 = np.int64(desc[y, x, 1])
            d2 = np.int64(desc[y, x, 2])
            best = np.int64(765)
            matches = 0
            for k in range(n):
                e0 = i0 - np.int64(bank_color[y, x, k, 0])
                if e0 < 0:
                    e0 = -e0
                e1 = i1 - np.int64(bank_color[y, x, k, 1])
                if e1 < 0:
                    e1 = -e1
                e2 = i2 - np.int64(bank_color[y, x, k, 2])
                if e2 < 0:
                    e2 = -e2
                l1 = e0 + e1 + e2
                if l1 < best:
                    best = l1
                if matches < min_matches and l1 < color_thr:
                    ham = (
                        _pop16(d0 ^ np.int64(bank_desc[y, x, k, 0]))
                        + _pop16(d1 ^ np.int64(bank_desc[y, x, k, 1]))
                        + _pop16(d2 ^ np.int64(bank_desc[y, x, k, 2]))
                    )
                    if ham < lbsp_thr:
                        matches += 1
            mask[y, x] = 0 if matches >= min_matches else 1
            dmin[y, x] = best / L1_MAX


@njit(cache=True)
def subsense_feedback_kernel(img, desc, bank_color, bank_desc,
                             r_map, t_map, dmin_map, v_map, prev_raw,
                             raw, final, dmin_obs,
                             alpha, v_incr, v_decr, v_floor,
                             r_lower, t_lower, t_upper, eps,
                             u_self, idx_self, u_diff, nbr_choice, idx_diff):
    h, w = img.shape[0], img.shape[1]
    for y in range(h):
        for x in range(w):
            dmin = dmin_map[y, x] * (1.0 - alpha) + dmin_obs[y, x] * alpha
            dmin_map[y, x] = dmin

            v = v_map[y, x]
            if raw[y, x] != prev_raw[y, x]:
                v += v_incr
            else:
                v -= v_decr
            if v < v_floor:
                v = v_floor
            v_map[y, x] = v

            r = r_map[y, x]
            bound = (1.0 + dmin * 2.0) ** 2
            if r < bound:
                r += v
            else:
                r -= 1.0 / v
            if r < r_lower:
                r = r_lower
            r_map[y, x] = r

            t = t_map[y, x]
            if final[y, x] == 1:
                t += 1.0 / (v * (dmin + eps))
            else:
                t -= v / (dmin + eps)
            if t < t_lower:
                t = t_lower
            elif t > t_upper:
                t = t_upper
            t_map[y, x] = t

            if final[y, x] == 0:
                p = 1.0 / t
                if u_self[y, x] < p:
                    k = idx_self[y, x]
                    for c in range(3):
                        bank_color[y, x, k, c] = img[y, x, c]
                        bank_desc[y, x, k, c] = desc[y, x, c]
                if u_diff[y, x] < p:
                    ny = y + _NBR_DY[nbr_choice[y, x]]
                    nx = x + _NBR_DX[nbr_choice[y, x]]
                    if 0 <= ny < h and 0 <= nx < w:
                        k = idx_diff[y, x]
                        for c in range(3):
                            bank_color[ny, nx, k, c] = img[y, x, c]
                            bank_desc[ny, nx, k, c] = desc[y, x, c]


@njit(cache=True)
def vibe_classify_kernel(img, bank_color, radius, min_matches, mask):
    h, w = img.shape[0], img.shape[1]
    n = bank_color.shape[2]
    color_thr = 3 * radius
    for y in range(h):
        for x in range(w):
            i0 = np.int64(img[y, x, 0])
            i1 = np.int64(img[y, x, 1])
            i2 = np.int64(img[y, x, 2])
            matches = 0
            for k in range(n):
                e0 = i0 - np.int64(bank_color[y, x, k, 0])
                if e0 < 0:
                    e0 = -e0
                e1 = i1 - np.int64(bank_color[y, x, k, 1])
                if e1 < 0:
                    e1 = -e1
                e2 = i2 - np.int64(bank_color[y, x, k, 2])
                if e2 < 0:
                    e2 = -e2
                if e0 + e1 + e2 < color_thr:
                    matches += 1
                    if matches >= min_matches:
                        break
            mask[y, x] = 0 if matches >= min_matches else 1


@njit(cache=True)
def vibe_update_kernel(img, bank_color, final, update_prob,
                       u_self, idx_self, u_diff, nbr_choice, idx_diff):
    h, w = img.shape[0], img.shape[1]
    for y in range(h):
        for x in range(w):
            if final[y, x] != 0:
                continue
            if u_self[y, x] < update_prob:
                k = idx_self[y, x]
                for c in range(3):
                    bank_color[y, x, k, c] = img[y, x, c]
            if u_diff[y, x] < update_prob:
                ny = y + _NBR_DY[nbr_choice[y, x]]
                nx = x + _NBR_DX[nbr_choice[y, x]]
                if 0 <= ny < h and 0 <= nx < w:
                    k = idx_diff[y, x]
                    for c in range(3):
                        bank_color[ny, nx, k, c] = img[y, x, c]


def warmup() -> None:
    """Force-compile every kernel on tiny inputs."""
    img = np.zeros((4, 4, 3), dtype=np.uint8)
    desc = np.zeros((4, 4, 3), dtype=np.uint16)
    lbsp_kernel(img, 0.3, desc)
    bank_c = np.zeros((4, 4, 2, 3), dtype=np.uint8)
    bank_d = np.zeros((4, 4, 2, 3), dtype=np.uint16)
    fmap = np.ones((4, 4), dtype=np.float64)
    mask = np.zeros((4, 4), dtype=np.uint8)
    dmin = np.zeros((4, 4), dtype=np.float64)
    subsense_classify_kernel(img, desc, bank_c, bank_d, fmap, 30.0, 3, 2, mask, dmin)
    zeros_u = np.ones((4, 4), dtype=np.float64)
    zeros_i = np.zeros((4, 4), dtype=np.int64)
    subsense_feedback_kernel(
        img, desc, bank_c, bank_d,
        fmap.copy(), fmap.copy() + 2.0, dmin.copy(), fmap.copy() * 0.1, mask.copy(),
        mask, mask, dmin,
        0.04, 1.0, 0.1, 0.1, 1.0, 2.0, 256.0, 1e-6,
        zeros_u, zeros_i, zeros_u, zeros_i, zeros_i,
    )
    vibe_classify_kernel(img, bank_c, 20, 2, mask)
    vibe_update_kernel(img, bank_c, mask, 0.0, zeros_u, zeros_i, zeros_u, zeros_i, zeros_i)
