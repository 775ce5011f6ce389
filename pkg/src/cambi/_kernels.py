"""Compiled inner loops for the banding stage."""

import warnings

import numpy as np
from numba import NumbaWarning, njit, prange

# an outdated system TBB only means numba falls back to another threading layer
warnings.filterwarnings("ignore", message="The TBB threading layer", category=NumbaWarning)


@njit(cache=True, nogil=True, parallel=True)
def confidence_maps(values, mask, window, max_k):
    """Banding confidence for every pixel and every k in 1..max_k.

    Each row keeps its own histogram of non-texture intensities over the
    clipped window box and slides it left to right, so the cost per pixel
    is two window-height column updates. Texture pixels land in a sentinel
    bin that is never read as an intensity.
    """
    h, w = values.shape
    r = window // 2
    off = max_k
    sentinel = 1024 + 2 * off
    out = np.zeros((max_k, h, w), dtype=np.float64)

    # column-major so that the column entering or leaving the window is contiguous
    idx = np.empty((w, h), dtype=np.int16)
    for x in prange(w):
        for y in range(h):
            if mask[y, x]:
                idx[x, y] = np.int16(values[y, x] + off)
            else:
                idx[x, y] = sentinel

    for y in prange(h):
        hist = np.zeros(sentinel + 1, dtype=np.int32)
        y0 = max(0, y - r)
        y1 = min(h - 1, y + r)
        rows = y1 - y0 + 1
        for xc in range(min(r, w - 1) + 1):
            for yy in range(y0, y1 + 1):
                hist[idx[xc, yy]] += 1
        for x in range(w):
            if x > 0:
                xa = x + r
                xr = x - r - 1
                if xa < w and xr >= 0:
                    for yy in range(y0, y1 + 1):
                        hist[idx[xa, yy]] += 1
                        hist[idx[xr, yy]] -= 1
                elif xa < w:
                    for yy in range(y0, y1 + 1):
                        hist[idx[xa, yy]] += 1
                elif xr >= 0:
                    for yy in range(y0, y1 + 1):
                        hist[idx[xr, yy]] -= 1
            cols = min(w - 1, x + r) - max(0, x - r) + 1
            denom = rows * cols - hist[sentinel]
            if denom == 0:
                continue
            centre = np.int32(values[y, x]) + off
            n0 = hist[centre]
            if n0 == 0:
                continue
            p0 = n0 / denom
            for k in range(1, max_k + 1):
                nm = hist[centre - k]
                npos = hist[centre + k]
                best = 0.0
                if nm > 0:
                    best = nm / (n0 + nm)
                if npos > 0:
                    ratio = npos / (n0 + npos)
                    if ratio > best:
                        best = ratio
                out[k - 1, y, x] = p0 * best
    return out


@njit(cache=True, nogil=True, parallel=True)
def mode_downsample(values):
    h, w = values.shape
    oh = (h + 1) // 2
    ow = (w + 1) // 2
    out = np.empty((oh, ow), dtype=values.dtype)
    for oy in prange(oh):
        block = np.empty(4, dtype=values.dtype)
        for ox in range(ow):
            n = 0
            for dy in range(2):
                y = 2 * oy + dy
                if y >= h:
                    continue
                for dx in range(2):
                    x = 2 * ox + dx
                    if x < w:
                        block[n] = values[y, x]
                        n += 1
            best = block[0]
            best_count = 0
            for i in range(n):
                count = 0
                for j in range(n):
                    if block[j] == block[i]:
                        count += 1
                if count > best_count or (count == best_count and block[i] < best):
                    best_count = count
                    best = block[i]
            out[oy, ox] = best
    return out


@njit(cache=True, nogil=True, parallel=True)
def accumulate_upsampled(target, native, shift):
    """target[y, x] += native[y >> shift, x >> shift] over the whole target."""
    h, w = target.shape
    for y in prange(h):
        row = y >> shift
        for x in range(w):
            target[y, x] += native[row, x >> shift]
