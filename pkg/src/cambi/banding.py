"""Per-frame banding confidence maps across contrast steps and scales."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from cambi import _kernels
from cambi.config import CambiConfig
from cambi.errors import ConfigError
from cambi.frameio import LumaFrame


@dataclass(frozen=True)
class TextureMask:
    width: int
    height: int
    mask: np.ndarray = field(repr=False)  # True = smooth, usable for counting


@dataclass(frozen=True)
class ConfidenceMap:
    width: int
    height: int
    k: int
    scale_index: int
    values: np.ndarray = field(repr=False)


@dataclass
class BandingMapSet:
    maps: dict[tuple[int, int], ConfidenceMap]
    frame_index: int = 0
    time_sec: float = 0.0

    def get(self, k: int, scale_index: int) -> ConfidenceMap:
        return self.maps[(k, scale_index)]

    @property
    def max_k(self) -> int:
        return max(k for k, _ in self.maps)

    @property
    def num_scales(self) -> int:
        return max(s for _, s in self.maps) + 1


def gradient_magnitude(values: np.ndarray) -> np.ndarray:
    """Max-norm of forward differences; zero difference past the last row/column."""
    v = values.astype(np.int32)
    grad = np.zeros_like(v)
    np.abs(v[:, 1:] - v[:, :-1], out=grad[:, :-1])
    np.maximum(grad[:-1, :], np.abs(v[1:, :] - v[:-1, :]), out=grad[:-1, :])
    return grad


def texture_mask(frame: LumaFrame, tau_g: int) -> TextureMask:
    smooth = gradient_magnitude(frame.data) < tau_g
    return TextureMask(frame.width, frame.height, smooth)


def mode_downsample(frame: LumaFrame) -> LumaFrame:
    """Halve each axis (rounding up), keeping the most frequent value per 2x2 block.

    Ties go to the smallest value.
    """
    return LumaFrame.from_array(_kernels.mode_downsample(frame.data), frame.bit_depth)


def neighborhood_fractions(
    frame: LumaFrame, mask: TextureMask, center: tuple[int, int], window: int, max_k: int
) -> np.ndarray:
    """Fractions p(-max_k..max_k) for one pixel; entry ``max_k + d`` holds offset ``d``.

    ``center`` is ``(x, y)``.
    """
    x, y = center
    r = window // 2
    ys = slice(max(0, y - r), y + r + 1)
    xs = slice(max(0, x - r), x + r + 1)
    vals = frame.data[ys, xs].astype(np.int64)[mask.mask[ys, xs]]
    p = np.zeros(2 * max_k + 1)
    if vals.size == 0:
        return p
    diffs = vals - int(frame.data[y, x])
    for d in range(-max_k, max_k + 1):
        p[max_k + d] = np.count_nonzero(diffs == d) / vals.size
    return p


def confidence(p: np.ndarray, k: int) -> float:
    """Banding confidence at contrast step ``k`` from a fraction vector.

    ``p`` is centred: ``p[len(p) // 2]`` is the same-intensity fraction.
    A ratio with a zero denominator counts as zero.
    """
    mid = len(p) // 2
    p0, pm, pp = p[mid], p[mid - k], p[mid + k]
    lower = pm / (p0 + pm) if p0 + pm > 0 else 0.0
    upper = pp / (p0 + pp) if p0 + pp > 0 else 0.0
    return float(p0 * max(lower, upper))


def scale_pyramid(frame: LumaFrame, num_scales: int) -> list[LumaFrame]:
    levels = [frame]
    for i in range(1, num_scales):
        prev = levels[-1]
        if prev.width < 2 and prev.height < 2:
            raise ConfigError(f"scale {i} would downsample a 1x1 frame")
        levels.append(mode_downsample(prev))
    return levels


def compute_map_set(
    frame: LumaFrame, config: CambiConfig, frame_index: int = 0, time_sec: float = 0.0
) -> BandingMapSet:
    if frame.bit_depth != 10:
        raise ConfigError("banding maps expect a preprocessed 10-bit frame")
    if (frame.width, frame.height) != (config.canvas_width, config.canvas_height):
        raise ConfigError(
            f"frame {frame.width}x{frame.height} is not at canvas resolution "
            f"{config.canvas_width}x{config.canvas_height}"
        )
    maps = {}
    for scale, level in enumerate(scale_pyramid(frame, config.num_scales)):
        smooth = texture_mask(level, config.tau_g).mask
        conf = _kernels.confidence_maps(level.data, smooth, config.window, config.max_k)
        for k in range(1, config.max_k + 1):
            maps[(k, scale)] = ConfidenceMap(level.width, level.height, k, scale, conf[k - 1])
    return BandingMapSet(maps, frame_index, time_sec)
