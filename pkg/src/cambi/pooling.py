"""Spatial pooling of a map set into a frame score, and temporal pooling."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from cambi import _kernels
from cambi.banding import BandingMapSet
from cambi.config import CambiConfig
from cambi.errors import EmptyInputError

# Scores at or above this are treated as visible banding.
BANDING_THRESHOLD = 5.0


@dataclass(frozen=True)
class FrameScore:
    frame_index: int
    time_sec: float
    score: float


@dataclass
class VideoReport:
    video_score: float
    frame_scores: list[FrameScore]
    config_echo: CambiConfig | None = None
    banding_flag: bool = field(init=False)

    def __post_init__(self):
        self.banding_flag = self.video_score >= BANDING_THRESHOLD


def scale_weight(scale_index: int) -> float:
    """log2(16 / v) with v = 2**scale_index degrees of visual angle."""
    return math.log2(16 / 2**scale_index)


def per_pixel_combined(map_set: BandingMapSet, config: CambiConfig) -> np.ndarray:
    """Weighted sum of all maps on the canvas grid.

    Coarse maps are block-replicated back to canvas resolution.
    """
    cw, ch = config.canvas_width, config.canvas_height
    combined = np.zeros((ch, cw), dtype=np.float64)
    for scale in range(config.num_scales):
        weight = scale_weight(scale)
        if weight == 0:
            continue
        native = None
        for k in range(1, config.max_k + 1):
            term = map_set.get(k, scale).values * k
            native = term if native is None else native + term
        native *= weight
        _kernels.accumulate_upsampled(combined, native, scale)
    return combined


def pool_top(values: np.ndarray, top_percent: float) -> float:
    """Mean of the largest ``floor(top_percent * n)`` values (at least one)."""
    flat = values.ravel()
    count = max(1, math.floor(top_percent * flat.size + 1e-9))
    if count >= flat.size:
        return float(flat.mean())
    top = np.partition(flat, flat.size - count)[flat.size - count :]
    return float(top.mean())


def frame_score(map_set: BandingMapSet, config: CambiConfig) -> FrameScore:
    score = pool_top(per_pixel_combined(map_set, config), config.top_percent)
    return FrameScore(map_set.frame_index, map_set.time_sec, score)


def select_frames(stream, t_sec: float) -> list[tuple[int, float]]:
    """Indices of the frames nearest to every multiple of ``t_sec``.

    Rounding is half-up; times are ``index / frame_rate``.
    """
    count = len(stream.frames)
    if count == 0:
        raise EmptyInputError("cannot select frames from an empty stream")
    rate = Fraction(stream.frame_rate)
    step = Fraction(t_sec) * rate
    chosen = []
    n = 0
    while True:
        index = math.floor(n * step + Fraction(1, 2))
        if index >= count:
            break
        if not chosen or chosen[-1] != index:
            chosen.append(index)
        n += 1
    return [(i, float(i / rate)) for i in chosen]


def video_score(frame_scores, config: CambiConfig | None = None) -> VideoReport:
    frame_scores = list(frame_scores)
    if not frame_scores:
        raise EmptyInputError("no frame scores to pool")
    mean = math.fsum(f.score for f in frame_scores) / len(frame_scores)
    return VideoReport(mean, frame_scores, config)
