"""Bring a decoded frame onto the 10-bit, anti-dithered analysis canvas."""

from __future__ import annotations

import numpy as np

from cambi.config import CambiConfig
from cambi.errors import ConfigError
from cambi.frameio import LumaFrame


def to_10bit(frame: LumaFrame) -> LumaFrame:
    if frame.bit_depth == 10:
        return frame
    if frame.bit_depth != 8:
        raise ConfigError(f"unsupported bit depth {frame.bit_depth}")
    return LumaFrame(frame.width, frame.height, 10, frame.data << 2)


def anti_dither_filter(frame: LumaFrame) -> LumaFrame:
    """Floor of the 2x2 mean anchored at each pixel, edges replicated.

    The output keeps the input resolution (stride 1).
    """
    if frame.bit_depth != 10:
        raise ConfigError("anti-dither filter expects a 10-bit frame")
    padded = np.pad(frame.data.astype(np.uint32), ((0, 1), (0, 1)), mode="edge")
    total = padded[:-1, :-1] + padded[:-1, 1:] + padded[1:, :-1] + padded[1:, 1:]
    return LumaFrame(frame.width, frame.height, 10, total >> 2)


def upscale_to_canvas(frame: LumaFrame, config: CambiConfig) -> LumaFrame:
    """Nearest-neighbour upscale; sample values are only replicated."""
    cw, ch = config.canvas_width, config.canvas_height
    if frame.width > cw or frame.height > ch:
        raise ConfigError(
            f"frame {frame.width}x{frame.height} exceeds canvas {cw}x{ch}; downscaling is unsupported"
        )
    if (frame.width, frame.height) == (cw, ch):
        return frame
    src_x = np.arange(cw, dtype=np.int64) * frame.width // cw
    src_y = np.arange(ch, dtype=np.int64) * frame.height // ch
    return LumaFrame(cw, ch, frame.bit_depth, frame.data[src_y[:, None], src_x[None, :]])


def preprocess(frame: LumaFrame, config: CambiConfig) -> LumaFrame:
    return upscale_to_canvas(anti_dither_filter(to_10bit(frame)), config)
