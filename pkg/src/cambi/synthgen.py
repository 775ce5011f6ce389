"""Synthetic banding stimuli: quantized ramps, ordered dithering, controls."""

from __future__ import annotations

from dataclasses import dataclass, fields
from fractions import Fraction

import numpy as np

from cambi.errors import SpecError
from cambi.frameio import LumaFrame, VideoStream

PATTERNS = ("h_ramp", "v_ramp", "flat", "white_noise")
DITHERS = ("none", "bayer4")

BAYER4 = np.array(
    [
        [0, 8, 2, 10],
        [12, 4, 14, 6],
        [3, 11, 1, 9],
        [15, 7, 13, 5],
    ]
)


@dataclass(frozen=True)
class SyntheticSpec:
    width: int = 64
    height: int = 64
    frames: int = 1
    pattern: str = "h_ramp"
    start_value: int = 0
    end_value: int = 1023
    quant_step: int = 0
    dither: str = "none"
    seed: int = 0
    frame_rate: Fraction = Fraction(24)

    def __post_init__(self):
        object.__setattr__(self, "frame_rate", Fraction(self.frame_rate))
        if self.width < 1 or self.height < 1:
            raise SpecError(f"dimensions must be positive, got {self.width}x{self.height}")
        if self.frames < 1:
            raise SpecError(f"need at least one frame, got {self.frames}")
        if self.pattern not in PATTERNS:
            raise SpecError(f"unknown pattern '{self.pattern}', expected one of {PATTERNS}")
        if self.dither not in DITHERS:
            raise SpecError(f"unknown dither '{self.dither}', expected one of {DITHERS}")
        for name in ("start_value", "end_value"):
            value = getattr(self, name)
            if not 0 <= value <= 1023:
                raise SpecError(f"{name} must be in [0, 1023], got {value}")
        if self.quant_step < 0:
            raise SpecError(f"quant_step must be >= 0, got {self.quant_step}")
        if self.pattern == "h_ramp" and self.width < 2:
            raise SpecError("h_ramp needs width >= 2")
        if self.pattern == "v_ramp" and self.height < 2:
            raise SpecError("v_ramp needs height >= 2")
        if self.frame_rate <= 0:
            raise SpecError(f"frame_rate must be positive, got {self.frame_rate}")


def _round_half_away(values: np.ndarray) -> np.ndarray:
    return np.sign(values) * np.floor(np.abs(values) + 0.5)


def ideal_plane(spec: SyntheticSpec) -> np.ndarray:
    """Unquantized 10-bit intensities as float64, shape (height, width)."""
    h, w = spec.height, spec.width
    start, end = float(spec.start_value), float(spec.end_value)
    if spec.pattern == "h_ramp":
        row = start + (end - start) * np.arange(w) / (w - 1)
        return np.broadcast_to(row, (h, w)).copy()
    if spec.pattern == "v_ramp":
        col = start + (end - start) * np.arange(h) / (h - 1)
        return np.broadcast_to(col[:, None], (h, w)).copy()
    if spec.pattern == "flat":
        return np.full((h, w), start)
    lo, hi = min(spec.start_value, spec.end_value), max(spec.start_value, spec.end_value)
    rng = np.random.default_rng(spec.seed)
    return rng.integers(lo, hi, endpoint=True, size=(h, w)).astype(np.float64)


def render_8bit(spec: SyntheticSpec) -> np.ndarray:
    plane = ideal_plane(spec)
    q = spec.quant_step
    if q > 0:
        if spec.dither == "bayer4":
            h, w = plane.shape
            tile = np.tile(BAYER4, (h // 4 + 1, w // 4 + 1))[:h, :w]
            plane = plane + ((tile + 0.5) / 16.0 - 0.5) * q
        plane = q * _round_half_away(plane / q)
    return np.clip(_round_half_away(plane / 4.0), 0, 255).astype(np.uint8)


def generate(spec: SyntheticSpec) -> VideoStream:
    """Render ``spec`` as an 8-bit stream of identical frames."""
    frame = LumaFrame.from_array(render_8bit(spec), 8)
    return VideoStream(
        [frame] * spec.frames, spec.frame_rate, f"synthetic {spec.pattern} q{spec.quant_step} {spec.dither}"
    )


def _coerce(name: str, text: str):
    if name in ("pattern", "dither"):
        return text
    if name == "frame_rate":
        return Fraction(text.replace(":", "/"))
    return int(text)


def parse_spec_text(text: str) -> SyntheticSpec:
    """Build a spec from ``key=value`` lines; ``#`` starts a comment."""
    known = {f.name for f in fields(SyntheticSpec)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"line {lineno}: expected key=value, got '{line}'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise SpecError(f"line {lineno}: unknown key '{key}'")
        try:
            values[key] = _coerce(key, value)
        except (ValueError, ZeroDivisionError):
            raise SpecError(f"line {lineno}: bad value for '{key}': '{value}'") from None
    return SyntheticSpec(**values)
