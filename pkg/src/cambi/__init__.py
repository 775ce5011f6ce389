"""Contrast-aware multiscale banding index for video."""

from cambi.config import CambiConfig
from cambi.errors import (
    CambiError,
    ConfigError,
    EmptyInputError,
    FormatError,
    SpecError,
    TruncationError,
)
from cambi.frameio import LumaFrame, VideoStream, open_raw_yuv, open_y4m
from cambi.banding import BandingMapSet, ConfidenceMap, compute_map_set
from cambi.pooling import FrameScore, VideoReport, frame_score, video_score
from cambi.pipeline import score_frame, score_stream

__version__ = "0.1.0"

__all__ = [
    "BandingMapSet",
    "CambiConfig",
    "CambiError",
    "ConfidenceMap",
    "ConfigError",
    "EmptyInputError",
    "FormatError",
    "FrameScore",
    "LumaFrame",
    "SpecError",
    "TruncationError",
    "VideoReport",
    "VideoStream",
    "compute_map_set",
    "frame_score",
    "open_raw_yuv",
    "open_y4m",
    "score_frame",
    "score_stream",
    "video_score",
]
