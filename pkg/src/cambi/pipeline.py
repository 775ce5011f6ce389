from __future__ import annotations

import numba

from cambi.banding import BandingMapSet, compute_map_set
from cambi.config import CambiConfig
from cambi.frameio import LumaFrame, VideoStream
from cambi.pooling import FrameScore, VideoReport, frame_score, select_frames, video_score
from cambi.preprocess import preprocess


def set_threads(threads: int | None) -> int:
    """Bound the kernel worker count; returns the count in effect."""
    limit = numba.config.NUMBA_NUM_THREADS
    n = limit if threads is None else max(1, min(int(threads), limit))
    numba.set_num_threads(n)
    return n


def frame_maps(
    frame: LumaFrame, config: CambiConfig, frame_index: int = 0, time_sec: float = 0.0
) -> BandingMapSet:
    return compute_map_set(preprocess(frame, config), config, frame_index, time_sec)


def score_frame(
    frame: LumaFrame, config: CambiConfig, frame_index: int = 0, time_sec: float = 0.0
) -> FrameScore:
    return frame_score(frame_maps(frame, config, frame_index, time_sec), config)


def score_stream(stream: VideoStream, config: CambiConfig) -> VideoReport:
    """Score every sub-sampled frame and average.

    Frames are processed in order; parallelism lives inside the kernels,
    which partition rows, so results do not depend on the thread count.
    """
    scores = [
        score_frame(stream.frames[index], config, index, time_sec)
        for index, time_sec in select_frames(stream, config.t_sec)
    ]
    return video_score(scores, config)
