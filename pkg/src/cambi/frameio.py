"""Luma frame containers, Y4M / raw YUV decoding, and map export.

Only the luma plane is ever retained; chroma payloads are skipped on read
and synthesized at mid-grey on write.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import BinaryIO, Iterator, Sequence

import numpy as np

from cambi.errors import FormatError, TruncationError

Y4M_MAGIC = b"YUV4MPEG2"

# colorspace token -> (bit depth, chroma subsampling)
# subsampling is (horizontal shift, vertical shift), None for no chroma planes
_Y4M_COLORSPACES = {
    "420": (8, (1, 1)),
    "420jpeg": (8, (1, 1)),
    "420paldv": (8, (1, 1)),
    "420mpeg2": (8, (1, 1)),
    "422": (8, (1, 0)),
    "444": (8, (0, 0)),
    "mono": (8, None),
    "420p10": (10, (1, 1)),
    "422p10": (10, (1, 0)),
    "444p10": (10, (0, 0)),
    "mono10": (10, None),
}

RAW_PIXEL_FORMATS = ("yuv420", "yuv420p10le", "gray")


@dataclass(frozen=True)
class LumaFrame:
    """Single-channel integer intensity plane.

    ``data`` is a read-only ``(height, width)`` uint16 array.
    """

    width: int
    height: int
    bit_depth: int
    data: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"frame dimensions must be positive, got {self.width}x{self.height}")
        data = np.asarray(self.data)
        if data.size != self.width * self.height:
            raise ValueError(
                f"data has {data.size} samples, expected {self.width * self.height}"
            )
        if data.size and (data.min() < 0 or data.max() > (1 << self.bit_depth) - 1):
            raise ValueError(
                f"sample out of range for {self.bit_depth}-bit frame "
                f"(min {data.min()}, max {data.max()})"
            )
        data = np.ascontiguousarray(data.reshape(self.height, self.width), dtype=np.uint16)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @classmethod
    def from_array(cls, array, bit_depth: int) -> "LumaFrame":
        array = np.asarray(array)
        if array.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {array.shape}")
        return cls(array.shape[1], array.shape[0], bit_depth, array)

    def __eq__(self, other):
        if not isinstance(other, LumaFrame):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and self.bit_depth == other.bit_depth
            and np.array_equal(self.data, other.data)
        )

    __hash__ = None


@dataclass
class VideoStream:
    frames: list[LumaFrame]
    frame_rate: Fraction
    source_descriptor: str = ""

    def __post_init__(self):
        self.frame_rate = Fraction(self.frame_rate)
        if self.frame_rate <= 0:
            raise ValueError(f"frame rate must be positive, got {self.frame_rate}")
        if self.frames:
            first = self.frames[0]
            for i, f in enumerate(self.frames[1:], start=1):
                if (f.width, f.height, f.bit_depth) != (first.width, first.height, first.bit_depth):
                    raise ValueError(f"frame {i} geometry differs from frame 0")

    def __len__(self):
        return len(self.frames)

    def __iter__(self) -> Iterator[LumaFrame]:
        return iter(self.frames)


def _chroma_samples(width: int, height: int, subsampling) -> int:
    if subsampling is None:
        return 0
    sx, sy = subsampling
    cw =(width + (1 << sx) - 1) >> sx
    ch = (height + (1 << sy) - 1) >> sy
    return 2 * cw * ch


def _decode_luma(buf: bytes, width: int, height: int, bit_depth: int, where: str) -> LumaFrame:
    if bit_depth == 8:
        plane = np.frombuffer(buf, dtype=np.uint8, count=width * height)
    else:
        plane = np.frombuffer(buf, dtype="<u2", count=width * height)
        if plane.size and plane.max() > 1023:
            raise FormatError(f"{where}: 10-bit sample {int(plane.max())} exceeds 1023")
    return LumaFrame(width, height, bit_depth, plane.reshape(height, width))


def _parse_rate(token: str) -> Fraction:
    try:
        num, den = token.split(":")
        rate = Fraction(int(num), int(den))
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"malformed frame-rate token 'F{token}'") from None
    if rate <= 0:
        raise FormatError(f"non-positive frame-rate token 'F{token}'")
    return rate


def parse_y4m_header(line: bytes) -> dict:
    """Decode a stream header line (without its trailing newline)."""
    parts = line.split(b" ")
    if parts[0] != Y4M_MAGIC:
        raise FormatError(f"missing YUV4MPEG2 signature, got {parts[0][:16]!r}")
    header = {"colorspace": "420", "interlace": "p"}
    for raw in parts[1:]:
        if not raw:
            continue
        try:
            tok = raw.decode("ascii")
        except UnicodeDecodeError:
            raise FormatError(f"non-ASCII header token {raw!r}") from None
        tag, value = tok[0], tok[1:]
        if tag in "WH":
            if not value.isdigit() or int(value) <= 0:
                raise FormatError(f"malformed dimension token '{tok}'")
            header["width" if tag == "W" else "height"] = int(value)
        elif tag == "F":
            header["frame_rate"] = _parse_rate(value)
        elif tag == "C":
            if value not in _Y4M_COLORSPACES:
                raise FormatError(f"unsupported colorspace token '{tok}'")
            header["colorspace"] = value
        elif tag == "I":
            header["interlace"] = value
        elif tag in "AX":
            pass
        else:
            raise FormatError(f"unknown header token '{tok}'")
    for key, tag in (("width", "W"), ("height", "H"), ("frame_rate", "F")):
        if key not in header:
            raise FormatError(f"header lacks required '{tag}' token")
    return header


def read_y4m(fh: BinaryIO, source: str = "<stream>") -> VideoStream:
    line = fh.readline()
    if not line.endswith(b"\n"):
        raise FormatError("header line is not newline-terminated")
    header = parse_y4m_header(line[:-1])
    width, height = header["width"], header["height"]
    bit_depth, subsampling = _Y4M_COLORSPACES[header["colorspace"]]
    bps = 1 if bit_depth == 8 else 2
    luma_bytes = width * height * bps
    chroma_bytes = _chroma_samples(width, height, subsampling) * bps

    frames = []
    while True:
        marker = fh.readline()
        if not marker:
            break
        index = len(frames)
        if not marker.startswith(b"FRAME") or not marker.endswith(b"\n"):
            raise FormatError(f"frame {index}: bad frame marker {marker[:16]!r}")
        luma = fh.read(luma_bytes)
        chroma = fh.read(chroma_bytes)
        if len(luma) < luma_bytes or len(chroma) < chroma_bytes:
            raise TruncationError(
                f"frame {index}: payload truncated "
                f"({len(luma) + len(chroma)} of {luma_bytes + chroma_bytes} bytes)"
            )
        frames.append(_decode_luma(luma, width, height, bit_depth, f"frame {index}"))
    descriptor = f"{source} (y4m C{header['colorspace']})"
    return VideoStream(frames, header["frame_rate"], descriptor)


def open_y4m(path) -> VideoStream:
    """Decode the luma planes of a YUV4MPEG2 file."""
    with open(path, "rb") as fh:
        return read_y4m(fh, os.fspath(path))


def raw_frame_bytes(width: int, height: int, pixel_format: str, bit_depth: int) -> tuple[int, int]:
    """Return ``(luma_bytes, total_bytes)`` for one raw frame."""
    if pixel_format == "gray":
        bps = 1 if bit_depth == 8 else 2
        return width * height * bps, width * height * bps
    if pixel_format == "yuv420":
        bps = 1
    elif pixel_format == "yuv420p10le":
        bps = 2
    else:
        raise FormatError(f"unknown pixel format '{pixel_format}'")
    luma = width * height * bps
    return luma, luma + _chroma_samples(width, height, (1, 1)) * bps


def open_raw_yuv(
    path,
    width: int,
    height: int,
    bit_depth: int,
    pixel_format: str,
    frame_rate,
) -> VideoStream:
    """Decode a headerless planar file with caller-supplied geometry."""
    if width <= 0 or height <= 0:
        raise FormatError(f"raw geometry must be positive, got {width}x{height}")
    if bit_depth not in (8, 10):
        raise FormatError(f"unsupported bit depth {bit_depth}")
    expected_depth = {"yuv420": 8, "yuv420p10le": 10}.get(pixel_format, bit_depth)
    if expected_depth != bit_depth:
        raise FormatError(f"pixel format '{pixel_format}' implies {expected_depth}-bit, got {bit_depth}")
    luma_bytes, frame_bytes = raw_frame_bytes(width, height, pixel_format, bit_depth)

    with open(path, "rb") as fh:
        payload = fh.read()
    if len(payload) % frame_bytes:
        raise TruncationError(
            f"file size {len(payload)} is not a multiple of the {frame_bytes}-byte frame size"
        )
    frames = []
    for index in range(len(payload) // frame_bytes):
        start = index * frame_bytes
        frames.append(
            _decode_luma(payload[start : start + luma_bytes], width, height, bit_depth, f"frame {index}")
        )
    return VideoStream(frames, Fraction(frame_rate), f"{os.fspath(path)} (raw {pixel_format})")


def _format_rate(rate: Fraction) -> str:
    return f"{rate.numerator}:{rate.denominator}"


def write_y4m(stream: VideoStream, path) -> None:
    """Write luma planes as Y4M with mid-grey 4:2:0 chroma."""
    if not stream.frames:
        raise ValueError("cannot infer geometry of an empty stream")
    first = stream.frames[0]
    w, h, depth = first.width, first.height, first.bit_depth
    colorspace = "420jpeg" if depth == 8 else "420p10"
    dtype = np.uint8 if depth == 8 else np.dtype("<u2")
    chroma = np.full(_chroma_samples(w, h, (1, 1)), 1 << (depth - 1), dtype=dtype).tobytes()
    with open(path, "wb") as fh:
        fh.write(f"YUV4MPEG2 W{w} H{h} F{_format_rate(stream.frame_rate)} Ip A1:1 C{colorspace}\n".encode())
        for frame in stream.frames:
            fh.write(b"FRAME\n")
            fh.write(frame.data.astype(dtype).tobytes())
            fh.write(chroma)


def write_raw_gray(frames: Sequence[LumaFrame], path) -> None:
    with open(path, "wb") as fh:
        for frame in frames:
            dtype = np.uint8 if frame.bit_depth == 8 else np.dtype("<u2")
            fh.write(frame.data.astype(dtype).tobytes())


def _unit_to_bytes(values) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise ValueError(f"expected a 2-D map, got shape {values.shape}")
    if values.size and (np.isnan(values).any() or values.min() < 0.0 or values.max() > 1.0):
        raise ValueError("map values must lie in [0, 1]")
    return np.floor(values * 255.0 + 0.5).astype(np.uint8)


def write_pgm(values, path) -> None:
    """Write a [0, 1] scalar field as binary 8-bit PGM."""
    pixels = _unit_to_bytes(values)
    h, w = pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode())
        fh.write(pixels.tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        blob = fh.read()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while blob[pos : pos + 1].isspace():
            pos += 1
        start = pos
        while not blob[pos : pos + 1].isspace():
            pos += 1
        tokens.append(blob[start:pos])
    if tokens[0] != b"P5":
        raise FormatError(f"not a binary PGM: {tokens[0]!r}")
    w, h, maxval = (int(t) for t in tokens[1:])
    if maxval != 255:
        raise FormatError(f"unsupported PGM maxval {maxval}")
    pixels = np.frombuffer(blob, dtype=np.uint8, count=w * h, offset=pos + 1)
    return pixels.reshape(h, w)


def heat_colormap() -> np.ndarray:
    """256-entry black -> red -> yellow -> white ramp, shape (256, 3) uint8.

    Entry i has red = min(255, 3i), green = clip(3i - 255, 0, 255),
    blue = clip(3i - 510, 0, 255).
    """
    i = np.arange(256) * 3
    return np.stack(
        [np.clip(i, 0, 255), np.clip(i - 255, 0, 255), np.clip(i - 510, 0, 255)], axis=1
    ).astype(np.uint8)


def write_ppm(values, path) -> None:
    """False-color variant of :func:`write_pgm` using :func:`heat_colormap`."""
    rgb = heat_colormap()[_unit_to_bytes(values)]
    h, w = rgb.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode())
        fh.write(rgb.tobytes())
