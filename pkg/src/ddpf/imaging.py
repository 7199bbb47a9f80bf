"""Frames, rectangles, binary PPM/PGM codecs, grayscale conversion, overlays."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DecodeError

# Rec. 601 luma weights.
_LUMA = np.array([0.299, 0.587, 0.114])

_WHITESPACE = frozenset(b" \t\n\r\x0b\x0c")

FRAME_NAME_RE = re.compile(r"^frame_(\d+)\.(ppm|pgm)$")


def iround(x: float) -> int:
    """Round half up. Banker's rounding would anchor even-sized rects unevenly."""
    return int(np.floor(x + 0.5))


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle: sub-pixel center plus integer full side lengths."""

    cx: float
    cy: float
    hx: int
    hy: int

    def __post_init__(self) -> None:
        if self.hx < 1 or self.hy < 1:
            raise ValueError(f"rect sides must be >= 1, got {self.hx}x{self.hy}")

    def x_offsets(self) -> np.ndarray:
        """Integer column offsets covered by the rect, relative to the rounded center."""
        lo = -(self.hx // 2)
        return np.arange(lo, lo + self.hx)

    def y_offsets(self) -> np.ndarray:
        """Integer row offsets covered by the rect, relative to the rounded center."""
        lo = -(self.hy // 2)
        return np.arange(lo, lo + self.hy)

    def x_range(self) -> tuple[int, int]:
        """Inclusive (first, last) column covered by the rect."""
        off = self.x_offsets()
        base = iround(self.cx)
        return base + int(off[0]), base + int(off[-1])

    def y_range(self) -> tuple[int, int]:
        """Inclusive (first, last) row covered by the rect."""
        off = self.y_offsets()
        base = iround(self.cy)
        return base + int(off[0]), base + int(off[-1])


@dataclass(eq=False)
class Frame:
    """RGB image; pixels is a (height, width, 3) uint8 array."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError("frame dimensions must be >= 1")
        self.pixels = np.ascontiguousarray(self.pixels, dtype=np.uint8)
        if self.pixels.shape != (self.height, self.width, 3):
            raise ValueError(
                f"pixel buffer shape {self.pixels.shape} does not match "
                f"{self.height}x{self.width}x3"
            )

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Frame)
            and self.width == other.width
            and self.height == other.height
            and np.array_equal(self.pixels, other.pixels)
        )

    @classmethod
    def filled(cls, width: int, height: int, color: tuple[int, int, int]) -> "Frame":
        pixels = np.empty((height, width, 3), dtype=np.uint8)
        pixels[:] = np.asarray(color, dtype=np.uint8)
        return cls(width, height, pixels)


@dataclass(eq=False)
class GrayFrame:
    """Single-channel image; pixels is a (height, width) uint8 array."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError("frame dimensions must be >= 1")
        self.pixels = np.ascontiguousarray(self.pixels, dtype=np.uint8)
        if self.pixels.shape != (self.height, self.width):
            raise ValueError(
                f"pixel buffer shape {self.pixels.shape} does not match "
                f"{self.height}x{self.width}"
            )

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, GrayFrame)
            and self.width == other.width
            and self.height == other.height
            and np.array_equal(self.pixels, other.pixels)
        )


def _next_token(data: bytes, pos: int) -> tuple[bytes, int, int]:
    """Skip whitespace and '#' comments; return (token, token_offset, next_pos)."""
    n = len(data)
    while pos < n:
        b = data[pos]
        if b == 0x23:  # '#': comment runs to end of line
            while pos < n and data[pos] != 0x0A:
                pos += 1
        elif b in _WHITESPACE:
            pos += 1
        else:
            break
    if pos >= n:
        raise DecodeError("unexpected end of header", pos)
    start = pos
    while pos < n and data[pos] not in _WHITESPACE and data[pos] != 0x23:
        pos += 1
    return data[start:pos], start, pos


def _parse_header(data: bytes, magic: bytes) -> tuple[int, int, int]:
    """Validate magic / width / height / maxval; return (width, height, payload_pos)."""
    if data[:2] != magic:
        raise DecodeError(f"expected {magic.decode()} magic", 0)
    pos = 2
    values = []
    for name in ("width", "height", "maxval"):
        token, off, pos = _next_token(data, pos)
        try:
            value = int(token)
        except ValueError:
            raise DecodeError(f"invalid {name} token {token!r}", off) from None
        if name != "maxval" and value < 1:
            raise DecodeError(f"{name} must be >= 1, got {value}", off)
        if name == "maxval" and value != 255:
            raise DecodeError(f"unsupported maxval {value}, only 255", off)
        values.append(value)
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise DecodeError("expected single whitespace byte before payload", pos)
    return values[0], values[1], pos + 1


def decode_ppm(data: bytes) -> Frame:
    """Decode a binary (P6) PPM byte string."""
    width, height, pos = _parse_header(data, b"P6")
    expected = width * height * 3
    if len(data) - pos < expected:
        raise DecodeError(
            f"truncated payload: expected {expected} bytes, found {len(data) - pos}",
            len(data),
        )
    pixels = np.frombuffer(data, dtype=np.uint8, count=expected, offset=pos)
    return Frame(width, height, pixels.reshape(height, width, 3))


def decode_pgm(data: bytes) -> GrayFrame:
    """Decode a binary (P5) PGM byte string."""
    width, height, pos = _parse_header(data, b"P5")
    expected = width * height
    if len(data) - pos < expected:
        raise DecodeError(
            f"truncated payload: expected {expected} bytes, found {len(data) - pos}",
            len(data),
        )
    pixels = np.frombuffer(data, dtype=np.uint8, count=expected, offset=pos)
    return GrayFrame(width, height, pixels.reshape(height, width))


def encode_ppm(frame: Frame) -> bytes:
    """Encode a Frame as canonical binary PPM (maxval 255)."""
    header = f"P6\n{frame.width} {frame.height}\n255\n".encode("ascii")
    return header + frame.pixels.tobytes()


def encode_pgm(gray: GrayFrame) -> bytes:
    """Encode a GrayFrame as canonical binary PGM (maxval 255)."""
    header = f"P5\n{gray.width} {gray.height}\n255\n".encode("ascii")
    return header + gray.pixels.tobytes()


def to_gray(frame: Frame) -> GrayFrame:
    """Luma conversion, rounded half up per pixel."""
    y = frame.pixels.astype(np.float64) @ _LUMA
    y = np.clip(np.floor(y + 0.5), 0, 255).astype(np.uint8)
    return GrayFrame(frame.width, frame.height, y)


def gray_to_frame(gray: GrayFrame) -> Frame:
    """Promote a grayscale image to RGB by channel replication."""
    return Frame(gray.width, gray.height, np.repeat(gray.pixels[:, :, None], 3, axis=2))


def extract_patch(gray: GrayFrame, rect: Rect) -> np.ndarray:
    """Grayscale patch under the rect as a (hy, hx) array.

    Sampling is anchored at the rounded center; coordinates falling outside the
    frame are clamped to the nearest border pixel, so the output shape never
    shrinks.
    """
    xs = np.clip(iround(rect.cx) + rect.x_offsets(), 0, gray.width - 1)
    ys = np.clip(iround(rect.cy) + rect.y_offsets(), 0, gray.height - 1)
    return gray.pixels[np.ix_(ys, xs)]


def extract_patch_rgb(frame: Frame, rect: Rect) -> np.ndarray:
    """RGB pixels under the rect as a (hy, hx, 3) array, border-clamped like extract_patch."""
    xs = np.clip(iround(rect.cx) + rect.x_offsets(), 0, frame.width - 1)
    ys = np.clip(iround(rect.cy) + rect.y_offsets(), 0, frame.height - 1)
    return frame.pixels[np.ix_(ys, xs)]


def _line_pixels(x0: int, y0: int, x1: int, y1: int) -> Iterable[tuple[int, int]]:
    """Bresenham line, endpoints included."""
    dx = abs(x1 - x0)
    sx = 1 if x0 < x1 else -1
    dy = -abs(y1 - y0)
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    while True:
        yield x0, y0
        if x0 == x1 and y0 == y1:
            return
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


def draw_overlay(
    frame: Frame,
    rects: Sequence[tuple[Rect, tuple[int, int, int]]] = (),
    trails: Sequence[Sequence[tuple[float, float]]] = (),
    trail_color: tuple[int, int, int] = (255, 255, 0),
) -> Frame:
    """Copy of the frame with 1-px rect outlines and trail polylines drawn.

    Anything falling outside the frame is clipped; the input frame is never
    modified.
    """
    out = frame.pixels.copy()
    h, w = frame.height, frame.width
    for rect, color in rects:
        x0, x1 = rect.x_range()
        y0, y1 = rect.y_range()
        cx0, cx1 = max(x0, 0), min(x1, w - 1)
        cy0, cy1 = max(y0, 0), min(y1, h - 1)
        if cx0 > cx1 or cy0 > cy1:
            continue
        if 0 <= y0 < h:
            out[y0, cx0 : cx1 + 1] = color
        if 0 <= y1 < h and y1 != y0:
            out[y1, cx0 : cx1 + 1] = color
        ry0, ry1 = max(y0 + 1, 0), min(y1 - 1, h - 1)
        if ry0 <= ry1:
            if 0 <= x0 < w:
                out[ry0 : ry1 + 1, x0] = color
            if 0 <= x1 < w and x1 != x0:
                out[ry0 : ry1 + 1, x1] = color
    for trail in trails:
        points = [(iround(px), iround(py)) for px, py in trail]
        for (ax, ay), (bx, by) in zip(points, points[1:]):
            for x, y in _line_pixels(ax, ay, bx, by):
                if 0 <= x < w and 0 <= y < h:
                    out[y, x] = trail_color
        if len(points) == 1:
            x, y = points[0]
            if 0 <= x < w and 0 <= y < h:
                out[y, x] = trail_color
    return Frame(frame.width, frame.height, out)


def frame_filename(index: int) -> str:
    return f"frame_{index:05d}.ppm"


def overlay_filename(index: int) -> str:
    return f"overlay_{index:05d}.ppm"


def load_frame(path: Path | str) -> Frame:
    """Load a single PPM or PGM file; PGM is promoted to RGB."""
    path = Path(path)
    data = path.read_bytes()
    if path.suffix == ".pgm":
        return gray_to_frame(decode_pgm(data))
    return decode_ppm(data)


def sequence_paths(directory: Path | str) -> list[Path]:
    """Frame files in the directory, ordered by their numeric index."""
    directory = Path(directory)
    found = []
    for path in directory.iterdir():
        match = FRAME_NAME_RE.match(path.name)
        if match:
            found.append((int(match.group(1)), path.name, path))
    found.sort()
    return [path for _, _, path in found]


def load_sequence(directory: Path | str) -> list[Frame]:
    """Load every frame_<index>.ppm/.pgm in the directory, in index order."""
    paths = sequence_paths(directory)
    if not paths:
        raise FileNotFoundError(f"no frame_<index>.ppm/.pgm files in {directory}")
    return [load_frame(p) for p in paths]


def save_frame(path: Path | str, frame: Frame) -> None:
    Path(path).write_bytes(encode_ppm(frame))
