"""Minimal YUV4MPEG2 reader/writer plus a headerless raw-YUV fallback.

Only the luma plane is ever touched; chroma bytes and header tokens are
carried through verbatim so that a read/write round trip is byte
identical.  Parse failures raise Y4MParseError carrying the byte offset
where the stream stopped making sense.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import FormatError, Y4MParseError
from .video import FramePlane

_MAGIC = b"YUV4MPEG2"


@dataclass(frozen=True)
class Y4MFrame:
    params: bytes  # raw bytes between "FRAME" and the newline, often empty
    luma: FramePlane
    chroma: bytes  # undecoded subsampled planes, passed through untouched


@dataclass(frozen=True)
class Y4MStream:
    header: bytes  # full header line without the trailing newline
    width: int
    height: int
    colorspace: str
    frames: tuple[Y4MFrame, ...]

    def __len__(self) -> int:
        return len(self.frames)

    def __iter__(self):
        return (f.luma for f in self.frames)

    def __getitem__(self, idx) -> FramePlane:
        return self.frames[idx].luma

    def with_luma(self, planes) -> "Y4MStream":
        """Same stream with the luma planes replaced frame by frame."""
        planes = list(planes)
        if len(planes) != len(self.frames):
            raise FormatError(
                f"stream has {len(self.frames)} frames, got {len(planes)} planes"
            )
        for p in planes:
            if (p.width, p.height) != (self.width, self.height):
                raise FormatError(
                    f"plane {p.width}x{p.height} does not match stream "
                    f"{self.width}x{self.height}"
                )
        frames = tuple(
            replace(f, luma=p) for f, p in zip(self.frames, planes)
        )
        return replace(self, frames=frames)


def _chroma_bytes(colorspace: str, width: int, height: int) -> int:
    if colorspace == "mono":
        return 0
    # 4:2:0 family: two quarter-size planes
    return 2 * (width // 2) * (height // 2)


def _parse_header(header: bytes) -> tuple[int, int, str]:
    width = height = None
    colorspace = "420"
    for token in header.split(b" ")[1:]:
        if not token:
            continue
        tag, value = token[:1], token[1:]
        try:
            if tag == b"W":
                width = int(value)
            elif tag == b"H":
                height = int(value)
            elif tag == b"C":
                colorspace = value.decode("ascii")
        except (ValueError, UnicodeDecodeError) as exc:
            raise Y4MParseError(
                f"bad header token {token!r}", byte_offset=header.index(token)
            ) from exc
    if width is None or height is None:
        raise Y4MParseError("header lacks W or H token", byte_offset=0)
    if width <= 0 or height <= 0:
        raise Y4MParseError(
            f"non-positive frame size {width}x{height}", byte_offset=0
        )
    if colorspace != "mono" and not colorspace.startswith("420"):
        raise Y4MParseError(
            f"unsupported colorspace C{colorspace} (4:2:0 or mono only)",
            byte_offset=0,
        )
    if colorspace != "mono" and (width % 2 or height % 2):
        raise Y4MParseError(
            f"4:2:0 needs even dimensions, got {width}x{height}", byte_offset=0
        )
    return width, height, colorspace


def parse_y4m(data: bytes) -> Y4MStream:
    if not data.startswith(_MAGIC):
        raise Y4MParseError("missing YUV4MPEG2 signature", byte_offset=0)
    nl = data.find(b"\n")
    if nl < 0:
        raise Y4MParseError("unterminated stream header", byte_offset=len(data))
    header = data[:nl]
    width, height, colorspace = _parse_header(header)
    luma_size = width * height
    chroma_size = _chroma_bytes(colorspace, width, height)

    frames = []
    pos = nl + 1
    while pos < len(data):
        if data[pos:pos + 5] != b"FRAME":
            raise Y4MParseError("expected FRAME marker", byte_offset=pos)
        fnl = data.find(b"\n", pos)
        if fnl < 0:
            raise Y4MParseError(
                "unterminated FRAME header", byte_offset=len(data)
            )
        params = data[pos + 5:fnl]
        body = fnl + 1
        end = body + luma_size + chroma_size
        if end > len(data):
            raise Y4MParseError(
                f"truncated frame {len(frames)}: need {end - len(data)} more bytes",
                byte_offset=len(data),
            )
        luma = np.frombuffer(data[body:body + luma_size], dtype=np.uint8)
        plane = FramePlane(
            width=width, height=height,
            samples=luma.reshape(height, width).copy(),
        )
        frames.append(
            Y4MFrame(params=params, luma=plane, chroma=data[body + luma_size:end])
        )
        pos = end
    return Y4MStream(
        header=header, width=width, height=height,
        colorspace=colorspace, frames=tuple(frames),
    )


def read_y4m(path) -> Y4MStream:
    with open(path, "rb") as fh:
        return parse_y4m(fh.read())


def serialize_y4m(stream: Y4MStream) -> bytes:
    parts = [stream.header, b"\n"]
    for frame in stream.frames:
        parts.append(b"FRAME" + frame.params + b"\n")
        parts.append(frame.luma.samples.tobytes())
        parts.append(frame.chroma)
    return b"".join(parts)


def write_y4m(stream: Y4MStream, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_y4m(stream))


def read_raw_yuv(path, width: int, height: int) -> Y4MStream:
    """Wrap a headerless YUV dump as a stream.

    Frame size decides the layout: multiples of w*h*3/2 are taken as
    4:2:0, multiples of w*h as luma-only.  A synthetic header is
    attached so the result can be written back as Y4M.
    """
    if width <= 0 or height <= 0:
        raise FormatError(f"raw input needs positive dimensions, got {width}x{height}")
    with open(path, "rb") as fh:
        data = fh.read()
    if not data:
        raise FormatError("raw input is empty")
    full = width * height * 3 // 2
    luma = width * height
    if width % 2 == 0 and height % 2 == 0 and len(data) % full == 0:
        colorspace, fsize = "420jpeg", full
    elif len(data) % luma == 0:
        colorspace, fsize = "mono", luma
    else:
        raise FormatError(
            f"raw size {len(data)} is neither a multiple of {full} (4:2:0) "
            f"nor {luma} (mono) for {width}x{height}"
        )
    header = (
        f"YUV4MPEG2 W{width} H{height} F25:1 Ip A1:1 C{colorspace}"
    ).encode("ascii")
    frames = []
    for k in range(len(data) // fsize):
        body = data[k * fsize:(k + 1) * fsize]
        plane = FramePlane(
            width=width, height=height,
            samples=np.frombuffer(body[:luma], dtype=np.uint8)
            .reshape(height, width).copy(),
        )
        frames.append(Y4MFrame(params=b"", luma=plane, chroma=body[luma:]))
    return Y4MStream(
        header=header, width=width, height=height,
        colorspace=colorspace, frames=tuple(frames),
    )


def read_video(path, width: int | None = None, height: int | None = None) -> Y4MStream:
    """Y4M when the signature is present, raw YUV (needs dimensions) otherwise."""
    with open(path, "rb") as fh:
        magic = fh.read(len(_MAGIC))
    if magic == _MAGIC:
        return read_y4m(path)
    if width is None or height is None:
        raise FormatError(
            "input has no YUV4MPEG2 signature; raw YUV needs --width and --height"
        )
    return read_raw_yuv(path, width, height)
