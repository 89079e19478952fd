"""Frame-level embedding: 4x4 block DCT, coefficient pools, PSNR.

Frames are 8-bit luma rasters whose dimensions are multiples of 4.
Each 4x4 block is transformed with the orthonormal DCT-II, the high
frequency coefficients of all blocks form one frame-wide pool, and a
keyed permutation of that pool assigns a disjoint group of spread_n
coefficients to every payload bit.  Nearest-integer rounding plus the
[0, 255] clip after the inverse transform is the only irreversible
step.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .codec import DecoderParams, EmbedConfig, decode_optimum, decode_suboptimum, select_indices
from .errors import CapacityError, ConfigError, FormatError

# 4x4 zig-zag scan: index 0 is DC, 15 the highest frequency.
ZIGZAG_4x4 = (
    (0, 0), (0, 1), (1, 0), (2, 0), (1, 1), (0, 2), (0, 3), (1, 2),
    (2, 1), (3, 0), (3, 1), (2, 2), (1, 3), (2, 3), (3, 2), (3, 3),
)


def _dct4_matrix() -> np.ndarray:
    x = np.arange(4)
    mat = np.cos(np.pi * (2 * x[None, :] + 1) * x[:, None] / 8.0) * np.sqrt(0.5)
    mat[0, :] = 0.5
    return mat


DCT4 = _dct4_matrix()


@dataclass(frozen=True)
class FramePlane:
    """8-bit luma raster; dimensions must be multiples of 4."""

    width: int
    height: int
    samples: np.ndarray

    def __post_init__(self):
        if self.width % 4 or self.height % 4 or self.width <= 0 or self.height <= 0:
            raise FormatError(
                f"frame dimensions must be positive multiples of 4, got "
                f"{self.width}x{self.height}"
            )
        if self.samples.shape != (self.height, self.width):
            raise FormatError(
                f"sample raster shape {self.samples.shape} does not match "
                f"{self.width}x{self.height}"
            )
        if self.samples.dtype != np.uint8:
            raise FormatError(f"samples must be uint8, got {self.samples.dtype}")

    @classmethod
    def from_array(cls, samples) -> "FramePlane":
        arr = np.asarray(samples, dtype=np.uint8)
        return cls(width=arr.shape[1], height=arr.shape[0], samples=arr)


@dataclass(frozen=True)
class CoeffPool:
    """Zig-zag positions inside each 4x4 block that may carry payload."""

    positions: tuple[int, ...] = (10, 11, 12, 13, 14, 15)

    def __post_init__(self):
        if len(set(self.positions)) != len(self.positions):
            raise ConfigError("pool positions must be distinct")
        if any(p < 1 or p > 15 for p in self.positions):
            raise ConfigError("pool positions must lie in 1..15 (DC excluded)")


DEFAULT_POOL = CoeffPool()


@dataclass(frozen=True)
class PayloadMap:
    """Exact record of where each bit went inside one frame."""

    bits: tuple[int, ...]
    groups: tuple[tuple[tuple[int, int], ...], ...]  # per bit: (block, zigzag) pairs
    strength_a: float
    spread_n: int
    key: bytes
    positions: tuple[int, ...]
    width: int
    height: int

    def to_dict(self) -> dict:
        return {
            "bits": "".join(str(b) for b in self.bits),
            "groups": [[list(c) for c in grp] for grp in self.groups],
        }

    @staticmethod
    def header_dict(cfg: EmbedConfig, pool: CoeffPool, width: int, height: int) -> dict:
        return {
            "version": 1,
            "width": width,
            "height": height,
            "strength_a": cfg.strength_a,
            "spread_n": cfg.spread_n,
            "key_hex": cfg.key.hex(),
            "positions": list(pool.positions),
        }


def fdct4(block) -> np.ndarray:
    """Orthonormal 4x4 DCT-II of one block."""
    return DCT4 @ np.asarray(block, dtype=np.float64) @ DCT4.T


def idct4(coeffs) -> np.ndarray:
    """Inverse of fdct4."""
    return DCT4.T @ np.asarray(coeffs, dtype=np.float64) @ DCT4


def frame_to_coeffs(frame: FramePlane) -> np.ndarray:
    """All 4x4 block DCTs at once, shape (blocks_y, blocks_x, 4, 4)."""
    nby, nbx = frame.height // 4, frame.width // 4
    blocks = (
        frame.samples.astype(np.float64)
        .reshape(nby, 4, nbx, 4)
        .transpose(0, 2, 1, 3)
    )
    return np.einsum("ui,bcij,vj->bcuv", DCT4, blocks, DCT4)


def coeffs_to_samples(coeffs: np.ndarray) -> np.ndarray:
    """Inverse block transform back to a float raster (no rounding)."""
    nby, nbx = coeffs.shape[:2]
    blocks = np.einsum("ui,bcuv,vj->bcij", DCT4, coeffs, DCT4)
    return blocks.transpose(0, 2, 1, 3).reshape(nby * 4, nbx * 4)


def coeffs_to_frame(coeffs: np.ndarray) -> FramePlane:
    raster = np.clip(np.rint(coeffs_to_samples(coeffs)), 0, 255).astype(np.uint8)
    return FramePlane.from_array(raster)


def frame_capacity(frame_blocks: int, pool: CoeffPool, spread_n: int) -> int:
    """Number of whole bits that fit into the frame-wide coefficient pool."""
    return (frame_blocks * len(pool.positions)) // spread_n


def _bit_groups(
    n_bits: int, n_blocks: int, cfg: EmbedConfig, pool: CoeffPool
) -> list[list[tuple[int, int]]]:
    """Disjoint per-bit coordinate groups from one keyed pool permutation."""
    pool_size = n_blocks * len(pool.positions)
    if n_bits * cfg.spread_n > pool_size:
        raise CapacityError(
            f"payload of {n_bits} bits needs {n_bits * cfg.spread_n} pool "
            f"coefficients but only {pool_size} exist; at most "
            f"{pool_size // cfg.spread_n} bits fit"
        )
    perm = select_indices(cfg.key, pool_size, n_bits * cfg.spread_n)
    width = len(pool.positions)
    groups = []
    for k in range(n_bits):
        chunk = perm[k * cfg.spread_n:(k + 1) * cfg.spread_n]
        groups.append(
            [(int(p) // width, pool.positions[int(p) % width]) for p in chunk]
        )
    return groups


def embed_in_coeffs(
    coeffs: np.ndarray, bits, cfg: EmbedConfig, pool: CoeffPool = DEFAULT_POOL
) -> tuple[np.ndarray, list[list[tuple[int, int]]]]:
    """Apply the +-a shifts in the coefficient domain; no rounding involved."""
    nby, nbx = coeffs.shape[:2]
    bits = [int(b) for b in bits]
    if any(b not in (0, 1) for b in bits):
        raise ConfigError("payload bits must be 0 or 1")
    out = coeffs.copy()
    groups = _bit_groups(len(bits), nby * nbx, cfg, pool)
    for bit, group in zip(bits, groups):
        delta = cfg.strength_a if bit else -cfg.strength_a
        for block, zz in group:
            r, c = ZIGZAG_4x4[zz]
            out[block // nbx, block % nbx, r, c] += delta
    return out, groups


def embed_frame(
    frame: FramePlane, bits, cfg: EmbedConfig, pool: CoeffPool = DEFAULT_POOL
) -> tuple[FramePlane, PayloadMap]:
    """Embed a bit sequence into one frame; returns the frame and its map."""
    bits = [int(b) for b in bits]
    if not bits:
        payload = PayloadMap(
            bits=(), groups=(), strength_a=cfg.strength_a, spread_n=cfg.spread_n,
            key=cfg.key, positions=pool.positions, width=frame.width,
            height=frame.height,
        )
        return frame, payload
    coeffs, groups = embed_in_coeffs(frame_to_coeffs(frame), bits, cfg, pool)
    payload = PayloadMap(
        bits=tuple(bits),
        groups=tuple(tuple(g) for g in groups),
        strength_a=cfg.strength_a,
        spread_n=cfg.spread_n,
        key=cfg.key,
        positions=pool.positions,
        width=frame.width,
        height=frame.height,
    )
    return coeffs_to_frame(coeffs), payload


def extract_frame(
    frame: FramePlane,
    source,
    decoder: DecoderParams | None = None,
    kind: str = "suboptimum",
    num_bits: int | None = None,
    pool: CoeffPool = DEFAULT_POOL,
) -> list[int]:
    """Decode the payload of one frame.

    `source` is either the PayloadMap written at embed time or the
    EmbedConfig used then (requiring `num_bits`); both regenerate the
    same coefficient groups.  kind selects the decoder; "optimum" needs
    DecoderParams.
    """
    if kind not in ("optimum", "suboptimum"):
        raise ConfigError(f"unknown decoder kind {kind!r}")
    if isinstance(source, PayloadMap):
        if (source.width, source.height) != (frame.width, frame.height):
            raise FormatError(
                f"payload map was built for {source.width}x{source.height}, "
                f"frame is {frame.width}x{frame.height}"
            )
        groups = source.groups
        strength = source.strength_a
        pool = CoeffPool(positions=source.positions)
    elif isinstance(source, EmbedConfig):
        if num_bits is None:
            raise ConfigError("num_bits is required when extracting from a config")
        nby, nbx = frame.height // 4, frame.width // 4
        groups = _bit_groups(num_bits, nby * nbx, source, pool)
        strength = source.strength_a
    else:
        raise ConfigError("source must be a PayloadMap or EmbedConfig")

    if kind == "optimum" and decoder is None:
        raise ConfigError("optimum extraction needs DecoderParams")
    coeffs = frame_to_coeffs(frame)
    nbx = coeffs.shape[1]
    bits = []
    for group in groups:
        y = np.array(
            [coeffs[b // nbx, b % nbx][ZIGZAG_4x4[zz]] for b, zz in group]
        )
        if kind == "optimum":
            bits.append(decode_optimum(y, decoder))
        else:
            a = decoder.strength_a if decoder is not None else strength
            bits.append(decode_suboptimum(y, a))
    return bits


def pool_coefficients(frame: FramePlane, pool: CoeffPool = DEFAULT_POOL) -> np.ndarray:
    """Flat vector of every pool coefficient of the frame, raster block order."""
    coeffs = frame_to_coeffs(frame)
    rows = [ZIGZAG_4x4[p][0] for p in pool.positions]
    cols = [ZIGZAG_4x4[p][1] for p in pool.positions]
    return coeffs[:, :, rows, cols].reshape(-1)


def psnr(reference: FramePlane, test: FramePlane) -> float:
    """Peak signal-to-noise ratio in dB; +inf for identical frames."""
    if (reference.width, reference.height) != (test.width, test.height):
        raise FormatError(
            f"frame sizes differ: {reference.width}x{reference.height} vs "
            f"{test.width}x{test.height}"
        )
    diff = reference.samples.astype(np.float64) - test.samples.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return float("inf")
    return 10.0 * np.log10(255.0 ** 2 / mse)


def predicted_psnr(cfg: EmbedConfig, bits: int, frame_pixels: int) -> float:
    """Distortion predicted from the transform's energy preservation.

    Each bit adds spread_n coefficient shifts of magnitude a, and the
    orthonormal transform carries that energy unchanged into the pixel
    domain, so MSE = bits * spread_n * a^2 / frame_pixels (rounding
    excluded).
    """
    if bits < 0 or frame_pixels <= 0:
        raise ConfigError("bits must be >= 0 and frame_pixels positive")
    if bits == 0:
        return float("inf")
    mse = bits * cfg.spread_n * cfg.strength_a ** 2 / frame_pixels
    return 10.0 * np.log10(255.0 ** 2 / mse)


def payload_maps_to_json(maps: list[PayloadMap]) -> str:
    """Serialize the per-frame payload maps into the sidecar format."""
    if not maps:
        raise ConfigError("no payload maps to serialize")
    first = maps[0]
    doc = {
        "version": 1,
        "width": first.width,
        "height": first.height,
        "strength_a": first.strength_a,
        "spread_n": first.spread_n,
        "key_hex": first.key.hex(),
        "positions": list(first.positions),
        "frames": [m.to_dict() for m in maps],
    }
    return json.dumps(doc, indent=1)


def payload_maps_from_json(text: str) -> list[PayloadMap]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"payload map is not valid JSON: {exc}") from exc
    if doc.get("version") != 1:
        raise FormatError(f"unsupported payload map version {doc.get('version')!r}")
    maps = []
    for fr in doc["frames"]:
        maps.append(
            PayloadMap(
                bits=tuple(int(b) for b in fr["bits"]),
                groups=tuple(
                    tuple((int(b), int(z)) for b, z in grp) for grp in fr["groups"]
                ),
                strength_a=float(doc["strength_a"]),
                spread_n=int(doc["spread_n"]),
                key=bytes.fromhex(doc["key_hex"]),
                positions=tuple(int(p) for p in doc["positions"]),
                width=int(doc["width"]),
                height=int(doc["height"]),
            )
        )
    return maps
