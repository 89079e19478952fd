"""Embedding rule, keyed coefficient selection and the two decoders.

A payload bit shifts its N carrier coefficients by +a (bit 1) or -a
(bit 0).  The optimum decoder sums the exact log-likelihood ratio of
the host+noise sum density at y-a versus y+a; the sub-optimum decoder
sums the observations clamped into [-a, a].  Both decide bit 1 on a
non-negative sum (ties included), which keeps the error accounting
exact.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ConfigError
from .model import EQUAL_SCALE_RTOL

# Floor applied to the log argument in the factored LLR; the bracket is
# mathematically positive but can round to zero when both the scale gap
# and the distance from the clamp knee underflow together.
_LOG_FLOOR = np.finfo(np.float64).tiny


@dataclass(frozen=True)
class EmbedConfig:
    """Watermark strength, spreading length and the selection key."""

    strength_a: float
    spread_n: int
    key: bytes

    def __post_init__(self):
        if not (np.isfinite(self.strength_a) and self.strength_a > 0.0):
            raise ConfigError(f"strength_a must be positive, got {self.strength_a}")
        if self.spread_n < 1:
            raise ConfigError(f"spread_n must be >= 1, got {self.spread_n}")
        if not isinstance(self.key, (bytes, bytearray)):
            raise ConfigError("key must be a byte string")


@dataclass(frozen=True)
class DecoderParams:
    """Channel knowledge the optimum decoder needs: host scale, g, strength."""

    host_scale: float
    g: float
    strength_a: float

    def __post_init__(self):
        for name in ("host_scale", "g", "strength_a"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0.0):
                raise ConfigError(f"{name} must be positive, got {v}")

    def noise_scale(self) -> float:
        return self.g * self.host_scale


def select_indices(key: bytes, pool_size: int, n: int) -> np.ndarray:
    """Pick n distinct indices from [0, pool_size) as a pure function of the key.

    A BLAKE2b hash of (key, pool_size, n) seeds a Philox counter-based
    generator which drives a partial Fisher-Yates shuffle, so the result
    is reproducible across platforms.  The first n slots of the shuffle
    are returned in shuffle order.
    """
    if pool_size < 1:
        raise ConfigError(f"pool_size must be >= 1, got {pool_size}")
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    if n > pool_size:
        raise CapacityError(
            f"cannot select {n} distinct indices from a pool of {pool_size}"
        )
    digest = hashlib.blake2b(
        bytes(key) + pool_size.to_bytes(8, "little") + n.to_bytes(8, "little"),
        digest_size=32,
    ).digest()
    words = np.frombuffer(digest, dtype=np.uint64)
    # Philox-4x64 takes a 2-word key; fold the remaining digest words
    # into the counter so the whole hash participates.
    counter = np.zeros(4, dtype=np.uint64)
    counter[:2] = words[2:]
    rng = np.random.Generator(np.random.Philox(key=words[:2], counter=counter))

    perm = np.arange(pool_size, dtype=np.int64)
    picks = rng.integers(np.arange(n), pool_size)
    for i in range(n):
        j = picks[i]
        perm[i], perm[j] = perm[j], perm[i]
    return perm[:n].copy()


def embed_bit(coeffs, bit: int, a: float) -> np.ndarray:
    """Shift every coefficient by +a for bit 1, -a for bit 0."""
    if a < 0.0:
        raise ConfigError(f"strength a must be >= 0, got {a}")
    if bit not in (0, 1):
        raise ConfigError(f"bit must be 0 or 1, got {bit}")
    coeffs = np.asarray(coeffs, dtype=np.float64)
    return coeffs + (a if bit else -a)


def clamp_stat(y, a: float):
    """Soft-limiter statistic (|y+a| - |y-a|) / 2.

    Identical to clamping y into [-a, a] up to rounding; the absolute
    value form is kept verbatim so the algebraic identity holds exactly
    in floats.
    """
    if a <= 0.0:
        raise ConfigError(f"strength a must be positive, got {a}")
    y = np.asarray(y, dtype=np.float64)
    out = (np.abs(y + a) - np.abs(y - a)) / 2.0
    return out if out.ndim else float(out)


def llr_sample(y, p: DecoderParams):
    """Exact per-sample log-likelihood ratio ln f(y-a) - ln f(y+a).

    f is the host+noise sum density.  The slower-decaying exponential
    (scale b_max) is factored out so the expression stays finite for
    |y| out to thousands of scales:

        llr = (|y+a| - |y-a|)/b_max + ln B(|y-a|) - ln B(|y+a|)

    with B(x) = (1 - r) - r*expm1(-x*(1/b_min - 1/b_max)) and
    r = b_min/b_max.  Both addends of B are non-negative, which avoids
    the catastrophic cancellation of evaluating 1 - r*exp(-x*d)
    directly.  Odd in y by construction.
    """
    y = np.asarray(y, dtype=np.float64)
    a = p.strength_a
    bh, bn = p.host_scale, p.noise_scale()
    ym, yp = np.abs(y - a), np.abs(y + a)
    if abs(bn - bh) < EQUAL_SCALE_RTOL * bh:
        # Limit branch: f(y) ~ exp(-|y|/b) * (1 + |y|/b).
        b = bh
        out = (yp - ym) / b + np.log1p(ym / b) - np.log1p(yp / b)
        return out if out.ndim else float(out)
    b_max, b_min = max(bh, bn), min(bh, bn)
    r = b_min / b_max
    d = 1.0 / b_min - 1.0 / b_max

    def log_bracket(x):
        return np.log(np.maximum((1.0 - r) - r * np.expm1(-x * d), _LOG_FLOOR))

    out = (yp - ym) / b_max + log_bracket(ym) - log_bracket(yp)
    return out if out.ndim else float(out)


def correction_term(y, p: DecoderParams):
    """Non-linear part of the optimum statistic once the clamp is split off.

    Defined as (b_max/2)*llr_sample(y) - clamp_stat(y, a), so the sum of
    clamp and correction over a coefficient group carries the same sign
    as the exact log-likelihood ratio sum.
    """
    b_max = max(p.host_scale, p.noise_scale())
    out = 0.5 * b_max * np.asarray(llr_sample(y, p)) - np.asarray(
        clamp_stat(y, p.strength_a)
    )
    return out if out.ndim else float(out)


def decode_optimum(y, p: DecoderParams) -> int:
    """ML decision: bit 1 iff the summed log-likelihood ratio is >= 0."""
    y = np.asarray(y, dtype=np.float64)
    if y.size == 0:
        raise ConfigError("cannot decode an empty observation vector")
    return int(np.sum(llr_sample(y, p)) >= 0.0)


def decode_suboptimum(y, a: float) -> int:
    """Clamp decision: bit 1 iff the summed clamped observations are >= 0."""
    y = np.asarray(y, dtype=np.float64)
    if y.size == 0:
        raise ConfigError("cannot decode an empty observation vector")
    return int(np.sum(clamp_stat(y, a)) >= 0.0)


def decode_optimum_batch(y: np.ndarray, p: DecoderParams) -> np.ndarray:
    """Row-wise optimum decisions for a (trials, N) observation matrix."""
    return (llr_sample(y, p).sum(axis=-1) >= 0.0).astype(np.uint8)


def decode_suboptimum_batch(y: np.ndarray, a: float) -> np.ndarray:
    """Row-wise sub-optimum decisions for a (trials, N) observation matrix."""
    return (clamp_stat(y, a).sum(axis=-1) >= 0.0).astype(np.uint8)
