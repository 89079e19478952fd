"""Probability machinery for the Laplacian host + Laplacian noise channel.

Everything here treats the Laplace parameter as a *scale* (pdf value
1/(2b) at the peak, variance 2b^2).  The noise-to-host scale ratio g
fixes the channel operating point; SNR in dB is -20*log10(g), so g < 1
means the host is stronger than the noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ConfigError

# Relative scale difference below which the two-Laplace sum density
# switches to its equal-scale limit branch (the generic closed form
# divides by b_n^2 - b_h^2).
EQUAL_SCALE_RTOL = 1e-9

# Uniform variates are kept inside the open interval (0, 1) so the
# inverse CDF never evaluates log at 0.
_U_FLOOR = 2.0 ** -53


@dataclass(frozen=True)
class LaplaceParams:
    """Location/scale pair of a Laplace marginal."""

    location: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.scale) and self.scale > 0.0):
            raise ConfigError(f"scale must be positive, got {self.scale}")
        if not np.isfinite(self.location):
            raise ConfigError(f"location must be finite, got {self.location}")

    def variance(self) -> float:
        return 2.0 * self.scale ** 2


@dataclass(frozen=True)
class GgdParams:
    """Generalized Gaussian family: mean, standard deviation and shape.

    Shape 1 is the Laplace distribution (with scale std_dev/sqrt(2)),
    shape 2 the normal distribution.
    """

    mean: float = 0.0
    std_dev: float = 1.0
    shape: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.std_dev) and self.std_dev > 0.0):
            raise ConfigError(f"std_dev must be positive, got {self.std_dev}")
        if not (np.isfinite(self.shape) and self.shape > 0.0):
            raise ConfigError(f"shape must be positive, got {self.shape}")

    def exponent_rate(self) -> float:
        """Rate applied inside the exponential, sqrt(Gamma(3/c)/Gamma(1/c))/sigma."""
        c = self.shape
        return math.exp(0.5 * (gammaln(3.0 / c) - gammaln(1.0 / c))) / self.std_dev

    def norm_const(self) -> float:
        """Peak density value: rate * c / (2 * Gamma(1/c))."""
        c = self.shape
        return self.exponent_rate() * c / 2.0 * math.exp(-gammaln(1.0 / c))


@dataclass(frozen=True)
class ChannelSpec:
    """Noise-to-host scale ratio g together with the host marginal."""

    g: float
    host: LaplaceParams = LaplaceParams()

    def __post_init__(self):
        if not (np.isfinite(self.g) and self.g > 0.0):
            raise ConfigError(f"g must be positive, got {self.g}")

    def noise_scale(self) -> float:
        return self.g * self.host.scale

    def snr_db(self) -> float:
        return -20.0 * math.log10(self.g)


def laplace_pdf(x, p: LaplaceParams):
    """Laplace density 1/(2b) * exp(-|x - m| / b)."""
    x = np.asarray(x, dtype=np.float64)
    out = np.exp(-np.abs(x - p.location) / p.scale) / (2.0 * p.scale)
    return out if out.ndim else float(out)


def laplace_log_pdf(x, p: LaplaceParams):
    x = np.asarray(x, dtype=np.float64)
    out = -np.abs(x - p.location) / p.scale - np.log(2.0 * p.scale)
    return out if out.ndim else float(out)


def _laplace_from_uniform(u: np.ndarray, location: float, scale: float) -> np.ndarray:
    """Inverse CDF transform m - b*sgn(u-1/2)*ln(1 - 2|u-1/2|) on u in (0,1)."""
    s = u - 0.5
    return location - scale * np.sign(s) * np.log1p(-2.0 * np.abs(s))


def laplace_sample(p: LaplaceParams, count: int, seed) -> np.ndarray:
    """Draw `count` i.i.d. Laplace variates, deterministic for a given seed.

    `seed` is anything `numpy.random.default_rng` accepts (int,
    SeedSequence, Generator).  Uses the inverse CDF of uniform variates
    clipped into the open unit interval.
    """
    if count < 0:
        raise ConfigError(f"count must be >= 0, got {count}")
    rng = np.random.default_rng(seed)
    u = np.maximum(rng.random(count), _U_FLOOR)
    return _laplace_from_uniform(u, p.location, p.scale)


def ggd_pdf(x, p: GgdParams):
    """Generalized Gaussian density A * exp(-|beta*(x - m)|^c)."""
    x = np.asarray(x, dtype=np.float64)
    beta = p.exponent_rate()
    out = p.norm_const() * np.exp(-np.abs(beta * (x - p.mean)) ** p.shape)
    return out if out.ndim else float(out)


def _scales_match(host_scale: float, noise_scale: float) -> bool:
    return abs(noise_scale - host_scale) < EQUAL_SCALE_RTOL * host_scale


def sum_pdf(y, host_scale: float, noise_scale: float):
    """Density of X + N for independent zero-location Laplace variables.

    For distinct scales this is
    [b_n*exp(-|y|/b_n) - b_h*exp(-|y|/b_h)] / (2*(b_n^2 - b_h^2));
    nearly equal scales take the analytic limit
    exp(-|y|/b) * (1 + |y|/b) / (4b).
    """
    _check_scales(host_scale, noise_scale)
    y = np.abs(np.asarray(y, dtype=np.float64))
    if _scales_match(host_scale, noise_scale):
        b = host_scale
        out = np.exp(-y / b) * (1.0 + y / b) / (4.0 * b)
    else:
        bh, bn = host_scale, noise_scale
        out = (bn * np.exp(-y / bn) - bh * np.exp(-y / bh)) / (2.0 * (bn ** 2 - bh ** 2))
    return out if out.ndim else float(out)


def sum_tail(t, host_scale: float, noise_scale: float):
    """P(X + N > t), continuous in the scales, with tail(-t) = 1 - tail(t)."""
    _check_scales(host_scale, noise_scale)
    t = np.asarray(t, dtype=np.float64)
    at = np.abs(t)
    if _scales_match(host_scale, noise_scale):
        b = host_scale
        upper = np.exp(-at / b) * (2.0 + at / b) / 4.0
    else:
        bh, bn = host_scale, noise_scale
        upper = (bn ** 2 * np.exp(-at / bn) - bh ** 2 * np.exp(-at / bh)) / (
            2.0 * (bn ** 2 - bh ** 2)
        )
    out = np.where(t >= 0.0, upper, 1.0 - upper)
    return out if out.ndim else float(out)


def sum_cdf(y, host_scale: float, noise_scale: float):
    """P(X + N <= y)."""
    out = 1.0 - np.asarray(sum_tail(y, host_scale, noise_scale))
    return out if out.ndim else float(out)


def _check_scales(host_scale: float, noise_scale: float) -> None:
    if host_scale <= 0.0 or noise_scale <= 0.0:
        raise ConfigError(
            f"scales must be positive, got host={host_scale}, noise={noise_scale}"
        )


def estimate_laplace(samples) -> LaplaceParams:
    """ML fit of a Laplace marginal: median location, mean absolute deviation scale.

    Raises on degenerate input (fewer than two samples, or all samples
    identical, which would give zero scale).
    """
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size < 2:
        raise ConfigError(f"need at least 2 samples, got {x.size}")
    location = float(np.median(x))
    scale = float(np.mean(np.abs(x - location)))
    if scale == 0.0:
        raise ConfigError("degenerate sample: all values identical")
    return LaplaceParams(location=location, scale=scale)


def snr_db(spec: ChannelSpec) -> float:
    """SNR of a channel spec in dB, -20*log10(g)."""
    return spec.snr_db()


def g_from_snr_db(snr: float) -> float:
    """Inverse of snr_db: the noise-to-host scale ratio for a given SNR."""
    if not np.isfinite(snr):
        raise ConfigError(f"snr must be finite, got {snr}")
    return 10.0 ** (-snr / 20.0)
