"""Theoretical error probability of the clamp (sub-optimum) decoder.

Under the all-zeros hypothesis a clamped observation z = l(x+n-a, a)
has a mixed law: a point mass 0.5 at -a, a point mass P at +a, and the
host+noise density shifted onto (-a, a).  The decision statistic is a
sum of N such terms, so its law is the N-fold self-convolution of the
mixed law.  Atoms are kept exact on an integer lattice with step
h = a/2^k, which makes every atom position land on a grid node after
any number of convolutions; the continuous part lives on the same
lattice with trapezoid end-weighting folded into the stored node
values, so discrete convolution conserves total mass exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import gammaln, logsumexp

from .errors import ConfigError, ResourceLimitError
from .model import sum_pdf, sum_tail

# Hard cap on the density grid of a convolution result (~270 MB of
# float64); n-fold support needs n*2^(k+1)+1 nodes.
MAX_GRID_POINTS = 1 << 25

# Above this work estimate the density convolution switches from direct
# to FFT evaluation.
_FFT_THRESHOLD = 1 << 22


@dataclass(frozen=True)
class MixedPdf:
    """Point masses plus a gridded density sharing one lattice of step h.

    Atom positions are stored as integer lattice indices (position =
    index * step).  Density values sit on lattice nodes with the two
    support endpoints stored at half weight, so the continuous mass is
    exactly step * dens.sum().
    """

    step: float
    atom_idx: np.ndarray
    atom_mass: np.ndarray
    dens_lo: int
    dens: np.ndarray

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return [(i * self.step, m) for i, m in zip(self.atom_idx, self.atom_mass)]

    @property
    def density_origin(self) -> float:
        return self.dens_lo * self.step

    @property
    def support_bound(self) -> float:
        ends = [abs(self.density_origin), abs((self.dens_lo + len(self.dens) - 1) * self.step)]
        if len(self.atom_idx):
            ends.append(np.max(np.abs(self.atom_idx)) * self.step)
        return float(max(ends))

    def total_mass(self) -> float:
        return float(self.atom_mass.sum() + self.step * self.dens.sum())

    def mean(self) -> float:
        z = (self.dens_lo + np.arange(len(self.dens))) * self.step
        return float(
            np.dot(self.atom_idx * self.step, self.atom_mass)
            + self.step * np.dot(z, self.dens)
        )

    def atom_mass_at(self, position: float) -> float:
        idx = int(round(position / self.step))
        hit = np.nonzero(self.atom_idx == idx)[0]
        return float(self.atom_mass[hit[0]]) if hit.size else 0.0

    def prob_geq_zero(self) -> float:
        """P(Z > 0) + P(Z = 0): atoms on the non-negative side plus the
        trapezoid integral of the density over [0, support end]."""
        p = float(self.atom_mass[self.atom_idx >= 0].sum())
        i0 = -self.dens_lo  # array position of the z=0 node
        if i0 < 0:
            p += self.step * float(self.dens.sum())
        elif i0 < len(self.dens):
            p += self.step * (0.5 * float(self.dens[i0]) + float(self.dens[i0 + 1:].sum()))
        return p


def prob_P(a: float, host_scale: float, g: float) -> float:
    """Probability that a clamped observation saturates at +a under H0.

    Equals P(x + n > 2a) for host scale lambda1 and noise scale
    g*lambda1; always in (0, 0.5).
    """
    if a <= 0.0:
        raise ConfigError(f"strength a must be positive, got {a}")
    return float(sum_tail(2.0 * a, host_scale, g * host_scale))


def z_pdf_h0(a: float, host_scale: float, g: float, step_exponent: int = 8) -> MixedPdf:
    """Mixed law of one clamped observation under the all-zeros hypothesis."""
    if a <= 0.0:
        raise ConfigError(f"strength a must be positive, got {a}")
    if not isinstance(step_exponent, (int, np.integer)) or step_exponent < 4:
        raise ConfigError(f"step_exponent must be an integer >= 4, got {step_exponent}")
    m = 1 << step_exponent          # a == m * h
    h = a / m
    z = np.arange(-m, m + 1, dtype=np.float64) * h
    dens = np.asarray(sum_pdf(z + a, host_scale, g * host_scale), dtype=np.float64)
    dens[0] *= 0.5
    dens[-1] *= 0.5
    return MixedPdf(
        step=h,
        atom_idx=np.array([-m, m], dtype=np.int64),
        atom_mass=np.array([0.5, prob_P(a, host_scale, g)], dtype=np.float64),
        dens_lo=-m,
        dens=dens,
    )


def _conv_dens(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if x.size * y.size > _FFT_THRESHOLD:
        out = fftconvolve(x, y)
        return np.maximum(out, 0.0)  # FFT ripple can dip microscopically negative
    return np.convolve(x, y)


def _convolve_pair(x: MixedPdf, y: MixedPdf) -> MixedPdf:
    if x.step != y.step:
        raise ConfigError("cannot convolve mixed pdfs with different grid steps")
    h = x.step

    masses: dict[int, float] = {}
    for ia, ma in zip(x.atom_idx, x.atom_mass):
        for ib, mb in zip(y.atom_idx, y.atom_mass):
            key = int(ia + ib)
            masses[key] = masses.get(key, 0.0) + float(ma * mb)

    spans = [(x.dens_lo + y.dens_lo, len(x.dens) + len(y.dens) - 1)]
    spans += [(int(ia) + y.dens_lo, len(y.dens)) for ia in x.atom_idx]
    spans += [(int(ib) + x.dens_lo, len(x.dens)) for ib in y.atom_idx]
    lo = min(s for s, _ in spans)
    hi = max(s + length for s, length in spans)
    if hi - lo > MAX_GRID_POINTS:
        raise ResourceLimitError(
            f"convolution grid would need {hi - lo} nodes "
            f"(cap {MAX_GRID_POINTS}); lower step_exponent"
        )

    dens = np.zeros(hi - lo, dtype=np.float64)
    dd = _conv_dens(x.dens, y.dens) * h
    start = x.dens_lo + y.dens_lo - lo
    dens[start:start + len(dd)] += dd
    for ia, ma in zip(x.atom_idx, x.atom_mass):
        start = int(ia) + y.dens_lo - lo
        dens[start:start + len(y.dens)] += ma * y.dens
    for ib, mb in zip(y.atom_idx, y.atom_mass):
        start = int(ib) + x.dens_lo - lo
        dens[start:start + len(x.dens)] += mb * x.dens

    idx = np.array(sorted(masses), dtype=np.int64)
    return MixedPdf(
        step=h,
        atom_idx=idx,
        atom_mass=np.array([masses[i] for i in idx], dtype=np.float64),
        dens_lo=lo,
        dens=dens,
    )


def convolve_n(base: MixedPdf, n: int) -> MixedPdf:
    """Exact n-fold self-convolution by binary exponentiation."""
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    # every intermediate grid is bounded by the final one, so reject
    # oversize requests before doing any work
    base_span = max(
        len(base.dens) + base.dens_lo,
        int(base.atom_idx.max()) + 1 if base.atom_idx.size else 0,
    ) - min(base.dens_lo, int(base.atom_idx.min()) if base.atom_idx.size else 0)
    if n * base_span > MAX_GRID_POINTS:
        raise ResourceLimitError(
            f"{n}-fold convolution grid would need about {n * base_span} "
            f"nodes (cap {MAX_GRID_POINTS}); lower step_exponent"
        )
    if n == 1:
        return base
    acc = None
    power = base
    remaining = n
    while remaining:
        if remaining & 1:
            acc = power if acc is None else _convolve_pair(acc, power)
        remaining >>= 1
        if remaining:
            power = _convolve_pair(power, power)
    return acc


def perr_exact(
    a: float, host_scale: float, g: float, n: int, step_exponent: int = 8
) -> float:
    """Error probability of the clamp decoder from the exact convolution.

    Returns P(Z > 0 | H0) + P(Z = 0 | H0) / 2.  For even n the decision
    statistic carries a genuine atom at zero (every observation stuck on
    a saturation atom, with +a and -a in equal numbers).  The decoders
    resolve Z = 0 as bit 1, which errs only when bit 0 was sent, so with
    equiprobable bits half the tie mass contributes to the error rate.
    """
    total = convolve_n(z_pdf_h0(a, host_scale, g, step_exponent), n)
    value = total.prob_geq_zero() - 0.5 * total.atom_mass_at(0.0)
    return float(min(max(value, 0.0), 1.0))


def perr_approx(p_atom: float, n: int) -> float:
    """Closed-form error approximation (1/(1+2P))^N * sum C(N,i) P^(N-i).

    The sum runs over i = floor(N/2)+1 .. N.  Evaluated in log space
    for N > 30 so the binomial coefficients cannot overflow.
    """
    if not 0.0 < p_atom < 0.5:
        raise ConfigError(f"p_atom must lie in (0, 0.5), got {p_atom}")
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    lo = n // 2 + 1
    if n <= 30:
        total = sum(math.comb(n, i) * p_atom ** (n - i) for i in range(lo, n + 1))
        value = (1.0 / (1.0 + 2.0 * p_atom)) ** n * total
    else:
        i = np.arange(lo, n + 1, dtype=np.float64)
        log_terms = (
            gammaln(n + 1.0)
            - gammaln(i + 1.0)
            - gammaln(n - i + 1.0)
            + (n - i) * math.log(p_atom)
        )
        value = math.exp(logsumexp(log_terms) - n * math.log1p(2.0 * p_atom))
    return float(min(max(value, 0.0), 1.0))


@dataclass(frozen=True)
class ErrorReport:
    """Exact and approximate error probabilities at one operating point.

    p_tie is the full Z=0 atom mass (zero for odd n); p_exact includes
    half of it, matching the fixed resolve-as-1 rule averaged over
    equiprobable bits.  The bit-0 conditional error is
    p_exact + p_tie / 2.
    """

    p_exact: float
    p_approx: float
    p_atom_P: float
    p_tie: float
    n: int
    snr_db: float
    a: float


def error_report(
    a: float, host_scale: float, g: float, n: int, step_exponent: int = 8
) -> ErrorReport:
    """Evaluate exact convolution and closed-form approximation together."""
    p_atom = prob_P(a, host_scale, g)
    total = convolve_n(z_pdf_h0(a, host_scale, g, step_exponent), n)
    tie = total.atom_mass_at(0.0)
    return ErrorReport(
        p_exact=float(min(max(total.prob_geq_zero() - 0.5 * tie, 0.0), 1.0)),
        p_approx=perr_approx(p_atom, n),
        p_atom_P=p_atom,
        p_tie=tie,
        n=n,
        snr_db=-20.0 * math.log10(g),
        a=a,
    )
