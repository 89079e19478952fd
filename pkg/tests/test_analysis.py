"""Mixed discrete/continuous law of the clamp statistic and its N-fold sum."""

import math

import numpy as np
import pytest

from lapmark.analysis import (
    ErrorReport,
    MixedPdf,
    convolve_n,
    error_report,
    perr_approx,
    perr_exact,
    prob_P,
    z_pdf_h0,
)
from lapmark.errors import ConfigError, ResourceLimitError
from lapmark.model import g_from_snr_db, sum_tail


def test_prob_P_is_tail_at_2a():
    # frozen quadrature oracles
    assert prob_P(1.0, 1.0, 0.5) == pytest.approx(0.08717091567628608, abs=1e-12)
    assert prob_P(1.0, 1.0, 1.0) == pytest.approx(math.exp(-2.0), abs=1e-13)
    rng = np.random.default_rng(13)
    for _ in range(30):
        a = rng.uniform(0.1, 3.0)
        lam = rng.uniform(0.3, 2.0)
        g = rng.uniform(0.2, 5.0)
        assert prob_P(a, lam, g) == pytest.approx(
            sum_tail(2 * a, lam, g * lam), abs=1e-14
        )
        assert 0.0 < prob_P(a, lam, g) < 0.5


def test_z_pdf_h0_structure():
    pdf = z_pdf_h0(1.0, 1.0, 0.5, step_exponent=8)
    atoms = dict(pdf.atoms)
    assert atoms[-1.0] == pytest.approx(0.5, abs=1e-15)
    assert atoms[1.0] == pytest.approx(prob_P(1.0, 1.0, 0.5), abs=1e-14)
    assert pdf.total_mass() == pytest.approx(1.0, abs=1e-6)
    assert pdf.support_bound == pytest.approx(1.0)


def test_z_pdf_total_mass_converges_quadratically():
    errs = [abs(z_pdf_h0(1.0, 1.0, 1.0, k).total_mass() - 1.0) for k in (6, 8, 10)]
    assert errs[1] < errs[0] / 8
    assert errs[2] < errs[1] / 8


def test_convolve_preserves_mass_and_support():
    base = z_pdf_h0(1.0, 1.0, 0.8, step_exponent=6)
    for n in (1, 2, 3, 5, 8, 16):
        s = convolve_n(base, n)
        assert s.total_mass() == pytest.approx(1.0, abs=5e-4 * n)
        assert s.support_bound == pytest.approx(n * 1.0)


def test_convolve_one_is_identity():
    base = z_pdf_h0(1.0, 1.0, 0.5, step_exponent=6)
    s = convolve_n(base, 1)
    assert s.atoms == base.atoms
    np.testing.assert_array_equal(s.dens, base.dens)


def test_pair_convolution_atom_bookkeeping():
    # tie mass for n=2: (-a then +a) or (+a then -a), so 2 * 0.5 * P
    a, lam, g = 1.0, 1.0, 1.0
    P = prob_P(a, lam, g)
    s = convolve_n(z_pdf_h0(a, lam, g), 2)
    assert s.atom_mass_at(0.0) == pytest.approx(P, rel=1e-12)
    assert s.atom_mass_at(-2.0) == pytest.approx(0.25, rel=1e-12)
    assert s.atom_mass_at(2.0) == pytest.approx(P * P, rel=1e-12)


def test_perr_exact_n1_equals_closed_form():
    # single sample: error iff x + n >= a, probability sum_tail(a)
    for g in (0.4, 1.0, 2.5):
        ref = sum_tail(1.0, 1.0, g * 1.0)
        assert perr_exact(1.0, 1.0, g, 1, step_exponent=12) == pytest.approx(
            ref, abs=1e-8
        )


def test_perr_exact_even_n_splits_tie_mass():
    rep = error_report(1.0, 1.0, 1.0, 2)
    assert rep.p_tie == pytest.approx(prob_P(1.0, 1.0, 1.0), rel=1e-12)
    # resolve-as-1 errs only for bit 0, so the equiprobable-bit rate
    # carries half the tie mass
    total = convolve_n(z_pdf_h0(1.0, 1.0, 1.0), 2)
    assert rep.p_exact == pytest.approx(
        total.prob_geq_zero() - rep.p_tie / 2, rel=1e-12
    )
    assert rep.p_exact > rep.p_tie


def test_perr_exact_monotone_in_n():
    vals = [perr_exact(1.0, 1.0, 1.0, n) for n in (1, 2, 4, 8, 16, 32)]
    # the even-n tie mass can locally flatten the curve but the trend
    # over doublings must be decreasing
    assert all(b < a for a, b in zip(vals[1:], vals[2:]))
    assert vals[-1] < vals[0]


def test_perr_exact_step_exponent_consistency():
    coarse = perr_exact(1.0, 1.0, 0.7, 10, step_exponent=7)
    fine = perr_exact(1.0, 1.0, 0.7, 10, step_exponent=11)
    assert coarse == pytest.approx(fine, rel=1e-3)


def test_perr_approx_reference_value():
    # (1/(1+2P))^N sum C(N,i) P^(N-i): at P=1/4, N=2 this is 4/9
    assert perr_approx(0.25, 2) == pytest.approx(4.0 / 9.0, rel=1e-15)


def test_perr_approx_log_space_matches_direct():
    # the N>30 log-space path must agree with exact integer arithmetic
    P = 0.2
    for n in (31, 40, 64):
        direct = (1.0 / (1.0 + 2.0 * P)) ** n * sum(
            math.comb(n, i) * P ** (n - i) for i in range(n // 2 + 1, n + 1)
        )
        assert perr_approx(P, n) == pytest.approx(direct, rel=1e-12)


def test_perr_approx_validation():
    with pytest.raises(ConfigError):
        perr_approx(0.0, 8)
    with pytest.raises(ConfigError):
        perr_approx(0.5, 8)
    with pytest.raises(ConfigError):
        perr_approx(0.2, 0)


def test_error_report_fields():
    rep = error_report(1.0, 1.0, g_from_snr_db(5.0), 8)
    assert isinstance(rep, ErrorReport)
    assert rep.snr_db == pytest.approx(5.0)
    assert rep.n == 8
    assert 0.0 <= rep.p_exact <= 1.0
    assert rep.p_tie == 0.0 or rep.n % 2 == 0


def test_z_pdf_rejects_bad_resolution():
    with pytest.raises(ConfigError):
        z_pdf_h0(1.0, 1.0, 1.0, step_exponent=3)


def test_resource_limit_trips():
    with pytest.raises(ResourceLimitError):
        perr_exact(1.0, 1.0, 1.0, 3000, step_exponent=14)


def test_mixed_pdf_prob_geq_zero_simple():
    # hand-built law: atom 0.3 at -1, 0.2 at 0, 0.1 at +1, flat density
    # 0.4 on (-1, 1) -> P(Z >= 0) = 0.2 + 0.1 + 0.2
    h = 1.0 / 16
    nodes = np.full(33, 0.2)  # density 0.2 over (-1, 1)
    nodes[0] /= 2
    nodes[-1] /= 2
    pdf = MixedPdf(step=h, atom_idx=np.array([-16, 0, 16]),
                   atom_mass=np.array([0.3, 0.2, 0.1]),
                   dens_lo=-16, dens=nodes)
    assert pdf.total_mass() == pytest.approx(1.0, abs=1e-12)
    assert pdf.prob_geq_zero() == pytest.approx(0.5, abs=1e-12)
