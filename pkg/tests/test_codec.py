"""Per-sample codec: embedding shift, decision statistics, index selection."""

import numpy as np
import pytest

from lapmark.codec import (
    DecoderParams,
    EmbedConfig,
    clamp_stat,
    correction_term,
    decode_optimum,
    decode_optimum_batch,
    decode_suboptimum,
    decode_suboptimum_batch,
    embed_bit,
    llr_sample,
    select_indices,
)
from lapmark.errors import CapacityError, ConfigError
from lapmark.model import sum_pdf


def test_embed_bit_shifts():
    y = np.array([0.0, -1.5, 3.0])
    assert embed_bit(y, 1, 2.0) == pytest.approx([2.0, 0.5, 5.0])
    assert embed_bit(y, 0, 2.0) == pytest.approx([-2.0, -3.5, 1.0])
    # complementary shifts cancel
    assert embed_bit(embed_bit(y, 1, 2.0), 0, 2.0) == pytest.approx(y)


def test_clamp_identity_property():
    # l(y, a) == (|y+a| - |y-a|) / 2 for every y, bit for bit
    rng = np.random.default_rng(3)
    y = rng.standard_t(3, size=20_000) * 5
    a = 1.3
    ref = (np.abs(y + a) - np.abs(y - a)) / 2.0
    assert np.array_equal(clamp_stat(y, a), ref)


def test_clamp_agrees_with_clip():
    # same function as np.clip up to a few ulps of (|y| + a)
    rng = np.random.default_rng(4)
    y = rng.normal(0, 4, 50_000)
    a = 0.9
    np.testing.assert_allclose(
        clamp_stat(y, a), np.clip(y, -a, a),
        rtol=0.0, atol=4 * np.finfo(np.float64).eps * (np.abs(y).max() + a),
    )


def test_clamp_regions():
    assert clamp_stat(5.0, 1.0) == 1.0
    assert clamp_stat(-5.0, 1.0) == -1.0
    assert clamp_stat(0.25, 1.0) == 0.25


def test_llr_matches_density_ratio():
    # direct evaluation of ln f(y-a) - ln f(y+a) at moderate arguments
    p = DecoderParams(host_scale=1.0, g=0.5, strength_a=1.0)
    rng = np.random.default_rng(17)
    for y in rng.uniform(-8, 8, 50):
        ref = np.log(sum_pdf(y - 1.0, 1.0, 0.5)) - np.log(sum_pdf(y + 1.0, 1.0, 0.5))
        assert llr_sample(y, p) == pytest.approx(ref, rel=1e-9, abs=1e-12)
    # frozen high-precision reference at y=3
    assert llr_sample(3.0, p) == pytest.approx(1.9391340898927649532, rel=1e-13)


def test_llr_equal_scale_branch():
    p = DecoderParams(host_scale=1.0, g=1.0, strength_a=0.7)
    for y in (-4.0, -0.2, 0.0, 1.1, 6.0):
        ref = np.log(sum_pdf(y - 0.7, 1.0, 1.0)) - np.log(sum_pdf(y + 0.7, 1.0, 1.0))
        assert llr_sample(y, p) == pytest.approx(ref, rel=1e-9, abs=1e-12)


def test_llr_stable_in_far_tails():
    # naive log-of-ratio overflows out here; the statistic must stay
    # finite, odd, and saturate at 2a/b_max per sample
    p = DecoderParams(host_scale=1.0, g=0.5, strength_a=1.0)
    y = np.array([50.0, 500.0, 5e4, 5e8])
    v = llr_sample(y, p)
    assert np.all(np.isfinite(v))
    assert v == pytest.approx(np.full(4, 2.0), rel=1e-6)  # 2a/b_max = 2
    assert llr_sample(-y, p) == pytest.approx(-v, rel=1e-12)


def test_llr_odd_symmetry():
    rng = np.random.default_rng(29)
    p = DecoderParams(host_scale=1.3, g=2.1, strength_a=0.9)
    y = rng.normal(0, 10, 1000)
    assert llr_sample(-y, p) == pytest.approx(-llr_sample(y, p), rel=1e-12)


def test_correction_term_splits_statistic():
    # (b_max/2) * llr == clamp + correction, the decomposition the
    # sub-optimum decoder truncates
    rng = np.random.default_rng(31)
    p = DecoderParams(host_scale=1.0, g=0.5, strength_a=1.0)
    y = rng.uniform(-6, 6, 500)
    lhs = 0.5 * max(p.host_scale, p.noise_scale()) * llr_sample(y, p)
    rhs = clamp_stat(y, p.strength_a) + correction_term(y, p)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)


def test_decoders_tie_resolves_to_one():
    p = DecoderParams(host_scale=1.0, g=1.0, strength_a=1.0)
    assert decode_optimum(np.zeros(4), p) == 1
    assert decode_suboptimum(np.zeros(4), 1.0) == 1


def test_decoders_on_clean_signal():
    p = DecoderParams(host_scale=1.0, g=1.0, strength_a=2.0)
    up = np.full(8, 2.0)
    assert decode_optimum(up, p) == 1
    assert decode_optimum(-up, p) == 0
    assert decode_suboptimum(up, 2.0) == 1
    assert decode_suboptimum(-up, 2.0) == 0


def test_decoders_reject_empty():
    p = DecoderParams(host_scale=1.0, g=1.0, strength_a=1.0)
    with pytest.raises(ConfigError):
        decode_optimum(np.array([]), p)
    with pytest.raises(ConfigError):
        decode_suboptimum(np.array([]), 1.0)


def test_batch_decoders_match_scalar():
    rng = np.random.default_rng(41)
    p = DecoderParams(host_scale=1.0, g=0.7, strength_a=1.0)
    y = rng.normal(0, 3, (64, 9))
    opt = decode_optimum_batch(y, p)
    sub = decode_suboptimum_batch(y, 1.0)
    for i in range(64):
        assert opt[i] == decode_optimum(y[i], p)
        assert sub[i] == decode_suboptimum(y[i], 1.0)


def test_select_indices_deterministic_and_distinct():
    idx = select_indices(b"key", 1000, 300)
    assert np.array_equal(idx, select_indices(b"key", 1000, 300))
    assert len(np.unique(idx)) == 300
    assert idx.min() >= 0 and idx.max() < 1000


def test_select_indices_key_sensitivity():
    a = select_indices(b"key-a", 5000, 500)
    b = select_indices(b"key-b", 5000, 500)
    assert not np.array_equal(a, b)
    # different pool sizes decorrelate too
    c = select_indices(b"key-a", 5001, 500)
    assert not np.array_equal(a, c)


def test_select_indices_full_pool_is_permutation():
    idx = select_indices(b"k", 257, 257)
    assert sorted(idx.tolist()) == list(range(257))


def test_select_indices_roughly_uniform():
    # every pool slot should be picked with about equal frequency
    # across independent keys
    hits = np.zeros(50, dtype=np.int64)
    for trial in range(2000):
        hits[select_indices(trial.to_bytes(4, "little"), 50, 10)] += 1
    freq = hits / hits.sum()
    assert np.all(np.abs(freq - 1 / 50) < 5 / 50 / np.sqrt(2000 * 10 / 50))


def test_select_indices_errors():
    with pytest.raises(CapacityError):
        select_indices(b"k", 10, 11)
    with pytest.raises(ConfigError):
        select_indices(b"k", 0, 1)
    with pytest.raises(ConfigError):
        select_indices(b"k", 10, 0)


def test_config_validation():
    with pytest.raises(ConfigError):
        EmbedConfig(strength_a=0.0, spread_n=8, key=b"k")
    with pytest.raises(ConfigError):
        EmbedConfig(strength_a=1.0, spread_n=0, key=b"k")
    with pytest.raises(ConfigError):
        DecoderParams(host_scale=1.0, g=-1.0, strength_a=1.0)
