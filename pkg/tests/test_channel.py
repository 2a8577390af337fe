import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from udcdma.channel import (
    NOISE_BLOCK,
    ChannelConfig,
    add_awgn,
    ebn0_to_sigma,
    mean_signature_energy,
    noise_block,
    random_words,
    spread,
    spread_many,
)
from udcdma.codebook import build_codebook

C2 = build_codebook(2)
C3 = build_codebook(3)


def test_spread_all_ones():
    y = spread(C2, np.ones(8, dtype=int))
    assert y.tolist() == [8.0, 1.0, 1.0, 0.0]


def test_spread_negation_and_scaling():
    y = spread(C2, -np.ones(8, dtype=int))
    assert y.tolist() == [-8.0, -1.0, -1.0, 0.0]
    y2 = spread(C2, np.ones(8, dtype=int), amplitude=2.0)
    assert y2.tolist() == [16.0, 2.0, 2.0, 0.0]


def test_spread_matches_manual_product():
    rng = np.random.default_rng(5)
    for _ in range(20):
        x = 2 * rng.integers(0, 2, 17) - 1
        manual = [sum(int(C3.entries[r, j]) * int(x[j]) for j in range(17)) for r in range(8)]
        assert spread(C3, x).tolist() == manual


def test_spread_rejects_bad_words():
    with pytest.raises(ValueError):
        spread(C2, np.ones(7, dtype=int))
    with pytest.raises(ValueError):
        spread(C2, np.zeros(8, dtype=int))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**8 - 1), st.floats(0.25, 4.0, allow_nan=False))
def test_spread_linitivity(bits, amp):
    x = np.array([1 if bits >> j & 1 else -1 for j in range(8)])
    base = spread(C2, x)
    assert np.allclose(spread(C2, x, amp), amp * base)
    assert np.allclose(spread(C2, -x), -base)


def test_spread_injective_on_level2():
    words = np.array([[1 if i >> j & 1 else -1 for j in range(8)] for i in range(256)])
    chips = spread_many(C2, words)
    assert len({tuple(row) for row in chips.tolist()}) == 256


def test_awgn_zero_sigma_identity():
    cfg = ChannelConfig(noise_sigma=0.0, rng_seed=3)
    y = np.array([1.0, -2.0, 3.0, 0.0])
    out = add_awgn(y, cfg, stream=0, trial=5)
    assert out.tolist() == y.tolist()
    assert out is not y


def test_awgn_deterministic_per_trial():
    cfg = ChannelConfig(noise_sigma=1.0, rng_seed=42)
    y = np.zeros(4)
    a = add_awgn(y, cfg, stream=1, trial=9)
    b = add_awgn(y, cfg, stream=1, trial=9)
    assert a.tolist() == b.tolist()
    c = add_awgn(y, cfg, stream=1, trial=10)
    assert a.tolist() != c.tolist()
    d = add_awgn(y, cfg, stream=2, trial=9)
    assert a.tolist() != d.tolist()


def test_awgn_moments():
    # law-of-large-numbers bounds at roughly 3 sigma of the estimators
    cfg = ChannelConfig(noise_sigma=1.0, rng_seed=7)
    samples = np.concatenate(
        [noise_block(cfg, stream=0, block=b, nchips=8).ravel() for b in range(31)]
    )[:1_000_000]
    assert abs(samples.mean()) < 0.005
    assert abs(samples.var() - 1.0) < 0.01


def test_block_prefix_property():
    cfg = ChannelConfig(noise_sigma=0.7, rng_seed=11)
    rows = [add_awgn(np.zeros(4), cfg, stream=0, trial=t) for t in range(3)]
    block = noise_block(cfg, stream=0, block=0, nchips=4)
    for t in range(3):
        assert rows[t].tolist() == block[t].tolist()


def test_random_words_shape_and_determinism():
    a = random_words(1, 0, 0, NOISE_BLOCK, 8)
    b = random_words(1, 0, 0, NOISE_BLOCK, 8)
    assert (a == b).all()
    assert np.isin(a, (-1, 1)).all()


def test_mean_signature_energy_level2():
    assert mean_signature_energy(C2) == 3.0


def test_ebn0_frozen_value():
    # Eb = A^2 * 3 for the 4x8 codebook, N0 = 2 sigma^2: at 0 dB sigma = sqrt(1.5)
    assert math.isclose(ebn0_to_sigma(0.0, C2), math.sqrt(1.5), rel_tol=1e-12)


def test_ebn0_monotone_and_limit():
    sigmas = [ebn0_to_sigma(db, C2) for db in np.arange(-5, 30, 0.5)]
    assert all(a > b for a, b in zip(sigmas, sigmas[1:]))
    assert ebn0_to_sigma(200.0, C2) < 1e-9


def test_channel_config_validation():
    with pytest.raises(ValueError):
        ChannelConfig(amplitude=0.0)
    with pytest.raises(ValueError):
        ChannelConfig(noise_sigma=-1.0)
