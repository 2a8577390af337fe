"""BPSK spreading through a ternary codebook plus reproducible AWGN.

Noise is generated in fixed-size trial blocks, each block keyed by
(rng_seed, stream, block index) through a SeedSequence spawn key.  Any
partitioning of trials across workers therefore sees identical samples, and
a longer run reproduces the prefix of a shorter one.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codebook import TernaryCodebook

NOISE_BLOCK = 4096


@dataclass(frozen=True)
class ChannelConfig:
    """Amplitude, per-chip noise deviation and the master seed."""

    amplitude: float = 1.0
    noise_sigma: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if not self.amplitude > 0:
            raise ValueError("amplitude must be positive")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")


def _check_word(c: TernaryCodebook, x) -> np.ndarray:
    w = np.asarray(x)
    if w.shape != (c.cols,):
        raise ValueError(f"word length {w.shape} does not match {c.cols} users")
    if not np.isin(w, (-1, 1)).all():
        raise ValueError("word entries must be -1 or +1")
    return w.astype(np.int64)


def spread(c: TernaryCodebook, x, amplitude: float = 1.0) -> np.ndarray:
    """Noiseless chip vector A * C @ x for one antipodal word."""
    w = _check_word(c, x)
    return amplitude * (c.entries.astype(np.int64) @ w).astype(np.float64)


def spread_many(c: TernaryCodebook, words: np.ndarray, amplitude: float = 1.0) -> np.ndarray:
    """Row-wise spreading of a (trials, K) matrix of antipodal words."""
    chips = words.astype(np.int64) @ c.entries.T.astype(np.int64)
    return amplitude * chips.astype(np.float64)


def _rng(seed: int, stream: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(stream, block))
    return np.random.default_rng(ss)


def noise_block(cfg: ChannelConfig, stream: int, block: int, nchips: int) -> np.ndarray:
    """The (NOISE_BLOCK, nchips) Gaussian block for one (stream, block) pair."""
    g = _rng(cfg.rng_seed, stream, block)
    return cfg.noise_sigma * g.standard_normal((NOISE_BLOCK, nchips))


def add_awgn(y, cfg: ChannelConfig, stream: int = 0, trial: int = 0) -> np.ndarray:
    """Add zero-mean Gaussian noise of deviation noise_sigma to each chip.

    Deterministic in (rng_seed, stream, trial): the sample is row
    trial % NOISE_BLOCK of the block trial // NOISE_BLOCK.
    """
    chips = np.asarray(y, dtype=np.float64)
    if cfg.noise_sigma == 0.0:
        return chips.copy()
    block = noise_block(cfg, stream, trial // NOISE_BLOCK, chips.shape[0])
    return chips + block[trial % NOISE_BLOCK]


def random_words(seed: int, stream: int, block: int, trials: int, users: int) -> np.ndarray:
    """A (trials, users) block of uniform antipodal words, same keying as noise."""
    g = _rng(seed, stream, block)
    return (2 * g.integers(0, 2, size=(trials, users)) - 1).astype(np.int8)


def mean_signature_energy(c: TernaryCodebook) -> float:
    """Average squared column norm; for ternary entries, nonzeros per user."""
    return float(np.count_nonzero(c.entries)) / c.cols


def ebn0_to_sigma(ebn0_db: float, c: TernaryCodebook, amplitude: float = 1.0) -> float:
    """Per-chip noise deviation for a target per-user Eb/N0 in dB.

    Convention: Eb = A^2 * mean signature energy, N0 = 2 sigma^2, so
    sigma = sqrt(A^2 * w / (2 * 10^(dB/10))) with w the mean squared column
    norm.  Signature energies are unequal across users; w averages them.
    """
    w = mean_signature_energy(c)
    return float(np.sqrt(amplitude**2 * w / (2.0 * 10.0 ** (ebn0_db / 10.0))))
