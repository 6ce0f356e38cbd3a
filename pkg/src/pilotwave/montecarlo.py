"""Monte-Carlo check of the trapping probability.

Each particle gets one Boltzmann-distributed energy and is tested against
every position bin's well depth.  Energies are measured in units of 1/beta, so
a particle is trapped in a bin iff ``E * beta <= beta * d``.

Particles are split into fixed-size blocks; block ``b`` draws from a Philox
stream keyed by the seed with ``b`` in the top counter word, so the counts do
not depend on how blocks are distributed over workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import (
    BeamThermo,
    ExperimentGeometry,
    GridSpec,
    ModelError,
    PatternCurve,
    radiation_curve,
)

BLOCK_SIZE = 1 << 16
Z_LIMIT = 4.0


@dataclass(frozen=True, eq=False)
class EnsembleConfig:
    well_depth_profile: PatternCurve
    thermo: BeamThermo = BeamThermo()
    n_particles: int = 1_000_000
    seed: int = 42

    def __post_init__(self):
        if self.n_particles < 1:
            raise ModelError("n_particles must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ModelError("seed must be a 64-bit unsigned integer")
        if self.well_depth_profile.normalization != "peak-unity":
            raise ModelError("well depth profile must be a peak-unity curve")
        if self.n_position_bins < 11:
            raise ModelError("need at least 11 position bins")

    @property
    def n_position_bins(self) -> int:
        return len(self.well_depth_profile)

    def beta_depths(self) -> np.ndarray:
        return self.thermo.beta_E0 * self.well_depth_profile.values


def radiation_depth_profile(
    geom: ExperimentGeometry,
    k_pilot: float,
    n_bins: int = 201,
    theta_range: float = 3 * math.pi,
) -> PatternCurve:
    y = GridSpec(n_bins, theta_range).positions(geom, k_pilot)
    return radiation_curve(geom, k_pilot, y).peak_normalized()


def _block_counts(seed: int, block: int, size: int, beta_depths: np.ndarray) -> np.ndarray:
    bitgen = np.random.Philox(key=seed, counter=[0, 0, 0, block])
    energies = np.random.Generator(bitgen).standard_exponential(size)
    energies.sort()
    return np.searchsorted(energies, beta_depths, side="right").astype(np.int64)


def count_trapped(
    beta_depths,
    n_particles: int,
    seed: int,
    workers: int = 1,
    block_size: int = BLOCK_SIZE,
) -> np.ndarray:
    """Number of particles with beta*E <= beta*d for each bin's depth."""
    bd = np.asarray(beta_depths, dtype=float)
    if np.any(bd < 0) or np.any(np.isnan(bd)):
        raise ModelError("well depths must be >= 0")
    n_blocks = -(-n_particles // block_size)
    sizes = [min(block_size, n_particles - b * block_size) for b in range(n_blocks)]

    def run(b):
        return _block_counts(seed, b, sizes[b], bd)

    if workers <= 1:
        parts = [run(b) for b in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(n_blocks)))
    # integer sums are order independent
    return np.sum(parts, axis=0, dtype=np.int64) if parts else np.zeros(len(bd), np.int64)


@dataclass(frozen=True, eq=False)
class TrappingHistogram:
    bin_center_y: np.ndarray
    bin_center_theta: np.ndarray
    trapped_count: np.ndarray
    normalized_value: np.ndarray
    n_particles: int


def sample_trapping(config: EnsembleConfig, workers: int = 1) -> TrappingHistogram:
    bd = config.beta_depths()
    if not np.any(bd > 0):
        raise ModelError("no trapping possible")
    counts = count_trapped(bd, config.n_particles, config.seed, workers)
    peak = counts.max()
    normalized = counts / peak if peak > 0 else np.zeros(len(counts))
    prof = config.well_depth_profile
    return TrappingHistogram(prof.positions_y, prof.thetas, counts, normalized, config.n_particles)


@dataclass(frozen=True, eq=False)
class OracleReport:
    max_z_score: float
    per_bin_z: np.ndarray
    passed: bool
    histogram: TrappingHistogram
    expected_value: np.ndarray
    expected_beta_E0: float

    def to_json(self) -> dict:
        return {
            "max_z_score": self.max_z_score,
            "pass": self.passed,
            "z_limit": Z_LIMIT,
            "n_particles": self.histogram.n_particles,
            "n_position_bins": len(self.per_bin_z),
            "expected_beta_E0": self.expected_beta_E0,
        }


def binomial_z_scores(counts, n: int, p) -> np.ndarray:
    counts = np.asarray(counts, dtype=float)
    p = np.asarray(p, dtype=float)
    mean = n * p
    sigma = np.sqrt(n * p * (1.0 - p))
    diff = counts - mean
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(sigma > 0, diff / np.where(sigma > 0, sigma, 1.0), 0.0)
    # zero variance: any deviation is infinitely unlikely
    z = np.where((sigma == 0) & (diff != 0), np.copysign(np.inf, diff), z)
    return z


def oracle_report(
    config: EnsembleConfig,
    expect_beta_E0: float | None = None,
    workers: int = 1,
) -> OracleReport:
    """Compare simulated trapped fractions with 1 - exp(-beta_E0 * I) per bin."""
    hist = sample_trapping(config, workers)
    b = config.thermo.beta_E0 if expect_beta_E0 is None else expect_beta_E0
    p = -np.expm1(-b * config.well_depth_profile.values)
    z = binomial_z_scores(hist.trapped_count, config.n_particles, p)
    max_z = float(np.max(np.abs(z)))
    expected = p / p.max() if p.max() > 0 else p
    return OracleReport(max_z, z, max_z < Z_LIMIT, hist, expected, b)
