# SPDX-License-Identifier: BUSL-1.1
"""Seeded Monte Carlo on CP^{D-1}: uniform and canonical samplers and estimators.

Every sampler splits its work across ``n_streams`` independent generators
spawned from one SeedSequence. Streams run on a thread pool and their
results are concatenated in stream order, so output depends only on
(seed, n_streams, parameters).
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Iterator, Optional

import numpy as np
from scipy.special import softmax

from geoqt.canonical import ThermoReport
from geoqt.errors import DomainError, LowAcceptanceError
from geoqt.statespace import (
    HamiltonianSystem,
    HermitianObservable,
    ProjectiveState,
    expectations,
    normalize_gauge_rows,
)
from geoqt.volumes import EnergyShell, MeasureConvention, clamp_shell, manifold_volume

log = logging.getLogger(__name__)

MIN_ACCEPTANCE = 1e-6
ADVISORY_ACCEPTANCE = 1e-3
MIN_PROPOSALS_FOR_ABORT = 1_000_000
MAX_PROPOSAL_CHUNK = 1 << 18
JACKKNIFE_BLOCKS = 100


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    n_samples: int = 100_000
    n_streams: int = 1

    def __post_init__(self):
        if int(self.n_samples) < 1:
            raise DomainError(f"n_samples must be >= 1, got {self.n_samples}")
        if int(self.n_streams) < 1:
            raise DomainError(f"n_streams must be >= 1, got {self.n_streams}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "n_samples", int(self.n_samples))
        object.__setattr__(self, "n_streams", int(self.n_streams))

    def stream_generators(self) -> list[np.random.Generator]:
        children = np.random.SeedSequence(self.seed).spawn(self.n_streams)
        return [np.random.default_rng(child) for child in children]

    def stream_sizes(self) -> list[int]:
        base, extra = divmod(self.n_samples, self.n_streams)
        return [base + (1 if i < extra else 0) for i in range(self.n_streams)]


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    n: int
    acceptance_rate: Optional[float] = None

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class StateBatch:
    """N gauge-fixed samples held as one (N, D) array."""

    amplitudes: np.ndarray
    acceptance_rate: float = 1.0
    proposed: int = 0

    def __len__(self) -> int:
        return int(self.amplitudes.shape[0])

    def __iter__(self) -> Iterator[ProjectiveState]:
        return (ProjectiveState(row) for row in self.amplitudes)

    def __getitem__(self, index: int) -> ProjectiveState:
        return ProjectiveState(self.amplitudes[index])

    @property
    def dimension(self) -> int:
        return int(self.amplitudes.shape[1])

    def expectations(self, obs: HermitianObservable) -> np.ndarray:
        return expectations(obs, self.amplitudes)

    def energies(self, sys: HamiltonianSystem) -> np.ndarray:
        return expectations(sys.observable, self.amplitudes)


@dataclass(frozen=True, eq=False)
class WeightedSample:
    """Uniform samples with normalized importance weights e^{-beta h}."""

    batch: StateBatch
    weights: np.ndarray
    effective_sample_size: float

    def expectation(self, obs: HermitianObservable) -> float:
        return float(self.weights @ self.batch.expectations(obs))


# ---------------------------------------------------------------------------
# Stream plumbing
# ---------------------------------------------------------------------------

def _run_streams(cfg: SamplerConfig, worker: Callable[[np.random.Generator, int], object]) -> list:
    generators = cfg.stream_generators()
    sizes = cfg.stream_sizes()
    if cfg.n_streams == 1:
        return [worker(generators[0], sizes[0])]
    with ThreadPoolExecutor(max_workers=cfg.n_streams) as pool:
        return list(pool.map(worker, generators, sizes))


def haar_rows(rng: np.random.Generator, n: int, dimension: int) -> np.ndarray:
    """n unitary-invariant states: normalized standard complex Gaussians, gauge-fixed."""
    if n == 0:
        return np.empty((0, dimension), dtype=np.complex128)
    z = rng.standard_normal((n, dimension)) + 1j * rng.standard_normal((n, dimension))
    return normalize_gauge_rows(z)


def _standard_error(values: np.ndarray) -> float:
    if values.size < 2:
        return 0.0
    return float(np.std(values, ddof=1) / math.sqrt(values.size))


def block_jackknife(
    columns: np.ndarray,
    statistic: Callable[[np.ndarray, np.ndarray], np.ndarray],
    n_blocks: int = JACKKNIFE_BLOCKS,
) -> tuple[np.ndarray, np.ndarray]:
    """Delete-one-block jackknife for statistics of column sums.

    ``statistic(sums, counts)`` receives column sums with a leading block
    axis and must broadcast over it.
    """
    columns = np.asarray(columns, dtype=float)
    n = columns.shape[0]
    full = np.asarray(statistic(columns.sum(axis=0), np.asarray(n)))
    blocks = min(n_blocks, n)
    if blocks < 2:
        return full, np.zeros_like(full)
    edges = np.linspace(0, n, blocks + 1).astype(int)
    block_sums = np.add.reduceat(columns, edges[:-1], axis=0)
    counts = np.diff(edges)
    total = block_sums.sum(axis=0)
    leave_out = np.asarray(statistic(total - block_sums, n - counts))
    spread = leave_out - leave_out.mean(axis=0)
    variance = (blocks - 1) / blocks * np.sum(spread ** 2, axis=0)
    return full, np.sqrt(variance)


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------

def sample_uniform(dimension: int, cfg: SamplerConfig) -> StateBatch:
    """cfg.n_samples states from the Fubini-Study (unitary-invariant) law."""
    if dimension < 2:
        raise DomainError(f"sampling needs D >= 2, got {dimension}")
    parts = _run_streams(cfg, lambda rng, n: haar_rows(rng, n, dimension))
    return StateBatch(np.concatenate(parts), 1.0, cfg.n_samples)


def _rejection_stream(sys: HamiltonianSystem, beta: float, rng: np.random.Generator, size: int):
    accepted_rows = []
    accepted = proposed = 0
    rate_guess = 1.0
    while accepted < size:
        chunk = int(min(MAX_PROPOSAL_CHUNK, max(1024, 1.2 * (size - accepted) / rate_guess)))
        rows = haar_rows(rng, chunk, sys.dimension)
        h = expectations(sys.observable, rows)
        keep = rng.random(chunk) < np.exp(-beta * (h - sys.ground_energy))
        accepted_rows.append(rows[keep])
        accepted += int(keep.sum())
        proposed += chunk
        rate_guess = max(accepted / proposed, 1.0 / proposed)
        if proposed >= MIN_PROPOSALS_FOR_ABORT and accepted / proposed < MIN_ACCEPTANCE:
            raise LowAcceptanceError(accepted / proposed, proposed)
    rows = np.concatenate(accepted_rows)[:size]
    return rows, accepted, proposed


def sample_canonical(sys: HamiltonianSystem, beta: float, cfg: SamplerConfig) -> StateBatch:
    """Rejection sampling of e^{-beta h}: uniform proposals accepted with e^{-beta (h - E_0)}.

    Acceptance below ADVISORY_ACCEPTANCE is logged with a pointer to
    sample_canonical_weighted. A stream whose acceptance stays below
    MIN_ACCEPTANCE after MIN_PROPOSALS_FOR_ABORT proposals raises
    LowAcceptanceError instead of running without bound.
    """
    if not math.isfinite(beta) or beta < 0.0:
        raise DomainError(f"rejection sampling needs beta >= 0, got {beta}; use sample_canonical_weighted")
    if beta == 0.0:
        return sample_uniform(sys.dimension, cfg)
    if sys.dimension < 2:
        raise DomainError(f"sampling needs D >= 2, got {sys.dimension}")
    parts = _run_streams(cfg, lambda rng, n: _rejection_stream(sys, beta, rng, n))
    accepted = sum(p[1] for p in parts)
    proposed = sum(p[2] for p in parts)
    rate = accepted / proposed
    log.debug("canonical rejection sampler: %d accepted of %d proposed (%.4g)", accepted, proposed, rate)
    if rate < ADVISORY_ACCEPTANCE:
        log.warning("rejection acceptance %.3g is low; sample_canonical_weighted avoids the rejection cost", rate)
    return StateBatch(np.concatenate([p[0] for p in parts]), rate, proposed)


def _shift(sys: HamiltonianSystem, beta: float) -> float:
    return sys.ground_energy if beta >= 0.0 else sys.max_energy


def sample_canonical_weighted(sys: HamiltonianSystem, beta: float, cfg: SamplerConfig) -> WeightedSample:
    """Importance-reweighting path: uniform samples with weights e^{-beta h} (any finite beta)."""
    if not math.isfinite(beta):
        raise DomainError(f"beta must be finite, got {beta}")
    batch = sample_uniform(sys.dimension, cfg)
    weights = softmax(-beta * (batch.energies(sys) - _shift(sys, beta)))
    ess = float(1.0 / np.sum(weights ** 2))
    if ess < 0.01 * len(batch):
        log.warning("importance weights are concentrated: effective sample size %.1f of %d", ess, len(batch))
    return WeightedSample(batch, weights, ess)


# ---------------------------------------------------------------------------
# Estimators
# ---------------------------------------------------------------------------

def mc_partition_estimate(
    sys: HamiltonianSystem, beta: float, cfg: SamplerConfig, convention=MeasureConvention.RAW
) -> McEstimate:
    """Vol * mean(e^{-beta h}) over uniform samples."""
    if not math.isfinite(beta):
        raise DomainError(f"beta must be finite, got {beta}")
    batch = sample_uniform(sys.dimension, cfg)
    shift = _shift(sys, beta)
    f = np.exp(-beta * (batch.energies(sys) - shift))
    scale = manifold_volume(sys.dimension, convention) * math.exp(-beta * shift)
    return McEstimate(scale * float(f.mean()), scale * _standard_error(f), len(batch))


def mc_observable_estimate(
    sys: HamiltonianSystem, obs: HermitianObservable, beta: float, cfg: SamplerConfig
) -> McEstimate:
    """Ratio estimator mean(o e^{-beta h}) / mean(e^{-beta h}) with a block-jackknife error."""
    if obs.dimension != sys.dimension:
        raise DomainError(f"dimension mismatch: {obs.dimension} vs {sys.dimension}")
    batch = sample_uniform(sys.dimension, cfg)
    w = np.exp(-beta * (batch.energies(sys) - _shift(sys, beta)))
    o = batch.expectations(obs)
    value, error = block_jackknife(np.column_stack([w, o * w]), lambda s, c: s[..., 1] / s[..., 0])
    return McEstimate(float(value), float(error), len(batch))


def _hit_fraction(hits: np.ndarray, total: float) -> McEstimate:
    fraction = float(hits.mean())
    error = math.sqrt(fraction * (1.0 - fraction) / hits.size)
    return McEstimate(total * fraction, total * error, int(hits.size))


def mc_shell_volume(
    sys: HamiltonianSystem, shell: EnergyShell, cfg: SamplerConfig, convention=MeasureConvention.RAW
) -> McEstimate:
    lo, hi = clamp_shell(sys, shell)
    batch = sample_uniform(sys.dimension, cfg)
    h = np.clip(batch.energies(sys), sys.ground_energy, sys.max_energy)
    hits = (h >= lo) & (h <= hi) if hi > lo else np.zeros(h.size, dtype=bool)
    return _hit_fraction(hits, manifold_volume(sys.dimension, convention))


def mc_cumulative_volume(
    sys: HamiltonianSystem, energy: float, cfg: SamplerConfig, convention=MeasureConvention.RAW
) -> McEstimate:
    batch = sample_uniform(sys.dimension, cfg)
    hits = batch.energies(sys) <= energy
    return _hit_fraction(hits, manifold_volume(sys.dimension, convention))


@dataclass(frozen=True)
class McThermoEstimate:
    beta: float
    log_Q: McEstimate
    U: McEstimate
    var_h: McEstimate
    Hq: McEstimate
    F: Optional[McEstimate]
    convention: str

    def as_thermo_report(self) -> ThermoReport:
        return ThermoReport(
            beta=self.beta,
            Q=float(np.exp(self.log_Q.value)),
            log_Q=self.log_Q.value,
            F=self.F.value if self.F is not None else None,
            U=self.U.value,
            Hq=self.Hq.value,
            var_h=max(self.var_h.value, 0.0),
            convention=self.convention,
            method="mc",
        )


def mc_thermo_estimate(
    sys: HamiltonianSystem, beta: float, cfg: SamplerConfig, convention=MeasureConvention.RAW
) -> McThermoEstimate:
    """log Q, U, var(h), H_q and F from uniform samples alone (degenerate spectra, negative beta)."""
    if not math.isfinite(beta):
        raise DomainError(f"beta must be finite, got {beta}")
    convention = MeasureConvention.parse(convention)
    batch = sample_uniform(sys.dimension, cfg)
    h = batch.energies(sys)
    shift = _shift(sys, beta)
    w = np.exp(-beta * (h - shift))
    log_volume = math.log(manifold_volume(sys.dimension, convention))

    def statistic(sums, counts):
        log_q = log_volume + np.log(sums[..., 0] / counts) - beta * shift
        energy = sums[..., 1] / sums[..., 0]
        variance = sums[..., 2] / sums[..., 0] - energy ** 2
        free = -log_q / beta if beta != 0.0 else np.zeros_like(log_q)
        return np.stack([log_q, energy, variance, log_q + beta * energy, free], axis=-1)

    values, errors = block_jackknife(np.column_stack([w, h * w, h * h * w]), statistic)
    n = len(batch)
    est = [McEstimate(float(v), float(e), n) for v, e in zip(values, errors)]
    return McThermoEstimate(
        beta=float(beta),
        log_Q=est[0],
        U=est[1],
        var_h=est[2],
        Hq=est[3],
        F=est[4] if beta != 0.0 else None,
        convention=convention.value,
    )
