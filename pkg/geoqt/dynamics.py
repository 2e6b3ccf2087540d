# SPDX-License-Identifier: BUSL-1.1
"""Schrodinger trajectories on CP^{D-1}, driven protocols and work statistics.

A protocol drives H(lambda) = H_0 + lambda V along a time grid. Each step
applies the exact exponential of the midpoint Hamiltonian, split in two
half steps so the midpoint state is available for the work quadrature

    W = sum_k (lambda_{k+1} - lambda_k) <psi_mid,k | V | psi_mid,k>.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

from geoqt.canonical import canonical_expectation, log_partition_function, thermo_report
from geoqt.errors import DomainError
from geoqt.sampling import McEstimate, SamplerConfig, mc_observable_estimate, sample_canonical
from geoqt.statespace import (
    HamiltonianSystem,
    HermitianObservable,
    ProjectiveState,
    expectations,
    normalize_gauge,
)

log = logging.getLogger(__name__)

STIFF_STEP = 0.1
SECOND_LAW_SIGMAS = 3.0


class Schedule(str, Enum):
    CONSTANT = "constant"
    LINEAR = "linear"
    SUDDEN = "sudden"

    @classmethod
    def parse(cls, value) -> "Schedule":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            valid = ", ".join(s.value for s in cls)
            raise DomainError(f"unknown schedule {value!r} (valid: {valid})") from None


@dataclass(frozen=True)
class HamiltonianFamily:
    """lambda -> H_0 + lambda V."""

    h0: HermitianObservable
    v: HermitianObservable

    def __post_init__(self):
        if self.h0.dimension != self.v.dimension:
            raise DomainError(f"H0 is {self.h0.dimension}-dimensional but V is {self.v.dimension}-dimensional")

    @property
    def dimension(self) -> int:
        return self.h0.dimension

    def at(self, lam: float) -> HermitianObservable:
        return self.h0.combine(self.v, lam)

    def system(self, lam: float) -> HamiltonianSystem:
        return HamiltonianSystem.from_observable(self.at(lam))


@dataclass(frozen=True)
class ScheduleSegment:
    shape: Schedule
    lambda_i: float
    lambda_f: float
    duration: float
    n_steps: int

    def __post_init__(self):
        object.__setattr__(self, "shape", Schedule.parse(self.shape))
        if not all(math.isfinite(x) for x in (self.lambda_i, self.lambda_f, self.duration)):
            raise DomainError("schedule endpoints and duration must be finite")
        if self.duration < 0.0:
            raise DomainError(f"duration must be >= 0, got {self.duration}")
        if int(self.n_steps) < 1:
            raise DomainError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.shape is Schedule.CONSTANT and self.lambda_f != self.lambda_i:
            raise DomainError("a constant schedule needs lambda_f == lambda_i")

    def grid(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(times, node lambdas, midpoint lambdas) starting at t = 0."""
        n = int(self.n_steps)
        if self.shape is Schedule.SUDDEN:
            # the quench is a zero-length first step at t = 0
            if self.duration == 0.0:
                times = np.zeros(2)
            else:
                times = np.concatenate([[0.0], np.linspace(0.0, self.duration, n + 1)])
            lambdas = np.full(times.size, self.lambda_f)
            lambdas[0] = self.lambda_i
            return times, lambdas, np.full(times.size - 1, self.lambda_f)
        s = np.linspace(0.0, 1.0, n + 1)
        delta = self.lambda_f - self.lambda_i
        lambdas = self.lambda_i + delta * s
        mids = self.lambda_i + delta * 0.5 * (s[:-1] + s[1:])
        if self.shape is Schedule.CONSTANT:
            lambdas[:] = self.lambda_i
            mids[:] = self.lambda_i
        return self.duration * s, lambdas, mids


@dataclass(frozen=True, eq=False)
class Protocol:
    """A driven Hamiltonian family plus one or more schedule segments."""

    family: HamiltonianFamily
    segments: tuple
    times: np.ndarray = field(init=False, repr=False)
    lambdas: np.ndarray = field(init=False, repr=False)
    mid_lambdas: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        segments = tuple(self.segments)
        if not segments:
            raise DomainError("protocol needs at least one schedule segment")
        for before, after in zip(segments, segments[1:]):
            if abs(before.lambda_f - after.lambda_i) > 1e-12 * max(1.0, abs(before.lambda_f)):
                raise DomainError("consecutive segments must join continuously in lambda")
        times, lambdas, mids = [np.zeros(1)], [np.array([segments[0].lambda_i])], []
        offset = 0.0
        for segment in segments:
            t, lam, mid = segment.grid()
            times.append(offset + t[1:])
            lambdas.append(lam[1:])
            mids.append(mid)
            offset += segment.duration
        object.__setattr__(self, "segments", segments)
        object.__setattr__(self, "times", np.concatenate(times))
        object.__setattr__(self, "lambdas", np.concatenate(lambdas))
        object.__setattr__(self, "mid_lambdas", np.concatenate(mids))

    @classmethod
    def single(
        cls,
        h0: HermitianObservable,
        v: HermitianObservable,
        schedule,
        lambda_i: float,
        lambda_f: float,
        duration: float,
        n_steps: int,
    ) -> "Protocol":
        segment = ScheduleSegment(Schedule.parse(schedule), float(lambda_i), float(lambda_f), float(duration), int(n_steps))
        return cls(HamiltonianFamily(h0, v), (segment,))

    @property
    def dimension(self) -> int:
        return self.family.dimension

    @property
    def lambda_i(self) -> float:
        return self.segments[0].lambda_i

    @property
    def lambda_f(self) -> float:
        return self.segments[-1].lambda_f

    @property
    def duration(self) -> float:
        return float(sum(s.duration for s in self.segments))

    @property
    def n_steps(self) -> int:
        return int(self.mid_lambdas.size)

    def hamiltonian(self, lam: float) -> HermitianObservable:
        return self.family.at(lam)

    def concatenate(self, other: "Protocol") -> "Protocol":
        same = np.array_equal(self.family.h0.matrix, other.family.h0.matrix) and np.array_equal(
            self.family.v.matrix, other.family.v.matrix
        )
        if not same:
            raise DomainError("only protocols over the same Hamiltonian family can be concatenated")
        return Protocol(self.family, self.segments + other.segments)

    def with_step(self, dt: float) -> "Protocol":
        """Regrid every segment so that no step exceeds dt."""
        if not dt > 0.0:
            raise DomainError(f"dt must be positive, got {dt}")
        segments = tuple(
            replace(s, n_steps=max(1, math.ceil(s.duration / dt - 1e-9))) for s in self.segments
        )
        return Protocol(self.family, segments)


@dataclass(frozen=True, eq=False)
class StepPlan:
    """Precomputed half-step propagators, shared by single and batched evolution."""

    half_propagators: np.ndarray   # (n_steps, D, D)
    d_lambda: np.ndarray           # (n_steps,)
    v: HermitianObservable


def build_step_plan(protocol: Protocol) -> StepPlan:
    dts = np.diff(protocol.times)
    cache: dict[float, HamiltonianSystem] = {}
    halves = np.empty((dts.size, protocol.dimension, protocol.dimension), dtype=np.complex128)
    stiff = 0.0
    for k, (lam, dt) in enumerate(zip(protocol.mid_lambdas, dts)):
        lam = float(lam)
        if lam not in cache:
            cache[lam] = protocol.family.system(lam)
        system = cache[lam]
        stiff = max(stiff, dt * float(np.max(np.abs(system.energies))))
        halves[k] = system.propagator(0.5 * dt)
    if stiff > STIFF_STEP:
        log.warning("dt*||H|| reaches %.3g (above %.1f); consider a finer grid", stiff, STIFF_STEP)
    return StepPlan(halves, np.diff(protocol.lambdas), protocol.family.v)


@dataclass(frozen=True, eq=False)
class TrajectoryRecord:
    times: np.ndarray
    states: np.ndarray        # (n_steps + 1, D), unit vectors in the evolution's own phase
    mid_states: np.ndarray    # (n_steps, D)
    step_work: np.ndarray     # (n_steps,)
    work: float

    def state(self, index: int) -> ProjectiveState:
        return normalize_gauge(self.states[index])

    @property
    def final_state(self) -> ProjectiveState:
        return self.state(-1)

    def expectations(self, obs: HermitianObservable) -> np.ndarray:
        return expectations(obs, self.states)


def _as_vector(z0, dimension: int) -> np.ndarray:
    vec = z0.amplitudes if isinstance(z0, ProjectiveState) else normalize_gauge(z0).amplitudes
    if vec.size != dimension:
        raise DomainError(f"state is {vec.size}-dimensional but the Hamiltonian is {dimension}-dimensional")
    return np.array(vec, dtype=np.complex128)


def _run_plan(plan: StepPlan, times: np.ndarray, z0: np.ndarray) -> TrajectoryRecord:
    n = plan.d_lambda.size
    states = np.empty((n + 1, z0.size), dtype=np.complex128)
    mids = np.empty((n, z0.size), dtype=np.complex128)
    states[0] = z0
    for k in range(n):
        mids[k] = plan.half_propagators[k] @ states[k]
        states[k + 1] = plan.half_propagators[k] @ mids[k]
    step_work = plan.d_lambda * expectations(plan.v, mids) if n else np.zeros(0)
    return TrajectoryRecord(times.copy(), states, mids, step_work, math.fsum(step_work))


def evolve_driven(protocol: Protocol, z0, dt: Optional[float] = None) -> TrajectoryRecord:
    """Midpoint-exponential propagation of z0 under the protocol."""
    if dt is not None:
        protocol = protocol.with_step(dt)
    plan = build_step_plan(protocol)
    return _run_plan(plan, protocol.times, _as_vector(z0, protocol.dimension))


def evolve(hamiltonian: HermitianObservable, z0, duration: float, dt: float) -> TrajectoryRecord:
    """Constant-Hamiltonian trajectory over [0, duration] with steps no longer than dt."""
    if not (dt > 0.0 and duration >= 0.0):
        raise DomainError(f"need dt > 0 and duration >= 0, got dt={dt}, duration={duration}")
    if dt > duration > 0.0:
        raise DomainError(f"dt {dt} exceeds the duration {duration}")
    zero = HermitianObservable(np.zeros_like(hamiltonian.matrix))
    n_steps = max(1, math.ceil(duration / dt - 1e-9))
    protocol = Protocol.single(hamiltonian, zero, Schedule.CONSTANT, 0.0, 0.0, duration, n_steps)
    return evolve_driven(protocol, z0)


def trajectory_work(record: TrajectoryRecord, protocol: Protocol) -> float:
    """Midpoint work quadrature recomputed from a record's midpoint states."""
    if record.times.shape != protocol.times.shape or not np.allclose(record.times, protocol.times, rtol=0, atol=1e-12):
        raise DomainError("trajectory record was not produced on this protocol's time grid")
    values = expectations(protocol.family.v, record.mid_states)
    return math.fsum(np.diff(protocol.lambdas) * values)


@dataclass(frozen=True, eq=False)
class BatchResult:
    final_states: np.ndarray
    work: np.ndarray


def evolve_driven_batch(protocol: Protocol, states, dt: Optional[float] = None) -> BatchResult:
    """Evolve an (N, D) array of states with the same step plan as evolve_driven."""
    if dt is not None:
        protocol = protocol.with_step(dt)
    z = np.array(getattr(states, "amplitudes", states), dtype=np.complex128)
    if z.ndim != 2 or z.shape[1] != protocol.dimension:
        raise DomainError(f"expected an (N, {protocol.dimension}) array of states, got shape {z.shape}")
    plan = build_step_plan(protocol)
    work = np.zeros(z.shape[0])
    for k in range(plan.d_lambda.size):
        mid = z @ plan.half_propagators[k].T
        work += plan.d_lambda[k] * expectations(plan.v, mid)
        z = mid @ plan.half_propagators[k].T
    return BatchResult(z, work)


# ---------------------------------------------------------------------------
# Fluctuation theorem and first law
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class JarzynskiReport:
    beta: float
    n: int
    mean_exp_neg_beta_W: float
    std_error: float
    delta_F_closed_form: float
    exp_neg_beta_delta_F: float
    discrepancy_sigma: float
    mean_W: float
    mean_W_std_error: float
    second_law_margin_sigma: float
    second_law_ok: bool
    acceptance_rate: float
    works: np.ndarray = field(repr=False)

    def as_dict(self) -> dict:
        data = asdict(self)
        data.pop("works")
        return data


def _sigma_units(difference: float, error: float) -> float:
    if error > 0.0:
        return difference / error
    return 0.0 if difference == 0.0 else math.copysign(math.inf, difference)


def jarzynski_experiment(
    protocol: Protocol, beta: float, cfg: SamplerConfig, dt: Optional[float] = None
) -> JarzynskiReport:
    """Canonical initial states at H(lambda_i), driven once each, versus Q_f / Q_i."""
    if not (math.isfinite(beta) and beta > 0.0):
        raise DomainError(f"the Jarzynski experiment needs beta > 0, got {beta}")
    system_i = protocol.family.system(protocol.lambda_i)
    system_f = protocol.family.system(protocol.lambda_f)
    delta_f = -(log_partition_function(system_f, beta) - log_partition_function(system_i, beta)) / beta

    initial = sample_canonical(system_i, beta, cfg)
    works = evolve_driven_batch(protocol, initial, dt).work
    x = np.exp(-beta * works)
    n = works.size
    mean_x = float(x.mean())
    se_x = float(x.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    mean_w = float(works.mean())
    se_w = float(works.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    target = math.exp(-beta * delta_f)
    margin = _sigma_units(mean_w - delta_f, se_w)
    ok = margin >= -SECOND_LAW_SIGMAS
    if not ok:
        log.warning("mean work %.6g is below delta F %.6g by %.2f standard errors", mean_w, delta_f, -margin)
    return JarzynskiReport(
        beta=float(beta),
        n=n,
        mean_exp_neg_beta_W=mean_x,
        std_error=se_x,
        delta_F_closed_form=delta_f,
        exp_neg_beta_delta_F=target,
        discrepancy_sigma=abs(_sigma_units(mean_x - target, se_x)),
        mean_W=mean_w,
        mean_W_std_error=se_w,
        second_law_margin_sigma=margin,
        second_law_ok=ok,
        acceptance_rate=initial.acceptance_rate,
        works=works,
    )


@dataclass(frozen=True)
class FirstLawReport:
    beta: float
    lambda0: float
    dlambda: float
    dU: float
    dW: float
    dQ: float
    dF: float
    dHq: float
    residual_first_law: float
    residual_free_energy: float
    residual_entropy: float
    dW_mc: Optional[McEstimate] = None

    def as_dict(self) -> dict:
        return asdict(self)


def first_law_check(
    family: HamiltonianFamily,
    beta: float,
    lambda0: float,
    dlambda: Optional[float] = None,
    *,
    cfg: Optional[SamplerConfig] = None,
) -> FirstLawReport:
    """Central differences of U, F, H_q across lambda0 +- dlambda against dW = <V> dlambda.

    The reported ``dlambda`` is the full step 2 * dlambda. With ``cfg`` the
    work term is also estimated by Monte Carlo.
    """
    if not (math.isfinite(beta) and beta > 0.0):
        raise DomainError(f"the first-law check needs beta > 0, got {beta}")
    delta = 1e-4 * max(1.0, abs(lambda0)) if dlambda is None else float(dlambda)
    if not delta > 0.0:
        raise DomainError(f"dlambda must be positive, got {dlambda}")
    lower = thermo_report(family.system(lambda0 - delta), beta)
    upper = thermo_report(family.system(lambda0 + delta), beta)
    center = family.system(lambda0)
    step = 2.0 * delta
    d_w = canonical_expectation(center, family.v, beta) * step
    d_u = upper.U - lower.U
    d_f = upper.F - lower.F
    d_hq = upper.Hq - lower.Hq
    d_q = d_u - d_w
    mc = None
    if cfg is not None:
        est = mc_observable_estimate(center, family.v, beta, cfg)
        mc = McEstimate(est.value * step, est.std_error * step, est.n)
    return FirstLawReport(
        beta=float(beta),
        lambda0=float(lambda0),
        dlambda=step,
        dU=d_u,
        dW=d_w,
        dQ=d_q,
        dF=d_f,
        dHq=d_hq,
        residual_first_law=abs(d_u - (d_w + d_q)),
        residual_free_energy=abs(d_f - d_w),
        residual_entropy=abs(d_hq - beta * d_q),
        dW_mc=mc,
    )
