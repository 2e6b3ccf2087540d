# SPDX-License-Identifier: BUSL-1.1
"""Stern-Gerlach predictions for a dilute qudit gas: Gibbs versus geometric canonical.

The qubit quadrature works in the chart Z = (sqrt(1-q), sqrt(q) e^{i chi})
built on the energy eigenbasis, where h depends on q alone and
dV_FS = dq dchi / 2.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from enum import Enum
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.integrate import dblquad

from geoqt.canonical import (
    canonical_observable_moments,
    gibbs_weights,
    log_partition_function,
)
from geoqt.errors import DomainError
from geoqt.sampling import SamplerConfig, block_jackknife, sample_uniform
from geoqt.statespace import (
    HamiltonianSystem,
    HermitianObservable,
    ProjectiveState,
    expectation,
    normalize_gauge,
    qubit_chart,
)
from geoqt.volumes import MeasureConvention

log = logging.getLogger(__name__)

QUAD_EPSREL = 1e-8
# e^{-QUAD_U_MAX} is below double precision relative to the integral
QUAD_U_MAX = 60.0


class Method(str, Enum):
    QUADRATURE = "quadrature"
    MC = "mc"
    EXACT = "exact"

    @classmethod
    def parse(cls, value) -> "Method":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise DomainError(f"unknown method {value!r} (valid: {valid})") from None


@dataclass(frozen=True)
class MeasurementAxis:
    theta: float
    phi: float

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise DomainError("axis angles must be finite")
        if not 0.0 <= self.theta <= math.pi:
            raise DomainError(f"theta must lie in [0, pi], got {self.theta}")
        if not -math.pi <= self.phi < math.pi:
            raise DomainError(f"phi must lie in [-pi, pi), got {self.phi}")

    @classmethod
    def named(cls, name: str) -> "MeasurementAxis":
        axes = {"z": (0.0, 0.0), "x": (math.pi / 2, 0.0), "y": (math.pi / 2, math.pi / 2)}
        if name not in axes:
            raise DomainError(f"unknown axis {name!r} (valid: {', '.join(axes)})")
        return cls(*axes[name])

    def state(self) -> ProjectiveState:
        """psi(theta, phi) = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>."""
        return normalize_gauge([math.cos(self.theta / 2), np.exp(1j * self.phi) * math.sin(self.theta / 2)])

    def projector(self) -> HermitianObservable:
        return HermitianObservable(self.state().projector())


class Prediction(NamedTuple):
    p_plus: float
    p_minus: float
    std_error: float = 0.0


class SweepRow(NamedTuple):
    beta: float
    gibbs_mean: float
    gibbs_std: float
    geo_mean: float
    geo_std: float
    geo_std_error: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    method: str

    def as_dicts(self) -> list[dict]:
        return [row._asdict() for row in self.rows]


def _axis_projector(axis) -> HermitianObservable:
    if isinstance(axis, MeasurementAxis):
        return axis.projector()
    if isinstance(axis, HermitianObservable):
        m = axis.matrix
        if np.abs(m @ m - m).max() > 1e-10 or abs(np.trace(m).real - 1.0) > 1e-10:
            raise DomainError("a measurement projector must be rank one")
        return axis
    raise DomainError(f"unsupported axis {axis!r}")


def projector_value(axis, state: ProjectiveState) -> float:
    """P_+(Z) = <psi(Z)|Pi_+|psi(Z)>; a rank-one projector may replace the axis for D > 2."""
    projector = _axis_projector(axis)
    if isinstance(axis, MeasurementAxis) and state.dimension != 2:
        raise DomainError("an angular measurement axis needs D == 2")
    return min(max(expectation(projector, state), 0.0), 1.0)


def gibbs_moments(sys: HamiltonianSystem, obs: HermitianObservable, beta: float) -> tuple[float, float]:
    """Mean and spread of o(Z) under the Gibbs state read as a Dirac ensemble on eigenvectors."""
    w = gibbs_weights(sys, beta)
    values = np.real(np.diag(sys.in_eigenbasis(obs)))
    mean = float(w @ values)
    return mean, math.sqrt(max(float(w @ values ** 2) - mean * mean, 0.0))


def gibbs_prediction(sys: HamiltonianSystem, beta: float, axis) -> Prediction:
    p_plus = gibbs_moments(sys, _axis_projector(axis), beta)[0]
    p_plus = min(max(p_plus, 0.0), 1.0)
    return Prediction(p_plus, 1.0 - p_plus)


# ---------------------------------------------------------------------------
# Geometric canonical ensemble
# ---------------------------------------------------------------------------

def _chart_point(sys: HamiltonianSystem, q: float, chi: float) -> np.ndarray:
    return sys.basis @ np.array([math.sqrt(max(1.0 - q, 0.0)), math.sqrt(max(q, 0.0)) * np.exp(1j * chi)])


def _quadrature_moments(sys: HamiltonianSystem, obs: HermitianObservable, beta: float) -> tuple[float, float]:
    if sys.dimension != 2:
        raise DomainError("the quadrature method is implemented for qubits; use 'exact' or 'mc'")
    matrix = obs.matrix
    b = beta * sys.spread

    def o(chi, q):
        z = _chart_point(sys, q, chi)
        return float(np.real(np.vdot(z, matrix @ z)))

    # integrate in u = b q so the weight e^{-u} keeps an O(1) width at any beta
    if b > 0.0:
        upper = min(b, QUAD_U_MAX)
        norm = 2.0 * math.pi * -math.expm1(-upper)
        first, _ = dblquad(lambda chi, u: math.exp(-u) * o(chi, u / b), 0.0, upper, -math.pi, math.pi,
                           epsrel=QUAD_EPSREL)
        second, _ = dblquad(lambda chi, u: math.exp(-u) * o(chi, u / b) ** 2, 0.0, upper, -math.pi, math.pi,
                            epsrel=QUAD_EPSREL)
    else:
        norm = 2.0 * math.pi
        first, _ = dblquad(o, 0.0, 1.0, -math.pi, math.pi, epsrel=QUAD_EPSREL)
        second, _ = dblquad(lambda chi, q: o(chi, q) ** 2, 0.0, 1.0, -math.pi, math.pi, epsrel=QUAD_EPSREL)
    mean = first / norm
    return mean, max(second / norm - mean * mean, 0.0)


def _mc_moments(sys: HamiltonianSystem, obs: HermitianObservable, beta: float, cfg: SamplerConfig) -> tuple[float, float, float]:
    batch = sample_uniform(sys.dimension, cfg)
    o = batch.expectations(obs)
    w = np.exp(-beta * (batch.energies(sys) - sys.ground_energy))

    def statistic(sums, counts):
        return np.stack([sums[..., 1] / sums[..., 0], sums[..., 2] / sums[..., 0]], axis=-1)

    (mean, second), (error, _) = block_jackknife(np.column_stack([w, o * w, o * o * w]), statistic)
    return float(mean), max(float(second - mean * mean), 0.0), float(error)


def geometric_moments(
    sys: HamiltonianSystem,
    obs: HermitianObservable,
    beta: float,
    method=Method.QUADRATURE,
    cfg: Optional[SamplerConfig] = None,
) -> tuple[float, float, float]:
    """(mean, std, std_error of the mean) of o(Z) under e^{-beta h}."""
    method = Method.parse(method)
    if method is Method.MC:
        if cfg is None:
            raise DomainError("the mc method needs a SamplerConfig")
        mean, var, err = _mc_moments(sys, obs, beta, cfg)
        return mean, math.sqrt(var), err
    if method is Method.QUADRATURE:
        mean, var = _quadrature_moments(sys, obs, beta)
    else:
        mean, var = canonical_observable_moments(sys, obs, beta)
    return mean, math.sqrt(var), 0.0


def geometric_prediction(
    sys: HamiltonianSystem,
    beta: float,
    axis,
    method=Method.QUADRATURE,
    cfg: Optional[SamplerConfig] = None,
) -> Prediction:
    mean, _, err = geometric_moments(sys, _axis_projector(axis), beta, method, cfg)
    p_plus = min(max(mean, 0.0), 1.0)
    return Prediction(p_plus, 1.0 - p_plus, err)


def thermal_sweep(
    sys: HamiltonianSystem,
    obs: HermitianObservable,
    beta_grid: Sequence[float],
    method=Method.QUADRATURE,
    cfg: Optional[SamplerConfig] = None,
    max_workers: Optional[int] = None,
) -> SweepResult:
    """Per-beta mean and standard deviation of o(Z) under both ensembles."""
    method = Method.parse(method)
    if obs.dimension != sys.dimension:
        raise DomainError(f"dimension mismatch: {obs.dimension} vs {sys.dimension}")

    def row(beta: float) -> SweepRow:
        beta = float(beta)
        g_mean, g_std = gibbs_moments(sys, obs, beta)
        geo_mean, geo_std, geo_err = geometric_moments(sys, obs, beta, method, cfg)
        return SweepRow(beta, g_mean, g_std, geo_mean, geo_std, geo_err)

    betas = list(beta_grid)
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        rows = tuple(pool.map(row, betas))
    return SweepResult(rows, method.value)


# ---------------------------------------------------------------------------
# Display grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DensityGrid:
    """Geometric canonical density sampled on a (q, chi) grid of the computational-basis chart."""

    q: np.ndarray
    chi: np.ndarray
    density: np.ndarray          # (num_q, num_chi)
    eigenvector_coords: tuple    # ((q_0, chi_0), (q_1, chi_1))
    gibbs_weights: np.ndarray

    def as_dict(self) -> dict:
        return asdict(self)


def canonical_density_grid(
    sys: HamiltonianSystem,
    beta: float,
    num_q: int = 100,
    num_chi: int = 100,
    convention=MeasureConvention.RAW,
) -> DensityGrid:
    """p_beta on a num_q x num_chi grid over q in [0, 1], chi in [-pi, pi]."""
    if sys.dimension != 2:
        raise DomainError("the (q, chi) display grid is defined for qubits")
    if num_q < 2 or num_chi < 2:
        raise DomainError("grid needs at least 2 points per axis")
    q = np.linspace(0.0, 1.0, num_q)
    chi = np.linspace(-math.pi, math.pi, num_chi)
    qq, cc = np.meshgrid(q, chi, indexing="ij")
    z0 = np.sqrt(1.0 - qq)
    z1 = np.sqrt(qq) * np.exp(1j * cc)
    rows = np.stack([z0.ravel(), z1.ravel()], axis=1)
    h = np.real(np.einsum("ni,ij,nj->n", rows.conj(), sys.observable.matrix, rows)).reshape(qq.shape)
    log_q = log_partition_function(sys, beta, convention)
    density = np.exp(-beta * h - log_q)
    coords = tuple(qubit_chart(v) for v in sys.eigenvectors)
    return DensityGrid(q, chi, density, coords, gibbs_weights(sys, beta))
