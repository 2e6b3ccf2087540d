# SPDX-License-Identifier: BUSL-1.1
"""Geometric canonical ensemble p_beta(Z) = e^{-beta h(Z)} / Q_beta and the Gibbs comparison."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np
from scipy.special import entr, gammaln, logsumexp, softmax

from geoqt.divdiff import ExpDividedDifference, exp_divided_difference, occupation_moments
from geoqt.errors import DomainError
from geoqt.statespace import (
    HamiltonianSystem,
    HermitianObservable,
    ProjectiveState,
    WeightedStateEnsemble,
)
from geoqt.volumes import MeasureConvention

if TYPE_CHECKING:
    from geoqt.sampling import SamplerConfig

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CanonicalState:
    system: HamiltonianSystem
    beta: float
    convention: MeasureConvention = MeasureConvention.RAW

    def __post_init__(self):
        if not math.isfinite(self.beta):
            raise DomainError(f"beta must be finite, got {self.beta}")
        object.__setattr__(self, "convention", MeasureConvention.parse(self.convention))
        if self.beta < 0.0:
            log.warning("negative beta %.6g: only Monte Carlo estimates are available", self.beta)


@dataclass(frozen=True)
class ThermoReport:
    """Thermodynamic summary of one ensemble at one beta.

    ``F`` is None at beta = 0, where the free energy is undefined; ``Hq``
    is then log Q, the log-volume of the manifold.
    """

    beta: float
    Q: float
    log_Q: float
    F: Optional[float]
    U: float
    Hq: float
    var_h: float
    convention: str
    method: str

    def as_dict(self) -> dict:
        return asdict(self)


def _log_prefactor(dimension: int, convention: MeasureConvention) -> float:
    n = dimension - 1
    if convention is MeasureConvention.NORMALIZED:
        return float(gammaln(n + 1))
    return n * math.log(math.pi)


def _closed_form(sys: HamiltonianSystem, beta: float, convention) -> tuple[float, ExpDividedDifference]:
    convention = MeasureConvention.parse(convention)
    if sys.dimension < 2:
        raise DomainError("the canonical ensemble needs D >= 2")
    if not math.isfinite(beta) or beta < 0.0:
        raise DomainError(
            f"closed forms need a finite beta >= 0, got {beta}; pass a fallback SamplerConfig for Monte Carlo"
        )
    sys.require_nondegenerate()
    dd = exp_divided_difference(sys.energies - sys.ground_energy, beta)
    log_q = _log_prefactor(sys.dimension, convention) - beta * sys.ground_energy + dd.log_value
    return log_q, dd


def _needs_fallback(sys: HamiltonianSystem, beta: float, fallback) -> bool:
    if fallback is None:
        return False
    reason = None
    if beta < 0.0:
        reason = f"negative beta {beta:.6g}"
    elif sys.is_degenerate():
        reason = f"degenerate spectrum (min gap {sys.min_gap:.3e})"
    if reason:
        log.warning("%s; using the Monte Carlo estimate", reason)
        return True
    return False


def log_partition_function(sys: HamiltonianSystem, beta: float, convention=MeasureConvention.RAW) -> float:
    """log Q_beta without forming Q, so large |beta E_0| cannot overflow."""
    return _closed_form(sys, beta, convention)[0]


def partition_function(
    sys: HamiltonianSystem,
    beta: float,
    convention=MeasureConvention.RAW,
    *,
    fallback: "SamplerConfig | None" = None,
) -> float:
    """Q_beta = integral of e^{-beta h} against the Fubini-Study measure."""
    if _needs_fallback(sys, beta, fallback):
        from geoqt.sampling import mc_partition_estimate

        return mc_partition_estimate(sys, beta, fallback, convention).value
    return float(np.exp(log_partition_function(sys, beta, convention)))


def thermo_report(
    sys: HamiltonianSystem,
    beta: float,
    convention=MeasureConvention.RAW,
    *,
    fallback: "SamplerConfig | None" = None,
) -> ThermoReport:
    convention = MeasureConvention.parse(convention)
    if _needs_fallback(sys, beta, fallback):
        from geoqt.sampling import mc_thermo_estimate

        return mc_thermo_estimate(sys, beta, fallback, convention).as_thermo_report()
    log_q, dd = _closed_form(sys, beta, convention)
    energy = sys.ground_energy - dd.d1
    return ThermoReport(
        beta=float(beta),
        Q=float(np.exp(log_q)),
        log_Q=log_q,
        F=-log_q / beta if beta > 0.0 else None,
        U=energy,
        Hq=log_q + beta * energy,
        var_h=max(dd.d2, 0.0),
        convention=convention.value,
        method=dd.method,
    )


def canonical_density(state: ProjectiveState, cs: CanonicalState) -> float:
    """p_beta(Z) with respect to dV_FS in the chosen convention."""
    log_q = log_partition_function(cs.system, cs.beta, cs.convention)
    return math.exp(-cs.beta * cs.system.energy(state) - log_q)


# ---------------------------------------------------------------------------
# Observables under the geometric canonical ensemble
# ---------------------------------------------------------------------------

def canonical_moments(sys: HamiltonianSystem, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """(<p_k>, <p_j p_k>) in the energy eigenbasis, exact."""
    if sys.dimension < 2:
        raise DomainError("the canonical ensemble needs D >= 2")
    sys.require_nondegenerate()
    return occupation_moments(sys.energies - sys.ground_energy, beta)


def canonical_observable_moments(sys: HamiltonianSystem, obs: HermitianObservable, beta: float) -> tuple[float, float]:
    """Mean and variance of o(Z) = <Z|O|Z> under p_beta.

    Phases average out because h depends on the p_k alone, so only the
    diagonal of O and the moduli |O_jk|^2 in the eigenbasis survive.
    """
    m1, m2 = canonical_moments(sys, beta)
    o = sys.in_eigenbasis(obs)
    diag = np.real(np.diag(o))
    mean = float(diag @ m1)
    off = np.abs(o) ** 2
    np.fill_diagonal(off, 0.0)
    second = float(diag @ m2 @ diag + np.sum(off * m2))
    return mean, max(second - mean * mean, 0.0)


def canonical_expectation(sys: HamiltonianSystem, obs: HermitianObservable, beta: float) -> float:
    return canonical_observable_moments(sys, obs, beta)[0]


def canonical_variance(sys: HamiltonianSystem, obs: HermitianObservable, beta: float) -> float:
    return canonical_observable_moments(sys, obs, beta)[1]


# ---------------------------------------------------------------------------
# Gibbs ensemble
# ---------------------------------------------------------------------------

def gibbs_weights(sys: HamiltonianSystem, beta: float) -> np.ndarray:
    if not math.isfinite(beta):
        raise DomainError(f"beta must be finite, got {beta}")
    return softmax(-beta * sys.energies)


def gibbs_ensemble(sys: HamiltonianSystem, beta: float) -> WeightedStateEnsemble:
    """The Gibbs state as a Dirac-weighted geometric state on the eigenvectors."""
    return WeightedStateEnsemble.from_pairs(gibbs_weights(sys, beta), sys.eigenvectors)


def gibbs_thermo_report(sys: HamiltonianSystem, beta: float) -> ThermoReport:
    """Z, F, U, von Neumann entropy and energy variance of the Gibbs state."""
    w = gibbs_weights(sys, beta)
    log_z = float(logsumexp(-beta * sys.energies))
    energy = float(w @ sys.energies)
    return ThermoReport(
        beta=float(beta),
        Q=float(np.exp(log_z)),
        log_Q=log_z,
        F=-log_z / beta if beta != 0.0 else None,
        U=energy,
        Hq=float(np.sum(entr(w))),
        var_h=max(float(w @ sys.energies ** 2) - energy * energy, 0.0),
        convention="gibbs",
        method="spectral",
    )
