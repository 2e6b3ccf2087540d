# SPDX-License-Identifier: BUSL-1.1
"""Simplex sections and the microcanonical ensemble on CP^{D-1}.

The energy h(Z) = sum_k E_k p_k is linear on the probability simplex, and
the Fubini-Study measure pushes forward to the flat measure on that simplex.
Every volume below is therefore a truncated power sum over the spectrum.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, NamedTuple, Sequence

import numpy as np
from scipy.special import gammaln

from geoqt.divdiff import require_distinct, truncated_power_sum
from geoqt.errors import DomainError
from geoqt.statespace import HamiltonianSystem, WeightedStateEnsemble

if TYPE_CHECKING:
    from geoqt.sampling import SamplerConfig

log = logging.getLogger(__name__)

WIDE_SHELL_FRACTION = 0.1


class MeasureConvention(str, Enum):
    RAW = "raw"
    NORMALIZED = "normalized"

    @classmethod
    def parse(cls, value) -> "MeasureConvention":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            valid = ", ".join(c.value for c in cls)
            raise DomainError(f"unknown measure convention {value!r} (valid: {valid})") from None


def manifold_volume(dimension: int, convention=MeasureConvention.RAW) -> float:
    """Total volume of CP^{D-1}: pi^{D-1}/(D-1)! raw, 1 normalized."""
    if dimension < 1:
        raise DomainError(f"dimension must be >= 1, got {dimension}")
    if MeasureConvention.parse(convention) is MeasureConvention.NORMALIZED:
        return 1.0
    n = dimension - 1
    return float(math.exp(n * math.log(math.pi) - gammaln(n + 1)))


# ---------------------------------------------------------------------------
# Simplex sections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimplexSection:
    """{x in simplex_n : a . x <= t}, with the vertex at the origin giving a_0 = 0."""

    a: tuple
    t: float

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float).reshape(-1)
        if a.size < 1:
            raise DomainError("section normal needs n >= 1 entries")
        if not np.all(np.isfinite(a)) or not math.isfinite(self.t):
            raise DomainError("section normal and threshold must be finite")
        if np.any(a < 0.0) or np.any(a > 1.0):
            raise DomainError("section normal entries must lie in [0, 1]")
        object.__setattr__(self, "a", tuple(float(v) for v in a))
        object.__setattr__(self, "t", float(self.t))

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def nodes(self) -> np.ndarray:
        return np.concatenate([[0.0], self.a])


def simplex_section_volume(section: SimplexSection) -> float:
    nodes = section.nodes
    require_distinct(nodes)
    n = section.n
    if section.t <= 0.0:
        return 0.0
    if section.t >= nodes.max():
        return 1.0 / math.factorial(n)
    value = truncated_power_sum(nodes, section.t, n) / math.factorial(n)
    return min(max(value, 0.0), 1.0 / math.factorial(n))


def simplex_section_area(section: SimplexSection) -> float:
    """Flat (n-1)-volume of the slice a . x = t; the t-derivative of the section volume."""
    nodes = section.nodes
    require_distinct(nodes)
    n = section.n
    if section.t < 0.0 or section.t > nodes.max():
        return 0.0
    value = truncated_power_sum(nodes, section.t, n - 1) / math.factorial(n - 1)
    return max(value, 0.0)


# ---------------------------------------------------------------------------
# Energy shells
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnergyShell:
    center: float
    width: float

    def __post_init__(self):
        if not (math.isfinite(self.center) and math.isfinite(self.width)):
            raise DomainError("energy shell must be finite")
        if self.width <= 0.0:
            raise DomainError(f"shell width must be positive, got {self.width}")

    @property
    def upper(self) -> float:
        return self.center + self.width


class EntropyValue(NamedTuple):
    """log W, with ``empty`` set (and value -inf) when the shell holds no volume."""

    value: float
    weight: float
    empty: bool


class VolumeRow(NamedTuple):
    energy: float
    volume: float
    dos: float
    weight: float
    entropy: float


def _require_qudit(sys: HamiltonianSystem) -> int:
    if sys.dimension < 2:
        raise DomainError("volumes need D >= 2")
    return sys.dimension - 1


def _scaled_nodes(sys: HamiltonianSystem) -> np.ndarray:
    return (sys.energies - sys.ground_energy) / sys.spread


def _degenerate(sys: HamiltonianSystem, fallback) -> bool:
    if not sys.is_degenerate():
        return False
    if fallback is None:
        sys.require_nondegenerate()
    log.warning("degenerate spectrum (min gap %.3e); using the Monte Carlo estimate", sys.min_gap)
    return True


def cumulative_volume(
    sys: HamiltonianSystem,
    energy: float,
    convention=MeasureConvention.RAW,
    *,
    fallback: "SamplerConfig | None" = None,
) -> float:
    """Fubini-Study volume of {Z : h(Z) <= energy}."""
    n = _require_qudit(sys)
    total = manifold_volume(sys.dimension, convention)
    if _degenerate(sys, fallback):
        from geoqt.sampling import mc_cumulative_volume

        return mc_cumulative_volume(sys, energy, fallback, convention).value
    if energy <= sys.ground_energy:
        return 0.0
    if energy >= sys.max_energy:
        return total
    x = (energy - sys.ground_energy) / sys.spread
    fraction = truncated_power_sum(_scaled_nodes(sys), x, n)
    return total * min(max(fraction, 0.0), 1.0)


def density_of_states(sys: HamiltonianSystem, energy: float, convention=MeasureConvention.RAW) -> float:
    """omega(E) = d cumulative_volume / dE."""
    n = _require_qudit(sys)
    sys.require_nondegenerate()
    if energy < sys.ground_energy or energy > sys.max_energy:
        return 0.0
    x = (energy - sys.ground_energy) / sys.spread
    slope = n * truncated_power_sum(_scaled_nodes(sys), x, n - 1) / sys.spread
    return manifold_volume(sys.dimension, convention) * max(slope, 0.0)


def clamp_shell(sys: HamiltonianSystem, shell: EnergyShell, *, warn: bool = True) -> tuple[float, float]:
    """Intersect [E, E + dE] with the spectral range, warning on clamping or wide shells."""
    lo = max(shell.center, sys.ground_energy)
    hi = min(shell.upper, sys.max_energy)
    if not warn:
        return lo, hi
    if lo != shell.center or hi != shell.upper:
        log.warning(
            "energy shell [%.6g, %.6g] clamped to [%.6g, %.6g]",
            shell.center, shell.upper, lo, hi,
        )
    if shell.width > WIDE_SHELL_FRACTION * sys.spread:
        log.warning(
            "shell width %.6g exceeds %d%% of the spectral range %.6g",
            shell.width, int(WIDE_SHELL_FRACTION * 100), sys.spread,
        )
    return lo, hi


def microcanonical_weight(
    sys: HamiltonianSystem,
    shell: EnergyShell,
    convention=MeasureConvention.RAW,
    *,
    fallback: "SamplerConfig | None" = None,
) -> float:
    """W = Vol(E + dE) - Vol(E) over the clamped shell."""
    _require_qudit(sys)
    lo, hi = clamp_shell(sys, shell)
    if _degenerate(sys, fallback):
        from geoqt.sampling import mc_shell_volume

        return mc_shell_volume(sys, shell, fallback, convention).value
    if hi <= lo:
        return 0.0
    weight = cumulative_volume(sys, hi, convention) - cumulative_volume(sys, lo, convention)
    return max(weight, 0.0)


def statistical_entropy(
    sys: HamiltonianSystem,
    shell: EnergyShell,
    convention=MeasureConvention.RAW,
    *,
    fallback: "SamplerConfig | None" = None,
) -> EntropyValue:
    """Boltzmann entropy S = log W of the shell (k_B = 1)."""
    weight = microcanonical_weight(sys, shell, convention, fallback=fallback)
    if weight <= 0.0:
        return EntropyValue(float("-inf"), weight, True)
    return EntropyValue(math.log(weight), weight, False)


def microcanonical_gibbs_ensemble(sys: HamiltonianSystem, shell: EnergyShell) -> WeightedStateEnsemble:
    """Equal weights on the eigenstates whose energies fall inside the shell."""
    lo, hi = clamp_shell(sys, shell)
    inside = [s for e, s in zip(sys.energies, sys.eigenvectors) if lo <= e <= hi]
    if not inside:
        raise DomainError(f"no eigenvalue inside the shell [{lo:.6g}, {hi:.6g}]")
    return WeightedStateEnsemble.from_pairs([1.0 / len(inside)] * len(inside), inside)


def energy_grid(sys: HamiltonianSystem, num: int) -> np.ndarray:
    if num < 2:
        raise DomainError(f"energy grid needs at least 2 points, got {num}")
    return np.linspace(sys.ground_energy, sys.max_energy, num)


def volume_table(
    sys: HamiltonianSystem,
    energies: Sequence[float],
    shell_width: float,
    convention=MeasureConvention.RAW,
) -> list[VolumeRow]:
    """Rows (E, Vol, omega, W, S) with W and S over [E, E + shell_width]."""
    _require_qudit(sys)
    sys.require_nondegenerate()
    if not shell_width > 0.0:
        raise DomainError(f"shell width must be positive, got {shell_width}")
    if shell_width > WIDE_SHELL_FRACTION * sys.spread:
        log.warning("shell width %.6g exceeds %d%% of the spectral range", shell_width, int(WIDE_SHELL_FRACTION * 100))
    rows = []
    clamped = 0
    for energy in energies:
        energy = float(energy)
        shell = EnergyShell(energy, shell_width)
        lo, hi = clamp_shell(sys, shell, warn=False)
        clamped += (lo, hi) != (shell.center, shell.upper)
        volume = cumulative_volume(sys, energy, convention)
        weight = max(cumulative_volume(sys, hi, convention) - cumulative_volume(sys, lo, convention), 0.0) if hi > lo else 0.0
        rows.append(
            VolumeRow(
                energy=energy,
                volume=volume,
                dos=density_of_states(sys, energy, convention),
                weight=weight,
                entropy=math.log(weight) if weight > 0.0 else float("-inf"),
            )
        )
    if clamped:
        log.warning("%d energy shell(s) clamped to the spectral range [%.6g, %.6g]",
                    clamped, sys.ground_energy, sys.max_energy)
    return rows

