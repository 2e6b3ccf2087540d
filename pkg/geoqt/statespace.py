# SPDX-License-Identifier: BUSL-1.1
"""Pure states on CP^{D-1}, Hermitian observables, charts and geometric states.

Amplitude vectors are stored gauge-fixed: unit norm, with the first
component of largest modulus real and nonnegative. Two vectors that differ
only by a global phase therefore map to the same ProjectiveState.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.special import entr

from geoqt.errors import DegeneracyError, DomainError
from geoqt.tolerances import get_tolerances

log = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
_TIE = 1e-12

PAULI = {
    "i": np.eye(2, dtype=np.complex128),
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


# ---------------------------------------------------------------------------
# [re, im] pair encoding
# ---------------------------------------------------------------------------

def complex_to_pairs(values) -> list:
    """Nested lists of [re, im] pairs, the JSON/YAML encoding of complex arrays."""
    arr = np.asarray(values, dtype=np.complex128)
    if arr.ndim == 0:
        return [float(arr.real), float(arr.imag)]
    return [complex_to_pairs(v) for v in arr]


def pairs_to_complex(obj) -> np.ndarray:
    """Inverse of complex_to_pairs. Plain real numbers are accepted as well."""
    def convert(item):
        if isinstance(item, (int, float)):
            return complex(item)
        if isinstance(item, (list, tuple)):
            if len(item) == 2 and all(isinstance(x, (int, float)) for x in item):
                return complex(float(item[0]), float(item[1]))
            return [convert(x) for x in item]
        raise DomainError(f"cannot read complex value from {item!r}")

    try:
        return np.asarray(convert(obj), dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"ragged or malformed complex array: {exc}") from exc


# ---------------------------------------------------------------------------
# Projective states
# ---------------------------------------------------------------------------

def _as_vector(raw) -> np.ndarray:
    v = np.asarray(raw, dtype=np.complex128)
    if v.ndim != 1 or v.size == 0:
        raise DomainError(f"state must be a nonempty vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise DomainError("state has non-finite amplitudes")
    return v


def _gauge_index(moduli: np.ndarray) -> int:
    top = moduli.max(axis=-1, keepdims=True)
    return np.argmax(moduli >= top * (1.0 - _TIE), axis=-1)


@dataclass(frozen=True, eq=False)
class ProjectiveState:
    """A point of CP^{D-1} held as a gauge-fixed unit vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        v = _as_vector(self.amplitudes).copy()
        tol = get_tolerances().norm
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > tol:
            raise DomainError(f"state norm {norm:.17g} differs from 1")
        k = int(_gauge_index(np.abs(v)))
        if abs(v[k].imag) > tol or v[k].real < -tol:
            raise DomainError("state is not gauge-fixed; use normalize_gauge()")
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    @property
    def dimension(self) -> int:
        return int(self.amplitudes.size)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def overlap(self, other: "ProjectiveState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "ProjectiveState") -> float:
        return abs(self.overlap(other)) ** 2

    def same_ray(self, other: "ProjectiveState", tol: float | None = None) -> bool:
        if other.dimension != self.dimension:
            return False
        tol = get_tolerances().same_ray if tol is None else tol
        return abs(self.overlap(other)) >= 1.0 - tol

    def __repr__(self) -> str:
        return f"ProjectiveState(D={self.dimension}, amplitudes={np.array2string(self.amplitudes, precision=6)})"


def normalize_gauge(raw) -> ProjectiveState:
    """Map any nonzero vector to its canonical representative."""
    v = _as_vector(raw)
    norm = np.linalg.norm(v)
    if norm == 0.0 or not np.isfinite(norm):
        raise DomainError("cannot normalize the zero vector")
    v = v / norm
    moduli = np.abs(v)
    k = int(_gauge_index(moduli))
    v = v * (np.conj(v[k]) / moduli[k])
    v[k] = moduli[k]
    return ProjectiveState(v)


def normalize_gauge_rows(rows) -> np.ndarray:
    """Vectorized normalize_gauge over the rows of an (N, D) array."""
    z = np.asarray(rows, dtype=np.complex128)
    if z.ndim != 2:
        raise DomainError(f"expected an (N, D) array, got shape {z.shape}")
    norms = np.linalg.norm(z, axis=1)
    if np.any(norms == 0.0):
        raise DomainError("cannot normalize the zero vector")
    z = z / norms[:, None]
    moduli = np.abs(z)
    idx = _gauge_index(moduli)
    rows_ix = np.arange(z.shape[0])
    pivot = z[rows_ix, idx]
    z = z * (np.conj(pivot) / moduli[rows_ix, idx])[:, None]
    z[rows_ix, idx] = moduli[rows_ix, idx]
    return z


# ---------------------------------------------------------------------------
# Observables
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HermitianObservable:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DomainError(f"observable must be a square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise DomainError("observable has non-finite entries")
        scale = max(1.0, float(np.abs(m).max()))
        if np.abs(m - m.conj().T).max() > get_tolerances().hermitian * scale:
            raise DomainError("matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dimension(self) -> int:
        return int(self.matrix.shape[0])

    @classmethod
    def diagonal(cls, values: Sequence[float]) -> "HermitianObservable":
        return cls(np.diag(np.asarray(values, dtype=float)))

    @classmethod
    def pauli_sum(cls, i: float = 0.0, x: float = 0.0, y: float = 0.0, z: float = 0.0) -> "HermitianObservable":
        """i*1 + x*sigma_x + y*sigma_y + z*sigma_z on a qubit."""
        return cls(i * PAULI["i"] + x * PAULI["x"] + y * PAULI["y"] + z * PAULI["z"])

    @classmethod
    def from_pairs(cls, rows) -> "HermitianObservable":
        return cls(pairs_to_complex(rows))

    def to_pairs(self) -> list:
        return complex_to_pairs(self.matrix)

    def combine(self, other: "HermitianObservable", coefficient: float = 1.0) -> "HermitianObservable":
        """self + coefficient * other."""
        if other.dimension != self.dimension:
            raise DomainError(f"dimension mismatch: {self.dimension} vs {other.dimension}")
        return HermitianObservable(self.matrix + coefficient * other.matrix)


def expectation(observable: HermitianObservable, state: ProjectiveState) -> float:
    """<psi|O|psi>, real for Hermitian O."""
    if observable.dimension != state.dimension:
        raise DomainError(
            f"dimension mismatch: observable is {observable.dimension}, state is {state.dimension}"
        )
    z = state.amplitudes
    return float(np.real(np.vdot(z, observable.matrix @ z)))


def expectations(observable: HermitianObservable, rows) -> np.ndarray:
    """Expectation values for each row of an (N, D) amplitude array."""
    z = np.asarray(rows, dtype=np.complex128)
    if z.ndim != 2 or z.shape[1] != observable.dimension:
        raise DomainError(f"expected rows of length {observable.dimension}, got shape {z.shape}")
    return np.real(np.einsum("ni,ij,nj->n", z.conj(), observable.matrix, z))


@dataclass(frozen=True, eq=False)
class HamiltonianSystem:
    """A Hamiltonian with its cached eigendecomposition.

    Energies ascend. ``basis`` holds the gauge-fixed eigenvectors as columns.
    Degenerate spectra are accepted here; the closed forms that need distinct
    levels call require_nondegenerate().
    """

    observable: HermitianObservable
    energies: np.ndarray
    basis: np.ndarray
    eigenvectors: tuple

    @classmethod
    def from_observable(cls, observable: HermitianObservable) -> "HamiltonianSystem":
        energies, vecs = np.linalg.eigh(observable.matrix)
        states = tuple(normalize_gauge(vecs[:, k]) for k in range(vecs.shape[1]))
        basis = np.column_stack([s.amplitudes for s in states])
        recon = (basis * energies) @ basis.conj().T
        err = np.linalg.norm(recon - observable.matrix)
        scale = max(1.0, float(np.linalg.norm(observable.matrix)))
        if err > get_tolerances().reconstruction * scale:
            raise DomainError(f"eigendecomposition failed to reconstruct H (error {err:.3g})")
        energies = np.asarray(energies, dtype=float)
        energies.setflags(write=False)
        basis.setflags(write=False)
        return cls(observable, energies, basis, states)

    @classmethod
    def from_matrix(cls, matrix) -> "HamiltonianSystem":
        return cls.from_observable(HermitianObservable(matrix))

    @classmethod
    def from_energies(cls, energies: Sequence[float]) -> "HamiltonianSystem":
        return cls.from_observable(HermitianObservable.diagonal(energies))

    @property
    def dimension(self) -> int:
        return int(self.energies.size)

    @property
    def ground_energy(self) -> float:
        return float(self.energies[0])

    @property
    def max_energy(self) -> float:
        return float(self.energies[-1])

    @property
    def spread(self) -> float:
        return float(self.energies[-1] - self.energies[0])

    @property
    def min_gap(self) -> float:
        if self.dimension < 2:
            return float("inf")
        return float(np.diff(self.energies).min())

    def is_degenerate(self) -> bool:
        if self.dimension < 2:
            return False
        return self.min_gap <= get_tolerances().degeneracy * self.spread

    def require_nondegenerate(self) -> None:
        if self.is_degenerate():
            raise DegeneracyError(self.min_gap, get_tolerances().degeneracy * self.spread)

    def energy(self, state: ProjectiveState) -> float:
        return expectation(self.observable, state)

    def in_eigenbasis(self, observable: HermitianObservable) -> np.ndarray:
        if observable.dimension != self.dimension:
            raise DomainError(f"dimension mismatch: {observable.dimension} vs {self.dimension}")
        return self.basis.conj().T @ observable.matrix @ self.basis

    def propagator(self, t: float) -> np.ndarray:
        """exp(-i H t) from the cached decomposition."""
        phases = np.exp(-1j * self.energies * t)
        return (self.basis * phases) @ self.basis.conj().T


# ---------------------------------------------------------------------------
# Probability-phase chart
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProbPhaseCoords:
    """(p_1..p_{D-1}, nu_1..nu_{D-1}); phases are relative to the first component."""

    probs: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).reshape(-1)
        nu = np.asarray(self.phases, dtype=float).reshape(-1)
        if p.size != nu.size or p.size == 0:
            raise DomainError("probs and phases must be nonempty and of equal length")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(nu))):
            raise DomainError("coordinates must be finite")
        tol = get_tolerances().norm
        if np.any(p < -tol) or p.sum() > 1.0 + tol:
            raise DomainError("probabilities must be nonnegative with sum <= 1")
        p = np.clip(p, 0.0, 1.0)
        nu = np.mod(nu, TWO_PI)
        nu[nu >= TWO_PI] = 0.0
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "phases", nu)

    @property
    def dimension(self) -> int:
        return int(self.probs.size + 1)

    @property
    def p0(self) -> float:
        return max(0.0, 1.0 - float(self.probs.sum()))


def to_prob_phase(state: ProjectiveState) -> ProbPhaseCoords:
    z = state.amplitudes
    if z.size < 2:
        raise DomainError("the probability-phase chart needs D >= 2")
    p = np.abs(z[1:]) ** 2
    z0 = z[0]
    rel = z[1:] * np.conj(z0) if abs(z0) > 0 else z[1:]
    nu = np.mod(np.angle(rel), TWO_PI)
    nu[p == 0.0] = 0.0
    return ProbPhaseCoords(p, nu)


def from_prob_phase(coords: ProbPhaseCoords) -> ProjectiveState:
    z = np.empty(coords.dimension, dtype=np.complex128)
    z[0] = np.sqrt(coords.p0)
    z[1:] = np.sqrt(coords.probs) * np.exp(1j * coords.phases)
    return normalize_gauge(z)


def qubit_chart(state: ProjectiveState) -> tuple[float, float]:
    """(q, chi) for a qubit: q = |z_1|^2, chi = arg(z_1 / z_0) in (-pi, pi]."""
    if state.dimension != 2:
        raise DomainError("qubit_chart needs D == 2")
    z0, z1 = state.amplitudes
    q = float(abs(z1) ** 2)
    chi = float(np.angle(z1 * np.conj(z0))) if abs(z0) > 0 else float(np.angle(z1))
    return q, chi


def from_qubit_chart(q: float, chi: float) -> ProjectiveState:
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"q must lie in [0, 1], got {q}")
    return normalize_gauge([np.sqrt(1.0 - q), np.sqrt(q) * np.exp(1j * chi)])


# ---------------------------------------------------------------------------
# Discrete geometric states
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WeightedStateEnsemble:
    """Finite list of (weight, state) pairs with weights summing to one."""

    entries: tuple

    def __post_init__(self):
        entries = tuple((float(w), s) for w, s in self.entries)
        if not entries:
            raise DomainError("ensemble must have at least one entry")
        dims = {s.dimension for _, s in entries}
        if len(dims) != 1:
            raise DomainError(f"ensemble states have mixed dimensions {sorted(dims)}")
        weights = np.array([w for w, _ in entries])
        if np.any(weights < 0.0) or not np.all(np.isfinite(weights)):
            raise DomainError("ensemble weights must be finite and nonnegative")
        if abs(weights.sum() - 1.0) > get_tolerances().weights:
            raise DomainError(f"ensemble weights sum to {weights.sum():.17g}, not 1")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_pairs(cls, weights: Iterable[float], states: Iterable[ProjectiveState]) -> "WeightedStateEnsemble":
        return cls(tuple(zip(weights, states)))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[tuple[float, ProjectiveState]]:
        return iter(self.entries)

    @property
    def dimension(self) -> int:
        return self.entries[0][1].dimension

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.entries])

    @property
    def states(self) -> tuple:
        return tuple(s for _, s in self.entries)

    def collapse(self, tol: float | None = None) -> "WeightedStateEnsemble":
        """Merge entries that lie on the same ray, summing their weights."""
        merged: list[list] = []
        for w, s in self.entries:
            for slot in merged:
                if slot[1].same_ray(s, tol):
                    slot[0] += w
                    break
            else:
                merged.append([w, s])
        return WeightedStateEnsemble(tuple((w, s) for w, s in merged))


def partial_trace_b(psi_ab) -> np.ndarray:
    """rho^A = Tr_B |psi><psi| for psi given as a (d_A, d_B) array."""
    psi = np.asarray(psi_ab, dtype=np.complex128)
    return psi @ psi.conj().T


def bipartite_geometric_state(psi_ab) -> WeightedStateEnsemble:
    """Geometric state induced on A by the computational basis of B.

    Column k of psi is p_k^{1/2} |chi_k>; columns with p_k below the
    zero-weight tolerance are dropped. Entries are not merged, see collapse().
    """
    psi = np.asarray(psi_ab, dtype=np.complex128)
    if psi.ndim != 2 or min(psi.shape) < 1:
        raise DomainError(f"bipartite state must be a (d_A, d_B) array, got shape {psi.shape}")
    if not np.all(np.isfinite(psi)):
        raise DomainError("bipartite state has non-finite amplitudes")
    tols = get_tolerances()
    total = float(np.sum(np.abs(psi) ** 2))
    if abs(total - 1.0) > tols.bipartite_norm:
        raise DomainError(f"bipartite state norm^2 is {total:.17g}, not 1")

    p = np.sum(np.abs(psi) ** 2, axis=0)
    keep = np.flatnonzero(p > tols.zero_weight)
    dropped = p.size - keep.size
    if dropped:
        log.debug("dropping %d zero-weight columns of B", dropped)
    weights = p[keep] / p[keep].sum()
    states = [normalize_gauge(psi[:, k]) for k in keep]
    return WeightedStateEnsemble.from_pairs(weights, states)


def ensemble_density_matrix(ensemble: WeightedStateEnsemble) -> np.ndarray:
    z = np.stack([s.amplitudes for s in ensemble.states])
    rho = (z.T * ensemble.weights) @ z.conj()
    return 0.5 * (rho + rho.conj().T)


def ensemble_entropy(ensemble: WeightedStateEnsemble) -> float:
    """Von Neumann entropy of the ensemble's density matrix (nats)."""
    evals = np.clip(np.linalg.eigvalsh(ensemble_density_matrix(ensemble)), 0.0, None)
    return float(np.sum(entr(evals)))


def state_to_dict(state: ProjectiveState) -> dict:
    return {"amplitudes": complex_to_pairs(state.amplitudes)}


def state_from_dict(data: dict) -> ProjectiveState:
    if not isinstance(data, dict) or "amplitudes" not in data:
        raise DomainError("state entry needs an 'amplitudes' list")
    return normalize_gauge(pairs_to_complex(data["amplitudes"]))


def ensemble_to_dicts(ensemble: WeightedStateEnsemble) -> list[dict]:
    return [{"weight": w, **state_to_dict(s)} for w, s in ensemble]


def ensemble_from_dicts(items: Sequence[dict]) -> WeightedStateEnsemble:
    try:
        return WeightedStateEnsemble.from_pairs(
            [float(item["weight"]) for item in items],
            [state_from_dict(item) for item in items],
        )
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed ensemble entry: {exc}") from exc
