# SPDX-License-Identifier: BUSL-1.1
"""Resource dataclasses for geoqt run configuration.

A run is one YAML (or JSON) document with apiVersion, kind, metadata and
spec fields. A bare mapping of RunConfig fields is accepted as well.
"""

import math
import typing
from dataclasses import dataclass, field, fields, is_dataclass
from typing import Optional, Union

import numpy as np

from geoqt.errors import DomainError
from geoqt.statespace import HamiltonianSystem, HermitianObservable, pairs_to_complex


class ResourceError(ValueError):
    """A document does not match the RunConfig grammar."""


# ── Operators ────────────────────────────────────────────────────────────

@dataclass
class PauliSumSpec:
    identity: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0


@dataclass
class OperatorSpec:
    """Exactly one of matrix, pauli_sum, diagonal."""
    matrix: Optional[list] = None           # [[[re, im], ...], ...] row-major
    pauli_sum: Optional[PauliSumSpec] = None
    diagonal: Optional[list] = None

    def given(self) -> list:
        return [f.name for f in fields(self) if getattr(self, f.name) is not None]

    def to_observable(self, dimension: Optional[int] = None) -> HermitianObservable:
        kinds = self.given()
        if len(kinds) != 1:
            raise DomainError(f"operator needs exactly one of matrix, pauli_sum, diagonal (got {kinds or 'none'})")
        if self.pauli_sum is not None:
            p = self.pauli_sum
            obs = HermitianObservable.pauli_sum(p.identity, p.x, p.y, p.z)
        elif self.diagonal is not None:
            obs = HermitianObservable.diagonal([float(v) for v in self.diagonal])
        else:
            obs = HermitianObservable(pairs_to_complex(self.matrix))
        if dimension is not None and obs.dimension != dimension:
            raise DomainError(f"operator is {obs.dimension}x{obs.dimension}, dimension is {dimension}")
        return obs


def default_hamiltonian(dimension: int) -> OperatorSpec:
    return OperatorSpec(diagonal=[float(k) for k in range(dimension)])


# ── Run parameters ───────────────────────────────────────────────────────

@dataclass
class BetaGridSpec:
    start: Optional[float] = None
    stop: Optional[float] = None
    num: Optional[int] = None
    values: Optional[list] = None

    def betas(self) -> np.ndarray:
        if self.values is not None:
            return np.asarray([float(v) for v in self.values])
        if None in (self.start, self.stop, self.num):
            raise DomainError("beta_grid needs start, stop and num, or an explicit list")
        return np.linspace(float(self.start), float(self.stop), int(self.num))


@dataclass
class SamplerSpec:
    seed: int = 0
    samples: int = 100_000
    streams: int = 1


@dataclass
class ShellSpec:
    energy: Optional[float] = None
    width: Optional[float] = None


@dataclass
class EnergyGridSpec:
    num: int = 101


@dataclass
class AxisSpec:
    theta: float = 0.0
    phi: float = 0.0


@dataclass
class ProtocolSpec:
    h0: Optional[OperatorSpec] = None
    v: Optional[OperatorSpec] = None
    schedule: str = "linear"        # constant | linear | sudden
    lambda_i: float = 0.0
    lambda_f: float = 1.0
    duration: float = 1.0
    n_steps: int = 1000


@dataclass
class FirstLawSpec:
    lambda0: float = 0.0
    dlambda: Optional[float] = None


@dataclass
class BipartiteSpec:
    dim_a: int = 2
    dim_b: int = 2
    psi: Optional[list] = None      # [[[re, im], ...], ...] as dim_a x dim_b amplitudes
    random: bool = False

    def amplitudes(self, rng: Optional[np.random.Generator] = None) -> np.ndarray:
        if self.psi is not None:
            psi = pairs_to_complex(self.psi)
            if psi.shape != (self.dim_a, self.dim_b):
                raise DomainError(f"psi must be {self.dim_a}x{self.dim_b}, got {psi.shape}")
            return psi
        if not self.random:
            raise DomainError("bipartite needs psi or random: true")
        rng = rng or np.random.default_rng()
        shape = (self.dim_a, self.dim_b)
        psi = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        return psi / np.linalg.norm(psi)


@dataclass
class GridSpec:
    num_q: int = 100
    num_chi: int = 100


@dataclass
class OutputSpec:
    format: str = "csv"             # csv | json
    path: str = ""
    work_path: str = ""


@dataclass
class RunConfig:
    """Everything a geoqt subcommand reads; fields a command ignores may be absent."""
    name: str = ""
    dimension: Optional[int] = None
    hamiltonian: Optional[OperatorSpec] = None
    beta: Optional[float] = None
    beta_grid: Optional[BetaGridSpec] = None
    convention: str = "raw"         # raw | normalized
    sampler: SamplerSpec = field(default_factory=SamplerSpec)
    shell: Optional[ShellSpec] = None
    energy_grid: EnergyGridSpec = field(default_factory=EnergyGridSpec)
    observable: Optional[OperatorSpec] = None
    axis: Optional[AxisSpec] = None
    method: str = "quadrature"      # quadrature | mc | exact
    protocol: Optional[ProtocolSpec] = None
    first_law: Optional[FirstLawSpec] = None
    bipartite: Optional[BipartiteSpec] = None
    grid: GridSpec = field(default_factory=GridSpec)
    output: OutputSpec = field(default_factory=OutputSpec)

    def resolved_dimension(self) -> int:
        if self.dimension is not None:
            return int(self.dimension)
        if self.hamiltonian is not None:
            return self.hamiltonian.to_observable().dimension
        return 2

    def hamiltonian_spec(self) -> OperatorSpec:
        return self.hamiltonian or default_hamiltonian(self.resolved_dimension())

    def system(self) -> HamiltonianSystem:
        obs = self.hamiltonian_spec().to_observable(self.resolved_dimension())
        return HamiltonianSystem.from_observable(obs)

    def observable_operator(self) -> HermitianObservable:
        if self.observable is not None:
            return self.observable.to_observable(self.resolved_dimension())
        if self.resolved_dimension() == 2:
            return HermitianObservable.pauli_sum(z=1.0)
        raise DomainError("observable is required for D > 2")


# ── Serialization helpers ────────────────────────────────────────────────

API_VERSION = "geoqt/v1"
KIND = "RunConfig"


def camel_case(name: str) -> str:
    parts = name.split("_")
    return parts[0] + "".join(p.capitalize() for p in parts[1:])


def resource_to_dict(config: RunConfig) -> dict:
    """Envelope dict with None fields dropped, suitable for yaml.dump."""
    spec = _dataclass_to_dict(config)
    name = spec.pop("name", "")
    return {
        "apiVersion": API_VERSION,
        "kind": KIND,
        "metadata": {"name": name},
        "spec": spec,
    }


def resource_from_dict(data) -> RunConfig:
    """Parse an enveloped or bare document into a RunConfig."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ResourceError(f"config must be a mapping, got {type(data).__name__}")
    if "kind" in data or "apiVersion" in data:
        kind = data.get("kind", "")
        if kind != KIND:
            raise ResourceError(f"Unknown resource kind: {kind!r} (expected {KIND})")
        version = data.get("apiVersion", API_VERSION)
        if version != API_VERSION:
            raise ResourceError(f"Unsupported apiVersion: {version!r} (expected {API_VERSION})")
        extra = sorted(set(data) - {"apiVersion", "kind", "metadata", "spec"})
        if extra:
            raise ResourceError(f"unknown top-level keys {extra} (valid: apiVersion, kind, metadata, spec)")
        spec = dict(data.get("spec") or {})
        name = (data.get("metadata") or {}).get("name", "")
    else:
        spec = dict(data)
        name = spec.pop("name", "")
    spec["name"] = name
    return _dict_to_dataclass(RunConfig, spec, "spec")


def _dataclass_to_dict(obj):
    """Recursively convert a dataclass to a plain dict, skipping unset fields."""
    if not is_dataclass(obj):
        return obj
    result = {}
    for f in fields(obj):
        val = getattr(obj, f.name)
        if val is None:
            continue
        if is_dataclass(val):
            val = _dataclass_to_dict(val)
        elif isinstance(val, list):
            val = [_dataclass_to_dict(v) for v in val]
        result[f.name] = val
    return result


def _unwrap_optional(tp):
    if typing.get_origin(tp) is Union:
        args = [a for a in typing.get_args(tp) if a is not type(None)]
        if len(args) == 1:
            return args[0]
    return tp


def _coerce(tp, val, where: str):
    if val is None:
        return None
    if tp is bool:
        if not isinstance(val, bool):
            raise ResourceError(f"{where}: expected true/false, got {val!r}")
        return val
    if tp is int:
        if isinstance(val, bool) or not isinstance(val, (int, float)) or float(val) != int(val):
            raise ResourceError(f"{where}: expected an integer, got {val!r}")
        return int(val)
    if tp is float:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ResourceError(f"{where}: expected a number, got {val!r}")
        if not math.isfinite(float(val)):
            raise ResourceError(f"{where}: expected a finite number, got {val!r}")
        return float(val)
    if tp is str:
        if not isinstance(val, str):
            raise ResourceError(f"{where}: expected a string, got {val!r}")
        return val
    if tp is list:
        if not isinstance(val, list):
            raise ResourceError(f"{where}: expected a list, got {val!r}")
        return val
    return val


def _dict_to_dataclass(cls, data, where: str):
    """Construct a dataclass from a dict, accepting snake_case or camelCase keys.

    Unknown keys are an error naming the valid keys of that level.
    """
    if cls is BetaGridSpec and isinstance(data, list):
        data = {"values": data}
    if not isinstance(data, dict):
        raise ResourceError(f"{where}: expected a mapping, got {data!r}")

    hints = typing.get_type_hints(cls)
    field_names = [f.name for f in fields(cls)]
    alias_map = {}
    for name in field_names:
        alias_map[name] = name
        alias_map[camel_case(name)] = name

    unknown = sorted(str(k) for k in data if k not in alias_map)
    if unknown:
        valid = ", ".join(n for n in field_names if n != "name" or where != "spec")
        raise ResourceError(f"{where}: unknown keys {unknown} (valid: {valid})")

    kwargs = {}
    for key, val in data.items():
        field_name = alias_map[key]
        if field_name in kwargs:
            raise ResourceError(f"{where}: {field_name} given twice")
        tp = _unwrap_optional(hints[field_name])
        path = f"{where}.{field_name}"
        if is_dataclass(tp) and val is not None:
            kwargs[field_name] = _dict_to_dataclass(tp, val, path)
        else:
            kwargs[field_name] = _coerce(tp, val, path)
    return cls(**kwargs)
