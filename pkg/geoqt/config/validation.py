# SPDX-License-Identifier: BUSL-1.1
"""Validation engine for run configurations.

Each subcommand needs a different subset of RunConfig; validate_run_config
checks that subset and the cross-field rules that the dataclasses alone
cannot express.
"""

import math

from geoqt.errors import DomainError, GeoqtError


class ValidationError(GeoqtError):
    """Raised when configuration validation fails."""
    def __init__(self, errors: list, warnings: list = None):
        self.errors = errors
        self.warnings = warnings or []
        msg = "; ".join(errors)
        super().__init__(msg)


class ConfigError(ValidationError):
    """A run configuration that cannot be executed."""


class ValidationResult:
    """Collects errors and warnings from validation."""
    def __init__(self):
        self.errors = []
        self.warnings = []

    def error(self, msg: str):
        self.errors.append(msg)

    def warn(self, msg: str):
        self.warnings.append(msg)

    @property
    def valid(self) -> bool:
        return len(self.errors) == 0

    def raise_if_invalid(self):
        if not self.valid:
            raise ConfigError(self.errors, self.warnings)


# Which RunConfig sections each subcommand reads.
NEEDS_BETA = {"sample", "jarzynski", "firstlaw", "grid"}
NEEDS_BETA_GRID = {"sweep"}
NEEDS_EITHER = {"partition", "thermo"}
NEEDS_HAMILTONIAN = {"volume", "dos", "partition", "thermo", "sample", "sweep", "grid"}
NEEDS_PROTOCOL = {"jarzynski", "firstlaw"}

CONVENTIONS = ("raw", "normalized")
METHODS = ("quadrature", "mc", "exact")
SCHEDULES = ("constant", "linear", "sudden")
FORMATS = ("csv", "json")


def _check_operator(result: ValidationResult, label: str, spec, dimension):
    if spec is None:
        return None
    try:
        return spec.to_observable(dimension)
    except DomainError as exc:
        result.error(f"{label}: {exc}")
        return None


def _check_temperature(result: ValidationResult, cfg, command: str):
    if command in NEEDS_BETA:
        if cfg.beta is None:
            result.error(f"'{command}' needs beta")
        if cfg.beta_grid is not None:
            result.error(f"'{command}' takes beta, not beta_grid")
    if command in NEEDS_EITHER and (cfg.beta is None) == (cfg.beta_grid is None):
        result.error(f"'{command}' needs exactly one of beta, beta_grid")
    if command in NEEDS_BETA_GRID:
        if cfg.beta_grid is None:
            result.error(f"'{command}' needs beta_grid")
        if cfg.beta is not None:
            result.error(f"'{command}' takes beta_grid, not beta")
    if cfg.beta_grid is not None:
        try:
            betas = cfg.beta_grid.betas()
        except DomainError as exc:
            result.error(f"beta_grid: {exc}")
        else:
            if len(betas) == 0:
                result.error("beta_grid is empty")
            elif min(betas) < 0.0:
                result.error("beta_grid values must be >= 0")
    if cfg.beta is not None and cfg.beta < 0.0 and command not in ("sample", "thermo", "partition"):
        result.error(f"'{command}' needs beta >= 0")


def _check_sampler(result: ValidationResult, sampler):
    if sampler.seed < 0:
        result.error("sampler.seed must be >= 0")
    if sampler.samples < 1:
        result.error("sampler.samples must be >= 1")
    if sampler.streams < 1:
        result.error("sampler.streams must be >= 1")
    elif sampler.streams > sampler.samples:
        result.warn("sampler.streams exceeds sampler.samples; some streams draw nothing")


def _check_protocol(result: ValidationResult, cfg, command: str):
    p = cfg.protocol
    if p is None:
        result.error(f"'{command}' needs a protocol")
        return
    if p.h0 is None or p.v is None:
        result.error("protocol needs h0 and v")
    h0 = _check_operator(result, "protocol.h0", p.h0, cfg.dimension)
    v = _check_operator(result, "protocol.v", p.v, cfg.dimension)
    if h0 is not None and v is not None and h0.dimension != v.dimension:
        result.error(f"protocol.h0 is {h0.dimension}-dimensional, protocol.v is {v.dimension}-dimensional")
    if p.schedule not in SCHEDULES:
        result.error(f"protocol.schedule must be one of {', '.join(SCHEDULES)}, got {p.schedule!r}")
    if command == "jarzynski":
        if p.duration < 0.0:
            result.error("protocol.duration must be >= 0")
        if p.n_steps < 1:
            result.error("protocol.n_steps must be >= 1")
        if p.schedule == "constant" and p.lambda_f != p.lambda_i:
            result.error("a constant schedule needs lambda_f == lambda_i")
    if command == "firstlaw" and cfg.first_law is not None:
        d = cfg.first_law.dlambda
        if d is not None and not d > 0.0:
            result.error("first_law.dlambda must be > 0")


def validate_run_config(cfg, command: str) -> ValidationResult:
    """Check the parts of cfg that the given subcommand reads."""
    result = ValidationResult()

    if cfg.dimension is not None and cfg.dimension < 2:
        result.error(f"dimension must be >= 2, got {cfg.dimension}")
    if cfg.convention not in CONVENTIONS:
        result.error(f"convention must be one of {', '.join(CONVENTIONS)}, got {cfg.convention!r}")
    if cfg.method not in METHODS:
        result.error(f"method must be one of {', '.join(METHODS)}, got {cfg.method!r}")
    if cfg.output.format not in FORMATS:
        result.error(f"output.format must be one of {', '.join(FORMATS)}, got {cfg.output.format!r}")
    _check_sampler(result, cfg.sampler)

    if command in NEEDS_HAMILTONIAN and cfg.hamiltonian is None and cfg.dimension is None:
        result.warn("no hamiltonian or dimension given; using the qubit ladder diag(0, 1)")
    if cfg.hamiltonian is not None:
        _check_operator(result, "hamiltonian", cfg.hamiltonian, cfg.dimension)
    if cfg.observable is not None:
        _check_operator(result, "observable", cfg.observable, cfg.dimension)

    _check_temperature(result, cfg, command)

    if command in NEEDS_PROTOCOL:
        _check_protocol(result, cfg, command)

    if command == "volume" and cfg.shell is not None:
        if cfg.shell.width is not None and not cfg.shell.width > 0.0:
            result.error("shell.width must be > 0 (omit it for 1% of the spectral range)")
    if command in ("volume", "dos") and cfg.energy_grid.num < 2:
        result.error("energy_grid.num must be >= 2")

    if command == "sweep":
        if cfg.method == "quadrature" and cfg.dimension not in (None, 2):
            result.error("method 'quadrature' is implemented for qubits; use 'exact' or 'mc'")
        if cfg.axis is not None and not (0.0 <= cfg.axis.theta <= math.pi):
            result.error("axis.theta must lie in [0, pi]")

    if command == "grid":
        if cfg.grid.num_q < 2 or cfg.grid.num_chi < 2:
            result.error("grid needs at least 2 points per axis")

    if command == "bipartite":
        b = cfg.bipartite
        if b is None:
            result.error("'bipartite' needs a bipartite section")
        else:
            if b.dim_a < 1 or b.dim_b < 1:
                result.error("bipartite.dim_a and dim_b must be >= 1")
            if b.psi is None and not b.random:
                result.error("bipartite needs psi or random: true")
            if b.psi is not None and b.random:
                result.error("bipartite takes psi or random, not both")

    return result
