# SPDX-License-Identifier: BUSL-1.1
"""Shared plumbing for geoqt subcommands: config resolution and result emission."""

import logging
import sys
from typing import Optional

from geoqt.config import ConfigStore, RunConfig, resource_to_dict, validate_run_config
from geoqt.console import print_summary
from geoqt.output import CommandResult, build_meta, write_result
from geoqt.sampling import SamplerConfig

log = logging.getLogger(__name__)


def apply_overrides(cfg: RunConfig, args, command: str) -> RunConfig:
    """Fold command-line flags into the loaded config; flags win."""
    if getattr(args, "seed", None) is not None:
        cfg.sampler.seed = args.seed
    if getattr(args, "samples", None) is not None:
        cfg.sampler.samples = args.samples
    if getattr(args, "streams", None) is not None:
        cfg.sampler.streams = args.streams
    if getattr(args, "dim", None) is not None:
        if cfg.hamiltonian is not None:
            log.warning("--dim %d given with a configured hamiltonian; the hamiltonian must match", args.dim)
        cfg.dimension = args.dim
    if getattr(args, "beta", None) is not None:
        cfg.beta = args.beta
        if command != "sweep":
            cfg.beta_grid = None
    if getattr(args, "out", None):
        cfg.output.path = args.out
    if getattr(args, "format", None):
        cfg.output.format = args.format
    if getattr(args, "work_out", None):
        cfg.output.work_path = args.work_out
    return cfg


def load_run(args, command: str) -> RunConfig:
    """Load --config (file or preset), apply flags, validate for this command."""
    store = ConfigStore()
    cfg = apply_overrides(store.load(getattr(args, "config", None)), args, command)
    result = validate_run_config(cfg, command)
    for w in result.warnings:
        log.warning(w)
    result.raise_if_invalid()
    return cfg


def sampler_config(cfg: RunConfig) -> SamplerConfig:
    s = cfg.sampler
    return SamplerConfig(seed=s.seed, n_samples=s.samples, n_streams=s.streams)


def fallback_config(cfg: RunConfig, args) -> Optional[SamplerConfig]:
    if getattr(args, "mc_fallback", False):
        return sampler_config(cfg)
    return None


def config_echo(cfg: RunConfig) -> dict:
    return resource_to_dict(cfg)


def make_result(command: str, cfg: RunConfig, columns, rows, *, data=None, extra=None, summary=None) -> CommandResult:
    meta = build_meta(command, config_echo(cfg), cfg.sampler.seed, extra)
    return CommandResult(
        command=command,
        columns=tuple(columns),
        rows=list(rows),
        data=data,
        meta=meta,
        summary=dict(summary or {}),
    )


def emit(result: CommandResult, cfg: RunConfig, args) -> None:
    """Write the result where the config says; summarize on stderr when writing a file."""
    path = cfg.output.path or None
    written = write_result(result, cfg.output.format, path, stream=sys.stdout)
    if written is not None:
        log.info("wrote %s", written)
        if not getattr(args, "quiet", False) and result.summary:
            print_summary(f"geoqt {result.command}", result.summary)
