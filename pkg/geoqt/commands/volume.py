# SPDX-License-Identifier: BUSL-1.1
"""geoqt volume / dos — microcanonical volumes over an energy grid."""

import math

from geoqt.commands.common import emit, fallback_config, load_run, make_result
from geoqt.volumes import (
    EnergyShell,
    MeasureConvention,
    cumulative_volume,
    density_of_states,
    energy_grid,
    manifold_volume,
    microcanonical_weight,
    statistical_entropy,
    volume_table,
)

DEFAULT_SHELL_FRACTION = 0.01
VOLUME_COLUMNS = ("energy", "volume", "dos", "weight", "entropy")


def _shell_width(cfg, sys) -> float:
    if cfg.shell is not None and cfg.shell.width is not None:
        return cfg.shell.width
    return DEFAULT_SHELL_FRACTION * sys.spread


def _fallback_rows(sys, energies, width, convention, fallback):
    """Monte Carlo rows for degenerate spectra; omega has no estimator and is left empty."""
    rows = []
    for energy in energies:
        energy = float(energy)
        weight = microcanonical_weight(sys, EnergyShell(energy, width), convention, fallback=fallback)
        rows.append((
            energy,
            cumulative_volume(sys, energy, convention, fallback=fallback),
            math.nan,
            weight,
            math.log(weight) if weight > 0.0 else -math.inf,
        ))
    return rows


def cmd_volume(args):
    cfg = load_run(args, "volume")
    sys = cfg.system()
    convention = MeasureConvention.parse(cfg.convention)
    energies = energy_grid(sys, cfg.energy_grid.num)
    width = _shell_width(cfg, sys)
    fallback = fallback_config(cfg, args)

    if fallback is not None and sys.is_degenerate():
        rows = _fallback_rows(sys, energies, width, convention, fallback)
    else:
        rows = [tuple(row) for row in volume_table(sys, energies, width, convention)]

    summary = {
        "dimension": sys.dimension,
        "convention": convention.value,
        "total volume": manifold_volume(sys.dimension, convention),
        "shell width": width,
        "rows": len(rows),
    }
    extra = {}
    if cfg.shell is not None and cfg.shell.energy is not None:
        entropy = statistical_entropy(sys, EnergyShell(cfg.shell.energy, width), convention, fallback=fallback)
        extra["shell"] = {"energy": cfg.shell.energy, "width": width, "weight": entropy.weight,
                          "entropy": entropy.value, "empty": entropy.empty}
        summary["shell entropy"] = entropy.value
    emit(make_result("volume", cfg, VOLUME_COLUMNS, rows, extra=extra, summary=summary), cfg, args)


def cmd_dos(args):
    cfg = load_run(args, "dos")
    sys = cfg.system()
    convention = MeasureConvention.parse(cfg.convention)
    energies = energy_grid(sys, cfg.energy_grid.num)
    rows = [(float(e), density_of_states(sys, float(e), convention)) for e in energies]
    summary = {
        "dimension": sys.dimension,
        "convention": convention.value,
        "E_0": sys.ground_energy,
        "E_max": sys.max_energy,
    }
    emit(make_result("dos", cfg, ("energy", "dos"), rows, summary=summary), cfg, args)
