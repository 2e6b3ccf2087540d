# SPDX-License-Identifier: BUSL-1.1
"""Command implementations for geoqt CLI."""

from geoqt.commands.volume import cmd_volume, cmd_dos
from geoqt.commands.partition import cmd_partition, cmd_thermo
from geoqt.commands.sample import cmd_sample
from geoqt.commands.jarzynski import cmd_jarzynski
from geoqt.commands.firstlaw import cmd_firstlaw
from geoqt.commands.sweep import cmd_sweep, cmd_grid
from geoqt.commands.bipartite import cmd_bipartite
from geoqt.commands.print_config import cmd_print_config
__all__ = [
    "cmd_volume", "cmd_dos", "cmd_partition", "cmd_thermo", "cmd_sample",
    "cmd_jarzynski", "cmd_firstlaw", "cmd_sweep", "cmd_grid", "cmd_bipartite",
    "cmd_print_config",
]
