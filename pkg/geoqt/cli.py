# SPDX-License-Identifier: BUSL-1.1
"""CLI argument parsing and command dispatch."""

import argparse
import logging
import sys

from geoqt import __version__
from geoqt.errors import DegeneracyError, DomainError, GeoqtError, LowAcceptanceError, format_degeneracy_error

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3

CLI_FALLBACK_HINT = "rerun with --mc-fallback to use the Monte Carlo estimate"


def _common_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", metavar="PATH", help="Run config file or shipped preset name")
    parent.add_argument("--seed", type=int, help="Sampler seed (overrides config)")
    parent.add_argument("--out", metavar="PATH", help="Write results to PATH instead of stdout")
    parent.add_argument("--format", choices=("csv", "json"), help="Output format (default: from config, csv)")
    parent.add_argument("--quiet", action="store_true", help="Only log errors; no summary table")
    parent.add_argument("-v", "--verbose", action="count", default=0, help="Debug logging")
    return parent


def _run_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--dim", type=int, help="Hilbert-space dimension D (default Hamiltonian diag(0..D-1))")
    parent.add_argument("--beta", type=float, help="Inverse temperature (overrides config)")
    parent.add_argument("--samples", type=int, help="Monte Carlo sample count")
    parent.add_argument("--streams", type=int, help="Independent sampler streams")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geoqt",
        description="geoqt - geometric quantum statistical mechanics on CP^(D-1)",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command")
    common = _common_parent()
    run = _run_parent()
    parents = [common, run]

    # volume
    p_vol = sub.add_parser("volume", parents=parents,
                           help="Cumulative volume, density of states, shell weight and entropy over an energy grid")
    p_vol.add_argument("--mc-fallback", action="store_true",
                       help="Estimate by Monte Carlo when the spectrum is degenerate")

    # dos
    sub.add_parser("dos", parents=parents, help="Density of states over an energy grid")

    # partition
    p_part = sub.add_parser("partition", parents=parents, help="Geometric canonical partition function")
    p_part.add_argument("--mc-fallback", action="store_true",
                        help="Estimate by Monte Carlo for degenerate spectra or negative beta")
    p_part.add_argument("--gibbs", action="store_true", help="Report the Gibbs (von Neumann) ensemble instead")

    # thermo
    p_thermo = sub.add_parser("thermo", parents=parents, help="Q, F, U, H_q and energy variance")
    p_thermo.add_argument("--mc-fallback", action="store_true",
                          help="Estimate by Monte Carlo for degenerate spectra or negative beta")
    p_thermo.add_argument("--gibbs", action="store_true", help="Report the Gibbs (von Neumann) ensemble instead")

    # sample
    p_sample = sub.add_parser("sample", parents=parents, help="Monte Carlo estimates of Q and U")
    p_sample.add_argument("--states", metavar="PATH", help="Also write the canonical samples as CSV")

    # jarzynski
    p_jar = sub.add_parser("jarzynski", parents=parents, help="Driven-protocol work statistics versus Q_f / Q_i")
    p_jar.add_argument("--work-out", metavar="PATH", help="Write per-trajectory work values as CSV")

    # firstlaw
    p_first = sub.add_parser("firstlaw", parents=parents, help="First-law residuals across a small parameter step")
    p_first.add_argument("--mc", action="store_true", help="Also estimate the work term by Monte Carlo")

    # sweep
    p_sweep = sub.add_parser("sweep", parents=parents, help="Gibbs versus geometric predictions across a beta grid")
    p_sweep.add_argument("--workers", type=int, help="Parallel beta evaluations (default: executor default)")

    # grid
    sub.add_parser("grid", parents=parents, help="Geometric canonical density on the qubit (q, chi) grid")

    # bipartite
    sub.add_parser("bipartite", parents=[common], help="Geometric state induced on a subsystem")

    # print-config
    p_print = sub.add_parser("print-config", parents=parents, help="Echo the resolved run config as YAML")
    p_print.add_argument("--list-presets", action="store_true", help="List shipped preset names")

    return parser


def _error(msg: str) -> None:
    print(f"Error: {msg}", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_FAILURE

    from geoqt.console import setup_logging
    setup_logging(quiet=args.quiet, verbose=args.verbose)

    # Lazy import commands to keep startup fast
    from geoqt.commands import (
        cmd_volume, cmd_dos, cmd_partition, cmd_thermo, cmd_sample, cmd_jarzynski,
        cmd_firstlaw, cmd_sweep, cmd_grid, cmd_bipartite, cmd_print_config,
    )
    from geoqt.config import ConfigError

    commands = {
        "volume": cmd_volume,
        "dos": cmd_dos,
        "partition": cmd_partition,
        "thermo": cmd_thermo,
        "sample": cmd_sample,
        "jarzynski": cmd_jarzynski,
        "firstlaw": cmd_firstlaw,
        "sweep": cmd_sweep,
        "grid": cmd_grid,
        "bipartite": cmd_bipartite,
        "print-config": cmd_print_config,
    }
    try:
        commands[args.command](args)
    except ConfigError as exc:
        for e in exc.errors:
            _error(e)
        return EXIT_CONFIG
    except DegeneracyError as exc:
        exc.hint = CLI_FALLBACK_HINT
        print(format_degeneracy_error(exc, f"run '{args.command}'"), file=sys.stderr)
        return EXIT_DEGENERATE
    except DomainError as exc:
        _error(str(exc))
        return EXIT_CONFIG
    except LowAcceptanceError as exc:
        _error(f"{exc}. Hint: {exc.hint}.")
        return EXIT_FAILURE
    except GeoqtError as exc:
        _error(str(exc))
        return EXIT_FAILURE
    except OSError as exc:
        _error(f"{exc.filename or ''}: {exc.strerror}")
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
