# SPDX-License-Identifier: BUSL-1.1
"""Exception types shared by the library and the CLI."""

from __future__ import annotations


MC_FALLBACK_HINT = (
    "pass a SamplerConfig as `fallback` (or run the `sample` command) "
    "to use the Monte Carlo estimate instead"
)

IMPORTANCE_HINT = (
    "use sample_canonical_weighted() for importance-reweighted estimates "
    "at this inverse temperature"
)


class GeoqtError(Exception):
    """Base class for geoqt errors."""


class DomainError(GeoqtError, ValueError):
    """Raised when an input lies outside an operation's domain."""


class DegeneracyError(GeoqtError, ArithmeticError):
    """Raised when a closed form would divide by a vanishing eigenvalue gap."""

    def __init__(self, min_gap: float, tolerance: float, hint: str = MC_FALLBACK_HINT):
        self.min_gap = min_gap
        self.tolerance = tolerance
        self.hint = hint
        super().__init__(
            f"spectrum is degenerate: min gap {min_gap:.3e} <= tolerance {tolerance:.3e}"
        )


class LowAcceptanceError(GeoqtError, RuntimeError):
    """Raised when the rejection sampler cannot make progress."""

    def __init__(self, acceptance_rate: float, proposed: int, hint: str = IMPORTANCE_HINT):
        self.acceptance_rate = acceptance_rate
        self.proposed = proposed
        self.hint = hint
        super().__init__(
            f"rejection acceptance {acceptance_rate:.3e} after {proposed} proposals"
        )


def format_degeneracy_error(exc: DegeneracyError, action: str) -> str:
    """Render a consistent degeneracy message for the CLI."""
    parts = [f"Error: cannot {action}: {exc}."]
    if exc.hint:
        parts.append(f"Hint: {exc.hint}.")
    return " ".join(parts)
