# SPDX-License-Identifier: BUSL-1.1
"""Process-wide numerical tolerances."""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, replace
from typing import Iterator


@dataclass(frozen=True)
class Tolerances:
    norm: float = 1e-12               # unit norm of a ProjectiveState
    hermitian: float = 1e-12          # |M - M^H| entrywise
    weights: float = 1e-10            # ensemble weights sum to one
    reconstruction: float = 1e-10     # eigendecomposition round trip (Frobenius)
    bipartite_norm: float = 1e-8      # sum |psi|^2 == 1 for bipartite input
    zero_weight: float = 1e-14        # bipartite columns dropped below this
    degeneracy: float = 1e-9          # relative to E_{D-1} - E_0
    confluent: float = 1e-6           # relative gap below which closed forms go confluent
    beta_cap: float = 1e6             # beta * spread above which the asymptotic form is used
    same_ray: float = 1e-10           # 1 - |<a|b>| for ensemble collapse


_current = Tolerances()


def get_tolerances() -> Tolerances:
    return _current


def set_tolerances(**overrides) -> Tolerances:
    """Replace the global tolerances; returns the previous value."""
    global _current
    previous = _current
    _current = replace(_current, **overrides)
    return previous


@contextmanager
def tolerance_overrides(**overrides) -> Iterator[Tolerances]:
    global _current
    previous = set_tolerances(**overrides)
    try:
        yield _current
    finally:
        _current = previous
