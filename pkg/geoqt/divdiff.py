# SPDX-License-Identifier: BUSL-1.1
"""Divided differences behind the closed-form volumes and partition functions.

Two families live here:

* truncated power sums  sum_k (x - x_k)_+^m / prod_{j != k} (x_j - x_k),
  the kernel of every simplex-section and energy-shell volume;
* divided differences of exp over the nodes -beta * e_k, together with their
  first two beta-derivatives, which give log Q, U and var(h).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm, expm_frechet

from geoqt.errors import DegeneracyError, DomainError
from geoqt.tolerances import get_tolerances

log = logging.getLogger(__name__)


def require_distinct(nodes) -> None:
    """Raise DegeneracyError when two nodes are closer than the degeneracy tolerance."""
    x = np.sort(np.asarray(nodes, dtype=float))
    if x.size < 2:
        return
    spread = float(x[-1] - x[0])
    gap = float(np.diff(x).min())
    tolerance = get_tolerances().degeneracy * spread
    if gap <= tolerance:
        raise DegeneracyError(gap, tolerance)


# ---------------------------------------------------------------------------
# Truncated power sums
# ---------------------------------------------------------------------------

def _truncated_power_terms(nodes: np.ndarray, x: float, power: int) -> float:
    diff = x - nodes
    active = np.flatnonzero(diff >= 0.0) if power == 0 else np.flatnonzero(diff > 0.0)
    terms = []
    for k in sorted(active, key=lambda i: -diff[i]):
        denom = float(np.prod(np.delete(nodes, k) - nodes[k]))
        terms.append(diff[k] ** power / denom)
    return math.fsum(terms)


def truncated_power_sum(nodes, x: float, power: int, *, reflect: bool = True) -> float:
    """sum_k (x - x_k)_+^power / prod_{j != k} (x_j - x_k).

    ``power`` is n = len(nodes) - 1 (volume) or n - 1 (its x-derivative up to
    the factor n). Power 0 uses the closed Heaviside step. Above the midpoint
    of the nodes the mirrored sum over -nodes is evaluated instead, so that
    only the nodes below x contribute.
    """
    x_nodes = np.asarray(nodes, dtype=float)
    n = x_nodes.size - 1
    if n < 1:
        raise DomainError("need at least two nodes")
    if power not in (n, n - 1):
        raise DomainError(f"power must be {n} or {n - 1}, got {power}")
    if reflect and x > 0.5 * (x_nodes.min() + x_nodes.max()):
        mirrored = _truncated_power_terms(-x_nodes, -x, power)
        return 1.0 - mirrored if power == n else mirrored
    return _truncated_power_terms(x_nodes, x, power)


# ---------------------------------------------------------------------------
# Divided differences of exp
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpDividedDifference:
    """log G(beta) and its beta-derivatives, G = exp[-beta e_0, ..., -beta e_n].

    With nodes shifted so that e_0 = 0, the geometric partition function is
    Q = pi^n e^{-beta E_0} G(beta) in the raw measure.
    """

    log_value: float
    d1: float
    d2: float
    method: str


def _bidiagonal(offsets: np.ndarray, beta: float) -> np.ndarray:
    size = offsets.size
    b = np.diag(-beta * offsets).astype(float)
    b[np.arange(size - 1), np.arange(1, size)] = 1.0
    return b


def _two_level(gap: float, beta: float) -> ExpDividedDifference:
    x = beta * gap
    if x == 0.0:
        return ExpDividedDifference(0.0, -0.5 * gap, gap * gap / 12.0, "two-level")
    if x < 1e-2:
        x2 = x * x
        slope = -0.5 + x / 12.0 - x * x2 / 720.0 + x2 * x2 * x / 30240.0
        curvature = 1.0 / 12.0 - x2 / 240.0 + x2 * x2 / 6048.0
    else:
        slope = 1.0 / math.expm1(x) - 1.0 / x
        half = 0.5 * x
        curvature = 1.0 / (x * x) - (0.0 if half > 350.0 else 1.0 / (4.0 * math.sinh(half) ** 2))
    log_value = math.log(-math.expm1(-x)) - math.log(x)
    return ExpDividedDifference(log_value, gap * slope, gap * gap * curvature, "two-level")


def _pole_sum(offsets: np.ndarray, beta: float) -> ExpDividedDifference:
    n = offsets.size - 1
    s0, s1, s2 = [], [], []
    for k in range(offsets.size):
        c = 1.0 / float(np.prod(np.delete(offsets, k) - offsets[k]))
        w = c * math.exp(-beta * offsets[k])
        s0.append(w)
        s1.append(w * offsets[k])
        s2.append(w * offsets[k] ** 2)
    S0, S1, S2 = math.fsum(s0), math.fsum(s1), math.fsum(s2)
    if S0 <= 0.0:
        raise ArithmeticError("pole sum lost positivity")
    m1 = S1 / S0
    return ExpDividedDifference(
        log_value=math.log(S0) - n * math.log(beta),
        d1=-n / beta - m1,
        d2=n / beta ** 2 + S2 / S0 - m1 * m1,
        method="pole",
    )


def _confluent(offsets: np.ndarray, beta: float) -> ExpDividedDifference:
    size = offsets.size
    n = size - 1
    b = _bidiagonal(offsets, beta)
    db = -np.diag(offsets)
    block = np.zeros((3 * size, 3 * size))
    for i in range(3):
        block[i * size:(i + 1) * size, i * size:(i + 1) * size] = b
    block[:size, size:2 * size] = db
    block[size:2 * size, 2 * size:] = db
    m = expm(block)
    g = m[0, n]
    g1 = m[0, size + n]
    g2 = 2.0 * m[0, 2 * size + n]
    if not g > 0.0:
        raise ArithmeticError("matrix exponential lost positivity")
    ratio = g1 / g
    return ExpDividedDifference(math.log(g), ratio, g2 / g - ratio * ratio, "confluent")


def _asymptotic(offsets: np.ndarray, beta: float) -> ExpDividedDifference:
    n = offsets.size - 1
    log_value = -math.fsum(math.log(beta * e) for e in offsets[1:])
    return ExpDividedDifference(log_value, -n / beta, n / beta ** 2, "asymptotic")


def exp_divided_difference(offsets, beta: float) -> ExpDividedDifference:
    """Evaluate G(beta) for ascending offsets with offsets[0] == 0.

    Path selection, with spread = offsets[-1]:
      beta * spread above the beta cap       -> dominant-pole asymptotic form
      two nodes                              -> expm1 closed form
      small relative gap or beta * gap < 1   -> block matrix exponential
      otherwise                              -> compensated pole sum
    """
    e = np.asarray(offsets, dtype=float)
    if e.ndim != 1 or e.size < 2:
        raise DomainError("need at least two energy levels")
    if not math.isfinite(beta) or beta < 0.0:
        raise DomainError(f"closed forms need a finite beta >= 0, got {beta}")
    require_distinct(e)
    tols = get_tolerances()
    spread = float(e[-1])
    gap = float(np.diff(e).min())
    if beta * spread > tols.beta_cap:
        return _asymptotic(e, beta)
    if e.size == 2:
        return _two_level(spread, beta)
    if gap < tols.confluent * spread or beta * gap < 1.0:
        return _confluent(e, beta)
    return _pole_sum(e, beta)


# ---------------------------------------------------------------------------
# Occupation moments
# ---------------------------------------------------------------------------

def _second_order_block(b: np.ndarray, first: np.ndarray, second: np.ndarray) -> np.ndarray:
    size = b.shape[0]
    block = np.zeros((3 * size, 3 * size))
    for i in range(3):
        block[i * size:(i + 1) * size, i * size:(i + 1) * size] = b
    block[:size, size:2 * size] = first
    block[size:2 * size, 2 * size:] = second
    return expm(block)[:size, 2 * size:]


def occupation_moments(offsets, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """First and second moments of p_k = |<E_k|Z>|^2 under e^{-beta h}.

    Returns (m1, m2) with m1[k] = <p_k> and m2[j, k] = <p_j p_k>. These are
    the derivatives of G with respect to the individual nodes, taken through
    Frechet derivatives of the bidiagonal exponential.
    """
    e = np.asarray(offsets, dtype=float)
    size = e.size
    n = size - 1
    require_distinct(e)
    if beta < 0.0 or not math.isfinite(beta):
        raise DomainError(f"closed forms need a finite beta >= 0, got {beta}")

    if beta * float(e[-1]) > get_tolerances().beta_cap:
        inv = np.zeros(size)
        inv[1:] = 1.0 / (beta * e[1:])
        m1 = inv.copy()
        m1[0] = 1.0 - inv.sum()
        m2 = np.outer(inv, inv) + np.diag(inv * inv)
        m2[0, :] = m2[:, 0] = 0.0
        m2[0, 1:] = m2[1:, 0] = m1[1:] - m2[1:, 1:].sum(axis=1)
        m2[0, 0] = m1[0] - m2[0, 1:].sum()
        return m1, m2

    b = _bidiagonal(e, beta)
    units = [np.zeros((size, size)) for _ in range(size)]
    for k in range(size):
        units[k][k, k] = 1.0
    g = expm(b)[0, n]
    m1 = np.array([expm_frechet(b, units[k], compute_expm=False)[0, n] for k in range(size)]) / g
    m2 = np.empty((size, size))
    for j in range(size):
        for k in range(j, size):
            value = _second_order_block(b, units[j], units[k])[0, n]
            if j != k:
                value += _second_order_block(b, units[k], units[j])[0, n]
            else:
                value *= 2.0
            m2[j, k] = m2[k, j] = value / g
    return m1, m2
