"""G-squared (log-likelihood ratio) conditional independence test for
discrete data.

The statistic is 2 * sum n_ijk * ln(n_ijk * n_k / (n_ik * n_jk)), summed
over the contingency table of (x, y) stratified by the conditioning
assignment k. Zero-count cells contribute nothing; strata with no samples
reduce the degrees of freedom.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from .discretize import DiscreteData
from .exceptions import ConditioningSetTooLargeError

DEFAULT_ALPHA = 0.05
DEFAULT_MAX_COND = 3


@dataclass(frozen=True)
class CITestResult:
    x: str
    y: str
    cond: tuple[str, ...]
    statistic: float
    dof: int
    p_value: float
    independent: bool


def _strata_index(data: DiscreteData, cond: tuple[str, ...]) -> tuple[np.ndarray, int]:
    """Mixed-radix index of the conditioning assignment per row."""
    idx = np.zeros(data.n_rows, dtype=np.int64)
    size = 1
    for name in cond:
        card = data.cardinality(name)
        idx = idx * card + data.column(name)
        size *= card
    return idx, size


def g_squared(data: DiscreteData, x: str, y: str,
              cond: tuple[str, ...] = ()) -> tuple[float, int]:
    """G² statistic and adjusted degrees of freedom."""
    rx, ry = data.cardinality(x), data.cardinality(y)
    strata, n_strata = _strata_index(data, cond)
    flat = (strata * rx + data.column(x)) * ry + data.column(y)
    counts = np.bincount(flat, minlength=n_strata * rx * ry).reshape(n_strata, rx, ry)
    counts = counts.astype(float)

    n_k = counts.sum(axis=(1, 2))                     # per-stratum totals
    occupied = n_k > 0
    n_ik = counts.sum(axis=2)                         # (strata, rx)
    n_jk = counts.sum(axis=1)                         # (strata, ry)
    with np.errstate(divide="ignore", invalid="ignore"):
        expected = n_ik[:, :, None] * n_jk[:, None, :] / n_k[:, None, None]
        ratio = np.where(counts > 0, counts / expected, 1.0)
    stat = 2.0 * float(np.sum(counts * np.log(ratio)))

    dof = (rx - 1) * (ry - 1) * int(occupied.sum())
    return stat, dof


def ci_test(data: DiscreteData, x: str, y: str, cond=(),
            alpha: float = DEFAULT_ALPHA,
            max_cond_size: int = DEFAULT_MAX_COND) -> CITestResult:
    """Test x independent of y given cond at significance alpha."""
    cond = tuple(cond)
    if x == y or x in cond or y in cond:
        raise ValueError(f"test variables must be distinct: {x}, {y}, {cond}")
    if data.n_rows == 0:
        raise ValueError("no data")
    if len(cond) > max_cond_size:
        raise ConditioningSetTooLargeError(
            f"conditioning set too large: {len(cond)} > {max_cond_size}"
        )
    stat, dof = g_squared(data, x, y, cond)
    # a fully determined table (e.g. single-state margins) carries no evidence
    p_value = float(chi2.sf(stat, dof)) if dof > 0 else 1.0
    return CITestResult(
        x=x, y=y, cond=cond, statistic=stat, dof=dof,
        p_value=p_value, independent=bool(p_value > alpha),
    )
