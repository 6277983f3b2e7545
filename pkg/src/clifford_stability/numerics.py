"""Finite-difference stencils and Richardson extrapolation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["RichardsonResult", "central_first", "richardson", "second_difference"]


def central_first(f, h):
    """``(f(h) - f(-h)) / 2h``; error ``O(h^2)``, even powers only."""
    return (f(h) - f(-h)) / (2.0 * h)


def second_difference(f, h, f0=None):
    """Five-point central second difference at 0; error ``O(h^4)``, even powers."""
    if f0 is None:
        f0 = f(0.0)
    return (-f(2 * h) + 16.0 * f(h) - 30.0 * f0 + 16.0 * f(-h) - f(-2 * h)) / (12.0 * h * h)


@dataclass(frozen=True)
class RichardsonResult:
    value: object
    error: float
    table: list

    @property
    def levels(self) -> int:
        return len(self.table)


def richardson(estimates, ratio: float, order: int, step: int = 2) -> RichardsonResult:
    """Extrapolate estimates made at steps ``h, h/ratio, h/ratio^2, ...``.

    ``order`` is the leading error exponent and ``step`` the spacing of the
    following ones (2 for symmetric stencils). Works elementwise for arrays.
    The error is the change of the diagonal over the last level.
    """
    est = [np.asarray(e, dtype=float) for e in estimates]
    if not est:
        raise ValueError("no estimates")
    table = [[est[0]]]
    for j in range(1, len(est)):
        row = [est[j]]
        for m in range(1, j + 1):
            fac = ratio ** (order + (m - 1) * step) - 1.0
            row.append(row[m - 1] + (row[m - 1] - table[j - 1][m - 1]) / fac)
        table.append(row)
    value = table[-1][-1]
    if len(table) > 1:
        error = float(np.max(np.abs(value - table[-2][-1])))
    else:
        error = float("inf")
    if value.ndim == 0:
        value = float(value)
    return RichardsonResult(value, error, table)
