"""Strict C^k enforcement by local corrective polynomials (CKMIN).

Segments are corrected left to right. Segment ``i`` receives a polynomial
``q_i`` of degree ``2k+1`` whose derivatives ``0..k`` at the left knot close
the gap to the already corrected left neighbour, and at the right knot move
the segment to the mean of itself and its (still uncorrected) right
neighbour. Outer ends stay untouched unless a cyclic or periodic boundary is
requested, in which case both ends meet at the mean of the wrap pair.
"""
from __future__ import annotations

from math import factorial

import numpy as np

from . import basis as bs
from .basis import Basis
from .errors import ConditioningError, UsageError
from .loss import Boundary
from .ppmodel import PiecewisePolynomial


def derivative_condition_row(xi: float, j: int, degree: int) -> np.ndarray:
    """``j``-th derivative of ``1, x, ..., x**degree`` evaluated at ``xi``."""
    row = np.zeros(degree + 1)
    for l in range(j, degree + 1):
        row[l] = factorial(l) // factorial(l - j) * xi ** (l - j)
    return row


def correction_matrix(k: int, half_width: float = 1.0) -> np.ndarray:
    """Stacked left/right conditions for ``q(u)``, ``u = (x - mu) / half_width``."""
    deg = 2 * k + 1
    scale = [half_width ** -j for j in range(k + 1)]
    left = [scale[j] * derivative_condition_row(-1.0, j, deg) for j in range(k + 1)]
    right = [scale[j] * derivative_condition_row(1.0, j, deg) for j in range(k + 1)]
    return np.array(left + right)


def _end_derivs(coeffs, basis, k, at):
    """Derivatives ``0..k`` of one segment at local coordinate ``at``."""
    return np.array([bs.evaluate(bs.derivative(coeffs, basis, j), at, basis) for j in range(k + 1)])


def ckmin(pp: PiecewisePolynomial, k: int, boundary=Boundary.OPEN) -> PiecewisePolynomial:
    """Return a copy of ``pp`` that is exactly C^k continuous at every knot."""
    boundary = Boundary(boundary)
    d = pp.degree
    if d < 2 * k + 1:
        raise UsageError(f"CKMIN at k={k} needs degree >= {2 * k + 1}, got {d}; elevate the degree first")
    m = pp.m
    h = pp.half_widths
    coeffs = pp.coeffs.copy()
    basis = pp.basis

    def left_end(i):
        return _end_derivs(coeffs[i], basis, k, -h[i])

    def right_end(i):
        return _end_derivs(coeffs[i], basis, k, h[i])

    wrap_target = None
    if boundary is not Boundary.OPEN:
        wrap_target = 0.5 * (left_end(0) + right_end(m - 1))

    for i in range(m):
        if i > 0:
            b_left = right_end(i - 1) - left_end(i)
        elif wrap_target is not None:
            b_left = wrap_target - left_end(0)
        else:
            b_left = np.zeros(k + 1)
        if i < m - 1:
            b_right = 0.5 * (left_end(i + 1) - right_end(i))
        elif wrap_target is not None:
            b_right = wrap_target - right_end(i)
        else:
            b_right = np.zeros(k + 1)
        if boundary is Boundary.CYCLIC:
            # positional offset across the wrap is allowed
            if i == 0:
                b_left[0] = 0.0
            if i == m - 1:
                b_right[0] = 0.0
        b = np.concatenate([b_left, b_right])
        if not np.any(b):
            continue
        try:
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                u = np.linalg.solve(correction_matrix(k, h[i]), b)
        except np.linalg.LinAlgError as exc:
            raise ConditioningError(f"correction system for segment {i} is singular") from exc
        if not np.all(np.isfinite(u)):
            raise ConditioningError(f"correction system for segment {i} is degenerate")
        q = u / h[i] ** np.arange(u.size)
        q = bs.convert(q, Basis.POWER, basis)
        coeffs[i, :q.size] += q
    return pp.with_coeffs(coeffs)
