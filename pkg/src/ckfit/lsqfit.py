"""Segment-wise least-squares fits and the two reference losses derived from them."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from . import basis as bs
from .basis import Basis
from .ckmin import ckmin
from .errors import ConditioningError, UsageError
from .loss import Boundary, l2_loss
from .ppmodel import PiecewisePolynomial, SampleSet, locate_segment


def lstsq_qr(a: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Least-squares solution of ``a @ c = y`` via a reduced QR factorization."""
    q, r = np.linalg.qr(a, mode="reduced")
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag.min() <= 1e-13 * diag.max():
        raise ConditioningError("design matrix is rank deficient")
    return solve_triangular(r, q.T @ y)


def fit_segmentwise(data: SampleSet, knots, degree: int, basis=Basis.CHEBYSHEV) -> PiecewisePolynomial:
    """Independent least-squares fit of every segment in its local coordinates."""
    knots = np.asarray(knots, dtype=float)
    basis = Basis.parse(basis)
    idx = np.atleast_1d(locate_segment(knots, data.xs))
    mu = 0.5 * (knots[:-1] + knots[1:])
    coeffs = np.zeros((knots.size - 1, degree + 1))
    for i in range(knots.size - 1):
        sel = idx == i
        count = int(sel.sum())
        if count < degree + 1:
            raise ConditioningError(
                f"segment {i} holds {count} samples, a degree-{degree} fit needs {degree + 1}")
        a = bs.basis_matrix(data.xs[sel] - mu[i], degree, basis)
        try:
            coeffs[i] = lstsq_qr(a, data.ys[sel])
        except ConditioningError as exc:
            raise ConditioningError(f"segment {i}: {exc}") from None
    return PiecewisePolynomial(knots, coeffs, basis, check_uniform=False)


@dataclass
class BaselineReport:
    l2_star: float
    l2_star_tilde: float
    fitted: PiecewisePolynomial
    corrected: PiecewisePolynomial

    def to_dict(self):
        return {"l2_star": self.l2_star, "l2_star_tilde": self.l2_star_tilde}


def baselines(data: SampleSet, knots, degree: int, basis=Basis.CHEBYSHEV, k: int = 3,
              boundary=Boundary.OPEN) -> BaselineReport:
    """Least-squares optimum and its loss after continuity enforcement."""
    if degree < 2 * k + 1:
        raise UsageError(f"k={k} needs degree >= {2 * k + 1} (got {degree}); elevate the degree")
    fitted = fit_segmentwise(data, knots, degree, basis)
    corrected = ckmin(fitted, k, boundary)
    return BaselineReport(l2_loss(fitted, data), l2_loss(corrected, data), fitted, corrected)
