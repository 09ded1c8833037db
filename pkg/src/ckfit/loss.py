"""Approximation loss, continuity loss and their analytic gradients.

The model is linear in its coefficients, so both losses are quadratic forms:
``l2 = |Phi theta - y|^2 / n`` and ``lck = |D theta|^2 / N`` where ``Phi`` is the
sample design matrix and each row of ``D`` extracts one regularized derivative
jump at a knot. :class:`LossModel` assembles both matrices once so a training
loop only does matrix-vector products.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from math import factorial

import numpy as np

from . import basis as bs
from .basis import Basis
from .errors import UsageError
from .ppmodel import PiecewisePolynomial, SampleSet, locate_segment


class Boundary(str, enum.Enum):
    OPEN = "open"
    CYCLIC = "cyclic"
    PERIODIC = "periodic"


class Regularization(str, enum.Enum):
    FACTORIAL = "factorial"
    CHEB_ENDPOINT = "cheb-endpoint"
    NONE = "none"


@dataclass(frozen=True)
class LossConfig:
    alpha: float = 0.1
    k: int = 3
    boundary: Boundary = Boundary.OPEN
    regularization: Regularization = Regularization.FACTORIAL

    def __post_init__(self):
        object.__setattr__(self, "boundary", Boundary(self.boundary))
        object.__setattr__(self, "regularization", Regularization(self.regularization))
        if not 0.0 <= self.alpha <= 1.0:
            raise UsageError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.k < 0:
            raise UsageError("continuity order k must be >= 0")

    def to_dict(self):
        return {"alpha": self.alpha, "k": self.k, "boundary": self.boundary.value,
                "regularization": self.regularization.value}


def reg_factor(d: int, j: int, mode=Regularization.FACTORIAL) -> float:
    """Divisor applied to the ``j``-th derivative jump of a degree-``d`` PP."""
    if not 0 <= j <= d:
        raise UsageError(f"derivative order {j} outside [0, {d}]")
    mode = Regularization(mode)
    if mode is Regularization.FACTORIAL:
        return float(factorial(d) // factorial(d - j))
    if mode is Regularization.CHEB_ENDPOINT:
        return abs(bs.cheb_endpoint_derivative(d, j))
    return 1.0


def continuity_terms(m: int, k: int, boundary=Boundary.OPEN):
    """Knot conditions as ``(left_segment, right_segment, orders)`` plus the normalizer.

    The wrap-around term joins the end of the last segment to the start of the
    first; cyclic mode drops its positional (order 0) condition.
    """
    boundary = Boundary(boundary)
    orders = tuple(range(k + 1))
    terms = [(i, i + 1, orders) for i in range(m - 1)]
    if boundary is Boundary.OPEN:
        return terms, m - 1
    wrap = orders if boundary is Boundary.PERIODIC else orders[1:]
    if wrap:
        terms.append((m - 1, 0, wrap))
    return terms, m


def jump_matrix(knots, degree: int, basis, cfg: LossConfig, regularize: bool = True):
    """Rows mapping flattened coefficients to (optionally regularized) jumps."""
    knots = np.asarray(knots, dtype=float)
    m = knots.size - 1
    if cfg.k > degree:
        raise UsageError(f"continuity order k={cfg.k} exceeds degree {degree}")
    h = 0.5 * np.diff(knots)
    p = degree + 1
    terms, norm = continuity_terms(m, cfg.k, cfg.boundary)
    rows = []
    for left, right, orders in terms:
        for j in orders:
            row = np.zeros(m * p)
            row[right * p:(right + 1) * p] += bs.basis_matrix(-h[right], degree, basis, j)[0]
            row[left * p:(left + 1) * p] -= bs.basis_matrix(h[left], degree, basis, j)[0]
            if regularize:
                row /= reg_factor(degree, j, cfg.regularization)
            rows.append(row)
    return np.array(rows).reshape(len(rows), m * p), norm


def design_matrix(knots, degree: int, basis, xs) -> np.ndarray:
    """``Phi`` with ``f(xs) = Phi @ theta`` for segment-major flattened ``theta``."""
    knots = np.asarray(knots, dtype=float)
    xs = np.asarray(xs, dtype=float)
    m = knots.size - 1
    p = degree + 1
    idx = locate_segment(knots, xs)
    idx = np.atleast_1d(idx)
    mu = 0.5 * (knots[:-1] + knots[1:])
    phi = np.zeros((xs.size, m * p))
    for i in range(m):
        sel = idx == i
        if np.any(sel):
            phi[np.ix_(sel, np.arange(i * p, (i + 1) * p))] = bs.basis_matrix(
                xs[sel] - mu[i], degree, basis)
    return phi


class LossModel:
    """Pre-assembled losses for a fixed knot vector, degree, basis, data set and config."""

    def __init__(self, knots, degree: int, basis, data: SampleSet, cfg: LossConfig):
        self.knots = np.asarray(knots, dtype=float)
        self.degree = degree
        self.basis = Basis.parse(basis)
        self.cfg = cfg
        self.ys = data.ys
        self.n = data.n
        self.phi = design_matrix(self.knots, degree, self.basis, data.xs)
        self.jumps, self.norm = jump_matrix(self.knots, degree, self.basis, cfg)

    @classmethod
    def for_pp(cls, pp: PiecewisePolynomial, data: SampleSet, cfg: LossConfig):
        return cls(pp.knots, pp.degree, pp.basis, data, cfg)

    def residual(self, theta):
        return self.phi @ theta - self.ys

    def l2(self, theta) -> float:
        r = self.residual(theta)
        return float(r @ r) / self.n

    def ck(self, theta) -> float:
        if self.norm == 0 or self.jumps.shape[0] == 0:
            return 0.0
        dj = self.jumps @ theta
        return float(dj @ dj) / self.norm

    def components(self, theta):
        """``(total, l2, lck)`` at ``theta``."""
        l2 = self.l2(theta)
        ck = self.ck(theta)
        a = self.cfg.alpha
        return a * ck + (1.0 - a) * l2, l2, ck

    def total(self, theta) -> float:
        return self.components(theta)[0]

    def grad(self, theta) -> np.ndarray:
        a = self.cfg.alpha
        g = (2.0 * (1.0 - a) / self.n) * (self.phi.T @ self.residual(theta))
        if self.norm and self.jumps.shape[0]:
            g += (2.0 * a / self.norm) * (self.jumps.T @ (self.jumps @ theta))
        return g


def l2_loss(pp: PiecewisePolynomial, data: SampleSet) -> float:
    r = pp(data.xs) - data.ys
    return float(r @ r) / data.n


def knot_jumps(pp: PiecewisePolynomial, k: int, boundary=Boundary.OPEN) -> np.ndarray:
    """Unregularized jumps, one per (knot condition, order) in :func:`continuity_terms` order."""
    d, _ = jump_matrix(pp.knots, pp.degree, pp.basis, LossConfig(0.0, k, boundary), regularize=False)
    return d @ pp.theta


def ck_loss(pp: PiecewisePolynomial, cfg: LossConfig) -> float:
    d, norm = jump_matrix(pp.knots, pp.degree, pp.basis, cfg)
    if norm == 0 or d.shape[0] == 0:
        return 0.0
    dj = d @ pp.theta
    return float(dj @ dj) / norm


def total_loss(pp: PiecewisePolynomial, data: SampleSet, cfg: LossConfig) -> float:
    return cfg.alpha * ck_loss(pp, cfg) + (1.0 - cfg.alpha) * l2_loss(pp, data)


def grad_total(pp: PiecewisePolynomial, data: SampleSet, cfg: LossConfig) -> np.ndarray:
    """Gradient with respect to the flattened coefficients, segment-major."""
    return LossModel.for_pp(pp, data, cfg).grad(pp.theta)
