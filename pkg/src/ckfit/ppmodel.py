"""Piecewise polynomial model and the domain rescaling transform.

Segment ``i`` (0-based) lives on ``[knots[i], knots[i+1]]`` and is evaluated in
its local coordinate ``x - mu_i`` with ``mu_i`` the segment midpoint. With the
default rescaling every segment has width 2, so local coordinates span
[-1, 1].
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import basis as bs
from .basis import Basis
from .errors import DomainError, UsageError


@dataclass(frozen=True)
class DomainTransform:
    """Affine map ``x' = (x - offset) * scale`` from original to scaled units."""

    scale: float
    offset: float

    def __post_init__(self):
        if not (np.isfinite(self.scale) and self.scale > 0):
            raise UsageError("transform scale must be positive and finite")

    @property
    def is_identity(self) -> bool:
        return self.scale == 1.0 and self.offset == 0.0

    # the identity short-circuit keeps values bit-exact (e.g. -0.0 + 0.0 is +0.0)
    def forward(self, x):
        if self.is_identity:
            return np.array(x, dtype=float)
        return (np.asarray(x, dtype=float) - self.offset) * self.scale

    def inverse(self, xs):
        if self.is_identity:
            return np.array(xs, dtype=float)
        return np.asarray(xs, dtype=float) / self.scale + self.offset

    def to_dict(self):
        return {"scale": float(self.scale), "offset": float(self.offset)}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["scale"]), float(d["offset"]))

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0)


def build_transform(a: float, b: float, m: int) -> DomainTransform:
    """Map ``[a, b]`` onto ``[0, 2m]`` so each of ``m`` equal segments spans 2."""
    if not a < b:
        raise UsageError(f"interval must satisfy a < b, got [{a}, {b}]")
    if m < 1:
        raise UsageError("segment count must be >= 1")
    return DomainTransform(2.0 * m / (b - a), float(a))


def uniform_knots(m: int) -> np.ndarray:
    return 2.0 * np.arange(m + 1, dtype=float)


@dataclass(frozen=True)
class SegmentPolynomial:
    coeffs: bs.CoeffVector
    mu: float

    def __call__(self, x, order: int = 0):
        c = self.coeffs.derivative(order) if order else self.coeffs
        return c(np.asarray(x, dtype=float) - self.mu)


class PiecewisePolynomial:
    """``m`` polynomial segments of common degree and basis over ordered knots.

    ``coeffs`` has shape ``(m, d + 1)``. Instances are treated as immutable;
    :meth:`with_coeffs` returns a copy carrying new coefficients.
    """

    def __init__(self, knots, coeffs, basis=Basis.CHEBYSHEV, *, check_uniform=True):
        knots = np.asarray(knots, dtype=float).copy()
        coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float)).copy()
        if knots.ndim != 1 or knots.size < 2:
            raise UsageError("need at least two knots")
        if not np.all(np.diff(knots) > 0):
            raise UsageError("knots must be strictly increasing")
        if coeffs.shape[0] != knots.size - 1:
            raise UsageError(
                f"{knots.size - 1} segments need {knots.size - 1} coefficient rows, "
                f"got {coeffs.shape[0]}")
        if not np.all(np.isfinite(coeffs)):
            raise UsageError("coefficients must be finite")
        widths = np.diff(knots)
        if check_uniform and not np.allclose(widths, 2.0, rtol=0, atol=1e-12):
            warnings.warn("knots are not spaced 2 apart; local coordinates will not span [-1, 1]",
                          stacklevel=2)
        knots.flags.writeable = False
        coeffs.flags.writeable = False
        self.knots = knots
        self.coeffs = coeffs
        self.basis = Basis.parse(basis)

    @classmethod
    def zeros(cls, knots, degree: int, basis=Basis.CHEBYSHEV):
        knots = np.asarray(knots, dtype=float)
        return cls(knots, np.zeros((knots.size - 1, degree + 1)), basis)

    @property
    def m(self) -> int:
        return self.knots.size - 1

    @property
    def degree(self) -> int:
        return self.coeffs.shape[1] - 1

    @property
    def mu(self) -> np.ndarray:
        return 0.5 * (self.knots[:-1] + self.knots[1:])

    @property
    def half_widths(self) -> np.ndarray:
        return 0.5 * np.diff(self.knots)

    @property
    def theta(self) -> np.ndarray:
        """Flattened parameters, segment-major."""
        return self.coeffs.ravel().copy()

    def segment(self, i: int) -> SegmentPolynomial:
        return SegmentPolynomial(bs.CoeffVector(self.coeffs[i], self.basis), float(self.mu[i]))

    @property
    def segments(self):
        return [self.segment(i) for i in range(self.m)]

    def with_coeffs(self, coeffs) -> "PiecewisePolynomial":
        coeffs = np.asarray(coeffs, dtype=float).reshape(self.coeffs.shape)
        return PiecewisePolynomial(self.knots, coeffs, self.basis, check_uniform=False)

    def locate(self, x) -> np.ndarray:
        return locate_segment(self.knots, x)

    def __call__(self, x, order: int = 0):
        return eval_pp(self, x, order)

    def __repr__(self):
        return f"PiecewisePolynomial(m={self.m}, degree={self.degree}, basis={self.basis.value})"


def locate_segment(knots, x):
    """0-based segment index owning ``x``; interior knots belong to the left segment."""
    knots = np.asarray(knots, dtype=float)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < knots[0]) or np.any(xa > knots[-1]) or np.any(np.isnan(xa)):
        raise DomainError(f"x outside [{knots[0]}, {knots[-1]}]")
    idx = np.searchsorted(knots, xa, side="left") - 1
    idx = np.clip(idx, 0, knots.size - 2)
    return int(idx) if idx.ndim == 0 else idx


def eval_pp(pp: PiecewisePolynomial, x, order: int = 0):
    """Value of the ``order``-th derivative of ``pp`` at ``x``."""
    if order < 0:
        raise UsageError("derivative order must be >= 0")
    xa = np.asarray(x, dtype=float)
    idx = np.atleast_1d(locate_segment(pp.knots, xa))
    flat = np.atleast_1d(xa)
    out = np.zeros(flat.shape)
    if order <= pp.degree:
        for i in np.unique(idx):
            sel = idx == i
            c = bs.derivative(pp.coeffs[i], pp.basis, order)
            out[sel] = bs.evaluate(c, flat[sel] - pp.mu[i], pp.basis)
    return float(out[0]) if xa.ndim == 0 else out.reshape(xa.shape)


def affine_compose(power_coeffs, a: float, b: float) -> np.ndarray:
    """Power coefficients in ``x`` of ``p(a*x + b)``."""
    out = np.array([power_coeffs[-1]], dtype=float)
    lin = np.array([b, a], dtype=float)
    for c in power_coeffs[-2::-1]:
        out = npoly.polyadd(npoly.polymul(out, lin), [c])
    n = len(power_coeffs)
    return np.pad(out, (0, max(0, n - out.size)))[:n]


def to_export_form(pp: PiecewisePolynomial, transform: DomainTransform) -> PiecewisePolynomial:
    """Power-basis PP in original x units, coefficients about absolute ``x``.

    Each segment ``p_i(x' - mu_i)`` with ``x' = (x - offset) * scale`` becomes
    ``sum_j a_j x**j``. The result reports ``mu = 0`` for every segment, so
    :func:`eval_pp` evaluates it directly in original units.
    """
    rows = []
    for i in range(pp.m):
        power = bs.convert(pp.coeffs[i], pp.basis, Basis.POWER)
        # local = scale * x - (scale * offset + mu)
        rows.append(affine_compose(power, transform.scale,
                                    -(transform.scale * transform.offset + pp.mu[i])))
    knots = transform.inverse(pp.knots)
    return ExportPP(knots, np.array(rows))


class ExportPP(PiecewisePolynomial):
    """Power-basis PP whose segments are expanded about absolute ``x`` (no centering)."""

    def __init__(self, knots, coeffs):
        super().__init__(knots, coeffs, Basis.POWER, check_uniform=False)

    @property
    def mu(self) -> np.ndarray:
        return np.zeros(self.m)

    def with_coeffs(self, coeffs):
        return ExportPP(self.knots, np.asarray(coeffs, dtype=float).reshape(self.coeffs.shape))

    def to_dict(self, domain=None):
        return {
            "domain": [float(self.knots[0]), float(self.knots[-1])] if domain is None else list(domain),
            "knots": [float(k) for k in self.knots],
            "degree": self.degree,
            "segments": [{"powers_ascending": [float(c) for c in row]} for row in self.coeffs],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["knots"], [s["powers_ascending"] for s in d["segments"]])


@dataclass(frozen=True)
class SampleSet:
    """Samples in scaled x units plus the transform back to original units."""

    xs: np.ndarray
    ys: np.ndarray
    transform: DomainTransform = DomainTransform(1.0, 0.0)

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float).ravel()
        ys = np.asarray(self.ys, dtype=float).ravel()
        if xs.size != ys.size:
            raise UsageError(f"xs and ys differ in length ({xs.size} vs {ys.size})")
        if xs.size == 0:
            raise UsageError("sample set is empty")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise UsageError("samples must be finite")
        if np.any(np.diff(xs) < 0):
            raise UsageError("sample x values must be non-decreasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def n(self) -> int:
        return self.xs.size

    @property
    def original_xs(self) -> np.ndarray:
        return self.transform.inverse(self.xs)

    def rescaled(self, m: int) -> "SampleSet":
        """Re-express the samples so ``m`` equal segments each span width 2.

        The first and last sample become ``0`` and ``2m``.
        """
        x = self.original_xs
        t = build_transform(x[0], x[-1], m)
        xs = t.forward(x)
        # pin the ends against rounding so the knot range covers every sample
        xs[0], xs[-1] = 0.0, 2.0 * m
        return SampleSet(xs, self.ys, t)
