"""Chebyshev (first kind) and power basis primitives.

Coefficient vectors are ascending: ``c[j]`` multiplies ``T_j(x)`` or ``x**j``.
Chebyshev series are meant to be evaluated on [-1, 1]; evaluating outside
that interval works but nothing guards against the growth of ``T_j`` there.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import UsageError


class Basis(str, enum.Enum):
    CHEBYSHEV = "cheb"
    POWER = "power"

    @classmethod
    def parse(cls, value) -> "Basis":
        if isinstance(value, cls):
            return value
        aliases = {"cheb": cls.CHEBYSHEV, "chebyshev": cls.CHEBYSHEV,
                   "power": cls.POWER, "monomial": cls.POWER}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise UsageError(f"unknown basis {value!r}; expected 'cheb' or 'power'") from None


def _as_coeffs(c) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if c.ndim != 1 or c.size == 0:
        raise UsageError("coefficient vector must be 1-D and non-empty")
    return c


def chebval(c, x):
    """Evaluate a Chebyshev series with Clenshaw's backward recurrence."""
    c = _as_coeffs(c)
    x = np.asarray(x, dtype=float)
    b1 = np.zeros_like(x)
    b2 = np.zeros_like(x)
    for cj in c[:0:-1]:
        b1, b2 = cj + 2.0 * x * b1 - b2, b1
    return c[0] + x * b1 - b2


def powval(c, x):
    """Evaluate a power series with Horner's scheme."""
    c = _as_coeffs(c)
    x = np.asarray(x, dtype=float)
    acc = np.zeros_like(x) + c[-1]
    for cj in c[-2::-1]:
        acc = acc * x + cj
    return acc


def evaluate(c, x, basis):
    if Basis.parse(basis) is Basis.CHEBYSHEV:
        return chebval(c, x)
    return powval(c, x)


def _cheb_derivative(c: np.ndarray) -> np.ndarray:
    d = c.size - 1
    if d == 0:
        return np.zeros(1)
    der = np.zeros(d + 2)
    for j in range(d, 0, -1):
        der[j - 1] = 2.0 * j * c[j] + der[j + 1]
    der[0] *= 0.5
    return der[:d]


def _power_derivative(c: np.ndarray) -> np.ndarray:
    if c.size == 1:
        return np.zeros(1)
    return c[1:] * np.arange(1, c.size)


def derivative(c, basis, order: int = 1) -> np.ndarray:
    """Coefficients of the ``order``-th derivative, in the same basis.

    Chebyshev series are differentiated with the coefficient recurrence
    directly, never through the power basis. Output length shrinks by one per
    derivative but never below 1.
    """
    if order < 0:
        raise UsageError("derivative order must be >= 0")
    c = _as_coeffs(c).copy()
    step = _cheb_derivative if Basis.parse(basis) is Basis.CHEBYSHEV else _power_derivative
    for _ in range(order):
        c = step(c)
    return c


def cheb_power_matrix(d: int) -> np.ndarray:
    """Upper triangular ``M`` with ``M[:, j]`` the power coefficients of ``T_j``.

    Built with the three-term recurrence T_j = 2x T_{j-1} - T_{j-2}.
    """
    m = np.zeros((d + 1, d + 1))
    m[0, 0] = 1.0
    if d >= 1:
        m[1, 1] = 1.0
    for j in range(2, d + 1):
        m[1:, j] = 2.0 * m[:-1, j - 1]
        m[:, j] -= m[:, j - 2]
    return m


def _back_substitute(u: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = b.size
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - u[i, i + 1:] @ x[i + 1:]) / u[i, i]
    return x


def cheb_to_power(c) -> np.ndarray:
    c = _as_coeffs(c)
    return cheb_power_matrix(c.size - 1) @ c


def power_to_cheb(a) -> np.ndarray:
    a = _as_coeffs(a)
    return _back_substitute(cheb_power_matrix(a.size - 1), a)


def convert(c, src, dst) -> np.ndarray:
    src, dst = Basis.parse(src), Basis.parse(dst)
    c = _as_coeffs(c)
    if src is dst:
        return c.copy()
    if src is Basis.CHEBYSHEV:
        return cheb_to_power(c)
    return power_to_cheb(c)


def basis_matrix(x, d: int, basis, order: int = 0) -> np.ndarray:
    """Matrix whose column ``l`` holds the ``order``-th derivative of ``B_l`` at ``x``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    basis = Basis.parse(basis)
    out = np.zeros((x.size, d + 1))
    if basis is Basis.POWER:
        for l in range(order, d + 1):
            out[:, l] = factorial(l) // factorial(l - order) * x ** (l - order)
        return out
    for l in range(d + 1):
        unit = np.zeros(l + 1)
        unit[l] = 1.0
        out[:, l] = chebval(derivative(unit, basis, order), x)
    return out


def cheb_endpoint_derivative(d: int, j: int) -> float:
    """Closed form of ``T_d^(j)(1)``."""
    out = 1.0
    for l in range(j):
        out *= (d * d - l * l) / (2 * l + 1)
    return out


@dataclass(frozen=True)
class CoeffVector:
    """A coefficient vector tagged with the basis it is expressed in."""

    coeffs: np.ndarray
    basis: Basis

    def __post_init__(self):
        c = _as_coeffs(self.coeffs)
        if not np.all(np.isfinite(c)):
            raise UsageError("coefficients must be finite")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "basis", Basis.parse(self.basis))

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x):
        return evaluate(self.coeffs, x, self.basis)

    def derivative(self, order: int = 1) -> "CoeffVector":
        return CoeffVector(derivative(self.coeffs, self.basis, order), self.basis)

    def to_power(self) -> "CoeffVector":
        if self.basis is not Basis.CHEBYSHEV:
            raise UsageError("to_power expects a Chebyshev coefficient vector")
        return CoeffVector(cheb_to_power(self.coeffs), Basis.POWER)

    def to_chebyshev(self) -> "CoeffVector":
        if self.basis is not Basis.POWER:
            raise UsageError("to_chebyshev expects a power coefficient vector")
        return CoeffVector(power_to_cheb(self.coeffs), Basis.CHEBYSHEV)
