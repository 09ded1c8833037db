"""Gradient-descent fitting of C^k-continuous piecewise polynomials in Chebyshev or power basis."""

__version__ = "0.1.0"

from .basis import Basis, CoeffVector, cheb_to_power, power_to_cheb
from .ckmin import ckmin
from .errors import (CkfitError, ConditioningError, DivergenceError, DomainError,
                     NumericalError, ParseError, UsageError)
from .loss import Boundary, LossConfig, Regularization, ck_loss, grad_total, l2_loss, total_loss
from .lsqfit import baselines, fit_segmentwise
from .ppmodel import (DomainTransform, PiecewisePolynomial, SampleSet, build_transform,
                      eval_pp, to_export_form, uniform_knots)
from .train import Init, TrainConfig, initialize, train

__all__ = [
    "Basis", "CoeffVector", "cheb_to_power", "power_to_cheb", "ckmin",
    "CkfitError", "ConditioningError", "DivergenceError", "DomainError", "NumericalError",
    "ParseError", "UsageError", "Boundary", "LossConfig", "Regularization", "ck_loss",
    "grad_total", "l2_loss", "total_loss", "baselines", "fit_segmentwise", "DomainTransform",
    "PiecewisePolynomial", "SampleSet", "build_transform", "eval_pp", "to_export_form",
    "uniform_knots", "Init", "TrainConfig", "initialize", "train",
]
