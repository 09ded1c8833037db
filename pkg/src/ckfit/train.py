"""Full-batch training loop with early stopping and revert-to-best."""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from .basis import Basis
from .errors import DivergenceError, UsageError
from .loss import LossConfig, LossModel
from .lsqfit import fit_segmentwise
from .optimizers import OPTIMIZERS, make_optimizer
from .ppmodel import PiecewisePolynomial, SampleSet

log = logging.getLogger(__name__)


class Init(str, enum.Enum):
    L2_OPTIMUM = "l2"
    ZERO = "zero"
    RANDOM = "random"


@dataclass(frozen=True)
class TrainConfig:
    optimizer: str = "amsgrad"
    lr: float = 0.1
    epochs: int = 2000
    patience: int = 500
    init: Init = Init.L2_OPTIMUM
    loss: LossConfig = field(default_factory=LossConfig)
    rng_seed: int = 0
    optimizer_params: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "init", Init(self.init))
        if isinstance(self.loss, dict):
            object.__setattr__(self, "loss", LossConfig(**self.loss))
        if self.optimizer.lower() not in OPTIMIZERS:
            raise UsageError(f"unknown optimizer {self.optimizer!r}")
        if not self.lr > 0:
            raise UsageError("learning rate must be > 0")
        if self.epochs < 1:
            raise UsageError("epochs must be >= 1")
        if not 0 <= self.patience <= self.epochs:
            raise UsageError("patience must lie in [0, epochs]")

    def to_dict(self):
        return {"optimizer": self.optimizer, "lr": self.lr, "epochs": self.epochs,
                "patience": self.patience, "init": self.init.value, "loss": self.loss.to_dict(),
                "rng_seed": self.rng_seed, "optimizer_params": dict(self.optimizer_params)}


@dataclass
class TrainingTrace:
    epochs: list = field(default_factory=list)
    total: list = field(default_factory=list)
    l2: list = field(default_factory=list)
    lck: list = field(default_factory=list)
    best_epoch: int = 0
    best_coefficients: np.ndarray | None = None
    stopped_early: bool = False

    def record(self, epoch, total, l2, lck):
        self.epochs.append(epoch)
        self.total.append(total)
        self.l2.append(l2)
        self.lck.append(lck)

    @property
    def best_total(self) -> float:
        return self.total[self.epochs.index(self.best_epoch)]

    def rows(self):
        return zip(self.epochs, self.total, self.l2, self.lck)


def initialize(data: SampleSet, knots, degree: int, basis, strategy=Init.L2_OPTIMUM,
               rng_seed: int = 0) -> PiecewisePolynomial:
    strategy = Init(strategy)
    knots = np.asarray(knots, dtype=float)
    shape = (knots.size - 1, degree + 1)
    if strategy is Init.L2_OPTIMUM:
        return fit_segmentwise(data, knots, degree, basis)
    if strategy is Init.ZERO:
        coeffs = np.zeros(shape)
    else:
        coeffs = np.random.default_rng(rng_seed).uniform(-1.0, 1.0, size=shape)
    return PiecewisePolynomial(knots, coeffs, basis, check_uniform=False)


def train(data: SampleSet, knots, degree: int, basis, cfg: TrainConfig,
          initial: PiecewisePolynomial | None = None):
    """Minimize the combined loss and return ``(trace, best_pp)``.

    Epoch ``e`` records the loss of the coefficients the ``e``-th update starts
    from, so the best record always corresponds to stored coefficients.
    Training stops after ``cfg.patience`` consecutive epochs without a new best
    (``patience == 0`` disables early stopping).
    """
    basis = Basis.parse(basis)
    pp = initial if initial is not None else initialize(
        data, knots, degree, basis, cfg.init, cfg.rng_seed)
    model = LossModel(pp.knots, pp.degree, basis, data, cfg.loss)
    opt = make_optimizer(cfg.optimizer, cfg.lr, **cfg.optimizer_params)
    theta = pp.theta
    trace = TrainingTrace()
    best = np.inf
    since_best = 0
    # overflow shows up as a non-finite loss and is reported as divergence
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(1, cfg.epochs + 1):
            total, l2, lck = model.components(theta)
            if not np.isfinite(total):
                raise DivergenceError(epoch, total)
            trace.record(epoch, total, l2, lck)
            if total < best:
                best = total
                trace.best_epoch = epoch
                trace.best_coefficients = theta.copy()
                since_best = 0
            else:
                since_best += 1
                if cfg.patience and since_best >= cfg.patience:
                    trace.stopped_early = True
                    log.debug("early stop at epoch %d (best %d)", epoch, trace.best_epoch)
                    break
            theta = opt.step(theta, model.grad(theta))
    return trace, pp.with_coeffs(trace.best_coefficients)
