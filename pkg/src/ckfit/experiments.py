"""Single training runs and run matrices (alpha sweeps, optimizer comparisons)."""
from __future__ import annotations

import dataclasses
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .basis import Basis
from .ckmin import ckmin
from .errors import DivergenceError
from .loss import LossConfig, ck_loss, l2_loss
from .lsqfit import baselines
from .optimizers import OPTIMIZERS
from .ppmodel import SampleSet, to_export_form, uniform_knots
from .train import TrainConfig, train


@dataclass
class RunResult:
    basis: Basis
    config: TrainConfig
    trace: object = None
    pp: object = None
    corrected: object = None
    metrics: dict = field(default_factory=dict)
    wall_clock: float = 0.0
    status: str = "ok"

    @property
    def final(self):
        """The PP a user would deploy: CKMIN-corrected when requested."""
        return self.corrected if self.corrected is not None else self.pp

    def export(self, data: SampleSet):
        return to_export_form(self.final, data.transform)


def run(raw: SampleSet, m: int, degree: int, basis, cfg: TrainConfig, apply_ckmin: bool = True) -> RunResult:
    """Rescale ``raw`` onto ``m`` width-2 segments, train, and optionally enforce C^k."""
    basis = Basis.parse(basis)
    data = raw.rescaled(m)
    knots = uniform_knots(m)
    start = time.perf_counter()
    result = RunResult(basis, cfg)
    try:
        trace, pp = train(data, knots, degree, basis, cfg)
    except DivergenceError as exc:
        result.status = f"diverged@{exc.epoch}"
        result.wall_clock = time.perf_counter() - start
        result.metrics = {"best_epoch": math.nan, "best_total": math.nan, "l2": math.nan,
                          "lck": math.nan, "post_ckmin_l2": math.nan, "stopped_early": False}
        return result
    result.trace, result.pp = trace, pp
    best = trace.epochs.index(trace.best_epoch)
    metrics = {"best_epoch": trace.best_epoch, "best_total": trace.total[best],
               "l2": trace.l2[best], "lck": trace.lck[best], "stopped_early": trace.stopped_early,
               "epochs_run": len(trace.epochs)}
    k = cfg.loss.k
    if apply_ckmin and degree >= 2 * k + 1:
        result.corrected = ckmin(pp, k, cfg.loss.boundary)
        metrics["post_ckmin_l2"] = l2_loss(result.corrected, data)
    else:
        metrics["post_ckmin_l2"] = math.nan
    result.metrics = metrics
    result.wall_clock = time.perf_counter() - start
    return result


def reference_losses(raw: SampleSet, m: int, degree: int, basis, loss: LossConfig) -> dict:
    """Baselines plus ``l2 + lck`` of the least-squares optimum (the dashed line of the plots)."""
    data = raw.rescaled(m)
    rep = baselines(data, uniform_knots(m), degree, basis, loss.k, loss.boundary)
    return {"l2_star": rep.l2_star, "l2_star_tilde": rep.l2_star_tilde,
            "baseline_l2_plus_lck": rep.l2_star + ck_loss(rep.fitted, loss)}


SUMMARY_FIELDS = ["label", "basis", "alpha", "optimizer", "status", "best_epoch", "best_total",
                  "final_l2", "final_lck", "final_l2_plus_lck", "post_ckmin_l2",
                  "l2_star", "l2_star_tilde", "baseline_l2_plus_lck"]


def _cell(args):
    raw, m, degree, basis, cfg, apply_ckmin, label = args
    res = run(raw, m, degree, basis, cfg, apply_ckmin)
    ref = reference_losses(raw, m, degree, basis, cfg.loss)
    mt = res.metrics
    row = {"label": label, "basis": res.basis.value, "alpha": cfg.loss.alpha,
           "optimizer": cfg.optimizer, "status": res.status, "best_epoch": mt["best_epoch"],
           "best_total": mt["best_total"], "final_l2": mt["l2"], "final_lck": mt["lck"],
           "final_l2_plus_lck": mt["l2"] + mt["lck"], "post_ckmin_l2": mt["post_ckmin_l2"], **ref}
    return row, res


def run_matrix(raw: SampleSet, m: int, degree: int, cells, apply_ckmin: bool = True, jobs: int = 1):
    """Run ``cells`` = iterable of ``(label, basis, TrainConfig)``; rows come back in input order."""
    args = [(raw, m, degree, basis, cfg, apply_ckmin, label) for label, basis, cfg in cells]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_cell, args))
    return [_cell(a) for a in args]


def alpha_cells(base: TrainConfig, alphas, bases):
    for basis in bases:
        for a in alphas:
            cfg = dataclasses.replace(base, loss=dataclasses.replace(base.loss, alpha=float(a)))
            yield f"alpha={a:g}", Basis.parse(basis), cfg


def optimizer_cells(base: TrainConfig, names, bases):
    for basis in bases:
        for name in names:
            yield name, Basis.parse(basis), dataclasses.replace(base, optimizer=name)


ALL_OPTIMIZERS = tuple(OPTIMIZERS)
