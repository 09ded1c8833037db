import dataclasses

import numpy as np
import pytest

from ckfit import datagen
from ckfit.errors import DivergenceError, UsageError
from ckfit.loss import LossConfig, LossModel, total_loss
from ckfit.lsqfit import fit_segmentwise
from ckfit.ppmodel import SampleSet, uniform_knots
from ckfit.train import Init, TrainConfig, initialize, train


@pytest.fixture(scope="module")
def a_noise01():
    return datagen.sample(datagen.preset("A", 0.1)).rescaled(1)


def test_initialize_strategies(dataset_a):
    knots = uniform_knots(2)
    zero = initialize(dataset_a, knots, 7, "cheb", Init.ZERO)
    assert not zero.coeffs.any()
    l2 = initialize(dataset_a, knots, 7, "cheb", "l2")
    np.testing.assert_array_equal(l2.coeffs, fit_segmentwise(dataset_a, knots, 7).coeffs)
    r1 = initialize(dataset_a, knots, 7, "cheb", "random", rng_seed=5)
    r2 = initialize(dataset_a, knots, 7, "cheb", "random", rng_seed=5)
    r3 = initialize(dataset_a, knots, 7, "cheb", "random", rng_seed=6)
    assert r1.coeffs.tobytes() == r2.coeffs.tobytes() != r3.coeffs.tobytes()
    assert np.abs(r1.coeffs).max() <= 1.0


def test_l2_init_interpolates_exact_data():
    xs = np.linspace(0, 2, 20)
    data = SampleSet(xs, 1 + xs - xs ** 3)
    pp = initialize(data, uniform_knots(1), 3, "power")
    np.testing.assert_allclose(pp(xs), data.ys, atol=1e-12)


@pytest.mark.parametrize("kwargs", [dict(lr=0), dict(epochs=0), dict(patience=-1),
                                    dict(patience=20, epochs=10), dict(optimizer="lbfgs")])
def test_config_validation(kwargs):
    with pytest.raises(UsageError):
        TrainConfig(**kwargs)


def test_config_round_trip():
    cfg = TrainConfig(optimizer="adam", init="zero", loss=LossConfig(0.3, 2, "cyclic"))
    again = TrainConfig(**{**cfg.to_dict(), "loss": cfg.to_dict()["loss"]})
    assert again == cfg


def test_sgd_converges_monotonically(a_noise01):
    cfg = TrainConfig("sgd", lr=0.05, epochs=20000, patience=0, init="zero", loss=LossConfig(0.0))
    trace, pp = train(a_noise01, uniform_knots(1), 3, "cheb", cfg)
    assert np.all(np.diff(trace.total) <= 1e-15)
    star = fit_segmentwise(a_noise01, uniform_knots(1), 3)
    from ckfit.loss import l2_loss
    assert trace.best_total - l2_loss(star, a_noise01) < 1e-6


def test_sgd_linear_rate():
    # 1-D quadratic l2 loss: f(c) = (c - 1)^2 with gradient 2 (c - 1); the gap
    # contracts by (1 - 2 lr)^2 per step
    data = SampleSet([1.0], [1.0])
    lr = 0.05
    cfg = TrainConfig("sgd", lr=lr, epochs=101, patience=0, init="zero", loss=LossConfig(0.0, 0))
    trace, _ = train(data, uniform_knots(1), 0, "power", cfg)
    per_step = (1 - 2 * lr) ** 2
    halving = np.log(0.5) / np.log(per_step)
    observed = np.log(trace.total[100] / trace.total[0]) / np.log(0.5)
    assert observed == pytest.approx(100 / halving, rel=0.05)


def test_patience_stops_on_plateau():
    # the all-zero init is already optimal, so the loss cannot improve after epoch 1
    data = SampleSet([0.5, 1.5], [0.0, 0.0])
    cfg = TrainConfig("sgd", lr=0.1, epochs=50, patience=1, init="zero", loss=LossConfig(0.0, 0))
    trace, _ = train(data, uniform_knots(1), 1, "cheb", cfg)
    assert trace.stopped_early
    assert trace.epochs == [1, 2]
    assert trace.best_epoch == 1


def test_patience_disabled_runs_all_epochs():
    data = SampleSet([0.5, 1.5], [0.0, 0.0])
    cfg = TrainConfig("sgd", lr=0.1, epochs=30, patience=0, init="zero", loss=LossConfig(0.0, 0))
    trace, _ = train(data, uniform_knots(1), 1, "cheb", cfg)
    assert len(trace.epochs) == 30 and not trace.stopped_early


def test_revert_to_best(dataset_a_noisy):
    # Nadam overshoots after ~120 epochs here, so the last epoch is not the best
    cfg = TrainConfig("nadam", lr=0.1, epochs=300, patience=0, init="l2", loss=LossConfig(0.1))
    trace, pp = train(dataset_a_noisy, uniform_knots(2), 7, "cheb", cfg)
    assert trace.best_epoch < trace.epochs[-1]
    assert trace.best_total == min(trace.total)
    assert abs(total_loss(pp, dataset_a_noisy, cfg.loss) - trace.best_total) < 1e-12
    np.testing.assert_array_equal(pp.theta, trace.best_coefficients)


def test_divergence_raises(dataset_a_noisy):
    cfg = TrainConfig("sgd", lr=10.0, epochs=2000, patience=0, init="zero", loss=LossConfig(0.1))
    with pytest.raises(DivergenceError) as info:
        train(dataset_a_noisy, uniform_knots(2), 7, "cheb", cfg)
    assert info.value.epoch > 1
    assert "epoch" in str(info.value)


def test_deterministic(dataset_a_noisy):
    cfg = TrainConfig("nadam", lr=0.1, epochs=200, patience=50, init="random", rng_seed=3)
    a, pa = train(dataset_a_noisy, uniform_knots(2), 7, "cheb", cfg)
    b, pb = train(dataset_a_noisy, uniform_knots(2), 7, "cheb", cfg)
    assert a.total == b.total and pa.theta.tobytes() == pb.theta.tobytes()


def test_trace_first_epoch_is_initial_loss(dataset_a_noisy):
    cfg = TrainConfig("adam", epochs=5, patience=0)
    trace, _ = train(dataset_a_noisy, uniform_knots(2), 7, "cheb", cfg)
    init = fit_segmentwise(dataset_a_noisy, uniform_knots(2), 7)
    expected = LossModel.for_pp(init, dataset_a_noisy, cfg.loss).components(init.theta)
    assert (trace.total[0], trace.l2[0], trace.lck[0]) == expected


@pytest.mark.slow
def test_amsgrad_margin_band(dataset_a_noisy):
    from ckfit.ckmin import ckmin
    from ckfit.loss import l2_loss
    from ckfit.lsqfit import baselines
    cfg = TrainConfig()
    trace, pp = train(dataset_a_noisy, uniform_knots(2), 7, "cheb", cfg)
    rep = baselines(dataset_a_noisy, uniform_knots(2), 7, "cheb", 3)
    post = l2_loss(ckmin(pp, 3), dataset_a_noisy)
    assert rep.l2_star <= post <= rep.l2_star_tilde
    assert trace.best_total < total_loss(rep.corrected, dataset_a_noisy, cfg.loss)


def test_replace_keeps_validation():
    with pytest.raises(UsageError):
        dataclasses.replace(TrainConfig(), epochs=0)
