import numpy as np
import pytest

from ckfit import datagen
from ckfit.basis import Basis
from ckfit.errors import ConditioningError, UsageError
from ckfit.loss import LossConfig, grad_total, l2_loss
from ckfit.lsqfit import baselines, fit_segmentwise, lstsq_qr
from ckfit.ppmodel import PiecewisePolynomial, SampleSet, uniform_knots


@pytest.mark.parametrize("basis", list(Basis))
@pytest.mark.parametrize("m", [1, 2, 3])
def test_exact_recovery(basis, m, rng):
    truth = PiecewisePolynomial(uniform_knots(m), rng.uniform(-3, 3, (m, 8)), basis)
    xs = np.linspace(0, 2 * m, 40 * m)
    data = SampleSet(xs, truth(xs))
    fit = fit_segmentwise(data, uniform_knots(m), 7, basis)
    assert l2_loss(fit, data) < 1e-18
    np.testing.assert_allclose(fit.coeffs, truth.coeffs, atol=1e-9)


def test_three_collinear_points():
    data = SampleSet([0.0, 1.0, 2.0], [1.0, 3.0, 5.0])
    fit = fit_segmentwise(data, uniform_knots(1), 1, Basis.POWER)
    # local coordinate x - 1: y = 3 + 2 (x - 1)
    np.testing.assert_allclose(fit.coeffs[0], [3.0, 2.0], atol=1e-14)
    assert l2_loss(fit, data) < 1e-28


def test_dataset_a_optimum(dataset_a):
    fit = fit_segmentwise(dataset_a, uniform_knots(2), 7)
    assert l2_loss(fit, dataset_a) < 1e-18


@pytest.mark.parametrize("name", ["A", "B", "C"])
@pytest.mark.parametrize("noise", [0.0, 0.1])
def test_basis_independence(name, noise):
    spec = datagen.preset(name, noise)
    data = datagen.generate(spec)
    knots = uniform_knots(spec.m)
    cheb = fit_segmentwise(data, knots, 7, "cheb")
    power = fit_segmentwise(data, knots, 7, "power")
    xs = np.linspace(0, 2 * spec.m, 301)
    ref = np.maximum(np.abs(cheb(xs)), 1e-3)
    assert np.max(np.abs(cheb(xs) - power(xs)) / ref) < 1e-8


@pytest.mark.parametrize("name", ["A", "B", "C"])
@pytest.mark.parametrize("noise", [0.0, 0.1, 0.5])
def test_baseline_ordering(name, noise):
    spec = datagen.preset(name, noise)
    rep = baselines(datagen.generate(spec), uniform_knots(spec.m), 7, "cheb", 3)
    assert rep.l2_star <= rep.l2_star_tilde


@pytest.mark.parametrize("name, ref_star, ref_tilde", [("B", 2.240e-11, 3.630e-7), ("C", 3.540e-6, 4.230e-2)])
@pytest.mark.parametrize("basis", list(Basis))
def test_table_baselines(name, ref_star, ref_tilde, basis):
    spec = datagen.preset(name)
    rep = baselines(datagen.generate(spec), uniform_knots(spec.m), 7, basis, 3)
    assert ref_star / 10 < rep.l2_star < ref_star * 10
    assert ref_tilde / 10 < rep.l2_star_tilde < ref_tilde * 10


def test_single_segment_baselines_equal(dataset_a_noisy):
    raw = datagen.sample(datagen.preset("A", 0.5))
    data = raw.rescaled(1)
    rep = baselines(data, uniform_knots(1), 7, "cheb", 3)
    assert rep.l2_star == rep.l2_star_tilde


def test_stationary_point(dataset_a_noisy):
    fit = fit_segmentwise(dataset_a_noisy, uniform_knots(2), 7)
    assert np.abs(grad_total(fit, dataset_a_noisy, LossConfig(0.0))).max() < 1e-9


def test_underdetermined_segment_named():
    data = SampleSet(np.r_[np.linspace(0, 2, 10), [3.0, 3.5]], np.zeros(12))
    with pytest.raises(ConditioningError, match="segment 1"):
        fit_segmentwise(data, uniform_knots(2), 7)


def test_baselines_degree_too_low(dataset_a):
    with pytest.raises(UsageError, match="degree"):
        baselines(dataset_a, uniform_knots(2), 5, "cheb", 3)


def test_lstsq_rank_deficient():
    a = np.ones((5, 2))
    with pytest.raises(ConditioningError):
        lstsq_qr(a, np.arange(5.0))


def test_lstsq_matches_numpy(rng):
    a = rng.normal(size=(30, 6))
    y = rng.normal(size=30)
    np.testing.assert_allclose(lstsq_qr(a, y), np.linalg.lstsq(a, y, rcond=None)[0], atol=1e-12)
