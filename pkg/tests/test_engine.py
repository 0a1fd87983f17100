import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from funcsgd import backend
from funcsgd.engine import (Schedule, SgdState, dyadic_grid, run, run_replications, sgd_step,
                            theta_for_estimation, theta_for_prediction)
from funcsgd.errors import DomainError, NumericError, UnsupportedError, ValidationError
from funcsgd.model import ProcessSpec, SlopeCoefficients, build_slope, covariates_from_raw, draw_raw, replication_stream
from funcsgd.spectral import EigenDecay, SpectralModel

BACKENDS = backend.available()


def test_sgd_step_examples():
    s = sgd_step(SgdState(np.array([1.0])), [1.0], 1.0, 0.5, [1.0])
    assert s.coeffs.tolist() == [1.0] and s.t == 2
    s = sgd_step(SgdState(np.zeros(2)), [1.0, 2.0], 3.0, 0.1, [1.0, 0.5])
    np.testing.assert_allclose(s.coeffs, [0.3, 0.3], rtol=1e-15)
    assert s.step_sum == 0.1


def test_sgd_step_from_zero():
    x = np.array([0.3, -1.2, 0.5])
    lam = np.array([1.0, 0.5, 0.2])
    s = sgd_step(SgdState.zero(3), x, 0.7, 0.25, lam)
    np.testing.assert_allclose(s.coeffs, 0.25 * 0.7 * lam * x, rtol=1e-15)


def test_sgd_step_errors():
    with pytest.raises(ValidationError):
        sgd_step(SgdState.zero(2), [1.0], 1.0, 0.1, [1.0, 1.0])
    with pytest.raises(NumericError) as exc:
        sgd_step(SgdState(np.array([np.inf]), t=7), [1.0], 1.0, 0.1, [1.0])
    assert exc.value.step == 7


def test_theta_examples():
    assert theta_for_prediction(0.25, 1) == pytest.approx(1 / 3)
    assert theta_for_prediction(2, 0.5) == pytest.approx(0.6)
    assert theta_for_estimation(0.1, 0.2) == pytest.approx(0.4 / 1.4)
    assert theta_for_estimation(1, 0.5) == 0.5
    with pytest.raises(UnsupportedError):
        theta_for_estimation(1, 1)
    for bad in ((0, 0.5), (1, 0), (1, 1.2)):
        with pytest.raises(DomainError):
            theta_for_prediction(*bad)


def test_theta_seams():
    r, s = 0.75, 0.5
    assert 2 * r / (2 * r + 1) == pytest.approx((2 - s) / (3 - s), abs=1e-15)
    assert theta_for_prediction(r, s) == pytest.approx(0.6, abs=1e-15)
    r, s = 0.25, 0.5
    assert (2 * r + s) / (2 * r + s + 1) == 0.5 == theta_for_estimation(r, s)


@given(st.floats(0.01, 0.99))
def test_theta_continuity(s):
    r_pred = (2 - s) / 2
    eps = 1e-9
    assert abs(theta_for_prediction(r_pred - eps, s) - theta_for_prediction(r_pred + eps, s)) < 1e-8
    r_est = (1 - s) / 2
    assert abs(theta_for_estimation(r_est - eps, s) - theta_for_estimation(r_est + eps, s)) < 1e-8


def test_schedule():
    sch = Schedule.online(0.5, 0.5)
    assert sch.step(4) == 0.25
    np.testing.assert_allclose(sch.steps(1, 5), 0.5 * np.arange(1, 5.0) ** -0.5)
    fh = Schedule.finite_horizon(1.0, 16, 0.5)
    assert fh.step(3) == 0.25 and fh.max_step == 0.25
    with pytest.raises(ValidationError):
        Schedule.online(-1.0, 0.5)
    with pytest.raises(ValidationError):
        Schedule.online(1.0, 1.0)
    with pytest.raises(ValidationError):
        Schedule.finite_horizon(1.0, 0, 0.5)
    with pytest.raises(ValidationError, match="exceeds"):
        Schedule.online(0.6, 0.5).check(kappa2=2.0)
    Schedule.online(0.5, 0.5).check(kappa2=2.0)


def test_dyadic_grid():
    assert dyadic_grid(10) == [1, 2, 4, 8, 10]
    assert dyadic_grid(8, include_zero=True) == [0, 1, 2, 4, 8]


def _small_model(m=6):
    model = SpectralModel(EigenDecay.power(1.5, m=m), EigenDecay.power(1.2, m=m))
    return model, build_slope(model, 0.6)


@pytest.mark.parametrize("be", BACKENDS)
def test_record_zero_is_initial_error(be):
    model, slope = _small_model()
    tr = run(model, slope, ProcessSpec(noise_std=1.0), Schedule.online(0.5, 0.5), 10, record_at=[0, 10], backend=be)
    assert tr.prediction[0] == pytest.approx(slope.prediction_norm2(model), rel=1e-15)
    assert tr.estimation[0] == pytest.approx(slope.rkhs_norm2(model), rel=1e-15)


@pytest.mark.parametrize("be", BACKENDS)
def test_scalar_contraction_closed_form(be):
    model = SpectralModel.from_arrays([1.0], [1.0])
    slope = SlopeCoefficients.explicit([1.0])
    spec = ProcessSpec(normalize=True, noise_std=0.0)
    n = 12
    tr = run(model, slope, spec, Schedule.finite_horizon(0.5, n, 0.0), n, record_at=range(n + 1), backend=be)
    expected = 2.0 ** (-2 * np.arange(n + 1))
    assert np.array_equal(tr.prediction, expected)
    assert np.all(np.diff(tr.prediction) < 0)


@pytest.mark.parametrize("be", BACKENDS)
def test_no_op_schedule(be):
    model, slope = _small_model()
    tr = run(model, slope, ProcessSpec(noise_std=1.0), Schedule.online(0.0, 0.3), 64, backend=be)
    assert np.all(tr.prediction == tr.prediction[0])


@pytest.mark.parametrize("be", BACKENDS)
def test_fixed_point_exact_zero_noise(be):
    # starting at beta* with no noise every residual is exactly zero
    model, slope = _small_model()
    impl = backend.get(be)
    coeffs = np.tile(slope.coeffs, (2, 1))
    x = np.random.default_rng(0).standard_normal((2, 50, model.m))
    impl.sgd_block(coeffs, x, np.zeros((2, 50)), np.ascontiguousarray(slope.coeffs), np.ascontiguousarray(model.lam_k),
                   np.full(50, 0.3))
    assert np.array_equal(coeffs, np.tile(slope.coeffs, (2, 1)))


@pytest.mark.parametrize("be", BACKENDS)
def test_linearity(be):
    model, slope = _small_model()
    sch = Schedule.online(0.7, 0.4)
    impl = backend.get(be)
    rng = np.random.default_rng(1)
    x = rng.standard_normal((1, 100, model.m)) * np.sqrt(model.lam_c)
    eps = rng.standard_normal((1, 100))
    out = []
    for c in (1.0, 2.0):
        coeffs = np.zeros((1, model.m))
        impl.sgd_block(coeffs, x, c * eps, np.ascontiguousarray(c * slope.coeffs), np.ascontiguousarray(model.lam_k),
                       sch.steps(1, 101))
        out.append(coeffs[0])
    np.testing.assert_allclose(out[1], 2 * out[0], rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("be", BACKENDS)
def test_permutation_invariance(be):
    lk = np.array([1.0, 0.5, 0.25, 0.1])
    lc = np.array([0.8, 0.3, 0.6, 0.05])
    beta = np.array([0.5, -1.0, 0.2, 0.7])
    perm = np.array([2, 0, 3, 1])
    impl = backend.get(be)
    rng = np.random.default_rng(2)
    z = rng.standard_normal((1, 200, 4))
    eps = rng.standard_normal((1, 200))
    errs = []
    for p in (np.arange(4), perm):
        coeffs = np.zeros((1, 4))
        x = np.ascontiguousarray(z[:, :, p] * np.sqrt(lc[p]))
        impl.sgd_block(coeffs, x, eps, beta[p].copy(), lk[p].copy(), np.full(200, 0.3))
        errs.append(math.fsum(lc[p] * (coeffs[0] - beta[p]) ** 2))
    assert errs[0] == pytest.approx(errs[1], rel=1e-12)


def test_expectation_recursion_monte_carlo():
    model, slope = _small_model(4)
    sch = Schedule.online(0.8, 0.5)
    T, N = 30, 20000
    impl = backend.default
    coeffs = np.zeros((N, model.m))
    rng = replication_stream(11, 0)
    raw = draw_raw(rng, model.m, N * T).reshape(N, T, model.m + 1)
    x = np.ascontiguousarray(covariates_from_raw(model, ProcessSpec(), raw))
    noise = np.ascontiguousarray(raw[:, :, model.m])
    impl.sgd_block(coeffs, x, noise, np.ascontiguousarray(slope.coeffs), np.ascontiguousarray(model.lam_k),
                   sch.steps(1, T + 1))
    dev = coeffs - slope.coeffs
    expected = -np.prod(1 - sch.steps(1, T + 1)[:, None] * model.mu, axis=0) * slope.coeffs
    se = dev.std(axis=0, ddof=1) / math.sqrt(N)
    assert np.all(np.abs(dev.mean(axis=0) - expected) <= 4 * se)


@pytest.mark.parametrize("be", BACKENDS)
def test_run_deterministic_and_independent_of_grouping(be):
    model, slope = _small_model()
    spec = ProcessSpec(noise_std=0.5, seed=42)
    sch = Schedule.online(0.6, 0.5)
    a = run_replications(model, slope, spec, sch, 300, range(10), backend=be, group=3, block=17)
    b = run_replications(model, slope, spec, sch, 300, range(10), backend=be, group=10, block=300, threads=2)
    assert np.array_equal(a[1], b[1]) and np.array_equal(a[2], b[2])
    single = run(model, slope, spec, sch, 300, replication=7, backend=be)
    assert np.array_equal(single.prediction, a[1][7])


def test_backends_agree():
    if len(BACKENDS) < 2:
        pytest.skip("compiled backend not built")
    model, slope = _small_model(12)
    spec = ProcessSpec(noise_std=1.0, seed=3)
    sch = Schedule.online(0.5, 0.4)
    a = run_replications(model, slope, spec, sch, 500, range(8), backend="cython")
    b = run_replications(model, slope, spec, sch, 500, range(8), backend="python")
    np.testing.assert_allclose(a[1], b[1], rtol=1e-9)
    np.testing.assert_allclose(a[2], b[2], rtol=1e-9)


def test_run_validation():
    model, slope = _small_model()
    spec = ProcessSpec()
    with pytest.raises(ValidationError):
        run(model, slope, spec, Schedule.finite_horizon(0.5, 10, 0.5), 11)
    with pytest.raises(ValidationError):
        run(model, slope, spec, Schedule.online(0.5, 0.5), 10, record_at=[11])
    with pytest.raises(ValidationError):
        run(model, SlopeCoefficients.explicit([1.0]), spec, Schedule.online(0.5, 0.5), 10)


@pytest.mark.parametrize("be", BACKENDS)
def test_divergence_reports_step(be):
    model = SpectralModel.from_arrays([1.0, 1.0], [1.0, 1.0])
    slope = SlopeCoefficients.explicit([1.0, 1.0])
    # eta = 1 on unit kernel with Gaussian x explodes, but the clamp allows it
    with pytest.raises(NumericError) as exc:
        run(model, slope, ProcessSpec(noise_std=1.0), Schedule.online(1.0, 0.0), 20000, backend=be)
    assert exc.value.step is not None and exc.value.step >= 1
