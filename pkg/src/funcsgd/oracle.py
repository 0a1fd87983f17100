"""Exact first and second moments of the SGD error for Gaussian coordinates.

With ``delta_t = b_t - beta*``, ``D = diag(lam_K)``, ``C = diag(lam_C)`` and
``x ~ N(0, C)`` one update reads ``delta' = delta - eta (<delta, x> - eps) D x``.
Isserlis' theorem closes the second moment:
``E[<delta, x>^2 x x^T] = tr(C M) C + 2 C M C``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .engine import Schedule, Trajectory, dyadic_grid
from .errors import UnsupportedError, ValidationError
from .model import ProcessSpec, SlopeCoefficients
from .spectral import SpectralModel

MAX_DIM = 100
MAX_STEPS = 10 ** 4


@dataclass(frozen=True)
class MomentState:
    mean_dev: np.ndarray
    second_moment: np.ndarray
    t: int = 1

    @classmethod
    def initial(cls, slope: SlopeCoefficients) -> "MomentState":
        b = np.asarray(slope.coeffs, dtype=float)
        return cls(-b, np.outer(b, b))

    def prediction_error(self, model: SpectralModel) -> float:
        return math.fsum(model.lam_c * np.diag(self.second_moment))

    def estimation_error(self, model: SpectralModel) -> float:
        return math.fsum(np.diag(self.second_moment) / model.lam_k)


def _require_supported(spec: ProcessSpec | None, model: SpectralModel):
    if spec is not None and (spec.law != "gaussian" or spec.normalize):
        raise UnsupportedError(
            f"exact moments need unnormalized Gaussian coordinates, got law={spec.law!r} normalize={spec.normalize}"
        )
    if model.m > MAX_DIM:
        raise UnsupportedError(f"dense moment recursion is limited to m <= {MAX_DIM}, got {model.m}")


def _fourth(M, d, c, sigma2, cross):
    # D [tr(CM) C + cross * C M C + sigma^2 C] D, with D and C diagonal
    trcm = float(np.dot(c, np.diag(M)))
    inner_ = cross * (c[:, None] * M * c[None, :])
    inner_[np.diag_indices_from(inner_)] += (trcm + sigma2) * c
    return d[:, None] * inner_ * d[None, :]


def moment_recursion_step(state: MomentState, eta: float, model: SpectralModel, slope: SlopeCoefficients,
                          sigma: float, spec: ProcessSpec | None = None) -> MomentState:
    """Propagate mean and second moment of ``b_t - beta*`` through one update."""
    _require_supported(spec, model)
    if slope.m != model.m:
        raise ValidationError("slope and model dimensions differ")
    d, c = model.lam_k, model.lam_c
    M = state.second_moment
    dc = d * c
    mean = state.mean_dev - eta * dc * state.mean_dev
    drift = dc[:, None] * M
    M2 = M - eta * (drift + drift.T) + eta ** 2 * _fourth(M, d, c, sigma ** 2, 2.0)
    M2 = 0.5 * (M2 + M2.T)
    return MomentState(mean, M2, state.t + 1)


def _check_cost(horizon):
    if horizon > MAX_STEPS:
        raise UnsupportedError(f"moment recursion is limited to T <= {MAX_STEPS}, got {horizon}")


def oracle_trajectory(model: SpectralModel, slope: SlopeCoefficients, sigma: float, schedule: Schedule,
                      horizon: int, record_at=None, spec: ProcessSpec | None = None) -> Trajectory:
    """Exact expected errors after ``t`` updates, on the same grid as :func:`engine.run`."""
    _require_supported(spec, model)
    _check_cost(horizon)
    pts = sorted({int(t) for t in (record_at if record_at is not None else dyadic_grid(horizon))})
    state = MomentState.initial(slope)
    pred, est = [], []
    done = 0
    for target in pts:
        while done < target:
            state = moment_recursion_step(state, schedule.step(done + 1), model, slope, sigma)
            done += 1
        pred.append(state.prediction_error(model))
        est.append(state.estimation_error(model))
    return Trajectory(np.array(pts, dtype=np.int64), np.array(pred), np.array(est))


class Decomposition(NamedTuple):
    total: float
    bias: float
    variance: float
    gap: float

    @property
    def rel_gap(self) -> float:
        return self.gap / self.total if self.total > 0 else self.gap


def decomposition_check(model: SpectralModel, slope: SlopeCoefficients, sigma: float, schedule: Schedule,
                        t: int, spec: ProcessSpec | None = None) -> Decomposition:
    """Split the expected prediction error after ``t`` updates into bias and variance.

    ``total`` comes from the second-moment recursion, ``bias`` from the
    deterministic product ``prod_k (1 - eta_k mu_i)``. Their difference is
    compared with a separately accumulated covariance ``V' = A V A + Q_t``,
    where ``Q_t`` is the covariance of the martingale increment.
    """
    _require_supported(spec, model)
    _check_cost(t)
    d, c = model.lam_k, model.lam_c
    mu = d * c
    b = np.asarray(slope.coeffs, dtype=float)
    state = MomentState.initial(slope)
    V = np.zeros((model.m, model.m))
    shrink = np.ones(model.m)
    for k in range(1, t + 1):
        eta = schedule.step(k)
        a = 1.0 - eta * mu
        Q = eta ** 2 * _fourth(state.second_moment, d, c, sigma ** 2, 1.0)
        V = a[:, None] * V * a[None, :] + Q
        state = moment_recursion_step(state, eta, model, slope, sigma)
        shrink *= a
    total = state.prediction_error(model)
    bias = math.fsum(c * (shrink * b) ** 2)
    variance = total - bias
    independent = math.fsum(c * np.diag(V))
    return Decomposition(total, bias, variance, abs(variance - independent))


class BoundCheck(NamedTuple):
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


def spectral_polynomial_bound_check(a_eigs, etas, a: int, b: int, alpha: float) -> BoundCheck:
    """``max_i [lam_i^alpha prod_{j=a}^b (1 - eta_j lam_i)]^2`` against its closed-form bound.

    ``etas`` is indexed from 1; the product is empty when ``a > b``.
    """
    lam = np.asarray(a_eigs, dtype=float)
    if lam.ndim != 1 or lam.size == 0 or np.any(lam < 0):
        raise ValidationError("operator eigenvalues must be a non-empty non-negative sequence")
    if not alpha >= 0:
        raise ValidationError(f"alpha must be non-negative, got {alpha}")
    eta_all = np.asarray(etas, dtype=float)
    if a <= b:
        if a < 1 or b > eta_all.size:
            raise ValidationError(f"indices [{a}, {b}] fall outside the step sequence of length {eta_all.size}")
        eta = eta_all[a - 1:b]
    else:
        eta = eta_all[:0]
    top = float(lam.max())
    if np.any(eta < 0) or (top > 0 and np.any(eta > (1.0 / top) * (1 + 1e-12))):
        raise ValidationError("every step must lie in [0, 1/||A||]")
    prod = np.prod(1.0 - np.outer(lam, eta), axis=1) if eta.size else np.ones_like(lam)
    lhs = float(np.max((lam ** alpha * prod) ** 2))
    total = math.fsum(eta)
    rhs = ((alpha / math.e) ** (2 * alpha) + top ** (2 * alpha)) / (1 + total ** (2 * alpha))
    return BoundCheck(lhs, rhs)
