"""SGD recursion in coordinate form and its step-size schedules."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import backend as _backend
from .errors import IllPosedError, NumericError, ValidationError
from .model import ProcessSpec, SlopeCoefficients, covariates_from_raw, draw_raw, inner, replication_stream
from .spectral import SpectralModel
from .theory import theta_for_estimation, theta_for_prediction  # noqa: F401  (re-exported)

__all__ = [
    "Schedule",
    "SgdState",
    "Trajectory",
    "sgd_step",
    "run",
    "run_replications",
    "dyadic_grid",
    "theta_for_prediction",
    "theta_for_estimation",
]

_CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class Schedule:
    """Online ``eta0 * t**-theta`` or finite-horizon constant ``eta0 * T**-exponent``."""

    kind: str
    eta0: float
    theta: float = 0.0
    horizon: int | None = None
    exponent: float = 0.0

    def __post_init__(self):
        if self.kind not in ("online", "finite_horizon"):
            raise ValidationError(f"unknown schedule kind {self.kind!r}")
        # eta0 = 0 is accepted as the no-op schedule
        if not (self.eta0 >= 0 and math.isfinite(self.eta0)):
            raise ValidationError(f"eta0 must be finite and non-negative, got {self.eta0}")
        if not (0 <= self.theta < 1):
            raise ValidationError(f"theta must lie in [0, 1), got {self.theta}")
        if self.kind == "finite_horizon":
            if self.horizon is None or int(self.horizon) < 1:
                raise ValidationError("finite-horizon schedules need a horizon T >= 1")
            if not self.exponent >= 0:
                raise ValidationError("finite-horizon exponent must be non-negative")

    @classmethod
    def online(cls, eta0: float, theta: float) -> "Schedule":
        return cls("online", float(eta0), float(theta))

    @classmethod
    def finite_horizon(cls, eta0: float, horizon: int, exponent: float) -> "Schedule":
        return cls("finite_horizon", float(eta0), 0.0, int(horizon), float(exponent))

    @property
    def max_step(self) -> float:
        if self.kind == "online":
            return self.eta0
        return self.eta0 * float(self.horizon) ** (-self.exponent)

    def step(self, t: int) -> float:
        if t < 1:
            raise ValidationError("step index starts at 1")
        if self.kind == "online":
            return self.eta0 * float(t) ** (-self.theta)
        return self.max_step

    def steps(self, start: int, stop: int) -> np.ndarray:
        """Step sizes for ``t = start, ..., stop - 1``."""
        t = np.arange(start, stop, dtype=float)
        if self.kind == "online":
            return self.eta0 * t ** (-self.theta)
        return np.full(t.shape, self.max_step)

    def check(self, kappa2: float) -> "Schedule":
        """Reject schedules whose largest step exceeds ``min(1, 1/kappa^2)``."""
        cap = min(1.0, 1.0 / kappa2)
        if self.max_step > cap * (1 + _CLAMP_TOL):
            raise ValidationError(
                f"largest step {self.max_step:g} exceeds min(1, 1/kappa^2) = {cap:g}"
            )
        return self

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "eta0": self.eta0}
        if self.kind == "online":
            d["theta"] = self.theta
        else:
            d.update(horizon=int(self.horizon), exponent=self.exponent)
        return d


@dataclass(frozen=True)
class SgdState:
    coeffs: np.ndarray
    t: int = 1
    step_sum: float = 0.0

    @classmethod
    def zero(cls, m: int) -> "SgdState":
        return cls(np.zeros(m))


def sgd_step(state: SgdState, x, y: float, eta: float, kernel_eigs) -> SgdState:
    """One update ``b <- b - eta (<b, x> - y) lam_K * x``."""
    x = np.asarray(x, dtype=float)
    lam_k = np.asarray(kernel_eigs, dtype=float)
    b = np.asarray(state.coeffs, dtype=float)
    if not (x.shape == b.shape == lam_k.shape) or b.ndim != 1:
        raise ValidationError(f"dimension mismatch: coeffs {b.shape}, x {x.shape}, kernel {lam_k.shape}")
    if not eta >= 0:
        raise ValidationError(f"step size must be non-negative, got {eta}")
    res = inner(b, x) - y
    if not math.isfinite(res):
        raise NumericError(f"non-finite residual at step {state.t}", step=state.t)
    return SgdState(b - eta * res * lam_k * x, state.t + 1, state.step_sum + eta)


def dyadic_grid(horizon: int, include_zero: bool = False) -> list[int]:
    """``1, 2, 4, ...`` up to ``horizon`` plus ``horizon`` itself."""
    pts = set()
    t = 1
    while t <= horizon:
        pts.add(t)
        t *= 2
    if horizon >= 1:
        pts.add(int(horizon))
    if include_zero:
        pts.add(0)
    return sorted(pts)


class Trajectory(NamedTuple):
    """Errors after ``t`` updates, ``t`` as recorded (``t = 0`` is the zero iterate)."""

    t: np.ndarray
    prediction: np.ndarray
    estimation: np.ndarray


def _validate_run(model, slope, schedule, horizon, record_at):
    if slope.m != model.m:
        raise ValidationError(f"slope has {slope.m} coefficients, model has {model.m}")
    if int(horizon) < 0:
        raise ValidationError("horizon must be non-negative")
    if schedule.kind == "finite_horizon" and int(horizon) != int(schedule.horizon):
        raise ValidationError(f"finite-horizon schedule built for T={schedule.horizon}, run asked for {horizon}")
    schedule.check(model.kappa2)
    if np.any(model.lam_k == 0):
        raise IllPosedError("estimation error needs every kernel eigenvalue to be positive")
    pts = sorted({int(t) for t in (record_at if record_at is not None else dyadic_grid(horizon))})
    if pts and (pts[0] < 0 or pts[-1] > horizon):
        raise ValidationError(f"record points must lie in [0, {horizon}]")
    return pts


def _run_group(model, slope, spec, schedule, horizon, reps, pts, impl, block):
    R, m = len(reps), model.m
    rngs = [replication_stream(spec.seed, rep) for rep in reps]
    coeffs = np.zeros((R, m))
    beta = np.ascontiguousarray(slope.coeffs)
    lam_k = np.ascontiguousarray(model.lam_k)
    w_pred = np.ascontiguousarray(model.lam_c)
    w_est = np.ascontiguousarray(1.0 / model.lam_k)
    pred = np.empty((R, len(pts)))
    est = np.empty((R, len(pts)))
    done = 0  # updates applied so far
    for j, target in enumerate(pts):
        while done < target:
            n = min(block, target - done)
            raw = np.stack([draw_raw(g, m, n) for g in rngs])
            x = np.ascontiguousarray(covariates_from_raw(model, spec, raw))
            noise = np.ascontiguousarray(spec.noise_std * raw[:, :, m])
            etas = schedule.steps(done + 1, done + n + 1)
            bad = impl.sgd_block(coeffs, x, noise, beta, lam_k, etas)
            if bad is not None:
                r, off = bad
                raise NumericError(
                    f"non-finite residual in replication {reps[r]} at step {done + off + 1}",
                    step=done + off + 1,
                )
            done += n
        pred[:, j] = impl.weighted_sq_sums(coeffs, beta, w_pred)
        est[:, j] = impl.weighted_sq_sums(coeffs, beta, w_est)
        bad_rows = ~(np.isfinite(pred[:, j]) & np.isfinite(est[:, j]))
        if bad_rows.any():
            rep = reps[int(np.argmax(bad_rows))]
            raise NumericError(f"error overflowed in replication {rep} by step {target}; "
                               "the step size is likely too large", step=target)
    return pred, est


def run(model: SpectralModel, slope: SlopeCoefficients, spec: ProcessSpec, schedule: Schedule,
        horizon: int, record_at=None, replication: int = 0, backend=None, block: int = 4096) -> Trajectory:
    """Run ``horizon`` updates from the zero iterate on one replication stream."""
    pts = _validate_run(model, slope, schedule, horizon, record_at)
    impl = _backend.get(backend)
    pred, est = _run_group(model, slope, spec, schedule, int(horizon), [replication], pts, impl, block)
    return Trajectory(np.array(pts, dtype=np.int64), pred[0], est[0])


def run_replications(model: SpectralModel, slope: SlopeCoefficients, spec: ProcessSpec, schedule: Schedule,
                     horizon: int, replications, record_at=None, threads: int = 1, backend=None,
                     group: int | None = None, block: int | None = None):
    """Run many replications; returns ``(t, prediction, estimation)`` with one row per replication.

    Replications are processed in groups that share one vectorized kernel call;
    groups are spread over ``threads`` workers and reassembled in replication order.
    """
    reps = [int(r) for r in replications]
    if len(reps) != len(set(reps)):
        raise ValidationError("replication indices must be distinct")
    pts = _validate_run(model, slope, schedule, horizon, record_at)
    impl = _backend.get(backend)
    m = model.m
    if group is None:
        group = 64 if impl.NAME == "python" else 16
    if block is None:
        # keep one group's draw buffer around 32 MB
        block = max(1, min(4096, (4 << 20) // max(1, group * (m + 1))))
    chunks = [reps[i:i + group] for i in range(0, len(reps), group)]

    def work(ch):
        return _run_group(model, slope, spec, schedule, int(horizon), ch, pts, impl, block)

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(ch) for ch in chunks]
    pred = np.concatenate([p for p, _ in parts]) if parts else np.empty((0, len(pts)))
    est = np.concatenate([e for _, e in parts]) if parts else np.empty((0, len(pts)))
    return np.array(pts, dtype=np.int64), pred, est
