"""Closed-form exponents, step-size sums, integral bounds and theorem constants.

Piecewise definitions use overlapping domains; on a tie the first listed
branch is evaluated (all branches agree on the seams).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate

from . import backend as _backend
from .errors import DomainError, NumericError, UnsupportedError, ValidationError
from .spectral import SpectralModel, composite_eigs, effective_dimension, power_tail, trace_power

LOG2 = math.log(2.0)
E = math.e


# ---------------------------------------------------------------------------
# rate exponents


class RateSpec(NamedTuple):
    exponent: float
    log_factor: bool
    constant: float | None = None
    regime: str = ""


def _check_rs(r, s, s_max_open=False):
    if not r > 0:
        raise DomainError(f"regularity r must be positive, got {r}")
    if not (0 < s <= 1):
        raise DomainError(f"capacity s must lie in (0, 1], got {s}")
    if s_max_open and s == 1:
        raise UnsupportedError("the online estimation rate is not available in the capacity-independent case s = 1")


def theta_for_prediction(r: float, s: float) -> float:
    """Online decay exponent for the prediction error: ``min(2r, 2-s) / (1 + min(2r, 2-s))``."""
    _check_rs(r, s)
    if 2 * r <= 2 - s:
        return 2 * r / (2 * r + 1)
    return (2 - s) / (3 - s)


def theta_for_estimation(r: float, s: float) -> float:
    """Online decay exponent for the RKHS-norm error (requires ``s < 1``)."""
    _check_rs(r, s, s_max_open=True)
    if 2 * r <= 1 - s:
        return (2 * r + s) / (2 * r + s + 1)
    return 0.5


def finite_horizon_exponent(theorem: str, r: float, s: float) -> float:
    """Exponent ``e`` in the constant step ``eta0 * T**-e`` for the finite-horizon theorems."""
    _check_rs(r, s)
    if theorem == "prediction":
        return 2 * r / (2 * r + 1)
    if theorem == "estimation":
        return (s + 2 * r) / (1 + s + 2 * r)
    raise ValidationError(f"unknown target {theorem!r}")


def theorem_for(target: str, schedule_kind: str) -> int:
    table = {
        ("prediction", "online"): 1,
        ("prediction", "finite_horizon"): 2,
        ("estimation", "online"): 3,
        ("estimation", "finite_horizon"): 4,
    }
    try:
        return table[(target, schedule_kind)]
    except KeyError:
        raise ValidationError(f"no theorem covers target={target!r} with schedule={schedule_kind!r}") from None


def theorem_rate(theorem: int, r: float, s: float, constant: float | None = None) -> RateSpec:
    """Decay exponent (in ``t+1`` or ``T``) and log flag of the error bound of a theorem."""
    if theorem == 1:
        th = theta_for_prediction(r, s)
        regime = "2r<=2-s" if 2 * r <= 2 - s else "2r>=2-s"
        return RateSpec(-th, s == 1, constant, regime)
    if theorem == 2:
        _check_rs(r, s)
        return RateSpec(-2 * r / (2 * r + 1), s == 1, constant, "finite-horizon")
    if theorem == 3:
        _check_rs(r, s, s_max_open=True)
        if 2 * r < 1 - s:
            return RateSpec(-2 * r / (1 + s + 2 * r), False, constant, "2r<1-s")
        return RateSpec(-(1 - s) / 2, True, constant, "2r>=1-s")
    if theorem == 4:
        _check_rs(r, s)
        return RateSpec(-2 * r / (1 + s + 2 * r), False, constant, "finite-horizon")
    raise ValidationError(f"unknown theorem {theorem!r}")


# ---------------------------------------------------------------------------
# omega(nu, theta) and the log set


def _check_nu_theta(nu, theta):
    if not nu > 0:
        raise DomainError(f"nu must be positive, got {nu}")
    if not (0 < theta < 1):
        raise DomainError(f"theta must lie in (0, 1), got {theta}")


def omega_branches(nu: float, theta: float) -> list[tuple[str, float]]:
    """Every branch of the piecewise exponent whose domain contains ``(nu, theta)``."""
    _check_nu_theta(nu, theta)
    out = []
    if nu <= 1 and theta <= 0.5:
        out.append(("small", 1 - 2 * theta - nu + nu * theta))
    if nu >= 1 and theta <= nu / (nu + 1):
        out.append(("theta", -theta))
    if theta >= 0.5 and theta >= nu / (nu + 1):
        out.append(("nu", -nu * (1 - theta)))
    return out


def in_log_set(nu: float, theta: float) -> bool:
    """``(nu, theta)`` on the segment ``theta = 1/2, nu <= 1`` or ``nu = 1, theta <= 1/2``."""
    return (theta == 0.5 and nu <= 1) or (nu == 1 and theta <= 0.5)


def omega(nu: float, theta: float) -> RateSpec:
    branches = omega_branches(nu, theta)
    name, value = branches[0]
    return RateSpec(value, in_log_set(nu, theta), None, name)


# ---------------------------------------------------------------------------
# the integral of the appendix lemma and its constant


def c0_case(nu: float, theta: float) -> int:
    """Which of the five parameter cases ``(nu, theta)`` belongs to."""
    _check_nu_theta(nu, theta)
    if theta > 0.5 and theta >= nu / (nu + 1):
        return 1
    if nu > 1 and theta < nu / (nu + 1):
        return 2
    if theta < 0.5 and nu < 1:
        return 3
    if theta == 0.5 and nu <= 1:
        return 4
    if nu == 1 and theta < 0.5:
        return 5
    raise AssertionError(f"uncovered parameter point nu={nu}, theta={theta}")  # pragma: no cover


def c0_ol(nu: float, theta: float) -> float:
    """Constant of the integral bound, selected by :func:`c0_case`."""
    case = c0_case(nu, theta)
    head = (1 - 2 ** (theta - 1)) ** (-nu)
    if case == 1:
        if nu == 1:
            tail = 2 ** theta / ((1 - theta) * E * (2 * theta - 1)) * (1 / LOG2 + 1 - theta)
        else:
            tail = 2 ** theta * (nu + 1) / ((1 - theta) * abs(1 - nu))
        return head / (2 * theta - 1) + tail
    if case == 2:
        if theta < 0.5:
            part = 2 ** (2 * theta - 1) / (1 - 2 * theta)
        elif theta == 0.5:
            part = 2 / (E * (nu - 1))
        else:
            part = 1 / (2 * theta - 1)
        return 2 ** theta * nu / ((1 - theta) * (nu - 1)) + head * part
    if case == 3:
        return head * 2 ** (2 * theta - 1) / (1 - 2 * theta) + 2 ** theta / ((1 - theta) * (1 - nu))
    if case == 4:
        if nu == 1:
            return head + 2 ** theta / (1 - theta) * (1 / LOG2 + 1 - theta)
        # |nu - 1|: the upper part of the integral is bounded by 2^theta / ((1-theta)(1-nu)) b^(-nu/2)
        return head + 2 ** theta / ((1 - theta) * (1 - nu) * LOG2)
    return 2 ** theta / (1 - theta) * (1 / LOG2 + 1 - theta) + head * 2 ** (2 * theta - 1) / ((1 - 2 * theta) * LOG2)


def lemma_a1_integrand(u, b, theta, nu):
    gap = np.maximum(b ** (1 - theta) - np.power(u, 1 - theta), 0.0)
    return np.power(u, -2 * theta) / (1 + gap ** nu)


def lemma_a1_integral(b: float, theta: float, nu: float, tol: float = 1e-11) -> float:
    """``int_1^b u^(-2 theta) / (1 + (b^(1-theta) - u^(1-theta))^nu) du`` by adaptive quadrature."""
    _check_nu_theta(nu, theta)
    if not b >= 2:
        raise DomainError(f"upper limit b must be at least 2, got {b}")
    f = lambda u: lemma_a1_integrand(u, b, theta, nu)  # noqa: E731
    # split on a geometric grid: the integrand changes scale near u = 1 and u = b
    edges = np.unique(np.concatenate([[1.0], np.geomspace(1.0, b, 9)[1:-1], [b - (b - 1) * 1e-3, b]]))
    total = 0.0
    err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, e, *info = integrate.quad(f, lo, hi, epsabs=tol * 1e-2, epsrel=tol, limit=400, full_output=1)
        total += val
        err += e
    if err > max(tol * abs(total), 1e-13):
        raise NumericError(f"quadrature did not reach tolerance {tol:g}", achieved=err)
    return total


def lemma_a1_bound(b: float, theta: float, nu: float) -> float:
    """Right-hand side ``C0 * b^omega`` (times ``log b`` on the log set)."""
    rate = omega(nu, theta)
    val = c0_ol(nu, theta) * b ** rate.exponent
    return val * math.log(b) if rate.log_factor else val


# ---------------------------------------------------------------------------
# step-size sums


def online_steps(t: int, eta0: float, theta: float) -> np.ndarray:
    if not (0 <= theta < 1):
        raise DomainError(f"theta must lie in [0, 1), got {theta}")
    if not eta0 > 0:
        raise DomainError(f"eta0 must be positive, got {eta0}")
    if not (1 <= t < 2 ** 63):
        raise ValidationError(f"t must be a positive 64-bit index, got {t}")
    return eta0 * np.arange(1, t + 1, dtype=float) ** (-theta)


def stepsize_sum(t: int, eta0: float, theta: float, nu: float) -> float:
    """``sum_{k<=t} eta_k^2 / (1 + (sum_{j=k+1}^t eta_j)^nu)`` with ``eta_k = eta0 k^-theta``."""
    if not nu > 0:
        raise DomainError(f"nu must be positive, got {nu}")
    eta = online_steps(t, eta0, theta)
    suffix = np.concatenate([np.cumsum(eta[::-1])[::-1][1:], [0.0]])
    return math.fsum(eta ** 2 / (1 + suffix ** nu))


def stepsize_sums(t_max: int, eta0: float, theta: float, nu: float, backend=None) -> np.ndarray:
    """:func:`stepsize_sum` for every ``t = 1..t_max`` (O(t_max^2) in the compiled kernel)."""
    if not nu > 0:
        raise DomainError(f"nu must be positive, got {nu}")
    impl = _backend.get(backend)
    return impl.stepsize_sums(online_steps(t_max, eta0, theta), float(nu))


def c_ol(eta0: float, theta: float, nu: float) -> float:
    """Constant of the step-size sum bound."""
    return (eta0 ** 2 * 2 ** (2 * theta) / LOG2
            + 3 ** (2 * theta) * eta0 ** 2 * c0_ol(nu, theta) / min(1.0, (eta0 / (1 - theta)) ** nu))


def stepsize_sum_bound(t, eta0: float, theta: float, nu: float):
    """``C_OL (t+1)^omega`` (times ``log(t+1)`` on the log set); vectorized in ``t``."""
    rate = omega(nu, theta)
    tp1 = np.asarray(t, dtype=float) + 1
    val = c_ol(eta0, theta, nu) * tp1 ** rate.exponent
    return val * np.log(tp1) if rate.log_factor else val


class LowerBoundCheck(NamedTuple):
    exact: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.exact <= self.bound


def stepsize_sum_lower_bound(t: int, eta0: float, theta: float, nu: float) -> LowerBoundCheck:
    """``(sum eta_k)^-nu`` against ``(eta0 (1 - 2^(theta-1)) / (1-theta))^-nu (t+1)^(-nu(1-theta))``."""
    if not nu > 0:
        raise DomainError(f"nu must be positive, got {nu}")
    eta = online_steps(t, eta0, theta)
    exact = math.fsum(eta) ** (-nu)
    bound = (eta0 * (1 - 2 ** (theta - 1)) / (1 - theta)) ** (-nu) * (t + 1) ** (-nu * (1 - theta))
    return LowerBoundCheck(exact, bound)


def log_poly(u, a: float):
    """``u^-a log u``; its maximum over ``u >= 1`` is ``1/(e a)`` at ``u = e^(1/a)``."""
    return np.power(u, -a) * np.log(u)


# ---------------------------------------------------------------------------
# trace / effective dimension identity


class TraceIdentity(NamedTuple):
    lhs: float
    rhs: float
    rel_err: float


def _effdim_vec(eigs, lam):
    lam = np.atleast_1d(lam)
    return (eigs[None, :] / (eigs[None, :] + lam[:, None])).sum(axis=1)


def trace_identity_check(eigs, s: float, tol: float = 1e-12) -> TraceIdentity:
    """Compare ``sum lam_i^s`` with ``sin(pi s)/pi * int_0^inf lam^(s-1) N(lam) dlam``.

    The integral is split at the smallest and largest eigenvalue. Below the
    smallest one ``w = lam^s`` removes the endpoint singularity; above the
    largest one ``lam = w^(-1/(1-s))`` maps the algebraic tail to a bounded
    integrand on a finite interval; in between the variable is ``log lam``.
    """
    if not (0 < s < 1):
        raise DomainError(f"s must lie strictly inside (0, 1), got {s}")
    arr = np.asarray(eigs, dtype=float)
    if arr.ndim != 1 or arr.size == 0 or np.any(arr <= 0):
        raise ValidationError("eigenvalues must be a non-empty positive sequence")
    lhs = math.fsum(arr ** s)
    lo, hi = float(arr.min()), float(arr.max())
    p = 1.0 / (1.0 - s)

    def head(w):
        return _effdim_vec(arr, w ** (1.0 / s))[0] / s

    def middle(v):
        lam = math.exp(v)
        return lam ** s * _effdim_vec(arr, lam)[0]

    def tail(w):
        wp = w ** p
        return p * math.fsum(arr / (arr * wp + 1.0))

    opts = dict(epsabs=0.0, epsrel=tol, limit=1000, full_output=1)
    pieces = [integrate.quad(head, 0.0, lo ** s, **opts)]
    if hi > lo:
        pieces.append(integrate.quad(middle, math.log(lo), math.log(hi), **opts))
    pieces.append(integrate.quad(tail, 0.0, hi ** (-(1.0 - s)), **opts))
    total = sum(pc[0] for pc in pieces)
    err = sum(pc[1] for pc in pieces)
    rhs = math.sin(math.pi * s) / math.pi * total
    if err > 1e-6 * abs(total):
        raise NumericError("trace identity quadrature did not converge", achieved=err)
    return TraceIdentity(lhs, rhs, abs(lhs - rhs) / lhs)


def capacity_ratio(eigs, s: float, lams) -> np.ndarray:
    """``lam^s N(lam) / (pi Tr(L^s) / sin(pi s))`` on a grid; at most 1 when the trace is finite."""
    if not (0 < s < 1):
        raise DomainError(f"s must lie strictly inside (0, 1), got {s}")
    arr = np.asarray(eigs, dtype=float)
    bound = math.pi * trace_power(arr, s).value / math.sin(math.pi * s)
    lams = np.asarray(lams, dtype=float)
    return np.array([lam ** s * effective_dimension(arr, lam) for lam in lams]) / bound


def rational_integral(s: float) -> float:
    """``int_0^inf du / (1 + u^(1/s))`` by quadrature (closed form ``pi s / sin(pi s)``)."""
    if not (0 < s < 1):
        raise DomainError(f"s must lie strictly inside (0, 1), got {s}")
    p = 1.0 / s
    a, _ = integrate.quad(lambda u: 1.0 / (1.0 + u ** p), 0.0, 1.0, epsabs=1e-14, epsrel=1e-13)
    # u = 1/w on [1, inf): du / (1 + u^p) = w^(p-2) / (w^p + 1) dw
    b, _ = integrate.quad(lambda w: w ** (p - 2) / (w ** p + 1.0), 0.0, 1.0, epsabs=1e-14, epsrel=1e-13)
    return a + b


# ---------------------------------------------------------------------------
# theorem constants


@dataclass(frozen=True)
class ModelQuantities:
    """Scalars entering the theorem constants.

    ``trace_k_s`` is ``Tr((L_C^{1/2} L_K L_C^{1/2})^s)``, ``trace_c_s`` the same
    for ``L_K^{1/2} L_C L_K^{1/2}`` and ``norm_c`` the operator norm of the
    latter. ``g_norm2`` is the squared norm of the source function.
    """

    kappa2: float
    trace_k_s: float
    trace_c_s: float
    norm_c: float
    g_norm2: float
    beta_norm2: float
    sigma2: float
    c_m: float
    r: float
    s: float
    tail_corrected: bool = False

    def __post_init__(self):
        for name in ("kappa2", "trace_k_s", "trace_c_s", "norm_c", "c_m", "r", "s"):
            v = getattr(self, name)
            if v is None or not (v > 0 and math.isfinite(v)):
                raise ValidationError(f"model quantity {name} must be finite and positive, got {v!r}")
        for name in ("g_norm2", "beta_norm2", "sigma2"):
            v = getattr(self, name)
            if v is None or not (v >= 0 and math.isfinite(v)):
                raise ValidationError(f"model quantity {name} must be finite and non-negative, got {v!r}")
        if self.s > 1:
            raise DomainError(f"capacity s must lie in (0, 1], got {self.s}")


def model_quantities(model: SpectralModel, slope, sigma: float, c_m: float, r: float, s: float,
                     tail_corrected: bool = False) -> ModelQuantities:
    """Collect :class:`ModelQuantities` from a truncated model.

    With ``tail_corrected`` the composite traces include the integral tail of
    the infinite power law when one exists.
    """
    if slope.source is None:
        raise ValidationError("model quantity g_norm2 is unavailable: slope was not built from a source")
    mu = composite_eigs(model)
    tr = trace_power(mu, s).value
    corrected = False
    if tail_corrected:
        dec = model.composite_decay()
        tail = power_tail(dec, s) if dec is not None else None
        if tail is not None:
            tr += tail
            corrected = True
    return ModelQuantities(
        kappa2=model.kappa2, trace_k_s=tr, trace_c_s=tr, norm_c=float(mu[0]),
        g_norm2=slope.source_norm2, beta_norm2=slope.norm2, sigma2=sigma ** 2,
        c_m=c_m, r=r, s=s, tail_corrected=corrected,
    )


def _spectral_factor(q: ModelQuantities) -> float:
    s = q.s
    return ((2 - s) / (2 * E)) ** (2 - s) + q.kappa2 ** (2 - s)


def _source_factor(q: ModelQuantities, top: float) -> float:
    r = q.r
    return (r / E) ** (2 * r) + top ** (2 * r)


def _start_factor(eta0: float, theta: float, r: float) -> float:
    return (eta0 * (1 - 2 ** (theta - 1)) / (1 - theta)) ** (-2 * r)


def c1s(q: ModelQuantities, theta: float | None = None) -> float:
    th = theta_for_prediction(q.r, q.s) if theta is None else theta
    inner_ = (2 * q.c_m * q.trace_k_s * _spectral_factor(q)
              * (4 ** th / LOG2 + 9 ** th * c0_ol(2 - q.s, th)) * (1 + 1 / (E * th)))
    return inner_ ** (-1 / q.s)


def c1(q: ModelQuantities, eta0: float, theta: float | None = None) -> float:
    th = theta_for_prediction(q.r, q.s) if theta is None else theta
    # kappa^(4r) = (kappa^2)^(2r) bounds ||L_C^{1/2} L_K L_C^{1/2}||^(2r)
    first = q.g_norm2 * _source_factor(q, q.kappa2) * _start_factor(eta0, th, q.r)
    second = (2 * (q.sigma2 + math.sqrt(q.c_m) * q.beta_norm2) * math.sqrt(q.c_m) * q.trace_k_s
              * _spectral_factor(q) * c_ol(eta0, th, 2 - q.s))
    return first + second


def c2s(q: ModelQuantities, theta: float | None = None) -> float:
    star = 2 + (1 / (1 - q.s) if q.s < 1 else 1 / (2 * E * q.r))
    return (2 * q.c_m * q.trace_k_s * _spectral_factor(q) * star) ** (-1 / q.s)


def c2(q: ModelQuantities, eta0: float, theta: float | None = None) -> float:
    s, r = q.s, q.r
    first = eta0 ** (-2 * r) * q.g_norm2 * _source_factor(q, q.kappa2)
    tail = eta0 ** 2 + eta0 * ((2 - s) / (1 - s) if s < 1 else (2 * r + 2) / (2 * r + 1))
    second = (2 * math.sqrt(q.c_m) * q.trace_k_s * _spectral_factor(q)
              * (q.beta_norm2 * math.sqrt(q.c_m) + q.sigma2) * tail)
    return first + second


def c_k(q: ModelQuantities) -> float:
    """Common constant of the general RKHS-norm bound."""
    s, r = q.s, q.r
    first = q.kappa2 * q.g_norm2 * _source_factor(q, q.norm_c)
    if s < 1:
        second = ((2 * math.sqrt(q.c_m) * q.beta_norm2 + 2 * q.sigma2) * math.sqrt(q.c_m) * q.trace_c_s
                  * (((1 - s) / (2 * E)) ** (1 - s) + q.norm_c ** (1 - s)))
    else:
        second = 4 * (math.sqrt(q.c_m) * q.beta_norm2 + q.sigma2) * math.sqrt(q.c_m) * q.trace_c_s
    return max(first, second)


def c3s(q: ModelQuantities, theta: float | None = None) -> float:
    th = theta_for_estimation(q.r, q.s) if theta is None else theta
    inner_ = (2 * q.c_m * q.trace_k_s * _spectral_factor(q)
              * (4 ** th / LOG2 + 9 ** th * c0_ol(2 - q.s, th)))
    return inner_ ** (-1 / q.s)


def c3(q: ModelQuantities, eta0: float, theta: float | None = None) -> float:
    th = theta_for_estimation(q.r, q.s) if theta is None else theta
    ck = c_k(q)
    return ck / LOG2 * _start_factor(eta0, th, q.r) + ck * c_ol(eta0, th, 1 - q.s)


def c4s(q: ModelQuantities, theta: float | None = None) -> float:
    th = finite_horizon_exponent("estimation", q.r, q.s) if theta is None else theta
    return 1.0 / (2 * q.c_m * q.trace_k_s * _spectral_factor(q) * (1 + (1 - th) / (E * th)))


def c4(q: ModelQuantities, eta0: float, theta: float | None = None) -> float:
    return c_k(q) * (eta0 ** (-2 * q.r) + eta0 + eta0 / q.s)


_STEP_CONSTANTS = {"CS1": c1s, "CS2": c2s, "CS3": c3s, "CS4": c4s}
_RATE_CONSTANTS = {"C1": c1, "C2": c2, "C3": c3, "C4": c4}


def theorem_constants(q: ModelQuantities, which: str, eta0: float | None = None,
                      theta: float | None = None) -> float:
    """Evaluate one of ``C1..C4`` (needs ``eta0``) or ``CS1..CS4``.

    ``theta`` overrides the decay exponent the theorem prescribes (online
    schedules) or the horizon exponent (finite-horizon ones, where only CS4 uses it).
    """
    key = which.upper()
    if key in _STEP_CONSTANTS:
        return _STEP_CONSTANTS[key](q, theta)
    if key in _RATE_CONSTANTS:
        if eta0 is None or not eta0 > 0:
            raise ValidationError(f"{key} needs a positive eta0")
        return _RATE_CONSTANTS[key](q, eta0, theta)
    raise ValidationError(f"unknown constant {which!r}")


def step_constant(theorem: int, q: ModelQuantities) -> float:
    return theorem_constants(q, f"CS{theorem}")


def rate_constant(theorem: int, q: ModelQuantities, eta0: float) -> float:
    return theorem_constants(q, f"C{theorem}", eta0)


def default_eta0(theorem: int, q: ModelQuantities, safety: float = 0.99) -> float:
    """Largest step scale the theorem admits, shrunk by ``safety``."""
    return safety * min(1.0, 1.0 / q.kappa2, step_constant(theorem, q))


def bound_values(theorem: int, q: ModelQuantities, eta0: float, t, horizon: int | None = None) -> np.ndarray:
    """Theorem bound on the expected error after ``t`` updates (``nan`` where it does not apply).

    Online bounds hold for every ``t >= 1``; finite-horizon bounds only at ``t = horizon``.
    """
    t = np.asarray(t, dtype=float)
    rate = theorem_rate(theorem, q.r, q.s)
    const = rate_constant(theorem, q, eta0)
    out = np.full(t.shape, np.nan)
    if theorem in (1, 3):
        ok = t >= 1
        base = const * (t[ok] + 1) ** rate.exponent
        out[ok] = base * np.log(t[ok] + 1) if rate.log_factor else base
    else:
        if horizon is None:
            raise ValidationError("finite-horizon bounds need the horizon")
        ok = t == horizon
        val = const * float(horizon) ** rate.exponent
        out[ok] = val * math.log(horizon + 1) if rate.log_factor else val
    return out


# ---------------------------------------------------------------------------
# empirical rate extraction


class SlopeFit(NamedTuple):
    slope: float
    intercept: float
    residual: float
    n_points: int
    n_excluded: int


def slope_fit(t, err, window: tuple[float, float] | None = None) -> SlopeFit:
    """Least-squares fit of ``log err`` against ``log t`` inside ``window`` (inclusive)."""
    t = np.asarray(t, dtype=float)
    err = np.asarray(err, dtype=float)
    if t.shape != err.shape:
        raise ValidationError("t and err must have the same shape")
    sel = t > 0
    if window is not None:
        sel &= (t >= window[0]) & (t <= window[1])
    bad = sel & ~(err > 0)
    n_bad = int(bad.sum())
    if n_bad:
        warnings.warn(f"slope_fit: excluded {n_bad} non-positive error values", RuntimeWarning, stacklevel=2)
    sel &= err > 0
    if sel.sum() < 4:
        raise ValidationError(f"slope_fit needs at least 4 usable points, got {int(sel.sum())}")
    x = np.log(t[sel])
    y = np.log(err[sel])
    xm, ym = x.mean(), y.mean()
    slope = float(np.dot(x - xm, y - ym) / np.dot(x - xm, x - xm))
    intercept = float(ym - slope * xm)
    resid = float(np.sqrt(np.mean((y - intercept - slope * x) ** 2)))
    return SlopeFit(slope, intercept, resid, int(sel.sum()), n_bad)
