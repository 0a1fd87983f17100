"""Truncated spectral representation of trace-class operators.

Every operator is diagonal in one shared orthonormal basis, so the kernel
integral operator and the covariance operator are just two positive
eigenvalue sequences of equal length. The composite operators
``L_C^{1/2} L_K L_C^{1/2}`` and ``L_K^{1/2} L_C L_K^{1/2}`` then share the
eigenvalues ``lam_K[i] * lam_C[i]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError, ValidationError

__all__ = [
    "EigenDecay",
    "SpectralModel",
    "TracePower",
    "materialize",
    "trace_power",
    "effective_dimension",
    "composite_eigs",
]

_KINDS = ("power", "explicit", "oscillating")


@dataclass(frozen=True)
class EigenDecay:
    """Recipe for a non-increasing positive eigenvalue sequence of length ``m``.

    Use the classmethods rather than the raw constructor.
    """

    kind: str
    m: int
    exponent: float = 0.0
    scale: float = 1.0
    gamma1: float = 0.0
    gamma2: float = 0.0
    values: tuple = ()
    ordered: bool = True

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValidationError(f"unknown decay kind {self.kind!r}")
        if not isinstance(self.m, (int, np.integer)) or self.m <= 0:
            raise ValidationError(f"truncation m must be a positive integer, got {self.m!r}")
        if self.kind == "power":
            if not (self.exponent > 0 and self.scale > 0):
                raise ValidationError("power decay needs exponent > 0 and scale > 0")
        elif self.kind == "oscillating":
            if not (self.gamma1 > self.gamma2 > 0):
                raise ValidationError("oscillating decay needs gamma1 > gamma2 > 0")
        else:
            v = np.asarray(self.values, dtype=float)
            if v.size != self.m:
                raise ValidationError("explicit sequence length must equal m")
            if not np.all(np.isfinite(v)) or np.any(v <= 0):
                raise ValidationError("explicit eigenvalues must be finite and positive")
            if self.ordered and np.any(np.diff(v) > 0):
                raise ValidationError("explicit eigenvalues must be non-increasing")

    @classmethod
    def power(cls, exponent: float, scale: float = 1.0, m: int = 200) -> "EigenDecay":
        return cls("power", int(m), exponent=float(exponent), scale=float(scale))

    @classmethod
    def explicit(cls, values: Sequence[float], ordered: bool = True) -> "EigenDecay":
        # ordered=False keeps basis order, e.g. kernel eigenvalues listed along
        # the covariance eigenbasis.
        vals = tuple(float(v) for v in values)
        if not vals:
            raise ValidationError("explicit sequence must be non-empty")
        return cls("explicit", len(vals), values=vals, ordered=bool(ordered))

    @classmethod
    def oscillating(cls, gamma1: float, gamma2: float, m: int = 200) -> "EigenDecay":
        return cls("oscillating", int(m), gamma1=float(gamma1), gamma2=float(gamma2))

    def with_truncation(self, m: int) -> "EigenDecay":
        if self.kind == "explicit":
            raise ValidationError("cannot re-truncate an explicit sequence")
        return EigenDecay(self.kind, int(m), self.exponent, self.scale, self.gamma1, self.gamma2)

    def to_dict(self) -> dict:
        if self.kind == "power":
            return {"kind": "power", "exponent": self.exponent, "scale": self.scale, "m": self.m}
        if self.kind == "oscillating":
            return {"kind": "oscillating", "gamma1": self.gamma1, "gamma2": self.gamma2, "m": self.m}
        return {"kind": "explicit", "values": list(self.values), "ordered": self.ordered}


def _oscillating(gamma1: float, gamma2: float, m: int) -> np.ndarray:
    # Step function with breakpoints b_1 = 2, b_{k+1} = b_k ** (gamma1 / gamma2),
    # value b_k ** -gamma1 on [b_k, b_{k+1}); a_i is its value at i + 1.
    ratio = gamma1 / gamma2
    x = np.arange(2, m + 2, dtype=float)
    out = np.empty(m)
    b = 2.0
    while True:
        try:
            b_next = b ** ratio
        except OverflowError:
            b_next = math.inf
        mask = (x >= b) & (x < b_next)
        out[mask] = b ** (-gamma1)
        if b_next > x[-1]:
            break
        b = b_next
    return out


def materialize(decay: EigenDecay) -> np.ndarray:
    """Return the ``m`` eigenvalues described by ``decay`` as a read-only array."""
    if decay.kind == "power":
        i = np.arange(1, decay.m + 1, dtype=float)
        out = decay.scale * i ** (-decay.exponent)
    elif decay.kind == "oscillating":
        out = _oscillating(decay.gamma1, decay.gamma2, decay.m)
    else:
        out = np.array(decay.values, dtype=float)
    if np.any(out <= 0):
        raise ValidationError("materialized eigenvalues underflowed to zero; reduce m")
    out.setflags(write=False)
    return out


class TracePower(NamedTuple):
    """Truncated trace ``sum(lam**s)`` plus the integral tail bound when known."""

    value: float
    tail: float | None = None

    @property
    def total(self) -> float:
        return self.value + (self.tail or 0.0)


def _as_eigs(eigs) -> np.ndarray:
    if isinstance(eigs, EigenDecay):
        return materialize(eigs)
    arr = np.asarray(eigs, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError("eigenvalues must be a non-empty 1-D sequence")
    if np.any(arr <= 0) or not np.all(np.isfinite(arr)):
        raise ValidationError("eigenvalues must be finite and positive")
    return arr


def power_tail(decay: EigenDecay, s: float) -> float | None:
    """Integral bound on ``sum_{i>m} (c i^-a)^s``; ``None`` if divergent or not a power law."""
    if decay.kind != "power":
        return None
    sa = s * decay.exponent
    if sa <= 1:
        return None
    return decay.scale ** s * decay.m ** (1.0 - sa) / (sa - 1.0)


def trace_power(eigs, s: float) -> TracePower:
    """Compensated sum of ``lam_i ** s`` for ``0 < s <= 1``.

    Passing an :class:`EigenDecay` of power kind also yields the tail bound
    ``c^s m^(1 - s a) / (s a - 1)`` whenever ``s a > 1``.
    """
    if not (0 < s <= 1):
        raise DomainError(f"trace power exponent s must lie in (0, 1], got {s}")
    arr = _as_eigs(eigs)
    value = math.fsum(arr ** s)
    tail = power_tail(eigs, s) if isinstance(eigs, EigenDecay) else None
    return TracePower(value, tail)


def effective_dimension(eigs, lam: float) -> float:
    """``Tr((L + lam I)^{-1} L) = sum lam_i / (lam_i + lam)``."""
    if not lam > 0:
        raise DomainError(f"regularization lam must be positive, got {lam}")
    arr = _as_eigs(eigs)
    return math.fsum(arr / (arr + lam))


@dataclass(frozen=True)
class SpectralModel:
    """Commuting diagonal model of ``L_K`` and ``L_C`` on a shared basis.

    Arrays are kept in basis order (``lam_k[i]`` and ``lam_c[i]`` belong to the
    same basis function); only :func:`composite_eigs` re-sorts.
    """

    kernel: EigenDecay
    covariance: EigenDecay
    lam_k: np.ndarray = field(init=False, repr=False, compare=False)
    lam_c: np.ndarray = field(init=False, repr=False, compare=False)
    mu: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kernel.m != self.covariance.m:
            raise ValidationError(
                f"kernel and covariance truncations differ ({self.kernel.m} vs {self.covariance.m})"
            )
        lam_k = materialize(self.kernel)
        lam_c = materialize(self.covariance)
        if lam_c.max() > 1.0 + 1e-12:
            raise ValidationError(
                f"largest covariance eigenvalue {lam_c.max():g} exceeds 1; unit-norm "
                "covariates force ||L_C|| <= 1, rescale the covariance decay"
            )
        mu = lam_k * lam_c
        mu.setflags(write=False)
        object.__setattr__(self, "lam_k", lam_k)
        object.__setattr__(self, "lam_c", lam_c)
        object.__setattr__(self, "mu", mu)

    @classmethod
    def from_arrays(cls, lam_k, lam_c) -> "SpectralModel":
        return cls(EigenDecay.explicit(lam_k, ordered=False), EigenDecay.explicit(lam_c, ordered=False))

    @property
    def m(self) -> int:
        return self.kernel.m

    @property
    def kappa2(self) -> float:
        """Operator-norm proxy for ``kappa**2``: the largest kernel eigenvalue."""
        return float(self.lam_k.max())

    def composite_decay(self) -> EigenDecay | None:
        """Power-law description of the composite eigenvalues, when both factors are power laws."""
        if self.kernel.kind == "power" and self.covariance.kind == "power":
            return EigenDecay.power(
                self.kernel.exponent + self.covariance.exponent,
                self.kernel.scale * self.covariance.scale,
                self.m,
            )
        return None

    def to_dict(self) -> dict:
        return {"kernel": self.kernel.to_dict(), "covariance": self.covariance.to_dict()}


def composite_eigs(model: SpectralModel) -> np.ndarray:
    """Eigenvalues shared by both composite operators, sorted non-increasing."""
    return np.sort(model.mu)[::-1].copy()
