"""Synthetic functional linear models in coordinate form.

A covariate ``X`` is represented by its coefficients on the shared basis and
the response is ``y = <beta*, x> + eps``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, IllPosedError, ValidationError
from .spectral import SpectralModel

__all__ = [
    "SlopeCoefficients",
    "ProcessSpec",
    "build_slope",
    "replication_stream",
    "draw_block",
    "sample_pair",
    "inner",
    "verify_moment_condition",
    "population_moment_ratio",
    "empirical_covariance_eigs",
]

LAWS = ("gaussian", "rademacher")
TARGETS = ("prediction", "estimation", "explicit")


def inner(a, b) -> float:
    """Correctly rounded inner product of two coefficient vectors."""
    return math.fsum(np.multiply(a, b))


@dataclass(frozen=True)
class SlopeCoefficients:
    coeffs: np.ndarray
    target: str = "explicit"
    r: float | None = None
    source: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim != 1 or not np.all(np.isfinite(c)):
            raise ValidationError("slope coefficients must be a finite 1-D sequence")
        if self.target not in TARGETS:
            raise ValidationError(f"unknown slope target {self.target!r}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def explicit(cls, coeffs) -> "SlopeCoefficients":
        return cls(np.asarray(coeffs, dtype=float), "explicit")

    @property
    def m(self) -> int:
        return self.coeffs.size

    @property
    def norm2(self) -> float:
        """Squared L2 norm of beta*."""
        return math.fsum(self.coeffs ** 2)

    @property
    def source_norm2(self) -> float | None:
        if self.source is None:
            return None
        return math.fsum(np.asarray(self.source) ** 2)

    def rkhs_norm2(self, model: SpectralModel) -> float:
        """``||beta*||_K^2 = sum beta_i^2 / lam_K,i``."""
        return math.fsum(self.coeffs ** 2 / model.lam_k)

    def prediction_norm2(self, model: SpectralModel) -> float:
        """``||L_C^{1/2} beta*||^2``: the excess risk of the zero predictor."""
        return math.fsum(model.lam_c * self.coeffs ** 2)

    def scaled(self, c: float) -> "SlopeCoefficients":
        src = None if self.source is None else np.asarray(self.source) * c
        return SlopeCoefficients(self.coeffs * c, self.target, self.r, src)


def default_source(m: int) -> np.ndarray:
    return 1.0 / np.arange(1, m + 1, dtype=float)


def build_slope(model: SpectralModel, r: float, target: str = "prediction", source=None) -> SlopeCoefficients:
    """Slope satisfying a source condition of order ``r`` with source ``g``.

    ``prediction``: ``L_C^{1/2} beta = (L_C^{1/2} L_K L_C^{1/2})^r g``, i.e.
    ``beta_i = lam_C,i^{-1/2} mu_i^r g_i``.

    ``estimation``: ``beta = L_K^{1/2} (L_K^{1/2} L_C L_K^{1/2})^r g``, i.e.
    ``beta_i = lam_K,i^{1/2} mu_i^r g_i``.

    ``source`` defaults to ``g_i = 1/i``.
    """
    if not r > 0:
        raise DomainError(f"regularity r must be positive, got {r}")
    if target not in ("prediction", "estimation"):
        raise ValidationError(f"target must be 'prediction' or 'estimation', got {target!r}")
    g = default_source(model.m) if source is None else np.asarray(source, dtype=float)
    if g.shape != (model.m,):
        raise ValidationError(f"source must have length {model.m}, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise ValidationError("source coefficients must be finite")
    mu_r = model.mu ** r
    if target == "prediction":
        bad = (model.lam_c == 0) & (g != 0)
        if np.any(bad):
            raise IllPosedError("zero covariance eigenvalue paired with a nonzero source coefficient")
        beta = model.lam_c ** -0.5 * mu_r * g
    else:
        beta = np.sqrt(model.lam_k) * mu_r * g
    src = g.copy()
    src.setflags(write=False)
    return SlopeCoefficients(beta, target, float(r), src)


@dataclass(frozen=True)
class ProcessSpec:
    """Law of the covariate coefficients and of the additive noise."""

    law: str = "gaussian"
    normalize: bool = False
    noise_std: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.law not in LAWS:
            raise ValidationError(f"unknown coefficient law {self.law!r}; expected one of {LAWS}")
        if not (self.noise_std >= 0 and math.isfinite(self.noise_std)):
            raise ValidationError("noise_std must be finite and non-negative")
        if not (0 <= int(self.seed) < 2 ** 64):
            raise ValidationError("seed must be a 64-bit unsigned integer")

    @property
    def moment_constant(self) -> float | None:
        """``c_M`` for the fourth-moment condition when it is known in closed form."""
        return None if self.normalize else 3.0

    def to_dict(self) -> dict:
        return {"law": self.law, "normalize": self.normalize, "noise_std": self.noise_std, "seed": int(self.seed)}


def replication_stream(seed: int, replication: int) -> np.random.Generator:
    """Independent generator for one replication, derived by hashing ``(seed, replication)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(replication),))
    return np.random.Generator(np.random.PCG64(ss))


def draw_raw(rng: np.random.Generator, m: int, n: int) -> np.ndarray:
    # One row of m + 1 standard normals per draw: m covariate coordinates, then
    # the noise. Row t depends only on the draw index, not on the block size.
    return rng.standard_normal((n, m + 1))


def covariates_from_raw(model: SpectralModel, spec: ProcessSpec, raw: np.ndarray) -> np.ndarray:
    z = raw[..., : model.m]
    if spec.law == "rademacher":
        z = np.where(z >= 0, 1.0, -1.0)
    x = z * np.sqrt(model.lam_c)
    if spec.normalize:
        norms = np.sqrt(np.einsum("...i,...i->...", x, x))
        x = x / norms[..., None]
    return x


def draw_block(model: SpectralModel, slope: SlopeCoefficients, spec: ProcessSpec, rng, n: int):
    """Draw ``n`` consecutive pairs; returns ``(x, y)`` with shapes ``(n, m)`` and ``(n,)``."""
    raw = draw_raw(rng, model.m, n)
    x = covariates_from_raw(model, spec, raw)
    eps = spec.noise_std * raw[:, model.m]
    y = np.array([inner(row, slope.coeffs) for row in x]) + eps
    return x, y


def sample_pair(model: SpectralModel, slope: SlopeCoefficients, spec: ProcessSpec, rng):
    """One draw ``(x, y)`` from the stream ``rng``."""
    if slope.m != model.m:
        raise ValidationError("slope and model dimensions differ")
    raw = draw_raw(rng, model.m, 1)[0]
    x = covariates_from_raw(model, spec, raw)
    y = inner(x, slope.coeffs) + spec.noise_std * raw[model.m]
    return x, y


def population_moment_ratio(model: SpectralModel, spec: ProcessSpec, probe) -> float | None:
    """Exact ``E<X,f>^4 / (E<X,f>^2)^2`` where available (unnormalized laws only)."""
    if spec.normalize:
        return None
    a2 = np.asarray(probe, dtype=float) ** 2 * model.lam_c
    s2 = math.fsum(a2)
    if s2 == 0:
        return math.nan
    if spec.law == "gaussian":
        return 3.0
    # sum of independent sign flips: E S^4 = 3 (sum a^2)^2 - 2 sum a^4
    return 3.0 - 2.0 * math.fsum(a2 ** 2) / s2 ** 2


def verify_moment_condition(model: SpectralModel, spec: ProcessSpec, probe, n_draws: int = 10 ** 5,
                            replication: int = 0, chunk: int = 65536) -> float:
    """Monte Carlo estimate of the fourth-to-squared-second moment ratio of ``<X, f>``.

    Returns ``nan`` for a probe orthogonal to the support of ``X``.
    """
    if n_draws < 10 ** 4:
        raise ValidationError("n_draws must be at least 10^4")
    f = np.asarray(probe, dtype=float)
    if f.shape != (model.m,):
        raise ValidationError(f"probe must have length {model.m}")
    rng = replication_stream(spec.seed, replication)
    m2 = m4 = 0.0
    left = n_draws
    while left:
        n = min(chunk, left)
        x = covariates_from_raw(model, spec, draw_raw(rng, model.m, n))
        p2 = (x @ f) ** 2
        m2 += math.fsum(p2)
        m4 += math.fsum(p2 ** 2)
        left -= n
    if m2 == 0:
        return math.nan
    m2 /= n_draws
    m4 /= n_draws
    return m4 / m2 ** 2


def empirical_covariance_eigs(model: SpectralModel, spec: ProcessSpec, n_draws: int = 10 ** 5,
                              replication: int = 0, chunk: int = 65536) -> np.ndarray:
    """Diagonal of the empirical ``E[x x^T]`` in the shared basis.

    Off-diagonal entries vanish in expectation for both laws, with or without
    normalization, so the diagonal carries the covariance eigenvalues. In
    normalized mode they sum to 1 and differ from ``lam_C``.
    """
    if n_draws < 1:
        raise ValidationError("n_draws must be positive")
    rng = replication_stream(spec.seed, replication)
    acc = np.zeros(model.m)
    left = n_draws
    while left:
        n = min(chunk, left)
        x = covariates_from_raw(model, spec, draw_raw(rng, model.m, n))
        acc += (x * x).sum(axis=0)
        left -= n
    return acc / n_draws
