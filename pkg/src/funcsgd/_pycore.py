"""Pure-numpy fallback with the same interface as the compiled kernels.

Loops run over steps; replications are vectorized within each step.
"""
import numpy as np

NAME = "python"


def sgd_block(coeffs, x, noise, beta, lam_k, etas):
    R, m = coeffs.shape
    B = len(etas)
    if x.shape[0] != R or x.shape[1] < B or x.shape[2] != m:
        raise ValueError("covariate block has the wrong shape")
    bvec = np.broadcast_to(beta, (R, m))
    for j in range(B):
        xj = x[:, j, :]
        y = np.einsum("rm,rm->r", xj, bvec) + noise[:, j]
        with np.errstate(over="ignore", invalid="ignore"):
            res = np.einsum("rm,rm->r", xj, coeffs) - y
        bad = ~np.isfinite(res)
        if bad.any():
            return int(np.argmax(bad)), j
        with np.errstate(over="ignore", invalid="ignore"):
            coeffs -= (etas[j] * res)[:, None] * lam_k * xj
    return None


def weighted_sq_sums(coeffs, beta, w):
    d = coeffs - beta
    with np.errstate(over="ignore", invalid="ignore"):
        return (w * d * d).sum(axis=1)


def stepsize_sums(etas, nu):
    etas = np.asarray(etas, dtype=float)
    out = np.empty(len(etas))
    for t in range(len(etas)):
        rev = etas[t::-1]
        suffix = np.concatenate(([0.0], np.cumsum(rev[:-1])))
        out[t] = np.sum(rev ** 2 / (1.0 + suffix ** nu))
    return out
