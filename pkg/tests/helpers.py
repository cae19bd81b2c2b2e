"""Shared test oracles: central finite differences and tolerance checks."""

import numpy as np


def central_diff(f, x, step=1e-5):
    """Central-difference gradient of a scalar function of a flat vector."""
    x = np.asarray(x, dtype=np.float64)
    g = np.zeros_like(x)
    for i in range(x.size):
        hi = x.copy()
        lo = x.copy()
        hi[i] += step
        lo[i] -= step
        g[i] = (f(hi) - f(lo)) / (2.0 * step)
    return g


def assert_grad_close(analytic, numeric, rtol=1e-4, atol=1e-7):
    analytic = np.asarray(analytic)
    numeric = np.asarray(numeric)
    assert analytic.shape == numeric.shape
    denom = np.maximum(np.abs(numeric), np.abs(analytic))
    err = np.abs(analytic - numeric)
    ok = err <= rtol * denom + atol
    assert ok.all(), (
        f"gradient mismatch: max abs err {err.max():.3e}, "
        f"max rel err {(err / np.maximum(denom, 1e-300)).max():.3e}"
    )
