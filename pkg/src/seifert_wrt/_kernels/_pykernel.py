"""Numpy implementation of the per-fiber phase sums (fallback backend)."""

import numpy as np


def fiber_sums(r, gammas, alpha, beta, rho, table):
    """Same contract as the compiled ``fiber_sums``."""
    period = 4 * r * alpha
    if len(table) != period:
        raise ValueError("phase table has the wrong length")
    g = np.asarray(gammas, dtype=np.int64) % period
    m = np.arange(alpha, dtype=np.int64)
    v = np.concatenate([2 * r * m + 1, 2 * r * m - 1]) % period
    sign = np.concatenate([np.ones(alpha), -np.ones(alpha)])
    base = (-(beta % period) * ((g * g) % period)) % period
    n = (base[:, None] - 2 * g[:, None] * v[None, :] + (rho % period) * ((v * v) % period)[None, :]) % period
    return (np.asarray(table)[n] * sign[None, :]).sum(axis=1)
