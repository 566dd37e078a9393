# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-fiber phase sums for the factored h evaluation."""

import numpy as np


def fiber_sums(long long r, const long long[:] gammas, long long alpha,
               long long beta, long long rho, const double complex[:] table):
    """sum_{mu=+-1} sum_{m<alpha} mu * table[N mod 4 r alpha] for each gamma.

    N = -beta g^2 - 2 g (2 r m + mu) + rho (2 r m + mu)^2 and ``table[k]`` is
    exp(2 pi i k / (4 r alpha)).
    """
    cdef long long period = 4 * r * alpha
    cdef Py_ssize_t ng = gammas.shape[0]
    cdef Py_ssize_t idx
    cdef long long g, gm, m, v, nn, base
    cdef int mu
    cdef double complex acc
    out = np.empty(ng, dtype=np.complex128)
    cdef double complex[:] o = out
    if table.shape[0] != period:
        raise ValueError("phase table has the wrong length")
    for idx in range(ng):
        gm = gammas[idx] % period
        base = (-(beta % period) * ((gm * gm) % period)) % period
        acc = 0
        for m in range(alpha):
            for mu in (1, -1):
                v = (2 * r * m + mu) % period
                nn = (base - 2 * gm * v + (rho % period) * ((v * v) % period)) % period
                if nn < 0:
                    nn += period
                if mu == 1:
                    acc = acc + table[nn]
                else:
                    acc = acc - table[nn]
        o[idx] = acc
    return out
