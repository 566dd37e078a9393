"""Finite-sum evaluation of Z(X; r) and tau_r(X), plus closed-form references.

Two independent routes compute h(gamma): the literal 2^n * A term sum
(``direct``) and the product of per-fiber SL(2,Z) matrix entries
(``factored``, the default).  Every exponent is reduced as an exact integer
residue before the complex exponential is taken, so phases carry no
accumulated rounding from large arguments.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from . import _kernels
from .numtheory import SL2Z, dedekind_symbol, lcm, rademacher_phi
from .seifert import SeifertData


@dataclass(frozen=True)
class InvariantValue:
    r: int
    value: complex


def _sign(x) -> int:
    return (x > 0) - (x < 0)


@lru_cache(maxsize=256)
def _phase_table(period: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(period) / period)


def _check_level(r: int) -> None:
    if r < 2:
        raise ValueError(f"level r must be >= 2, got {r}")


# ---- h(gamma) -----------------------------------------------------------------

def _fiber_matrix(alpha, beta, rho, sigma) -> SL2Z:
    return SL2Z(-beta, -sigma, alpha, rho)


def _h_factored(x: SeifertData, r: int, gammas: np.ndarray) -> np.ndarray:
    pairs = x.pairs
    n = len(pairs)
    A = math.prod(p[0] for p in pairs)
    phis = [rademacher_phi(_fiber_matrix(*p)) for p in pairs]
    rho_over_alpha = sum(Fraction(p[2], p[0]) for p in pairs)
    kappa = (math.sqrt(A) * (2 * r) ** (n / 2) * (1j) ** (-n)
             * np.exp(1j * np.pi / 4 * float(sum(phis)))
             * _exp_frac(-rho_over_alpha / (4 * r)))
    out = np.full(len(gammas), kappa, dtype=complex)
    for (a, b, rho, _), phi in zip(pairs, phis):
        sums = _kernels.fiber_sums(r, gammas, a, b, rho, _phase_table(4 * r * a))
        entry = 1j / math.sqrt(2 * r * a) * np.exp(-1j * np.pi / 4 * float(phi))
        out *= entry * sums
    if x.beta0:
        # the matrix product carries exp(i pi (E + beta0) g^2 / 2r)
        period = 4 * r
        out *= _phase_table(period)[(-x.beta0 * gammas * gammas) % period]
    return out


def _exp_frac(f: Fraction) -> complex:
    """exp(2 pi i f) with f reduced modulo 1 exactly first."""
    f = f - math.floor(f)
    return complex(np.exp(2j * np.pi * float(f)))


def _h_direct(x: SeifertData, r: int, gammas: np.ndarray) -> np.ndarray:
    pairs = x.pairs
    L = lcm(*(p[0] for p in pairs))
    Q = 4 * r * L
    EL = int(x.euler * L)
    grids = [np.arange(p[0]) for p in pairs]
    out = np.empty(len(gammas), dtype=complex)
    mus = list(itertools.product((1, -1), repeat=len(pairs)))
    mesh = np.meshgrid(*grids, indexing="ij")
    flat = [m.ravel().astype(np.int64) for m in mesh]
    table = _phase_table(Q)
    for gi, g in enumerate(np.asarray(gammas, dtype=np.int64)):
        total = 0j
        for mu in mus:
            N = np.full(flat[0].shape, (EL * g * g) % Q, dtype=np.int64)
            for (a, b, rho, _), nj, mj in zip(pairs, flat, mu):
                w = L // a
                N += (4 * r * w * rho * ((r * nj * nj + mj * nj) % a)) % Q
                N -= (2 * w * g * (2 * r * nj + mj)) % Q
            total += math.prod(mu) * table[N % Q].sum()
        out[gi] = total
    return out


def h_eval(x: SeifertData, r: int, gamma, mode: str = "factored"):
    """h(gamma) at level r; ``gamma`` may be an integer or an integer array."""
    _check_level(r)
    scalar = np.ndim(gamma) == 0
    gammas = np.atleast_1d(np.asarray(gamma, dtype=np.int64))
    if mode == "factored":
        vals = _h_factored(x, r, gammas)
    elif mode == "direct":
        vals = _h_direct(x, r, gammas)
    else:
        raise ValueError(f"unknown h mode {mode!r}")
    return complex(vals[0]) if scalar else vals


# ---- Z and tau ----------------------------------------------------------------------

def _fsum_complex(values) -> complex:
    values = np.asarray(values, dtype=complex)
    return complex(math.fsum(values.real), math.fsum(values.imag))


def z_sum(x: SeifertData, r: int, mode: str = "factored", dps: int | None = None) -> complex:
    """Z(X; r) with compensated summation over gamma = 1 .. r-1."""
    _check_level(r)
    if dps:
        return complex(z_sum_mp(x, r, dps))
    gammas = np.arange(1, r, dtype=np.int64)
    if len(gammas) == 0:
        return 0j
    h = h_eval(x, r, gammas, mode)
    signs = np.where(gammas * x.ag % 2 == 1, -1.0, 1.0)
    terms = signs * h / np.sin(np.pi * gammas / r) ** x.k
    return (0.5j) ** x.n * _fsum_complex(terms)


def z_sum_mp(x: SeifertData, r: int, dps: int = 30):
    """Z(X; r) in mpmath at ``dps`` digits, factored route."""
    with mpmath.workdps(dps):
        pairs = x.pairs
        total = mpmath.mpc(0)
        rho_sum = sum(Fraction(p[2], p[0]) for p in pairs)
        for g in range(1, r):
            h = _mp_expfrac(-rho_sum / (4 * r) - Fraction(x.beta0 * g * g, 4 * r))
            for a, b, rho, _ in pairs:
                period = 4 * r * a
                s = mpmath.mpc(0)
                for m in range(a):
                    for mu in (1, -1):
                        v = 2 * r * m + mu
                        s += mu * _mp_expfrac(Fraction((-b * g * g - 2 * g * v + rho * v * v) % period, period))
                h *= s
            sgn = -1 if (g * x.ag) % 2 else 1
            total += sgn * h / mpmath.sin(mpmath.pi * g / r) ** x.k
        return (mpmath.mpc(0, 0.5)) ** x.n * total


def _mp_expfrac(f: Fraction):
    f = f - math.floor(f)
    return mpmath.expjpi(2 * mpmath.mpf(f.numerator) / f.denominator)


@dataclass(frozen=True)
class Prefactor:
    """tau_r = b * r**power * exp(i * phase_c / r) * Z(X; r)."""

    b: complex
    power: Fraction
    phase_c: float
    phase_c_over_pi: Fraction

    def __call__(self, r) -> complex:
        return self.b * r ** float(self.power) * np.exp(1j * self.phase_c / r)


def prefactor(x: SeifertData) -> Prefactor:
    E = x.euler
    s = _sign(E)
    a = x.a_eps
    ag = x.ag
    A = math.prod(x.alphas)
    dsum = sum((dedekind_symbol(p[1], p[0]) for p in x.pairs), Fraction(0))
    b = ((-1) ** ag * 2.0 ** (1 - ag / 2) / math.sqrt(A)
         * np.exp(1j * 3 * np.pi / 4 * (1 - a) * s))
    c_over_pi = Fraction(1, 2) * (3 * (a - 1) * s - E - dsum)
    return Prefactor(b=complex(b), power=Fraction(ag, 2) - 1,
                     phase_c=float(c_over_pi) * math.pi, phase_c_over_pi=c_over_pi)


def tau(x: SeifertData, r: int, mode: str = "factored", dps: int | None = None) -> complex:
    """The quantum invariant tau_r(X)."""
    if dps:
        with mpmath.workdps(dps):
            pf = prefactor(x)
            z = z_sum_mp(x, r, dps)
            val = (mpmath.mpc(pf.b) * mpmath.mpf(r) ** (mpmath.mpf(pf.power.numerator) / pf.power.denominator)
                   * mpmath.expjpi(mpmath.mpf(pf.phase_c_over_pi.numerator) / pf.phase_c_over_pi.denominator / r) * z)
            return complex(val)
    return prefactor(x)(r) * z_sum(x, r, mode)


def tau_range(x: SeifertData, rs, mode: str = "factored", dps: int | None = None) -> list[InvariantValue]:
    return [InvariantValue(int(r), tau(x, int(r), mode, dps)) for r in rs]


# ---- closed forms -------------------------------------------------------------------

def rp3_sum_factor(r: int) -> float:
    """f(pi/r) with f(x) = sin x / (2 (1 + cos x))."""
    x = math.pi / r
    return math.sin(x) / (2 * (1 + math.cos(x)))


def tau_closed(kind: str, params: dict | tuple | None, r: int) -> complex:
    """Closed forms: ``lens`` with (p, q), and ``rp2`` for the fibration (n;1|0).

    ``rp2`` is the closed form tau = (2r)^(-1/2) f(pi/r) (1 + e^{i pi r})
    for that fibration, which is half of :func:`tau` at even r.
    """
    _check_level(r)
    if kind == "lens":
        p, q = (params["p"], params["q"]) if isinstance(params, dict) else params
        return _tau_lens(p, q, r)
    if kind == "rp2":
        return (2 * r) ** -0.5 * rp3_sum_factor(r) * (1 + np.exp(1j * np.pi * r))
    raise ValueError(f"unknown closed form {kind!r}")


def tau_rp2_from_z(r: int) -> complex:
    """tau_r(n;1|0) assembled from Z = -f(pi/r)(1 + e^{i pi r}) and the general prefactor."""
    x = SeifertData("n", 1, 0, ())
    return prefactor(x)(r) * (-rp3_sum_factor(r) * (1 + np.exp(1j * np.pi * r)))


def _tau_lens(p: int, q: int, r: int) -> complex:
    if p <= 0:
        raise ValueError("lens space needs p > 0")
    if math.gcd(p, q) != 1:
        raise ValueError(f"({p}, {q}) is not a coprime pair")
    if p == 1:
        return math.sqrt(2 / r) * math.sin(math.pi / r)
    qs = pow(q, -1, p)
    S = dedekind_symbol(q, p)
    total = 0j
    for n in range(p):
        cn = (1j * math.cos(math.pi / (p * r)) * math.sin(2 * math.pi * qs * n / p) * math.sin(2 * math.pi * n / p)
              + math.sin(math.pi / (p * r)) * math.cos(2 * math.pi * qs * n / p) * math.cos(2 * math.pi * n / p))
        total += cn * _exp_frac(Fraction(r * qs * n * n, p))
    return math.sqrt(2 / (p * r)) * _exp_frac(S / (4 * r)) * total
