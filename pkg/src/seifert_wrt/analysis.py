"""Convergence fits, coefficient recovery from samples, Casson-Walker checks and reports."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import lseries as ls
from .asympt import (AsymptoticExpansion, _i2a_coeffs, _k_bounds, asymptotic_presentation,
                     evaluate, full_expansion)
from .exact import prefactor, tau
from .moduli import index_sets
from .numtheory import RationalModZ, dedekind_symbol
from .seifert import SeifertData

EXACT_TOL = 1e-9
NOISE_REL = 1e-11


def _sign(v) -> int:
    return (v > 0) - (v < 0)


# ---- convergence --------------------------------------------------------------------

@dataclass
class ConvergenceReport:
    r_values: list[int]
    residuals: list[float]
    fitted_order: float
    expected_order: float
    tau_values: list[complex]
    approx_values: list[complex]

    @property
    def passed(self) -> bool:
        return self.fitted_order >= self.expected_order - 0.25

    def to_json(self) -> dict:
        return {
            "r_values": self.r_values,
            "residuals": self.residuals,
            "fitted_order": _json_float(self.fitted_order),
            "expected_order": _json_float(self.expected_order),
            "passed": self.passed,
        }


def _json_float(v: float):
    return "inf" if math.isinf(v) else v


def expected_order(exp: AsymptoticExpansion) -> float:
    """Decay order of the truncation error of tau implied by the expansion shape.

    The Z-level ladder keeps every exponent down to D_Z - N/2, so the first
    dropped term sits at D_Z - (N+1)/2; multiplying by r^power moves it to
    D_tau - (N+1)/2 with D_tau = D_Z + power.  The returned value is the
    positive decay rate (N+1)/2 - D_tau.  At E = 0 the expansion is exact
    from its threshold level on, so the order is infinite.
    """
    if exp.exact:
        return math.inf
    lead = exp.leading_exponent()
    if lead is None:
        return math.inf
    d_tau = lead + exp.prefactor_meta.power
    return float(Fraction(exp.depth + 1, 2) - d_tau)


def compare_convergence(x: SeifertData, N: int, r_range, eval_mode: str = "exact_phase",
                        exp: AsymptoticExpansion | None = None, dps: int | None = None) -> ConvergenceReport:
    """Residuals |tau - evaluate| over ``r_range`` and the fitted log-log decay order.

    At E = 0 the expansion is exact while tau grows like a polynomial in r,
    so tau is then taken at 30 digits unless ``dps`` says otherwise.
    """
    rs = [int(r) for r in r_range]
    if len(rs) < 8:
        raise ValueError("convergence fits need at least 8 levels")
    exp = full_expansion(x, N) if exp is None else exp
    if dps is None and x.euler == 0:
        dps = 30
    taus = [tau(x, r, dps=dps) for r in rs]
    approx = [evaluate(exp, r, eval_mode) for r in rs]
    res = [abs(t - a) for t, a in zip(taus, approx)]
    # levels where tau and the expansion both vanish leave only rounding noise
    floor = NOISE_REL * max(1.0, max(abs(t) for t in taus))
    keep = [(r, e) for r, e in zip(rs, res) if e > floor]
    if max(res) < EXACT_TOL or len(keep) < 2:
        fitted = math.inf
    else:
        slope = np.polyfit(np.log([r for r, _ in keep]), np.log([e for _, e in keep]), 1)[0]
        fitted = float(-slope)
    return ConvergenceReport(rs, res, fitted, expected_order(exp), taus, approx)


# ---- least-squares coefficient recovery -------------------------------------------------

class RankDeficientFit(ValueError):
    pass


@dataclass
class FitResult:
    coefficients: dict[RationalModZ, dict[Fraction, complex]]
    max_residual: float
    condition_number: float
    rank: int


def fit_expansion(samples, q_set, exponent_ladder) -> FitResult:
    """Least-squares fit of samples to sum_j e^{2 pi i r q_j} sum_m c_m^j r^lambda_m.

    ``exponent_ladder`` is either one sequence shared by every q or a
    mapping from each q to its own exponents.  Branches whose magnitudes
    differ by powers of r are only separable with per-branch ladders.
    Columns are scaled to unit norm before the solve; the condition number
    of the scaled design matrix is reported.
    """
    qs = [q if isinstance(q, RationalModZ) else RationalModZ(q) for q in q_set]
    if len(set(qs)) != len(qs):
        raise ValueError("q values must be distinct modulo 1")
    if isinstance(exponent_ladder, dict):
        ladder = {(q if isinstance(q, RationalModZ) else RationalModZ(q)): v for q, v in exponent_ladder.items()}
        missing = [str(q) for q in qs if q not in ladder]
        if missing:
            raise ValueError(f"no exponent ladder for q = {', '.join(missing)}")
        lams = {q: [Fraction(e) for e in ladder[q]] for q in qs}
    else:
        shared = [Fraction(e) for e in exponent_ladder]
        lams = {q: shared for q in qs}
    keys = [(q, lam) for q in qs for lam in lams[q]]
    samples = list(samples)
    if len(samples) < 2 * len(keys):
        raise ValueError(f"need at least {2 * len(keys)} samples, got {len(samples)}")
    rs = np.array([float(r) for r, _ in samples])
    y = np.array([complex(v) for _, v in samples])
    phases = {q: np.array([np.exp(2j * np.pi * float((q.value * int(r)) % 1)) for r, _ in samples]) for q in qs}
    M = np.column_stack([phases[q] * rs ** float(lam) for q, lam in keys])
    norms = np.linalg.norm(M, axis=0)
    sol, _, rank, sv = np.linalg.lstsq(M / norms, y, rcond=None)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
    if rank < len(keys):
        raise RankDeficientFit(f"design matrix has rank {rank} < {len(keys)} columns")
    c = sol / norms
    out: dict[RationalModZ, dict[Fraction, complex]] = {q: {} for q in qs}
    for (q, lam), v in zip(keys, c):
        out[q][lam] = complex(v)
    resid = float(np.max(np.abs(M @ c - y))) if len(y) else 0.0
    return FitResult(out, resid, cond, int(rank))


# ---- Casson-Walker -------------------------------------------------------------------------

@dataclass
class CassonCheck:
    lambda_cw: Fraction
    target: complex
    series_ratio: complex
    expansion_ratio: complex | None
    rel_error: float
    passed: bool

    def to_json(self) -> dict:
        d = asdict(self)
        d["lambda_cw"] = str(self.lambda_cw)
        for key in ("target", "series_ratio", "expansion_ratio"):
            v = d[key]
            d[key] = None if v is None else {"re": v.real, "im": v.imag}
        return d


def _exceptional(x: SeifertData) -> list[int]:
    return [a for a in x.alphas if a > 1]


def lambda_cw(x: SeifertData) -> Fraction:
    """Casson-Walker invariant of a Seifert rational homology sphere over S^2."""
    if x.base_class != "o" or x.genus != 0:
        raise ValueError("Casson-Walker formula covers orientable genus-0 bases")
    E = x.euler
    if E == 0:
        raise ValueError("not a rational homology sphere (E = 0)")
    alphas = _exceptional(x)
    S = sum((dedekind_symbol(p[1], p[0]) for p in x.pairs), Fraction(0))
    tail = (2 - len(alphas) + sum((Fraction(1, a * a) for a in alphas), Fraction(0))) / E
    return Fraction(1, 12) * (3 * _sign(E) - E - S - tail)


def casson_lescop(x: SeifertData) -> Fraction:
    """Lescop's extension at E = 0, -(A/24)(2 - n + sum 1/alpha^2)."""
    if x.euler != 0:
        raise ValueError("this branch of the formula is for E = 0")
    alphas = _exceptional(x)
    A = math.prod(alphas)
    return -Fraction(A, 24) * (2 - len(alphas) + sum((Fraction(1, a * a) for a in alphas), Fraction(0)))


def lens_casson_walker(p: int, q: int) -> Fraction:
    """lambda_CW(L(p, q)) = S(q/p) / 12, so that c1 = (pi i / 2) S(q/p)."""
    return dedekind_symbol(q, p) / 12


def trivial_ratio_series(x: SeifertData, order: int = 8) -> complex:
    """c1/c0 of the trivial branch of tau from the Taylor data of prod sin(pi z/alpha)/sin^(n-2)."""
    y = asymptotic_presentation(x)
    f = ls.inv_sin_pow(len(y.pairs) - 2, order)
    for a in y.alphas:
        f = f * ls.sin_affine(0, math.pi / a, order)
    ratio = complex(f.derivative_at(4)) / complex(f.derivative_at(2))
    return 1j / (4 * math.pi * float(y.euler)) * ratio + 1j * prefactor(x).phase_c


def trivial_ratio_expansion(x: SeifertData) -> complex:
    """c1/c0 read off the stationary-phase coefficients of the trivial label."""
    y = asymptotic_presentation(x)
    triv = [lab for lab in index_sets(y).I2a if lab.index == 0 and all(v == 0 for v in lab.n)]
    if not triv:
        raise ValueError("no trivial label")
    _, k2 = _k_bounds(y)
    cs = _i2a_coeffs(y, triv[0], k2 + 6)
    nz = [k for k in sorted(cs) if abs(cs[k]) > 1e-13]
    k0 = nz[0]
    return cs[k0 + 1] / cs[k0] + 1j * prefactor(x).phase_c


def casson_walker(x: SeifertData, tol: float = 1e-6) -> CassonCheck:
    lam = lambda_cw(x)
    target = 6j * math.pi * float(lam)
    series = trivial_ratio_series(x)
    try:
        expansion = trivial_ratio_expansion(x)
    except ValueError:
        expansion = None
    if lam != 0:
        err = abs(series - target) / abs(target)
    else:
        err = abs(series - target)
    return CassonCheck(lam, target, series, expansion, float(err), bool(err < tol))


# ---- reports -----------------------------------------------------------------------------------

CSV_COLUMNS = ["r", "re_tau", "im_tau", "re_approx", "im_approx", "abs_residual"]


def convergence_csv(report: ConvergenceReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r, t, a, e in zip(report.r_values, report.tau_values, report.approx_values, report.residuals):
        w.writerow([r, t.real, t.imag, a.real, a.imag, e])
    return buf.getvalue()
