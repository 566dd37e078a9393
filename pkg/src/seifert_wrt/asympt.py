"""Large-r asymptotic expansion of Z(X; r) and tau_r(X).

The polar part is a finite sum of residues that the Laurent engine returns
as exact Laurent polynomials in r; the stationary-phase part is a ladder
of r^(1/2 - k) coefficients obtained from high-order derivatives.  Both are
merged per q-value into an :class:`AsymptoticExpansion`.

Expansions are stored at the level of Z; the prefactor relating Z to tau
travels along in ``prefactor_meta``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from . import lseries as ls
from .exact import Prefactor, prefactor
from .lseries import RCoeff
from .moduli import FlatFamilyLabel, index_sets, rep_exists
from .numtheory import RationalModZ, lcm
from .seifert import SeifertData

PI = math.pi
MERGE_TOL = 1e-12
POLAR_DPS = 30


class UnsupportedParity(ValueError):
    pass


def _require_even(x: SeifertData) -> None:
    if x.ag % 2:
        raise UnsupportedParity(
            f"asymptotics need a_eps*g even; {x} has a_eps*g = {x.ag}")


def asymptotic_presentation(x: SeifertData) -> SeifertData:
    """Non-normalized presentation with b folded into the first pair.

    The residue and stationary-phase formulas assume beta0 = 0; Z and the
    prefactor are unchanged by this move, and so is the pair count.
    """
    if not x.normalized or x.b == 0:
        if x.normalized:
            return SeifertData(x.base_class, x.genus, None, x.fibers)
        return x
    if not x.fibers:
        return SeifertData(x.base_class, x.genus, None, ((1, x.b),))
    (a, b), rest = x.fibers[0], x.fibers[1:]
    return SeifertData(x.base_class, x.genus, None, ((a, b + x.b * a),) + rest)


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def sym_pm(x) -> int:
    return 2 if x == 0 else 1


def sym_z(x) -> int:
    return 2 if (2 * Fraction(x)).denominator == 1 else 1


def b_factor(x: SeifertData, label: FlatFamilyLabel) -> float:
    n = x.n
    sign = (-1) ** (((n + sum(x.sigmas)) * label.index) % 2)
    den = math.prod(sym_z(Fraction(v) / a) for v, a in zip(label.n, x.alphas))
    return sign * 2 ** n / den


def _rot(v: Fraction, a: int, rho: int, dps=None):
    # 2 pi rho n' / alpha reduced modulo 2 pi before conversion
    f = Fraction(rho) * v / a
    return 2 * _pi(dps) * _real(f - math.floor(f), dps)


def _pi(dps):
    return mpmath.pi if dps else PI


def _real(f: Fraction, dps):
    if dps:
        return mpmath.mpf(f.numerator) / f.denominator
    return float(f)


def _cplx(v, dps):
    return mpmath.mpc(v) if dps else complex(v)


# ---- polar residues --------------------------------------------------------------
# With dps set, the series arithmetic runs in mpmath at that many digits and
# only the final Laurent coefficients are rounded to complex floats.

def _z0_series(x: SeifertData, label: FlatFamilyLabel, order: int, dps=None) -> ls.LaurentSeries:
    k = x.k
    with ls._ctx(dps):
        P = _pi(dps)
        s = ls.exp_quadratic(RCoeff({1: _cplx(1j, dps) * P * _real(x.euler, dps) / 2}), order, dps)
        s = s * ls.inv_sin_pow(k, order, dps=dps) * ls.cot_rz(order, dps)
        for v, (a, _, rho, _) in zip(label.n, x.pairs):
            th = _rot(Fraction(v), a, rho, dps)
            w = 2 * P * _real(Fraction(v) / a, dps)
            sin_th = mpmath.sin(th) if dps else math.sin(th)
            cos_th = mpmath.cos(th) if dps else math.cos(th)
            term = (ls.cos_affine(0, P / a, order, dps) * ls.sin_affine(0, (w, 1), order, dps)).scale(
                _cplx(1j, dps) * sin_th)
            term = term + (ls.sin_affine(0, P / a, order, dps) * ls.cos_affine(0, (w, 1), order, dps)).scale(
                _cplx(cos_th, dps))
            s = s * term
        return s


def _round(c: RCoeff) -> RCoeff:
    return RCoeff({e: complex(v) for e, v in c.terms.items()})


def z0_poly(x: SeifertData, label: FlatFamilyLabel, dps=None) -> RCoeff:
    """Z0 of an I2 label as a Laurent polynomial in r."""
    order = x.k + 1
    with ls._ctx(dps):
        return _round(_z0_series(x, label, order, dps).residue() * (-_pi(dps) / 2))


def _fiber_sines(x: SeifertData, label, order: int, dps=None) -> list[dict[int, ls.LaurentSeries]]:
    # mu * sin(2 pi rho n'/alpha - pi mu z/alpha) for each pair and each sign mu
    out = []
    for v, (a, _, rho, _) in zip(label.n, x.pairs):
        th = _rot(Fraction(v), a, rho, dps)
        out.append({mu: ls.sin_affine(th, -_pi(dps) * mu / a, order, dps).scale(_cplx(mu, dps))
                    for mu in (1, -1)})
    return out


def z1_poly(x: SeifertData, label: FlatFamilyLabel, dps=None) -> RCoeff:
    """Z1 of an I2 label as a Laurent polynomial in r (plain form, any E)."""
    order = x.k + 1
    with ls._ctx(dps):
        P = _pi(dps)
        I = _cplx(1j, dps)
        base = ls.exp_quadratic(RCoeff({1: I * P * _real(x.euler, dps) / 2}), order, dps)
        base = base * ls.inv_sin_pow(x.k, order, dps=dps)
        sines = _fiber_sines(x, label, order, dps)
        total = RCoeff()
        for mus in itertools.product((1, -1), repeat=x.n):
            a = sum((Fraction(mu) * v / al for mu, v, al in zip(mus, label.n, x.alphas)), Fraction(0))
            if a == 0:
                continue
            sa, aa = _sign(a), abs(a)
            lin = None
            for m in range(math.floor(aa) + 1):
                w = Fraction(sa, sym_pm(m) * sym_pm(m - aa))
                e = ls.exp_linear(RCoeff({1: 2 * I * P * sa * _real(m - aa, dps)}), order, dps).scale(
                    _cplx(_real(w, dps), dps))
                lin = e if lin is None else lin + e
            s = base * lin
            for sj, mu in zip(sines, mus):
                s = s * sj[mu]
            total = total + s.residue()
        return _round(total * (-P * I / (-2) ** x.n))


def z1_tilde(x: SeifertData, label: FlatFamilyLabel, r: int) -> complex:
    """The E = 0 variant of Z1 at a concrete level r (valid at every r)."""
    if x.euler != 0:
        raise ValueError("the modified Z1 applies to E = 0")
    k = x.k
    order = k + 1
    inv = ls.inv_sin_pow(k, order)
    total = 0j
    for mus in itertools.product((1, -1), repeat=x.n):
        mu_prod = math.prod(mus)
        shift = sum((Fraction(mu, al) for mu, al in zip(mus, x.alphas)), Fraction(0)) / (2 * r)
        for mps in itertools.product((1, -1), repeat=x.n):
            a = sum((Fraction(mp) * v / al for mp, v, al in zip(mps, label.n, x.alphas)), Fraction(0)) + shift
            if a == 0:
                continue
            sa, aa = _sign(a), abs(a)
            ph = sum((Fraction(mu * rho * mp) * v / al
                      for mu, mp, v, (al, _, rho, _) in zip(mus, mps, label.n, x.pairs)), Fraction(0))
            phase = np.exp(2j * PI * float(ph - math.floor(ph)))
            for m in range(math.floor(aa) + 1):
                w = sa / (sym_pm(m) * sym_pm(m - aa))
                e = ls.exp_linear(2j * PI * r * sa * float(m - aa), order)
                total += mu_prod * w * phase * complex((e * inv).residue()[0])
    return -PI * 1j * (0.25j) ** x.n * total


# ---- closed form for three fibers ---------------------------------------------------

def z1_n3_closed(x: SeifertData, label: FlatFamilyLabel) -> complex:
    """Z1 for genus 0 and three pairs from the finite mu'/m sum."""
    if x.n != 3 or x.genus != 0:
        raise ValueError("closed form needs exactly three pairs and genus 0")
    pre = 0.25j * math.prod(math.sin(_rot(Fraction(v), a, rho))
                            for v, (a, _, rho, _) in zip(label.n, x.pairs))
    total = 0.0
    for mus in itertools.product((1, -1), repeat=3):
        a = sum((Fraction(mu) * v / al for mu, v, al in zip(mus, label.n, x.alphas)), Fraction(0))
        if a <= 0:
            continue
        inner = sum(1 / (sym_pm(m) * sym_pm(m - a)) for m in range(math.floor(a) + 1))
        total += math.prod(mus) * inner
    return pre * total


# ---- polar terms ----------------------------------------------------------------------

@dataclass(frozen=True)
class PolarTerm:
    label: FlatFamilyLabel
    b: float
    Z0: RCoeff
    Z1: RCoeff

    def contribution(self) -> RCoeff:
        """b * r * (Z0 + Z1) as a Laurent polynomial (phase e^{2 pi i r q} excluded)."""
        s = self.Z0 + self.Z1
        return RCoeff({e + 1: self.b * c for e, c in s.terms.items()})


def polar_terms(x: SeifertData, dps: int | None = None) -> list[PolarTerm]:
    """Residue terms per I2 label, computed on :func:`asymptotic_presentation`."""
    _require_even(x)
    x = asymptotic_presentation(x)
    if x.k <= 0:
        return []
    out = []
    for lab in index_sets(x).I2a + index_sets(x).I2b:
        out.append(PolarTerm(lab, b_factor(x, lab), z0_poly(x, lab, dps), z1_poly(x, lab, dps)))
    return sorted(out, key=lambda t: t.label.sort_key)


def z_polar(x: SeifertData, r: int, terms=None) -> complex:
    terms = polar_terms(x) if terms is None else terms
    total = 0j
    for t in terms:
        total += _exp_q(t.label.q, r) * t.contribution()(r)
    return total


def _exp_q(q: RationalModZ, r: int) -> complex:
    f = q.value * r
    return complex(np.exp(2j * PI * float(f - math.floor(f))))


# ---- stationary-phase coefficients ------------------------------------------------------

def _k_bounds(x: SeifertData) -> tuple[int, int]:
    k0 = x.n % 2
    k1 = (k0 - x.n - x.ag + 2) // 2
    return k1, min(0, k1)


def _i1_coeffs(x: SeifertData, label: FlatFamilyLabel, kmax: int) -> dict[int, complex]:
    E = x.euler
    zst = -2 / E * (label.index - sum((Fraction(v) / a for v, a in zip(label.n, x.alphas)), Fraction(0)))
    z0 = float(zst)
    order = max(2 * kmax, 0)
    f = ls.inv_sin_pow(x.k, order, center=zst)
    for v, (a, _, rho, _) in zip(label.n, x.pairs):
        f = f * ls.sin_affine(PI * (2 * rho * float(v) - z0) / a, -PI / a, order)
    Ef = float(E)
    pre = (-1) ** x.n * np.exp(1j * PI / 4 * _sign(E)) * math.sqrt(2 / abs(Ef))
    out = {}
    for k in range(0, kmax + 1):
        out[k] = complex(pre / math.factorial(k) * (1j / (2 * PI * Ef)) ** k * f.derivative_at(2 * k))
    return out


def _i2a_coeffs(x: SeifertData, label: FlatFamilyLabel, kmax: int) -> dict[int, complex]:
    E = x.euler
    Ef = float(E)
    k1, _ = _k_bounds(x)
    ks = x.k
    kp_max = 2 * kmax + ks
    if kp_max < 0:
        return {}
    fsum = None
    for mus in itertools.product((1, -1), repeat=x.n):
        a = sum((Fraction(mu) * v / al for mu, v, al in zip(mus, label.n, x.alphas)), Fraction(0))
        if a.denominator != 1:
            continue
        f = ls.pi_z_over_sin_pow(ks, kp_max)
        for v, mu, (al, _, rho, _) in zip(label.n, mus, x.pairs):
            ph = Fraction(2 * rho * mu) * v / al
            ph = ph - 2 * math.floor(ph / 2)
            f = f * ls.sin_affine(PI * float(ph), -PI / al, kp_max)
        fsum = f if fsum is None else fsum + f
    b = b_factor(x, label)
    pre = (b / ((-2) ** x.n * PI ** ks) * np.exp(1j * PI / 4 * _sign(E)) / math.sqrt(2 * PI * abs(Ef)))
    out = {}
    for k in range(k1, kmax + 1):
        kp = 2 * k + ks
        if kp < 0:
            continue
        deriv = fsum.derivative_at(kp)
        out[k] = complex(pre * math.gamma(k + 0.5) / math.factorial(kp) * (2j / (PI * Ef)) ** k * deriv)
    return out


def zint_coeffs(x: SeifertData, N: int = 0, kmax: int | None = None) -> dict[FlatFamilyLabel, dict[int, complex]]:
    """Coefficients c_k (k = k2 .. kmax) of r^{-1/2} Z_int per label of I1 and I2a."""
    _require_even(x)
    x = asymptotic_presentation(x)
    if x.euler == 0:
        raise ValueError("stationary-phase coefficients need E != 0")
    _, k2 = _k_bounds(x)
    if kmax is None:
        kmax = k2 + N + 2
    sets = index_sets(x)
    out = {}
    for lab in sets.I1:
        out[lab] = _i1_coeffs(x, lab, kmax)
    for lab in sets.I2a:
        out[lab] = _i2a_coeffs(x, lab, kmax)
    return out


# ---- E = 0 special term --------------------------------------------------------------

def r0_threshold(x: SeifertData) -> int:
    if x.n == 1:
        return 2
    inv = sum((Fraction(1, a) for a in x.alphas), Fraction(0))
    return max(2, math.ceil(inv * 2 * lcm(*x.alphas)) + 1)


@dataclass(frozen=True)
class ZSpec:
    """r * Z_spec as per-q coefficients of r^1, plus the threshold level r0."""

    coeffs: dict[RationalModZ, complex]
    r0: int

    def __call__(self, r: int) -> complex:
        return sum((_exp_q(q, r) * c for q, c in self.coeffs.items()), 0j)


def zspec_term(x: SeifertData) -> ZSpec:
    _require_even(x)
    x = asymptotic_presentation(x)
    if x.euler != 0:
        raise ValueError("Z_spec applies to E = 0")
    r0 = r0_threshold(x)
    inv = sum((Fraction(1, a) for a in x.alphas), Fraction(0))
    coeffs: dict[RationalModZ, complex] = {}
    if x.k <= 0 or inv < x.k:
        return ZSpec(coeffs, r0)
    order = x.k + 1
    inv_sin = ls.inv_sin_pow(x.k, order)
    for lab in index_sets(x).I2a:
        total = 0j
        for mps in itertools.product((1, -1), repeat=x.n):
            a = sum((Fraction(mp) * v / al for mp, v, al in zip(mps, lab.n, x.alphas)), Fraction(0))
            if a.denominator != 1:
                continue
            for mus in itertools.product((1, -1), repeat=x.n):
                t = sum((Fraction(mu, al) for mu, al in zip(mus, x.alphas)), Fraction(0))
                if t >= 0:
                    continue
                ph = sum((Fraction(mu * rho * mp) * v / al
                          for mu, mp, v, (al, _, rho, _) in zip(mus, mps, lab.n, x.pairs)), Fraction(0))
                phase = np.exp(2j * PI * float(ph - math.floor(ph)))
                if x.n % 2:
                    f = ls.cos_affine(0, PI * float(t), order)
                else:
                    f = ls.sin_affine(0, PI * float(t), order).scale(-1j)
                total += math.prod(mus) * phase * complex((f * inv_sin).residue()[0])
        c = PI * 1j * (0.25j) ** x.n * b_factor(x, lab) * total
        coeffs[lab.q] = coeffs.get(lab.q, 0j) + c
    return ZSpec(coeffs, r0)


# ---- the assembled expansion ---------------------------------------------------------------

@dataclass
class AsymptoticExpansion:
    """Z(X; r) ~ sum_q e^{2 pi i r q} sum_lambda c r^lambda; tau = prefactor * Z."""

    branches: dict[RationalModZ, dict[Fraction, complex]]
    depth: int
    prefactor_meta: Prefactor
    polar: dict[RationalModZ, RCoeff] = field(default_factory=dict)
    valid_from: int = 2
    exact: bool = False

    def leading_exponent(self) -> Fraction | None:
        exps = [e for br in self.branches.values() for e, c in br.items() if abs(c) > 0]
        return max(exps) if exps else None

    def z_value(self, r: int) -> complex:
        total = 0j
        for q in sorted(self.branches):
            br = self.branches[q]
            val = sum((c * r ** float(e) for e, c in sorted(br.items())), 0j)
            total += _exp_q(q, r) * val
        return total

    def tau_branches(self, mode: str = "exact_phase") -> dict[RationalModZ, dict[Fraction, complex]]:
        """Coefficients of tau, with the phase e^{ic/r} either kept aside or expanded."""
        pf = self.prefactor_meta
        out = {}
        lead = self.leading_exponent()
        floor_exp = None if lead is None else lead - Fraction(self.depth, 2)
        for q, br in self.branches.items():
            nb: dict[Fraction, complex] = {}
            for e, c in br.items():
                if mode == "series":
                    m = 0
                    while floor_exp is not None and e - m >= floor_exp:
                        ex = e - m + pf.power
                        nb[ex] = nb.get(ex, 0j) + pf.b * c * (1j * pf.phase_c) ** m / math.factorial(m)
                        m += 1
                else:
                    nb[e + pf.power] = nb.get(e + pf.power, 0j) + pf.b * c
            out[q] = nb
        return out


def evaluate(exp: AsymptoticExpansion, r: int, eval_mode: str = "exact_phase") -> complex:
    """Evaluate the expansion of tau at level r."""
    pf = exp.prefactor_meta
    if eval_mode == "exact_phase":
        return pf(r) * exp.z_value(r)
    if eval_mode == "series":
        total = 0j
        for q, br in sorted(exp.tau_branches("series").items()):
            total += _exp_q(q, r) * sum((c * r ** float(e) for e, c in sorted(br.items())), 0j)
        return total
    raise ValueError(f"unknown eval mode {eval_mode!r}")


def _add(br: dict, e: Fraction, c: complex) -> None:
    br[e] = br.get(e, 0j) + c


def to_minimal_form(branches: dict) -> dict:
    out = {}
    for q in sorted(branches):
        br = {e: c for e, c in branches[q].items() if abs(c) >= MERGE_TOL}
        if br:
            out[q] = dict(sorted(br.items(), reverse=True))
    return out


def _rp2_expansion(x: SeifertData, N: int) -> AsymptoticExpansion:
    # Z = -(1/2) tan(pi/(2r)) (1 + e^{i pi r}) on the branches q = 0, 1/2
    br: dict[Fraction, complex] = {}
    for j in range(1, N // 2 + 2):
        B = ls.bernoulli(2 * j)
        coef = (-1) ** (j - 1) * 2 ** (2 * j) * (2 ** (2 * j) - 1) * B / math.factorial(2 * j)
        br[Fraction(1 - 2 * j)] = -0.5 * float(coef) * (PI / 2) ** (2 * j - 1)
    lead = Fraction(-1)
    br = {e: c for e, c in br.items() if e >= lead - Fraction(N, 2)}
    branches = {RationalModZ(0): dict(br), RationalModZ(Fraction(1, 2)): dict(br)}
    return AsymptoticExpansion(branches, N, prefactor(x), exact=False)


def full_expansion(x: SeifertData, N: int = 0, dps: int | None = POLAR_DPS) -> AsymptoticExpansion:
    """Branches of Z keyed by q, polar parts complete, stationary-phase ladder to depth N.

    The polar residues run at ``dps`` digits (None for plain floats) since
    their top coefficients get multiplied by r^k at evaluation time.
    """
    if x.ag % 2:
        if x.base_class == "n" and x.genus == 1 and x.normalized and x.b == 0 and not x.fibers:
            return _rp2_expansion(x, N)
        _require_even(x)
    pf = prefactor(x)
    x = asymptotic_presentation(x)
    if x.euler == 0 and x.k <= 0:
        # S^2 x S^1 type: tau = 1 at every level, so Z = r / b
        return AsymptoticExpansion({RationalModZ(0): {Fraction(1): 1 / pf.b}}, N, pf, exact=True)
    branches: dict[RationalModZ, dict[Fraction, complex]] = {}
    polar: dict[RationalModZ, RCoeff] = {}
    for t in polar_terms(x, dps):
        polar[t.label.q] = polar.get(t.label.q, RCoeff()) + t.contribution()
    for q, poly in polar.items():
        br = branches.setdefault(q, {})
        for e, c in poly.terms.items():
            _add(br, Fraction(e), complex(c))
    valid_from = 2
    if x.euler == 0:
        spec = zspec_term(x)
        for q, c in spec.coeffs.items():
            _add(branches.setdefault(q, {}), Fraction(1), c)
        if spec.coeffs:
            valid_from = spec.r0
        branches = to_minimal_form(branches)
        return AsymptoticExpansion(branches, N, pf, polar, valid_from, exact=True)

    branches = to_minimal_form(branches)
    polar_lead = max((e for br in branches.values() for e in br), default=None)
    _, k2 = _k_bounds(x)
    kmax = k2 + N + 2
    while True:
        coeffs = zint_coeffs(x, N, kmax)
        scale = max((abs(c) for cs in coeffs.values() for c in cs.values()), default=0.0)
        int_exps = [Fraction(1, 2) - k for cs in coeffs.values() for k, c in cs.items()
                    if abs(c) > MERGE_TOL * max(scale, 1.0)]
        lead_candidates = [e for e in (polar_lead, max(int_exps, default=None)) if e is not None]
        if not lead_candidates:
            kmax += 2
            if kmax > k2 + N + 40:
                break
            continue
        lead = max(lead_candidates)
        floor_exp = lead - Fraction(N, 2)
        if Fraction(1, 2) - kmax < floor_exp:
            break
        kmax += 2
    int_br: dict[RationalModZ, dict[Fraction, complex]] = {}
    for lab, cs in coeffs.items():
        for k, c in cs.items():
            e = Fraction(1, 2) - k
            if e >= floor_exp:
                _add(int_br.setdefault(lab.q, {}), e, c)
    for q, br in to_minimal_form(int_br).items():
        tgt = branches.setdefault(q, {})
        for e, c in br.items():
            _add(tgt, e, c)
    return AsymptoticExpansion(to_minimal_form(branches), N, pf, polar, valid_from)


# ---- export ---------------------------------------------------------------------------------

def _exp_text(e: Fraction) -> str:
    return f"{int(2 * e)}/2"


def expansion_to_json(exp: AsymptoticExpansion, mode: str = "exact_phase") -> dict:
    pf = exp.prefactor_meta
    prefactor_json = {"power": str(pf.power), "phase_c": pf.phase_c,
                      "b_re": pf.b.real, "b_im": pf.b.imag}
    branches = exp.branches if mode == "exact_phase" else exp.tau_branches("series")
    out = {
        "eval_mode": mode,
        "depth": exp.depth,
        "valid_from": exp.valid_from,
        "prefactor": prefactor_json,
        "branches": [
            {"q": str(q), "terms": [{"exponent": _exp_text(e), "re": c.real, "im": c.imag}
                                    for e, c in sorted(br.items(), reverse=True)],
             "prefactor": prefactor_json}
            for q, br in sorted(exp.branches.items() if mode == "exact_phase" else branches.items())
        ],
        "polar": [
            {"q": str(q), "terms": [{"exponent": e, "re": complex(c).real, "im": complex(c).imag}
                                    for e, c in sorted(poly.terms.items(), reverse=True)]}
            for q, poly in sorted(exp.polar.items())
        ],
    }
    return out


def vanish_scan(x: SeifertData) -> list[dict]:
    """Z1 magnitudes at non-realizable I2b labels."""
    _require_even(x)
    x = asymptotic_presentation(x)
    out = []
    for lab in index_sets(x).I2b:
        if rep_exists(x, lab):
            continue
        z1 = z1_poly(x, lab) if x.k > 0 else RCoeff()
        out.append({"label": str(lab), "q": str(lab.q), "max_abs_z1": z1.max_abs()})
    return out
