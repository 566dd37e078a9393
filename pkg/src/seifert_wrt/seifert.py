"""Seifert fibration presentations, global invariants and presentation moves."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, prod
from typing import Iterable, Sequence

from .numtheory import rho_sigma


class SeifertInputError(ValueError):
    pass


@dataclass(frozen=True)
class SeifertData:
    """One presentation of a Seifert fibration.

    ``b`` is present exactly for the normalized form (0 < beta < alpha for
    every fiber).  ``fibers`` is kept literally as given; the formulas run on
    :attr:`pairs`, which adds a (1, 0) pair when there are no fibers at all.
    """

    base_class: str
    genus: int
    b: int | None
    fibers: tuple[tuple[int, int], ...]
    complements: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self) -> None:
        if self.base_class not in ("o", "n"):
            raise SeifertInputError(f"base class must be 'o' or 'n', got {self.base_class!r}")
        if self.genus < 0:
            raise SeifertInputError("genus must be nonnegative")
        if self.base_class == "n" and self.genus == 0:
            raise SeifertInputError("nonorientable base needs genus >= 1")
        fibers = tuple((int(a), int(b)) for a, b in self.fibers)
        object.__setattr__(self, "fibers", fibers)
        for a, bb in fibers:
            if a < 1:
                raise SeifertInputError(f"alpha must be positive in ({a},{bb})")
            if gcd(a, bb) != 1:
                raise SeifertInputError(f"({a},{bb}) is not a coprime pair")
            if self.b is not None and not 0 < bb < a:
                raise SeifertInputError(f"normalized form needs 0 < beta < alpha, got ({a},{bb})")
        if self.complements:
            comps = tuple((int(r), int(s)) for r, s in self.complements)
            if len(comps) != len(fibers):
                raise SeifertInputError("one (rho, sigma) complement per fiber is required")
            for (a, bb), (r, s) in zip(fibers, comps):
                if a * s - bb * r != 1:
                    raise SeifertInputError(f"bad complement ({r},{s}) for ({a},{bb})")
        else:
            comps = tuple(rho_sigma(a, bb) for a, bb in fibers)
        object.__setattr__(self, "complements", comps)

    # ---- derived data used by the formulas -----------------------------
    @property
    def normalized(self) -> bool:
        return self.b is not None

    @property
    def a_eps(self) -> int:
        return 2 if self.base_class == "o" else 1

    @property
    def ag(self) -> int:
        return self.a_eps * self.genus

    @property
    def beta0(self) -> int:
        return self.b if self.b is not None else 0

    @property
    def pairs(self) -> tuple[tuple[int, int, int, int], ...]:
        """(alpha, beta, rho, sigma) per pair, augmented by (1, 0) when empty."""
        if not self.fibers:
            return ((1, 0, 0, 1),)
        return tuple((a, b, r, s) for (a, b), (r, s) in zip(self.fibers, self.complements))

    @property
    def alphas(self) -> tuple[int, ...]:
        return tuple(p[0] for p in self.pairs)

    @property
    def betas(self) -> tuple[int, ...]:
        return tuple(p[1] for p in self.pairs)

    @property
    def rhos(self) -> tuple[int, ...]:
        return tuple(p[2] for p in self.pairs)

    @property
    def sigmas(self) -> tuple[int, ...]:
        return tuple(p[3] for p in self.pairs)

    @property
    def n(self) -> int:
        """Number of pairs entering the formulas."""
        return len(self.pairs)

    @property
    def k(self) -> int:
        """Pole order n + a_eps g - 2 of the sine denominator."""
        return self.n + self.ag - 2

    @property
    def euler(self) -> Fraction:
        return -self.beta0 - sum((Fraction(b, a) for a, b, _, _ in self.pairs), Fraction(0))

    def with_complements(self, complements: Sequence[tuple[int, int]]) -> "SeifertData":
        return SeifertData(self.base_class, self.genus, self.b, self.fibers, tuple(complements))

    def to_text(self) -> str:
        return format_seifert(self)

    def __str__(self) -> str:
        return format_seifert(self)


@dataclass(frozen=True)
class GlobalInvariants:
    E: Fraction
    A: int
    H: Fraction
    n: int
    k: int


def global_invariants(x: SeifertData) -> GlobalInvariants:
    """Euler number E, A = prod(alpha), H = A*E, exceptional count n and pole order k."""
    E = x.euler
    A = prod(x.alphas)
    n_exc = sum(1 for a, _ in x.fibers if a > 1)
    return GlobalInvariants(E=E, A=A, H=A * E, n=n_exc, k=x.k)


# ---- text and JSON forms ----------------------------------------------

_PAIR = re.compile(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)")
_HEAD = re.compile(r"^\s*([on])\s*;\s*(\d+)\s*(?:\|\s*(-?\d+)\s*)?(?:;(.*))?$")


def _parse_pairs(body: str) -> tuple[tuple[int, int], ...]:
    body = body.strip()
    if not body:
        return ()
    pairs = []
    pos = 0
    for m in _PAIR.finditer(body):
        sep = body[pos:m.start()].strip()
        if sep not in ("", ",") or (pairs and sep != ","):
            raise SeifertInputError(f"malformed fiber list: {body!r}")
        pairs.append((int(m.group(1)), int(m.group(2))))
        pos = m.end()
    if body[pos:].strip() or not pairs:
        raise SeifertInputError(f"malformed fiber list: {body!r}")
    return tuple(pairs)


def parse(data) -> SeifertData:
    """Parse text like ``"o;0|-1;(2,1),(3,1)"`` / ``"o;0;(2,1)"`` or a dict."""
    if isinstance(data, SeifertData):
        return data
    if isinstance(data, dict):
        try:
            return SeifertData(
                base_class=data["base_class"],
                genus=int(data["genus"]),
                b=None if data.get("b") is None else int(data["b"]),
                fibers=tuple(tuple(p) for p in data.get("fibers", ())),
            )
        except KeyError as exc:
            raise SeifertInputError(f"missing field {exc}") from None
    if not isinstance(data, str):
        raise SeifertInputError(f"cannot parse {type(data).__name__}")
    text = data.strip()
    if text.startswith("{"):
        try:
            return parse(json.loads(text))
        except json.JSONDecodeError as exc:
            raise SeifertInputError(str(exc)) from None
    m = _HEAD.match(text)
    if not m:
        raise SeifertInputError(f"malformed Seifert string: {data!r}")
    eps, g, b, body = m.groups()
    if b is None and body is None:
        raise SeifertInputError(f"need '|b' (normalized) or ';' (non-normalized): {data!r}")
    return SeifertData(eps, int(g), None if b is None else int(b), _parse_pairs(body or ""))


def format_seifert(x: SeifertData) -> str:
    fib = ",".join(f"({a},{b})" for a, b in x.fibers)
    if x.b is not None:
        return f"{x.base_class};{x.genus}|{x.b}" + (f";{fib}" if fib else "")
    return f"{x.base_class};{x.genus};{fib}"


def to_json_dict(x: SeifertData) -> dict:
    return {
        "base_class": x.base_class,
        "genus": x.genus,
        "b": x.b,
        "fibers": [list(p) for p in x.fibers],
    }


# ---- moves --------------------------------------------------------------

@dataclass(frozen=True)
class AddTrivialPair:
    position: int | None = None


@dataclass(frozen=True)
class DeleteTrivialPair:
    index: int | None = None


@dataclass(frozen=True)
class ShiftBetas:
    K: tuple[int, ...]


def to_non_normalized(x: SeifertData) -> SeifertData:
    """Absorb b as a leading (1, b) pair; non-normalized input is returned as is."""
    if x.b is None:
        return x
    return SeifertData(x.base_class, x.genus, None, ((1, x.b),) + x.fibers)


def normal_form(x: SeifertData) -> SeifertData:
    """Normalized presentation of the same fibration."""
    b = x.beta0
    fibers = []
    for a, bb in x.fibers:
        q, rem = divmod(bb, a)
        b += q
        if a > 1:
            fibers.append((a, rem))
    return SeifertData(x.base_class, x.genus, b, tuple(fibers))


def apply_move(x: SeifertData, move) -> SeifertData:
    x = to_non_normalized(x)
    fibers = list(x.fibers)
    if isinstance(move, AddTrivialPair):
        pos = len(fibers) if move.position is None else move.position
        fibers.insert(pos, (1, 0))
    elif isinstance(move, DeleteTrivialPair):
        if move.index is None:
            try:
                idx = fibers.index((1, 0))
            except ValueError:
                raise SeifertInputError("no (1,0) pair to delete") from None
        else:
            idx = move.index
            if not 0 <= idx < len(fibers) or fibers[idx] != (1, 0):
                raise SeifertInputError(f"pair {idx} is not (1,0)")
        del fibers[idx]
    elif isinstance(move, ShiftBetas):
        K = tuple(move.K)
        if len(K) != len(fibers):
            raise SeifertInputError("one shift per pair is required")
        if sum(K) != 0:
            raise SeifertInputError(f"shifts must sum to zero, got {sum(K)}")
        fibers = [(a, b + k * a) for (a, b), k in zip(fibers, K)]
    else:
        raise SeifertInputError(f"unknown move {move!r}")
    return SeifertData(x.base_class, x.genus, None, tuple(fibers))


def apply_moves(x: SeifertData, moves: Iterable) -> SeifertData:
    for mv in moves:
        x = apply_move(x, mv)
    return x


# ---- classification -----------------------------------------------------

@dataclass(frozen=True)
class SpecialClass:
    is_s2xs1: bool
    asympt_supported: bool
    exact_supported: bool
    is_special_E0: bool


def classify_special(x: SeifertData) -> SpecialClass:
    nf = normal_form(x)
    s2xs1 = False
    if nf.base_class == "o" and nf.genus == 0:
        if nf.b == 0 and not nf.fibers:
            s2xs1 = True
        elif nf.b == -1 and len(nf.fibers) == 2:
            (a1, b1), (a2, b2) = nf.fibers
            s2xs1 = a1 == a2 and b1 + b2 == a1
    inv_sum = sum(Fraction(1, a) for a in x.alphas)
    return SpecialClass(
        is_s2xs1=s2xs1,
        asympt_supported=x.ag % 2 == 0,
        exact_supported=True,
        is_special_E0=x.euler == 0 and inv_sum >= x.k,
    )
