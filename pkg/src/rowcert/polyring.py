"""Polynomial and Laurent polynomial values over a base ring.

A value lives in one of three ambients over a base ring R:

* ``poly``:    R[X], exponents >= 0;
* ``laurent``: R[X, 1/X], any integer exponents;
* ``scalar``:  R itself, a degenerate single-exponent ambient that lets row
  and witness code treat all three uniformly.

Values are stored as a starting exponent plus a dense coefficient tuple with
no zero coefficients at either end, so equality is structural.  All
coefficient arithmetic delegates to the base ring and stays exact.
"""

from __future__ import annotations

import random
from typing import Any, Callable, Iterator, Optional

from .rings import (
    Payload,
    Ring,
    RingMap,
    UnsupportedRing,
    _split_top,
    format_poly_text,
    parse_poly_text,
)

MODES = ("poly", "laurent", "scalar")


class ZeroPolynomial(Exception):
    """An operation that needs a nonzero value received zero."""


class LeadingNotUnit(Exception):
    """Division attempted by a value whose top coefficient is not a unit."""


class NonUnitEvaluationPoint(Exception):
    """Laurent evaluation requested at a point that is not a unit."""


class Ambient:
    """A base ring together with one of the three exponent disciplines."""

    __slots__ = ("ring", "mode")

    def __init__(self, ring: Ring, mode: str) -> None:
        if mode not in MODES:
            raise ValueError(f"unknown ambient mode {mode!r}")
        self.ring = ring
        self.mode = mode

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Ambient)
            and self.ring == other.ring
            and self.mode == other.mode
        )

    def __hash__(self) -> int:
        return hash((self.ring, self.mode))

    def __repr__(self) -> str:
        if self.mode == "poly":
            return f"Ambient({self.ring.text()}[X])"
        if self.mode == "laurent":
            return f"Ambient({self.ring.text()}[X, 1/X])"
        return f"Ambient({self.ring.text()})"

    # -- construction -------------------------------------------------------

    def value(self, low: int, coeffs: Any) -> "PolyValue":
        ring = self.ring
        cs = list(coeffs)
        start = 0
        while start < len(cs) and ring.is_zero(cs[start]):
            start += 1
        end = len(cs)
        while end > start and ring.is_zero(cs[end - 1]):
            end -= 1
        if start == end:
            return PolyValue(self, 0, ())
        low = low + start
        cs = cs[start:end]
        if self.mode == "poly" and low < 0:
            raise ValueError("negative exponent in a polynomial ambient")
        if self.mode == "scalar" and (low != 0 or len(cs) != 1):
            raise ValueError("scalar ambient holds single constants only")
        return PolyValue(self, low, tuple(cs))

    def zero(self) -> "PolyValue":
        return PolyValue(self, 0, ())

    def one(self) -> "PolyValue":
        return self.value(0, [self.ring.one()])

    def constant(self, c: Payload) -> "PolyValue":
        return self.value(0, [c])

    def from_int(self, m: int) -> "PolyValue":
        return self.constant(self.ring.from_int(m))

    def monomial(self, c: Payload, e: int) -> "PolyValue":
        return self.value(e, [c])

    def x_power(self, e: int) -> "PolyValue":
        return self.monomial(self.ring.one(), e)

    # -- arithmetic ---------------------------------------------------------

    def _check(self, v: "PolyValue") -> None:
        if v.ambient != self:
            raise ValueError("value belongs to a different ambient")

    def add(self, a: "PolyValue", b: "PolyValue") -> "PolyValue":
        if not a.coeffs:
            return b
        if not b.coeffs:
            return a
        ring = self.ring
        lo = min(a.low, b.low)
        hi = max(a.low + len(a.coeffs), b.low + len(b.coeffs))
        out = [ring.zero()] * (hi - lo)
        for i, c in enumerate(a.coeffs):
            out[a.low - lo + i] = c
        for i, c in enumerate(b.coeffs):
            j = b.low - lo + i
            out[j] = ring.add(out[j], c)
        return self.value(lo, out)

    def neg(self, a: "PolyValue") -> "PolyValue":
        return PolyValue(self, a.low, tuple(self.ring.neg(c) for c in a.coeffs))

    def sub(self, a: "PolyValue", b: "PolyValue") -> "PolyValue":
        return self.add(a, self.neg(b))

    def mul(self, a: "PolyValue", b: "PolyValue") -> "PolyValue":
        if not a.coeffs or not b.coeffs:
            return self.zero()
        ring = self.ring
        out = [ring.zero()] * (len(a.coeffs) + len(b.coeffs) - 1)
        for i, ca in enumerate(a.coeffs):
            if ring.is_zero(ca):
                continue
            for j, cb in enumerate(b.coeffs):
                out[i + j] = ring.add(out[i + j], ring.mul(ca, cb))
        return self.value(a.low + b.low, out)

    def scale(self, a: "PolyValue", c: Payload) -> "PolyValue":
        return self.value(a.low, [self.ring.mul(x, c) for x in a.coeffs])

    def pow(self, a: "PolyValue", e: int) -> "PolyValue":
        if e < 0:
            raise ValueError("negative exponent")
        acc = self.one()
        base = a
        while e:
            if e & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            e >>= 1
        return acc

    # -- text and sampling --------------------------------------------------

    def parse(self, text: str) -> "PolyValue":
        if self.mode == "scalar":
            return self.constant(self.ring.parse_element(text))
        d = parse_poly_text(text, "X", self.ring, allow_negative_exp=self.mode == "laurent")
        if not d:
            return self.zero()
        lo = min(d)
        hi = max(d)
        out = [self.ring.zero()] * (hi - lo + 1)
        for e, c in d.items():
            out[e - lo] = c
        return self.value(lo, out)

    def format(self, v: "PolyValue") -> str:
        self._check(v)
        if self.mode == "scalar":
            return self.ring.format_element(v.coeffs[0] if v.coeffs else self.ring.zero())
        return format_poly_text(list(v.terms()), "X", self.ring)

    def random(self, rng: random.Random, max_degree: int = 3, bound: int = 9) -> "PolyValue":
        ring = self.ring
        if self.mode == "scalar":
            return self.constant(ring.random_element(rng, bound=bound))
        lo = -rng.randint(0, max_degree) if self.mode == "laurent" else 0
        width = rng.randint(0, max_degree) + 1
        return self.value(
            lo, [ring.random_element(rng, bound=bound) for _ in range(width)]
        )


class PolyValue:
    """An immutable element of an :class:`Ambient`."""

    __slots__ = ("ambient", "low", "coeffs")

    def __init__(self, ambient: Ambient, low: int, coeffs: tuple) -> None:
        self.ambient = ambient
        self.low = low
        self.coeffs = coeffs

    # -- structure ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def terms(self) -> Iterator[tuple[int, Payload]]:
        ring = self.ambient.ring
        for i, c in enumerate(self.coeffs):
            if not ring.is_zero(c):
                yield (self.low + i, c)

    def coeff_at(self, e: int) -> Payload:
        i = e - self.low
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.ambient.ring.zero()

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, PolyValue)
            and self.ambient == other.ambient
            and self.low == other.low
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.ambient, self.low, self.coeffs))

    def __repr__(self) -> str:
        return self.ambient.format(self)

    # -- operator sugar -----------------------------------------------------

    def _coerce(self, other: Any) -> Optional["PolyValue"]:
        if isinstance(other, PolyValue):
            return other if other.ambient == self.ambient else None
        if isinstance(other, int) and not isinstance(other, bool):
            return self.ambient.from_int(other)
        return None

    def __add__(self, other: Any) -> "PolyValue":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.ambient.add(self, o)

    __radd__ = __add__

    def __sub__(self, other: Any) -> "PolyValue":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.ambient.sub(self, o)

    def __rsub__(self, other: Any) -> "PolyValue":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.ambient.sub(o, self)

    def __mul__(self, other: Any) -> "PolyValue":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.ambient.mul(self, o)

    __rmul__ = __mul__

    def __neg__(self) -> "PolyValue":
        return self.ambient.neg(self)

    def __pow__(self, e: int) -> "PolyValue":
        return self.ambient.pow(self, e)


# ---------------------------------------------------------------------------
# named operations


def degree_window(v: PolyValue) -> tuple[int, int]:
    """Lowest and highest exponent with a nonzero coefficient."""
    if v.is_zero():
        raise ZeroPolynomial("the zero value has no degree window")
    return (v.low, v.low + len(v.coeffs) - 1)


def low_coeff(v: PolyValue) -> Payload:
    """Coefficient at the lowest present exponent."""
    if v.is_zero():
        raise ZeroPolynomial("the zero value has no end coefficients")
    return v.coeffs[0]


def high_coeff(v: PolyValue) -> Payload:
    """Coefficient at the highest present exponent."""
    if v.is_zero():
        raise ZeroPolynomial("the zero value has no end coefficients")
    return v.coeffs[-1]


def divide_unit_leading(f: PolyValue, g: PolyValue) -> tuple[PolyValue, PolyValue]:
    """Division f = q*g + r with deg r < deg g; needs a unit top coefficient.

    Defined in the polynomial and scalar ambients; Laurent callers shift their
    values to nonnegative exponents first.
    """
    A = f.ambient
    if g.ambient != A:
        raise ValueError("division operands live in different ambients")
    if A.mode == "laurent":
        raise ValueError("division requires the polynomial or scalar ambient")
    if g.is_zero():
        raise ZeroPolynomial("division by the zero value")
    ring = A.ring
    inv = ring.unit_inverse(high_coeff(g))
    if inv is None:
        raise LeadingNotUnit(f"top coefficient {ring.format_element(high_coeff(g))} is not a unit")
    q = A.zero()
    r = f
    gd = degree_window(g)[1]
    while not r.is_zero() and degree_window(r)[1] >= gd:
        rd = degree_window(r)[1]
        c = ring.mul(high_coeff(r), inv)
        t = A.monomial(c, rd - gd)
        q = A.add(q, t)
        r = A.sub(r, A.mul(t, g))
    return (q, r)


def evaluate(v: PolyValue, point: Payload) -> Payload:
    """Evaluate at X = point; Laurent values require point to be a unit."""
    A = v.ambient
    ring = A.ring
    if A.mode == "scalar":
        return v.coeffs[0] if v.coeffs else ring.zero()
    if A.mode == "laurent":
        inv = ring.unit_inverse(point)
        if inv is None:
            raise NonUnitEvaluationPoint(
                f"{ring.format_element(point)} is not a unit of {ring.text()}"
            )
    if v.is_zero():
        return ring.zero()
    acc = ring.zero()
    for c in reversed(v.coeffs):
        acc = ring.add(ring.mul(acc, point), c)
    if v.low == 0:
        return acc
    if v.low > 0:
        return ring.mul(acc, ring.pow(point, v.low))
    return ring.mul(acc, ring.pow(inv, -v.low))


def shift(v: PolyValue, k: int) -> PolyValue:
    """Multiply by X^k; only the Laurent ambient shifts freely."""
    if v.ambient.mode != "laurent":
        raise ValueError("shift requires the Laurent ambient")
    if v.is_zero():
        return v
    return PolyValue(v.ambient, v.low + k, v.coeffs)


def compose(v: PolyValue, w: PolyValue) -> PolyValue:
    """Substitute X -> w into v; negative exponents of v need w to be a unit."""
    if v.ambient.ring != w.ambient.ring:
        raise ValueError("composition needs a common base ring")
    A = w.ambient
    if v.is_zero():
        return A.zero()
    acc = A.zero()
    for c in reversed(v.coeffs):
        acc = A.add(A.mul(acc, w), A.constant(c))
    if v.low == 0:
        return acc
    if v.low > 0:
        return A.mul(acc, A.pow(w, v.low))
    winv = unit_inverse_value(w)
    if winv is None:
        raise NonUnitEvaluationPoint("substitution of negative powers needs a unit")
    return A.mul(acc, A.pow(winv, -v.low))


def to_mode(v: PolyValue, mode: str) -> PolyValue:
    """Reinterpret a value in another ambient over the same base ring."""
    A = Ambient(v.ambient.ring, mode)
    return A.value(v.low, list(v.coeffs))


def map_value(v: PolyValue, fn: Callable[[Payload], Payload], target: Ring,
              mode: Optional[str] = None) -> PolyValue:
    """Apply a coefficient map, producing a value over the target ring."""
    A = Ambient(target, mode or v.ambient.mode)
    return A.value(v.low, [fn(c) for c in v.coeffs])


def map_value_along(v: PolyValue, rmap: RingMap, mode: Optional[str] = None) -> PolyValue:
    if v.ambient.ring != rmap.source:
        raise ValueError("value does not live over the map's source ring")
    return map_value(v, rmap.fn, rmap.target, mode)


def is_nilpotent_value(v: PolyValue) -> bool:
    """True when every coefficient is nilpotent (equivalently, v is nilpotent)."""
    ring = v.ambient.ring
    return all(ring.is_nilpotent(c)[0] for c in v.coeffs)


_UNIT_DEPTH_CAP = 64


def unit_inverse_value(v: PolyValue, _depth: int = 0) -> Optional[PolyValue]:
    """Inverse of v in its ambient if v is a unit, else None.

    Reduces modulo the nilradical, where a unit must be a single term in every
    component; components are split off along idempotents built from
    dimension-zero witnesses, and nilpotent corrections come back via a
    geometric series.
    """
    if _depth > _UNIT_DEPTH_CAP:
        raise UnsupportedRing("unit search exceeded its recursion budget")
    A = v.ambient
    ring = A.ring
    if v.is_zero():
        return None
    if A.mode == "scalar":
        inv = ring.unit_inverse(v.coeffs[0])
        return None if inv is None else A.constant(inv)

    nil = ring.nilradical()
    if not ring.is_zero(nil):
        rbar, proj, sec = ring.quotient_by_principal(nil)
        if rbar.is_zero_ring():
            return A.zero()
        vbar = map_value(v, proj, rbar)
        wbar = unit_inverse_value(vbar, _depth + 1)
        if wbar is None:
            return None
        w0 = map_value(wbar, sec, ring)
        t = A.sub(A.one(), A.mul(v, w0))
        acc = A.one()
        term = t
        for _ in range(_UNIT_DEPTH_CAP * 4):
            if term.is_zero():
                break
            acc = A.add(acc, term)
            term = A.mul(term, t)
        else:
            raise UnsupportedRing("nilpotent correction failed to terminate")
        return A.mul(w0, acc)

    terms = list(v.terms())
    if len(terms) == 1:
        e, c = terms[0]
        cinv = ring.unit_inverse(c)
        if cinv is None:
            return None
        if A.mode == "poly" and e != 0:
            return None
        return A.monomial(cinv, -e)
    cand = None
    for _, c in terms:
        if ring.unit_inverse(c) is None:
            cand = c
            break
    if cand is None:
        # two or more terms with unit coefficients: no component is single-term
        return None
    if ring.dim() > 0:
        if ring.is_domain():
            return None
        raise UnsupportedRing("unit search needs a zero-dimensional or domain base")
    x, _ = ring.dim_zero_witness(cand)
    e = ring.mul(x, cand)
    r1, r2, to, frm = ring.split_comaximal(ring.sub(ring.one(), e), e)
    v1 = map_value(v, lambda c: to(c)[0], r1)
    v2 = map_value(v, lambda c: to(c)[1], r2)
    w1 = unit_inverse_value(v1, _depth + 1)
    if w1 is None:
        return None
    w2 = unit_inverse_value(v2, _depth + 1)
    if w2 is None:
        return None
    lo = min(w1.low, w2.low)
    hi = max(w1.low + len(w1.coeffs), w2.low + len(w2.coeffs))
    out = [frm((w1.coeff_at(i), w2.coeff_at(i))) for i in range(lo, hi)]
    return A.value(lo, out)


def is_unit_value(v: PolyValue) -> bool:
    return unit_inverse_value(v) is not None


# ---------------------------------------------------------------------------
# rows


def parse_row(ambient: Ambient, text: str) -> tuple[PolyValue, ...]:
    """Parse row text like ``[2X+1, X^2]`` into a tuple of values."""
    s = "".join(text.split())
    if not (s.startswith("[") and s.endswith("]")):
        raise ValueError(f"row text must be bracketed: {text!r}")
    body = s[1:-1]
    if not body:
        return ()
    return tuple(ambient.parse(p) for p in _split_top(body, ","))


def format_row(row: tuple[PolyValue, ...]) -> str:
    return "[" + ", ".join(v.ambient.format(v) for v in row) + "]"


def poly_ambient(ring: Ring) -> Ambient:
    return Ambient(ring, "poly")


def laurent_ambient(ring: Ring) -> Ambient:
    return Ambient(ring, "laurent")


def scalar_ambient(ring: Ring) -> Ambient:
    return Ambient(ring, "scalar")
