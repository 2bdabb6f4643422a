"""Descriptors and exact arithmetic for a tower of explicitly computable rings.

Supported rings: the integers, the rationals, prime fields GF(p), residue
rings Z/n, univariate polynomial rings over GF(p) or Q, quotients of those
polynomial rings by a nonconstant polynomial, localizations at a single
element, and finite direct products.  Elements are immutable payloads (int,
Fraction, coefficient tuple, numerator/exponent pair, component tuple) kept in
canonical form, so equality is structural.

Descriptors normalize eagerly: a quotient or localization isomorphic to a
simpler member of the tower collapses at construction time.  Localizing Z/12
at 2 yields Z/3, localizing at a nilpotent yields the zero ring Z/1, and a
polynomial quotient by a degree-one modulus yields the coefficient field.
After collapsing, a localization only ever wraps Z or a polynomial ring over a
field, with a squarefree positive (or monic) multiplier.

Ring text grammar (whitespace-insensitive):

    Z | Q | GF(p) | Z/n | GF(p)[t] | Q[t] | GF(p)[t]/(f) | loc(R; s) | R1 x R2
"""

from __future__ import annotations

import random
import re
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Iterator, Optional

Payload = Any


class UnsupportedRing(Exception):
    """A construction or operation falls outside the supported tower."""


class UnsupportedTower(Exception):
    """A requested ring map cannot be built over the given source ring."""


class NotComaximal(Exception):
    """A requested direct splitting does not exist for the given pair."""


# ---------------------------------------------------------------------------
# integer helpers


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = x*a + y*b and g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # deterministic for n < 3.3e24 with these bases
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int, budget: int = 1 << 22) -> int:
    """A nontrivial factor of composite n, or 0 when the step budget runs out."""
    if n % 2 == 0:
        return 2
    rng = random.Random(0xC0FFEE ^ n)
    steps = 0
    while steps < budget:
        c = rng.randrange(1, n)
        x = y = rng.randrange(2, n)
        d = 1
        while d == 1 and steps < budget:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = _gcd(x - y, n)
            steps += 1
        if d != 1 and d != n:
            return d
    return 0


def _iroot(n: int, e: int) -> int:
    """Floor of the e-th root of n >= 0."""
    if n < 2:
        return n
    hi = 1 << ((n.bit_length() + e - 1) // e + 1)
    lo = 0
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if mid**e <= n:
            lo = mid
        else:
            hi = mid
    return lo


@lru_cache(maxsize=None)
def _factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of n >= 1 as a sorted tuple of (prime, exponent)."""
    if n < 1:
        raise ValueError("factorization requires a positive integer")
    out: dict[int, int] = {}

    def split(m: int) -> None:
        if m == 1:
            return
        if _is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            return
        for e in range(2, m.bit_length() + 1):
            r = _iroot(m, e)
            if r > 1 and r**e == m:
                for _ in range(e):
                    split(r)
                return
        d = _pollard_rho(m, budget=1 << 20) if m.bit_length() <= 192 else 0
        if d == 0:
            # budget exhausted: keep the composite cofactor whole; callers
            # that only need the prime support stay correct either way
            out[m] = out.get(m, 0) + 1
            return
        split(d)
        split(m // d)

    m = n
    for p in (2, 3, 5, 7, 11, 13):
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
    bound = 10**6 if m.bit_length() <= 192 else 10**4
    d = 17
    while d * d <= m and d < bound:
        while m % d == 0:
            out[d] = out.get(d, 0) + 1
            m //= d
        d += 2
    split(m)
    return tuple(sorted(out.items()))


def _radical_int(n: int) -> int:
    """Product of the distinct primes dividing n >= 1."""
    r = 1
    for p, _ in _factorize(n):
        r *= p
    return r


def _coprime_part(n: int, a: int) -> int:
    """Largest divisor of n >= 1 coprime to a."""
    m = n
    while True:
        g = _gcd(m, a)
        if g == 1:
            return m
        m //= g


# ---------------------------------------------------------------------------
# dense polynomial payloads over a coefficient field
#
# A payload is a tuple of field payloads, low degree first, with no trailing
# zeros; the empty tuple is the zero polynomial.


def _pstrip(field: "Ring", c: tuple) -> tuple:
    i = len(c)
    while i and field.is_zero(c[i - 1]):
        i -= 1
    return tuple(c[:i])


def _pconst(field: "Ring", v: Payload) -> tuple:
    return () if field.is_zero(v) else (v,)


def _pone(field: "Ring") -> tuple:
    return (field.one(),)


def _padd(field: "Ring", a: tuple, b: tuple) -> tuple:
    n = max(len(a), len(b))
    za = field.zero()
    out = [
        field.add(a[i] if i < len(a) else za, b[i] if i < len(b) else za)
        for i in range(n)
    ]
    return _pstrip(field, out)


def _pneg(field: "Ring", a: tuple) -> tuple:
    return tuple(field.neg(c) for c in a)


def _psub(field: "Ring", a: tuple, b: tuple) -> tuple:
    return _padd(field, a, _pneg(field, b))


def _pmul(field: "Ring", a: tuple, b: tuple) -> tuple:
    if not a or not b:
        return ()
    out = [field.zero()] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if field.is_zero(ca):
            continue
        for j, cb in enumerate(b):
            out[i + j] = field.add(out[i + j], field.mul(ca, cb))
    return _pstrip(field, out)


def _pscale(field: "Ring", a: tuple, c: Payload) -> tuple:
    return _pstrip(field, tuple(field.mul(x, c) for x in a))


def _pdivmod(field: "Ring", a: tuple, b: tuple) -> tuple[tuple, tuple]:
    """Exact quotient and remainder with deg r < deg b; b must be nonzero."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv = field.unit_inverse(b[-1])
    if inv is None:
        raise ZeroDivisionError("leading coefficient is not invertible")
    r = list(a)
    q = [field.zero()] * max(0, len(a) - len(b) + 1)
    while len(r) >= len(b):
        if field.is_zero(r[-1]):
            r.pop()
            continue
        c = field.mul(r[-1], inv)
        shift = len(r) - len(b)
        q[shift] = c
        for i, cb in enumerate(b):
            r[shift + i] = field.sub(r[shift + i], field.mul(c, cb))
        r.pop()
    return _pstrip(field, q), _pstrip(field, r)


def _pmonic(field: "Ring", a: tuple) -> tuple:
    if not a:
        return a
    inv = field.unit_inverse(a[-1])
    return _pscale(field, a, inv)


def _pgcd(field: "Ring", a: tuple, b: tuple) -> tuple:
    while b:
        a, b = b, _pdivmod(field, a, b)[1]
    return _pmonic(field, a)


def _pegcd(field: "Ring", a: tuple, b: tuple) -> tuple[tuple, tuple, tuple]:
    """Return (g, x, y) with monic g = gcd(a, b) and g = x*a + y*b."""
    r0, r1 = a, b
    x0, x1 = _pone(field), ()
    y0, y1 = (), _pone(field)
    while r1:
        q, rem = _pdivmod(field, r0, r1)
        r0, r1 = r1, rem
        x0, x1 = x1, _psub(field, x0, _pmul(field, q, x1))
        y0, y1 = y1, _psub(field, y0, _pmul(field, q, y1))
    if not r0:
        return (), (), ()
    inv = field.unit_inverse(r0[-1])
    return (
        _pscale(field, r0, inv),
        _pscale(field, x0, inv),
        _pscale(field, y0, inv),
    )


def _pderiv(field: "Ring", a: tuple) -> tuple:
    out = [
        field.mul(a[i], field.from_int(i)) for i in range(1, len(a))
    ]
    return _pstrip(field, out)


def _peval(field: "Ring", a: tuple, x: Payload) -> Payload:
    acc = field.zero()
    for c in reversed(a):
        acc = field.add(field.mul(acc, x), c)
    return acc


def squarefree_radical(field: "Ring", f: tuple) -> tuple:
    """Monic product of the distinct irreducible factors of f.

    Works in characteristic zero and over GF(p), where a vanishing derivative
    means f is a polynomial in t^p and coefficients are their own p-th roots.
    """
    f = _pstrip(field, tuple(f))
    if not f:
        return ()
    if len(f) == 1:
        return _pone(field)
    f = _pmonic(field, f)
    char = field.p if field.kind == "gf" else 0
    d = _pderiv(field, f)
    if not d:
        if char == 0:
            raise AssertionError("nonconstant polynomial with zero derivative")
        return squarefree_radical(field, f[::char])
    g = _pgcd(field, f, d)
    if len(g) == 1:
        return f
    r = _pdivmod(field, f, g)[0]
    rest = g
    while True:
        c = _pgcd(field, rest, r)
        if len(c) == 1:
            break
        rest = _pdivmod(field, rest, c)[0]
    if len(rest) == 1:
        return _pmonic(field, r)
    # rest collects the factors with multiplicity divisible by char
    return _pmonic(field, _pmul(field, r, squarefree_radical(field, rest[::char])))


# ---------------------------------------------------------------------------
# text helpers


def _split_top(s: str, sep: str) -> list[str]:
    """Split on sep at paren/bracket depth zero."""
    parts = []
    depth = 0
    cur = []
    for ch in s:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def _strip_outer_parens(s: str) -> str:
    while s.startswith("(") and s.endswith(")"):
        depth = 0
        ok = True
        for i, ch in enumerate(s):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0 and i != len(s) - 1:
                    ok = False
                    break
        if not ok:
            break
        s = s[1:-1]
    return s


def parse_poly_text(
    text: str, var: str, coeff_ring: "Ring", allow_negative_exp: bool = False
) -> dict[int, Payload]:
    """Parse polynomial text like ``2X^2+X+1`` into an exponent -> coefficient map.

    Coefficients use the coefficient ring's element grammar and may be wrapped
    in parentheses; with allow_negative_exp, exponents like ``X^-1`` are legal.
    """
    s = "".join(text.split())
    if not s:
        raise ValueError("empty polynomial text")
    # split into signed terms at depth zero; '-' after '^' binds to the exponent
    pieces: list[tuple[int, str]] = []
    depth = 0
    sign = 1
    cur: list[str] = []
    for i, ch in enumerate(s):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch in "+-" and depth == 0 and i > 0 and s[i - 1] != "^":
            if not cur:
                raise ValueError(f"misplaced sign in {text!r}")
            pieces.append((sign, "".join(cur)))
            cur = []
            sign = 1 if ch == "+" else -1
        elif ch in "+-" and depth == 0 and i == 0:
            sign = 1 if ch == "+" else -1
        else:
            cur.append(ch)
    if not cur:
        raise ValueError(f"dangling sign in {text!r}")
    pieces.append((sign, "".join(cur)))

    out: dict[int, Payload] = {}
    for sgn, term in pieces:
        vpos = -1
        depth = 0
        for i, ch in enumerate(term):
            if ch in "([":
                depth += 1
            elif ch in ")]":
                depth -= 1
            elif ch == var and depth == 0:
                vpos = i
                break
        if vpos < 0:
            coeff_text, exp = term, 0
        else:
            coeff_text = term[:vpos]
            after = term[vpos + 1 :]
            if after == "":
                exp = 1
            elif after.startswith("^"):
                exp = int(after[1:])
            else:
                raise ValueError(f"cannot parse term {term!r}")
        if exp < 0 and not allow_negative_exp:
            raise ValueError(f"negative exponent not allowed in {text!r}")
        if coeff_text == "":
            coeff = coeff_ring.one()
        else:
            coeff = coeff_ring.parse_element(_strip_outer_parens(coeff_text))
        if sgn < 0:
            coeff = coeff_ring.neg(coeff)
        if exp in out:
            out[exp] = coeff_ring.add(out[exp], coeff)
        else:
            out[exp] = coeff
    return {e: c for e, c in out.items() if not coeff_ring.is_zero(c)}


def format_poly_text(items: list[tuple[int, Payload]], var: str, coeff_ring: "Ring") -> str:
    """Format exponent/coefficient pairs as polynomial text, high degree first."""
    items = [(e, c) for e, c in items if not coeff_ring.is_zero(c)]
    if not items:
        return "0"
    items.sort(key=lambda ec: -ec[0])
    parts = []
    for exp, c in items:
        cs = coeff_ring.format_element(c)
        composite = (
            "+" in cs[1:]
            or "-" in cs[1:]
            or "/" in cs
            or "(" in cs
            or any(ch.isalpha() for ch in cs)
        )
        if exp == 0:
            parts.append(f"({cs})" if composite else cs)
            continue
        vpart = var if exp == 1 else f"{var}^{exp}"
        if composite:
            parts.append(f"({cs}){vpart}")
        elif cs == "1":
            parts.append(vpart)
        elif cs == "-1":
            parts.append(f"-{vpart}")
        else:
            parts.append(f"{cs}{vpart}")
    text = "+".join(parts)
    return text.replace("+-", "-")


# ---------------------------------------------------------------------------
# ring descriptors


class Ring:
    """A member of the supported ring tower; see the module docstring.

    All arithmetic methods act on payloads and return payloads in canonical
    form.  Instances are immutable and compare by structure.
    """

    __slots__ = ("kind", "p", "n", "base", "var", "modulus", "inner", "mult", "factors", "_key")

    def __init__(self, kind: str, **kw: Any) -> None:
        self.kind = kind
        self.p = kw.get("p")
        self.n = kw.get("n")
        self.base = kw.get("base")
        self.var = kw.get("var", "t")
        self.modulus = kw.get("modulus")
        self.inner = kw.get("inner")
        self.mult = kw.get("mult")
        self.factors = kw.get("factors")
        if kind == "int":
            key: tuple = ("int",)
        elif kind == "rat":
            key = ("rat",)
        elif kind == "gf":
            key = ("gf", self.p)
        elif kind == "zmod":
            key = ("zmod", self.n)
        elif kind == "poly":
            key = ("poly", self.base._key, self.var)
        elif kind == "quot":
            key = ("quot", self.base._key, self.var, self.modulus)
        elif kind == "loc":
            key = ("loc", self.inner._key, self.mult)
        elif kind == "prod":
            key = ("prod", tuple(f._key for f in self.factors))
        else:
            raise UnsupportedRing(f"unknown ring kind {kind!r}")
        self._key = key

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Ring) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"Ring({self.text()})"

    # -- descriptor text ---------------------------------------------------

    def text(self) -> str:
        k = self.kind
        if k == "int":
            return "Z"
        if k == "rat":
            return "Q"
        if k == "gf":
            return f"GF({self.p})"
        if k == "zmod":
            return f"Z/{self.n}"
        if k == "poly":
            return f"{self.base.text()}[{self.var}]"
        if k == "quot":
            ftext = format_poly_text(list(enumerate(self.modulus)), self.var, self.base)
            return f"{self.base.text()}[{self.var}]/({ftext})"
        if k == "loc":
            return f"loc({self.inner.text()}; {self.inner.format_element(self.mult)})"
        return " x ".join(f.text() for f in self.factors)

    # -- structural predicates ---------------------------------------------

    def is_zero_ring(self) -> bool:
        return self.kind == "zmod" and self.n == 1

    def is_field(self) -> bool:
        if self.kind in ("rat", "gf"):
            return True
        if self.kind == "zmod":
            return _is_probable_prime(self.n)
        return False

    def is_domain(self) -> bool:
        if self.kind in ("int", "rat", "gf", "poly"):
            return True
        if self.kind == "zmod":
            return _is_probable_prime(self.n)
        if self.kind == "loc":
            return self.inner.is_domain()
        return False

    def dim(self) -> int:
        """Krull dimension of the ring."""
        k = self.kind
        if k in ("rat", "gf", "zmod", "quot"):
            return 0
        if k in ("int", "poly"):
            return 1
        if k == "loc":
            # after collapsing, localizations wrap Z or k[t] at a nonzero
            # non-unit, and such localizations keep dimension one
            return 1
        return max(f.dim() for f in self.factors)

    def size(self) -> Optional[int]:
        k = self.kind
        if k == "gf":
            return self.p
        if k == "zmod":
            return self.n
        if k == "quot":
            b = self.base.size()
            return None if b is None else b ** (len(self.modulus) - 1)
        if k == "prod":
            total = 1
            for f in self.factors:
                s = f.size()
                if s is None:
                    return None
                total *= s
            return total
        return None

    def elements(self) -> Iterator[Payload]:
        k = self.kind
        if k == "gf":
            yield from range(self.p)
        elif k == "zmod":
            yield from range(self.n)
        elif k == "quot":
            base_elems = list(self.base.elements())
            deg = len(self.modulus) - 1

            def rec(i: int, acc: list) -> Iterator[Payload]:
                if i == deg:
                    yield _pstrip(self.base, tuple(acc))
                    return
                for c in base_elems:
                    acc.append(c)
                    yield from rec(i + 1, acc)
                    acc.pop()

            yield from rec(0, [])
        elif k == "prod":
            def prec(i: int, acc: list) -> Iterator[Payload]:
                if i == len(self.factors):
                    yield tuple(acc)
                    return
                for c in self.factors[i].elements():
                    acc.append(c)
                    yield from prec(i + 1, acc)
                    acc.pop()

            yield from prec(0, [])
        else:
            raise UnsupportedRing(f"cannot enumerate an infinite ring: {self.text()}")

    # -- basic arithmetic --------------------------------------------------

    def zero(self) -> Payload:
        return self.from_int(0)

    def one(self) -> Payload:
        return self.from_int(1)

    def from_int(self, m: int) -> Payload:
        k = self.kind
        if k == "int":
            return m
        if k == "rat":
            return Fraction(m)
        if k == "gf":
            return m % self.p
        if k == "zmod":
            return m % self.n
        if k == "poly":
            return _pconst(self.base, self.base.from_int(m))
        if k == "quot":
            return _pconst(self.base, self.base.from_int(m))
        if k == "loc":
            return self._loc_canon(self.inner.from_int(m), 0)
        return tuple(f.from_int(m) for f in self.factors)

    def add(self, a: Payload, b: Payload) -> Payload:
        k = self.kind
        if k in ("int", "rat"):
            return a + b
        if k == "gf":
            return (a + b) % self.p
        if k == "zmod":
            return (a + b) % self.n
        if k in ("poly", "quot"):
            return _padd(self.base, a, b)
        if k == "loc":
            na, ka = a
            nb, kb = b
            kk = max(ka, kb)
            inner = self.inner
            num = inner.add(
                inner.mul(na, self._spow(kk - ka)),
                inner.mul(nb, self._spow(kk - kb)),
            )
            return self._loc_canon(num, kk)
        return tuple(f.add(x, y) for f, x, y in zip(self.factors, a, b))

    def neg(self, a: Payload) -> Payload:
        k = self.kind
        if k in ("int", "rat"):
            return -a
        if k == "gf":
            return (-a) % self.p
        if k == "zmod":
            return (-a) % self.n
        if k in ("poly", "quot"):
            return _pneg(self.base, a)
        if k == "loc":
            return (self.inner.neg(a[0]), a[1])
        return tuple(f.neg(x) for f, x in zip(self.factors, a))

    def sub(self, a: Payload, b: Payload) -> Payload:
        return self.add(a, self.neg(b))

    def mul(self, a: Payload, b: Payload) -> Payload:
        k = self.kind
        if k in ("int", "rat"):
            return a * b
        if k == "gf":
            return (a * b) % self.p
        if k == "zmod":
            return (a * b) % self.n
        if k == "poly":
            return _pmul(self.base, a, b)
        if k == "quot":
            return _pdivmod(self.base, _pmul(self.base, a, b), self.modulus)[1]
        if k == "loc":
            return self._loc_canon(self.inner.mul(a[0], b[0]), a[1] + b[1])
        return tuple(f.mul(x, y) for f, x, y in zip(self.factors, a, b))

    def pow(self, a: Payload, e: int) -> Payload:
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

    def eq(self, a: Payload, b: Payload) -> bool:
        return a == b

    def is_zero(self, a: Payload) -> bool:
        return a == self.zero()

    def is_one(self, a: Payload) -> bool:
        return a == self.one()

    # -- localization internals --------------------------------------------

    def _spow(self, e: int) -> Payload:
        return self.inner.pow(self.mult, e)

    def _loc_canon(self, num: Payload, e: int) -> Payload:
        inner = self.inner
        if inner.is_zero(num):
            return (inner.zero(), 0)
        while e > 0:
            q = inner.divide(num, self.mult)
            if q is None:
                break
            num, e = q, e - 1
        if e < 0:
            num = inner.mul(num, inner.pow(self.mult, -e))
            e = 0
        return (num, e)

    def _loc_strip(self, num: Payload) -> tuple[Payload, Payload]:
        """Split num = m * r with r dividing a power of the multiplier and m
        coprime to it; returns (m, r)."""
        inner = self.inner
        m = num
        r = inner.one()
        while True:
            g = self._inner_gcd(m, self.mult)
            if inner.is_unit(g):
                return m, r
            m = inner.divide(m, g)
            r = inner.mul(r, g)

    def _inner_gcd(self, a: Payload, b: Payload) -> Payload:
        inner = self.inner
        if inner.kind == "int":
            return _gcd(a, b)
        return _pgcd(inner.base, a, b)

    def _loc_clear(self, r: Payload) -> tuple[Payload, int]:
        """Find (c, K) with c * r = mult^K; r must divide a multiplier power."""
        inner = self.inner
        power = inner.one()
        for K in range(0, 512):
            q = inner.divide(power, r)
            if q is not None:
                return q, K
            power = inner.mul(power, self.mult)
        raise UnsupportedRing("element does not divide a power of the multiplier")

    # -- units, nilpotents, ideals ----------------------------------------

    def is_unit(self, a: Payload) -> bool:
        return self.unit_inverse(a) is not None

    def unit_inverse(self, a: Payload) -> Optional[Payload]:
        """Inverse of a if a is a unit, else None.  Total on every ring."""
        k = self.kind
        if k == "int":
            return a if a in (1, -1) else None
        if k == "rat":
            return 1 / a if a else None
        if k == "gf":
            if a % self.p == 0:
                return None
            return pow(a, self.p - 2, self.p)
        if k == "zmod":
            if self.n == 1:
                return 0
            g, x, _ = _egcd(a, self.n)
            return x % self.n if g == 1 else None
        if k == "poly":
            if len(a) != 1:
                return None
            inv = self.base.unit_inverse(a[0])
            return None if inv is None else (inv,)
        if k == "quot":
            g, x, _ = _pegcd(self.base, a, self.modulus)
            if len(g) != 1:
                return None
            return _pdivmod(self.base, x, self.modulus)[1]
        if k == "loc":
            num, e = a
            if self.inner.is_zero(num):
                return None
            m, r = self._loc_strip(num)
            minv = self.inner.unit_inverse(m)
            if minv is None:
                return None
            c, K = self._loc_clear(r)
            return self._loc_canon(self.inner.mul(minv, self.inner.mul(c, self._spow(e))), K)
        out = []
        for f, x in zip(self.factors, a):
            inv = f.unit_inverse(x)
            if inv is None:
                return None
            out.append(inv)
        return tuple(out)

    def is_nilpotent(self, a: Payload) -> tuple[bool, int]:
        """Whether a is nilpotent, with the least k such that a^k = 0."""
        k = self.kind
        if k in ("int", "rat", "gf", "poly"):
            return (True, 1) if self.is_zero(a) else (False, 0)
        if k == "zmod":
            bound = max(1, self.n.bit_length())
            acc = a % self.n
            if acc == 0:
                return (True, 1)
            for i in range(1, bound + 1):
                if acc == 0:
                    return (True, i)
                acc = acc * a % self.n
            return (True, bound + 1) if acc == 0 else (False, 0)
        if k == "quot":
            bound = len(self.modulus) - 1
            acc = a
            for i in range(1, bound + 2):
                if not acc:
                    return (True, i)
                acc = self.mul(acc, a)
            return (False, 0)
        if k == "loc":
            return (True, 1) if self.inner.is_zero(a[0]) else (False, 0)
        worst = 0
        for f, x in zip(self.factors, a):
            ok, idx = f.is_nilpotent(x)
            if not ok:
                return (False, 0)
            worst = max(worst, idx)
        return (True, worst)

    def nilradical(self) -> Payload:
        """Generator of the ideal of nilpotent elements."""
        k = self.kind
        if k in ("int", "rat", "gf", "poly", "loc"):
            return self.zero()
        if k == "zmod":
            return _radical_int(self.n) % self.n
        if k == "quot":
            rad = squarefree_radical(self.base, self.modulus)
            return _pdivmod(self.base, rad, self.modulus)[1]
        return tuple(f.nilradical() for f in self.factors)

    def annihilator(self, a: Payload) -> Payload:
        """Generator of the annihilator ideal of a."""
        k = self.kind
        if k in ("int", "rat", "gf", "poly"):
            return self.one() if self.is_zero(a) else self.zero()
        if k == "zmod":
            return (self.n // _gcd(self.n, a)) % self.n
        if k == "quot":
            g = _pgcd(self.base, self.modulus, a)
            q = _pdivmod(self.base, self.modulus, g)[0]
            return _pdivmod(self.base, _pmonic(self.base, q), self.modulus)[1]
        if k == "loc":
            return self.one() if self.inner.is_zero(a[0]) else self.zero()
        return tuple(f.annihilator(x) for f, x in zip(self.factors, a))

    def colon_to_nilradical(self, a: Payload) -> Payload:
        """Generator of the colon ideal (nilradical : a)."""
        k = self.kind
        if k in ("int", "rat", "gf", "poly", "loc"):
            return self.annihilator(a)
        if k == "zmod":
            rad = _radical_int(self.n)
            return (rad // _gcd(rad, a)) % self.n
        if k == "quot":
            rad = squarefree_radical(self.base, self.modulus)
            g = _pgcd(self.base, rad, a)
            q = _pdivmod(self.base, rad, g)[0]
            return _pdivmod(self.base, _pmonic(self.base, q), self.modulus)[1]
        return tuple(f.colon_to_nilradical(x) for f, x in zip(self.factors, a))

    def dim_zero_witness(self, a: Payload) -> tuple[Payload, Payload]:
        """For a zero-dimensional ring, return (x, b) with x*a + b = 1 and a*b
        nilpotent (exactly zero when the ring is reduced)."""
        k = self.kind
        if k in ("rat", "gf"):
            inv = self.unit_inverse(a)
            if inv is None:
                return (self.zero(), self.one())
            return (inv, self.zero())
        if k == "zmod":
            n = self.n
            if n == 1:
                return (0, 0)
            n2 = _coprime_part(n, a)
            if n2 == 1:
                return (0, 1 % n)
            n1 = n // n2
            _, inv2, _ = _egcd(a % n2, n2)
            _, u, _ = _egcd(n1 % n2, n2)
            # x is 0 mod n1 and the inverse of a mod n2
            x = n1 * (u % n2) % n * (inv2 % n2) % n
            b = (1 - x * a) % n
            return (x, b)
        if k == "quot":
            field = self.base
            f = self.modulus
            f2 = f
            while True:
                g = _pgcd(field, f2, a)
                if len(g) == 1:
                    break
                f2 = _pdivmod(field, f2, g)[0]
            f2 = _pmonic(field, f2)
            f1 = _pmonic(field, _pdivmod(field, f, f2)[0])
            if len(f2) == 1:
                return (self.zero(), self.one())
            _, inv2, _ = _pegcd(field, _pdivmod(field, a, f2)[1], f2)
            _, u, _ = _pegcd(field, _pdivmod(field, f1, f2)[1], f2)
            x = _pdivmod(field, _pmul(field, _pmul(field, f1, u), inv2), f)[1]
            b = self.sub(self.one(), self.mul(x, a))
            return (x, b)
        if k == "prod":
            pairs = [f.dim_zero_witness(x) for f, x in zip(self.factors, a)]
            return (tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))
        raise UnsupportedRing(f"dimension zero required, got {self.text()}")

    # -- divisibility and ideal arithmetic ---------------------------------

    def divide(self, b: Payload, a: Payload) -> Optional[Payload]:
        """Some x with a*x = b, or None when none exists."""
        k = self.kind
        if k == "int":
            if a == 0:
                return 0 if b == 0 else None
            return b // a if b % a == 0 else None
        if k in ("rat", "gf"):
            inv = self.unit_inverse(a)
            if inv is None:
                return self.zero() if self.is_zero(b) else None
            return self.mul(b, inv)
        if k == "zmod":
            if self.n == 1:
                return 0
            g = _gcd(a, self.n)
            if g == 0:
                return 0 if b == 0 else None
            if b % g:
                return None
            n1 = self.n // g
            _, inv, _ = _egcd((a // g) % n1, n1)
            return (b // g) * (inv % n1) % self.n
        if k == "poly":
            if not a:
                return () if not b else None
            if self.base.unit_inverse(a[-1]) is None:
                raise UnsupportedRing("division requires an invertible leading coefficient")
            q, r = _pdivmod(self.base, b, a)
            return q if not r else None
        if k == "quot":
            field = self.base
            g, x, _ = _pegcd(field, a, self.modulus)
            if not g:
                return self.zero() if self.is_zero(b) else None
            q, r = _pdivmod(field, b, g)
            if r:
                return None
            return _pdivmod(field, _pmul(field, q, x), self.modulus)[1]
        if k == "loc":
            na, ka = a
            nb, kb = b
            inner = self.inner
            if inner.is_zero(na):
                return (inner.zero(), 0) if inner.is_zero(nb) else None
            m, r = self._loc_strip(na)
            q = inner.divide(nb, m)
            if q is None:
                return None
            c, K = self._loc_clear(r)
            return self._loc_canon(inner.mul(q, c), K + kb - ka)
        out = []
        for f, x, y in zip(self.factors, b, a):
            q = f.divide(x, y)
            if q is None:
                return None
            out.append(q)
        return tuple(out)

    def divides(self, a: Payload, b: Payload) -> bool:
        return self.divide(b, a) is not None

    def bezout(self, a: Payload, b: Payload) -> tuple[Payload, Payload, Payload]:
        """Return (g, x, y) with g = x*a + y*b and (a, b) = (g) as ideals."""
        k = self.kind
        if k == "int":
            return _egcd(a, b)
        if k in ("rat", "gf"):
            if not self.is_zero(a):
                return (self.one(), self.unit_inverse(a), self.zero())
            if not self.is_zero(b):
                return (self.one(), self.zero(), self.unit_inverse(b))
            return (self.zero(), self.zero(), self.zero())
        if k == "zmod":
            g0, x0, y0 = _egcd(a, b)
            g1, u, _ = _egcd(g0, self.n)
            return (g1 % self.n, u * x0 % self.n, u * y0 % self.n)
        if k == "poly":
            return _pegcd(self.base, a, b)
        if k == "quot":
            field = self.base
            g0, x0, y0 = _pegcd(field, a, b)
            if not g0:
                return (self.zero(), self.zero(), self.zero())
            g1, u, _ = _pegcd(field, g0, self.modulus)
            red = lambda v: _pdivmod(field, v, self.modulus)[1]
            return (red(g1), red(_pmul(field, u, x0)), red(_pmul(field, u, y0)))
        if k == "loc":
            inner = self.inner
            na, ka = a
            nb, kb = b
            if inner.is_zero(na) and inner.is_zero(nb):
                z = (inner.zero(), 0)
                return (z, z, z)
            if inner.kind == "int":
                g0, x0, y0 = _egcd(na, nb)
            else:
                g0, x0, y0 = _pegcd(inner.base, na, nb)
            m, r = self._loc_strip(g0)
            c, K = self._loc_clear(r)
            g = self._loc_canon(m, 0)
            x = self._loc_canon(inner.mul(inner.mul(x0, c), self._spow(ka)), K)
            y = self._loc_canon(inner.mul(inner.mul(y0, c), self._spow(kb)), K)
            return (g, x, y)
        triples = [f.bezout(x, y) for f, x, y in zip(self.factors, a, b)]
        return (
            tuple(t[0] for t in triples),
            tuple(t[1] for t in triples),
            tuple(t[2] for t in triples),
        )

    # -- quotients, localizations, splittings -------------------------------

    def quotient_by_principal(
        self, a: Payload
    ) -> tuple["Ring", Callable[[Payload], Payload], Callable[[Payload], Payload]]:
        """Quotient by the principal ideal (a): (ring, projection, section)."""
        k = self.kind
        ident = lambda x: x
        if k == "int":
            m = abs(a)
            if m == 0:
                return (self, ident, ident)
            target = integers_mod(m)
            return (target, lambda x: x % m, ident)
        if k in ("rat", "gf"):
            if self.is_zero(a):
                return (self, ident, ident)
            z = zero_ring()
            return (z, lambda x: 0, lambda y: self.zero())
        if k == "zmod":
            g = _gcd(self.n, a)
            target = integers_mod(g)
            return (target, lambda x: x % g, ident)
        if k == "poly":
            if not a:
                return (self, ident, ident)
            if len(a) == 1:
                z = zero_ring()
                return (z, lambda x: 0, lambda y: ())
            f = _pmonic(self.base, a)
            return self._poly_quotient_maps(f)
        if k == "quot":
            g = _pgcd(self.base, self.modulus, a)
            if not g or g == self.modulus:
                return (self, ident, ident)
            if len(g) == 1:
                z = zero_ring()
                return (z, lambda x: 0, lambda y: ())
            target, proj, sec = poly_over(self.base, self.var)._poly_quotient_maps(g)
            return (target, proj, sec)
        if k == "loc":
            inner = self.inner
            num = a[0]
            if inner.is_zero(num):
                return (self, ident, ident)
            m, _ = self._loc_strip(num)
            if inner.is_unit(m):
                z = zero_ring()
                return (z, lambda x: 0, lambda y: (inner.zero(), 0))
            q0, proj0, sec0 = inner.quotient_by_principal(m)
            sinv = q0.unit_inverse(proj0(self.mult))
            if sinv is None:
                raise AssertionError("multiplier must stay invertible after stripping")

            def proj(x: Payload, _p=proj0, _s=sinv, _q=q0) -> Payload:
                return _q.mul(_p(x[0]), _q.pow(_s, x[1]))

            return (q0, proj, lambda y: (sec0(y), 0))
        # product: componentwise quotient, dropping factors that collapse to zero
        comps = [f.quotient_by_principal(x) for f, x in zip(self.factors, a)]
        kept = [i for i, (q, _, _) in enumerate(comps) if not q.is_zero_ring()]
        zeros = tuple(f.zero() for f in self.factors)
        if not kept:
            z = zero_ring()
            return (z, lambda x: 0, lambda y: zeros)
        if len(kept) == 1:
            (i,) = kept
            q, proj0, sec0 = comps[i]

            def proj1(x: Payload, _i=i, _p=proj0) -> Payload:
                return _p(x[_i])

            def sec1(y: Payload, _i=i, _s=sec0) -> Payload:
                out = list(zeros)
                out[_i] = _s(y)
                return tuple(out)

            return (q, proj1, sec1)
        target = product([comps[i][0] for i in kept])

        def projn(x: Payload) -> Payload:
            return tuple(comps[i][1](x[i]) for i in kept)

        def secn(y: Payload) -> Payload:
            out = list(zeros)
            for j, i in enumerate(kept):
                out[i] = comps[i][2](y[j])
            return tuple(out)

        return (target, projn, secn)

    def _poly_quotient_maps(
        self, f: tuple
    ) -> tuple["Ring", Callable[[Payload], Payload], Callable[[Payload], Payload]]:
        """Maps for k[t]/(f) with monic f of degree >= 1, collapsing degree one."""
        field = self.base
        if len(f) == 2:
            root = field.neg(f[0])
            return (
                field,
                lambda x: _peval(field, x, root),
                lambda y: _pconst(field, y),
            )
        target = poly_quotient(field, f, self.var)
        return (target, lambda x: _pdivmod(field, x, f)[1], lambda y: y)

    def localize_at(self, a: Payload) -> tuple["Ring", Callable[[Payload], Payload]]:
        """Localization at a single element: (ring, canonical map)."""
        target = localized(self, a)
        if target == self:
            return (self, lambda x: x)
        if target.is_zero_ring():
            return (target, lambda x: 0)
        k = self.kind
        if k in ("int", "poly"):
            return (target, lambda x: target._loc_canon(x, 0))
        if k == "zmod":
            m = target.n
            return (target, lambda x: x % m)
        if k == "quot":
            if target.kind == "quot":
                f1 = target.modulus
                return (target, lambda x: _pdivmod(self.base, x, f1)[1])
            # collapsed to the coefficient field via a degree-one modulus
            _, proj, _ = poly_over(self.base, self.var)._poly_quotient_maps(
                _pmonic(self.base, self._loc_modulus_after(a))
            )
            return (target, proj)
        if k == "loc":
            c, K = target._loc_clear_src(self.mult)

            def locmap(x: Payload) -> Payload:
                num, e = x
                return target._loc_canon(target.inner.mul(num, target.inner.pow(c, e)), K * e)

            return (target, locmap)
        comps = [f.localize_at(x) for f, x in zip(self.factors, a)]
        kept = [i for i, (q, _) in enumerate(comps) if not q.is_zero_ring()]
        if not kept:
            return (zero_ring(), lambda x: 0)
        if len(kept) == 1:
            (i,) = kept
            return (comps[i][0], lambda x, _i=i: comps[_i][1](x[_i]))
        tgt = product([comps[i][0] for i in kept])
        return (tgt, lambda x: tuple(comps[i][1](x[i]) for i in kept))

    def _loc_modulus_after(self, a: Payload) -> tuple:
        """Modulus of the collapsed localization of a polynomial quotient."""
        f1 = self.modulus
        while True:
            g = _pgcd(self.base, f1, a)
            if len(g) == 1:
                return f1
            f1 = _pdivmod(self.base, f1, g)[0]

    def _loc_clear_src(self, s_old: Payload) -> tuple[Payload, int]:
        """In a localization, find (c, K) with c * s_old = mult^K."""
        inner = self.inner
        power = inner.one()
        for K in range(0, 512):
            q = inner.divide(power, s_old)
            if q is not None:
                return q, K
            power = inner.mul(power, self.mult)
        raise UnsupportedRing("old multiplier does not divide a power of the new one")

    def boundary_quotient(self, a: Payload) -> tuple["Ring", Callable[[Payload], Payload]]:
        """Quotient by (a) + (nilradical : a); requires dimension >= 1.

        On the reduced dimension-one rings of the tower the colon part is the
        annihilator, so the generator is a itself for nonzero a and 1 for a=0
        (yielding the zero ring); on products it acts componentwise.
        """
        if self.dim() < 1:
            raise UnsupportedRing("boundary quotient requires dimension >= 1")
        gen = self._boundary_generator(a)
        target, proj, _ = self.quotient_by_principal(gen)
        return (target, proj)

    def _boundary_generator(self, a: Payload) -> Payload:
        if self.kind == "prod":
            return tuple(f._boundary_generator(x) for f, x in zip(self.factors, a))
        return self.one() if self.is_zero(a) else a

    def split_comaximal(
        self, u: Payload, w: Payload
    ) -> tuple["Ring", "Ring", Callable, Callable]:
        """Split R = R/(u) x R/(w) for comaximal u, w with u*w = 0.

        Returns (first factor, second factor, to_components, from_components);
        the maps are mutually inverse bijections.
        """
        g, x, y = self.bezout(u, w)
        ginv = self.unit_inverse(g)
        if ginv is None:
            raise NotComaximal(f"({self.format_element(u)}) + ({self.format_element(w)}) is proper")
        if not self.is_zero(self.mul(u, w)):
            raise NotComaximal("not a direct splitting: the product u*w must vanish")
        x = self.mul(x, ginv)
        y = self.mul(y, ginv)
        r1, p1, s1 = self.quotient_by_principal(u)
        r2, p2, s2 = self.quotient_by_principal(w)
        e1 = self.mul(y, w)  # 1 mod u, 0 mod w
        e2 = self.mul(x, u)  # 0 mod u, 1 mod w

        def to_components(z: Payload) -> tuple[Payload, Payload]:
            return (p1(z), p2(z))

        def from_components(pair: tuple[Payload, Payload]) -> Payload:
            b1, b2 = pair
            return self.add(self.mul(s1(b1), e1), self.mul(s2(b2), e2))

        return (r1, r2, to_components, from_components)

    # -- parsing, formatting, random sampling -------------------------------

    def parse_element(self, text: str) -> Payload:
        s = "".join(text.split())
        k = self.kind
        if s == "":
            raise ValueError("empty element text")
        if k == "int":
            return int(s)
        if k == "rat":
            return Fraction(s)
        if k in ("gf", "zmod"):
            return int(s) % (self.p if k == "gf" else self.n)
        if k == "poly":
            d = parse_poly_text(s, self.var, self.base)
            out = [self.base.zero()] * (max(d) + 1 if d else 0)
            for e, c in d.items():
                out[e] = c
            return _pstrip(self.base, out)
        if k == "quot":
            d = parse_poly_text(s, self.var, self.base)
            out = [self.base.zero()] * (max(d) + 1 if d else 0)
            for e, c in d.items():
                out[e] = c
            return _pdivmod(self.base, _pstrip(self.base, out), self.modulus)[1]
        if k == "loc":
            inner = self.inner
            candidates = []
            depth = 0
            for i, ch in enumerate(s):
                if ch in "([":
                    depth += 1
                elif ch in ")]":
                    depth -= 1
                elif ch == "/" and depth == 0:
                    candidates.append(i)
            for i in reversed(candidates):
                left, right = s[:i], s[i + 1 :]
                try:
                    num = inner.parse_element(_strip_outer_parens(left))
                    den = inner.parse_element(_strip_outer_parens(right))
                except ValueError:
                    continue
                power = inner.one()
                for e in range(0, 128):
                    c = inner.divide(power, den)
                    if c is not None:
                        return self._loc_canon(inner.mul(num, c), e)
                    power = inner.mul(power, self.mult)
                raise ValueError(f"denominator {right!r} is not a power of the multiplier")
            return self._loc_canon(inner.parse_element(s), 0)
        if k == "prod":
            body = _strip_outer_parens(s)
            parts = _split_top(body, ",")
            if len(parts) != len(self.factors):
                raise ValueError(f"expected {len(self.factors)} components in {text!r}")
            return tuple(f.parse_element(p) for f, p in zip(self.factors, parts))
        raise UnsupportedRing(self.kind)

    def format_element(self, a: Payload) -> str:
        k = self.kind
        if k in ("int", "gf", "zmod"):
            return str(a)
        if k == "rat":
            return str(a)
        if k in ("poly", "quot"):
            return format_poly_text(list(enumerate(a)), self.var, self.base)
        if k == "loc":
            num, e = a
            ns = self.inner.format_element(num)
            if e == 0:
                return ns
            ds = self.inner.format_element(self._spow(e))
            if "+" in ns[1:] or "-" in ns[1:] or "/" in ns or "(" in ns:
                ns = f"({ns})"
            if ("+" in ds[1:] or "-" in ds[1:] or "/" in ds
                    or any(c.isalpha() for c in ds)):
                ds = f"({ds})"
            return f"{ns}/{ds}"
        if k == "prod":
            return "(" + ", ".join(f.format_element(x) for f, x in zip(self.factors, a)) + ")"
        raise UnsupportedRing(self.kind)

    def random_element(self, rng: random.Random, degree: int = 2, bound: int = 9) -> Payload:
        k = self.kind
        if k == "int":
            return rng.randint(-bound, bound)
        if k == "rat":
            return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
        if k == "gf":
            return rng.randrange(self.p)
        if k == "zmod":
            return rng.randrange(self.n)
        if k == "poly":
            d = rng.randint(0, degree)
            return _pstrip(
                self.base,
                tuple(self.base.random_element(rng, degree, bound) for _ in range(d + 1)),
            )
        if k == "quot":
            d = len(self.modulus) - 1
            return _pstrip(
                self.base,
                tuple(self.base.random_element(rng, degree, bound) for _ in range(d)),
            )
        if k == "loc":
            return self._loc_canon(
                self.inner.random_element(rng, degree, bound), rng.randint(0, 2)
            )
        return tuple(f.random_element(rng, degree, bound) for f in self.factors)

    def element(self, value: Any) -> "RingElement":
        """Wrap an int, text, or payload as a RingElement of this ring."""
        if isinstance(value, RingElement):
            if value.ring != self:
                raise ValueError("element belongs to a different ring")
            return value
        if isinstance(value, bool):
            raise TypeError("bool is not a ring element")
        if isinstance(value, int):
            return RingElement(self, self.from_int(value))
        if isinstance(value, str):
            return RingElement(self, self.parse_element(value))
        return RingElement(self, value)


class RingElement:
    """An element paired with its ring, supporting operator arithmetic."""

    __slots__ = ("ring", "payload")

    def __init__(self, ring: Ring, payload: Payload) -> None:
        self.ring = ring
        self.payload = payload

    def _coerce(self, other: Any) -> Optional["RingElement"]:
        if isinstance(other, RingElement):
            return other if other.ring == self.ring else None
        if isinstance(other, int) and not isinstance(other, bool):
            return RingElement(self.ring, self.ring.from_int(other))
        return None

    def __add__(self, other: Any) -> "RingElement":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RingElement(self.ring, self.ring.add(self.payload, o.payload))

    __radd__ = __add__

    def __sub__(self, other: Any) -> "RingElement":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RingElement(self.ring, self.ring.sub(self.payload, o.payload))

    def __rsub__(self, other: Any) -> "RingElement":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RingElement(self.ring, self.ring.sub(o.payload, self.payload))

    def __mul__(self, other: Any) -> "RingElement":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RingElement(self.ring, self.ring.mul(self.payload, o.payload))

    __rmul__ = __mul__

    def __neg__(self) -> "RingElement":
        return RingElement(self.ring, self.ring.neg(self.payload))

    def __pow__(self, e: int) -> "RingElement":
        return RingElement(self.ring, self.ring.pow(self.payload, e))

    def __eq__(self, other: Any) -> bool:
        o = self._coerce(other)
        return o is not None and self.payload == o.payload

    def __hash__(self) -> int:
        return hash((self.ring, self.payload))

    def __repr__(self) -> str:
        return self.ring.format_element(self.payload)

    def is_zero(self) -> bool:
        return self.ring.is_zero(self.payload)

    def is_unit(self) -> bool:
        return self.ring.is_unit(self.payload)

    def inverse(self) -> Optional["RingElement"]:
        inv = self.ring.unit_inverse(self.payload)
        return None if inv is None else RingElement(self.ring, inv)


# ---------------------------------------------------------------------------
# constructors with eager normalization


_INT = Ring("int")
_RAT = Ring("rat")


def integers() -> Ring:
    return _INT


def rationals() -> Ring:
    return _RAT


def prime_field(p: int) -> Ring:
    if not _is_probable_prime(p):
        raise UnsupportedRing(f"GF({p}) requires a prime")
    return Ring("gf", p=p)


def integers_mod(n: int) -> Ring:
    n = abs(n)
    if n == 0:
        return _INT
    return Ring("zmod", n=n)


def zero_ring() -> Ring:
    return Ring("zmod", n=1)


def poly_over(field: Ring, var: str = "t") -> Ring:
    if field.kind not in ("gf", "rat"):
        raise UnsupportedRing("polynomial base must be GF(p) or Q")
    return Ring("poly", base=field, var=var)


def poly_quotient(field: Ring, modulus: tuple, var: str = "t") -> Ring:
    if field.kind not in ("gf", "rat"):
        raise UnsupportedRing("polynomial base must be GF(p) or Q")
    f = _pstrip(field, tuple(modulus))
    if not f:
        return poly_over(field, var)
    if len(f) == 1:
        return zero_ring()
    f = _pmonic(field, f)
    if len(f) == 2:
        return field
    return Ring("quot", base=field, var=var, modulus=f)


def localized(inner: Ring, mult: Payload) -> Ring:
    if inner.is_zero_ring():
        return inner
    if inner.is_zero(mult):
        return zero_ring()
    if inner.is_unit(mult):
        return inner
    k = inner.kind
    if k == "zmod":
        m = inner.n
        a = mult % inner.n
        while True:
            g = _gcd(m, a)
            if g == 1:
                break
            m //= g
        return integers_mod(m)
    if k == "quot":
        f1 = inner._loc_modulus_after(mult)
        return poly_quotient(inner.base, f1, inner.var)
    if k == "prod":
        return product([localized(f, x) for f, x in zip(inner.factors, mult)])
    if k == "loc":
        return localized(inner.inner, inner.inner.mul(inner.mult, mult[0]))
    if k == "int":
        return Ring("loc", inner=inner, mult=_radical_int(abs(mult)))
    if k == "poly":
        return Ring(
            "loc", inner=inner, mult=_pmonic(inner.base, squarefree_radical(inner.base, mult))
        )
    raise UnsupportedRing(f"cannot localize {inner.text()}")


def product(factors: list[Ring]) -> Ring:
    flat: list[Ring] = []
    for f in factors:
        if f.kind == "prod":
            flat.extend(f.factors)
        else:
            flat.append(f)
    kept = [f for f in flat if not f.is_zero_ring()]
    if not kept:
        return zero_ring()
    if len(kept) == 1:
        return kept[0]
    return Ring("prod", factors=tuple(kept))


# ---------------------------------------------------------------------------
# ring maps and the text grammar


class RingMap:
    """A ring homomorphism with explicit source and target."""

    __slots__ = ("source", "target", "fn")

    def __init__(self, source: Ring, target: Ring, fn: Callable[[Payload], Payload]) -> None:
        self.source = source
        self.target = target
        self.fn = fn

    def __call__(self, a: Payload) -> Payload:
        return self.fn(a)

    def __repr__(self) -> str:
        return f"RingMap({self.source.text()} -> {self.target.text()})"


def morph(source: Ring, kind: str, data: Any) -> RingMap:
    """Build a supported ring map: ``quotient`` by a principal ideal,
    ``localize`` at an element, or project onto a product ``component``."""
    if kind == "quotient":
        target, proj, _ = source.quotient_by_principal(data)
        return RingMap(source, target, proj)
    if kind == "localize":
        target, fn = source.localize_at(data)
        return RingMap(source, target, fn)
    if kind == "component":
        if source.kind != "prod":
            raise UnsupportedTower("component projection requires a product ring")
        idx = int(data)
        if not 0 <= idx < len(source.factors):
            raise UnsupportedTower(f"no component {idx} in {source.text()}")
        return RingMap(source, source.factors[idx], lambda x: x[idx])
    raise UnsupportedTower(f"unsupported map kind {kind!r}")


def parse_ring(text: str) -> Ring:
    """Parse the ring text grammar; see the module docstring."""
    s = "".join(text.split())
    if not s:
        raise ValueError("empty ring text")
    return _parse_ring_str(s)


def _parse_ring_str(s: str) -> Ring:
    parts = _split_top(s, "x")
    if len(parts) > 1:
        return product([_parse_ring_str(p) for p in parts])
    return _parse_ring_atom(parts[0])


def _parse_ring_atom(s: str) -> Ring:
    if s == "Z":
        return integers()
    if s == "Q":
        return rationals()
    if s.startswith("Z/"):
        try:
            n = int(s[2:])
        except ValueError as exc:
            raise ValueError(f"cannot parse modulus in {s!r}") from exc
        return integers_mod(n)
    if s.startswith("loc(") and s.endswith(")"):
        body = s[4:-1]
        halves = _split_top(body, ";")
        if len(halves) != 2:
            raise ValueError(f"loc(...) requires exactly one ';' in {s!r}")
        inner = _parse_ring_str(halves[0])
        mult = inner.parse_element(halves[1])
        return localized(inner, mult)
    m = re.match(r"GF\((\d+)\)", s)
    if m:
        base = prime_field(int(m.group(1)))
        tail = s[m.end() :]
    elif s.startswith("Q"):
        base = rationals()
        tail = s[1:]
    else:
        raise ValueError(f"cannot parse ring text {s!r}")
    if tail == "":
        return base
    if not tail.startswith("[t]"):
        raise ValueError(f"cannot parse ring text {s!r}")
    ring = poly_over(base)
    tail = tail[3:]
    if tail == "":
        return ring
    if tail.startswith("/(") and tail.endswith(")"):
        f = ring.parse_element(tail[2:-1])
        return poly_quotient(base, f)
    raise ValueError(f"cannot parse ring text {s!r}")


def format_ring(ring: Ring) -> str:
    return ring.text()


# ---------------------------------------------------------------------------
# operation aliases, matching the public surface one operation per name


def unit_inverse(ring: Ring, a: Payload) -> Optional[Payload]:
    return ring.unit_inverse(a)


def annihilator(ring: Ring, a: Payload) -> Payload:
    return ring.annihilator(a)


def nilradical(ring: Ring) -> Payload:
    return ring.nilradical()


def is_nilpotent(ring: Ring, a: Payload) -> tuple[bool, int]:
    return ring.is_nilpotent(a)


def colon_to_nilradical(ring: Ring, a: Payload) -> Payload:
    return ring.colon_to_nilradical(a)


def dim_zero_witness(ring: Ring, a: Payload) -> tuple[Payload, Payload]:
    return ring.dim_zero_witness(a)


def boundary_quotient(ring: Ring, a: Payload) -> tuple[Ring, Callable[[Payload], Payload]]:
    return ring.boundary_quotient(a)


def split_comaximal(ring: Ring, u: Payload, w: Payload) -> tuple[Ring, Ring, Callable, Callable]:
    return ring.split_comaximal(u, w)


def ring_dim(ring: Ring) -> int:
    return ring.dim()
