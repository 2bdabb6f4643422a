"""Stable-range shortening of unimodular rows and Serre-style splitting.

The central operation takes a unimodular row of scalars over a base ring of
dimension d together with a designated multiplier s and produces correction
coefficients, each divisible by s, that fold the leading entry into the next
d + 1 entries.  The shortened row is certified unimodular over the ring with
s inverted (the ring itself when s is one).  On top of this sit three
splitting operations that move a vector off a hyperplane by a multiple of a
designated scalar: over a free module, over a ring split by an idempotent
into clopen pieces, and over a module summand presented with an explicit
locally-free cover certificate.

All outputs carry exact cocertificates; nothing in this module is numeric or
approximate.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Optional, Sequence

from .polyring import Ambient, PolyValue, scalar_ambient
from .rings import Payload, Ring, UnsupportedRing
from .witness import UnimodularRow, VerificationFailed
from .zerodim import NotUnimodular


class RowTooShort(Exception):
    """The row has too few entries for the dimension of its base ring."""


class RankTooSmall(Exception):
    """The ambient rank leaves no room for the required corrections."""


class NotClopen(Exception):
    """The designated idempotent does not realize a clopen decomposition."""


class InvalidCover(Exception):
    """A locally-free cover certificate failed an exact validation check."""


# splitting an ideal against powers of a multiplier terminates quickly on the
# supported rings; the cap only guards against non-unimodular inputs
_POWER_CAP = 256


def bezout_chain(ring: Ring, items: Sequence[Payload]) -> tuple[Payload, list[Payload]]:
    """Generator of the ideal spanned by items, with expressing coefficients.

    Returns (g, coeffs) with g = sum(coeffs[i] * items[i]) and (items) = (g)
    as ideals.  An empty sequence yields (0, []).
    """
    if not items:
        return ring.zero(), []
    g = items[0]
    coeffs = [ring.one()]
    for a in items[1:]:
        g, xg, yg = ring.bezout(g, a)
        coeffs = [ring.mul(xg, c) for c in coeffs]
        coeffs.append(yg)
    return g, coeffs


def power_combination(
    ring: Ring, s: Payload, items: Sequence[Payload]
) -> tuple[int, list[Payload]]:
    """Smallest K with s**K in the ideal (items), plus expressing coefficients.

    Returns (K, coeffs) with sum(coeffs[i] * items[i]) = s**K exactly.  Raises
    NotUnimodular when no power up to the cap lands in the ideal, which for
    the supported rings means the row is not unimodular once s is inverted.
    """
    g, coeffs = bezout_chain(ring, items)
    power = ring.one()
    for exponent in range(_POWER_CAP):
        q = ring.divide(power, g)
        if q is not None:
            return exponent, [ring.mul(q, c) for c in coeffs]
        nxt = ring.mul(power, s)
        if nxt == power:
            break
        power = nxt
    raise NotUnimodular(
        "no power of the designated multiplier lies in the ideal of the row"
    )


def _scalar_payload(ring: Ring, v: PolyValue) -> Payload:
    return v.coeffs[0] if v.coeffs else ring.zero()


def scalar_row(ring: Ring, entries: Sequence[Payload]) -> UnimodularRow:
    """Wrap ring elements as a certified scalar row, computing the cocertificate."""
    g, coeffs = bezout_chain(ring, entries)
    ginv = ring.unit_inverse(g)
    if ginv is None:
        raise NotUnimodular("the entries generate a proper ideal")
    ambient = scalar_ambient(ring)
    return UnimodularRow(
        ambient,
        [ambient.constant(e) for e in entries],
        [ambient.constant(ring.mul(ginv, c)) for c in coeffs],
    )


def _shorten_core(ring: Ring, ents: list[Payload], s: Payload) -> list[Payload]:
    """Correction pre-multipliers t with c_i = s * t_i for the shortening.

    ents = (a_0, ..., a_m) with m >= dim(ring) + 1; only the first dim + 1
    positions of the result are ever nonzero.
    """
    m = len(ents) - 1
    if ring.is_zero_ring():
        return [ring.zero()] * m
    d = ring.dim()
    if m > d + 1:
        # fold the trailing entry into the quotient, shorten there, lift back
        target, proj, sect = ring.quotient_by_principal(ents[m])
        inner = _shorten_core(target, [proj(e) for e in ents[:m]], proj(s))
        return [sect(t) for t in inner] + [ring.zero()]
    if d == 0:
        # x*a_1 + b = 1 with a_1*b nilpotent: adding s*b*a_0 to a_1 produces
        # an element invertible once s is, because any prime containing it
        # must contain one of (a_1, s), (a_1, b), (a_1, a_0), all improper
        _, b = ring.dim_zero_witness(ents[1])
        return [b]
    a_last = ents[m]
    gamma = ring.colon_to_nilradical(a_last)
    bound, xg, yg = ring.bezout(a_last, gamma)
    target, proj, sect = ring.quotient_by_principal(bound)
    ts_bar = _shorten_core(target, [proj(e) for e in ents[:m]], proj(s))
    ts = [sect(t) for t in ts_bar]
    head = [
        ring.add(ents[i + 1], ring.mul(ring.mul(s, ts[i]), ents[0]))
        for i in range(d)
    ]
    # a power of s congruent to a combination of the shortened head modulo
    # the boundary ideal (a_last, gamma); its defect z splits along the two
    # generators, and the gamma part is the final correction
    exponent, coeffs_bar = power_combination(target, proj(s), [proj(v) for v in head])
    z = ring.pow(s, exponent)
    for bc, v in zip(coeffs_bar, head):
        z = ring.sub(z, ring.mul(sect(bc), v))
    q = ring.divide(z, bound)
    if q is None:
        raise VerificationFailed("boundary kernel membership failed")
    ts.append(ring.mul(ring.mul(q, yg), gamma))
    return ts


def shorten_row(
    row: UnimodularRow, s: Optional[Payload] = None
) -> tuple[list[Payload], UnimodularRow]:
    """Fold the leading entry of a scalar row into the next dim + 1 entries.

    Given (a_0, ..., a_n) unimodular over R of dimension d with n >= d + 1,
    returns corrections (c_1, ..., c_{d+1}), each divisible by s, such that
    (a_1 + c_1 a_0, ..., a_{d+1} + c_{d+1} a_0, a_{d+2}, ..., a_n) is
    unimodular over R with s inverted.  The returned row lives over that
    localization (R itself when s is one) and carries an exact cocertificate.
    """
    ambient = row.ambient
    if ambient.mode != "scalar":
        raise ValueError("shorten_row operates on scalar rows")
    ring = ambient.ring
    ents = [_scalar_payload(ring, v) for v in row.entries]
    n = len(ents) - 1
    d = ring.dim()
    if n < d + 1:
        raise RowTooShort(
            f"need at least {d + 2} entries over a dimension-{d} ring, got {n + 1}"
        )
    if s is None:
        s = ring.one()
    if ring.is_zero(s) and not ring.is_zero_ring():
        raise ValueError("the designated multiplier must be nonzero")
    power_combination(ring, s, ents)
    ts = _shorten_core(ring, ents, s)
    cs = [ring.mul(s, t) for t in ts]
    out = list(ents[1:])
    for i, c in enumerate(cs):
        if not ring.is_zero(c):
            out[i] = ring.add(out[i], ring.mul(c, ents[0]))
    exponent, coeffs = power_combination(ring, s, out)
    loc, to_loc = ring.localize_at(s)
    sinv = loc.unit_inverse(to_loc(s))
    if sinv is None:
        raise VerificationFailed("multiplier fails to invert in its localization")
    scale = loc.pow(sinv, exponent)
    amb_loc = scalar_ambient(loc)
    vprime = UnimodularRow(
        amb_loc,
        [amb_loc.constant(to_loc(v)) for v in out],
        [amb_loc.constant(loc.mul(to_loc(b), scale)) for b in coeffs],
    )
    return cs[: d + 1], vprime


def serre_split_free(
    ring: Ring,
    a: Payload,
    x: Sequence[Payload],
    complement: Optional[Sequence[int]] = None,
) -> tuple[list[Payload], UnimodularRow]:
    """Find y with x + a*y unimodular, y supported on designated coordinates.

    Requires (a, x) unimodular in R^(1+r) with r >= dim(ring) + 1.  When
    complement is given it lists the coordinate positions y may use; it must
    leave at least dim + 1 slots.  Returns (y, certified shortened row).
    """
    r = len(x)
    d = ring.dim()
    if r < d + 1:
        raise RankTooSmall(f"rank {r} leaves no room over a dimension-{d} ring")
    if complement is None:
        idx = list(range(r))
        full = True
    else:
        idx = list(dict.fromkeys(int(i) for i in complement))
        if any(i < 0 or i >= r for i in idx):
            raise ValueError("complement indices out of range")
        if len(idx) < d + 1:
            raise RankTooSmall(
                f"complement with {len(idx)} slots cannot host {d + 1} corrections"
            )
        full = len(idx) == r
    g, _ = bezout_chain(ring, [a, *x])
    if ring.unit_inverse(g) is None:
        raise NotUnimodular("the augmented row generates a proper ideal")
    gx, cx = bezout_chain(ring, list(x))
    gxinv = ring.unit_inverse(gx)
    if gxinv is not None:
        row = scalar_row(ring, list(x))
        return [ring.zero()] * r, row
    ainv = ring.unit_inverse(a)
    if ainv is not None and full:
        y = [
            ring.mul(ainv, ring.sub(ring.one() if i == 0 else ring.zero(), x[i]))
            for i in range(r)
        ]
        out = [ring.one() if i == 0 else ring.zero() for i in range(r)]
        return y, scalar_row(ring, out)
    order = idx + [i for i in range(r) if i not in set(idx)]
    cs, permuted = shorten_row(scalar_row(ring, [a] + [x[i] for i in order]))
    y = [ring.zero()] * r
    for t, c in enumerate(cs):
        y[order[t]] = c
    loc_ring = permuted.ambient.ring
    entries = [None] * r
    cocert = [None] * r
    for t in range(r):
        entries[order[t]] = permuted.entries[t]
        cocert[order[t]] = permuted.cocert[t]
    row = UnimodularRow(permuted.ambient, entries, cocert)
    assert loc_ring == ring
    return y, row


def serre_split_disconnected(
    ring: Ring,
    s: Payload,
    e: Payload,
    a: Payload,
    x: Sequence[Payload],
    complement: Optional[Sequence[int]] = None,
) -> tuple[list[Payload], UnimodularRow]:
    """Split along a clopen decomposition certified by the idempotent e.

    The idempotent must cut out exactly the vanishing locus of s: e lies in
    (s) and s is nilpotent once e is removed.  The correction is assembled
    from independent solutions on the two factors R/(e) and R/(1-e).
    """
    one = ring.one()
    if ring.mul(e, e) != e:
        raise NotClopen("designated element is not idempotent")
    if ring.divide(e, s) is None:
        raise NotClopen("idempotent does not vanish on the vanishing locus of s")
    nil, _ = ring.is_nilpotent(ring.mul(s, ring.sub(one, e)))
    if not nil:
        raise NotClopen("s is not invertible off its vanishing locus")
    g, _ = bezout_chain(ring, [a, *x])
    if ring.unit_inverse(g) is None:
        raise NotUnimodular("the augmented row generates a proper ideal")
    if ring.is_zero(e) or e == one:
        return serre_split_free(ring, a, x, complement)
    part1, part2, to_parts, from_parts = ring.split_comaximal(e, ring.sub(one, e))
    ys = []
    for k, part in enumerate((part1, part2)):
        send = lambda v, _k=k: to_parts(v)[_k]
        yk, _ = serre_split_free(part, send(a), [send(v) for v in x], complement)
        ys.append(yk)
    y = [from_parts((ys[0][i], ys[1][i])) for i in range(len(x))]
    out = [ring.add(x[i], ring.mul(a, y[i])) for i in range(len(x))]
    return y, scalar_row(ring, out)


@dataclass(frozen=True)
class FreeCoverCertificate:
    """Caller-supplied evidence that a module summand is free on a cover.

    pairs lists (f, basis): after inverting f the module is free on the given
    basis vectors.  order_coeffs and cover_coeffs certify that the coordinate
    functionals of the target vector together with the multipliers f generate
    the unit ideal: sum(order_coeffs * x) + sum(cover_coeffs * f) = 1.
    """

    pairs: tuple[tuple[Payload, tuple[tuple[Payload, ...], ...]], ...]
    order_coeffs: tuple[Payload, ...]
    cover_coeffs: tuple[Payload, ...]


def _det(ring: Ring, rows: list[list[Payload]]) -> Payload:
    if not rows:
        return ring.one()
    if len(rows) == 1:
        return rows[0][0]
    total = ring.zero()
    sign = 1
    for j in range(len(rows)):
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = ring.mul(rows[0][j], _det(ring, minor))
        total = ring.add(total, term if sign > 0 else ring.neg(term))
        sign = -sign
    return total


def _solve_basis(
    ring: Ring, basis: Sequence[Sequence[Payload]], x: Sequence[Payload]
) -> Optional[list[Payload]]:
    """Coordinates of x in the given basis, via an exact unit-minor test."""
    k = len(basis)
    r = len(x)
    if k == 0 or any(len(b) != r for b in basis):
        return None
    for picked in combinations(range(r), k):
        sub = [[basis[j][i] for j in range(k)] for i in picked]
        det = _det(ring, sub)
        dinv = ring.unit_inverse(det)
        if dinv is None:
            continue
        # adjugate solve on the picked rows, then verify all coordinates
        coords = []
        for j in range(k):
            replaced = [
                [x[picked[i]] if jj == j else sub[i][jj] for jj in range(k)]
                for i in range(k)
            ]
            coords.append(ring.mul(_det(ring, replaced), dinv))
        for i in range(r):
            acc = ring.zero()
            for j in range(k):
                acc = ring.add(acc, ring.mul(basis[j][i], coords[j]))
            if acc != x[i]:
                break
        else:
            return coords
    return None


def serre_split_certified(
    ring: Ring,
    a: Payload,
    x: Sequence[Payload],
    cover: FreeCoverCertificate,
    presentation: Optional[Sequence[Sequence[Payload]]] = None,
) -> tuple[list[Payload], UnimodularRow]:
    """Split inside a module summand described by a locally-free cover.

    Validates the cover certificate exactly, picks a cover element whose
    multiplier is a unit, rewrites x in that basis, and delegates to the free
    splitting.  y is returned in ambient coordinates as a combination of the
    chosen basis; the certified row is the shortened coordinate row.
    """
    r = len(x)
    if len(cover.cover_coeffs) != len(cover.pairs) or len(cover.order_coeffs) != r:
        raise InvalidCover("certificate coefficient lists have mismatched lengths")
    acc = ring.zero()
    for lam, xi in zip(cover.order_coeffs, x):
        acc = ring.add(acc, ring.mul(lam, xi))
    for mu, (f, _) in zip(cover.cover_coeffs, cover.pairs):
        acc = ring.add(acc, ring.mul(mu, f))
    if acc != ring.one():
        raise InvalidCover("cover certificate does not sum to one")
    if presentation is not None:
        mat = [list(rowv) for rowv in presentation]
        if len(mat) != r or any(len(rowv) != r for rowv in mat):
            raise InvalidCover("presentation matrix has the wrong shape")
        for i in range(r):
            for j in range(r):
                acc2 = ring.zero()
                for t in range(r):
                    acc2 = ring.add(acc2, ring.mul(mat[i][t], mat[t][j]))
                if acc2 != mat[i][j]:
                    raise InvalidCover("presentation matrix is not idempotent")
        for vec in (x, *[b for _, basis in cover.pairs for b in basis]):
            for i in range(r):
                acc2 = ring.zero()
                for t in range(r):
                    acc2 = ring.add(acc2, ring.mul(mat[i][t], vec[t]))
                if acc2 != vec[i]:
                    raise InvalidCover("vector lies outside the presented module")
    chosen = None
    for f, basis in cover.pairs:
        if ring.unit_inverse(f) is not None:
            chosen = basis
            break
    if chosen is None:
        raise UnsupportedRing(
            "covers without a globally invertible multiplier are outside the "
            "supported fragment"
        )
    k = len(chosen)
    if k < ring.dim() + 1:
        raise RankTooSmall(f"basis of rank {k} leaves no room for corrections")
    coords = _solve_basis(ring, chosen, x)
    if coords is None:
        raise InvalidCover("basis change is not invertible on the chosen chart")
    y_coords, row = serre_split_free(ring, a, coords)
    y = []
    for i in range(r):
        acc3 = ring.zero()
        for j in range(k):
            acc3 = ring.add(acc3, ring.mul(chosen[j][i], y_coords[j]))
        y.append(acc3)
    return y, row
