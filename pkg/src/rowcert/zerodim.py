"""Row completion over R[X] and R[X,1/X] when R has dimension zero.

The engine inducts on the total coefficient count of the row.  When some
entry has a unit top coefficient, division shrinks the count.  Otherwise the
top coefficient a of a minimal entry yields x, b with x*a + b = 1 and
a*b = 0 on the reduced ring, so R splits as R/(ax) x R/(b); the two factors
are completed independently (a vanishes in the first factor, a is invertible
in the second) and the witnesses are recombined coefficientwise through the
splitting isomorphism.  Nilpotent coefficients are stripped first by working
modulo the nilradical and cleaning up the lifted row with a unit gadget;
product rings are handled one component at a time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .polyring import (
    Ambient,
    LeadingNotUnit,
    PolyValue,
    divide_unit_leading,
    map_value,
    unit_inverse_value,
)
from .rings import Ring, morph
from .witness import (
    ElementaryOp,
    ElementaryWitness,
    SizeMismatch,
    UnimodularRow,
    VerificationFailed,
    complete_unit_first,
    ensure_verifies,
    scale_down_first,
    standard_basis_row,
)


class NotUnimodular(Exception):
    """The entries do not generate the unit ideal, so no completion exists."""


class DimensionMismatch(Exception):
    """The coefficient ring does not have the dimension this routine needs."""


@dataclass(frozen=True, order=True)
class CoeffCountMeasure:
    """Total number of coefficient slots across the nonzero row entries."""

    N: int

    @classmethod
    def of_row(cls, row: UnimodularRow) -> "CoeffCountMeasure":
        return cls(_count(list(row.entries)))


def _width(v: PolyValue) -> int:
    if v.is_zero():
        return 0
    if v.ambient.mode == "poly":
        return v.low + len(v.coeffs)
    return len(v.coeffs)


def _count(entries: list[PolyValue]) -> int:
    return sum(_width(v) for v in entries)


def _ring_mass(ring: Ring) -> int:
    """A well-founded size surrogate that shrinks under proper quotients."""
    size = ring.size()
    if size is not None:
        return size
    if ring.kind == "quot":
        return len(ring.modulus) - 1
    if ring.kind == "prod":
        return sum(_ring_mass(f) for f in ring.factors) + 1
    return 1


MeasureLog = list


def _log_recurse(log: Optional[MeasureLog], parent: tuple, child: tuple) -> None:
    if log is not None:
        log.append(("recurse", parent, child))


def _log_divide(log: Optional[MeasureLog], before: int, after: int) -> None:
    if log is not None:
        log.append(("divide", before, after))


# ---------------------------------------------------------------------------
# shared machinery


class _Builder:
    """Accumulates ops while replaying them on a working copy of the row."""

    def __init__(self, ambient: Ambient, entries: list[PolyValue]) -> None:
        self.A = ambient
        self.work = entries
        self.ops: list[ElementaryOp] = []

    def emit(self, i: int, j: int, lam: PolyValue) -> None:
        if lam.is_zero():
            return
        self.ops.append(ElementaryOp(i, j, lam))
        self.work[i - 1] = self.A.add(self.work[i - 1], self.A.mul(lam, self.work[j - 1]))

    def emit_all(self, ops) -> None:
        for op in ops:
            self.emit(op.i, op.j, op.lam)


def _finish_with_unit_entry(b: _Builder) -> bool:
    """If some entry is a unit, drive the row to e1 and report success."""
    A = b.A
    n = len(b.work)
    for k, val in enumerate(b.work):
        if val.is_zero():
            continue
        uinv = unit_inverse_value(val)
        if uinv is None:
            continue
        for i in range(n):
            if i != k and not b.work[i].is_zero():
                b.emit(i + 1, k + 1, A.neg(A.mul(b.work[i], uinv)))
        if k == 0:
            b.emit_all(complete_unit_first(b.work[0], n).ops)
        else:
            b.emit(1, k + 1, uinv)
            b.emit(k + 1, 1, A.neg(b.work[k]))
        return True
    return False


def _nonzero_indices(work: list[PolyValue]) -> list[int]:
    return [i for i, v in enumerate(work) if not v.is_zero()]


def _lift_component(factors, k: int) -> Callable:
    def embed(c, k=k):
        return tuple(c if t == k else g.zero() for t, g in enumerate(factors))

    return embed


def _complete(A: Ambient, entries: list[PolyValue], log: Optional[MeasureLog],
              depth: int) -> list[ElementaryOp]:
    if depth > 64:
        raise VerificationFailed("completion recursion exceeded its depth cap")
    ring = A.ring
    if ring.is_zero_ring():
        return []
    if ring.kind == "prod":
        return _complete_product(A, entries, log, depth)
    rad = ring.nilradical()
    if not ring.is_zero(rad):
        return _complete_nonreduced(A, entries, rad, log, depth)
    if A.mode == "poly":
        return _complete_reduced_poly(A, entries, log, depth)
    return _complete_reduced_laurent(A, entries, log, depth)


def _complete_product(A: Ambient, entries: list[PolyValue], log, depth) -> list[ElementaryOp]:
    ring = A.ring
    b = _Builder(A, entries)
    parent_key = (_ring_mass(ring), _count(entries))
    for k, fac in enumerate(ring.factors):
        pm = morph(ring, "component", k)
        sub = [map_value(v, pm.fn, fac, A.mode) for v in entries]
        _log_recurse(log, parent_key, (_ring_mass(fac), _count(sub)))
        sub_ops = _complete(Ambient(fac, A.mode), sub, log, depth + 1)
        embed = _lift_component(ring.factors, k)
        for op in sub_ops:
            b.emit(op.i, op.j, map_value(op.lam, embed, ring, A.mode))
    return b.ops


def _complete_nonreduced(A: Ambient, entries: list[PolyValue], rad, log, depth) -> list[ElementaryOp]:
    ring = A.ring
    rq, proj, sect = ring.quotient_by_principal(rad)
    sub = [map_value(v, proj, rq, A.mode) for v in entries]
    _log_recurse(
        log, (_ring_mass(ring), _count(entries)), (_ring_mass(rq), _count(sub))
    )
    sub_ops = _complete(Ambient(rq, A.mode), sub, log, depth + 1)
    b = _Builder(A, entries)
    for op in sub_ops:
        b.emit(op.i, op.j, map_value(op.lam, sect, ring, A.mode))
    # the row is now congruent to e1 modulo nilpotent coefficients, so the
    # first entry is a unit and the tail can be cleared outright
    u = b.work[0]
    uinv = unit_inverse_value(u)
    if uinv is None:
        raise VerificationFailed("lifted row does not start with a unit")
    for i in range(1, len(b.work)):
        if not b.work[i].is_zero():
            b.emit(i + 1, 1, A.neg(A.mul(b.work[i], uinv)))
    b.emit_all(complete_unit_first(u, len(b.work)).ops)
    return b.ops


def _split_and_recurse(b: _Builder, a, log, depth) -> list[ElementaryOp]:
    """Split the base ring where a is neither zero nor a unit, and recurse."""
    A = b.A
    ring = A.ring
    x, bb = ring.dim_zero_witness(a)
    ax = ring.mul(a, x)
    r1, r2, to, frm = ring.split_comaximal(ax, bb)
    parent_key = (_ring_mass(ring), _count(b.work))
    plans = []
    for rk, pick, pad in (
        (r1, (lambda z: to(z)[0]), (lambda c: frm((c, r2.zero())))),
        (r2, (lambda z: to(z)[1]), (lambda c: frm((r1.zero(), c)))),
    ):
        sub = [map_value(v, pick, rk, A.mode) for v in b.work]
        _log_recurse(log, parent_key, (_ring_mass(rk), _count(sub)))
        sub_ops = _complete(Ambient(rk, A.mode), sub, log, depth + 1)
        plans.append((sub_ops, pad))
    for sub_ops, pad in plans:
        for op in sub_ops:
            b.emit(op.i, op.j, map_value(op.lam, pad, ring, A.mode))
    return b.ops


def _complete_reduced_poly(A: Ambient, entries: list[PolyValue], log, depth) -> list[ElementaryOp]:
    ring = A.ring
    b = _Builder(A, entries)
    while True:
        if _finish_with_unit_entry(b):
            return b.ops
        live = _nonzero_indices(b.work)
        if not live:
            raise NotUnimodular("the zero row generates nothing")
        if len(live) == 1:
            raise NotUnimodular(
                f"single non-unit entry {A.format(b.work[live[0]])} generates a proper ideal"
            )
        i0 = min(live, key=lambda i: (b.work[i].low + len(b.work[i].coeffs), i))
        f0 = b.work[i0]
        a = f0.coeffs[-1]
        ainv = ring.unit_inverse(a)
        if ainv is not None:
            before = _count(b.work)
            for i in live:
                if i == i0:
                    continue
                q, _ = divide_unit_leading(b.work[i], f0)
                b.emit(i + 1, i0 + 1, A.neg(q))
            _log_divide(log, before, _count(b.work))
            continue
        return _split_and_recurse(b, a, log, depth)


def _complete_reduced_laurent(A: Ambient, entries: list[PolyValue], log, depth) -> list[ElementaryOp]:
    ring = A.ring
    b = _Builder(A, entries)
    if _finish_with_unit_entry(b):
        return b.ops
    live = _nonzero_indices(b.work)
    if not live:
        raise NotUnimodular("the zero row generates nothing")
    if len(live) == 1:
        raise NotUnimodular(
            f"single non-unit entry {A.format(b.work[live[0]])} generates a proper ideal"
        )
    if b.work[0].is_zero():
        j = min(live, key=lambda i: (_width(b.work[i]), i))
        b.emit(1, j + 1, A.one())
        b.emit(j + 1, 1, A.neg(A.one()))
    f1 = b.work[0]
    a = f1.coeffs[0]
    if ring.unit_inverse(a) is not None:
        pre, reduced = laurent_to_poly_reduce(UnimodularRow(A, b.work))
        b.emit_all(pre.ops)
        P = Ambient(ring, "poly")
        pentries = [P.value(v.low, list(v.coeffs)) for v in reduced.entries]
        sub_ops = _complete(P, pentries, log, depth + 1)
        for op in sub_ops:
            b.emit(op.i, op.j, A.value(op.lam.low, list(op.lam.coeffs)))
        return b.ops
    return _split_and_recurse(b, a, log, depth)


# ---------------------------------------------------------------------------
# public entry points


def complete_poly_dim0(v: UnimodularRow,
                       measure_log: Optional[MeasureLog] = None) -> ElementaryWitness:
    """Witness carrying a polynomial-mode row over a zero-dimensional ring to e1."""
    A = v.ambient
    if A.mode != "poly":
        raise ValueError("expects a polynomial-mode row")
    if A.ring.dim() != 0:
        raise DimensionMismatch("coefficient ring must have dimension zero")
    if len(v) < 2:
        raise SizeMismatch("completion needs at least two entries")
    ops = _complete(A, list(v.entries), measure_log, 0)
    w = ElementaryWitness(A, len(v), ops)
    ensure_verifies(w, UnimodularRow(A, v.entries), standard_basis_row(A, len(v)))
    return w


def complete_laurent_dim0(v: UnimodularRow,
                          measure_log: Optional[MeasureLog] = None) -> ElementaryWitness:
    """Witness carrying a Laurent-mode row over a zero-dimensional ring to e1."""
    A = v.ambient
    if A.mode != "laurent":
        raise ValueError("expects a Laurent-mode row")
    if A.ring.dim() != 0:
        raise DimensionMismatch("coefficient ring must have dimension zero")
    if len(v) < 2:
        raise SizeMismatch("completion needs at least two entries")
    ops = _complete(A, list(v.entries), measure_log, 0)
    w = ElementaryWitness(A, len(v), ops)
    ensure_verifies(w, UnimodularRow(A, v.entries), standard_basis_row(A, len(v)))
    return w


def laurent_to_poly_reduce(v: UnimodularRow) -> tuple[ElementaryWitness, UnimodularRow]:
    """Push a Laurent row with a unit bottom coefficient in front into R[X].

    Returns (witness, row) where the row has polynomial entries whose first
    entry has constant term exactly 1; hence any polynomial completion of the
    returned row extends to a Laurent completion of the input.  The constant
    term 1 matters: together with the Laurent cocertificate it forces the
    returned entries to be unimodular already over R[X].
    """
    A = v.ambient
    if A.mode != "laurent":
        raise ValueError("expects a Laurent-mode row")
    if len(v) < 2:
        raise SizeMismatch("reduction needs at least two entries")
    ring = A.ring
    f1 = v.entries[0]
    if f1.is_zero():
        raise LeadingNotUnit("first entry is zero")
    a = f1.coeffs[0]
    ainv = ring.unit_inverse(a)
    if ainv is None:
        raise LeadingNotUnit(
            f"bottom coefficient {ring.format_element(a)} of the first entry is not a unit"
        )
    b = _Builder(A, list(v.entries))
    eps = A.value(f1.low, [a])
    if eps != A.one():
        b.emit_all(scale_down_first(eps, len(b.work)).ops)
    g = b.work[0]
    # g has constant term 1, so multiples of g sweep out any negative tail
    for i in range(1, len(b.work)):
        cur = b.work[i]
        acc = A.zero()
        while not cur.is_zero() and cur.low < 0:
            term = A.value(cur.low, [ring.neg(cur.coeffs[0])])
            acc = A.add(acc, term)
            cur = A.add(cur, A.mul(term, g))
        b.emit(i + 1, 1, acc)
    out = UnimodularRow(A, b.work)
    return (ElementaryWitness(A, len(b.work), b.ops), out)
