"""Relative completion through the double ring R (+) I.

A row over S = R[X] (or the Laurent ambient) that is congruent to e1 modulo
an ideal I = (c)S with a scalar generator c admits a witness whose product
matrix is itself congruent to the identity modulo I.  The route here:

* build the double ring whose elements are pairs (a, i) with i in (c),
  multiplied by (a, i)(b, j) = (ab, aj + bi + ij);
* lift the relative row to an honest unimodular row over the double ring
  whose first components form e1 exactly;
* complete the lifted row absolutely over the double ring;
* push the witness back down: after normalising away its first-component
  part, every operation parameter lands in I, conjugated by operations
  that visibly cancel, so the descended product matrix is congruent to
  the identity modulo I by construction and is checked exactly.

The double ring deliberately stays outside the base-ring grammar: its
nilradical need not be principal, so the generic zero-dimensional machinery
does not apply to it.  Completion over it is handled by the bespoke
support-idempotent routine below instead.
"""

from __future__ import annotations

import random
from typing import Optional

from .polyring import (
    Ambient,
    PolyValue,
    map_value,
    unit_inverse_value,
)
from .rings import Payload, Ring, UnsupportedRing, _split_top
from .witness import (
    ElementaryOp,
    ElementaryWitness,
    PrincipalIdeal,
    SizeMismatch,
    UnimodularRow,
    VerificationFailed,
    ensure_verifies,
    invert_witness,
    product_matrix,
    standard_basis_row,
)
from .zerodim import DimensionMismatch, complete_laurent_dim0, complete_poly_dim0


class IdealMembership(Exception):
    """A second component fell outside the defining ideal of the double ring."""


class NotRelative(Exception):
    """A row or cocertificate is not congruent to e1 modulo the given ideal."""


# ---------------------------------------------------------------------------
# the double ring


class ExcisionRing:
    """The ring of pairs (a, i) over a base ring, with i ranging over (c).

    Addition is componentwise and (a, i)(b, j) = (ab, aj + bi + ij), so the
    first projection and the addition map (a, i) -> a + i are both ring
    surjections onto the base; the diagonal a -> (a, 0) splits both.  A pair
    is a unit exactly when both of its images under those surjections are.
    """

    kind = "excision"
    __slots__ = ("base", "gen")

    def __init__(self, base: Ring, gen: Payload) -> None:
        self.base = base
        self.gen = gen

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ExcisionRing)
            and self.base == other.base
            and self.gen == other.gen
        )

    def __hash__(self) -> int:
        return hash(("excision", self.base, self.gen))

    def __repr__(self) -> str:
        return f"ExcisionRing({self.text()})"

    def text(self) -> str:
        return f"double({self.base.text()}; {self.base.format_element(self.gen)})"

    # -- element construction ----------------------------------------------

    def element(self, a: Payload, i: Payload) -> Payload:
        """The pair (a, i), checking that i really lies in the ideal."""
        if self.base.divide(i, self.gen) is None:
            raise IdealMembership(
                f"{self.base.format_element(i)} is not a multiple of "
                f"{self.base.format_element(self.gen)}"
            )
        return (a, i)

    def zero(self) -> Payload:
        return (self.base.zero(), self.base.zero())

    def one(self) -> Payload:
        return (self.base.one(), self.base.zero())

    def from_int(self, m: int) -> Payload:
        return (self.base.from_int(m), self.base.zero())

    # -- the three structure maps ------------------------------------------

    def first(self, p: Payload) -> Payload:
        """First projection (a, i) -> a."""
        return p[0]

    def retract(self, p: Payload) -> Payload:
        """Addition map (a, i) -> a + i; the second surjection onto the base."""
        return self.base.add(p[0], p[1])

    def embed(self, a: Payload) -> Payload:
        """Diagonal section a -> (a, 0), splitting both surjections."""
        return (a, self.base.zero())

    # -- arithmetic ---------------------------------------------------------

    def add(self, p: Payload, q: Payload) -> Payload:
        return (self.base.add(p[0], q[0]), self.base.add(p[1], q[1]))

    def neg(self, p: Payload) -> Payload:
        return (self.base.neg(p[0]), self.base.neg(p[1]))

    def sub(self, p: Payload, q: Payload) -> Payload:
        return self.add(p, self.neg(q))

    def mul(self, p: Payload, q: Payload) -> Payload:
        a, i = p
        b, j = q
        cross = self.base.add(
            self.base.add(self.base.mul(a, j), self.base.mul(b, i)),
            self.base.mul(i, j),
        )
        return (self.base.mul(a, b), cross)

    def pow(self, p: Payload, e: int) -> Payload:
        if e < 0:
            raise ValueError("negative power of a ring element")
        acc = self.one()
        for _ in range(e):
            acc = self.mul(acc, p)
        return acc

    def is_zero(self, p: Payload) -> bool:
        return self.base.is_zero(p[0]) and self.base.is_zero(p[1])

    # -- predicates ---------------------------------------------------------

    def is_zero_ring(self) -> bool:
        return self.base.is_zero_ring()

    def is_domain(self) -> bool:
        # pairs (a, -a) with a in the ideal annihilate (0, j), so zero
        # divisors appear as soon as the ideal is nonzero
        return self.base.is_domain() and self.base.is_zero(self.gen)

    def dim(self) -> int:
        return self.base.dim()

    def unit_inverse(self, p: Payload) -> Optional[Payload]:
        ia = self.base.unit_inverse(p[0])
        if ia is None:
            return None
        ib = self.base.unit_inverse(self.retract(p))
        if ib is None:
            return None
        return self.element(ia, self.base.sub(ib, ia))

    def is_unit(self, p: Payload) -> bool:
        return self.unit_inverse(p) is not None

    def is_nilpotent(self, p: Payload) -> tuple[bool, int]:
        oka, ka = self.base.is_nilpotent(p[0])
        if not oka:
            return (False, 0)
        okb, kb = self.base.is_nilpotent(self.retract(p))
        if not okb:
            return (False, 0)
        k = max(ka, kb)
        while not self.is_zero(self.pow(p, k)):
            k += 1
        return (True, k)

    def divide(self, b: Payload, a: Payload) -> Optional[Payload]:
        """A quotient pair if the componentwise quotients form one.

        Complete only up to the base ring's choice of representatives; a None
        here can be a false negative when quotients are not unique.
        """
        qa = self.base.divide(b[0], a[0])
        if qa is None:
            return None
        qb = self.base.divide(self.retract(b), self.retract(a))
        if qb is None:
            return None
        if self.base.divide(self.base.sub(qb, qa), self.gen) is None:
            return None
        q = (qa, self.base.sub(qb, qa))
        if self.mul(a, q) != b:
            return None
        return q

    def divides(self, a: Payload, b: Payload) -> bool:
        return self.divide(b, a) is not None

    def nilradical(self) -> Payload:
        raise UnsupportedRing(
            "the double ring has no principal nilradical in general"
        )

    def dim_zero_witness(self, p: Payload) -> tuple[Payload, Payload]:
        """(x, b) with x*p + b = 1 and p*b nilpotent, assembled on supports.

        Componentwise witnesses do not stay inside the ideal; the exact
        support idempotent of each image does, because it is canonical: it is
        the unique idempotent e with e*a = a and e in (a).
        """
        if self.base.dim() != 0:
            raise UnsupportedRing("dimension-zero witnesses need a dimension-zero base")
        base = self.base
        nil = base.nilradical()
        if base.is_zero(nil):
            # reduced base: both component witnesses are exact
            xt = []
            for comp in (p[0], self.retract(p)):
                x, _ = base.dim_zero_witness(comp)
                e = base.mul(x, comp)
                xt.append(base.mul(x, e))
            x_pair = self.element(xt[0], base.sub(xt[1], xt[0]))
            b_pair = self.sub(self.one(), self.mul(x_pair, p))
            return x_pair, b_pair
        rbar, proj, sect = base.quotient_by_principal(nil)
        xbar, _ = ExcisionRing(rbar, proj(self.gen)).dim_zero_witness(
            (proj(p[0]), proj(p[1]))
        )
        tbar = rbar.divide(xbar[1], proj(self.gen))
        if tbar is None:
            raise VerificationFailed("support witness left the ideal after reduction")
        x_pair = self.element(sect(xbar[0]), base.mul(self.gen, sect(tbar)))
        b_pair = self.sub(self.one(), self.mul(x_pair, p))
        ok, _ = self.is_nilpotent(self.mul(p, b_pair))
        if not ok:
            raise VerificationFailed("support witness product is not nilpotent")
        return x_pair, b_pair

    # -- text and sampling --------------------------------------------------

    def format_element(self, p: Payload) -> str:
        return f"({self.base.format_element(p[0])}, {self.base.format_element(p[1])})"

    def parse_element(self, text: str) -> Payload:
        s = "".join(text.split())
        if not (s.startswith("(") and s.endswith(")")):
            raise ValueError("double-ring elements are written (a, i)")
        parts = _split_top(s[1:-1], ",")
        if len(parts) != 2:
            raise ValueError("double-ring elements have exactly two components")
        return self.element(
            self.base.parse_element(parts[0]), self.base.parse_element(parts[1])
        )

    def random_element(self, rng: random.Random, degree: int = 2, bound: int = 9) -> Payload:
        a = self.base.random_element(rng, degree, bound)
        t = self.base.random_element(rng, degree, bound)
        return (a, self.base.mul(self.gen, t))


# ---------------------------------------------------------------------------
# value-level maps


def first_value(v: PolyValue, target: Ambient) -> PolyValue:
    """Coefficientwise first projection of a double-ring value."""
    return map_value(v, lambda p: p[0], target.ring, target.mode)


def retract_value(v: PolyValue, target: Ambient) -> PolyValue:
    """Coefficientwise addition map of a double-ring value."""
    ring = v.ambient.ring
    return map_value(v, ring.retract, target.ring, target.mode)


def embed_value(v: PolyValue, double: ExcisionRing) -> PolyValue:
    """Coefficientwise diagonal embedding into the double ring."""
    return map_value(v, double.embed, double)


def double_unit_inverse(v: PolyValue) -> Optional[PolyValue]:
    """Inverse of a double-ring value, through the two surjections.

    The two component inverses differ by i * (inverse product), which lies in
    the ideal, so they assemble to a valid pair value.
    """
    AX = v.ambient
    X = AX.ring
    A = Ambient(X.base, AX.mode)
    iu = unit_inverse_value(first_value(v, A))
    if iu is None:
        return None
    ir = unit_inverse_value(retract_value(v, A))
    if ir is None:
        return None
    lo = min(iu.low, ir.low) if (iu.coeffs or ir.coeffs) else 0
    hi = max(iu.low + len(iu.coeffs), ir.low + len(ir.coeffs))
    base = X.base
    out = [
        X.element(iu.coeff_at(k), base.sub(ir.coeff_at(k), iu.coeff_at(k)))
        for k in range(lo, hi)
    ]
    return AX.value(lo, out)


def lift_idempotent(ring: Ring, e: Payload, cap: int = 64) -> Payload:
    """Sharpen e with e^2 - e nilpotent to an exact idempotent.

    The iterate 3e^2 - 2e^3 at least doubles the vanishing order of the
    defect and stays inside every ideal containing e.
    """
    cur = e
    for _ in range(cap):
        sq = ring.mul(cur, cur)
        if ring.is_zero(ring.sub(sq, cur)):
            return cur
        cur = ring.sub(
            ring.mul(ring.from_int(3), sq),
            ring.mul(ring.from_int(2), ring.mul(sq, cur)),
        )
    raise VerificationFailed("idempotent sharpening did not converge")


# ---------------------------------------------------------------------------
# lifting


def lift_unimodular(v: UnimodularRow, gen: Payload) -> UnimodularRow:
    """Lift a row congruent to e1 modulo (gen) into the double ring.

    The first entry becomes (1, v1 - 1) and every other entry (0, vj); the
    first components then form e1 exactly while the addition map returns the
    original row.  A cocertificate in the same congruence shape lifts the
    same way.
    """
    A = v.ambient
    base = A.ring
    X = ExcisionRing(base, gen)
    AX = Ambient(X, A.mode)

    def lift_entry(val: PolyValue, leading: bool) -> PolyValue:
        rest = A.sub(val, A.one()) if leading else val
        lo = min(0, rest.low) if leading else (rest.low if rest.coeffs else 0)
        hi = max(1, rest.low + len(rest.coeffs)) if leading else lo + len(rest.coeffs)
        out = []
        for k in range(lo, hi):
            a = base.one() if (leading and k == 0) else base.zero()
            i = rest.coeff_at(k)
            if base.divide(i, gen) is None:
                raise NotRelative(
                    "row entry is not congruent to its target modulo the ideal"
                )
            out.append((a, i))
        return AX.value(lo, out)

    entries = [lift_entry(val, k == 0) for k, val in enumerate(v.entries)]
    cocert = None
    if v.cocert is not None:
        cocert = [lift_entry(val, k == 0) for k, val in enumerate(v.cocert)]
    return UnimodularRow(AX, entries, cocert)


# ---------------------------------------------------------------------------
# completion over the double ring


def complete_lifted_row(v: UnimodularRow) -> ElementaryWitness:
    """Complete a lifted row over the double ring to e1, dimension-zero base.

    The base splits along the exact support idempotent of the ideal
    generator.  On the factor where the generator is invertible the two
    components of the double ring decouple, so an absolute completion of the
    retracted row lifts with second-component parameters only; on the other
    factor the generator is nilpotent, the first entry is a unit, and a tail
    sweep plus the unit gadget finish.
    """
    AX = v.ambient
    X = AX.ring
    if not isinstance(X, ExcisionRing):
        raise ValueError("expects a row over a double ring")
    if AX.mode not in ("poly", "laurent"):
        raise ValueError("expects a polynomial or Laurent row")
    base = X.base
    if base.dim() != 0:
        raise DimensionMismatch("the double-ring completer needs a dimension-zero base")
    n = len(v)
    if n < 2:
        raise SizeMismatch("completion needs at least two entries")
    A = Ambient(base, AX.mode)
    for k, val in enumerate(v.entries):
        want = A.one() if k == 0 else A.zero()
        if first_value(val, A) != want:
            raise NotRelative("row is not a lift: first components are not e1")

    ops: list[ElementaryOp] = []
    cur = list(v.entries)

    def push(i: int, j: int, lam: PolyValue) -> None:
        if lam.is_zero():
            return
        ops.append(ElementaryOp(i, j, lam))
        cur[i - 1] = AX.add(cur[i - 1], AX.mul(lam, cur[j - 1]))

    # split the base along the support of the ideal generator
    x, _ = base.dim_zero_witness(X.gen)
    e_hat = lift_idempotent(base, base.mul(x, X.gen))
    b_hat = base.sub(base.one(), e_hat)
    inv_factor, nil_factor, _, frm = base.split_comaximal(b_hat, e_hat)

    # where the generator is invertible, complete the retracted row
    # absolutely and re-embed with second-component parameters, which act
    # trivially on the e1 first components
    if not inv_factor.is_zero_ring():
        A1 = Ambient(inv_factor, AX.mode)
        q1 = base.quotient_by_principal(b_hat)[1]
        v1 = UnimodularRow(
            A1,
            [map_value(retract_value(val, A), q1, inv_factor) for val in cur],
        )
        w1 = complete_poly_dim0(v1) if AX.mode == "poly" else complete_laurent_dim0(v1)
        nil_zero = nil_factor.zero()
        for op in w1.ops:
            lam = map_value(
                op.lam,
                lambda t: X.element(base.zero(), frm((t, nil_zero))),
                X,
                AX.mode,
            )
            push(op.i, op.j, lam)

    # on the complementary factor the generator is nilpotent, so the
    # retracted first entry is now 1 + nilpotent: sweep the tail into it
    lead = retract_value(cur[0], A)
    inv = unit_inverse_value(lead)
    if inv is None:
        raise VerificationFailed("first entry is not a unit after the split completion")
    for j in range(2, n + 1):
        tail = retract_value(cur[j - 1], A)
        if tail.is_zero():
            continue
        lam = map_value(
            A.neg(A.mul(tail, inv)),
            lambda t: X.element(base.zero(), t),
            X,
            AX.mode,
        )
        push(j, 1, lam)

    # finish with the unit gadget on the first entry
    u = cur[0]
    one = AX.one()
    if u != one:
        uinv = double_unit_inverse(u)
        if uinv is None:
            raise VerificationFailed("leading entry is not a unit of the double ring")
        push(2, 1, AX.mul(uinv, AX.sub(one, u)))
        push(1, 2, one)
        push(2, 1, AX.sub(u, one))

    w = ElementaryWitness(AX, n, ops)
    ensure_verifies(w, UnimodularRow(AX, v.entries), standard_basis_row(AX, n))
    return w


# ---------------------------------------------------------------------------
# descent


def descend_witness(w: ElementaryWitness, lifted: UnimodularRow) -> ElementaryWitness:
    """Push a double-ring witness on a lifted row down to a relative witness.

    After left-dividing by the diagonal embedding of its first-component
    image, every operation parameter of the witness has first component
    zero, hence maps into the ideal.  Writing each remaining parameter as
    kernel part times diagonal part and conjugating the kernel parts by the
    diagonal prefixes turns the word into a product of visibly relative
    blocks followed by a diagonal tail whose image must be the identity.
    Dropping the tail and applying the addition map coefficientwise yields a
    witness over the base ambient that still moves the row to e1 and whose
    product matrix is congruent to the identity modulo the ideal.
    """
    AX = w.ambient
    X = AX.ring
    if not isinstance(X, ExcisionRing):
        raise ValueError("expects a witness over a double ring")
    base = X.base
    A = Ambient(base, AX.mode)
    n = w.n

    ensure_verifies(w, UnimodularRow(AX, lifted.entries), standard_basis_row(AX, n))
    for k, val in enumerate(lifted.entries):
        want = A.one() if k == 0 else A.zero()
        if first_value(val, A) != want:
            raise NotRelative("row is not a lift: first components are not e1")

    # normalise: follow the witness with the inverse of the diagonal
    # embedding of its first-component image, so that image becomes trivial
    diag_ops = [
        ElementaryOp(op.i, op.j, embed_value(first_value(op.lam, A), X))
        for op in w.ops
    ]
    tail_ops = invert_witness(ElementaryWitness(AX, n, diag_ops)).ops

    # split every parameter into (first component, ideal part)
    split: list[tuple[int, int, PolyValue, PolyValue]] = []
    for op in list(w.ops) + list(tail_ops):
        a_part = first_value(op.lam, A)
        i_part = A.sub(retract_value(op.lam, A), a_part)
        split.append((op.i, op.j, a_part, i_part))

    # the diagonal parts alone must multiply to the identity
    diag_witness = ElementaryWitness(
        A, n, [ElementaryOp(i, j, a) for (i, j, a, _) in split if not a.is_zero()]
    )
    ident = [[A.one() if r == c else A.zero() for c in range(n)] for r in range(n)]
    if product_matrix(diag_witness) != ident:
        raise VerificationFailed("diagonal image of the witness is not the identity")

    # conjugate each ideal part by the prefix of diagonal parts before it,
    # in matrix order (last operation leftmost)
    word: list[tuple[int, int, PolyValue]] = []
    prefix: list[tuple[int, int, PolyValue]] = []
    for (i, j, a_part, i_part) in reversed(split):
        if not i_part.is_zero():
            word.extend(prefix)
            word.append((i, j, i_part))
            word.extend((pi, pj, A.neg(pa)) for (pi, pj, pa) in reversed(prefix))
        if not a_part.is_zero():
            prefix.append((i, j, a_part))

    rel = PrincipalIdeal(A, A.constant(X.gen))
    out = ElementaryWitness(
        A,
        n,
        [ElementaryOp(i, j, lam) for (i, j, lam) in reversed(word)],
        relative=rel,
    )
    retracted = UnimodularRow(A, [retract_value(val, A) for val in lifted.entries])
    ensure_verifies(out, retracted, standard_basis_row(A, n))
    return out
