"""Completion engines that manufacture elementary witnesses.

This module builds witnesses out of structural data instead of luck: exact
Gauss descent over computable scalars, factorization of determinant-one
matrices into elementary words, boundary rewrites that force a chosen scalar
to dominate the extreme coefficients of a row entry, completion of rows that
are congruent to the standard basis row modulo a principal ideal, basepoint
splitting of a witness into one-sided localized factors, gluing of chart
witnesses along a partition of unity, translation of witnesses through a
projective-column certificate, and the main entry point that completes a row
over a polynomial or Laurent polynomial ambient in base dimension zero or
one.  Every public routine re-verifies what it returns with exact
arithmetic before handing it back.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .polyring import (
    Ambient,
    PolyValue,
    compose,
    degree_window,
    evaluate,
    high_coeff,
    is_unit_value,
    laurent_ambient,
    low_coeff,
    map_value,
    poly_ambient,
    to_mode,
    unit_inverse_value,
)
from .rings import (
    NotComaximal,
    Payload,
    Ring,
    UnsupportedRing,
    _gcd,
    _pdivmod,
    _pgcd,
    _pmonic,
    _pstrip,
    _radical_int,
    localized,
    squarefree_radical,
)
from .witness import (
    ElementaryOp,
    ElementaryWitness,
    NotAUnit,
    PrincipalIdeal,
    RingMismatch,
    UnimodularRow,
    UnsupportedIdeal,
    VerificationFailed,
    apply_witness,
    complete_unit_first,
    ensure_verifies,
    invert_witness,
    map_witness,
    product_matrix,
    standard_basis_row,
    verify,
)
from .zerodim import (
    NotUnimodular,
    complete_laurent_dim0,
    complete_poly_dim0,
    laurent_to_poly_reduce,
)
from .excision import (
    NotRelative,
    complete_lifted_row,
    descend_witness,
    lift_unimodular,
)


# ---------------------------------------------------------------------------
# errors


class BasepointNotIdentity(Exception):
    """The witness does not act as the identity at the required basepoint."""


class UnsupportedDimension(Exception):
    """The base dimension or row length is outside the supported range."""


class PartitionInvalid(Exception):
    """The supplied scalars do not form a partition of unity."""


class LocalWitnessUnsound(Exception):
    """A supplied chart witness fails verification over its chart."""


class RecursionLimit(Exception):
    """An internal search exhausted its depth or growth budget."""


class ShapeViolation(Exception):
    """An operation mixes coordinates that the translation cannot realize."""


_DESCENT_ROUNDS = 100000
_CHART_DEPTH = 16
_POWER_CAP = 4096


# ---------------------------------------------------------------------------
# op-word utilities


def simplify_ops(ambient: Ambient, ops: Sequence[ElementaryOp]) -> list[ElementaryOp]:
    """Drop zero parameters and merge runs of ops at the same position."""
    zero = ambient.zero()
    out: list[ElementaryOp] = []
    for op in ops:
        if op.lam == zero:
            continue
        if out and out[-1].i == op.i and out[-1].j == op.j:
            lam = ambient.add(out[-1].lam, op.lam)
            out.pop()
            if lam != zero:
                out.append(ElementaryOp(op.i, op.j, lam))
            continue
        out.append(op)
    return out


def _constant_ops(ambient: Ambient,
                  triples: Sequence[tuple[int, int, Payload]]) -> list[ElementaryOp]:
    return [ElementaryOp(i, j, ambient.constant(lam)) for (i, j, lam) in triples]


def _mat_mul(A: Ambient, X: list[list[PolyValue]],
             Y: list[list[PolyValue]]) -> list[list[PolyValue]]:
    n = len(X)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = A.zero()
            for k in range(n):
                acc = A.add(acc, A.mul(X[i][k], Y[k][j]))
            row.append(acc)
        out.append(row)
    return out


def _mat_identity(A: Ambient, n: int) -> list[list[PolyValue]]:
    return [[A.one() if i == j else A.zero() for j in range(n)] for i in range(n)]


def _mat_is_identity(A: Ambient, M: list[list[PolyValue]]) -> bool:
    n = len(M)
    one, zero = A.one(), A.zero()
    for i in range(n):
        for j in range(n):
            if M[i][j] != (one if i == j else zero):
                return False
    return True


def _product_matrix_at(w: ElementaryWitness, point: Payload) -> list[list[Payload]]:
    """The witness product matrix with the variable evaluated at a scalar."""
    ring = w.ambient.ring
    n = w.n
    mat = [[ring.one() if i == j else ring.zero() for j in range(n)] for i in range(n)]
    for op in w.ops:
        lam = evaluate(op.lam, point)
        if ring.is_zero(lam):
            continue
        src = mat[op.j - 1]
        dst = mat[op.i - 1]
        mat[op.i - 1] = [ring.add(d, ring.mul(lam, s)) for d, s in zip(dst, src)]
    return mat


# ---------------------------------------------------------------------------
# exact Gauss descent over computable scalars


def _scalar_norm(ring: Ring, a: Payload) -> int:
    """A Euclid size: zero maps to 0, and division steps strictly shrink it."""
    if ring.is_zero(a):
        return 0
    k = ring.kind
    if k == "int":
        return abs(a)
    if k == "zmod":
        return a
    if k in ("gf", "rat"):
        return 1
    if k in ("poly", "quot"):
        return len(a)
    if k == "loc":
        core, _ = ring._loc_strip(a[0])
        if ring.inner.kind == "int":
            return abs(core)
        return len(core)
    raise UnsupportedRing(f"no scalar descent over kind {k!r}")


def _scalar_divstep(ring: Ring, x: Payload, p: Payload) -> Payload:
    """A multiplier lam with norm(x + lam*p) < norm(p); p must be nonzero."""
    k = ring.kind
    if k == "int":
        pa = abs(p)
        q = x // pa
        return -q if p > 0 else q
    if k == "zmod":
        q = x // p
        return ring.neg(ring.from_int(q))
    if k in ("gf", "rat"):
        return ring.neg(ring.mul(x, ring.unit_inverse(p)))
    if k == "quot":
        q, _ = _pdivmod(ring.base, x, p)
        _, qred = _pdivmod(ring.base, q, ring.modulus)
        return ring.neg(_pstrip(ring.base, qred))
    if k == "poly":
        q, _ = _pdivmod(ring.base, x, p)
        return ring.neg(_pstrip(ring.base, q))
    if k == "loc":
        inner = ring.inner
        mx, _ = ring._loc_strip(x[0])
        mp, _ = ring._loc_strip(p[0])
        ux = ring.divide(x, ring._loc_canon(mx, 0))
        up = ring.divide(p, ring._loc_canon(mp, 0))
        if inner.kind == "int":
            pa = abs(mp)
            qi = mx // pa
            if mp < 0:
                qi = -qi
            q_pay = ring._loc_canon(qi, 0)
        else:
            qi, _ = _pdivmod(inner.base, mx, mp)
            q_pay = ring._loc_canon(_pstrip(inner.base, qi), 0)
        lam = ring.mul(q_pay, ring.mul(ux, ring.unit_inverse(up)))
        return ring.neg(lam)
    raise UnsupportedRing(f"no scalar descent over kind {k!r}")


def scalar_complete_ops(ring: Ring,
                        work: dict[int, Payload]) -> list[tuple[int, int, Payload]]:
    """Op triples carrying the indexed scalar vector to (1, 0, ..., 0).

    Keys of ``work`` are global 1-based positions; the vector is reduced in
    place.  The first (smallest) index receives the 1.  Raises NotUnimodular
    when the entries generate a proper ideal.
    """
    idxs = sorted(work)
    first = idxs[0]
    ops: list[tuple[int, int, Payload]] = []

    def emit(i: int, j: int, lam: Payload) -> None:
        if ring.is_zero(lam):
            return
        ops.append((i, j, lam))
        work[i] = ring.add(work[i], ring.mul(lam, work[j]))

    unit_at: Optional[int] = None
    for _ in range(_DESCENT_ROUNDS):
        for i in idxs:
            if ring.is_unit(work[i]):
                unit_at = i
                break
        if unit_at is not None:
            break
        live = [i for i in idxs if not ring.is_zero(work[i])]
        if not live:
            raise NotUnimodular("scalar vector is zero")
        if len(live) == 1:
            raise NotUnimodular("scalar vector generates a proper ideal")
        pivot = min(live, key=lambda i: _scalar_norm(ring, work[i]))
        for i in live:
            if i == pivot:
                continue
            before = _scalar_norm(ring, work[i])
            emit(i, pivot, _scalar_divstep(ring, work[i], work[pivot]))
            after = _scalar_norm(ring, work[i])
            if after and after >= before:
                raise NotUnimodular("scalar descent cannot shrink the vector")
    if unit_at is None:
        raise RecursionLimit("scalar descent budget exhausted")

    u = work[unit_at]
    uinv = ring.unit_inverse(u)
    if unit_at != first:
        emit(first, unit_at, ring.mul(ring.sub(ring.one(), work[first]), uinv))
        for i in idxs:
            if i != first and not ring.is_zero(work[i]):
                emit(i, first, ring.neg(work[i]))
    else:
        for i in idxs[1:]:
            if not ring.is_zero(work[i]):
                emit(i, first, ring.neg(ring.mul(work[i], uinv)))
        if not ring.is_one(work[first]):
            if len(idxs) < 2:
                raise NotUnimodular("cannot normalize a lone non-identity unit")
            second = idxs[1]
            emit(second, first, uinv)
            emit(first, second, ring.sub(ring.one(), u))
            emit(second, first, ring.neg(ring.one()))
    return ops


def matrix_word_ops(ring: Ring,
                    mat: list[list[Payload]]) -> list[tuple[int, int, Payload]]:
    """Op triples whose elementary product equals the determinant-one matrix."""
    n = len(mat)
    work = [list(row) for row in mat]
    collected: list[tuple[int, int, Payload]] = []

    def apply_row(i: int, j: int, lam: Payload) -> None:
        collected.append((i, j, lam))
        wi, wj = work[i - 1], work[j - 1]
        work[i - 1] = [ring.add(a, ring.mul(lam, b)) for a, b in zip(wi, wj)]

    for k in range(1, n + 1):
        sub = {i: work[i - 1][k - 1] for i in range(k, n + 1)}
        try:
            triples = scalar_complete_ops(ring, sub)
        except NotUnimodular as exc:
            raise NotAUnit(f"column {k} is not reducible: {exc}") from exc
        for (i, j, lam) in triples:
            apply_row(i, j, lam)
        for i in range(1, k):
            v = work[i - 1][k - 1]
            if not ring.is_zero(v):
                apply_row(i, k, ring.neg(v))
    for i in range(n):
        for j in range(n):
            expect = ring.one() if i == j else ring.zero()
            if not ring.eq(work[i][j], expect):
                raise NotAUnit("matrix does not reduce to the identity")
    return [(i, j, ring.neg(lam)) for (i, j, lam) in reversed(collected)]


# ---------------------------------------------------------------------------
# scalar and value transport between a base ring and its localizations


def _scalar_into(src: Ring, dst: Ring, a: Payload) -> Optional[Payload]:
    """Move a scalar into dst exactly, or None when it does not land there.

    Supported directions: identity, localization to its base (denominator
    must cancel), base into a localization, and localization to localization
    over the same base (the reduced denominator must divide a multiplier
    power of the destination).
    """
    if src == dst:
        return a
    if src.kind == "loc":
        base = src.inner
        num, e = a
        den = base.pow(src.mult, e)
    else:
        base = src
        num, den = a, src.one()
    if dst == base:
        return base.divide(num, den)
    if dst.kind == "loc" and dst.inner == base:
        if base.is_zero(num):
            return (base.zero(), 0)
        g = dst._inner_gcd(num, den)
        while not base.is_unit(g):
            num = base.divide(num, g)
            den = base.divide(den, g)
            g = dst._inner_gcd(num, den)
        m, r = dst._loc_strip(den)
        minv = base.unit_inverse(m)
        if minv is None:
            return None
        c, K = dst._loc_clear(r)
        return dst._loc_canon(base.mul(base.mul(num, minv), c), K)
    return None


def _value_into(v: PolyValue, dst: Ambient) -> Optional[PolyValue]:
    """Transport a polynomial value coefficientwise; None if any coefficient
    fails to land in the destination ring."""
    src = v.ambient.ring
    out = dst.zero()
    for e, cof in v.terms():
        c2 = _scalar_into(src, dst.ring, cof)
        if c2 is None:
            return None
        out = dst.add(out, dst.monomial(c2, e))
    return out


def _divide_value_by_scalar(v: PolyValue, c: Payload) -> Optional[PolyValue]:
    ring = v.ambient.ring
    out = v.ambient.zero()
    for e, cof in v.terms():
        q = ring.divide(cof, c)
        if q is None:
            return None
        out = v.ambient.add(out, v.ambient.monomial(q, e))
    return out


def _divide_by_linear(v: PolyValue, b: Payload) -> Optional[PolyValue]:
    """Exact quotient of a poly-mode value by (X - b), or None."""
    A = v.ambient
    ring = A.ring
    lo, hi = degree_window(v)
    if v == A.zero():
        return A.zero()
    if lo < 0:
        return None
    coeffs = [v.coeff_at(e) for e in range(hi + 1)]
    out = [ring.zero()] * max(0, hi)
    acc = ring.zero()
    for e in range(hi, 0, -1):
        acc = coeffs[e] if ring.is_zero(acc) else ring.add(coeffs[e], ring.mul(acc, b))
        out[e - 1] = acc
    rem = ring.add(coeffs[0], ring.mul(acc, b)) if hi > 0 else coeffs[0]
    if not ring.is_zero(rem):
        return None
    q = A.zero()
    for e, cof in enumerate(out):
        q = A.add(q, A.monomial(cof, e))
    return q


# ---------------------------------------------------------------------------
# telescopes: writing a witness as conjugated one-parameter atoms


@dataclass
class _Atom:
    """One conjugated elementary factor C * E(pos; delta) * C^-1."""

    pos: tuple[int, int]
    delta: PolyValue
    col: list[PolyValue]
    row: list[PolyValue]
    dual: list[PolyValue]


def _basepoint_atoms(w: ElementaryWitness, b: Payload) -> list[_Atom]:
    """Telescope a witness with constant conjugators taken at basepoint b.

    The product matrix factors as the product, last atom leftmost, of
    C_i E(kappa_i) C_i^-1 where kappa_i is the op parameter minus its value
    at b and C_i collects the later ops evaluated at b.  The witness must
    evaluate to the identity at b (else BasepointNotIdentity).
    """
    A = w.ambient
    ring = A.ring
    n = w.n
    C = [[ring.one() if i == j else ring.zero() for j in range(n)] for i in range(n)]
    Ci = [[ring.one() if i == j else ring.zero() for j in range(n)] for i in range(n)]
    rev: list[_Atom] = []
    for op in reversed(w.ops):
        hat = evaluate(op.lam, b)
        kappa = A.sub(op.lam, A.constant(hat))
        if kappa != A.zero():
            p, q = op.i - 1, op.j - 1
            rev.append(_Atom(
                (op.i, op.j), kappa,
                col=[A.constant(C[r][p]) for r in range(n)],
                row=[A.constant(Ci[q][c]) for c in range(n)],
                dual=[A.constant(Ci[p][c]) for c in range(n)],
            ))
        if not ring.is_zero(hat):
            p, q = op.i - 1, op.j - 1
            for r in range(n):
                C[r][q] = ring.add(C[r][q], ring.mul(hat, C[r][p]))
            nh = ring.neg(hat)
            Ci[p] = [ring.add(Ci[p][c], ring.mul(nh, Ci[q][c])) for c in range(n)]
    for i in range(n):
        for j in range(n):
            expect = ring.one() if i == j else ring.zero()
            if not ring.eq(C[i][j], expect):
                raise BasepointNotIdentity(
                    "witness does not evaluate to the identity at the basepoint")
    rev.reverse()
    return rev


def _substitution_atoms(w: ElementaryWitness, c: Payload) -> list[_Atom]:
    """Telescope of PM(w at cX)^-1 * PM(w at X) with polynomial conjugators.

    Atom j carries delta_j = lam_j(X) - lam_j(cX) conjugated by the prefix
    G_j = M_1(cX)^-1 ... M_{j-1}(cX)^-1; the factored product, last atom
    leftmost, equals PM(w at cX)^-1 * PM(w at X) exactly.
    """
    A = w.ambient
    n = w.n
    sub = A.monomial(c, 1)
    G = _mat_identity(A, n)
    Gi = _mat_identity(A, n)
    atoms: list[_Atom] = []
    for op in w.ops:
        lam_c = compose(op.lam, sub)
        delta = A.sub(op.lam, lam_c)
        p, q = op.i - 1, op.j - 1
        if delta != A.zero():
            atoms.append(_Atom(
                (op.i, op.j), delta,
                col=[G[r][p] for r in range(n)],
                row=list(Gi[q]),
                dual=list(Gi[p]),
            ))
        if lam_c != A.zero():
            neg = A.neg(lam_c)
            for r in range(n):
                G[r][q] = A.add(G[r][q], A.mul(neg, G[r][p]))
            Gi[p] = [A.add(Gi[p][c2], A.mul(lam_c, Gi[q][c2])) for c2 in range(n)]
    return atoms


def _atom_shear_ops(A: Ambient, dst: Ambient, atom: _Atom,
                    d1: PolyValue, d2: PolyValue) -> Optional[list[ElementaryOp]]:
    """Elementary ops over dst whose product is C * E(pos; d1*d2) * C^-1.

    The conjugated atom equals I + u * delta * w with u the conjugator column
    at the target position, w the inverse-conjugator row at the source
    position (so w.u = 0), and dual the inverse-conjugator row pairing to 1
    with u.  Expanding w against dual splits the factor into rank-one pieces
    supported on coordinate pairs; each piece is two shears per spare
    coordinate plus an eight-op commutator, with the factors d1, d2 of delta
    distributed so every parameter clears its denominators into dst.
    Returns None when some parameter does not land in dst.
    """
    u, wrow, dual = atom.col, atom.row, atom.dual
    n = len(u)
    delta = A.mul(d1, d2)
    zero = A.zero()
    if delta == zero:
        return []
    ops: list[ElementaryOp] = []

    def put(i0: int, j0: int, lam: PolyValue) -> bool:
        if lam == zero:
            return True
        moved = _value_into(lam, dst)
        if moved is None:
            return False
        ops.append(ElementaryOp(i0 + 1, j0 + 1, moved))
        return True

    for i0 in range(n):
        for j0 in range(i0 + 1, n):
            ctil = A.sub(A.mul(wrow[i0], dual[j0]), A.mul(wrow[j0], dual[i0]))
            if ctil == zero:
                continue
            r0i = A.mul(ctil, u[j0])
            r0j = A.neg(A.mul(ctil, u[i0]))
            if u[i0] != zero or u[j0] != zero:
                l = next(k for k in range(n) if k not in (i0, j0))
                vi, vj = A.mul(d2, r0i), A.mul(d2, r0j)
                ui, uj = A.mul(d1, u[i0]), A.mul(d1, u[j0])
                good = (
                    put(l, i0, A.neg(vi)) and put(l, j0, A.neg(vj))
                    and put(i0, l, A.neg(ui)) and put(j0, l, A.neg(uj))
                    and put(l, i0, vi) and put(l, j0, vj)
                    and put(i0, l, ui) and put(j0, l, uj)
                )
                if not good:
                    return None
            for k in range(n):
                if k in (i0, j0) or u[k] == zero:
                    continue
                full = A.mul(u[k], delta)
                if not (put(k, i0, A.mul(full, A.mul(ctil, u[j0])))
                        and put(k, j0, A.neg(A.mul(full, A.mul(ctil, u[i0]))))):
                    return None
    return ops


# ---------------------------------------------------------------------------
# basepoint splitting into one-sided localized factors


def _identity_congruent(A: Ambient, M: list[list[PolyValue]],
                        factor: Payload, b: Payload) -> bool:
    """Entries congruent to the identity modulo factor * (X - b)."""
    ring = A.ring
    n = len(M)
    for i in range(n):
        for j in range(n):
            d = A.sub(M[i][j], A.one() if i == j else A.zero())
            if d == A.zero():
                continue
            q = _divide_by_linear(d, b)
            if q is None:
                return False
            if _divide_value_by_scalar(q, factor) is None:
                return False
    return True


def _alpha_leg_ops(src: Ambient, atoms: list[_Atom], c_src: Payload,
                   tN: Payload, tN1: Payload, tN2: Payload,
                   dst: Ambient) -> Optional[list[ElementaryOp]]:
    """Rebuild basepoint atoms substituted along X -> c*X, clearing the
    foreign denominators with the carried powers; None when some parameter
    does not land in dst."""
    ops: list[ElementaryOp] = []
    for atom in atoms:
        delta = compose(atom.delta, src.monomial(c_src, 1))
        if delta == src.zero():
            continue
        eta = _divide_value_by_scalar(delta, tN)
        if eta is None:
            return None
        block = _atom_shear_ops(
            src, dst, _Atom(atom.pos, delta, atom.col, atom.row, atom.dual),
            src.constant(tN1), src.scale(eta, tN2))
        if block is None:
            return None
        ops.extend(block)
    return ops


def _beta_leg_ops(src: Ambient, w: ElementaryWitness, c_src: Payload,
                  one_minus_c: Payload, d1_scalar: Payload, sN2: Payload,
                  dst: Ambient) -> Optional[list[ElementaryOp]]:
    """Rebuild the difference telescope PM(w at cX)^-1 * PM(w at X) with
    parameters divisible by 1 - c, cleared into dst; None on failure."""
    ops: list[ElementaryOp] = []
    for atom in _substitution_atoms(w, c_src):
        eta = _divide_value_by_scalar(atom.delta, one_minus_c)
        if eta is None:
            return None
        block = _atom_shear_ops(src, dst, atom,
                                src.constant(d1_scalar), src.scale(eta, sN2))
        if block is None:
            return None
        ops.extend(block)
    return ops


def quillen_split(sigma: ElementaryWitness, s: Payload, t: Payload,
                  cap: int = 16384) -> tuple[ElementaryWitness, ElementaryWitness]:
    """Split a basepoint-trivial witness into one-sided localized factors.

    The witness lives over a ring where both s and t are invertible (or over
    the base itself); it must evaluate to the identity at the basepoint 0.
    Returns (alpha, beta) with alpha a witness over the s-localization whose
    product matrix is congruent to the identity mod t*(X), beta a witness
    over the t-localization congruent to the identity mod s*(X), and the
    product matrices composing exactly back to sigma's over the common ring.

    Built by travelling X to c*X with c = mu * t^N and 1 = lambda*s^N +
    mu*t^N: alpha re-expresses the substituted witness, beta the difference
    leg, and each conjugated atom is re-factored into shears whose
    parameters carry enough of s^N or t^N to clear the foreign denominators.
    N doubles until every parameter lands; the cap raises RecursionLimit.
    """
    A = sigma.ambient
    if A.mode != "poly":
        raise UnsupportedRing(
            "basepoint splitting requires the polynomial mode: no Laurent "
            "substitution fixes the basepoint")
    ring = A.ring
    n = sigma.n
    if n < 3:
        raise UnsupportedDimension("splitting needs at least three coordinates")
    base = ring.inner if ring.kind == "loc" else ring
    g, _, _ = base.bezout(s, t)
    if base.unit_inverse(g) is None:
        raise NotComaximal("the two localizing scalars are not comaximal")
    atoms_a = _basepoint_atoms(sigma, ring.zero())
    Rs = localized(base, s)
    Rt = localized(base, t)
    As = poly_ambient(Rs)
    At = poly_ambient(Rt)

    N = 1
    while N <= cap:
        gN, xN, yN = base.bezout(base.pow(s, N), base.pow(t, N))
        giN = base.unit_inverse(gN)
        if giN is None:
            raise NotComaximal("power combination failed for comaximal scalars")
        lam_sc = base.mul(xN, giN)
        mu_sc = base.mul(yN, giN)
        c_base = base.mul(mu_sc, base.pow(t, N))
        c_ring = _scalar_into(base, ring, c_base)
        N1 = (N + 1) // 2
        N2 = N - N1

        alpha_ops = _alpha_leg_ops(
            A, atoms_a, c_ring,
            _scalar_into(base, ring, base.pow(t, N)),
            _scalar_into(base, ring, base.pow(t, N1)),
            _scalar_into(base, ring, base.pow(t, N2)), As)
        beta_ops = None
        if alpha_ops is not None:
            beta_ops = _beta_leg_ops(
                A, sigma, c_ring, ring.sub(ring.one(), c_ring),
                _scalar_into(base, ring, base.mul(lam_sc, base.pow(s, N1))),
                _scalar_into(base, ring, base.pow(s, N2)), At)
        if alpha_ops is not None and beta_ops is not None:
            alpha = ElementaryWitness(As, n, simplify_ops(As, alpha_ops))
            beta = ElementaryWitness(At, n, simplify_ops(At, beta_ops))
            if _split_posts_hold(sigma, alpha, beta, s, t, base):
                return alpha, beta
        N *= 2
    raise RecursionLimit("no power cleared the denominators before the cap")


def _split_posts_hold(sigma: ElementaryWitness, alpha: ElementaryWitness,
                      beta: ElementaryWitness, s: Payload, t: Payload,
                      base: Ring) -> bool:
    A = sigma.ambient
    ring = A.ring
    n = sigma.n
    s_in_t = _scalar_into(base, beta.ambient.ring, s)
    t_in_s = _scalar_into(base, alpha.ambient.ring, t)
    if not _identity_congruent(alpha.ambient, product_matrix(alpha), t_in_s,
                               alpha.ambient.ring.zero()):
        return False
    if not _identity_congruent(beta.ambient, product_matrix(beta), s_in_t,
                               beta.ambient.ring.zero()):
        return False
    a_st = [_value_into(op.lam, A) for op in alpha.ops]
    b_st = [_value_into(op.lam, A) for op in beta.ops]
    if any(v is None for v in a_st) or any(v is None for v in b_st):
        return False
    ops = [ElementaryOp(op.i, op.j, v) for op, v in zip(beta.ops, b_st)]
    ops += [ElementaryOp(op.i, op.j, v) for op, v in zip(alpha.ops, a_st)]
    merged = ElementaryWitness(A, n, ops)
    lhs = product_matrix(merged)
    rhs = product_matrix(sigma)
    return lhs == rhs


# ---------------------------------------------------------------------------
# gluing chart completions along a pair of comaximal scalars


def _carrier_witness(w: ElementaryWitness) -> ElementaryWitness:
    """Witness whose product matrix is PM(w)^-1 * PM(w at X=0).

    Evaluates to the identity at the basepoint, and carries the constant
    vector row(0) back to row whenever w completes row.
    """
    A = w.ambient
    zero = A.ring.zero()
    ops = [ElementaryOp(op.i, op.j, A.constant(evaluate(op.lam, zero)))
           for op in w.ops]
    ops.extend(invert_witness(w).ops)
    return ElementaryWitness(A, w.n, ops)


def _glue_pair(v: UnimodularRow, s: Payload, t: Payload,
               w_s: ElementaryWitness, w_t: ElementaryWitness,
               cap: int = 16384) -> ElementaryWitness:
    """Merge completions over the s- and t-localizations into one over the base.

    v lives over B[X] with s + t-type comaximality in B; w_s completes the
    image of v over localized(B, s)[X] and w_t over localized(B, t)[X].  Each
    chart carrier PM^-1 * PM(0) moves v(0) to v; travelling X to c*X with
    c = mu * t^N makes the t-chart leg integral over B, the difference leg on
    the s-chart likewise, and their product is a B-integral carrier.  The
    result is that carrier inverted, followed by a scalar completion of v(0).
    """
    A = v.ambient
    if A.mode != "poly":
        raise UnsupportedRing("chart gluing runs in the polynomial mode")
    B = A.ring
    n = len(v.entries)
    if n < 3:
        raise UnsupportedDimension("chart gluing needs at least three coordinates")
    Bs = localized(B, s)
    Bt = localized(B, t)
    if w_s.ambient != poly_ambient(Bs) or w_t.ambient != poly_ambient(Bt):
        raise RingMismatch("chart witnesses must live over the two localizations")
    if w_s.n != n or w_t.n != n:
        raise ShapeViolation("chart witnesses must match the row length")
    g, _, _ = B.bezout(s, t)
    if B.unit_inverse(g) is None:
        raise NotComaximal("the chart scalars are not comaximal")
    At = w_t.ambient
    As = w_s.ambient
    eps_t = _carrier_witness(w_t)
    eps_s_inv = invert_witness(_carrier_witness(w_s))
    atoms_t = _basepoint_atoms(eps_t, Bt.zero())
    v0 = [A.constant(evaluate(e, B.zero())) for e in v.entries]
    row0 = UnimodularRow(A, v0)

    N = 1
    while N <= cap:
        gN, xN, yN = B.bezout(B.pow(s, N), B.pow(t, N))
        giN = B.unit_inverse(gN)
        if giN is None:
            raise NotComaximal("power combination failed for comaximal scalars")
        lam_sc = B.mul(xN, giN)
        mu_sc = B.mul(yN, giN)
        c_B = B.mul(mu_sc, B.pow(t, N))
        N1 = (N + 1) // 2
        N2 = N - N1

        leg1 = _alpha_leg_ops(
            At, atoms_t, _scalar_into(B, Bt, c_B),
            _scalar_into(B, Bt, B.pow(t, N)),
            _scalar_into(B, Bt, B.pow(t, N1)),
            _scalar_into(B, Bt, B.pow(t, N2)), A)
        leg2 = None
        if leg1 is not None:
            c_s = _scalar_into(B, Bs, c_B)
            leg2 = _beta_leg_ops(
                As, eps_s_inv, c_s, Bs.sub(Bs.one(), c_s),
                _scalar_into(B, Bs, B.mul(lam_sc, B.pow(s, N1))),
                _scalar_into(B, Bs, B.pow(s, N2)), A)
        if leg1 is not None and leg2 is not None:
            carrier_ops = list(leg1)
            carrier_ops.extend(
                invert_witness(ElementaryWitness(A, n, leg2)).ops)
            G = ElementaryWitness(A, n, simplify_ops(A, carrier_ops))
            if apply_witness(G, row0).entries == v.entries:
                work = {i + 1: evaluate(e, B.zero())
                        for i, e in enumerate(v.entries)}
                final = list(invert_witness(G).ops)
                final.extend(_constant_ops(A, scalar_complete_ops(B, work)))
                w = ElementaryWitness(A, n, simplify_ops(A, final))
                ensure_verifies(w, v, standard_basis_row(A, n))
                return w
        N *= 2
    raise RecursionLimit("no power cleared the denominators before the cap")


# ---------------------------------------------------------------------------
# completion relative to a principal scalar ideal


def _core_scalar(B: Ring, a: Payload) -> Payload:
    """Generator of (a) inside the Euclidean core, multiplier part stripped."""
    if B.kind == "loc":
        num, _ = a
        core, _ = B._loc_strip(num)
    else:
        core = a
    if B.kind == "loc":
        R0 = B.inner
    else:
        R0 = B
    if R0.kind == "int" and core < 0:
        core = -core
    return core


def _exact_divide_value(num: PolyValue, den: PolyValue) -> Optional[PolyValue]:
    """Exact quotient num/den over a domain, poly or Laurent mode."""
    A = num.ambient
    ring = A.ring
    if num == A.zero():
        return A.zero()
    if den == A.zero():
        return None
    nlo, nhi = degree_window(num)
    dlo, dhi = degree_window(den)
    if A.mode == "poly" and nlo < dlo:
        return None
    ncof = [num.coeff_at(e) for e in range(nlo, nhi + 1)]
    dcof = [den.coeff_at(e) for e in range(dlo, dhi + 1)]
    qlen = len(ncof) - len(dcof) + 1
    if qlen <= 0:
        return None
    rem = list(ncof)
    qco = [ring.zero()] * qlen
    for k in range(qlen - 1, -1, -1):
        c = ring.divide(rem[k + len(dcof) - 1], dcof[-1])
        if c is None:
            return None
        qco[k] = c
        if not ring.is_zero(c):
            for i in range(len(dcof)):
                rem[k + i] = ring.sub(rem[k + i], ring.mul(c, dcof[i]))
    if any(not ring.is_zero(x) for x in rem):
        return None
    out = A.zero()
    for k, c in enumerate(qco):
        if not ring.is_zero(c):
            out = A.add(out, A.monomial(c, k + nlo - dlo))
    return out


def _matrix_word_dim0(amb: Ambient, mat: list[list[PolyValue]]) -> list[tuple[int, int, PolyValue]]:
    """Row operations reducing a determinant-one matrix over a
    zero-dimensional base to the identity; PM(result) * mat = identity."""
    m = len(mat)
    work = [list(r) for r in mat]
    out: list[tuple[int, int, PolyValue]] = []
    completer = complete_poly_dim0 if amb.mode == "poly" else complete_laurent_dim0

    def step(i: int, j: int, lam: PolyValue) -> None:
        if lam == amb.zero():
            return
        out.append((i + 1, j + 1, lam))
        work[i] = [amb.add(work[i][c], amb.mul(lam, work[j][c])) for c in range(m)]

    for k in range(m - 1):
        col = [work[r][k] for r in range(k, m)]
        try:
            w = completer(UnimodularRow(amb, col))
        except NotUnimodular as exc:
            raise NotAUnit("matrix column is not completable") from exc
        for op in w.ops:
            step(op.i - 1 + k, op.j - 1 + k, op.lam)
    if work[m - 1][m - 1] != amb.one():
        raise NotAUnit("matrix does not have determinant one")
    for i in range(m - 1):
        for j in range(i + 1, m):
            u = work[i][j]
            if u != amb.zero():
                step(i, j, amb.neg(u))
    ident = _mat_identity(amb, m)
    if work != ident:
        raise NotAUnit("matrix reduction did not reach the identity")
    return out


def _jac_machine(row: UnimodularRow, a: Payload,
                 repair: bool) -> tuple[Payload, ElementaryWitness]:
    """Complete a row congruent to e1 mod the scalar (a) over R[X] or the
    Laurent ambient, localizing at a multiplier congruent to 1 mod (a).

    Returns (sigma, witness): sigma is an element of the base ring congruent
    to 1 modulo (a), and the witness lives over the sigma-localization and
    carries the transported row to e1.  When sigma is a unit the witness
    ambient is the original ring.  With repair=True the product matrix is
    additionally congruent to the identity modulo (a).

    Strategy: the first entry f satisfies f = 1 + a*H, so a is invertible
    modulo f with explicit inverse -H.  The remaining entries are completed
    over K[X]/(f-made-monic) with K the fraction field of the core; each
    operation parameter is lifted by splitting its denominator into a power
    of a (replaced by powers of -H), and a part coprime to a whose Bezout
    cofactor against a supplies a localizing factor in 1 + aR.  Drift from
    lifting is removed by exact division by f, and the unit gadget closes.
    """
    A = row.ambient
    B = A.ring
    n = len(row)
    if n < 3:
        raise UnsupportedDimension("relative completion needs at least three entries")
    if B.is_unit(a) or B.is_zero(a):
        raise UnsupportedIdeal("congruence scalar must be a nonzero non-unit")
    one = A.one()
    for idx, ent in enumerate(row.entries):
        d = A.sub(ent, one) if idx == 0 else ent
        for _, cof in d.terms():
            if B.divide(cof, a) is None:
                raise NotRelative("row is not congruent to the standard basis row")
    R0 = B.inner if B.kind == "loc" else B
    a0 = _core_scalar(B, a)
    f = row.entries[0]
    lo, hi = degree_window(f)
    sig_acc = [R0.one()]

    def collect(d: Payload) -> None:
        if R0.is_unit(d):
            return
        g, _, _ = R0.bezout(d, a0)
        if R0.unit_inverse(g) is None:
            raise UnsupportedRing(
                "denominator shares a factor with the congruence scalar")
        # only the prime support of d matters for the localization; strip
        # factors already present, then compress what is new to its radical
        dd = d
        while True:
            h = _base_gcd(R0, dd, sig_acc[0])
            if R0.is_unit(h):
                break
            dd = R0.divide(dd, h)
        if R0.is_unit(dd):
            return
        sig_acc[0] = R0.mul(sig_acc[0], _support_radical(R0, dd))

    def as_frac(c: Payload):
        if B.kind == "loc":
            num, e = c
            return _fr(R0, num, R0.pow(B.mult, e))
        return _fr(R0, c, R0.one())

    def coeff_core(c: Payload) -> Payload:
        if B.kind == "loc":
            m, _ = B._loc_strip(c[0])
            return m
        return c

    prepared: list[tuple[int, int, list, Payload, int, Payload]] = []
    constant = lo == 0 and hi == 0
    if not constant:
        c0 = R0.zero()
        for _, cof in f.terms():
            c0 = _base_gcd(R0, c0, coeff_core(cof))
        collect(c0)
        if A.mode == "poly":
            fk = _kp_norm(R0, [as_frac(f.coeff_at(e)) for e in range(hi + 1)])
        else:
            fk = _kp_norm(R0, [as_frac(f.coeff_at(e)) for e in range(lo, hi + 1)])
        ftil = _kp_monic(R0, fk)
        xinv = None
        if A.mode == "laurent":
            gx, xi, _ = _kp_egcd(R0, [_fr_zero(R0), _fr_one(R0)], ftil)
            if len(gx) != 1:
                raise NotUnimodular("variable is not invertible in the quotient")
            xinv = _kp_mod(R0, _kp_scale(R0, xi, _fr_inv(R0, gx[0])), ftil)

        def to_quotient(v: PolyValue) -> list:
            acc: list = []
            for e, cof in v.terms():
                if e >= 0:
                    term = [_fr_zero(R0)] * e + [as_frac(cof)]
                else:
                    term = _kp_scale(R0, _kp_pow_mod(R0, xinv, -e, ftil), as_frac(cof))
                acc = _kp_add(R0, acc, _kp_mod(R0, term, ftil))
            return _kp_mod(R0, acc, ftil)

        xs = [to_quotient(v) for v in row.entries[1:]]
        rel_ops = _artinian_subrow_ops(R0, ftil, xs)

        def split_denominator(d: Payload) -> tuple[Payload, int, Payload]:
            da = R0.one()
            rest = d
            while True:
                g = _base_gcd(R0, rest, a0)
                if R0.is_unit(g):
                    break
                rest = R0.divide(rest, g)
                da = R0.mul(da, g)
            k = 0
            t = R0.one()
            while k <= 512:
                q = R0.divide(t, da)
                if q is not None:
                    return q, k, rest
                t = R0.mul(t, a0)
                k += 1
            raise RecursionLimit("a-part of a denominator did not resolve")

        for (p, q, lam) in rel_ops:
            dd = R0.one()
            for (_, den) in lam:
                g = _base_gcd(R0, dd, den)
                dd = R0.mul(R0.divide(dd, g), den)
            pcoeffs = [R0.mul(numr, R0.divide(dd, den)) for (numr, den) in lam]
            z, k, rest = split_denominator(dd)
            if B.kind == "loc":
                strippable, _ = B._loc_strip(rest)
            else:
                strippable = rest
            collect(strippable)
            prepared.append((p, q, pcoeffs, z, k, rest))
    else:
        collect(_core_scalar(B, f.coeff_at(0)))

    sigma0 = R0.one()
    for s in collected:
        sigma0 = R0.mul(sigma0, s)
    sigma_B = _scalar_into(R0, B, sigma0)
    B_out = localized(B, sigma_B)
    A_out = poly_ambient(B_out) if A.mode == "poly" else laurent_ambient(B_out)
    work = []
    for v in row.entries:
        moved = _value_into(v, A_out)
        if moved is None:
            raise UnsupportedRing("row does not transport into the localization")
        work.append(moved)
    f_out = work[0]
    ops_out: list[ElementaryOp] = []

    def emit(i: int, j: int, lam: PolyValue) -> None:
        if lam == A_out.zero():
            return
        ops_out.append(ElementaryOp(i, j, lam))
        work[i - 1] = A_out.add(work[i - 1], A_out.mul(lam, work[j - 1]))

    if not constant:
        hval = A.zero()
        for e, cof in A.sub(f, one).terms():
            hval = A.add(hval, A.monomial(B.divide(cof, a), e))
        neg_h = A_out.neg(_value_into(hval, A_out))
        for (p, q, pcoeffs, z, k, rest) in prepared:
            val = A_out.zero()
            for e, c in enumerate(pcoeffs):
                if not R0.is_zero(c):
                    val = A_out.add(val, A_out.monomial(_scalar_into(R0, B_out, c), e))
            val = A_out.scale(val, _scalar_into(R0, B_out, z))
            if k:
                val = A_out.mul(val, A_out.pow(neg_h, k))
            rinv = B_out.unit_inverse(_scalar_into(R0, B_out, rest))
            if rinv is None:
                raise UnsupportedRing("collected localization missed a denominator")
            emit(p + 2, q + 2, A_out.scale(val, rinv))
        for j in range(2, n + 1):
            target = A_out.one() if j == 2 else A_out.zero()
            diff = A_out.sub(work[j - 1], target)
            if diff != A_out.zero():
                dq = _exact_divide_value(diff, f_out)
                if dq is None:
                    raise VerificationFailed("drift is not a multiple of the first entry")
                emit(j, 1, A_out.neg(dq))
        emit(1, 2, A_out.sub(A_out.one(), f_out))
        emit(2, 1, A_out.neg(A_out.one()))
    else:
        finv = unit_inverse_value(f_out)
        if finv is None:
            raise UnsupportedRing("constant first entry failed to become a unit")
        for j in range(2, n + 1):
            cur = work[j - 1]
            if cur != A_out.zero():
                emit(j, 1, A_out.neg(A_out.mul(cur, finv)))
        for op in complete_unit_first(f_out, n).ops:
            emit(op.i, op.j, op.lam)

    expect = [A_out.one()] + [A_out.zero()] * (n - 1)
    if work != expect:
        raise VerificationFailed("relative completion did not reach e1")
    if repair:
        ops_out = ops_out + _identity_repair_ops(A_out, n, ops_out, a0, R0)
    return sigma_B, ElementaryWitness(A_out, n, ops_out)


def _identity_repair_ops(A_out: Ambient, n: int, ops: list[ElementaryOp],
                         a0: Payload, R0: Ring) -> list[ElementaryOp]:
    """Ops fixing e1 exactly whose product matrix is congruent, modulo the
    scalar (a0), to the inverse of the given word's product matrix."""
    B_out = A_out.ring
    Q, proj0, sect0 = R0.quotient_by_principal(a0)
    if B_out.kind == "loc":
        mlt = B_out.mult
        mq = Q.unit_inverse(proj0(mlt))
        if mq is None:
            raise UnsupportedRing("multiplier is not invertible modulo the scalar")

        def projB(c: Payload) -> Payload:
            num, e = c
            return Q.mul(proj0(num), Q.pow(mq, e))
    else:
        def projB(c: Payload) -> Payload:
            return proj0(c)

    def sectB(c: Payload) -> Payload:
        return _scalar_into(R0, B_out, sect0(c))

    Qamb = poly_ambient(Q) if A_out.mode == "poly" else laurent_ambient(Q)
    w = ElementaryWitness(A_out, n, ops)
    minv_full = product_matrix(invert_witness(w))
    minv = [[map_value(v, projB, Q, A_out.mode) for v in r] for r in minv_full]
    for i in range(n):
        want = Qamb.one() if i == 0 else Qamb.zero()
        if minv[i][0] != want:
            raise VerificationFailed("witness does not fix e1 modulo the scalar")
    out: list[ElementaryOp] = []
    for j in range(1, n):
        lam = minv[0][j]
        if lam != Qamb.zero():
            out.append(ElementaryOp(1, j + 1, map_value(lam, sectB, B_out, A_out.mode)))
    abar = [[minv[i][j] for j in range(1, n)] for i in range(1, n)]
    word = _matrix_word_dim0(Qamb, abar)
    for (i, j, lam) in reversed(word):
        out.append(ElementaryOp(i + 1, j + 1,
                                map_value(Qamb.neg(lam), sectB, B_out, A_out.mode)))
    return out


def complete_relative_jacobson(row: UnimodularRow,
                               relative: PrincipalIdeal) -> ElementaryWitness:
    """Complete a row congruent to e1 modulo a principal scalar ideal, with
    a witness whose product matrix is the identity modulo that ideal.

    Dimension-zero base rings route through the double-ring construction;
    one-dimensional Euclidean domains run the localization machine and
    succeed when the collected multiplier is a unit.  The returned witness
    carries the ideal and re-verifies before returning.
    """
    A = row.ambient
    B = A.ring
    n = len(row)
    gen = relative.gen
    if relative.ambient != A:
        raise RingMismatch("ideal lives over a different ambient")
    if gen != A.zero() and degree_window(gen) != (0, 0):
        raise UnsupportedIdeal("relative completion expects a scalar generator")
    if n < max(3, B.dim() + 2):
        raise UnsupportedDimension("row too short for relative completion")
    target = standard_basis_row(A, n)
    for idx, ent in enumerate(row.entries):
        d = A.sub(ent, A.one()) if idx == 0 else ent
        if not relative.contains(d):
            raise NotRelative("row is not congruent to the standard basis row")
    if gen == A.zero():
        w = ElementaryWitness(A, n, [], relative=relative)
        ensure_verifies(w, row, target)
        return w
    g0 = gen.coeff_at(0)
    if B.is_unit(g0):
        raise UnsupportedIdeal("relative completion modulo the unit ideal is vacuous")
    if B.dim() == 0:
        lifted = lift_unimodular(row, g0)
        wx = complete_lifted_row(lifted)
        down = descend_witness(wx, lifted)
        w = ElementaryWitness(A, n, down.ops, relative=relative)
        ensure_verifies(w, row, target)
        return w
    if not B.is_domain():
        raise UnsupportedRing("one-dimensional relative completion needs a domain")
    sigma_B, w0 = _jac_machine(row, g0, repair=True)
    if not B.is_unit(sigma_B):
        raise UnsupportedRing(
            "completion requires inverting a non-unit multiplier congruent to "
            "1 modulo the ideal; no witness over the original ring was found")
    if w0.ambient != A:
        moved = []
        for op in w0.ops:
            v = _value_into(op.lam, A)
            if v is None:
                raise UnsupportedRing("witness did not transport back")
            moved.append(ElementaryOp(op.i, op.j, v))
        w0 = ElementaryWitness(A, n, moved)
    w = ElementaryWitness(A, n, w0.ops, relative=relative)
    ensure_verifies(w, row, target)
    return w


# ---------------------------------------------------------------------------
# exact fractions over a Euclidean base and polynomials over that fraction
# field; used to finish completions inside a quotient by one row entry


def _base_gcd(B: Ring, a: Payload, b: Payload) -> Payload:
    if B.kind == "int":
        return _gcd(a, b)
    return _pgcd(B.base, a, b)


def _base_unitize(B: Ring, den: Payload) -> tuple[Payload, Payload]:
    """Factor den = unit * canonical with canonical positive or monic.

    Returns (cofactor, canonical) where canonical = cofactor * den."""
    if B.kind == "int":
        if den < 0:
            return -1, -den
        return 1, den
    inv = B.base.unit_inverse(den[-1])
    return (inv,), tuple(B.base.mul(inv, c) for c in den)


def _fr(B: Ring, num: Payload, den: Payload) -> tuple[Payload, Payload]:
    """Canonical fraction num/den over the Euclidean base B."""
    if B.is_zero(num):
        return B.zero(), B.one()
    g = _base_gcd(B, num, den)
    if not B.is_unit(g):
        num = B.divide(num, g)
        den = B.divide(den, g)
    w, den = _base_unitize(B, den)
    return B.mul(num, w), den


def _fr_zero(B: Ring) -> tuple[Payload, Payload]:
    return B.zero(), B.one()


def _fr_one(B: Ring) -> tuple[Payload, Payload]:
    return B.one(), B.one()


def _fr_is_zero(B: Ring, a: tuple[Payload, Payload]) -> bool:
    return B.is_zero(a[0])


def _fr_add(B: Ring, a, b):
    return _fr(B, B.add(B.mul(a[0], b[1]), B.mul(b[0], a[1])), B.mul(a[1], b[1]))


def _fr_neg(B: Ring, a):
    return B.neg(a[0]), a[1]


def _fr_sub(B: Ring, a, b):
    return _fr_add(B, a, _fr_neg(B, b))


def _fr_mul(B: Ring, a, b):
    return _fr(B, B.mul(a[0], b[0]), B.mul(a[1], b[1]))


def _fr_inv(B: Ring, a):
    return _fr(B, a[1], a[0])


def _fr_div(B: Ring, a, b):
    return _fr_mul(B, a, _fr_inv(B, b))


def _kp_norm(B: Ring, L: list) -> list:
    while L and _fr_is_zero(B, L[-1]):
        L.pop()
    return L


def _kp_add(B: Ring, a: list, b: list) -> list:
    out = []
    for k in range(max(len(a), len(b))):
        x = a[k] if k < len(a) else _fr_zero(B)
        y = b[k] if k < len(b) else _fr_zero(B)
        out.append(_fr_add(B, x, y))
    return _kp_norm(B, out)


def _kp_neg(B: Ring, a: list) -> list:
    return [_fr_neg(B, c) for c in a]


def _kp_sub(B: Ring, a: list, b: list) -> list:
    return _kp_add(B, a, _kp_neg(B, b))


def _kp_mul(B: Ring, a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [_fr_zero(B) for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        if _fr_is_zero(B, x):
            continue
        for j, y in enumerate(b):
            out[i + j] = _fr_add(B, out[i + j], _fr_mul(B, x, y))
    return _kp_norm(B, out)


def _kp_scale(B: Ring, a: list, c) -> list:
    return _kp_norm(B, [_fr_mul(B, x, c) for x in a])


def _kp_monic(B: Ring, a: list) -> list:
    if not a:
        return []
    return _kp_scale(B, a, _fr_inv(B, a[-1]))


def _kp_divmod(B: Ring, a: list, b: list) -> tuple[list, list]:
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    r = list(a)
    q = [_fr_zero(B) for _ in range(max(0, len(a) - len(b) + 1))]
    binv = _fr_inv(B, b[-1])
    while len(r) >= len(b):
        k = len(r) - len(b)
        c = _fr_mul(B, r[-1], binv)
        if not _fr_is_zero(B, c):
            q[k] = c
            for i in range(len(b) - 1):
                r[k + i] = _fr_sub(B, r[k + i], _fr_mul(B, c, b[i]))
        r.pop()
        r = _kp_norm(B, r)
    return _kp_norm(B, q), r


def _kp_mod(B: Ring, a: list, f: list) -> list:
    return _kp_divmod(B, a, f)[1]


def _kp_gcd(B: Ring, a: list, b: list) -> list:
    a, b = list(a), list(b)
    while b:
        a, b = b, _kp_mod(B, a, b)
    return _kp_monic(B, a)


def _kp_egcd(B: Ring, a: list, b: list) -> tuple[list, list, list]:
    """Monic g with g = x*a + y*b."""
    r0, r1 = list(a), list(b)
    x0, x1 = [_fr_one(B)], []
    y0, y1 = [], [_fr_one(B)]
    while r1:
        q, r = _kp_divmod(B, r0, r1)
        r0, r1 = r1, r
        x0, x1 = x1, _kp_sub(B, x0, _kp_mul(B, q, x1))
        y0, y1 = y1, _kp_sub(B, y0, _kp_mul(B, q, y1))
    if r0:
        lead = _fr_inv(B, r0[-1])
        return _kp_scale(B, r0, lead), _kp_scale(B, x0, lead), _kp_scale(B, y0, lead)
    return [], x0, y0


def _kp_pow_mod(B: Ring, a: list, e: int, f: list) -> list:
    out = [_fr_one(B)]
    base = _kp_mod(B, a, f)
    while e > 0:
        if e & 1:
            out = _kp_mod(B, _kp_mul(B, out, base), f)
        base = _kp_mod(B, _kp_mul(B, base, base), f)
        e >>= 1
    return out


def _artinian_subrow_ops(B: Ring, f: list, xs: list[list]) -> list[tuple[int, int, list]]:
    """Ops carrying a unimodular subrow over K[X]/(f) to (1, 0, ..., 0).

    f is a monic fraction-coefficient polynomial of degree >= 1, xs the
    subrow entries reduced mod f, at least two of them, generating the unit
    ideal together with f.  Returned triples (p, q, lam) are 0-based
    positions within the subrow with lam reduced mod f; replaying
    work[p] += lam * work[q] mod f ends at (1, 0, ..., 0).
    """
    m = len(xs)
    if m < 2:
        raise UnsupportedDimension("subrow completion needs at least two slots")
    work = [_kp_mod(B, list(x), f) for x in xs]
    ops: list[tuple[int, int, list]] = []

    def emit(p: int, q: int, lam: list) -> None:
        lam = _kp_mod(B, lam, f)
        if not lam:
            return
        ops.append((p, q, lam))
        work[p] = _kp_mod(B, _kp_add(B, work[p], _kp_mul(B, lam, work[q])), f)

    g0 = _kp_gcd(B, f, work[0]) if work[0] else list(f)
    if len(g0) > 1 or not work[0]:
        sat = _kp_pow_mod(B, work[0], len(f) - 1, f) if work[0] else []
        dsat = _kp_gcd(B, f, sat) if sat else _kp_monic(B, list(f))
        hhat = _kp_divmod(B, f, dsat)[0]
        _, A1, _ = _kp_egcd(B, hhat, dsat)
        e = _kp_mod(B, _kp_mul(B, A1, hhat), f)
        g = _kp_monic(B, dsat)
        cs: list[list] = [[_fr_one(B)]]
        picked: list[int] = [-1]
        for j in range(1, m):
            gn, aco, bco = _kp_egcd(B, g, work[j])
            cs = [_kp_mul(B, c, aco) for c in cs]
            cs.append(bco)
            picked.append(j)
            g = gn
            if len(g) == 1:
                break
        if len(g) != 1:
            raise NotUnimodular("subrow does not generate the unit ideal")
        scale = _fr_inv(B, g[0])
        for c, j in zip(cs, picked):
            if j < 0:
                continue
            emit(0, j, _kp_mul(B, _kp_scale(B, c, scale), e))
    u = work[0]
    gu, uinv, _ = _kp_egcd(B, u, f)
    if len(gu) != 1:
        raise NotUnimodular("pivot entry failed to become a unit")
    uinv = _kp_scale(B, uinv, _fr_inv(B, gu[0]))
    for j in range(2, m):
        if work[j]:
            emit(j, 0, _kp_neg(B, _kp_mul(B, work[j], uinv)))
    if work[1]:
        emit(1, 0, _kp_neg(B, _kp_mul(B, work[1], uinv)))
    emit(1, 0, uinv)
    emit(0, 1, _kp_sub(B, [_fr_one(B)], u))
    emit(1, 0, [_fr_neg(B, _fr_one(B))])
    assert work[0] == [_fr_one(B)] and all(not work[j] for j in range(1, m))
    return ops


# ---------------------------------------------------------------------------
# boundary rewrite: force a scalar into the extreme coefficients


ROITMAN_MODES = ("poly", "laurent-hc", "laurent-both")


def roitman_rewrite(w: ElementaryWitness, a: Payload, mode: str = "poly",
                    row_degree_bound: Optional[int] = None,
                    per_op: bool = True) -> ElementaryWitness:
    """Rewrite a witness so its first-entry boundary coefficients stay on the
    powers-of-``a`` track, without changing anything modulo (a).

    Every inserted parameter is a multiple of ``a``, so the rewritten witness
    acts on any row exactly as the original modulo (a), entry by entry.  Ops
    that add into the first entry are replaced by sandwiched variants: the
    second entry first absorbs ``a X^N`` times the first (for Laurent
    ``laurent-both`` also ``a X^-N`` times), with N past every degree in
    sight, and the first entry then absorbs the enlarged second.  The top
    coefficient of the produced first entry is then the original one times an
    even power of ``a`` (for ``laurent-both`` the bottom coefficient rides the
    same track).  If the witness never writes into the first entry, one final
    sandwich pair is appended so at least one boundary bump happens.

    ``row_degree_bound`` seeds the degree tracking when the row the witness
    will be applied to has entries of known larger degree.
    """
    if mode not in ROITMAN_MODES:
        raise UnsupportedRing(f"unknown rewrite mode {mode!r}")
    A = w.ambient
    if mode == "poly" and A.mode != "poly":
        raise UnsupportedRing("poly rewrite requires a poly ambient")
    if mode != "poly" and A.mode != "laurent":
        raise UnsupportedRing("laurent rewrite requires a laurent ambient")
    if w.n < 2:
        raise UnsupportedDimension("rewrite needs at least two entries")
    ring = A.ring

    hi = row_degree_bound if row_degree_bound is not None else 3
    lo = -hi if A.mode == "laurent" else 0
    for op in w.ops:
        if op.lam == A.zero():
            continue
        wlo, whi = degree_window(op.lam)
        hi = max(hi, whi)
        lo = min(lo, wlo)

    def bump_low(span: int) -> PolyValue:
        # aX^N, or a(X^N + X^-N) when both ends are tracked
        if mode == "laurent-both":
            return A.add(A.monomial(a, span), A.monomial(a, -span))
        return A.monomial(a, span)

    out: list[ElementaryOp] = []
    rewrote = False

    def sandwich(op: Optional[ElementaryOp]) -> None:
        nonlocal hi, lo, rewrote
        rewrote = True
        span = hi - lo + 1
        inner = bump_low(span)
        if mode == "laurent-both":
            outer_span = 3 * span
            outer = bump_low(outer_span)
        else:
            outer_span = span
            outer = inner
        out.append(ElementaryOp(2, 1, inner))
        if op is None:
            out.append(ElementaryOp(1, 2, outer))
        elif op.j == 2:
            out.append(ElementaryOp(1, 2, A.add(op.lam, outer)))
        else:
            out.append(ElementaryOp(1, op.j, op.lam))
            out.append(ElementaryOp(1, 2, outer))
        hi = hi + span + outer_span
        if A.mode == "laurent":
            lo = lo - span - outer_span

    for op in w.ops:
        if op.i == 1 and per_op:
            sandwich(op)
            continue
        out.append(op)
        if op.lam != A.zero():
            wlo, whi = degree_window(op.lam)
            hi = hi + max(0, whi)
            lo = lo + min(0, wlo)
    if not rewrote:
        sandwich(None)
    return ElementaryWitness(A, w.n, out, w.relative)


# ---------------------------------------------------------------------------
# invertible completion


def complete_to_invertible(
    row: UnimodularRow, w: ElementaryWitness
) -> tuple[list[list[PolyValue]], list[list[PolyValue]]]:
    """An invertible matrix with the row as first column, plus its inverse.

    The witness must carry the row to the standard basis row; the returned
    pair (V, Vinv) satisfies V * Vinv = identity exactly and V[:, 0] = row.
    """
    A = w.ambient
    target = standard_basis_row(A, w.n)
    ensure_verifies(w, row, target, w.relative)
    V = product_matrix(invert_witness(w))
    Vinv = product_matrix(w)
    if not _mat_is_identity(A, _mat_mul(A, V, Vinv)):
        raise VerificationFailed("inverse pair does not multiply to identity")
    for i in range(w.n):
        if V[i][0] != row.entries[i]:
            raise VerificationFailed("completed matrix does not start with the row")
    return V, Vinv


# ---------------------------------------------------------------------------
# top-level completion over one-dimensional bases


def _unit_entry_endgame(A: Ambient, n: int, work: list[PolyValue],
                        emit: Callable[[int, int, PolyValue], None]) -> None:
    """Drive the row to e1, assuming some entry is a unit of the ambient."""
    k = None
    uinv = None
    for idx, e in enumerate(work):
        ui = unit_inverse_value(e)
        if ui is not None:
            k = idx
            uinv = ui
            break
    if k is None:
        raise NotAUnit("endgame requires a unit entry")
    one = A.one()
    if k == 0 and work[0] != one:
        for j in range(1, n):
            if not work[j].is_zero():
                emit(j + 1, 1, A.mul(A.neg(work[j]), uinv))
        for op in complete_unit_first(work[0], n).ops:
            emit(op.i, op.j, op.lam)
        return
    if work[0] != one:
        emit(1, k + 1, A.mul(A.sub(one, work[0]), uinv))
    for j in range(1, n):
        if not work[j].is_zero():
            emit(j + 1, 1, A.neg(work[j]))


def _euclid_quotient(ring: Ring, a: Payload, b: Payload) -> Optional[Payload]:
    """Quotient q with a - q*b strictly smaller than a under Euclid size.

    None when b is zero, the base has no division step, or q would vanish.
    """
    if ring.is_zero(b):
        return None
    if ring.kind == "int":
        q = a // b
        if q == 0 or abs(a - q * b) >= abs(a):
            return None
        return q
    if ring.kind == "poly":
        try:
            q, r = _pdivmod(ring.base, a, b)
        except ZeroDivisionError:
            return None
        if q == () or len(_pstrip(ring.base, r)) >= len(_pstrip(ring.base, a)):
            return None
        return q
    return None


def _poly_greedy(A: Ambient, work: list[PolyValue],
                 emit: Callable[[int, int, PolyValue], None]) -> None:
    """Degree descent: cancel top coefficients against unit-leading entries,
    shrinking the tops by Euclid steps when no unit leader is available."""
    ring = A.ring
    while True:
        if any(is_unit_value(e) for e in work):
            return
        progress = False
        for i, f in enumerate(work):
            if f.is_zero():
                continue
            df = degree_window(f)[1]
            for j, g in enumerate(work):
                if i == j or g.is_zero():
                    continue
                dg = degree_window(g)[1]
                if df < dg:
                    continue
                gi = ring.unit_inverse(high_coeff(g))
                if gi is None:
                    continue
                lam = A.monomial(ring.neg(ring.mul(high_coeff(f), gi)), df - dg)
                emit(i + 1, j + 1, lam)
                progress = True
                break
            if progress:
                break
        if progress:
            continue
        for i, f in enumerate(work):
            if f.is_zero():
                continue
            df = degree_window(f)[1]
            for j, g in enumerate(work):
                if i == j or g.is_zero():
                    continue
                dg = degree_window(g)[1]
                if df < dg:
                    continue
                q = _euclid_quotient(ring, high_coeff(f), high_coeff(g))
                if q is None:
                    continue
                emit(i + 1, j + 1, A.monomial(ring.neg(q), df - dg))
                progress = True
                break
            if progress:
                break
        if not progress:
            return


def _chart_scalar_refine(ring: Ring, a: Payload) -> Payload:
    """Replace a chart scalar by a small prime factor when one is cheap to
    find; a field quotient keeps the lifted completion small."""
    if ring.kind == "int":
        d = abs(a)
        if d % 2 == 0:
            return 2
        p = 3
        while p * p <= d and p < 10000:
            if d % p == 0:
                return p
            p += 2
        return d
    if ring.kind == "poly" and ring.base.kind == "gf" and ring.base.p <= 7:
        q = ring.base.p
        da = len(a) - 1
        for deg in range(1, min(3, da) + 1):
            for code in range(q**deg):
                cand = []
                c = code
                for _ in range(deg):
                    cand.append(c % q)
                    c //= q
                cand.append(1)
                _, r = _pdivmod(ring.base, a, tuple(cand))
                if not _pstrip(ring.base, r):
                    return tuple(cand)
        return a
    return a


def _designated_scalar(A: Ambient, work: list[PolyValue]) -> Payload:
    """Extreme coefficient of a minimal nonzero entry; non-unit at a stall."""
    cands = []
    for idx, e in enumerate(work):
        if e.is_zero():
            continue
        lo, hi = degree_window(e)
        cands.append((hi - lo, hi, idx))
    if not cands:
        raise NotUnimodular("the zero row is not unimodular")
    _, hi, idx = min(cands)
    f = work[idx]
    if degree_window(f) == (0, 0):
        return _chart_scalar_refine(A.ring, f.coeff_at(0))
    return _chart_scalar_refine(A.ring, high_coeff(f))


def _chart_reduce_lift(A: Ambient, work: list[PolyValue], a: Payload,
                       emit: Callable[[int, int, PolyValue], None]) -> None:
    """Complete the row modulo (a) over the dim-0 quotient and lift the ops."""
    ring = A.ring
    Rq, proj, sect = ring.quotient_by_principal(a)
    if Rq.dim() != 0:
        raise UnsupportedRing("quotient by the designated scalar is not zero-dimensional")
    Aq = Ambient(Rq, A.mode)
    vq = UnimodularRow(Aq, [map_value(e, proj, Rq) for e in work])
    wq = (complete_poly_dim0(vq) if A.mode == "poly"
          else complete_laurent_dim0(vq))
    for op in wq.ops:
        emit(op.i, op.j, map_value(op.lam, sect, ring))


def _complete_poly_dim1(v: UnimodularRow, depth: int) -> ElementaryWitness:
    A = v.ambient
    ring = A.ring
    n = len(v.entries)
    ops: list[ElementaryOp] = []
    work = list(v.entries)

    def emit(i: int, j: int, lam: PolyValue) -> None:
        if lam == A.zero():
            return
        ops.append(ElementaryOp(i, j, lam))
        work[i - 1] = A.add(work[i - 1], A.mul(lam, work[j - 1]))

    _poly_greedy(A, work, emit)
    if any(is_unit_value(e) for e in work):
        _unit_entry_endgame(A, n, work, emit)
    else:
        a = _designated_scalar(A, work)
        _chart_reduce_lift(A, work, a, emit)
        if any(is_unit_value(e) for e in work):
            _unit_entry_endgame(A, n, work, emit)
        else:
            sigma, w2 = _jac_machine(UnimodularRow(A, list(work)), a,
                                     repair=False)
            if w2.ambient == A:
                for op in w2.ops:
                    emit(op.i, op.j, op.lam)
            else:
                if depth >= _CHART_DEPTH:
                    raise RecursionLimit(
                        "chart recursion exceeded the configured depth")
                Ba = localized(ring, a)
                Aa = poly_ambient(Ba)
                va = UnimodularRow(
                    Aa, [map_value(e, lambda c: _scalar_into(ring, Ba, c), Ba)
                         for e in work])
                wa = _complete_poly_dim1(va, depth + 1)
                glued = _glue_pair(UnimodularRow(A, list(work)), sigma, a,
                                   w2, wa)
                for op in glued.ops:
                    emit(op.i, op.j, op.lam)
    w = ElementaryWitness(A, n, simplify_ops(A, ops))
    ensure_verifies(w, v, standard_basis_row(A, n))
    return w


def _mirror_value(v: PolyValue) -> PolyValue:
    """Exponent reversal k -> -k; a ring automorphism of the Laurent ambient."""
    if v.is_zero():
        return v
    A = v.ambient
    hi = v.low + len(v.coeffs) - 1
    return A.value(-hi, list(reversed(v.coeffs)))


def _whitehead_shift(A: Ambient, i: int, j: int, e: int) -> list[tuple[int, int, PolyValue]]:
    """Six moves realizing entry i times X^e, entry j times X^-e."""
    ring = A.ring
    one = A.one()
    u = A.monomial(ring.one(), e)
    uinv = A.monomial(ring.one(), -e)
    return [
        (i, j, A.neg(one)), (j, i, one), (i, j, A.neg(one)),
        (i, j, u), (j, i, A.neg(uinv)), (i, j, u),
    ]


def _laurent_greedy(A: Ambient, work: list[PolyValue],
                    emit: Callable[[int, int, PolyValue], None]) -> None:
    """Window-width descent: cancel extreme coefficients against unit ends."""
    ring = A.ring
    while True:
        if any(is_unit_value(e) for e in work):
            return
        progress = False
        for i, f in enumerate(work):
            if f.is_zero():
                continue
            lf, hf = degree_window(f)
            for j, g in enumerate(work):
                if i == j or g.is_zero():
                    continue
                lg, hg = degree_window(g)
                if hf - lf < hg - lg:
                    continue
                gi = ring.unit_inverse(high_coeff(g))
                if gi is not None:
                    lam = A.monomial(ring.neg(ring.mul(high_coeff(f), gi)),
                                     hf - hg)
                    emit(i + 1, j + 1, lam)
                    progress = True
                    break
                li = ring.unit_inverse(low_coeff(g))
                if li is not None:
                    lam = A.monomial(ring.neg(ring.mul(low_coeff(f), li)),
                                     lf - lg)
                    emit(i + 1, j + 1, lam)
                    progress = True
                    break
            if progress:
                break
        if progress:
            continue
        for i, f in enumerate(work):
            if f.is_zero():
                continue
            lf, hf = degree_window(f)
            for j, g in enumerate(work):
                if i == j or g.is_zero():
                    continue
                lg, hg = degree_window(g)
                # strict width gap keeps the untouched end fixed, so the
                # coefficient-size potential decreases; width-zero pairs
                # have a single shared coefficient and are safe as well
                if not (hf - lf > hg - lg or (hf == lf and hg == lg)):
                    continue
                q = _euclid_quotient(ring, high_coeff(f), high_coeff(g))
                if q is not None:
                    emit(i + 1, j + 1, A.monomial(ring.neg(q), hf - hg))
                    progress = True
                    break
                q = _euclid_quotient(ring, low_coeff(f), low_coeff(g))
                if q is not None:
                    emit(i + 1, j + 1, A.monomial(ring.neg(q), lf - lg))
                    progress = True
                    break
            if progress:
                break
        if not progress:
            return


def _laurent_bottom_reduce(A: Ambient, n: int, work: list[PolyValue],
                           emit: Callable[[int, int, PolyValue], None],
                           k: int) -> None:
    """Make every entry polynomial with a unit constant coefficient first.

    Entry k must have a unit bottom coefficient; it is rotated to the front,
    shifted to start at exponent zero, and used to clear every negative
    exponent of the remaining entries by division from below.
    """
    ring = A.ring
    one = A.one()
    if k != 0:
        emit(1, k + 1, one)
        emit(k + 1, 1, A.neg(one))
        emit(1, k + 1, one)
    lo = degree_window(work[0])[0]
    if lo != 0:
        for (i, j, lam) in _whitehead_shift(A, 1, 2, -lo):
            emit(i, j, lam)
    u0 = low_coeff(work[0])
    u0i = ring.unit_inverse(u0)
    if u0i is None or degree_window(work[0])[0] != 0:
        raise NotAUnit("front entry lost its unit constant coefficient")
    for j in range(1, n):
        while not work[j].is_zero() and degree_window(work[j])[0] < 0:
            e = degree_window(work[j])[0]
            c = low_coeff(work[j])
            emit(j + 1, 1, A.monomial(ring.neg(ring.mul(c, u0i)), e))


def _complete_laurent_dim1(v: UnimodularRow, depth: int) -> ElementaryWitness:
    A = v.ambient
    ring = A.ring
    n = len(v.entries)
    ops: list[ElementaryOp] = []
    work = list(v.entries)

    def emit(i: int, j: int, lam: PolyValue) -> None:
        if lam == A.zero():
            return
        ops.append(ElementaryOp(i, j, lam))
        work[i - 1] = A.add(work[i - 1], A.mul(lam, work[j - 1]))

    _laurent_greedy(A, work, emit)
    if any(is_unit_value(e) for e in work):
        _unit_entry_endgame(A, n, work, emit)
    else:
        pick = None
        for idx, e in enumerate(work):
            if e.is_zero():
                continue
            if ring.unit_inverse(low_coeff(e)) is not None:
                pick = (idx, "lo")
                break
            if ring.unit_inverse(high_coeff(e)) is not None:
                pick = (idx, "hi")
                break
        if pick is not None:
            k, end = pick
            if end == "lo":
                wk, em = work, emit
            else:
                mwork = [_mirror_value(e) for e in work]

                def memit(i: int, j: int, lam: PolyValue) -> None:
                    if lam == A.zero():
                        return
                    mwork[i - 1] = A.add(mwork[i - 1], A.mul(lam, mwork[j - 1]))
                    emit(i, j, _mirror_value(lam))

                wk, em = mwork, memit
            _laurent_bottom_reduce(A, n, wk, em, k)
            AP = poly_ambient(ring)
            vp = UnimodularRow(AP, [to_mode(e, "poly") for e in wk])
            wp = _complete_poly_dim1(vp, depth)
            for op in wp.ops:
                em(op.i, op.j, to_mode(op.lam, "laurent"))
        else:
            candidates: list[Payload] = []
            for e in sorted((x for x in work if not x.is_zero()),
                            key=lambda x: degree_window(x)[1] - degree_window(x)[0]):
                for c in (high_coeff(e), low_coeff(e)):
                    if ring.is_unit(c) or ring.is_zero(c):
                        continue
                    c = _chart_scalar_refine(ring, c)
                    if all(not ring.eq(c, d) for d in candidates):
                        candidates.append(c)
            done = False
            for a in candidates:
                mark = len(ops)
                saved = list(work)
                try:
                    _chart_reduce_lift(A, work, a, emit)
                    if any(is_unit_value(e) for e in work):
                        _unit_entry_endgame(A, n, work, emit)
                        done = True
                        break
                    sigma, w2 = _jac_machine(UnimodularRow(A, list(work)), a,
                                             repair=False)
                except (UnsupportedRing, UnsupportedIdeal):
                    del ops[mark:]
                    work[:] = saved
                    continue
                if w2.ambient == A:
                    for op in w2.ops:
                        emit(op.i, op.j, op.lam)
                    done = True
                    break
                del ops[mark:]
                work[:] = saved
            if not done:
                raise RecursionLimit(
                    "no chart scalar produced a denominator-free Laurent "
                    "completion; the Laurent mode has no gluing step")
    w = ElementaryWitness(A, n, simplify_ops(A, ops))
    ensure_verifies(w, v, standard_basis_row(A, n))
    return w


def complete_row(v: UnimodularRow,
                 relative: Optional[PrincipalIdeal] = None) -> ElementaryWitness:
    """Complete a unimodular row to e1 with an elementary-operation witness.

    Supports polynomial and Laurent polynomial ambients whose base ring has
    dimension zero or one, with row length at least dimension plus two.  The
    returned witness lives over the row's own ambient (no denominators) and
    re-verifies before returning; when a relative ideal is supplied, the
    product matrix is additionally congruent to the identity modulo it.
    """
    A = v.ambient
    ring = A.ring
    n = len(v.entries)
    d = ring.dim()
    if A.mode not in ("poly", "laurent"):
        raise UnsupportedRing("completion expects a polynomial or Laurent ambient")
    if d >= 2:
        raise UnsupportedDimension("base dimension above one is out of range")
    if n < max(2, d + 2):
        raise UnsupportedDimension(
            f"row length {n} is below the required {max(2, d + 2)}")
    if relative is not None:
        return _complete_relative(v, relative)
    if d == 0:
        return complete_poly_dim0(v) if A.mode == "poly" else complete_laurent_dim0(v)
    if A.mode == "poly":
        return _complete_poly_dim1(v, 0)
    return _complete_laurent_dim1(v, 0)


def _complete_relative(v: UnimodularRow,
                       relative: PrincipalIdeal) -> ElementaryWitness:
    A = v.ambient
    ring = A.ring
    n = len(v.entries)
    gen = relative.gen
    if relative.ambient != A:
        raise RingMismatch("ideal lives over a different ambient")
    target = standard_basis_row(A, n)
    for idx, ent in enumerate(v.entries):
        dv = A.sub(ent, A.one()) if idx == 0 else ent
        if not relative.contains(dv):
            raise NotRelative("row is not congruent to the standard basis row")
    if gen == A.zero():
        w = ElementaryWitness(A, n, [], relative=relative)
        ensure_verifies(w, v, target)
        return w
    if is_unit_value(gen):
        w0 = complete_row(v)
        w = ElementaryWitness(A, n, w0.ops, relative=relative)
        ensure_verifies(w, v, target)
        return w
    lo, hi = degree_window(gen)
    if lo == hi:
        c = gen.coeff_at(lo)
        scalar_like = (lo == 0) if A.mode == "poly" else True
        if scalar_like:
            if ring.dim() == 0:
                lifted = lift_unimodular(v, c)
                wx = complete_lifted_row(lifted)
                down = descend_witness(wx, lifted)
                w = ElementaryWitness(A, n, down.ops, relative=relative)
                ensure_verifies(w, v, target)
                return w
            if A.mode == "poly":
                return complete_relative_jacobson(v, relative)
            sg, wj = _jac_machine(v, c, repair=True)
            if not ring.is_unit(sg):
                raise UnsupportedRing(
                    "completion requires inverting a non-unit multiplier "
                    "congruent to 1 modulo the ideal")
            moved = []
            for op in wj.ops:
                val = _value_into(op.lam, A)
                if val is None:
                    raise UnsupportedRing("witness did not transport back")
                moved.append(ElementaryOp(op.i, op.j, val))
            w = ElementaryWitness(A, n, moved, relative=relative)
            ensure_verifies(w, v, target)
            return w
    b = None
    if hi - lo == 1:
        chi = ring.unit_inverse(gen.coeff_at(hi))
        if chi is not None and (A.mode == "laurent" or lo == 0):
            b = ring.neg(ring.mul(gen.coeff_at(lo), chi))
    elif lo == hi == 1 and A.mode == "poly":
        if ring.unit_inverse(gen.coeff_at(1)) is not None:
            b = ring.zero()
    if b is None:
        raise UnsupportedIdeal(
            "relative completion supports scalar and monic-linear generators")
    if A.mode == "laurent" and ring.unit_inverse(b) is None:
        raise UnsupportedIdeal(
            "Laurent relative completion needs a unit evaluation point")
    w0 = complete_row(v)
    minv = product_matrix(invert_witness(w0))
    cmat = [[evaluate(e, b) for e in r] for r in minv]
    rep = matrix_word_ops(ring, cmat)
    allops = list(w0.ops) + _constant_ops(A, rep)
    w = ElementaryWitness(A, n, simplify_ops(A, allops), relative=relative)
    ensure_verifies(w, v, target)
    return w


# ---------------------------------------------------------------------------
# partitions of unity, projective-column certificates, and chained gluing


@dataclass
class LindelCertificate:
    """Columns and functional rows splitting a scalar off a presented module.

    The pairing rows[i] . columns[j] must equal s when i = j and vanish
    otherwise; columns have one coordinate per presentation generator.  The
    free certificate uses the standard basis and s-scaled duals.
    """

    ring: Ring
    s: Payload
    rank: int
    columns: tuple
    rows: tuple
    exponent: int = 1

    def __post_init__(self) -> None:
        self.columns = tuple(tuple(c) for c in self.columns)
        self.rows = tuple(tuple(r) for r in self.rows)
        R = self.ring
        if len(self.columns) != self.rank or len(self.rows) != self.rank:
            raise ShapeViolation("certificate needs rank-many columns and rows")
        width = {len(c) for c in self.columns} | {len(r) for r in self.rows}
        if len(width) > 1:
            raise ShapeViolation("certificate coordinates have mixed lengths")
        for i, r in enumerate(self.rows):
            for j, c in enumerate(self.columns):
                acc = R.zero()
                for rk, ck in zip(r, c):
                    acc = R.add(acc, R.mul(rk, ck))
                want = self.s if i == j else R.zero()
                if not R.eq(acc, want):
                    raise ShapeViolation(
                        "pairing of rows against columns is not diagonal")

    @classmethod
    def free(cls, ring: Ring, s: Payload, rank: int) -> "LindelCertificate":
        cols = []
        rows = []
        for i in range(rank):
            col = [ring.zero()] * rank
            row = [ring.zero()] * rank
            col[i] = ring.one()
            row[i] = s
            cols.append(tuple(col))
            rows.append(tuple(row))
        return cls(ring, s, rank, tuple(cols), tuple(rows))


@dataclass
class PartitionOfUnity:
    """Scalars summing to one, each tail scalar optionally certified."""

    ring: Ring
    scalars: tuple
    certificates: tuple = ()

    def __post_init__(self) -> None:
        self.scalars = tuple(self.scalars)
        if not self.scalars:
            raise PartitionInvalid("a partition needs at least one scalar")
        if not self.certificates:
            self.certificates = tuple(None for _ in self.scalars)
        else:
            self.certificates = tuple(self.certificates)
        if len(self.certificates) != len(self.scalars):
            raise PartitionInvalid("one certificate slot per scalar")
        acc = self.ring.zero()
        for s in self.scalars:
            acc = self.ring.add(acc, s)
        if not self.ring.eq(acc, self.ring.one()):
            raise PartitionInvalid("scalars do not sum to one")


def lindel_bridge(v: UnimodularRow, cert: LindelCertificate,
                  row_witness: ElementaryWitness) -> ElementaryWitness:
    """Translate a scalar row witness through a projective-column certificate.

    Ops of shape (1, j, s*x) become transvections along the j-th functional
    row; ops of shape (i, 1, y) become transvections along the i-th column.
    Any other shape raises ShapeViolation.  The bridged witness must carry
    the given presented row to e1 and is re-verified before returning.
    """
    A = v.ambient
    ring = A.ring
    if cert.ring != ring or row_witness.ambient.ring != ring:
        raise RingMismatch("certificate and witness must share the base ring")
    if row_witness.n != cert.rank + 1:
        raise ShapeViolation("row witness length must be the rank plus one")
    width = len(cert.columns[0]) if cert.columns else 0
    n = 1 + width
    if len(v.entries) != n:
        raise ShapeViolation("presented row length must match the certificate")
    out: list[ElementaryOp] = []
    for op in row_witness.ops:
        if not op.lam.is_zero() and degree_window(op.lam) != (0, 0):
            raise ShapeViolation("bridged parameters must be scalars")
        lam0 = op.lam.coeff_at(0) if not op.lam.is_zero() else ring.zero()
        if op.i == 1 and op.j >= 2:
            x = ring.divide(lam0, cert.s)
            if x is None:
                raise ShapeViolation(
                    "a front-row parameter is not divisible by the certificate scalar")
            phi = cert.rows[op.j - 2]
            for k2 in range(width):
                c = ring.mul(x, phi[k2])
                if not ring.is_zero(c):
                    out.append(ElementaryOp(1, k2 + 2, A.constant(c)))
        elif op.j == 1 and op.i >= 2:
            col = cert.columns[op.i - 2]
            for k2 in range(width):
                c = ring.mul(lam0, col[k2])
                if not ring.is_zero(c):
                    out.append(ElementaryOp(k2 + 2, 1, A.constant(c)))
        else:
            raise ShapeViolation(
                "only front-row and front-column moves can be bridged")
    w = ElementaryWitness(A, n, out)
    ensure_verifies(w, v, standard_basis_row(A, n))
    return w


def glue_chain(v: UnimodularRow, pou: PartitionOfUnity,
               local_witness: ElementaryWitness) -> ElementaryWitness:
    """Globalize a chart completion along a partition of unity.

    The local witness completes v over the localization at the first scalar;
    successive partial sums are glued pairwise, completing v afresh over
    each new scalar's localization, until the partial sum reaches one.
    """
    A = v.ambient
    ring = A.ring
    n = len(v.entries)
    if A.mode != "poly":
        raise UnsupportedRing("chained gluing runs in the polynomial mode")
    if pou.ring != ring:
        raise RingMismatch("partition lives over a different ring")
    acc = ring.zero()
    for s in pou.scalars:
        acc = ring.add(acc, s)
    if not ring.eq(acc, ring.one()):
        raise PartitionInvalid("scalars do not sum to one")
    if n < 3:
        raise UnsupportedDimension("chained gluing needs at least three coordinates")
    t = pou.scalars[0]
    B0 = localized(ring, t)
    A0 = poly_ambient(B0)
    if local_witness.ambient != A0 or local_witness.n != n:
        raise LocalWitnessUnsound("local witness does not live over the first chart")
    v0 = UnimodularRow(
        A0, [map_value(e, lambda c: _scalar_into(ring, B0, c), B0)
             for e in v.entries])
    if not verify(local_witness, v0, standard_basis_row(A0, n)):
        raise LocalWitnessUnsound("local witness fails over the first chart")
    running = local_witness
    for i in range(1, len(pou.scalars)):
        si = pou.scalars[i]
        tn = ring.add(t, si)
        B = localized(ring, tn)
        AB = poly_ambient(B)
        vB = UnimodularRow(
            AB, [map_value(e, lambda c: _scalar_into(ring, B, c), B)
                 for e in v.entries])
        As_ = poly_ambient(localized(B, t))
        moved = []
        for op in running.ops:
            val = _value_into(op.lam, As_)
            if val is None:
                raise LocalWitnessUnsound("running witness did not transport")
            moved.append(ElementaryOp(op.i, op.j, val))
        w_s = ElementaryWitness(As_, n, moved)
        Bt_ = localized(B, si)
        At_ = poly_ambient(Bt_)
        v_t = UnimodularRow(
            At_, [map_value(e, lambda c: _scalar_into(ring, Bt_, c), Bt_)
                  for e in v.entries])
        w_t = complete_row(v_t)
        running = _glue_pair(vB, t, si, w_s, w_t)
        t = tn
    ensure_verifies(running, v, standard_basis_row(A, n))
    return running
