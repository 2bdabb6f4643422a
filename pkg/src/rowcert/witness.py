"""Elementary-operation witnesses and their exact verification.

A witness is an ordered list of elementary operations E(i, j, lam), each
meaning "add lam times entry j to entry i".  Witnesses act on rows treated as
columns, first op first, so the product matrix is the last op's matrix times
... times the first's.  Verification replays the action with exact
arithmetic; a witness carrying a relative ideal marker must additionally have
its product matrix congruent to the identity modulo that ideal, entry by
entry.

Witness files are JSON: {ring, mode, n, relative, ops: [{i, j, lambda}]},
with lambda in polynomial text so arbitrary-precision integers stay decimal
strings.  Reading a witness re-validates its structure and any relative
congruence before returning it.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .polyring import (
    Ambient,
    PolyValue,
    divide_unit_leading,
    unit_inverse_value,
)
from .rings import Payload, Ring, RingMap, parse_ring


class SizeMismatch(Exception):
    """Row length and witness size disagree, or an index is out of range."""


class RingMismatch(Exception):
    """Operands live over different ambient rings."""


class NotAUnit(Exception):
    """A unit was required (for a gadget or an inverse) but not present."""


class UnsupportedIdeal(Exception):
    """Membership in the given principal ideal is not decidable here."""


class VerificationFailed(Exception):
    """An internally produced certificate failed its own verification."""


# ---------------------------------------------------------------------------
# ideals


class PrincipalIdeal:
    """A principal ideal of the ambient, with a decidable membership test."""

    __slots__ = ("ambient", "gen")

    def __init__(self, ambient: Ambient, gen: PolyValue) -> None:
        if gen.ambient != ambient:
            raise RingMismatch("ideal generator lives in a different ambient")
        self.ambient = ambient
        self.gen = gen

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, PrincipalIdeal)
            and self.ambient == other.ambient
            and self.gen == other.gen
        )

    def __hash__(self) -> int:
        return hash((self.ambient, self.gen))

    def __repr__(self) -> str:
        return f"PrincipalIdeal({self.text()} of {self.ambient!r})"

    def text(self) -> str:
        return f"({self.ambient.format(self.gen)})"

    @classmethod
    def parse(cls, ambient: Ambient, text: str) -> "PrincipalIdeal":
        s = "".join(text.split())
        if s.startswith("(") and s.endswith(")"):
            s = s[1:-1]
        return cls(ambient, ambient.parse(s))

    def contains(self, v: PolyValue) -> bool:
        """Exact membership; raises UnsupportedIdeal outside the decidable cases."""
        A = self.ambient
        ring = A.ring
        if v.ambient != A:
            raise RingMismatch("membership query in a different ambient")
        gen = self.gen
        if gen.is_zero():
            return v.is_zero()
        if v.is_zero():
            return True
        terms = list(gen.terms())
        if len(terms) == 1:
            e, c = terms[0]
            if A.mode == "poly" and e > 0 and not v.low >= e:
                return False
            return all(ring.divides(c, coeff) for coeff in v.coeffs)
        if A.mode == "poly":
            if ring.unit_inverse(gen.coeffs[-1]) is None:
                raise UnsupportedIdeal(
                    "polynomial ideal membership needs a unit top coefficient"
                )
            _, r = divide_unit_leading(v, gen)
            return r.is_zero()
        if A.mode == "laurent":
            hc_unit = ring.unit_inverse(gen.coeffs[-1]) is not None
            lc_unit = ring.unit_inverse(gen.coeffs[0]) is not None
            if not (hc_unit and lc_unit):
                raise UnsupportedIdeal(
                    "Laurent ideal membership needs unit coefficients at both ends"
                )
            # X is a unit modulo such a generator, so shifted polynomial
            # division decides membership
            from .polyring import poly_ambient

            P = poly_ambient(ring)
            g0 = P.value(0, list(gen.coeffs))
            v0 = P.value(0, list(v.coeffs))
            _, r = divide_unit_leading(v0, g0)
            return r.is_zero()
        raise UnsupportedIdeal("scalar ambient ideals have a single generator term")


# ---------------------------------------------------------------------------
# ops, rows, witnesses


@dataclass(frozen=True)
class ElementaryOp:
    """Add ``lam`` times entry j to entry i (1-based, i != j)."""

    i: int
    j: int
    lam: PolyValue

    def __post_init__(self) -> None:
        if self.i == self.j or self.i < 1 or self.j < 1:
            raise SizeMismatch(f"bad op indices ({self.i}, {self.j})")

    def __repr__(self) -> str:
        return f"E({self.i},{self.j};{self.lam.ambient.format(self.lam)})"


class UnimodularRow:
    """A row of ambient values, optionally with an exact cocertificate."""

    __slots__ = ("ambient", "entries", "cocert")

    def __init__(
        self,
        ambient: Ambient,
        entries: Iterable[PolyValue],
        cocert: Optional[Iterable[PolyValue]] = None,
    ) -> None:
        self.ambient = ambient
        self.entries = tuple(entries)
        for v in self.entries:
            if v.ambient != ambient:
                raise RingMismatch("row entry in a different ambient")
        if cocert is None:
            self.cocert = None
        else:
            self.cocert = tuple(cocert)
            if len(self.cocert) != len(self.entries):
                raise SizeMismatch("cocertificate length differs from the row")
            acc = ambient.zero()
            for a, b in zip(self.entries, self.cocert):
                acc = ambient.add(acc, ambient.mul(a, b))
            if acc != ambient.one():
                raise VerificationFailed("cocertificate does not sum to one")

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, UnimodularRow)
            and self.ambient == other.ambient
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        return hash((self.ambient, self.entries))

    def __repr__(self) -> str:
        return "[" + ", ".join(self.ambient.format(v) for v in self.entries) + "]"


class ElementaryWitness:
    """An ordered elementary-operation certificate over one ambient."""

    __slots__ = ("ambient", "n", "ops", "relative")

    def __init__(
        self,
        ambient: Ambient,
        n: int,
        ops: Iterable[ElementaryOp],
        relative: Optional[PrincipalIdeal] = None,
    ) -> None:
        if n < 1:
            raise SizeMismatch("witness size must be at least 1")
        self.ambient = ambient
        self.n = n
        self.ops = tuple(ops)
        for op in self.ops:
            if op.i > n or op.j > n:
                raise SizeMismatch(f"op index exceeds size {n}")
            if op.lam.ambient != ambient:
                raise RingMismatch("op parameter in a different ambient")
        if relative is not None and relative.ambient != ambient:
            raise RingMismatch("relative ideal in a different ambient")
        self.relative = relative

    def __len__(self) -> int:
        return len(self.ops)

    def __repr__(self) -> str:
        rel = f", relative {self.relative.text()}" if self.relative else ""
        return f"Witness(n={self.n}, {len(self.ops)} ops over {self.ambient!r}{rel})"

    def apply(self, row: UnimodularRow) -> UnimodularRow:
        return apply_witness(self, row)


def apply_witness(w: ElementaryWitness, row: UnimodularRow) -> UnimodularRow:
    """Act on the row (as a column), transporting any cocertificate."""
    if row.ambient != w.ambient:
        raise RingMismatch("row and witness ambients differ")
    if len(row) != w.n:
        raise SizeMismatch(f"row has {len(row)} entries, witness expects {w.n}")
    A = w.ambient
    cur = list(row.entries)
    co = list(row.cocert) if row.cocert is not None else None
    for op in w.ops:
        i, j = op.i - 1, op.j - 1
        cur[i] = A.add(cur[i], A.mul(op.lam, cur[j]))
        if co is not None:
            co[j] = A.sub(co[j], A.mul(op.lam, co[i]))
    return UnimodularRow(A, cur, co)


def product_matrix(w: ElementaryWitness) -> list[list[PolyValue]]:
    """The exact n x n product of the op matrices, last op leftmost."""
    A = w.ambient
    n = w.n
    mat = [[A.one() if r == c else A.zero() for c in range(n)] for r in range(n)]
    for op in w.ops:
        i, j = op.i - 1, op.j - 1
        mat[i] = [A.add(mat[i][c], A.mul(op.lam, mat[j][c])) for c in range(n)]
    return mat


def invert_witness(w: ElementaryWitness) -> ElementaryWitness:
    ops = [ElementaryOp(op.i, op.j, w.ambient.neg(op.lam)) for op in reversed(w.ops)]
    return ElementaryWitness(w.ambient, w.n, ops, w.relative)


def compose_witnesses(w1: ElementaryWitness, w2: ElementaryWitness) -> ElementaryWitness:
    """Witness acting as w2 first, then w1 (matrix product w1 * w2)."""
    if w1.ambient != w2.ambient:
        raise RingMismatch("witness ambients differ")
    if w1.n != w2.n:
        raise SizeMismatch("witness sizes differ")
    rel = w1.relative if w1.relative == w2.relative else None
    return ElementaryWitness(w1.ambient, w1.n, w2.ops + w1.ops, rel)


def conjugate_witness(w: ElementaryWitness, g: ElementaryWitness) -> ElementaryWitness:
    """g first, then w, then g inverse."""
    if w.ambient != g.ambient or w.n != g.n:
        raise SizeMismatch("conjugation needs matching size and ambient")
    ops = g.ops + w.ops + invert_witness(g).ops
    return ElementaryWitness(w.ambient, w.n, ops, w.relative)


def transpose_witness(w: ElementaryWitness) -> ElementaryWitness:
    """Witness whose product matrix is the transpose of w's."""
    ops = [ElementaryOp(op.j, op.i, op.lam) for op in reversed(w.ops)]
    return ElementaryWitness(w.ambient, w.n, ops, w.relative)


def map_witness(
    w: ElementaryWitness,
    fn: Callable[[Payload], Payload],
    target: Ring,
    mode: Optional[str] = None,
    relative: Optional[PrincipalIdeal] = None,
) -> ElementaryWitness:
    """Map every op parameter coefficientwise into the target ring."""
    from .polyring import map_value

    A = Ambient(target, mode or w.ambient.mode)
    ops = [
        ElementaryOp(op.i, op.j, map_value(op.lam, fn, target, A.mode)) for op in w.ops
    ]
    rel = relative
    if rel is None and w.relative is not None:
        rel = PrincipalIdeal(A, map_value(w.relative.gen, fn, target, A.mode))
    return ElementaryWitness(A, w.n, ops, rel)


def map_witness_along(w: ElementaryWitness, rmap: RingMap,
                      mode: Optional[str] = None) -> ElementaryWitness:
    if w.ambient.ring != rmap.source:
        raise RingMismatch("witness does not live over the map's source ring")
    return map_witness(w, rmap.fn, rmap.target, mode)


# ---------------------------------------------------------------------------
# verification


@dataclass
class VerifyReport:
    """Total verdict of a verification; never an exception."""

    ok: bool
    message: str = "ok"
    position: Optional[int] = None
    entry: Optional[tuple[int, int]] = None

    def __bool__(self) -> bool:
        return self.ok


def verify(
    w: ElementaryWitness,
    row: UnimodularRow,
    target: UnimodularRow,
    relative: Optional[PrincipalIdeal] = None,
) -> VerifyReport:
    """Replay the witness on the row and compare with the target exactly.

    When an ideal is given (or carried by the witness), additionally check
    that the product matrix is the identity modulo that ideal, reporting the
    first failing entry.
    """
    ideal = relative if relative is not None else w.relative
    try:
        result = apply_witness(w, row)
    except (SizeMismatch, RingMismatch) as exc:
        return VerifyReport(False, f"structure: {exc}")
    if target.ambient != w.ambient or len(target) != w.n:
        return VerifyReport(False, "structure: target row does not match the witness")
    for k, (got, want) in enumerate(zip(result.entries, target.entries), start=1):
        if got != want:
            return VerifyReport(
                False,
                f"entry {k}: expected {w.ambient.format(want)}, got {w.ambient.format(got)}",
                position=k,
            )
    if ideal is not None:
        A = w.ambient
        mat = product_matrix(w)
        for r in range(w.n):
            for c in range(w.n):
                delta = A.sub(mat[r][c], A.one() if r == c else A.zero())
                try:
                    inside = ideal.contains(delta)
                except UnsupportedIdeal as exc:
                    return VerifyReport(False, f"ideal: {exc}", entry=(r + 1, c + 1))
                if not inside:
                    return VerifyReport(
                        False,
                        f"matrix entry ({r + 1},{c + 1}) is not congruent modulo {ideal.text()}",
                        entry=(r + 1, c + 1),
                    )
    return VerifyReport(True)


def ensure_verifies(
    w: ElementaryWitness,
    row: UnimodularRow,
    target: UnimodularRow,
    relative: Optional[PrincipalIdeal] = None,
) -> None:
    report = verify(w, row, target, relative)
    if not report.ok:
        raise VerificationFailed(report.message)


# ---------------------------------------------------------------------------
# gadgets


def complete_unit_first(u: PolyValue, n: int) -> ElementaryWitness:
    """Witness sending (u, 0, ..., 0) to the first standard vector.

    Three moves: E21(u^-1 (1-u)), E12(1), E21(u-1); empty when u = 1.
    """
    A = u.ambient
    if n < 2:
        raise SizeMismatch("the unit gadget needs at least two entries")
    one = A.one()
    if u == one:
        return ElementaryWitness(A, n, [])
    uinv = unit_inverse_value(u)
    if uinv is None:
        raise NotAUnit(f"{A.format(u)} is not a unit")
    ops = [
        ElementaryOp(2, 1, A.mul(uinv, A.sub(one, u))),
        ElementaryOp(1, 2, one),
        ElementaryOp(2, 1, A.sub(u, one)),
    ]
    return ElementaryWitness(A, n, ops)


def complete_unit_first_congruent(u: PolyValue, n: int,
                                  relative: Optional[PrincipalIdeal] = None) -> ElementaryWitness:
    """Unit gadget with product matrix [[u^-1, u^-1 - 1], [0, u]] at the top.

    Sends (u, 0, ..., 0) to the first standard vector; every off-identity
    entry of the product matrix lies in (u - 1), so the witness is congruent
    to the identity modulo any ideal containing u - 1.
    """
    A = u.ambient
    if n < 2:
        raise SizeMismatch("the unit gadget needs at least two entries")
    one = A.one()
    if u == one:
        return ElementaryWitness(A, n, [], relative)
    uinv = unit_inverse_value(u)
    if uinv is None:
        raise NotAUnit(f"{A.format(u)} is not a unit")
    ops = [
        ElementaryOp(2, 1, one),
        ElementaryOp(1, 2, A.sub(uinv, one)),
        ElementaryOp(2, 1, A.neg(u)),
    ]
    return ElementaryWitness(A, n, ops, relative)


def scale_down_first(u: PolyValue, n: int) -> ElementaryWitness:
    """Witness with product matrix diag(u^-1, u, 1, ..., 1) for a unit u.

    Multiplies entry 1 by u^-1 and entry 2 by u using four elementary moves.
    """
    A = u.ambient
    if n < 2:
        raise SizeMismatch("diagonal scaling needs at least two entries")
    one = A.one()
    if u == one:
        return ElementaryWitness(A, n, [])
    uinv = unit_inverse_value(u)
    if uinv is None:
        raise NotAUnit(f"{A.format(u)} is not a unit")
    ops = [
        ElementaryOp(2, 1, one),
        ElementaryOp(1, 2, A.sub(uinv, one)),
        ElementaryOp(2, 1, A.neg(u)),
        ElementaryOp(1, 2, A.sub(uinv, A.mul(uinv, uinv))),
    ]
    return ElementaryWitness(A, n, ops)


def standard_basis_row(ambient: Ambient, n: int, k: int = 1) -> UnimodularRow:
    """The row with 1 in position k and 0 elsewhere, with its cocertificate."""
    entries = [ambient.one() if i == k else ambient.zero() for i in range(1, n + 1)]
    return UnimodularRow(ambient, entries, cocert=list(entries))


# ---------------------------------------------------------------------------
# serialization

WITNESS_MODES = ("poly", "laurent", "scalar")


def witness_to_dict(w: ElementaryWitness) -> dict:
    return {
        "ring": w.ambient.ring.text(),
        "mode": w.ambient.mode,
        "n": w.n,
        "relative": w.relative.text() if w.relative is not None else None,
        "ops": [
            {"i": op.i, "j": op.j, "lambda": w.ambient.format(op.lam)} for op in w.ops
        ],
    }


def witness_from_dict(d: dict) -> ElementaryWitness:
    """Rebuild a witness, re-validating structure and relative congruence."""
    try:
        ring = parse_ring(str(d["ring"]))
        mode = str(d["mode"])
        if mode not in WITNESS_MODES:
            raise ValueError(f"unknown mode {mode!r}")
        n = int(d["n"])
        A = Ambient(ring, mode)
        ops = [
            ElementaryOp(int(o["i"]), int(o["j"]), A.parse(str(o["lambda"])))
            for o in d["ops"]
        ]
        rel_text = d.get("relative")
        rel = None if rel_text is None else PrincipalIdeal.parse(A, str(rel_text))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed witness data: {exc}") from exc
    w = ElementaryWitness(A, n, ops, rel)
    if rel is not None:
        mat = product_matrix(w)
        for r in range(n):
            for c in range(n):
                delta = A.sub(mat[r][c], A.one() if r == c else A.zero())
                if not rel.contains(delta):
                    raise VerificationFailed(
                        f"stored witness is not congruent to the identity at ({r + 1},{c + 1})"
                    )
    return w


def witness_to_json(w: ElementaryWitness) -> str:
    return json.dumps(witness_to_dict(w), indent=2)


def witness_from_json(text: str) -> ElementaryWitness:
    return witness_from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# sampling


def random_witness(
    ambient: Ambient,
    n: int,
    rng: random.Random,
    num_ops: int,
    max_degree: int = 3,
    bound: int = 9,
) -> ElementaryWitness:
    """A random op list; parameters drawn from the ambient's sampler."""
    ops = []
    for _ in range(num_ops):
        i = rng.randrange(1, n + 1)
        j = rng.randrange(1, n)
        if j >= i:
            j += 1
        ops.append(ElementaryOp(i, j, ambient.random(rng, max_degree, bound)))
    return ElementaryWitness(ambient, n, ops)
