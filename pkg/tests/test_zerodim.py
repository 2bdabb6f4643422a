"""Tests for row completion over dimension-zero coefficient rings."""

from __future__ import annotations

import random

import pytest

from rowcert.polyring import Ambient, LeadingNotUnit, laurent_ambient, poly_ambient
from rowcert.rings import (
    integers,
    integers_mod,
    parse_ring,

    poly_quotient,
    prime_field,
    rationals,
)
from rowcert.witness import (
    SizeMismatch,
    UnimodularRow,
    apply_witness,
    random_witness,
    standard_basis_row,
    verify,
)
from rowcert.zerodim import (
    CoeffCountMeasure,
    DimensionMismatch,
    NotUnimodular,
    complete_laurent_dim0,
    complete_poly_dim0,
    laurent_to_poly_reduce,
)

Z4 = integers_mod(4)
Z6 = integers_mod(6)
Z12 = integers_mod(12)
GF2 = prime_field(2)
GF5 = prime_field(5)


def scrambled_row(A: Ambient, n: int, rng: random.Random, num_ops: int = 8,
                  max_degree: int = 2) -> UnimodularRow:
    w = random_witness(A, n, rng, num_ops=num_ops, max_degree=max_degree)
    return apply_witness(w, standard_basis_row(A, n))


# ---------------------------------------------------------------------------
# basics and frozen cases


def test_identity_row_gives_empty_witness_poly():
    A = poly_ambient(Z12)
    w = complete_poly_dim0(standard_basis_row(A, 3))
    assert w.ops == ()


def test_identity_row_gives_empty_witness_laurent():
    A = laurent_ambient(GF5)
    w = complete_laurent_dim0(standard_basis_row(A, 2))
    assert w.ops == ()


def test_completion_mod_four_frozen_row():
    A = poly_ambient(Z4)
    row = UnimodularRow(A, [A.parse("2X+1"), A.parse("X^2")])
    w = complete_poly_dim0(row)
    assert verify(w, row, standard_basis_row(A, 2)).ok


def test_completion_euclidean_over_prime_field():
    A = poly_ambient(GF5)
    row = UnimodularRow(A, [A.parse("X^2"), A.parse("X+1")])
    w = complete_poly_dim0(row)
    assert verify(w, row, standard_basis_row(A, 2)).ok
    assert len(w.ops) <= 4


def test_laurent_completion_with_monomial_units():
    A = laurent_ambient(GF2)
    row = UnimodularRow(A, [A.parse("X^-1"), A.parse("X")])
    w = complete_laurent_dim0(row)
    assert verify(w, row, standard_basis_row(A, 2)).ok


def test_laurent_completion_with_nilpotent_shift_unit():
    A = laurent_ambient(Z4)
    row = UnimodularRow(A, [A.parse("2X^-1+1"), A.parse("X")])
    w = complete_laurent_dim0(row)
    assert verify(w, row, standard_basis_row(A, 2)).ok


def test_laurent_completion_delegates_through_polynomials():
    A = laurent_ambient(GF5)
    row = UnimodularRow(A, [A.parse("X+1"), A.parse("X^2+X^-1+1")])
    w = complete_laurent_dim0(row)
    assert verify(w, row, standard_basis_row(A, 2)).ok


# ---------------------------------------------------------------------------
# preconditions and failures


def test_wrong_mode_is_rejected():
    A = laurent_ambient(Z4)
    row = standard_basis_row(A, 2)
    with pytest.raises(ValueError):
        complete_poly_dim0(row)
    P = poly_ambient(Z4)
    with pytest.raises(ValueError):
        complete_laurent_dim0(standard_basis_row(P, 2))


def test_positive_dimension_is_rejected():
    A = poly_ambient(integers())
    row = standard_basis_row(A, 2)
    with pytest.raises(DimensionMismatch):
        complete_poly_dim0(row)


def test_single_entry_row_is_rejected():
    A = poly_ambient(GF5)
    with pytest.raises(SizeMismatch):
        complete_poly_dim0(UnimodularRow(A, [A.one()]))


def test_not_unimodular_zero_row():
    A = poly_ambient(GF5)
    row = UnimodularRow(A, [A.zero(), A.zero()])
    with pytest.raises(NotUnimodular):
        complete_poly_dim0(row)


def test_not_unimodular_common_factor():
    A = poly_ambient(GF5)
    row = UnimodularRow(A, [A.parse("X"), A.parse("X^2")])
    with pytest.raises(NotUnimodular):
        complete_poly_dim0(row)


def test_not_unimodular_after_nilpotent_reduction():
    A = poly_ambient(Z4)
    row = UnimodularRow(A, [A.parse("2"), A.parse("X")])
    with pytest.raises(NotUnimodular):
        complete_poly_dim0(row)


def test_not_unimodular_laurent_common_factor():
    A = laurent_ambient(GF2)
    row = UnimodularRow(A, [A.parse("X+1"), A.parse("X^2+1")])
    with pytest.raises(NotUnimodular):
        complete_laurent_dim0(row)


# ---------------------------------------------------------------------------
# laurent-to-polynomial reduction


def test_reduce_noop_on_normalized_polynomial_row():
    A = laurent_ambient(GF5)
    row = UnimodularRow(A, [A.parse("X+1"), A.parse("X^2")])
    w, out = laurent_to_poly_reduce(row)
    assert w.ops == ()
    assert out == row


def test_reduce_single_clearing_op():
    A = laurent_ambient(integers())
    row = UnimodularRow(A, [A.one(), A.parse("X^-5")])
    w, out = laurent_to_poly_reduce(row)
    assert len(w.ops) == 1
    assert w.ops[0].i == 2 and w.ops[0].j == 1
    assert w.ops[0].lam == A.parse("-X^-5")
    assert out.entries == (A.one(), A.zero())


def test_reduce_shifts_unit_monomial_front():
    A = laurent_ambient(GF2)
    row = UnimodularRow(A, [A.parse("X^-1"), A.parse("X")])
    w, out = laurent_to_poly_reduce(row)
    assert apply_witness(w, row) == out
    for entry in out.entries:
        assert entry.is_zero() or entry.low >= 0
    first = out.entries[0]
    assert first.low == 0 and first.coeffs[0] == GF2.one()


def test_reduce_general_row_lands_in_polynomials():
    A = laurent_ambient(Z12)
    rng = random.Random(31)
    hits = 0
    while hits < 25:
        row = scrambled_row(A, 3, rng)
        f1 = row.entries[0]
        if f1.is_zero() or Z12.unit_inverse(f1.coeffs[0]) is None:
            continue
        hits += 1
        w, out = laurent_to_poly_reduce(row)
        assert apply_witness(w, row) == out
        for entry in out.entries:
            assert entry.is_zero() or entry.low >= 0
        first = out.entries[0]
        assert first.low == 0 and first.coeffs[0] == Z12.one()


def test_reduce_rejects_nonunit_bottom_coefficient():
    A = laurent_ambient(integers())
    row = UnimodularRow(A, [A.parse("2X^-1+X"), A.one()])
    with pytest.raises(LeadingNotUnit):
        laurent_to_poly_reduce(row)
    with pytest.raises(LeadingNotUnit):
        laurent_to_poly_reduce(UnimodularRow(A, [A.zero(), A.one()]))


# ---------------------------------------------------------------------------
# randomized soundness across ring families


RING_TEXTS = [
    "Z/4",
    "Z/6",
    "Z/12",
    "GF(2)",
    "GF(5)",
    "GF(7)[t]/(t^2+1)",
    "GF(2) x GF(3)",
    "Q",
]


@pytest.mark.parametrize("ring_text", RING_TEXTS)
@pytest.mark.parametrize("mode", ["poly", "laurent"])
def test_random_scrambles_complete(ring_text, mode):
    ring = parse_ring(ring_text)
    A = Ambient(ring, mode)
    completer = complete_poly_dim0 if mode == "poly" else complete_laurent_dim0
    rng = random.Random(hash((ring_text, mode)) & 0xFFFFFF)
    for trial in range(20):
        n = 2 + (trial % 2)
        row = scrambled_row(A, n, rng)
        w = completer(row)
        assert verify(w, row, standard_basis_row(A, n)).ok


def test_random_scrambles_complete_over_infinite_nonfield():
    from fractions import Fraction

    base = poly_quotient(rationals(), (Fraction(-1), Fraction(0), Fraction(1)))
    assert base.dim() == 0 and not base.is_field()
    A = poly_ambient(base)
    rng = random.Random(77)
    for _ in range(10):
        row = scrambled_row(A, 2, rng, num_ops=6, max_degree=1)
        w = complete_poly_dim0(row)
        assert verify(w, row, standard_basis_row(A, 2)).ok


# ---------------------------------------------------------------------------
# measure instrumentation


def test_coefficient_count_measure_of_row():
    A = poly_ambient(Z4)
    row = UnimodularRow(A, [A.parse("2X+1"), A.parse("X^2")])
    assert CoeffCountMeasure.of_row(row).N == 5
    L = laurent_ambient(Z4)
    lrow = UnimodularRow(L, [L.parse("2X^-1+1"), L.parse("X")])
    assert CoeffCountMeasure.of_row(lrow).N == 3
    assert CoeffCountMeasure(2) < CoeffCountMeasure(3)


@pytest.mark.parametrize("mode", ["poly", "laurent"])
def test_measure_decreases_along_recursion(mode):
    ring = Z12
    A = Ambient(ring, mode)
    completer = complete_poly_dim0 if mode == "poly" else complete_laurent_dim0
    rng = random.Random(5 if mode == "poly" else 6)
    saw_recursion = False
    saw_division = False
    for _ in range(40):
        row = scrambled_row(A, 2, rng)
        log: list = []
        completer(row, measure_log=log)
        for event in log:
            if event[0] == "recurse":
                saw_recursion = True
                _, parent, child = event
                assert child < parent
            elif event[0] == "divide":
                saw_division = True
                _, before, after = event
                assert after < before
    assert saw_recursion
    assert saw_division or mode == "laurent"
