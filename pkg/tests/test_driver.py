"""Tests for the completion engines: descent, matrix words, rewrites."""

from __future__ import annotations

import random

import pytest

from rowcert.driver import (
    RecursionLimit,
    UnsupportedDimension,
    complete_to_invertible,
    matrix_word_ops,
    roitman_rewrite,
    scalar_complete_ops,
    simplify_ops,
)
from rowcert.polyring import (
    Ambient,
    parse_row,
    degree_window,
    high_coeff,
    laurent_ambient,
    low_coeff,
    poly_ambient,
)
from rowcert.rings import (
    integers,
    integers_mod,
    localized,
    poly_over,
    prime_field,
)
from rowcert.witness import (
    ElementaryOp,
    ElementaryWitness,
    NotAUnit,
    UnimodularRow,
    VerificationFailed,
    apply_witness,
    invert_witness,
    random_witness,
    standard_basis_row,
)
from rowcert.zerodim import NotUnimodular

Z = integers()
Z8 = integers_mod(8)
Z12 = integers_mod(12)
GF5 = prime_field(5)
GF5T = poly_over(GF5)


# ---------------------------------------------------------------------------
# scalar descent


def replay_int_triples(vec: dict[int, int], triples) -> dict[int, int]:
    work = dict(vec)
    for (i, j, lam) in triples:
        work[i] = work[i] + lam * work[j]
    return work


def test_scalar_descent_integers_replay():
    rng = random.Random(7)
    for _ in range(50):
        n = rng.choice([2, 3, 4])
        while True:
            vals = [rng.randrange(-30, 31) for _ in range(n)]
            from math import gcd
            g = 0
            for v in vals:
                g = gcd(g, v)
            if g == 1:
                break
        vec = {i + 1: vals[i] for i in range(n)}
        triples = scalar_complete_ops(Z, dict(vec))
        out = replay_int_triples(vec, triples)
        assert out[1] == 1
        assert all(out[i] == 0 for i in vec if i != 1)


def test_scalar_descent_detects_proper_ideals():
    with pytest.raises(NotUnimodular):
        scalar_complete_ops(Z, {1: 2, 2: 4, 3: 6})
    with pytest.raises(NotUnimodular):
        scalar_complete_ops(Z, {1: 0, 2: 0})
    with pytest.raises(NotUnimodular):
        scalar_complete_ops(Z12, {1: 8, 2: 6})
    with pytest.raises(NotUnimodular):
        scalar_complete_ops(Z8, {1: 2, 2: 4})


def test_scalar_descent_zmod_replay():
    rng = random.Random(11)
    done = 0
    while done < 40:
        vals = [rng.randrange(12) for _ in range(3)]
        from math import gcd
        g = 0
        for v in vals:
            g = gcd(g, v)
        if gcd(g, 12) != 1:
            continue
        done += 1
        vec = {i + 1: vals[i] for i in range(3)}
        triples = scalar_complete_ops(Z12, dict(vec))
        work = dict(vec)
        for (i, j, lam) in triples:
            work[i] = (work[i] + lam * work[j]) % 12
        assert work[1] == 1 and work[2] == 0 and work[3] == 0


def test_scalar_descent_poly_kind_scalars():
    # entries t + 1 and t over GF(5)[t]: comaximal
    vec = {1: (1, 1), 2: (0, 1)}
    triples = scalar_complete_ops(GF5T, dict(vec))
    work = {1: (1, 1), 2: (0, 1)}
    for (i, j, lam) in triples:
        work[i] = GF5T.add(work[i], GF5T.mul(lam, work[j]))
    assert GF5T.is_one(work[1]) and GF5T.is_zero(work[2])


def test_scalar_descent_localized_scalars():
    L = localized(Z, 6)
    a = L.from_int(5)
    b = L.from_int(7)
    vec = {1: L.mul(a, L.unit_inverse(L.from_int(2))), 2: b}
    triples = scalar_complete_ops(L, dict(vec))
    work = {1: L.mul(a, L.unit_inverse(L.from_int(2))), 2: b}
    for (i, j, lam) in triples:
        work[i] = L.add(work[i], L.mul(lam, work[j]))
    assert L.is_one(work[1]) and L.is_zero(work[2])


def test_scalar_descent_nonfirst_unit_window():
    # indices need not start at 1 and the unit can sit anywhere
    triples = scalar_complete_ops(Z, {3: 4, 4: 9, 5: 6})
    work = {3: 4, 4: 9, 5: 6}
    out = replay_int_triples(work, triples)
    assert out[3] == 1 and out[4] == 0 and out[5] == 0


# ---------------------------------------------------------------------------
# matrix words


def int_mat_mul(M, N, modulus=None):
    n = len(M)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            s = 0
            for k in range(n):
                s += M[i][k] * N[k][j]
            out[i][j] = s % modulus if modulus else s
    return out


def op_matrix(n, i, j, lam, modulus=None):
    M = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
    M[i - 1][j - 1] = lam % modulus if modulus else lam
    return M


def test_matrix_word_integers():
    rng = random.Random(3)
    for _ in range(25):
        n = rng.choice([2, 3])
        M = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
        for _ in range(8):
            i = rng.randrange(1, n + 1)
            j = rng.randrange(1, n + 1)
            if i == j:
                continue
            M = int_mat_mul(op_matrix(n, i, j, rng.randrange(-4, 5)), M)
        triples = matrix_word_ops(Z, M)
        P = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
        for (i, j, lam) in triples:
            P = int_mat_mul(op_matrix(n, i, j, lam), P)
        assert P == M


def test_matrix_word_zmod():
    rng = random.Random(5)
    for _ in range(25):
        n = 3
        M = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
        for _ in range(10):
            i = rng.randrange(1, n + 1)
            j = rng.randrange(1, n + 1)
            if i == j:
                continue
            M = int_mat_mul(op_matrix(n, i, j, rng.randrange(12), 12), M, 12)
        triples = matrix_word_ops(Z12, M)
        P = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
        for (i, j, lam) in triples:
            P = int_mat_mul(op_matrix(n, i, j, lam, 12), P, 12)
        assert P == M


def test_matrix_word_poly_kind_scalars():
    rng = random.Random(9)
    n = 3
    M = [[GF5T.one() if r == c else GF5T.zero() for c in range(n)] for r in range(n)]
    for _ in range(8):
        i = rng.randrange(1, n + 1)
        j = rng.randrange(1, n + 1)
        if i == j:
            continue
        lam = GF5T.random_element(rng, degree=2)
        E = [[GF5T.one() if r == c else GF5T.zero() for c in range(n)] for r in range(n)]
        E[i - 1][j - 1] = lam
        rows = []
        for r in range(n):
            row = []
            for c in range(n):
                acc = GF5T.zero()
                for k in range(n):
                    acc = GF5T.add(acc, GF5T.mul(E[r][k], M[k][c]))
                row.append(acc)
            rows.append(row)
        M = rows
    triples = matrix_word_ops(GF5T, M)
    P = [[GF5T.one() if r == c else GF5T.zero() for c in range(n)] for r in range(n)]
    for (i, j, lam) in triples:
        Prow = [list(r) for r in P]
        for c in range(n):
            Prow[i - 1][c] = GF5T.add(P[i - 1][c], GF5T.mul(lam, P[j - 1][c]))
        P = Prow
    assert P == M


def test_matrix_word_rejects_bad_determinant():
    with pytest.raises(NotAUnit):
        matrix_word_ops(Z, [[2, 0], [0, 1]])


# ---------------------------------------------------------------------------
# op simplification


def test_simplify_merges_and_cancels():
    A = poly_ambient(Z12)
    x = A.x_power(1)
    ops = [
        ElementaryOp(1, 2, x),
        ElementaryOp(1, 2, A.neg(x)),
        ElementaryOp(1, 3, A.one()),
        ElementaryOp(2, 1, A.zero()),
    ]
    out = simplify_ops(A, ops)
    assert out == [ElementaryOp(1, 3, A.one())]


def test_simplify_preserves_action():
    A = poly_ambient(Z12)
    rng = random.Random(21)
    for _ in range(20):
        w = random_witness(A, 3, rng, 15)
        simp = ElementaryWitness(A, 3, simplify_ops(A, w.ops))
        row = standard_basis_row(A, 3)
        assert apply_witness(w, row).entries == apply_witness(simp, row).entries


# ---------------------------------------------------------------------------
# boundary rewrite


def test_rewrite_matches_worked_example():
    # over Z/8: witness [E(1,2;X)], scalar 2, starting degree bound 2
    A = poly_ambient(Z8)
    w = ElementaryWitness(A, 2, [ElementaryOp(1, 2, A.x_power(1))])
    out = roitman_rewrite(w, 2, mode="poly", row_degree_bound=2)
    c = A.monomial(Z8.from_int(2), 3)
    assert list(out.ops) == [
        ElementaryOp(2, 1, c),
        ElementaryOp(1, 2, A.add(A.x_power(1), c)),
    ]


def test_rewrite_congruent_mod_a():
    A = poly_ambient(Z8)
    w = ElementaryWitness(A, 2, [ElementaryOp(1, 2, A.x_power(1))])
    out = roitman_rewrite(w, 2, mode="poly", row_degree_bound=2)
    f = A.parse("2X^2 + X")
    g = A.parse("X^2")
    row = UnimodularRow(A, (f, g))
    r1 = apply_witness(w, row)
    r2 = apply_witness(out, row)
    for v1, v2 in zip(r1.entries, r2.entries):
        d = A.sub(v1, v2)
        for _, cof in d.terms():
            assert cof % 2 == 0


def _is_signed_power_times(value, base, anchor):
    # value == +-base^k * anchor over the integers
    if anchor == 0:
        return value == 0
    if value % anchor != 0:
        return False
    q = abs(value // anchor)
    while q % base == 0:
        q //= base
    return q == 1


def test_rewrite_power_track_poly():
    A = poly_ambient(Z)
    rng = random.Random(33)
    for _ in range(20):
        w = random_witness(A, 3, rng, 6)
        row = UnimodularRow(A, (A.parse("2X + 1"), A.parse("X^2"), A.parse("3")))
        out = roitman_rewrite(w, 2, mode="poly", row_degree_bound=2)
        res = apply_witness(out, row)
        base = apply_witness(w, row)
        # congruence mod 2, entry by entry
        for v1, v2 in zip(res.entries, base.entries):
            d = A.sub(v1, v2)
            for _, cof in d.terms():
                assert cof % 2 == 0
        # top coefficient stays on the powers-of-two track
        hc = high_coeff(res.entries[0])
        assert _is_signed_power_times(hc, 2, 2)


def test_rewrite_laurent_both_tracks_both_ends():
    A = laurent_ambient(Z)
    rng = random.Random(44)
    for _ in range(20):
        w = random_witness(A, 3, rng, 5)
        f = A.add(A.monomial(2, -1), A.add(A.one(), A.monomial(4, 2)))
        row = UnimodularRow(A, (f, A.x_power(1), A.monomial(3, -2)))
        out = roitman_rewrite(w, 2, mode="laurent-both", row_degree_bound=3)
        res = apply_witness(out, row)
        assert _is_signed_power_times(high_coeff(res.entries[0]), 2, 4)
        assert _is_signed_power_times(low_coeff(res.entries[0]), 2, 2)


def test_rewrite_laurent_hc_only_tracks_top():
    A = laurent_ambient(Z)
    w = ElementaryWitness(A, 2, [ElementaryOp(1, 2, A.x_power(-1))])
    f = A.add(A.monomial(2, 2), A.one())
    row = UnimodularRow(A, (f, A.x_power(1)))
    out = roitman_rewrite(w, 2, mode="laurent-hc", row_degree_bound=2)
    res = apply_witness(out, row)
    assert _is_signed_power_times(high_coeff(res.entries[0]), 2, 2)


def test_rewrite_empty_witness_appends_boundary_pair():
    A = laurent_ambient(Z)
    w = ElementaryWitness(A, 2, [])
    out = roitman_rewrite(w, 3, mode="laurent-both", row_degree_bound=1)
    assert len(out.ops) == 2
    assert (out.ops[0].i, out.ops[0].j) == (2, 1)
    assert (out.ops[1].i, out.ops[1].j) == (1, 2)
    # both inserted parameters are multiples of three
    for op in out.ops:
        for _, cof in op.lam.terms():
            assert cof % 3 == 0


def test_rewrite_untouched_when_no_first_row_ops_poly():
    A = poly_ambient(Z)
    w = ElementaryWitness(A, 3, [ElementaryOp(2, 3, A.x_power(1))])
    out = roitman_rewrite(w, 2, mode="poly")
    # original op kept, one sandwich pair appended
    assert out.ops[0] == w.ops[0]
    assert len(out.ops) == 3


# ---------------------------------------------------------------------------
# invertible completion


def test_complete_to_invertible_roundtrip():
    A = poly_ambient(Z12)
    rng = random.Random(17)
    for _ in range(10):
        w = random_witness(A, 3, rng, 12)
        e1 = standard_basis_row(A, 3)
        row = apply_witness(invert_witness(w), e1)
        V, Vinv = complete_to_invertible(row, w)
        n = 3
        for i in range(n):
            assert V[i][0] == row.entries[i]
        for i in range(n):
            for j in range(n):
                acc = A.zero()
                for k in range(n):
                    acc = A.add(acc, A.mul(V[i][k], Vinv[k][j]))
                assert acc == (A.one() if i == j else A.zero())


def test_complete_to_invertible_rejects_wrong_witness():
    A = poly_ambient(Z12)
    rng = random.Random(18)
    w = random_witness(A, 3, rng, 8)
    bad = UnimodularRow(A, (A.x_power(1), A.one(), A.zero()))
    with pytest.raises(VerificationFailed):
        complete_to_invertible(bad, w)


# ---------------------------------------------------------------------------
# basepoint splitting into one-sided localized factors


from rowcert.driver import (  # noqa: E402
    BasepointNotIdentity,
    NotComaximal,
    UnsupportedRing,
    _scalar_into,
    quillen_split,
)
from rowcert.witness import product_matrix  # noqa: E402


def _replay_product(amb, n, ops):
    M = [[amb.one() if i == j else amb.zero() for j in range(n)] for i in range(n)]
    for op in ops:
        p, q = op.i - 1, op.j - 1
        M[p] = [amb.add(M[p][c], amb.mul(op.lam, M[q][c])) for c in range(n)]
    return M


def _mapped_ops(ops, src_ring, dst_amb):
    out = []
    for op in ops:
        v = dst_amb.zero()
        for e, cof in op.lam.terms():
            moved = _scalar_into(src_ring, dst_amb.ring, cof)
            assert moved is not None
            v = dst_amb.add(v, dst_amb.monomial(moved, e))
        out.append(ElementaryOp(op.i, op.j, v))
    return out


def _assert_split_good(sigma, alpha, beta, s, t, base):
    A = sigma.ambient
    n = sigma.n
    Rs, Rt = alpha.ambient.ring, beta.ambient.ring
    assert Rs.kind == "loc" and Rt.kind == "loc"
    merged = _mapped_ops(beta.ops, Rt, A) + _mapped_ops(alpha.ops, Rs, A)
    assert _replay_product(A, n, merged) == _replay_product(A, n, sigma.ops)
    for w, factor_src, amb in ((alpha, t, alpha.ambient), (beta, s, beta.ambient)):
        ring = amb.ring
        factor = _scalar_into(base, ring, factor_src)
        M = _replay_product(amb, n, w.ops)
        for i in range(n):
            for j in range(n):
                d = amb.sub(M[i][j], amb.one() if i == j else amb.zero())
                if d == amb.zero():
                    continue
                lo, hi = degree_window(d)
                assert lo >= 1
                for e, cof in d.terms():
                    assert ring.divide(cof, factor) is not None


def test_quillen_split_frozen_integer_case():
    R = localized(Z, 6)
    A = poly_ambient(R)
    lam = A.monomial(R.one(), 1)
    lam = A.scale(lam, _scalar_into(Z, R, 6))
    sigma = ElementaryWitness(A, 3, [ElementaryOp(1, 2, lam)])
    alpha, beta = quillen_split(sigma, 2, 3)
    assert alpha.ambient.ring.mult == 2
    assert beta.ambient.ring.mult == 3
    _assert_split_good(sigma, alpha, beta, 2, 3, Z)


def test_quillen_split_empty_witness():
    R = localized(Z, 6)
    A = poly_ambient(R)
    sigma = ElementaryWitness(A, 3, [])
    alpha, beta = quillen_split(sigma, 2, 3)
    assert len(alpha.ops) == 0 and len(beta.ops) == 0


def test_quillen_split_random_integer_cases():
    R = localized(Z, 6)
    A = poly_ambient(R)
    rng = random.Random(11)
    for trial in range(6):
        ops = []
        for _ in range(rng.randrange(1, 4)):
            i = rng.randrange(1, 4)
            j = rng.choice([k for k in range(1, 4) if k != i])
            deg = rng.randrange(1, 3)
            v = A.zero()
            for e in range(1, deg + 1):
                c = rng.randrange(-3, 4)
                if c:
                    v = A.add(v, A.monomial(_scalar_into(Z, R, c), e))
            if v != A.zero():
                ops.append(ElementaryOp(i, j, v))
        sigma = ElementaryWitness(A, 3, ops)
        alpha, beta = quillen_split(sigma, 2, 3)
        _assert_split_good(sigma, alpha, beta, 2, 3, Z)


def test_quillen_split_random_poly_base_cases():
    base = GF5T
    s = (0, 1)
    t = (4, 1)
    R = localized(base, base.mul(s, t))
    A = poly_ambient(R)
    rng = random.Random(13)
    for trial in range(4):
        ops = []
        for _ in range(rng.randrange(1, 3)):
            i = rng.randrange(1, 4)
            j = rng.choice([k for k in range(1, 4) if k != i])
            c = (rng.randrange(1, 5),)
            v = A.monomial(_scalar_into(base, R, c), rng.randrange(1, 3))
            ops.append(ElementaryOp(i, j, v))
        sigma = ElementaryWitness(A, 3, ops)
        alpha, beta = quillen_split(sigma, s, t)
        _assert_split_good(sigma, alpha, beta, s, t, base)


def test_quillen_split_rejects_nontrivial_basepoint():
    R = localized(Z, 6)
    A = poly_ambient(R)
    sigma = ElementaryWitness(A, 3, [ElementaryOp(1, 2, A.one())])
    with pytest.raises(BasepointNotIdentity):
        quillen_split(sigma, 2, 3)


def test_quillen_split_rejects_small_n_and_laurent():
    R = localized(Z, 6)
    A = poly_ambient(R)
    sigma = ElementaryWitness(A, 2, [])
    with pytest.raises(UnsupportedDimension):
        quillen_split(sigma, 2, 3)
    L = laurent_ambient(R)
    lam = L.monomial(_scalar_into(Z, R, 6), 1)
    sig2 = ElementaryWitness(L, 3, [ElementaryOp(1, 2, lam)])
    with pytest.raises(UnsupportedRing):
        quillen_split(sig2, 2, 3)


def test_quillen_split_rejects_non_comaximal_scalars():
    R = localized(Z, 6)
    A = poly_ambient(R)
    sigma = ElementaryWitness(A, 3, [])
    with pytest.raises(NotComaximal):
        quillen_split(sigma, 2, 4)


# ---------------------------------------------------------------------------
# fraction-field polynomial helpers and subrow completion in a quotient


from fractions import Fraction  # noqa: E402

from rowcert.driver import (  # noqa: E402
    _artinian_subrow_ops,
    _fr,
    _kp_add,
    _kp_divmod,
    _kp_egcd,
    _kp_gcd,
    _kp_mod,
    _kp_monic,
    _kp_mul,
    _kp_norm,
)


def _fp(kp):
    return [Fraction(n, d) for (n, d) in kp]


def _fp_norm(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_add(a, b):
    out = [Fraction(0)] * max(len(a), len(b))
    for k in range(len(out)):
        if k < len(a):
            out[k] += a[k]
        if k < len(b):
            out[k] += b[k]
    return _fp_norm(out)


def _fp_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _fp_norm(out)


def _fp_divmod(a, b):
    r = list(a)
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    while len(r) >= len(b):
        c = r[-1] / b[-1]
        k = len(r) - len(b)
        if c:
            q[k] = c
            for i in range(len(b) - 1):
                r[k + i] -= c * b[i]
        r.pop()
        r = _fp_norm(r)
    return _fp_norm(q), r


def _rand_kp(rng, deg, B=Z):
    out = []
    for _ in range(deg + 1):
        n = rng.randrange(-6, 7)
        d = rng.randrange(1, 5)
        out.append(_fr(B, n, d))
    return _kp_norm(B, out)


def test_kp_arithmetic_matches_fraction_oracle():
    rng = random.Random(17)
    for _ in range(60):
        a = _rand_kp(rng, rng.randrange(0, 4))
        b = _rand_kp(rng, rng.randrange(0, 4))
        assert _fp(_kp_add(Z, a, b)) == _fp_add(_fp(a), _fp(b))
        assert _fp(_kp_mul(Z, a, b)) == _fp_mul(_fp(a), _fp(b))
        if b:
            q, r = _kp_divmod(Z, a, b)
            fq, fr = _fp_divmod(_fp(a), _fp(b))
            assert _fp(q) == fq and _fp(r) == fr


def test_kp_egcd_bezout_identity():
    rng = random.Random(19)
    for _ in range(40):
        a = _rand_kp(rng, rng.randrange(0, 4))
        b = _rand_kp(rng, rng.randrange(0, 4))
        g, x, y = _kp_egcd(Z, a, b)
        lhs = _kp_add(Z, _kp_mul(Z, x, a), _kp_mul(Z, y, b))
        assert lhs == g
        if g:
            assert g[-1] == (1, 1)
            assert _kp_mod(Z, a, g) == [] and _kp_mod(Z, b, g) == []


def test_kp_egcd_over_poly_base_field_of_fractions():
    B = GF5T
    rng = random.Random(23)

    def rand(deg):
        out = []
        for _ in range(deg + 1):
            num = tuple(rng.randrange(5) for _ in range(rng.randrange(1, 3)))
            den = (rng.randrange(1, 5),)
            out.append(_fr(B, num, den))
        return _kp_norm(B, out)

    for _ in range(25):
        a, b = rand(rng.randrange(0, 3)), rand(rng.randrange(0, 3))
        g, x, y = _kp_egcd(B, a, b)
        assert _kp_add(B, _kp_mul(B, x, a), _kp_mul(B, y, b)) == g
        if g:
            assert _kp_mod(B, a, g) == [] and _kp_mod(B, b, g) == []


def _fp_replay_subrow(f, xs, ops):
    ff = _fp(f)
    work = [_fp_divmod(_fp(x), ff)[1] for x in xs]
    for (p, q, lam) in ops:
        t = _fp_mul(_fp(lam), work[q])
        work[p] = _fp_divmod(_fp_add(work[p], t), ff)[1]
    return work


def test_artinian_subrow_completion_replay():
    rng = random.Random(29)
    done = 0
    while done < 30:
        deg = rng.randrange(1, 4)
        f = _rand_kp(rng, deg - 1) + [(1, 1)]
        m = rng.choice([2, 3])
        xs = [_rand_kp(rng, rng.randrange(0, deg + 1)) for _ in range(m)]
        g = _kp_monic(Z, list(f))
        for x in xs:
            g = _kp_gcd(Z, g, x)
        if len(g) != 1:
            continue
        ops = _artinian_subrow_ops(Z, f, xs)
        out = _fp_replay_subrow(f, xs, ops)
        assert out[0] == [Fraction(1)]
        assert all(out[j] == [] for j in range(1, m))
        done += 1


def test_artinian_subrow_nilpotent_and_zero_pivot():
    f = [(0, 1), (0, 1), (1, 1)]
    for first in ([(0, 1), (1, 1)], []):
        xs = [list(first), [(1, 1)]]
        ops = _artinian_subrow_ops(Z, f, xs)
        out = _fp_replay_subrow(f, xs, ops)
        assert out[0] == [Fraction(1)] and out[1] == []


def test_artinian_subrow_rejects_proper_ideal():
    f = [(0, 1), (0, 1), (1, 1)]
    xs = [[(0, 1), (1, 1)], [(0, 1), (1, 1)]]
    with pytest.raises(NotUnimodular):
        _artinian_subrow_ops(Z, f, xs)


# ---------------------------------------------------------------------------
# relative completion modulo a principal scalar ideal


from rowcert.driver import (  # noqa: E402
    _jac_machine,
    _matrix_word_dim0,
    complete_relative_jacobson,
)
from rowcert.excision import NotRelative  # noqa: E402
from rowcert.witness import (  # noqa: E402
    PrincipalIdeal,
    UnsupportedIdeal,
    ensure_verifies,
    verify,
)


def _e1_row(amb, n):
    return standard_basis_row(amb, n)


def _congruent_row(amb, rng, n, a, max_deg, laurent=False):
    """Random row == e1 mod (a) made unimodular by a planted cocert shape."""
    ring = amb.ring
    lo = -max_deg if laurent else 0
    entries = []
    for k in range(n):
        v = amb.one() if k == 0 else amb.zero()
        for e in range(lo, max_deg + 1):
            c = rng.randrange(-2, 3)
            if c:
                v = amb.add(v, amb.monomial(ring.mul(ring.from_int(c), a), e))
        entries.append(v)
    return entries


def test_jac_machine_frozen_integer_case():
    A = poly_ambient(Z)
    v = UnimodularRow(A, parse_row(A, "[1+5X^2, 5X, 5]"))
    sigma, w = _jac_machine(v, 5, repair=False)
    moved = UnimodularRow(w.ambient, [  # transport entries into the witness ring
        _value_map_for_test(x, w.ambient) for x in v.entries])
    ensure_verifies(w, moved, standard_basis_row(w.ambient, 3))


def _value_map_for_test(v, dst):
    out = dst.zero()
    for e, cof in v.terms():
        moved = _scalar_into(v.ambient.ring, dst.ring, cof)
        assert moved is not None
        out = dst.add(out, dst.monomial(moved, e))
    return out


def test_jac_machine_random_rows_over_integers():
    A = poly_ambient(Z)
    rng = random.Random(31)
    done = 0
    while done < 12:
        sc = rng.choice([2, 3, 5])
        entries = _congruent_row(A, rng, 3, sc, rng.choice([1, 2]))
        try:
            row = UnimodularRow(A, entries)
            sigma, w = _jac_machine(row, sc, repair=True)
        except NotUnimodular:
            continue
        moved_row = UnimodularRow(w.ambient, [
            _value_map_for_test(x, w.ambient) for x in row.entries])
        rel = PrincipalIdeal(w.ambient, w.ambient.constant(
            _scalar_into(Z, w.ambient.ring, sc)))
        w2 = ElementaryWitness(w.ambient, 3, w.ops, relative=rel)
        ensure_verifies(w2, moved_row, standard_basis_row(w.ambient, 3))
        done += 1


def test_jac_machine_random_laurent_rows():
    A = laurent_ambient(Z)
    rng = random.Random(37)
    done = 0
    while done < 8:
        entries = _congruent_row(A, rng, 3, 3, 2, laurent=True)
        row = UnimodularRow(A, entries)
        try:
            sigma, w = _jac_machine(row, 3, repair=True)
        except NotUnimodular:
            continue
        moved_row = UnimodularRow(w.ambient, [
            _value_map_for_test(x, w.ambient) for x in row.entries])
        rel = PrincipalIdeal(w.ambient, w.ambient.constant(
            _scalar_into(Z, w.ambient.ring, 3)))
        w2 = ElementaryWitness(w.ambient, 3, w.ops, relative=rel)
        ensure_verifies(w2, moved_row, standard_basis_row(w.ambient, 3))
        done += 1


def test_jac_machine_over_poly_base_ring():
    base = GF5T
    A = poly_ambient(base)
    rng = random.Random(41)
    a = (0, 1)
    done = 0
    while done < 6:
        entries = _congruent_row(A, rng, 3, a, 2)
        row = UnimodularRow(A, entries)
        try:
            sigma, w = _jac_machine(row, a, repair=False)
        except NotUnimodular:
            continue
        moved_row = UnimodularRow(w.ambient, [
            _value_map_for_test(x, w.ambient) for x in row.entries])
        ensure_verifies(w, moved_row, standard_basis_row(w.ambient, 3))
        done += 1


def test_relative_jacobson_dim0_nilpotent_scalar():
    A = poly_ambient(integers_mod(4))
    row = UnimodularRow(A, parse_row(A, "[2X+1, 2X^3, 0]"))
    rel = PrincipalIdeal(A, A.constant(2))
    w = complete_relative_jacobson(row, rel)
    rep = verify(w, row, standard_basis_row(A, 3))
    assert rep.ok


def test_relative_jacobson_dim0_non_nilpotent_scalar():
    A = poly_ambient(Z12)
    rng = random.Random(43)
    done = 0
    while done < 5:
        entries = _congruent_row(A, rng, 3, 3, 2)
        row = UnimodularRow(A, entries)
        rel = PrincipalIdeal(A, A.constant(3))
        try:
            w = complete_relative_jacobson(row, rel)
        except NotUnimodular:
            continue
        assert verify(w, row, standard_basis_row(A, 3)).ok
        done += 1


def test_relative_jacobson_zero_ideal_requires_exact_row():
    A = poly_ambient(Z)
    rel = PrincipalIdeal(A, A.zero())
    row = standard_basis_row(A, 3)
    w = complete_relative_jacobson(row, rel)
    assert len(w.ops) == 0
    bad = UnimodularRow(A, parse_row(A, "[1, X, 0]"))
    with pytest.raises(NotRelative):
        complete_relative_jacobson(bad, rel)


def test_relative_jacobson_rejects_short_and_incongruent():
    A = poly_ambient(Z)
    rel = PrincipalIdeal(A, A.constant(5))
    short = UnimodularRow(A, parse_row(A, "[1+5X, 5]"))
    with pytest.raises(UnsupportedDimension):
        complete_relative_jacobson(short, rel)
    off = UnimodularRow(A, parse_row(A, "[X, 1+X, 0]"))
    with pytest.raises(NotRelative):
        complete_relative_jacobson(off, rel)


def test_matrix_word_dim0_reduces_witness_products():
    A = poly_ambient(Z12)
    rng = random.Random(47)
    for _ in range(5):
        w = random_witness(A, 3, rng, num_ops=6, max_degree=2, bound=5)
        mat = product_matrix(w)
        word = _matrix_word_dim0(A, mat)
        acc = [[A.one() if i == j else A.zero() for j in range(3)] for i in range(3)]
        for (i, j, lam) in word:
            p, q = i - 1, j - 1
            acc[p] = [A.add(acc[p][c], A.mul(lam, acc[q][c])) for c in range(3)]
        prod = [[sum_mul(A, acc, mat, r, c) for c in range(3)] for r in range(3)]
        ident = [[A.one() if i == j else A.zero() for j in range(3)] for i in range(3)]
        assert prod == ident


def sum_mul(A, X, Y, r, c):
    acc = A.zero()
    for k in range(len(Y)):
        acc = A.add(acc, A.mul(X[r][k], Y[k][c]))
    return acc


# ---------------------------------------------------------------------------
# chart gluing

from rowcert.driver import (  # noqa: E402
    RingMismatch,
    ShapeViolation,
    _glue_pair,
)


def _charted(W, s):
    As = poly_ambient(localized(Z, s))
    return ElementaryWitness(As, W.n, _mapped_ops(W.ops, Z, As))


def _denominator_spice(w, s, rng):
    """Extra ops with genuine 1/s parameters that keep e1 fixed."""
    As = w.ambient
    inv = As.ring.unit_inverse(_scalar_into(Z, As.ring, s))
    assert inv is not None
    extra = []
    for _ in range(2):
        i = rng.choice([2, 3])
        j = 5 - i
        extra.append(ElementaryOp(i, j, As.monomial(inv, rng.randrange(0, 2))))
    return ElementaryWitness(As, w.n, list(w.ops) + extra)


def test_glue_pair_round_trip_integer_charts():
    A = poly_ambient(Z)
    rng = random.Random(53)
    for trial in range(5):
        W = random_witness(A, 3, rng, 5, max_degree=2, bound=3)
        v = apply_witness(invert_witness(W), standard_basis_row(A, 3))
        w_s = _denominator_spice(_charted(W, 3), 3, rng)
        w_t = _denominator_spice(_charted(W, -2), -2, rng)
        glued = _glue_pair(v, 3, -2, w_s, w_t)
        assert glued.ambient == A
        assert verify(glued, v, standard_basis_row(A, 3))


def test_glue_pair_chart_witnesses_complete_the_mapped_row():
    A = poly_ambient(Z)
    rng = random.Random(59)
    W = random_witness(A, 3, rng, 4, max_degree=2, bound=3)
    v = apply_witness(invert_witness(W), standard_basis_row(A, 3))
    w_s = _denominator_spice(_charted(W, 3), 3, rng)
    As = w_s.ambient
    v_s = UnimodularRow(As, [As.zero() if e.is_zero() else sum(
        (As.monomial(_scalar_into(Z, As.ring, c), k) for k, c in e.terms()),
        As.zero()) for e in v.entries])
    assert verify(w_s, v_s, standard_basis_row(As, 3))


def test_glue_pair_rejects_bad_shapes():
    A = poly_ambient(Z)
    rng = random.Random(61)
    W = random_witness(A, 3, rng, 3, max_degree=1, bound=2)
    v = apply_witness(invert_witness(W), standard_basis_row(A, 3))
    with pytest.raises(NotComaximal):
        _glue_pair(v, 2, 4, _charted(W, 2), _charted(W, 4))
    with pytest.raises(RingMismatch):
        _glue_pair(v, 3, -2, _charted(W, 5), _charted(W, -2))
    L = laurent_ambient(Z)
    WL = random_witness(L, 3, rng, 2, max_degree=1, bound=2)
    vL = apply_witness(invert_witness(WL), standard_basis_row(L, 3))
    with pytest.raises(UnsupportedRing):
        _glue_pair(vL, 3, -2, _charted(W, 3), _charted(W, -2))
    v2 = UnimodularRow(A, list(v.entries[:2]))
    with pytest.raises(UnsupportedDimension):
        _glue_pair(v2, 3, -2, _charted(W, 3), _charted(W, -2))


# ---------------------------------------------------------------------------
# top-level completion

from rowcert.driver import (  # noqa: E402
    LindelCertificate,
    LocalWitnessUnsound,
    PartitionInvalid,
    PartitionOfUnity,
    _whitehead_shift,
    complete_row,
    glue_chain,
    lindel_bridge,
)
from rowcert.polyring import to_mode  # noqa: E402
from rowcert.witness import PrincipalIdeal, verify as _verify  # noqa: E402


def test_whitehead_shift_acts_as_balanced_monomial_scaling():
    A = laurent_ambient(Z)
    f = A.parse("2X^2 + 3")
    g = A.parse("X + 5")
    work = [f, g, A.constant(7)]
    for (i, j, lam) in _whitehead_shift(A, 1, 2, -2):
        work[i - 1] = A.add(work[i - 1], A.mul(lam, work[j - 1]))
    assert work[0] == A.mul(f, A.monomial(1, -2))
    assert work[1] == A.mul(g, A.monomial(1, 2))
    assert work[2] == A.constant(7)


def test_complete_row_integer_poly_frozen():
    A = poly_ambient(Z)
    v = UnimodularRow(A, parse_row(A, "[X^2, X + 1, 0]"))
    w = complete_row(v)
    assert w.ambient == A
    assert _verify(w, v, standard_basis_row(A, 3))


def test_complete_row_gf5t_scramble_round_trip():
    A = poly_ambient(GF5T)
    rng = random.Random(42)
    e1 = standard_basis_row(A, 3)
    W = random_witness(A, 3, rng, 20, max_degree=2, bound=4)
    v = apply_witness(W, e1)
    w = complete_row(v)
    assert _verify(w, v, e1)


def test_complete_row_dim0_delegates():
    for R in (Z12, GF5):
        for mode, amb in (("poly", poly_ambient(R)), ("laurent", laurent_ambient(R))):
            rng = random.Random(5)
            e1 = standard_basis_row(amb, 2)
            W = random_witness(amb, 2, rng, 10, max_degree=2, bound=5)
            v = apply_witness(W, e1)
            w = complete_row(v)
            assert _verify(w, v, e1)


def test_complete_row_integer_poly_scrambles():
    A = poly_ambient(Z)
    rng = random.Random(71)
    e1 = standard_basis_row(A, 3)
    for trial in range(15):
        W = random_witness(A, 3, rng, 10, max_degree=2, bound=3)
        v = apply_witness(W, e1)
        w = complete_row(v)
        assert _verify(w, v, e1)


def test_complete_row_integer_laurent_scrambles():
    A = laurent_ambient(Z)
    rng = random.Random(73)
    e1 = standard_basis_row(A, 3)
    for trial in range(15):
        W = random_witness(A, 3, rng, 10, max_degree=2, bound=3)
        v = apply_witness(W, e1)
        w = complete_row(v)
        assert _verify(w, v, e1)


def test_complete_row_gf5t_laurent_scrambles():
    A = laurent_ambient(GF5T)
    rng = random.Random(79)
    e1 = standard_basis_row(A, 4)
    for trial in range(10):
        W = random_witness(A, 4, rng, 12, max_degree=2, bound=4)
        v = apply_witness(W, e1)
        w = complete_row(v)
        assert _verify(w, v, e1)


def _relative_scramble(A, n, gen, rng, k):
    """Scramble e1 by ops whose parameters are multiples of gen."""
    e1 = standard_basis_row(A, n)
    ops = []
    for _ in range(k):
        i = rng.randrange(1, n + 1)
        j = rng.randrange(1, n)
        if j >= i:
            j += 1
        lam = A.mul(gen, A.random(rng, 1, 3))
        ops.append(ElementaryOp(i, j, lam))
    W = ElementaryWitness(A, n, ops)
    return apply_witness(W, e1)


def test_complete_row_relative_monomial_gen_z12():
    A = poly_ambient(Z12)
    gen = A.parse("X")
    rng = random.Random(107)
    v = _relative_scramble(A, 2, gen, rng, 6)
    ideal = PrincipalIdeal(A, gen)
    w = complete_row(v, relative=ideal)
    assert w.relative == ideal
    assert _verify(w, v, standard_basis_row(A, 2))


def test_complete_row_relative_laurent_shifted_point():
    A = laurent_ambient(Z)
    gen = A.parse("X - 1")
    ideal = PrincipalIdeal(A, gen)
    rng = random.Random(83)
    v = _relative_scramble(A, 3, gen, rng, 5)
    w = complete_row(v, relative=ideal)
    assert w.relative == ideal
    assert _verify(w, v, standard_basis_row(A, 3))


def test_complete_row_relative_scalar_gen_dim0():
    A = laurent_ambient(Z12)
    v = UnimodularRow(A, parse_row(A, "[1 + 3X, 9X^2, 3]"))
    ideal = PrincipalIdeal(A, A.constant(3))
    w = complete_row(v, relative=ideal)
    assert _verify(w, v, standard_basis_row(A, 3))


def test_complete_row_guards():
    A = poly_ambient(Z)
    v = UnimodularRow(A, parse_row(A, "[X, 2]"))
    with pytest.raises(UnsupportedDimension):
        complete_row(v)


def test_glue_chain_integer_partition():
    A = poly_ambient(Z)
    rng = random.Random(89)
    e1 = standard_basis_row(A, 3)
    W = random_witness(A, 3, rng, 5, max_degree=2, bound=3)
    v = apply_witness(invert_witness(W), e1)
    pou = PartitionOfUnity(Z, (3, -2))
    w3 = _denominator_spice(_charted(W, 3), 3, rng)
    glued = glue_chain(v, pou, w3)
    assert glued.ambient == A
    assert _verify(glued, v, e1)


def test_glue_chain_trivial_partition_returns_local_witness():
    A = poly_ambient(Z)
    rng = random.Random(97)
    e1 = standard_basis_row(A, 3)
    W = random_witness(A, 3, rng, 4, max_degree=2, bound=3)
    v = apply_witness(invert_witness(W), e1)
    pou = PartitionOfUnity(Z, (1,))
    out = glue_chain(v, pou, W)
    assert out is W


def test_glue_chain_validations():
    A = poly_ambient(Z)
    rng = random.Random(101)
    e1 = standard_basis_row(A, 3)
    W = random_witness(A, 3, rng, 4, max_degree=2, bound=3)
    v = apply_witness(invert_witness(W), e1)
    with pytest.raises(PartitionInvalid):
        PartitionOfUnity(Z, (3, -1))
    wrong = _charted(random_witness(A, 3, rng, 3, max_degree=1, bound=2), 3)
    with pytest.raises(LocalWitnessUnsound):
        glue_chain(v, PartitionOfUnity(Z, (3, -2)), wrong)


def test_lindel_bridge_free_identity_translation():
    SA = Ambient(Z, "scalar")
    cert = LindelCertificate.free(Z, 1, 2)
    rw = ElementaryWitness(SA, 3, [ElementaryOp(1, 2, SA.constant(4)),
                                   ElementaryOp(2, 1, SA.constant(-3))])
    e1 = standard_basis_row(SA, 3)
    v = apply_witness(invert_witness(rw), e1)
    out = lindel_bridge(v, cert, rw)
    assert [(op.i, op.j, op.lam) for op in out.ops] == \
        [(op.i, op.j, op.lam) for op in rw.ops]
    assert _verify(out, v, e1)


def test_lindel_bridge_functional_row_action():
    SA = Ambient(Z, "scalar")
    cert = LindelCertificate(Z, 2, 2, ((1, 0), (0, 1)), ((2, 0), (0, 2)))
    rw = ElementaryWitness(SA, 3, [ElementaryOp(1, 3, SA.constant(6)),
                                   ElementaryOp(3, 1, SA.constant(2))])
    v = UnimodularRow(SA, [SA.constant(13), SA.constant(0), SA.constant(-2)])
    bridged = lindel_bridge(v, cert, rw)
    assert [(op.i, op.j) for op in bridged.ops] == [(1, 3), (3, 1)]
    assert bridged.ops[0].lam == SA.constant(6)
    assert bridged.ops[1].lam == SA.constant(2)
    assert _verify(bridged, v, standard_basis_row(SA, 3))


def test_lindel_bridge_shape_violation():
    SA = Ambient(Z, "scalar")
    cert = LindelCertificate.free(Z, 1, 2)
    rw = ElementaryWitness(SA, 3, [ElementaryOp(2, 3, SA.constant(5))])
    v = standard_basis_row(SA, 3)
    from rowcert.driver import ShapeViolation as SV
    with pytest.raises(SV):
        lindel_bridge(v, cert, rw)
