import itertools
import random

import pytest

from sympelem.errors import BadIndices, NonZeroDet
from sympelem.matrices import Matrix, matrix_from_text
from sympelem.rings import PolyRing, Rationals, Zmod
from sympelem.symplectic import (
    block2_make,
    block2_mul,
    block_e,
    gen_abcd,
    gen_corner,
    gen_s,
    gen_small,
    graded_block,
    is_symplectic,
    psi_form,
    shape_matrix,
    splitting,
    symp_inverse,
)

Q = Rationals()
PXY = PolyRing(Q, ("x", "y"))
X = PXY.var("x")
Y = PXY.var("y")
Z15 = Zmod(15)


def test_psi_convention():
    p1 = psi_form(Z15, 1)
    assert p1 == Matrix.from_ints(Z15, [[0, 1], [-1, 0]])
    p2 = psi_form(Z15, 2)
    assert p2.submatrix(0, 0, 2, 2) == p1
    assert p2.submatrix(2, 2, 2, 2) == p1
    assert p2.submatrix(0, 2, 2, 2) == Matrix.zero(Z15, 2, 2)
    # psi^t psi = I
    assert p2.transpose().mul(p2) == Matrix.identity(Z15, 4)


def test_is_symplectic_examples():
    assert is_symplectic(Matrix.identity(Z15, 4))
    d = Matrix.from_ints(Z15, [[1, 0, 0, 0], [0, 2, 0, 0], [0, 0, 1, 0], [0, 0, 0, 8]])
    assert not is_symplectic(d)
    assert is_symplectic(gen_s(PXY, 2, 1, 3, X))


def test_gen_s_entries():
    s13 = gen_s(PXY, 2, 1, 3, X)
    assert s13.rows[0][2] == X and s13.rows[3][1] == PXY.neg(X)
    s14 = gen_s(PXY, 2, 1, 4, Y)
    assert s14.rows[0][3] == Y and s14.rows[2][1] == Y
    assert gen_s(Z15, 2, 1, 3, 0) == Matrix.identity(Z15, 4)


def test_gen_s_bad_indices():
    with pytest.raises(BadIndices):
        gen_s(Z15, 2, 1, 1, 3)
    with pytest.raises(BadIndices):
        gen_s(Z15, 2, 1, 2, 3)   # j = pi(i)
    with pytest.raises(BadIndices):
        gen_s(Z15, 2, 3, 4, 3)


def test_gen_s_additivity():
    rng = random.Random(1)
    from sympelem.symplectic import pi_swap
    for n in (2, 3):
        for i in range(1, 2 * n + 1):
            for j in range(1, 2 * n + 1):
                if i == j or j == pi_swap(i):
                    continue
                a, b = Z15.sample(rng), Z15.sample(rng)
                assert gen_s(Z15, n, i, j, a).mul(gen_s(Z15, n, i, j, b)) == \
                    gen_s(Z15, n, i, j, Z15.add(a, b))


def test_gen_corner():
    m = gen_corner(Z15, 2, "E21", 7)
    assert m.rows[1][0] == 7
    a = gen_corner(Z15, 3, "E21", 4).mul(gen_corner(Z15, 3, "E21", 5))
    assert a == gen_corner(Z15, 3, "E21", 9)
    assert is_symplectic(gen_corner(Z15, 1, "E12", 11))


def test_block2_table_matches_matrices():
    for s1, s2 in itertools.product("ABCD", repeat=2):
        p = block2_make(s1, X)
        q = block2_make(s2, Y)
        got = block2_mul(PXY, p, q)
        want = shape_matrix(PXY, s1, X).mul(shape_matrix(PXY, s2, Y))
        assert got.matrix(PXY) == want, (s1, s2)


def test_block2_specific_entries():
    a_b = block2_mul(PXY, block2_make("A", X), block2_make("B", Y))
    assert a_b.shape == "B" and a_b.param == PXY.scale_int(2, PXY.mul(X, Y))
    b_a = block2_mul(PXY, block2_make("B", X), block2_make("A", Y))
    assert b_a.matrix(PXY) == Matrix.zero(PXY, 2, 2)
    d_c = block2_mul(PXY, block2_make("D", X), block2_make("C", Y))
    assert d_c.shape == "C" and d_c.param == PXY.scale_int(-2, PXY.mul(X, Y))


def test_block_e():
    assert block_e(Z15, 3, {}) == Matrix.identity(Z15, 6)
    m = block_e(PXY, 2, {2: shape_matrix(PXY, "A", X)})
    assert is_symplectic(m)
    # a transvection is a one-block matrix
    blk = Matrix(PXY, [(X, PXY.zero), (PXY.zero, PXY.zero)])
    assert gen_s(PXY, 2, 1, 3, X) == block_e(PXY, 2, {2: blk})
    with pytest.raises(NonZeroDet):
        block_e(PXY, 2, {2: Matrix.identity(PXY, 2)})


def test_gen_abcd_additivity_and_inverse():
    rng = random.Random(2)
    for n in (2, 3):
        for shape in "ABCD":
            for i in range(2, n + 1):
                a, b = Z15.sample(rng), Z15.sample(rng)
                assert gen_abcd(Z15, n, shape, i, a).mul(gen_abcd(Z15, n, shape, i, b)) == \
                    gen_abcd(Z15, n, shape, i, Z15.add(a, b))
                assert symp_inverse(gen_abcd(Z15, n, shape, i, a)) == \
                    gen_abcd(Z15, n, shape, i, Z15.neg(a))
                assert gen_abcd(Z15, n, shape, i, 0) == Matrix.identity(Z15, 2 * n)
    with pytest.raises(BadIndices):
        gen_abcd(Z15, 2, "A", 3, 1)


def test_gen_small():
    assert gen_small(Z15, 2, "B", 1, 0) == Matrix.identity(Z15, 4)
    rng = random.Random(3)
    for n in (2, 3):
        for shape in ("B", "C"):
            for j in range(1, n + 1):
                yv, zv = Z15.sample(rng), Z15.sample(rng)
                u = gen_small(Z15, n, shape, j, yv)
                assert is_symplectic(u)
                assert u.submatrix(2 * j - 2, 2 * j - 2, 2, 2).det2() == Z15.one
                # additivity of same-shape units
                assert u.mul(gen_small(Z15, n, shape, j, zv)) == \
                    gen_small(Z15, n, shape, j, Z15.add(yv, zv))
    # same-shape units at any positions commute
    for j1 in (1, 2, 3):
        for j2 in (1, 2, 3):
            u1 = gen_small(Z15, 3, "B", j1, 7)
            u2 = gen_small(Z15, 3, "B", j2, 4)
            assert u1.mul(u2) == u2.mul(u1)
    with pytest.raises(BadIndices):
        gen_small(Z15, 2, "A", 1, 1)


def test_splitting():
    top, bottom = splitting(Z15, 2, {})
    assert top == bottom == Matrix.identity(Z15, 4)
    blocks = {2: shape_matrix(PXY, "A", X)}
    top, bottom = splitting(PXY, 2, blocks)
    e = block_e(PXY, 2, blocks)
    assert top.mul(bottom) == e
    assert bottom.mul(top) == e
    # inverse of E(X) is E(-X)
    assert symp_inverse(e) == block_e(PXY, 2, {2: shape_matrix(PXY, "A", PXY.neg(X))})
    rng = random.Random(4)
    for _ in range(20):
        lam, mu = Z15.sample(rng), Z15.sample(rng)
        xv, yv = Z15.sample(rng), Z15.sample(rng)
        blocks = {2: Matrix(Z15, [(Z15.mul(lam, xv), Z15.mul(lam, yv)),
                                  (Z15.mul(mu, xv), Z15.mul(mu, yv))]),
                  3: Matrix(Z15, [(Z15.mul(lam, yv), Z15.mul(lam, xv)),
                                  (Z15.mul(mu, yv), Z15.mul(mu, xv))])}
        top, bottom = splitting(Z15, 3, blocks)
        e = block_e(Z15, 3, blocks)
        assert top.mul(bottom) == e and bottom.mul(top) == e


def test_block_row_additivity_when_interaction_vanishes():
    rng = random.Random(6)

    def graded(lam, mu, x, y):
        return Matrix(Z15, [(Z15.mul(lam, x), Z15.mul(lam, y)),
                            (Z15.mul(mu, x), Z15.mul(mu, y))])

    for _ in range(20):
        lam, mu = Z15.sample(rng), Z15.sample(rng)
        vals = [Z15.sample(rng) for _ in range(6)]
        # disjoint positions: the cross terms pair different blocks
        r1 = {2: graded(lam, mu, vals[0], vals[1])}
        r2 = {3: graded(lam, mu, vals[2], vals[3])}
        total = {2: r1[2], 3: r2[3]}
        assert block_e(Z15, 3, r1).mul(block_e(Z15, 3, r2)) == block_e(Z15, 3, total)
        # proportional rows at the same position: the pairing is alternating
        c = vals[4]
        r1 = {2: graded(lam, mu, vals[0], vals[1])}
        r2 = {2: graded(lam, mu, Z15.mul(c, vals[0]), Z15.mul(c, vals[1]))}
        total = {2: r1[2].add(r2[2])}
        assert block_e(Z15, 3, r1).mul(block_e(Z15, 3, r2)) == block_e(Z15, 3, total)


def test_constructors_symplectic_symbolically():
    for n in (2, 3, 4):
        for shape in "ABCD":
            assert is_symplectic(gen_abcd(PXY, n, shape, n, X))
        assert is_symplectic(gen_small(PXY, n, "C", 1, Y))
        assert is_symplectic(graded_block(PXY, n, X, Y, X, Y, 2))


def test_matrix_text_round_trip():
    m = gen_abcd(PXY, 2, "A", 2, X)
    line = m.to_text()
    assert line.startswith("sympmat n=2 ring=poly:q:x,y")
    back = matrix_from_text(line)
    assert back == m


def test_is_symplectic_rejects_odd_size():
    from sympelem.errors import DimensionMismatch
    with pytest.raises(DimensionMismatch):
        is_symplectic(Matrix.identity(Z15, 3))


def test_poly_ring_has_half():
    assert PXY.inv2 == PXY.const(Q.inv2)
    assert PXY.add(PXY.inv2, PXY.inv2) == PXY.one
