import random

import pytest

from sympelem import rewrite as rw
from sympelem.errors import AlphabetViolation, NotE2Witnessed, UnsupportedBlock
from sympelem.matrices import Matrix
from sympelem.rings import PolyRing, Rationals, Zmod
from sympelem.symplectic import corner_embed, gen_corner, pi_swap
from sympelem.words import ABCDAtom, CornerAtom, SAtom, UnitAtom, Word

Z15 = Zmod(15)
Q = Rationals()
QX = PolyRing(Q, ("x",))


def rand_gen_word(ring, n, length, rng, corner_prob=0.3):
    atoms = []
    for _ in range(length):
        if rng.random() < corner_prob:
            atoms.append(CornerAtom(rng.choice(["E12", "E21"]), ring.sample(rng)))
        else:
            while True:
                i, j = rng.randint(1, 2 * n), rng.randint(1, 2 * n)
                if i != j and j != pi_swap(i):
                    break
            atoms.append(SAtom(i, j, ring.sample(rng)))
    return Word(ring, n, atoms)


def test_rule_files_match_discovery():
    for n in (2, 3, 4):
        shipped = rw._rules_for(n)
        fresh = rw.discover_s_rules(n)
        assert shipped == fresh


def test_reduce_to_row12():
    w = Word(Z15, 3, [SAtom(3, 5, 7)])
    r = rw.reduce_to_row12(w)
    assert r.eval() == w.eval()
    assert all(a.i in (1, 2) for a in r.atoms if isinstance(a, SAtom))
    # a mirrored atom reduces to a single transvection
    w = Word(Z15, 2, [SAtom(3, 1, 7)])
    r = rw.reduce_to_row12(w)
    assert len(r) == 1 and r.eval() == w.eval()
    # already-reduced atoms pass through
    w = Word(Z15, 2, [SAtom(1, 3, 4)])
    assert rw.reduce_to_row12(w).atoms == w.atoms
    rng = random.Random(31)
    for n in (2, 3, 4):
        for _ in range(10):
            w = rand_gen_word(Z15, n, rng.randint(0, 6), rng)
            r = rw.reduce_to_row12(w)
            assert r.eval() == w.eval()
    with pytest.raises(AlphabetViolation):
        rw.reduce_to_row12(Word(Z15, 2, [ABCDAtom("A", 2, 1)]))


def test_decompose_initial_single_transvection():
    x = QX.var("x")
    w = Word(QX, 2, [SAtom(1, 3, x)])
    witness, body, _ = rw.decompose_initial(w)
    assert len(body) <= 6
    assert all(isinstance(a, (ABCDAtom, UnitAtom)) for a in body.atoms)
    assert corner_embed(witness.matrix, 2).mul(body.eval()) == w.eval()
    # the witness factorization matches its matrix
    got = Matrix.identity(QX, 2)
    for atom in witness.word:
        blk = gen_corner(QX, 1, atom.kind, atom.e)
        got = got.mul(blk)
    assert got == witness.matrix


def test_decompose_initial_empty_and_corner_fold():
    witness, body, _ = rw.decompose_initial(Word(Z15, 2, []))
    assert witness.matrix.is_identity() and len(body) == 0
    # corner-sandwiched transvections: the closed form of the leading
    # corner conjugation identity
    rng = random.Random(32)
    for _ in range(10):
        lam, xv, yv = (Z15.sample(rng) for _ in range(3))
        w = Word(Z15, 2, [CornerAtom("E21", lam), SAtom(1, 3, xv), SAtom(1, 4, yv),
                          CornerAtom("E21", Z15.neg(lam))])
        witness, body, _ = rw.decompose_initial(w)
        assert corner_embed(witness.matrix, 2).mul(body.eval()) == w.eval()


def test_decompose_initial_rejects_high_rows():
    with pytest.raises(AlphabetViolation):
        rw.decompose_initial(Word(Z15, 3, [SAtom(3, 5, 1)]))


def test_push_units_left():
    rng = random.Random(33)
    # structured bodies from the initial decomposition
    for n in (2, 3):
        for _ in range(10):
            w = rand_gen_word(Z15, n, rng.randint(1, 6), rng)
            reduced = rw.reduce_to_row12(w)
            _, body, _ = rw.decompose_initial(reduced)
            diag, tail, _ = rw.push_units_left(body)
            assert all(isinstance(a, ABCDAtom) for a in tail.atoms)
            assert diag.matrix().mul(tail.eval()) == body.eval()
            assert 1 not in diag.factors
    # unit already on the left stays
    body = Word(Z15, 2, [UnitAtom("B", 2, 4), ABCDAtom("A", 2, 3)])
    diag, tail, _ = rw.push_units_left(body)
    assert diag.matrix().mul(tail.eval()) == body.eval()
    # no units: nothing to do
    body = Word(Z15, 2, [ABCDAtom("A", 2, 3), ABCDAtom("D", 2, 5)])
    diag, tail, _ = rw.push_units_left(body)
    assert not diag.factors and list(tail.atoms) == list(body.atoms)


def test_units_to_abcd():
    rng = random.Random(34)
    diag = rw.DiagBlocks(Z15, 3)
    diag.push("C", 2, 7)
    diag.push("B", 3, 4)
    diag.push("C", 3, 2)
    word, _ = rw.units_to_abcd(diag)
    assert word.eval() == diag.matrix()
    assert all(isinstance(a, ABCDAtom) for a in word.atoms)
    # block 1 must be trivial
    bad = rw.DiagBlocks(Z15, 2)
    bad.push("B", 1, 3)
    with pytest.raises(UnsupportedBlock):
        rw.units_to_abcd(bad)
    # empty diagonal gives the empty word
    word, _ = rw.units_to_abcd(rw.DiagBlocks(Z15, 2))
    assert len(word) == 0


def test_corner_to_abcd():
    rng = random.Random(35)
    for n in (2, 3):
        for kind in ("E21", "E12"):
            for _ in range(5):
                c = Z15.sample(rng)
                word, _ = rw.corner_to_abcd(Z15, n, [CornerAtom(kind, c)])
                assert all(isinstance(a, ABCDAtom) for a in word.atoms)
                assert word.eval() == gen_corner(Z15, n, kind, c)
    # several corner atoms concatenate
    atoms = [CornerAtom("E12", 3), CornerAtom("E21", 7)]
    word, _ = rw.corner_to_abcd(Z15, 2, atoms)
    want = gen_corner(Z15, 2, "E12", 3).mul(gen_corner(Z15, 2, "E21", 7))
    assert word.eval() == want
    with pytest.raises(NotE2Witnessed):
        rw.corner_to_abcd(Z15, 2, [ABCDAtom("A", 2, 1)])


def test_conj_abcd_atom():
    rng = random.Random(36)
    from sympelem.symplectic import symp_inverse
    from sympelem.words import atom_matrix, eval_atoms
    for n in (2, 3):
        for _ in range(10):
            t, u = Z15.sample(rng), Z15.sample(rng)
            delta = Matrix.from_ints(Z15, [[1, 0], [t, 1]]).mul(
                Matrix.from_ints(Z15, [[1, u], [0, 1]]))
            atom = ABCDAtom(rng.choice("ABCD"), rng.randint(2, n), Z15.sample(rng))
            out = rw.conj_abcd_atom(Z15, n, delta.rows, atom)
            emb = corner_embed(delta, n)
            want = emb.mul(atom_matrix(Z15, n, atom)).mul(symp_inverse(emb))
            assert eval_atoms(Z15, n, out) == want


@pytest.mark.parametrize("route", ["segmented", "staged"])
def test_decompose_full_routes(route):
    rng = random.Random(37)
    for n in (2, 3):
        for _ in range(8):
            w = rand_gen_word(Z15, n, rng.randint(0, 5), rng)
            cert = rw.decompose_full(w, route=route)
            assert cert.verified
            assert all(isinstance(a, ABCDAtom) for a in cert.output_word.atoms)
            assert cert.output_word.eval() == w.eval()


def test_decompose_full_idempotent_alphabet():
    rng = random.Random(38)
    for _ in range(5):
        w = rand_gen_word(Z15, 2, 4, rng)
        cert = rw.decompose_full(w)
        again = rw.decompose_full(cert.output_word)
        assert again.output_word.eval() == w.eval()
        assert all(isinstance(a, ABCDAtom) for a in again.output_word.atoms)


def test_decompose_full_mixed_alphabet():
    rng = random.Random(40)
    w = Word(Z15, 3, [ABCDAtom("A", 2, 3), SAtom(3, 5, 4), UnitAtom("B", 1, 2),
                      CornerAtom("E12", 5), UnitAtom("C", 3, 9)])
    cert = rw.decompose_full(w)
    assert cert.output_word.eval() == w.eval()
    assert all(isinstance(a, ABCDAtom) for a in cert.output_word.atoms)


def test_conjugation_closure_of_shape_words():
    # det-1 corner conjugates of shape words are again shape words
    from sympelem.symplectic import symp_inverse
    rng = random.Random(41)
    for _ in range(10):
        t, u = Z15.sample(rng), Z15.sample(rng)
        delta = Matrix.from_ints(Z15, [[1, 0], [t, 1]]).mul(
            Matrix.from_ints(Z15, [[1, u], [0, 1]]))
        h = Word(Z15, 3, [ABCDAtom(rng.choice("ABCD"), rng.randint(2, 3), Z15.sample(rng))
                          for _ in range(rng.randint(1, 3))])
        out = []
        for atom in h.atoms:
            out.extend(rw.conj_abcd_atom(Z15, 3, delta.rows, atom))
        emb = corner_embed(delta, 3)
        assert Word(Z15, 3, out).eval() == emb.mul(h.eval()).mul(symp_inverse(emb))
        assert all(isinstance(a, ABCDAtom) for a in out)


def test_decompose_full_over_polynomials():
    rng = random.Random(39)
    qt = PolyRing(Q, ("t",))
    for _ in range(3):
        w = rand_gen_word(qt, 2, 3, rng)
        cert = rw.decompose_full(w)
        assert cert.output_word.eval() == w.eval()


def test_certificate_trace_records_steps():
    w = Word(Z15, 2, [SAtom(1, 3, 4), CornerAtom("E21", 2)])
    cert = rw.decompose_full(w)
    assert cert.trace
    rules = {r for r, _, _ in cert.trace}
    assert "graded-split" in rules or "form-split" in rules
    assert cert.summary().startswith("in=2 atoms")


def test_decompose_full_n4():
    rng = random.Random(44)
    for _ in range(4):
        w = rand_gen_word(Z15, 4, rng.randint(1, 6), rng)
        cert = rw.decompose_full(w)
        assert all(isinstance(a, ABCDAtom) for a in cert.output_word.atoms)
        assert cert.output_word.eval() == w.eval()
