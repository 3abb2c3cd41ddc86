import itertools
import random

import pytest

from sympelem import localglobal as lg
from sympelem.errors import (
    CoverNotComaximal,
    ExponentTooSmall,
    LocalWordMismatch,
    NotHomotopy,
)
from sympelem.rings import Localized, PolyRing, Rationals, Zmod
from sympelem.symplectic import symp_inverse
from sympelem.words import ABCDAtom, CornerAtom, CornerMatrixAtom, SAtom, Word

Q = Rationals()
QT = PolyRing(Q, ("t",))
T = QT.var("t")
RT = Localized(QT, T)
Z15 = Zmod(15)


def embed_word_params(word, loc, target):
    return word.map_params(lambda p: tuple((e, loc.embed(c)) for e, c in p), target)


def test_conj_decompose_case1():
    w, tr = lg.conj_decompose(RT, 3, "A", 2, QT.from_int(3), 1, "A", 3, 3, QT.one)
    assert len(w) == 1
    assert tr.entries[0] == ("A", 3, 3, QT.one)


def test_conj_decompose_case2():
    a = QT.from_int(3)
    x = QT.add(QT.from_int(2), T)
    w, tr = lg.conj_decompose(RT, 3, "A", 2, a, 1, "B", 2, 3, x)
    assert len(w) == 5
    exps = [e for _, _, e, _ in tr.entries]
    assert all(e >= 1 for e in exps)
    # distance case for a free pair is a single atom
    w, tr = lg.conj_decompose(RT, 3, "A", 2, a, 1, "B", 3, 3, x)
    assert len(w) == 1


def test_conj_decompose_exponent_guard():
    with pytest.raises(ExponentTooSmall):
        lg.conj_decompose(RT, 3, "A", 2, QT.one, 2, "B", 2, 2, QT.one)


_UNIT_AT_1_PAIRS = {("A", "B"), ("B", "A"), ("C", "D"), ("D", "C")}
_CROSSING_PAIRS = {("A", "D"), ("D", "A"), ("B", "C"), ("C", "B")}


def test_conj_decompose_full_sweep():
    a = QT.from_int(3)
    x = QT.add(QT.from_int(2), T)
    for X, Y in itertools.product("ABCD", repeat=2):
        for i, j in itertools.product((2, 3), repeat=2):
            for (k, m) in ((1, 2), (1, 3), (2, 4)):
                w, tr = lg.conj_decompose(RT, 3, X, i, a, k, Y, j, m, x)
                assert len(w) <= 45
                if X == Y or (i != j and (X, Y) in _UNIT_AT_1_PAIRS):
                    assert len(w) == 1, (X, Y, i, j)
                elif (X, Y) in _CROSSING_PAIRS and i == j:
                    assert len(w) == 37, (X, Y, i, j)
                else:
                    assert len(w) <= 5, (X, Y, i, j)


def test_conj_decompose_valuation_growth():
    # minimum recorded exponent is non-decreasing in m and eventually large
    for (X, Y) in (("A", "D"), ("B", "C")):
        mins = []
        for m in range(2, 19):
            w, tr = lg.conj_decompose(RT, 3, X, 2, QT.from_int(3), 1, Y, 2, m, QT.one)
            mins.append(tr.min_exponent())
        assert all(a <= b for a, b in zip(mins, mins[1:]))
        assert mins[-1] >= 2
    # plain commutator cases have positive exponents once m - k >= 2
    for m in range(3, 9):
        w, tr = lg.conj_decompose(RT, 3, "A", 2, QT.from_int(3), 1, "C", 2, m, QT.one)
        assert tr.min_exponent() >= 1


def test_group_identity_shuffle():
    rng = random.Random(41)
    for _ in range(500):
        pairs = []
        for _ in range(rng.randint(1, 4)):
            aw = Word(Z15, 2, [ABCDAtom(rng.choice("ABCD"), 2, Z15.sample(rng))
                               for _ in range(rng.randint(0, 2))])
            bw = Word(Z15, 2, [ABCDAtom(rng.choice("ABCD"), 2, Z15.sample(rng))
                               for _ in range(rng.randint(0, 2))])
            pairs.append((aw, bw))
        out = lg.group_identity_shuffle(pairs)
        naive = Word(Z15, 2, [a for aw, bw in pairs for a in aw.atoms + bw.atoms])
        assert out.eval() == naive.eval()
    single = lg.group_identity_shuffle([(Word(Z15, 2, [ABCDAtom("A", 2, 3)]),
                                         Word(Z15, 2, [ABCDAtom("B", 2, 4)]))])
    assert single.eval() == Word(Z15, 2, [ABCDAtom("A", 2, 3), ABCDAtom("B", 2, 4)]).eval()


def _rsx():
    return PolyRing(RT, ("X",))


def test_dilate_documented_example():
    rsx = _rsx()
    param = rsx.mul(rsx.var("X"), rsx.const(RT.frac(QT.from_int(3), 1)))
    w = Word(rsx, 2, [ABCDAtom("A", 2, param)])
    m, out = lg.dilate(QT, T, 2, w)
    assert m <= 3
    # output lives over R[X] and embeds back to the dilated input
    assert out.ring.descriptor() == "poly:poly:q:t:X"


def test_dilate_trivial_cases():
    rsx = _rsx()
    m, out = lg.dilate(QT, T, 2, Word(rsx, 2, []))
    assert m == 0 and len(out) == 0
    param = rsx.mul(rsx.var("X"), rsx.const(RT.embed(QT.from_int(2))))
    m, out = lg.dilate(QT, T, 2, Word(rsx, 2, [ABCDAtom("B", 2, param)]))
    assert m == 0


def test_dilate_rejects_non_homotopy():
    rsx = _rsx()
    w = Word(rsx, 2, [ABCDAtom("A", 2, rsx.const(RT.embed(QT.one)))])
    with pytest.raises(NotHomotopy):
        lg.dilate(QT, T, 2, w)


def test_dilate_with_constant_prefix():
    rsx = _rsx()
    u = RT.frac(QT.from_int(5), 1)
    vv = RT.frac(QT.from_int(2), 1)
    w = Word(rsx, 2, [
        ABCDAtom("A", 2, rsx.mul(rsx.var("X"), rsx.const(u))),
        ABCDAtom("C", 2, rsx.add(rsx.const(vv), rsx.var("X"))),
        ABCDAtom("C", 2, rsx.const(RT.neg(vv))),
    ])
    m, out = lg.dilate(QT, T, 2, w)
    assert m >= 1
    # exactness was verified inside; double-check the embedding here
    rs = RT
    embed_out = out.map_params(lambda p: tuple((e, rs.embed(c)) for e, c in p), rsx)
    smx = rsx.mul(rsx.const(rs.embed(QT.pow_int(T, m))), rsx.var("X"))
    target = w.map_params(lambda p: rsx.subst(p, {"X": smx}), rsx)
    assert embed_out.eval() == target.eval()


def _z15_cover():
    return lg.CoverData([(2, 1, 2, 1), (4, 11, 4, 1)])


def test_cover_validation():
    cov = _z15_cover()
    cov.validate(Z15)
    bad = lg.CoverData([(2, 1, 2, 1), (4, 1, 4, 1)])  # 2 + 4 = 6 != 1
    with pytest.raises(CoverNotComaximal):
        bad.validate(Z15)
    # b not in (s^N)
    one_m_t = QT.sub(QT.one, T)
    bad = lg.CoverData([(T, QT.one, QT.one, 1), (one_m_t, QT.one, T, 1)])
    with pytest.raises(CoverNotComaximal):
        bad.validate(QT)


def test_cover_text_round_trip():
    cov = _z15_cover()
    text = cov.to_text(Z15)
    back = lg.CoverData.from_text(Z15, text)
    assert back.entries == cov.entries
    qt_cov = lg.CoverData([(T, QT.one, T, 1), (QT.sub(QT.one, T), QT.one, QT.sub(QT.one, T), 1)])
    back = lg.CoverData.from_text(QT, qt_cov.to_text(QT))
    assert back.entries == qt_cov.entries


def test_patch_trivial_cover():
    cov = lg.CoverData([(Z15.one, Z15.one, Z15.one, 0)])
    cov.validate(Z15)
    rx = PolyRing(Z15, ("X",))
    aw = Word(rx, 2, [ABCDAtom("A", 2, rx.mul(rx.const(7), rx.var("X")))])
    loc = Localized(Z15, Z15.one)
    lw = embed_word_params(aw, loc, PolyRing(loc, ("X",)))
    out = lg.patch(Z15, 2, aw.eval(), cov, [lw])
    assert out.eval() == aw.eval()


def test_patch_z15_random_homotopies():
    rng = random.Random(42)
    cov = _z15_cover()
    cov.validate(Z15)
    rx = PolyRing(Z15, ("X",))
    for trial in range(10):
        atoms = [ABCDAtom(rng.choice("ABCD"), 2,
                          rx.mul(rx.const(Z15.sample(rng)), rx.var("X")))
                 for _ in range(rng.randint(1, 2))]
        aw = Word(rx, 2, atoms)
        locs = []
        for (s, c, b, N) in cov.entries:
            loc = Localized(Z15, s)
            locs.append(embed_word_params(aw, loc, PolyRing(loc, ("X",))))
        out = lg.patch(Z15, 2, aw.eval(), cov, locs)
        assert out.eval() == aw.eval()
        assert rx.eval_at_zero  # output evaluates to I at X = 0 via alpha(0) = I
        at0 = out.map_params(rx.eval_at_zero, Z15)
        assert at0.eval().is_identity()


def test_patch_qt_cover():
    one_m_t = QT.sub(QT.one, T)
    c1 = QT.sub(QT.from_int(3), QT.scale_int(2, T))
    c2 = QT.add(QT.one, QT.scale_int(2, T))
    cov = lg.CoverData([(T, c1, QT.mul(T, T), 2),
                        (one_m_t, c2, QT.mul(one_m_t, one_m_t), 2)])
    cov.validate(QT)
    rx = PolyRing(QT, ("X",))
    aw = Word(rx, 2, [ABCDAtom("A", 2, rx.mul(rx.const(QT.from_int(2)), rx.var("X")))])
    locs = []
    for (s, c, b, N) in cov.entries:
        loc = Localized(QT, s)
        locs.append(embed_word_params(aw, loc, PolyRing(loc, ("X",))))
    out = lg.patch(QT, 2, aw.eval(), cov, locs)
    assert out.eval() == aw.eval()


def test_patch_detects_bad_local_word():
    cov = _z15_cover()
    rx = PolyRing(Z15, ("X",))
    aw = Word(rx, 2, [ABCDAtom("A", 2, rx.mul(rx.const(7), rx.var("X")))])
    locs = []
    for (s, c, b, N) in cov.entries:
        loc = Localized(Z15, s)
        wrong = Word(rx, 2, [ABCDAtom("A", 2, rx.mul(rx.const(8), rx.var("X")))])
        locs.append(embed_word_params(wrong, loc, PolyRing(loc, ("X",))))
    with pytest.raises(LocalWordMismatch):
        lg.patch(Z15, 2, aw.eval(), cov, locs)


def test_normality_demo_identity_gamma():
    cov = _z15_cover()
    h = Word(Z15, 2, [ABCDAtom("A", 2, 3)])
    gamma = Word(Z15, 2, [])
    out = lg.normality_demo(Z15, 2, gamma, h, cov)
    assert out.eval() == h.eval()


def test_normality_demo_generator_gamma():
    cov = _z15_cover()
    h = Word(Z15, 2, [ABCDAtom("A", 2, 3), ABCDAtom("C", 2, 7)])
    gamma = Word(Z15, 2, [SAtom(1, 3, 4), CornerAtom("E21", 2)])
    out = lg.normality_demo(Z15, 2, gamma, h, cov)
    g = gamma.eval()
    assert out.eval() == g.mul(h.eval()).mul(symp_inverse(g))
    assert all(isinstance(a, ABCDAtom) for a in out.atoms)


def test_normality_demo_corner_gamma():
    cov = _z15_cover()
    h = Word(Z15, 2, [ABCDAtom("B", 2, 5)])
    gamma = Word(Z15, 2, [CornerMatrixAtom(((7, 3), (2, 1)))])  # det 1 mod 15
    out = lg.normality_demo(Z15, 2, gamma, h, cov)
    g = gamma.eval()
    assert out.eval() == g.mul(h.eval()).mul(symp_inverse(g))
