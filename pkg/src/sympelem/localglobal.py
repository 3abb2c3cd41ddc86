"""Conjugation decompositions over localizations, the dilation argument,
patching along a comaximal cover, and the normality demonstration.

Everything here works with parameters written as s^e * c where c lives in
the numerator ring (R, or R[X], or R[Y][X] for the two-variable case);
the exponent bookkeeping is what the valuation traces report. Every
produced word is verified against its defining matrix identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    BadIndices,
    CoverNotComaximal,
    ExponentTooSmall,
    LocalWordMismatch,
    NotHomotopy,
    StepBudgetExceeded,
    StepVerificationFailed,
)
from .rings import Localized, PolyRing, parse_element
from .symplectic import symp_inverse
from .words import ABCDAtom, CornerMatrixAtom, Word, atom_matrix

DEFAULT_FUEL = 64
MAX_ATOMS = 200_000


# ---------------------------------------------------------------------------
# parameter bookkeeping: s^e * c with c in a numerator ring
# ---------------------------------------------------------------------------

class SContext:
    """A working ring containing R_s together with the numerator ring R
    (or R[X], ...) and the s-power action connecting them."""

    def __init__(self, work, num, embed, scale, integral, s_num):
        self.work = work          # ring of atom parameters
        self.num = num            # numerator ring
        self.embed = embed        # num rep -> work rep
        self.scale = scale        # (work rep, e) -> work rep * s^e
        self.integral = integral  # work rep -> num rep or None
        self.s_num = s_num        # s as an element of the numerator ring

    def param(self, e, c):
        """s^e * c as a working-ring element, c in the numerator ring."""
        return self.scale(self.embed(c), e)


def context_for_localized(loc):
    return SContext(
        work=loc,
        num=loc.base,
        embed=loc.embed,
        scale=loc.s_power_mul,
        integral=lambda a: a[0] if a[1] == 0 else None,
        s_num=loc.s,
    )


def context_for_poly_over_localized(polyring):
    loc = polyring.base
    if not isinstance(loc, Localized):
        raise TypeError("need a polynomial ring over a localization")
    num = PolyRing(loc.base, polyring.names)

    def embed(c):
        return c and tuple((e, loc.embed(v)) for e, v in c) or ()

    def scale(p, e):
        return tuple((ee, loc.s_power_mul(v, e)) for ee, v in p)

    def integral(p):
        out = []
        for ee, v in p:
            if v[1] != 0:
                return None
            out.append((ee, v[0]))
        return tuple(out)

    return SContext(polyring, num, embed, scale, integral, num.const(loc.s))


@dataclass
class ValuationTrace:
    k: int
    m: int
    entries: list = field(default_factory=list)  # (shape, pos, exponent, coeff)

    def record(self, shape, pos, e, c):
        self.entries.append((shape, pos, e, c))

    def min_exponent(self):
        return min((e for _, _, e, _ in self.entries), default=None)

    def __len__(self):
        return len(self.entries)


class _Emitter:
    def __init__(self, ctx, trace):
        self.ctx = ctx
        self.trace = trace
        self.atoms = []
        self.entries = []  # mirrors self.atoms as (shape, pos, e, c)

    def shape(self, sh, pos, e, c):
        if self.ctx.num.is_zero(c):
            return
        self.atoms.append(ABCDAtom(sh, pos, self.ctx.param(e, c)))
        self.trace.record(sh, pos, e, c)
        self.entries.append((sh, pos, e, c))

    def unit(self, sh, pos, i_for_corner, e, c):
        """Expand I perp (I_2 + sh(s^e c)) perp I as a 4-atom commutator,
        splitting the exponent between the two bracket parameters."""
        num = self.ctx.num
        if num.is_zero(c):
            return
        if e >= 2:
            e2 = e // 2
            e1 = e - e2
        else:
            e1, e2 = e, 0
        quarter = num.mul(num.inv2, num.inv2)
        u = num.mul(c, quarter)
        if sh == "B":
            pair = (("A", i_for_corner), ("B", i_for_corner)) if pos == 1 else (("D", pos), ("B", pos))
        else:
            pair = (("C", i_for_corner), ("D", i_for_corner)) if pos == 1 else (("C", pos), ("A", pos))
        (s1, p1), (s2, p2) = pair
        self.shape(s1, p1, e1, u)
        self.shape(s2, p2, e2, num.one)
        self.shape(s1, p1, e1, num.neg(u))
        self.shape(s2, p2, e2, num.neg(num.one))

    def emit_inverse_of(self, entries):
        for sh, pos, e, c in reversed(entries):
            self.shape(sh, pos, e, self.ctx.num.neg(c))


# crossing pairs and the plain commutator shapes (the corrected table)
_CROSS = {("A", "D"), ("D", "A"), ("B", "C"), ("C", "B")}
_FREE_AT_DISTANCE = {("A", "B"), ("B", "A"), ("C", "D"), ("D", "C")}


def conj_decompose(locring, n, Xshape, i, a, k, Yshape, j, m, x, fuel=DEFAULT_FUEL):
    """Word for E(X_i)(a/s^k) E(Y_j)(s^m x) E(X_i)(a/s^k)^-1 over R_s,
    together with its valuation trace. Requires m > k."""
    if m <= k:
        raise ExponentTooSmall(f"need m > k, got m={m}, k={k}")
    ctx = context_for_localized(locring)
    return _conj_decompose_ctx(ctx, n, Xshape, i, a, k, Yshape, j, m, x, fuel=fuel)


def _conj_decompose_ctx(ctx, n, Xshape, i, a, k, Yshape, j, m, x, fuel=DEFAULT_FUEL, verify=True):
    if not (2 <= i <= n and 2 <= j <= n):
        raise BadIndices("positions must lie in 2..n")
    num = ctx.num
    trace = ValuationTrace(k, m)
    em = _Emitter(ctx, trace)

    if Xshape == Yshape or num.is_zero(a) or num.is_zero(x):
        em.shape(Yshape, j, m, x)
    elif i != j and (Xshape, Yshape) in _FREE_AT_DISTANCE:
        em.shape(Yshape, j, m, x)
    elif i != j or (Xshape, Yshape) not in _CROSS:
        # the commutator word with the exponent split across the pair
        q = (m - k) // 2
        p = (m - k) - q
        em.shape(Xshape, i, p, a)
        em.shape(Yshape, j, q, x)
        em.shape(Xshape, i, p, num.neg(a))
        em.shape(Yshape, j, q, num.neg(x))
        em.shape(Yshape, j, m, x)
    else:
        _case3_same_position(ctx, em, n, Xshape, Yshape, i, a, k, m, x)

    word = Word(ctx.work, n, em.atoms)
    if len(word) > 45:
        raise StepVerificationFailed(f"decomposition length {len(word)} exceeds 45")
    if verify:
        g = atom_matrix(ctx.work, n, ABCDAtom(Xshape, i, ctx.param(-k, a)))
        h = atom_matrix(ctx.work, n, ABCDAtom(Yshape, j, ctx.param(m, x)))
        if word.eval() != g.mul(h).mul(symp_inverse(g)):
            raise StepVerificationFailed("conjugation decomposition is off")
    return word, trace


def _case3_same_position(ctx, em, n, X, Y, i, a, k, m, x):
    """Same-position crossing pairs, via the composite commutator route.

    The conjugated element is rewritten as y_g [z_g, w_g] with y_g, w_g
    placed units and z_g a block generator; the group identity
    [g, h[k,l]] = [g,h] h [[g,k]k, [g,l]l] [l,k] h^-1 then turns the
    conjugation into commutators with tabulated closed forms, and the
    final [l,k] h^-1 h [k,l] cancellation leaves [g,h] h [[g,k]k, [g,l]l].
    """
    num = ctx.num
    m3 = m // 3
    rem = m - 3 * m3
    inv8 = num.pow_int(num.inv2, 3)
    u = num.mul(num.mul(inv8, x), num.pow_int(ctx.s_num, rem))
    a2 = num.mul(a, a)
    a2u = num.mul(a2, u)
    au = num.mul(a, u)
    sc = num.scale_int
    one = num.one

    def emit_pair(unit_args, shape_args):
        em.unit(*unit_args)
        em.shape(*shape_args)

    if (X, Y) == ("A", "D"):
        emit_pair(("C", i, i, 4 * m3 - 2 * k, sc(64, a2u)), ("C", i, 4 * m3 - k, sc(-32, au)))
        em.unit("C", 1, i, 4 * m3, sc(16, u))
        P = [("C", i, i, m3 - k, sc(4, a)), ("C", i, m3, num.neg(one))]
        Q = [("B", 1, i, 2 * m3 - 2 * k, sc(16, a2u)), ("B", i, 2 * m3 - k, sc(8, au)),
             ("B", i, i, 2 * m3, sc(4, u))]
    elif (X, Y) == ("B", "C"):
        emit_pair(("B", 1, i, 4 * m3 - 2 * k, sc(-64, a2u)), ("A", i, 4 * m3 - k, sc(32, au)))
        em.unit("C", i, i, 4 * m3, sc(16, u))
        P = [("B", 1, i, m3 - k, sc(-4, a)), ("A", i, m3, one)]
        Q = [("B", i, i, 2 * m3 - 2 * k, sc(16, a2u)), ("D", i, 2 * m3 - k, sc(-8, au)),
             ("C", 1, i, 2 * m3, sc(-4, u))]
    elif (X, Y) == ("D", "A"):
        emit_pair(("B", i, i, 4 * m3 - 2 * k, sc(64, a2u)), ("B", i, 4 * m3 - k, sc(32, au)))
        em.unit("B", 1, i, 4 * m3, sc(16, u))
        P = [("B", i, i, m3 - k, sc(4, a)), ("B", i, m3, one)]
        Q = [("C", 1, i, 2 * m3 - 2 * k, sc(16, a2u)), ("C", i, 2 * m3 - k, sc(-8, au)),
             ("C", i, i, 2 * m3, sc(4, u))]
    elif (X, Y) == ("C", "B"):
        emit_pair(("C", i, i, 4 * m3 - 2 * k, sc(64, a2u)), ("A", i, 4 * m3 - k, sc(32, au)))
        em.unit("B", 1, i, 4 * m3, sc(-16, u))
        P = [("C", i, i, m3 - k, sc(4, a)), ("A", i, m3, one)]
        Q = [("C", 1, i, 2 * m3 - 2 * k, sc(-16, a2u)), ("D", i, 2 * m3 - k, sc(-8, au)),
             ("B", i, i, 2 * m3, sc(4, u))]
    else:
        raise BadIndices(f"({X},{Y}) is not a crossing pair")

    def emit_items(items):
        start = len(em.entries)
        for it in items:
            if len(it) == 5:
                em.unit(*it)
            else:
                em.shape(*it)
        return em.entries[start:]

    p_entries = emit_items(P)
    q_entries = emit_items(Q)
    em.emit_inverse_of(p_entries)
    em.emit_inverse_of(q_entries)


# ---------------------------------------------------------------------------
# group identity rearrangement
# ---------------------------------------------------------------------------

def group_identity_shuffle(pairs):
    """Given pairs (a_i, b_i) of words, return the word
    prod_i (r_i b_i r_i^-1) * prod_i a_i with r_i = a_1 ... a_i;
    it evaluates to prod_i (a_i b_i)."""
    if not pairs:
        raise ValueError("need at least one pair")
    ring, n = pairs[0][0].ring, pairs[0][0].n
    out = []
    prefix = []
    for a_word, b_word in pairs:
        prefix = prefix + list(a_word.atoms)
        r_inv = list(Word(ring, n, prefix).inverse().atoms)
        out.extend(prefix + list(b_word.atoms) + r_inv)
    for a_word, _ in pairs:
        out.extend(a_word.atoms)
    return Word(ring, n, out)


# ---------------------------------------------------------------------------
# dilation
# ---------------------------------------------------------------------------

def _param_valuation(ctx, c, cap):
    """Exponent e and numerator x with c = s^e x, x integral; None if the
    parameter cannot be cleared at this cap."""
    if ctx.work.is_zero(c):
        return 0, ctx.num.zero
    lo, hi = -cap, cap
    best = None
    e = hi
    while e >= lo:
        x = ctx.integral(ctx.scale(c, -e))
        if x is not None:
            best = (e, x)
            break
        e -= 1
    return best


def dilate(base_ring, s, n, word, fuel=DEFAULT_FUEL, max_atoms=MAX_ATOMS):
    """Clear the localization denominators of a homotopy word.

    ``word`` is over R_s[X] and must evaluate to the identity at X = 0.
    Returns (m, word over R[X]) with the output evaluating (embedded) to
    the input at X replaced by s^m X. The smallest working m is found by
    search; each candidate m is accepted only if every parameter of the
    reassembled word lands in R[X].
    """
    RsX = word.ring
    if not (isinstance(RsX, PolyRing) and RsX.nvars == 1 and isinstance(RsX.base, Localized)):
        raise TypeError("dilate needs a word over R_s[X]")
    Rs = RsX.base
    ctx = context_for_poly_over_localized(RsX)
    RX = ctx.num
    Xvar = RsX.names[0]

    # homotopy check at X = 0
    at_zero = word.map_params(RsX.eval_at_zero, Rs)
    if not at_zero.eval().is_identity():
        raise NotHomotopy("word does not evaluate to the identity at X = 0")

    # the constant parts form the conjugating prefixes; keep them as
    # peephole-merged words (inverse pairs cancel, which is what keeps the
    # conjugation chains short for words built from bracket expansions)
    steps = []    # (shape, pos, simplified prefix snapshot, linear part)
    prefix = []   # simplified list of (shape, pos, b0)
    den_cap = 0
    for atom in word.atoms:
        if not isinstance(atom, ABCDAtom):
            raise TypeError("dilate needs a pure shape word")
        b0 = RsX.eval_at_zero(atom.e)
        bp = RsX.shift_down(atom.e)
        den_cap = max(den_cap, b0[1], max((v[1] for _, v in bp), default=0))
        if bp:
            steps.append((atom.shape, atom.pos, list(prefix), bp))
        if not Rs.is_zero(b0):
            prefix.append((atom.shape, atom.pos, b0))
            while len(prefix) >= 2 and prefix[-1][0] == prefix[-2][0] \
                    and prefix[-1][1] == prefix[-2][1]:
                merged = Rs.add(prefix[-2][2], prefix[-1][2])
                sh_m, pos_m, _ = prefix[-2]
                prefix[-2:] = [] if Rs.is_zero(merged) else [(sh_m, pos_m, merged)]

    for m in range(0, fuel + 1):
        try:
            out_atoms = []
            for (shape, pos, pre, bp) in steps:
                smx = RsX.mul(RsX.const(Rs.embed(base_ring.pow_int(s, m))), RsX.var(Xvar))
                param = RsX.mul(smx, RsX.subst(bp, {Xvar: smx}))
                got = _param_valuation(ctx, param, m + den_cap + 4)
                if got is None:
                    raise ExponentTooSmall("parameter does not clear")
                e0, x0 = got
                chain = [(shape, pos, e0, x0)]
                if pre and all(b0[1] == 0 for (_, _, b0) in pre):
                    # denominator-free prefix: keep the conjugation
                    # syntactic, no decomposition needed
                    wrap = [(bsh, bpos, 0, ctx.num.const(b0[0])) for (bsh, bpos, b0) in pre]
                    unwrap = [(bsh, bpos, be, ctx.num.neg(bx))
                              for (bsh, bpos, be, bx) in reversed(wrap)]
                    chain = wrap + chain + unwrap
                else:
                    # conjugate through the constant prefix, innermost first
                    for (bsh, bpos, b0) in reversed(pre):
                        a_num, k_den = b0
                        a_lift = ctx.num.const(a_num)
                        new_chain = []
                        for (zsh, zpos, ze, zx) in chain:
                            if ze <= k_den and not (zsh == bsh or ctx.num.is_zero(zx)):
                                raise ExponentTooSmall("chain exponent too small")
                            sub, subtr = _conj_decompose_ctx(
                                ctx, n, bsh, bpos, a_lift, k_den, zsh, zpos, ze, zx,
                                verify=False)
                            for (osh, opos, oe, ox) in subtr.entries:
                                new_chain.append((osh, opos, oe, ox))
                        chain = new_chain
                        if len(chain) > max_atoms:
                            raise StepBudgetExceeded("dilation chain too long")
                out_atoms.extend(chain)
            # all parameters must land in R[X]
            final = []
            for (osh, opos, oe, ox) in out_atoms:
                if oe < 0:
                    raise ExponentTooSmall("negative exponent survives")
                final.append(ABCDAtom(osh, opos, _rx_scale(RX, base_ring, s, oe, ox)))
            out = Word(RX, n, final)
            # verification: embed into R_s[X] and compare with word(s^m X)
            embed_out = out.map_params(ctx.embed, RsX)
            smx = RsX.mul(RsX.const(Rs.embed(base_ring.pow_int(s, m))), RsX.var(Xvar))
            target = word.map_params(lambda p: RsX.subst(p, {Xvar: smx}), RsX)
            if embed_out.eval() != target.eval():
                raise StepVerificationFailed("dilated word does not match")
            return m, out
        except (ExponentTooSmall, StepBudgetExceeded):
            continue
    raise StepBudgetExceeded(f"no dilation exponent found up to {fuel}")


def _rx_scale(RX, base_ring, s, e, x):
    return RX.mul(RX.const(base_ring.pow_int(s, e)), x)


# ---------------------------------------------------------------------------
# comaximal covers and patching
# ---------------------------------------------------------------------------

@dataclass
class CoverData:
    """Finitely many (s_i, c_i, b_i, N_i) with sum c_i b_i = 1 and
    b_i in (s_i^{N_i})."""

    entries: list  # (s, c, b, N)

    def validate(self, ring):
        total = ring.zero
        for (s, c, b, N) in self.entries:
            total = ring.add(total, ring.mul(c, b))
            w = b
            for _ in range(N):
                w = ring.try_exact_div(w, s)
                if w is None:
                    raise CoverNotComaximal(
                        f"b={ring.show(b)} is not in (s^{N}) for s={ring.show(s)}")
        if not ring.is_one(total):
            raise CoverNotComaximal("sum of c_i b_i is not 1")

    def cofactor(self, ring, idx, power):
        """v with b_idx = s_idx^power * v, by exact division."""
        s, _, b, _ = self.entries[idx]
        w = b
        for _ in range(power):
            w = ring.try_exact_div(w, s)
            if w is None:
                raise CoverNotComaximal(
                    f"b={ring.show(b)} is not in (s^{power}) for s={ring.show(s)}")
        return w

    @staticmethod
    def from_text(ring, text):
        entries = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = dict(tok.split("=", 1) for tok in line.split())
            try:
                entries.append((parse_element(ring, fields["s"]),
                                parse_element(ring, fields["c"]),
                                parse_element(ring, fields["b"]),
                                int(fields["N"])))
            except KeyError as exc:
                raise CoverNotComaximal(f"cover line {lineno}: missing {exc}") from None
        return CoverData(entries)

    def to_text(self, ring):
        fmt = lambda v: ring.show(v).replace(" ", "")
        return "\n".join(
            f"s={fmt(s)} c={fmt(c)} b={fmt(b)} N={N}" for (s, c, b, N) in self.entries) + "\n"


def _split_params_to(RsX, p):
    """Map an R[X] polynomial representation into R_s[X]."""
    Rs = RsX.base
    return tuple((e, Rs.embed(c)) for e, c in p)


def patch(base_ring, n, alpha, cover, local_words, fuel=DEFAULT_FUEL):
    """Assemble a global homotopy word from local ones.

    ``alpha`` is a symplectic matrix over R[X] with alpha(0) = I; each
    local word lives over R_{s_i}[X] and must evaluate to alpha there.
    The output word is over R[X] and evaluates to alpha exactly.
    """
    RX = alpha.ring
    if not (isinstance(RX, PolyRing) and RX.nvars == 1):
        raise TypeError("alpha must live over R[X]")
    Xvar = RX.names[0]
    cover.validate(base_ring)
    if not alpha.map(RX.eval_at_zero, base_ring).is_identity():
        raise NotHomotopy("alpha(0) must be the identity")

    k = len(cover.entries)
    if len(local_words) != k:
        raise LocalWordMismatch("need one local word per cover entry")

    # two-variable tower: R[Y] as the spectator base, then localize, then [X]
    yvar = "Y" if Xvar != "Y" else "W"
    RY = PolyRing(base_ring, (yvar,))

    factors = []
    for idx, ((s, c, b, N), local) in enumerate(zip(cover.entries, local_words)):
        Rs = Localized(base_ring, s)
        RsX = PolyRing(Rs, (Xvar,))
        if local.ring.descriptor() != RsX.descriptor():
            raise LocalWordMismatch(f"local word {idx} is over {local.ring.descriptor()}")
        alpha_loc = alpha.map(lambda p: _split_params_to(RsX, p), RsX)
        if local.eval() != alpha_loc:
            raise LocalWordMismatch(f"local word {idx} does not evaluate to alpha")

        # beta(X, Y) = w(X + Y) w(Y)^-1 over (R[Y])_s [X]
        RYs = Localized(RY, RY.const(s))
        RYsX = PolyRing(RYs, (Xvar,))

        def lift(p):  # R_s[X] -> (R[Y])_s[X]
            return tuple((e, (RY.const(v[0]), v[1])) for e, v in p)

        y_const = RYsX.const(RYs.embed(RY.var(yvar)))
        x_plus_y = RYsX.add(RYsX.var(Xvar), y_const)
        w_lift = local.map_params(lift, RYsX)
        w_xy = w_lift.map_params(lambda p: RYsX.subst(p, {Xvar: x_plus_y}))
        w_y = w_lift.map_params(lambda p: RYsX.subst(p, {Xvar: y_const}))
        beta = w_xy.concat(w_y.inverse())

        m, w_global = dilate(RY, RY.const(s), n, beta, fuel=fuel)
        v = cover.cofactor(base_ring, idx, m)

        # substitute X -> c*v*X and Y -> T_idx, landing in R[X]
        T = RX.zero
        for (s2, c2, b2, _) in cover.entries[idx + 1:]:
            T = RX.add(T, RX.mul(RX.const(base_ring.mul(c2, b2)), RX.var(Xvar)))
        cvx = RX.mul(RX.const(base_ring.mul(c, v)), RX.var(Xvar))

        def to_global(p):  # (R[Y])[X] -> R[X] with X -> cvX, Y -> T
            out = RX.zero
            for (e,), coeff_y in p:  # coeff_y in R[Y]
                cy = RX.zero
                for (ey,), cc in coeff_y:
                    cy = RX.add(cy, RX.mul(RX.const(cc), RX.pow_int(T, ey)))
                out = RX.add(out, RX.mul(cy, RX.pow_int(cvx, e)))
            return out

        factors.append(w_global.map_params(to_global, RX))

    out = Word(RX, n, [a for f in factors for a in f.atoms])
    if out.eval() != alpha:
        raise StepVerificationFailed("patched word does not evaluate to alpha")
    return out


# ---------------------------------------------------------------------------
# normality demonstration
# ---------------------------------------------------------------------------

def normality_demo(base_ring, n, gamma_word, h_word, cover, fuel=DEFAULT_FUEL):
    """Word for gamma * eval(h) * gamma^-1 over the shape alphabet.

    gamma is given constructively (a generator word, or a single det-1
    corner block); h is a shape word. The route follows the local-global
    argument: scale h by a homotopy variable, conjugate locally at every
    cover element, patch the local words, then evaluate at 1.
    """
    from .rewrite import conj_abcd_atom, decompose_full

    RT = PolyRing(base_ring, ("T",))
    h_t = h_word.map_params(lambda p: RT.mul(RT.const(p), RT.var("T")), RT)
    gamma = gamma_word.eval()
    gamma_t = gamma.map(RT.const, RT)
    alpha = gamma_t.mul(h_t.eval()).mul(symp_inverse(gamma_t))

    corner_route = (len(gamma_word) == 1
                    and isinstance(gamma_word.atoms[0], CornerMatrixAtom))

    local_words = []
    for (s, c, b, N) in cover.entries:
        Rs = Localized(base_ring, s)
        RsT = PolyRing(Rs, ("T",))
        h_loc = h_word.map_params(lambda p: RsT.const(Rs.embed(p)), RsT)
        h_loc_t = h_loc.map_params(lambda p: RsT.mul(p, RsT.var("T")))
        if corner_route:
            rows = gamma_word.atoms[0].rows
            delta_rows = tuple(tuple(RsT.const(Rs.embed(v)) for v in r) for r in rows)
            atoms = []
            for atom in h_loc_t.atoms:
                atoms.extend(conj_abcd_atom(RsT, n, delta_rows, atom))
            local_words.append(Word(RsT, n, atoms))
        else:
            g_loc = gamma_word.map_params(Rs.embed, Rs)
            cert = decompose_full(g_loc)
            g_abcd = cert.output_word.map_params(lambda p: RsT.const(p), RsT)
            local_words.append(g_abcd.concat(h_loc_t).concat(g_abcd.inverse()))

    patched = patch(base_ring, n, alpha, cover, local_words, fuel=fuel)
    out = patched.map_params(lambda p: patched.ring.eval_at(p, base_ring.one), base_ring)
    if out.eval() != gamma.mul(h_word.eval()).mul(symp_inverse(gamma)):
        raise StepVerificationFailed("normality conjugation is off")
    return out
