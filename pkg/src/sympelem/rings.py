"""Commutative rings with exact arithmetic, canonical representations and
decidable equality.

Every ring here guarantees an invertible 2 (residue rings must have odd
modulus) and represents elements canonically, so equality is plain ``==``
on representations:

* ``Zmod(m)``      -- ints in ``[0, m)``
* ``Rationals()``  -- ``fractions.Fraction``
* ``PolyRing``     -- tuple of ``(exponent_tuple, coeff)`` pairs, graded-lex
                      descending, zero coefficients dropped
* ``Localized``    -- pairs ``(numerator, k)`` standing for ``num / s^k``
                      with ``k`` minimal

Representations are immutable and hashable, which lets matrices over them
be cached. Rings are immutable after construction and safe to share.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import EvenModulus, NilpotentS, ParseError, ZeroDivisorS


class Ring:
    """Base class; subclasses fill in arithmetic on raw representations."""

    kind = "abstract"

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def eq(self, a, b):
        return a == b

    def is_zero(self, a):
        return a == self.zero

    def is_one(self, a):
        return a == self.one

    def half(self, a):
        return self.mul(self.inv2, a)

    def pow_int(self, a, e):
        if e < 0:
            raise ValueError("negative power")
        acc = self.one
        base = a
        while e:
            if e & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            e >>= 1
        return acc

    def from_int(self, k):
        neg = k < 0
        k = abs(k)
        acc, base = self.zero, self.one
        while k:
            if k & 1:
                acc = self.add(acc, base)
            base = self.add(base, base)
            k >>= 1
        return self.neg(acc) if neg else acc

    def scale_int(self, k, a):
        return self.mul(self.from_int(k), a)

    def dot(self, row, col):
        """Inner product of two equal-length tuples of representations."""
        acc = self.zero
        for u, v in zip(row, col):
            if u == self.zero or v == self.zero:
                continue
            acc = self.add(acc, self.mul(u, v))
        return acc

    def try_invert(self, a):
        """Return a^-1 or None when not (detectably) invertible."""
        return None

    def try_exact_div(self, a, d):
        """Return q with q*d == a, or None."""
        inv = self.try_invert(d)
        if inv is not None:
            return self.mul(a, inv)
        return None

    def is_nilpotent_elem(self, a):
        return self.is_zero(a)

    def is_zero_divisor_elem(self, a):
        """Best-effort detection; False means 'not detectably a zero divisor'."""
        return self.is_zero(a)

    def sample(self, rng, small=False):
        raise NotImplementedError

    def show(self, a):
        raise NotImplementedError

    def descriptor(self):
        raise NotImplementedError

    def __repr__(self):
        return f"<ring {self.descriptor()}>"


class Zmod(Ring):
    kind = "zmod"

    def __init__(self, m):
        if m % 2 == 0:
            raise EvenModulus(f"modulus {m} is even, 2 is not invertible")
        if m < 3:
            raise ValueError("modulus must be >= 3")
        self.m = m
        self.zero = 0
        self.one = 1 % m
        self.inv2 = pow(2, -1, m)

    def add(self, a, b):
        return (a + b) % self.m

    def neg(self, a):
        return (-a) % self.m

    def mul(self, a, b):
        return (a * b) % self.m

    def from_int(self, k):
        return k % self.m

    def dot(self, row, col):
        return sum(u * v for u, v in zip(row, col)) % self.m

    def try_invert(self, a):
        if math.gcd(a, self.m) != 1:
            return None
        return pow(a, -1, self.m)

    def try_exact_div(self, a, d):
        inv = self.try_invert(d)
        if inv is not None:
            return a * inv % self.m
        if self.m <= 10**5:
            for q in range(self.m):
                if q * d % self.m == a:
                    return q
        return None

    def is_nilpotent_elem(self, a):
        x = a % self.m
        for _ in range(self.m.bit_length() + 1):
            if x == 0:
                return True
            x = x * x % self.m
        return False

    def is_zero_divisor_elem(self, a):
        return math.gcd(a % self.m, self.m) != 1

    def sample(self, rng, small=False):
        return rng.randrange(self.m)

    def show(self, a):
        return str(a)

    def descriptor(self):
        return f"zmod:{self.m}"


class Rationals(Ring):
    kind = "q"

    def __init__(self):
        self.zero = Fraction(0)
        self.one = Fraction(1)
        self.inv2 = Fraction(1, 2)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def from_int(self, k):
        return Fraction(k)

    def dot(self, row, col):
        acc = Fraction(0)
        for u, v in zip(row, col):
            if u and v:
                acc += u * v
        return acc

    def try_invert(self, a):
        return None if a == 0 else 1 / a

    def try_exact_div(self, a, d):
        return None if d == 0 else a / d

    def is_zero_divisor_elem(self, a):
        return a == 0

    def sample(self, rng, small=False):
        if small:
            return Fraction(rng.randint(-3, 3))
        return Fraction(rng.randint(-9, 9), rng.randint(1, 9))

    def show(self, a):
        return str(a)

    def descriptor(self):
        return "q"


def _grlex_key(exps):
    return (sum(exps), exps)


class PolyRing(Ring):
    """Sparse polynomials over an arbitrary base ring, in named variables.

    One implementation serves both the multivariate symbol rings used by
    the identity tables and the univariate extensions R[X] used by the
    localization machinery; towers arise by nesting.
    """

    kind = "poly"

    def __init__(self, base, names):
        names = tuple(names)
        if not names:
            raise ValueError("need at least one variable")
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        self.base = base
        self.names = names
        self.nvars = len(names)
        self.zero = ()
        zexp = (0,) * self.nvars
        self.one = ((zexp, base.one),)
        self.inv2 = ((zexp, base.inv2),)
        self._zexp = zexp

    # -- construction helpers -------------------------------------------------
    def const(self, c):
        if self.base.is_zero(c):
            return ()
        return ((self._zexp, c),)

    def var(self, name):
        i = self.names.index(name)
        e = tuple(1 if j == i else 0 for j in range(self.nvars))
        return ((e, self.base.one),)

    def freeze(self, d):
        items = [(e, c) for e, c in d.items() if not self.base.is_zero(c)]
        items.sort(key=lambda kv: _grlex_key(kv[0]), reverse=True)
        return tuple(items)

    # -- ring operations ------------------------------------------------------
    def add(self, a, b):
        if not a:
            return b
        if not b:
            return a
        d = dict(a)
        badd = self.base.add
        for e, c in b:
            if e in d:
                d[e] = badd(d[e], c)
            else:
                d[e] = c
        return self.freeze(d)

    def neg(self, a):
        bneg = self.base.neg
        return tuple((e, bneg(c)) for e, c in a)

    def mul(self, a, b):
        if not a or not b:
            return ()
        if a == self.one:
            return b
        if b == self.one:
            return a
        d = {}
        badd = self.base.add
        bmul = self.base.mul
        for e1, c1 in a:
            for e2, c2 in b:
                e = tuple(map(sum, zip(e1, e2)))
                c = bmul(c1, c2)
                if e in d:
                    d[e] = badd(d[e], c)
                else:
                    d[e] = c
        return self.freeze(d)

    def from_int(self, k):
        return self.const(self.base.from_int(k))

    def try_invert(self, a):
        c = self.as_const(a)
        if c is None:
            return None
        inv = self.base.try_invert(c)
        return None if inv is None else self.const(inv)

    # -- structure helpers ----------------------------------------------------
    def as_const(self, a):
        """Base-ring value of a constant polynomial, else None."""
        if not a:
            return self.base.zero
        if len(a) == 1 and a[0][0] == self._zexp:
            return a[0][1]
        return None

    def total_degree(self, a):
        return max((sum(e) for e, _ in a), default=0)

    def subst(self, a, assignment):
        """Substitute variables by elements of this same ring (a ring hom)."""
        values = {}
        for name, val in assignment.items():
            i = self.names.index(name)
            values[i] = val
        acc = ()
        for e, c in a:
            term = self.const(c)
            for i, p in enumerate(e):
                if p == 0:
                    continue
                v = values.get(i)
                if v is None:
                    v = self.var(self.names[i])
                term = self.mul(term, self.pow_int(v, p))
            acc = self.add(acc, term)
        return acc

    def map_coeffs(self, a, f, target):
        """Apply base-hom f to coefficients, rebuilding in target PolyRing."""
        d = {}
        for e, c in a:
            fc = f(c)
            if not target.base.is_zero(fc):
                d[e] = target.base.add(d[e], fc) if e in d else fc
        return target.freeze(d)

    def eval_at(self, a, point):
        """Evaluate a univariate polynomial at a base-ring point."""
        if self.nvars != 1:
            raise ValueError("eval_at needs a univariate ring")
        acc = self.base.zero
        for (e,), c in a:
            acc = self.base.add(acc, self.base.mul(c, self.base.pow_int(point, e)))
        return acc

    def eval_at_zero(self, a):
        if self.nvars != 1:
            raise ValueError("eval_at_zero needs a univariate ring")
        for (e,), c in a:
            if e == 0:
                return c
        return self.base.zero

    def shift_down(self, a):
        """Return p' with a == a(0) + X * p' (univariate only)."""
        if self.nvars != 1:
            raise ValueError("shift_down needs a univariate ring")
        return tuple(((e - 1,), c) for (e,), c in a if e > 0)

    def coeff(self, a, e):
        for ee, c in a:
            if ee == e:
                return c
        return self.base.zero

    def leading(self, a):
        return a[0] if a else (None, None)

    def try_exact_div(self, a, d):
        if not d:
            return None
        if not a:
            return ()
        lead_e, lead_c = d[0]
        rem = a
        quo = {}
        guard = len(a) * (self.total_degree(a) + 2) + 8
        while rem:
            e, c = rem[0]
            if any(ei < di for ei, di in zip(e, lead_e)):
                return None
            q = self.base.try_exact_div(c, lead_c)
            if q is None:
                return None
            qe = tuple(ei - di for ei, di in zip(e, lead_e))
            quo[qe] = self.base.add(quo.get(qe, self.base.zero), q)
            rem = self.sub(rem, self.mul(((qe, q),), d))
            guard -= 1
            if guard < 0:
                return None
        return self.freeze(quo)

    def is_nilpotent_elem(self, a):
        return all(self.base.is_nilpotent_elem(c) for _, c in a) if a else True

    def is_zero_divisor_elem(self, a):
        if not a:
            return True
        if isinstance(self.base, Zmod) and self.base.m <= 10**5:
            # a constant annihilator suffices to witness a zero divisor
            for c in range(1, self.base.m):
                if all(self.base.mul(c, coef) == 0 for _, coef in a):
                    return True
            return False
        if isinstance(self.base, (Rationals, PolyRing)):
            return False
        return False

    def sample(self, rng, small=False):
        nterms = rng.randint(0, 2)
        d = {}
        maxdeg = 1 if small else 2
        for _ in range(nterms):
            e = tuple(rng.randint(0, maxdeg) for _ in range(self.nvars))
            c = self.base.sample(rng, small=True)
            if not self.base.is_zero(c):
                d[e] = self.base.add(d.get(e, self.base.zero), c)
        return self.freeze(d)

    def show(self, a):
        if not a:
            return "0"
        parts = []
        for e, c in a:
            cs = self.base.show(c)
            if any(op in cs for op in "+-*/^") and not (cs.startswith("-") and _is_simple(cs[1:])):
                if not _is_simple(cs):
                    cs = f"({cs})"
            factors = []
            for name, p in zip(self.names, e):
                if p == 1:
                    factors.append(name)
                elif p > 1:
                    factors.append(f"{name}^{p}")
            if not factors:
                parts.append(cs)
            elif cs == "1":
                parts.append("*".join(factors))
            elif cs == "-1":
                parts.append("-" + "*".join(factors))
            else:
                parts.append(cs + "*" + "*".join(factors))
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def descriptor(self):
        return f"poly:{self.base.descriptor()}:{','.join(self.names)}"


def _is_simple(s):
    return all(ch.isalnum() or ch in "._/" for ch in s)


class Localized(Ring):
    """Ring of fractions a / s^k for a non-nilpotent non-zero-divisor s.

    Representations keep k minimal (powers of s are divided out of the
    numerator whenever the base ring can decide divisibility), so equality
    is structural; cross-multiplication would agree since s is not a zero
    divisor.
    """

    kind = "loc"

    def __init__(self, base, s, *, assume_ok=False):
        if not assume_ok:
            if base.is_nilpotent_elem(s):
                raise NilpotentS(f"cannot localize at nilpotent {base.show(s)}")
            if base.is_zero_divisor_elem(s):
                raise ZeroDivisorS(f"{base.show(s)} is a zero divisor")
        self.base = base
        self.s = s
        self.zero = (base.zero, 0)
        self.one = (base.one, 0)
        self.inv2 = (base.inv2, 0)

    def normalize(self, num, k):
        if self.base.is_zero(num):
            return (self.base.zero, 0)
        while k > 0:
            q = self.base.try_exact_div(num, self.s)
            if q is None:
                break
            num, k = q, k - 1
        return (num, k)

    def embed(self, a):
        return self.normalize(a, 0)

    def frac(self, a, k):
        return self.normalize(a, k)

    def split(self, a):
        return a

    def add(self, a, b):
        (na, ka), (nb, kb) = a, b
        k = max(ka, kb)
        sa = self.base.mul(na, self.base.pow_int(self.s, k - ka))
        sb = self.base.mul(nb, self.base.pow_int(self.s, k - kb))
        return self.normalize(self.base.add(sa, sb), k)

    def neg(self, a):
        return (self.base.neg(a[0]), a[1])

    def mul(self, a, b):
        return self.normalize(self.base.mul(a[0], b[0]), a[1] + b[1])

    def from_int(self, k):
        return (self.base.from_int(k), 0)

    def s_power_mul(self, a, e):
        """Multiply by s^e, where e may be negative."""
        num, k = a
        if e >= 0:
            return self.normalize(self.base.mul(num, self.base.pow_int(self.s, e)), k)
        return self.normalize(num, k - e)

    def valuation_floor(self, a, cap=256):
        """Largest e <= cap with a in s^e * (base embedded); None for zero.
        The cap also bounds the search when s is a unit, where every
        element divides arbitrarily."""
        num, k = a
        if self.base.is_zero(num):
            return None
        if k > 0:
            return -k  # canonical form already divided out all it could
        e = 0
        while e < cap:
            q = self.base.try_exact_div(num, self.s)
            if q is None:
                break
            num = q
            e += 1
        return e

    def try_invert(self, a):
        num, k = a
        j = 0
        while True:
            q = self.base.try_exact_div(num, self.s)
            if q is None:
                break
            num, j = q, j + 1
        inv = self.base.try_invert(num)
        if inv is None:
            return None
        if k >= j:
            return self.normalize(self.base.mul(inv, self.base.pow_int(self.s, k - j)), 0)
        return self.normalize(inv, j - k)

    def is_zero_divisor_elem(self, a):
        return self.base.is_zero(a[0])

    def sample(self, rng, small=False):
        num = self.base.sample(rng, small=small)
        k = 0 if small else rng.randint(0, 2)
        return self.normalize(num, k)

    def show(self, a):
        num, k = a
        ns = self.base.show(num)
        if k == 0:
            return ns
        if not _is_simple(ns):
            ns = f"({ns})"
        ss = self.base.show(self.s)
        if not _is_simple(ss):
            ss = f"({ss})"
        return f"{ns}/{ss}^{k}" if k > 1 else f"{ns}/{ss}"

    def descriptor(self):
        return f"loc:{self.base.descriptor()}:s={self.base.show(self.s)}"


# ---------------------------------------------------------------------------
# descriptor and element parsing (the CLI's textual surface)
# ---------------------------------------------------------------------------

def ring_from_descriptor(text):
    toks = text.strip().split(":")
    ring, rest = _parse_descriptor(toks)
    if rest:
        raise ParseError(f"trailing descriptor tokens: {':'.join(rest)}")
    return ring


def _parse_descriptor(toks):
    if not toks:
        raise ParseError("empty ring descriptor")
    head, rest = toks[0], toks[1:]
    if head == "q":
        return Rationals(), rest
    if head == "zmod":
        if not rest:
            raise ParseError("zmod needs a modulus")
        try:
            m = int(rest[0])
        except ValueError:
            raise ParseError(f"bad modulus {rest[0]!r}") from None
        return Zmod(m), rest[1:]
    if head == "poly":
        base, rest = _parse_descriptor(rest)
        if not rest:
            raise ParseError("poly needs a variable list")
        names = [v.strip() for v in rest[0].split(",") if v.strip()]
        return PolyRing(base, names), rest[1:]
    if head == "loc":
        base, rest = _parse_descriptor(rest)
        if not rest or not rest[0].startswith("s="):
            raise ParseError("loc needs s=<element>")
        s = parse_element(base, rest[0][2:])
        return Localized(base, s), rest[1:]
    raise ParseError(f"unknown ring kind {head!r}")


_TOKEN_CHARS = set("+-*/^()")


def _tokenize(text):
    toks = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in _TOKEN_CHARS:
            toks.append(ch)
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            toks.append(("int", int(text[i:j])))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(("name", text[i:j]))
            i = j
        else:
            raise ParseError(f"unexpected character {ch!r} in element")
    return toks


class _ElementParser:
    def __init__(self, ring, toks):
        self.ring = ring
        self.toks = toks
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self):
        t = self.peek()
        self.pos += 1
        return t

    def expr(self):
        t = self.peek()
        neg = False
        if t == "-":
            self.take()
            neg = True
        elif t == "+":
            self.take()
        acc = self.term()
        if neg:
            acc = self.ring.neg(acc)
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            acc = self.ring.add(acc, rhs) if op == "+" else self.ring.sub(acc, rhs)
        return acc

    def term(self):
        acc = self.power()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.power()
            if op == "*":
                acc = self.ring.mul(acc, rhs)
            else:
                inv = self.ring.try_invert(rhs)
                if inv is None:
                    raise ParseError("division by a non-invertible element")
                acc = self.ring.mul(acc, inv)
        return acc

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.take()
            t = self.take()
            if not (isinstance(t, tuple) and t[0] == "int"):
                raise ParseError("exponent must be an integer literal")
            return self.ring.pow_int(base, t[1])
        return base

    def atom(self):
        t = self.take()
        if t == "(":
            v = self.expr()
            if self.take() != ")":
                raise ParseError("missing closing parenthesis")
            return v
        if t == "-":
            return self.ring.neg(self.atom())
        if isinstance(t, tuple) and t[0] == "int":
            return self.ring.from_int(t[1])
        if isinstance(t, tuple) and t[0] == "name":
            return self.lookup(t[1])
        raise ParseError(f"unexpected token {t!r}")

    def lookup(self, name):
        ring = self.ring
        lifts = []
        while True:
            if isinstance(ring, PolyRing) and name in ring.names:
                v = ring.var(name)
                for lift in reversed(lifts):
                    v = lift(v)
                return v
            if name == "s" and isinstance(ring, Localized):
                v = ring.embed(ring.s)
                for lift in reversed(lifts):
                    v = lift(v)
                return v
            if isinstance(ring, PolyRing):
                lifts.append(ring.const)
                ring = ring.base
            elif isinstance(ring, Localized):
                lifts.append(ring.embed)
                ring = ring.base
            else:
                raise ParseError(f"unknown variable {name!r}")


def parse_element(ring, text):
    toks = _tokenize(text)
    if not toks:
        raise ParseError("empty element")
    p = _ElementParser(ring, toks)
    v = p.expr()
    if p.peek() is not None:
        raise ParseError(f"trailing tokens in element {text!r}")
    return v
