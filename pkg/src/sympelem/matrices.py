"""Dense immutable matrices over a ring.

Rows are tuples of raw ring representations; a matrix is hashable, so
generator matrices can be memoized. The sizes here are tiny (2n <= 12),
dense storage is fine; the inner product is delegated to the ring so
residue rings can use plain int arithmetic.
"""

from __future__ import annotations

from .errors import DimensionMismatch


class Matrix:
    __slots__ = ("ring", "nrows", "ncols", "rows", "_hash")

    def __init__(self, ring, rows):
        self.ring = ring
        self.rows = tuple(tuple(r) for r in rows)
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        if any(len(r) != self.ncols for r in self.rows):
            raise DimensionMismatch("ragged rows")
        self._hash = None

    # -- constructors ---------------------------------------------------------
    @staticmethod
    def identity(ring, n):
        z, o = ring.zero, ring.one
        return Matrix(ring, [[o if i == j else z for j in range(n)] for i in range(n)])

    @staticmethod
    def zero(ring, nrows, ncols):
        z = ring.zero
        return Matrix(ring, [[z] * ncols for _ in range(nrows)])

    @staticmethod
    def from_ints(ring, rows):
        return Matrix(ring, [[ring.from_int(v) for v in r] for r in rows])

    # -- arithmetic -----------------------------------------------------------
    def mul(self, other):
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"{self.ncols} != {other.nrows}")
        cols = tuple(zip(*other.rows))
        dot = self.ring.dot
        return Matrix(self.ring, [tuple(dot(row, c) for c in cols) for row in self.rows])

    def __matmul__(self, other):
        return self.mul(other)

    def add(self, other):
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DimensionMismatch("shape mismatch in add")
        a = self.ring.add
        return Matrix(self.ring, [tuple(map(a, r1, r2)) for r1, r2 in zip(self.rows, other.rows)])

    def sub(self, other):
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DimensionMismatch("shape mismatch in sub")
        s = self.ring.sub
        return Matrix(self.ring, [tuple(map(s, r1, r2)) for r1, r2 in zip(self.rows, other.rows)])

    def neg(self):
        n = self.ring.neg
        return Matrix(self.ring, [tuple(map(n, r)) for r in self.rows])

    def scale(self, c):
        m = self.ring.mul
        return Matrix(self.ring, [tuple(m(c, v) for v in r) for r in self.rows])

    def transpose(self):
        return Matrix(self.ring, list(zip(*self.rows)))

    def perp(self, other):
        """Block-diagonal juxtaposition."""
        z = self.ring.zero
        n1, n2 = self.ncols, other.ncols
        rows = [r + (z,) * n2 for r in self.rows]
        rows += [(z,) * n1 + r for r in other.rows]
        return Matrix(self.ring, rows)

    def submatrix(self, r0, c0, nr, nc):
        return Matrix(self.ring, [r[c0:c0 + nc] for r in self.rows[r0:r0 + nr]])

    def paste(self, r0, c0, block):
        rows = [list(r) for r in self.rows]
        for i, br in enumerate(block.rows):
            for j, v in enumerate(br):
                rows[r0 + i][c0 + j] = v
        return Matrix(self.ring, rows)

    def is_identity(self):
        ring = self.ring
        z, o = ring.zero, ring.one
        return all(v == (o if i == j else z) for i, r in enumerate(self.rows) for j, v in enumerate(r))

    def det2(self):
        if (self.nrows, self.ncols) != (2, 2):
            raise DimensionMismatch("det2 needs 2x2")
        r = self.ring
        (a, b), (c, d) = self.rows
        return r.sub(r.mul(a, d), r.mul(b, c))

    def adj2(self):
        """Adjugate of a 2x2; for det 1 this is the inverse."""
        if (self.nrows, self.ncols) != (2, 2):
            raise DimensionMismatch("adj2 needs 2x2")
        n = self.ring.neg
        (a, b), (c, d) = self.rows
        return Matrix(self.ring, [(d, n(b)), (n(c), a)])

    def map(self, f, target_ring=None):
        return Matrix(target_ring or self.ring, [tuple(f(v) for v in r) for r in self.rows])

    # -- protocol -------------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, Matrix) and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __repr__(self):
        return f"<{self.nrows}x{self.ncols} over {self.ring.descriptor()}>"

    def pretty(self):
        shown = [[self.ring.show(v) for v in r] for r in self.rows]
        width = max((len(s) for r in shown for s in r), default=1)
        return "\n".join(" ".join(s.rjust(width) for s in r) for r in shown)

    def to_text(self, n=None):
        """Row-major golden-file format."""
        entries = " ".join(self.ring.show(v).replace(" ", "") for r in self.rows for v in r)
        nn = n if n is not None else self.nrows // 2
        return f"sympmat n={nn} ring={self.ring.descriptor()} entries={entries}"


def matrix_from_text(line, ring=None):
    from .rings import parse_element, ring_from_descriptor

    line = line.strip()
    if not line.startswith("sympmat "):
        raise ValueError("not a sympmat line")
    toks = line.split()[1:]
    fields = {}
    rest = []
    for idx, part in enumerate(toks):
        key, _, value = part.partition("=")
        fields[key] = value
        if key == "entries":
            rest = [value] + toks[idx + 1:]
            break
    n = int(fields["n"])
    if ring is None:
        ring = ring_from_descriptor(fields["ring"])
    entries = [parse_element(ring, tok) for tok in rest]
    size = 2 * n
    if len(entries) != size * size:
        raise ValueError(f"expected {size*size} entries, got {len(entries)}")
    rows = [entries[i * size:(i + 1) * size] for i in range(size)]
    return Matrix(ring, rows)
