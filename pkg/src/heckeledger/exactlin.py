"""Exact sparse linear algebra over a large word-sized prime field.

All arithmetic happens on plain Python integers reduced modulo a fixed
word-sized prime (default 2**61 - 1), large enough that eigenvalues of
moderate height can be recovered exactly by rational reconstruction.
Nothing here is floating point and nothing here is randomized:
identical inputs give bit-identical outputs.

The main objects are :class:`FieldMatrix` (sparse, row-major dicts)
and :class:`Subspace` (a list of sparse vectors).  On top of those sit
reduced row echelon form with optional row-operation logging, rank and
kernel, restriction of an operator to an invariant subspace,
simultaneous eigenspace splitting of a commuting family, and rational
reconstruction of field elements.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

__all__ = [
    "PrimeField",
    "FieldMatrix",
    "Subspace",
    "EchelonForm",
    "Eigenspace",
    "SplitResult",
    "FieldContext",
    "NotInvariant",
    "NonCommuting",
    "NoReconstruction",
    "DEFAULT_PRIME",
    "rank_and_kernel",
    "restrict_operator",
    "split_eigenspaces",
    "rational_reconstruct",
    "charpoly",
    "distinct_roots",
    "next_field_prime",
    "replay_log",
    "write_matrix_text",
    "read_matrix_text",
]


class NotInvariant(Exception):
    """An operator maps a vector of the subspace outside its span."""


class NonCommuting(Exception):
    """Two operators handed to the eigenspace splitter do not commute."""


class NoReconstruction(Exception):
    """No rational of the requested height lifts the field element."""


# Fixed Mersenne prime; large enough that reconstruction of eigenvalues
# with numerator and denominator below 2**30 is unambiguous.
DEFAULT_PRIME = (1 << 61) - 1

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for every n < 3.3 * 10**24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_field_prime(start: int) -> int:
    """Smallest prime >= start that satisfies the PrimeField invariants."""
    n = max(start, (1 << 31) + 1)
    if n % 2 == 0:
        n += 1
    while not _is_prime(n):
        n += 2
    return n


class PrimeField:
    """The field Z/p for a word-sized prime p > 2**31.

    Elements are plain ints in [0, p).  Primality is checked at
    construction so a typo in a configured modulus fails loudly.
    """

    __slots__ = ("p",)

    def __init__(self, modulus: int):
        if not _is_prime(modulus):
            raise ValueError(f"modulus {modulus} is not prime")
        if modulus <= (1 << 31):
            raise ValueError(f"modulus {modulus} too small, need > 2**31")
        self.p = modulus

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and self.p == other.p

    def __hash__(self) -> int:
        return hash(("PrimeField", self.p))

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"

    def elem(self, x: int | Fraction) -> int:
        """Reduce an integer or Fraction into the field."""
        if isinstance(x, Fraction):
            den = x.denominator % self.p
            if den == 0:
                raise ZeroDivisionError("denominator vanishes in the field")
            return x.numerator % self.p * pow(den, -1, self.p) % self.p
        return x % self.p

    def inv(self, x: int) -> int:
        return pow(x, -1, self.p)


@dataclass(frozen=True)
class FieldContext:
    """The pair of working primes for the multi-prime protocol.

    Every eigenvalue the package reports has been computed modulo both
    primes and reconstructed to the same rational.
    """

    primary: PrimeField
    secondary: PrimeField

    @classmethod
    def default(cls, primary_modulus: int | None = None) -> "FieldContext":
        p = primary_modulus if primary_modulus is not None else DEFAULT_PRIME
        primary = PrimeField(p)
        secondary = PrimeField(next_field_prime(p + 1))
        return cls(primary, secondary)


class FieldMatrix:
    """Sparse matrix over a PrimeField, rows stored as {col: value} dicts.

    No stored value is zero.  `basis_log`, when present, is the list of
    row operations that turns the matrix this one was derived from into
    this one; see :func:`replay_log`.
    """

    __slots__ = ("field", "nrows", "ncols", "rows", "basis_log")

    def __init__(
        self,
        field: PrimeField,
        nrows: int,
        ncols: int,
        rows: Optional[list[dict[int, int]]] = None,
        basis_log: Optional[list[tuple]] = None,
    ):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            rows = [dict() for _ in range(nrows)]
        self.rows = rows
        self.basis_log = basis_log

    # -- construction -------------------------------------------------

    @classmethod
    def zero(cls, field: PrimeField, nrows: int, ncols: int) -> "FieldMatrix":
        return cls(field, nrows, ncols)

    @classmethod
    def identity(cls, field: PrimeField, n: int) -> "FieldMatrix":
        return cls(field, n, n, [{i: 1} for i in range(n)])

    @classmethod
    def from_entries(
        cls,
        field: PrimeField,
        nrows: int,
        ncols: int,
        entries: Iterable[tuple[int, int, int | Fraction]],
    ) -> "FieldMatrix":
        m = cls(field, nrows, ncols)
        for i, j, v in entries:
            m.add_at(i, j, v)
        return m

    @classmethod
    def from_dense(cls, field: PrimeField, data: Sequence[Sequence[int]]) -> "FieldMatrix":
        nrows = len(data)
        ncols = len(data[0]) if nrows else 0
        m = cls(field, nrows, ncols)
        for i, row in enumerate(data):
            for j, v in enumerate(row):
                m.add_at(i, j, v)
        return m

    @classmethod
    def from_columns(
        cls, field: PrimeField, nrows: int, columns: Sequence[dict[int, int]]
    ) -> "FieldMatrix":
        m = cls(field, nrows, len(columns))
        for j, col in enumerate(columns):
            for i, v in col.items():
                m.add_at(i, j, v)
        return m

    # -- mutation (only used while assembling) ------------------------

    def add_at(self, i: int, j: int, v: int | Fraction) -> None:
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError((i, j))
        row = self.rows[i]
        w = (row.get(j, 0) + self.field.elem(v)) % self.field.p
        if w:
            row[j] = w
        else:
            row.pop(j, None)

    # -- queries ------------------------------------------------------

    def entry(self, i: int, j: int) -> int:
        return self.rows[i].get(j, 0)

    def iter_entries(self) -> Iterator[tuple[int, int, int]]:
        for i in range(self.nrows):
            for j in sorted(self.rows[i]):
                yield i, j, self.rows[i][j]

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    @property
    def density(self) -> float:
        cells = self.nrows * self.ncols
        return self.nnz / cells if cells else 0.0

    def is_zero(self) -> bool:
        return all(not r for r in self.rows)

    def copy(self) -> "FieldMatrix":
        return FieldMatrix(self.field, self.nrows, self.ncols, [dict(r) for r in self.rows])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldMatrix)
            and self.field == other.field
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def __repr__(self) -> str:
        return f"<FieldMatrix {self.nrows}x{self.ncols} nnz={self.nnz} mod {self.field.p}>"

    # -- arithmetic ---------------------------------------------------

    def matvec(self, vec: dict[int, int]) -> dict[int, int]:
        p = self.field.p
        out: dict[int, int] = {}
        for i, row in enumerate(self.rows):
            s = 0
            if len(row) <= len(vec):
                for j, v in row.items():
                    w = vec.get(j)
                    if w:
                        s += v * w
            else:
                for j, w in vec.items():
                    v = row.get(j)
                    if v:
                        s += v * w
            s %= p
            if s:
                out[i] = s
        return out

    def matmul(self, other: "FieldMatrix") -> "FieldMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        p = self.field.p
        out_rows: list[dict[int, int]] = []
        for row in self.rows:
            acc: dict[int, int] = {}
            for j, v in row.items():
                for k, w in other.rows[j].items():
                    acc[k] = acc.get(k, 0) + v * w
            out_rows.append({k: r for k, w in acc.items() if (r := w % p)})
        return FieldMatrix(self.field, self.nrows, other.ncols, out_rows)

    def add_scaled(self, other: "FieldMatrix", c: int) -> "FieldMatrix":
        """self + c * other."""
        p = self.field.p
        c %= p
        rows = []
        for ra, rb in zip(self.rows, other.rows):
            acc = dict(ra)
            for j, v in rb.items():
                w = (acc.get(j, 0) + c * v) % p
                if w:
                    acc[j] = w
                else:
                    acc.pop(j, None)
            rows.append(acc)
        return FieldMatrix(self.field, self.nrows, self.ncols, rows)

    def sub(self, other: "FieldMatrix") -> "FieldMatrix":
        return self.add_scaled(other, -1)

    def scale(self, c: int) -> "FieldMatrix":
        p = self.field.p
        c %= p
        rows = []
        for r in self.rows:
            rows.append({j: v * c % p for j, v in r.items()} if c else {})
        return FieldMatrix(self.field, self.nrows, self.ncols, rows)

    def transpose(self) -> "FieldMatrix":
        rows: list[dict[int, int]] = [dict() for _ in range(self.ncols)]
        for i, row in enumerate(self.rows):
            for j, v in row.items():
                rows[j][i] = v
        return FieldMatrix(self.field, self.ncols, self.nrows, rows)

    def hstack(self, other: "FieldMatrix") -> "FieldMatrix":
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch")
        rows = []
        for ra, rb in zip(self.rows, other.rows):
            r = dict(ra)
            for j, v in rb.items():
                r[j + self.ncols] = v
            rows.append(r)
        return FieldMatrix(self.field, self.nrows, self.ncols + other.ncols, rows)


# Fraction of populated cells beyond which elimination switches to a
# dense working representation.
DENSE_THRESHOLD = 0.20


@dataclass
class EchelonForm:
    """Reduced row echelon form plus pivot bookkeeping."""

    matrix: FieldMatrix
    pivots: list[int]

    @property
    def rank(self) -> int:
        return len(self.pivots)


def _echelon_sparse(m: FieldMatrix, log: Optional[list]) -> EchelonForm:
    p = m.field.p
    rows = [dict(r) for r in m.rows]
    pivot_of_col: dict[int, int] = {}
    free = set(range(m.nrows))

    def record(op):
        if log is not None:
            log.append(op)

    for col in range(m.ncols):
        # Sparsest candidate row, lowest index on ties: cheap fill-in
        # control while keeping the pivot column set canonical.
        best = None
        for i in free:
            if col in rows[i]:
                key = (len(rows[i]), i)
                if best is None or key < best:
                    best = key
        if best is None:
            continue
        piv = best[1]
        free.discard(piv)
        inv = pow(rows[piv][col], -1, p)
        if inv != 1:
            rows[piv] = {j: v * inv % p for j, v in rows[piv].items()}
            record(("scale", piv, inv))
        prow = rows[piv]
        for i in range(m.nrows):
            if i == piv:
                continue
            v = rows[i].get(col)
            if not v:
                continue
            c = p - v
            tgt = rows[i]
            for j, w in prow.items():
                x = (tgt.get(j, 0) + c * w) % p
                if x:
                    tgt[j] = x
                else:
                    tgt.pop(j, None)
            record(("axpy", i, piv, c))
        pivot_of_col[col] = piv

    # Order the pivot rows by pivot column, zero rows last.
    order = [pivot_of_col[c] for c in sorted(pivot_of_col)]
    order += sorted(free)
    current = list(range(m.nrows))
    for slot in range(m.nrows):
        k = current.index(order[slot])
        if k != slot:
            rows[slot], rows[k] = rows[k], rows[slot]
            current[slot], current[k] = current[k], current[slot]
            record(("swap", slot, k))
    out = FieldMatrix(m.field, m.nrows, m.ncols, rows, basis_log=log)
    return EchelonForm(out, sorted(pivot_of_col))


def _echelon_dense(m: FieldMatrix, log: Optional[list]) -> EchelonForm:
    p = m.field.p
    rows = [[r.get(j, 0) for j in range(m.ncols)] for r in m.rows]
    pivots: list[int] = []
    rank = 0

    def record(op):
        if log is not None:
            log.append(op)

    for col in range(m.ncols):
        piv = None
        for i in range(rank, m.nrows):
            if rows[i][col]:
                piv = i
                break
        if piv is None:
            continue
        if piv != rank:
            rows[rank], rows[piv] = rows[piv], rows[rank]
            record(("swap", rank, piv))
        inv = pow(rows[rank][col], -1, p)
        if inv != 1:
            rows[rank] = [v * inv % p for v in rows[rank]]
            record(("scale", rank, inv))
        prow = rows[rank]
        for i in range(m.nrows):
            if i == rank or not rows[i][col]:
                continue
            c = p - rows[i][col]
            tgt = rows[i]
            for j in range(col, m.ncols):
                if prow[j]:
                    tgt[j] = (tgt[j] + c * prow[j]) % p
            record(("axpy", i, rank, c))
        pivots.append(col)
        rank += 1

    sparse_rows = [{j: v for j, v in enumerate(r) if v} for r in rows]
    out = FieldMatrix(m.field, m.nrows, m.ncols, sparse_rows, basis_log=log)
    return EchelonForm(out, pivots)


def echelonize(m: FieldMatrix, track: bool = False) -> EchelonForm:
    """Reduced row echelon form of a copy of m.

    Pivot columns are the leftmost independent columns, so the pivot
    set depends only on the row space; this keeps quotient bases stable
    when the same integer matrix is reduced modulo two different
    primes.  With track=True the result carries a basis_log whose
    replay (see :func:`replay_log`) maps m to the echelon form exactly.
    """
    log: Optional[list] = [] if track else None
    if m.density > DENSE_THRESHOLD:
        return _echelon_dense(m, log)
    return _echelon_sparse(m, log)


def replay_log(original: FieldMatrix, log: Sequence[tuple]) -> FieldMatrix:
    """Re-apply a recorded row-operation log to a fresh copy of original."""
    p = original.field.p
    rows = [dict(r) for r in original.rows]
    for op in log:
        kind = op[0]
        if kind == "swap":
            _, i, j = op
            rows[i], rows[j] = rows[j], rows[i]
        elif kind == "scale":
            _, i, c = op
            rows[i] = {j: v * c % p for j, v in rows[i].items()}
        elif kind == "axpy":
            _, i, j, c = op
            tgt = rows[i]
            for k, w in rows[j].items():
                x = (tgt.get(k, 0) + c * w) % p
                if x:
                    tgt[k] = x
                else:
                    tgt.pop(k, None)
        else:
            raise ValueError(f"unknown row operation {op!r}")
    return FieldMatrix(original.field, original.nrows, original.ncols, rows)


@dataclass(frozen=True)
class Subspace:
    """A subspace given by an independent list of sparse vectors."""

    ambient_dim: int
    basis: tuple[dict[int, int], ...]
    field: PrimeField

    def __post_init__(self):
        if self.basis:
            stacked = FieldMatrix(
                self.field, len(self.basis), self.ambient_dim, [dict(v) for v in self.basis]
            )
            if echelonize(stacked).rank != len(self.basis):
                raise ValueError("basis vectors are linearly dependent")

    @property
    def dim(self) -> int:
        return len(self.basis)

    @classmethod
    def full(cls, field: PrimeField, n: int) -> "Subspace":
        return cls(n, tuple({i: 1} for i in range(n)), field)

    @classmethod
    def from_vectors(
        cls, field: PrimeField, n: int, vectors: Sequence[dict[int, int]]
    ) -> "Subspace":
        return cls(n, tuple(dict(v) for v in vectors), field)

    def basis_matrix(self) -> FieldMatrix:
        """Basis vectors as the columns of an ambient_dim x dim matrix."""
        return FieldMatrix.from_columns(self.field, self.ambient_dim, list(self.basis))

    def echelonized(self) -> "Subspace":
        """The same subspace with its canonical reduced-echelon basis.

        Canonical means: depends only on the subspace, not on the basis
        it was handed; this is what makes bases comparable when the
        same computation is repeated modulo a second prime.
        """
        stacked = FieldMatrix(
            self.field, len(self.basis), self.ambient_dim, [dict(v) for v in self.basis]
        )
        ech = echelonize(stacked)
        rows = [r for r in ech.matrix.rows if r]
        return Subspace(self.ambient_dim, tuple(rows), self.field)


def rank_and_kernel(m: FieldMatrix) -> tuple[int, Subspace]:
    """Rank of m and a canonical (reduced echelon) basis of its kernel.

    The empty matrix is allowed; its kernel is the full column space.
    """
    ech = echelonize(m)
    pivset = set(ech.pivots)
    free_cols = [j for j in range(m.ncols) if j not in pivset]
    basis = []
    for f in free_cols:
        vec = {f: 1}
        for r, c in enumerate(ech.pivots):
            v = ech.matrix.rows[r].get(f)
            if v:
                vec[c] = (-v) % m.field.p
        basis.append(vec)
    kernel = Subspace(m.ncols, tuple(basis), m.field)
    if basis:
        kernel = kernel.echelonized()
    return ech.rank, kernel


def solve_in_basis(basis_mat: FieldMatrix, images: FieldMatrix) -> FieldMatrix:
    """Solve basis_mat * X = images, requiring every image in the span.

    Raises NotInvariant when some image column leaves the column span
    of basis_mat.
    """
    d = basis_mat.ncols
    ech = echelonize(basis_mat.hstack(images))
    for c in ech.pivots:
        if c >= d:
            raise NotInvariant("image leaves the span of the subspace basis")
    x = FieldMatrix.zero(basis_mat.field, d, images.ncols)
    for r, c in enumerate(ech.pivots):
        for j, v in ech.matrix.rows[r].items():
            if j >= d:
                x.add_at(c, j - d, v)
    return x


def restrict_operator(op: FieldMatrix, s: Subspace) -> FieldMatrix:
    """Matrix of op in the basis of s; NotInvariant if s is not op-stable."""
    if op.ncols != s.ambient_dim or op.nrows != s.ambient_dim:
        raise ValueError("operator and subspace ambient dimension mismatch")
    b = s.basis_matrix()
    return solve_in_basis(b, op.matmul(b))


# ---------------------------------------------------------------------------
# Dense polynomial helpers modulo p, used for characteristic polynomials.
# Coefficient lists are low degree first.


def poly_trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def poly_mul(f: list[int], g: list[int], p: int) -> list[int]:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                if b:
                    out[i + j] = (out[i + j] + a * b) % p
    return poly_trim(out)


def poly_sub(f: list[int], g: list[int], p: int) -> list[int]:
    out = [0] * max(len(f), len(g))
    for i, a in enumerate(f):
        out[i] = a
    for i, b in enumerate(g):
        out[i] = (out[i] - b) % p
    return poly_trim(out)


def poly_divmod(f: list[int], g: list[int], p: int) -> tuple[list[int], list[int]]:
    if not g:
        raise ZeroDivisionError("poly division by zero")
    f = list(f)
    q = [0] * max(0, len(f) - len(g) + 1)
    ginv = pow(g[-1], -1, p)
    while len(f) >= len(g) and f:
        c = f[-1] * ginv % p
        d = len(f) - len(g)
        q[d] = c
        for i, b in enumerate(g):
            f[d + i] = (f[d + i] - c * b) % p
        poly_trim(f)
    return poly_trim(q), f


def poly_gcd(f: list[int], g: list[int], p: int) -> list[int]:
    f, g = list(f), list(g)
    while g:
        f, g = g, poly_divmod(f, g, p)[1]
    if f:
        inv = pow(f[-1], -1, p)
        f = [c * inv % p for c in f]
    return f


def poly_powmod(base: list[int], e: int, mod: list[int], p: int) -> list[int]:
    result = [1]
    base = poly_divmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = poly_divmod(poly_mul(result, base, p), mod, p)[1]
        base = poly_divmod(poly_mul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def charpoly(m: FieldMatrix) -> list[int]:
    """Characteristic polynomial det(xI - m), low degree first, monic.

    Reduces to Hessenberg form by similarity transforms, then expands
    along the last column of each leading block.  O(n^3) field ops.
    """
    if m.nrows != m.ncols:
        raise ValueError("characteristic polynomial of a non-square matrix")
    n = m.nrows
    p = m.field.p
    if n == 0:
        return [1]
    h = [[m.entry(i, j) for j in range(n)] for i in range(n)]
    for col in range(n - 2):
        piv = None
        for i in range(col + 1, n):
            if h[i][col]:
                piv = i
                break
        if piv is None:
            continue
        if piv != col + 1:
            h[col + 1], h[piv] = h[piv], h[col + 1]
            for i in range(n):
                h[i][col + 1], h[i][piv] = h[i][piv], h[i][col + 1]
        inv = pow(h[col + 1][col], -1, p)
        for i in range(col + 2, n):
            f = h[i][col] * inv % p
            if not f:
                continue
            for j in range(col, n):
                h[i][j] = (h[i][j] - f * h[col + 1][j]) % p
            for j in range(n):
                h[j][col + 1] = (h[j][col + 1] + f * h[j][i]) % p
    # charpoly of the leading k x k Hessenberg blocks by recurrence
    polys: list[list[int]] = [[1]]
    for k in range(1, n + 1):
        term = poly_mul(polys[k - 1], [(-h[k - 1][k - 1]) % p, 1], p)
        run = 1
        for i in range(k - 2, -1, -1):
            run = run * h[i + 1][i] % p
            if not run:
                break
            c = h[i][k - 1] * run % p
            if c:
                term = poly_sub(term, [x * c % p for x in polys[i]], p)
        polys.append(term)
    return polys[n]


def distinct_roots(f: list[int], p: int) -> list[int]:
    """All roots of f in Z/p, each once, sorted ascending.

    gcd with x^p - x isolates the linear part; the splitting uses
    quadratic-residue filters (x + t)^((p-1)/2) - 1 with t = 0, 1, 2,
    ... in order, so the computation is deterministic.
    """
    f = poly_trim(list(f))
    if len(f) <= 1:
        return []
    xp = poly_powmod([0, 1], p, f, p)
    g = poly_gcd(poly_sub(xp, [0, 1], p), f, p)
    roots: list[int] = []
    stack = [g]
    while stack:
        h = stack.pop()
        if len(h) <= 1:
            continue
        if len(h) == 2:
            roots.append((-h[0]) * pow(h[1], -1, p) % p)
            continue
        t = 0
        while True:
            probe = poly_powmod([t, 1], (p - 1) // 2, h, p)
            d = poly_gcd(poly_sub(probe, [1], p), h, p)
            if 0 < len(d) - 1 < len(h) - 1:
                stack.append(d)
                stack.append(poly_divmod(h, d, p)[0])
                break
            t += 1
    return sorted(roots)


def root_multiplicity(f: list[int], lam: int, p: int) -> int:
    count = 0
    lin = [(-lam) % p, 1]
    while len(f) > 1:
        q, r = poly_divmod(f, lin, p)
        if r:
            break
        f = q
        count += 1
    return count


@dataclass(frozen=True)
class Eigenspace:
    """A simultaneous eigenspace with its tuple of eigenvalues."""

    values: tuple[int, ...]
    space: Subspace


@dataclass
class SplitResult:
    """Outcome of a simultaneous eigenspace split.

    `eigenspaces` hold only genuine simultaneous eigenvectors.
    Directions that are generalized eigenvectors without being
    eigenvectors are tallied in `defective` (eigenvalue prefix, lost
    dimension); directions whose characteristic factor has no root in
    the field are tallied in `unsplit_dim`.
    """

    eigenspaces: list[Eigenspace]
    defective: list[tuple[tuple[int, ...], int]] = dataclass_field(default_factory=list)
    unsplit_dim: int = 0

    def total_dim(self) -> int:
        return sum(e.space.dim for e in self.eigenspaces)


def _lift_to_ambient(s: Subspace, coords: Subspace) -> Subspace:
    """Map vectors given in the basis of s back to ambient coordinates."""
    p = s.field.p
    lifted = []
    for vec in coords.basis:
        acc: dict[int, int] = {}
        for idx, c in vec.items():
            for j, w in s.basis[idx].items():
                acc[j] = (acc.get(j, 0) + c * w) % p
        lifted.append({j: v for j, v in acc.items() if v})
    out = Subspace(s.ambient_dim, tuple(lifted), s.field)
    return out.echelonized() if lifted else out


def split_eigenspaces(ops: Sequence[FieldMatrix]) -> SplitResult:
    """Common eigenspace decomposition of a commuting family.

    Refines the full space one operator at a time.  Eigenvalue tuples
    come out in ascending lexicographic order of their field
    representatives, so the result is deterministic.
    """
    if not ops:
        raise ValueError("need at least one operator")
    n = ops[0].nrows
    field = ops[0].field
    for op in ops:
        if op.nrows != n or op.ncols != n or op.field != field:
            raise ValueError("operators must share one square ambient space")
    for a in range(len(ops)):
        for b in range(a + 1, len(ops)):
            if ops[a].matmul(ops[b]) != ops[b].matmul(ops[a]):
                raise NonCommuting(f"operators {a} and {b} do not commute")

    p = field.p
    result = SplitResult(eigenspaces=[])
    current: list[tuple[tuple[int, ...], Subspace]] = [((), Subspace.full(field, n))]
    for op in ops:
        refined: list[tuple[tuple[int, ...], Subspace]] = []
        for prefix, s in current:
            if s.dim == 0:
                continue
            m = restrict_operator(op, s)
            f = charpoly(m)
            covered = 0
            for lam in distinct_roots(f, p):
                shifted = m.add_scaled(FieldMatrix.identity(field, s.dim), -lam)
                _, ker = rank_and_kernel(shifted)
                geo = ker.dim
                alg = root_multiplicity(list(f), lam, p)
                covered += alg
                if geo < alg:
                    result.defective.append((prefix + (lam,), alg - geo))
                refined.append((prefix + (lam,), _lift_to_ambient(s, ker)))
            result.unsplit_dim += s.dim - covered
        current = refined
    result.eigenspaces = [
        Eigenspace(tup, s) for tup, s in sorted(current, key=lambda t: t[0]) if s.dim > 0
    ]
    return result


def rational_reconstruct(x: int, bound: int, field: PrimeField | int) -> Fraction:
    """The unique rational a/b with |a|, |b| <= bound and a = x*b mod p.

    Requires 2 * bound**2 < p so the answer is unique when it exists.
    Raises NoReconstruction otherwise.  Standard half-extended
    Euclidean lattice walk.
    """
    p = field.p if isinstance(field, PrimeField) else field
    if bound <= 0 or 2 * bound * bound >= p:
        raise ValueError("need 0 < 2*bound^2 < modulus")
    x %= p
    r0, t0 = p, 0
    r1, t1 = x, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if t1 == 0 or abs(t1) > bound:
        raise NoReconstruction(f"no rational of height {bound} lifts {x} mod {p}")
    num = r1 if t1 > 0 else -r1
    den = abs(t1)
    frac = Fraction(num, den)
    if frac.denominator > bound or abs(frac.numerator) > bound:
        raise NoReconstruction(f"no rational of height {bound} lifts {x} mod {p}")
    if (frac.numerator - x * frac.denominator) % p != 0:
        raise NoReconstruction(f"no rational of height {bound} lifts {x} mod {p}")
    return frac


# ---------------------------------------------------------------------------
# Sparse triple text format, for fixtures and debugging.


def write_matrix_text(m: FieldMatrix) -> str:
    """`rows cols nnz` header then one `i j value` line per entry, 0-indexed."""
    lines = [f"{m.nrows} {m.ncols} {m.nnz}"]
    for i, j, v in m.iter_entries():
        lines.append(f"{i} {j} {v}")
    return "\n".join(lines) + "\n"


def read_matrix_text(field: PrimeField, text: str) -> FieldMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    nrows, ncols, nnz = (int(x) for x in lines[0].split())
    if len(lines) - 1 != nnz:
        raise ValueError(f"expected {nnz} entries, found {len(lines) - 1}")
    entries = []
    for ln in lines[1:]:
        i, j, v = ln.split()
        entries.append((int(i), int(j), int(v)))
    return FieldMatrix.from_entries(field, nrows, ncols, entries)
