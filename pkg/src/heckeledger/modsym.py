"""Modular symbols for Gamma0(N) with polynomial coefficients.

The cohomology H^1(Gamma0(N); E_k) is presented on Manin generators
indexed by P^1(Z/N) x {monomials X^i Y^(k-1-i)}, modulo the orientation
relation (from the order-4 element S) and the triangle relation (from
the order-3 element).  Everything is computed over a large prime field;
eigenvalues are lifted back to Q by rational reconstruction and are
only reported when two independent primes agree.

Conventions, fixed once and used everywhere:

* a matrix g in SL2(Z) acts on a cusp x/y through its columns,
  g.(x/y) = (a x + b y)/(c x + d y);
* g acts on a coefficient polynomial by substituting the adjugate,
  (g.P)(X, Y) = P(d X - b Y, -c X + a Y), so that for determinant-l
  matrices no denominators appear and the boundary eigenvalue at
  weight 2 is l + 1;
* the Manin generator (P, (c:d)) stands for g.(P tensor [0, oo])
  for any lift g of (c:d), which is well defined in the coinvariants.

Only odd k (even weight k+1) is supported: for odd k the evaluation
pairing at a cusp is insensitive to the sign of its (num, den)
representative, which is what makes the boundary map well defined
without half-integral bookkeeping.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

from .exactlin import (
    FieldContext,
    FieldMatrix,
    NoReconstruction,
    PrimeField,
    Subspace,
    _is_prime,
    echelonize,
    rank_and_kernel,
    rational_reconstruct,
    restrict_operator,
    split_eigenspaces,
)

__all__ = [
    "Cusp",
    "HomogeneousPoly",
    "CoefficientModule",
    "ModularSymbol",
    "ProjectiveLine",
    "ManinBasisSpace",
    "EigenSystem",
    "CuspidalSplit",
    "UnsupportedWeight",
    "BadPrime",
    "NoCentralMonomial",
    "MultiPrimeMismatch",
    "determinant",
    "unimodularize",
    "transform",
    "build_space",
    "hecke_operator",
    "hecke_matrix",
    "eigensystems",
    "cuspidal_coverage",
    "winding_pairing",
    "space_summary",
    "eigensystems_csv",
]


class UnsupportedWeight(Exception):
    """Raised for coefficient modules this implementation does not cover."""


class BadPrime(Exception):
    """Hecke operator requested at a prime dividing the level, or not prime."""


class NoCentralMonomial(Exception):
    """Winding pairing needs odd k so the central monomial X^m Y^m exists."""


class MultiPrimeMismatch(Exception):
    """The two working primes disagree; the result cannot be certified."""


# Default bound for lifting eigenvalues back to Q.  Far above every
# Ramanujan bound met at desk scale, far below sqrt(p/2).
RECONSTRUCT_BOUND = 10**6

_DEFAULT_CONTEXT: Optional[FieldContext] = None


def _default_context() -> FieldContext:
    global _DEFAULT_CONTEXT
    if _DEFAULT_CONTEXT is None:
        _DEFAULT_CONTEXT = FieldContext.default()
    return _DEFAULT_CONTEXT


# ---------------------------------------------------------------------------
# Cusps


class Cusp:
    """A point of P^1(Q): num/den in lowest terms, den >= 0, oo = 1/0."""

    __slots__ = ("num", "den")

    def __init__(self, num: int, den: int):
        if den == 0 and num == 0:
            raise ValueError("0/0 is not a cusp")
        g = gcd(num, den)
        if g:
            num //= g
            den //= g
        if den < 0 or (den == 0 and num < 0):
            num, den = -num, -den
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *args):
        raise AttributeError("Cusp is immutable")

    @classmethod
    def infinity(cls) -> "Cusp":
        return cls(1, 0)

    @property
    def is_infinity(self) -> bool:
        return self.den == 0

    def apply(self, a: int, b: int, c: int, d: int) -> "Cusp":
        """Image under the Moebius action of the integer matrix [[a,b],[c,d]]."""
        return Cusp(a * self.num + b * self.den, c * self.num + d * self.den)

    def __eq__(self, other) -> bool:
        return isinstance(other, Cusp) and self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return f"{self.num}/{self.den}"


def _bezout_x(a: int, b: int) -> int:
    """x with a*x + b*y = gcd(a, b)."""
    x0, x1 = 1, 0
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
    return x0


def cusps_equivalent(c1: Cusp, c2: Cusp, level: int) -> bool:
    """Gamma0(level) equivalence of cusps, Cremona's criterion."""
    s1 = _bezout_x(c1.num, c1.den)
    s2 = _bezout_x(c2.num, c2.den)
    modulus = gcd(level, c1.den * c2.den)
    return (s1 * c2.den - s2 * c1.den) % modulus == 0 if modulus else True


# ---------------------------------------------------------------------------
# Coefficient polynomials


class HomogeneousPoly:
    """Homogeneous polynomial of degree k-1 in X, Y; coeffs[i] on X^i Y^(k-1-i)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[int | Fraction]):
        object.__setattr__(self, "coeffs", tuple(coeffs))

    def __setattr__(self, *args):
        raise AttributeError("HomogeneousPoly is immutable")

    @property
    def k(self) -> int:
        return len(self.coeffs)

    @classmethod
    def monomial(cls, k: int, i: int) -> "HomogeneousPoly":
        coeffs = [0] * k
        coeffs[i] = 1
        return cls(coeffs)

    def subst(self, a, b, c, d) -> "HomogeneousPoly":
        """P(aX + bY, cX + dY), expanded on the monomial basis."""
        deg = len(self.coeffs) - 1
        pow1 = [[1]]
        pow2 = [[1]]
        for m in range(deg):
            prev1, prev2 = pow1[m], pow2[m]
            nxt1 = [0] * (m + 2)
            nxt2 = [0] * (m + 2)
            for j in range(m + 1):
                nxt1[j] += b * prev1[j]
                nxt1[j + 1] += a * prev1[j]
                nxt2[j] += d * prev2[j]
                nxt2[j + 1] += c * prev2[j]
            pow1.append(nxt1)
            pow2.append(nxt2)
        out = [0] * (deg + 1)
        for i, ci in enumerate(self.coeffs):
            if not ci:
                continue
            first = pow1[i]
            second = pow2[deg - i]
            for j1, v1 in enumerate(first):
                if not v1:
                    continue
                civ1 = ci * v1
                for j2, v2 in enumerate(second):
                    if v2:
                        out[j1 + j2] += civ1 * v2
        return HomogeneousPoly(out)

    def scaled(self, c) -> "HomogeneousPoly":
        return HomogeneousPoly([c * x for x in self.coeffs])

    def cleared(self) -> tuple["HomogeneousPoly", int]:
        """Integer polynomial plus the common denominator that was cleared."""
        den = 1
        for c in self.coeffs:
            if isinstance(c, Fraction):
                den = den * c.denominator // gcd(den, c.denominator)
        ints = [int(c * den) if isinstance(c, Fraction) else c * den for c in self.coeffs]
        return HomogeneousPoly(ints), den

    def __eq__(self, other) -> bool:
        return isinstance(other, HomogeneousPoly) and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"HomogeneousPoly({list(self.coeffs)})"


@dataclass(frozen=True)
class CoefficientModule:
    """The k-dimensional module of degree k-1 polynomials (weight k+1 forms)."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")

    @property
    def weight(self) -> int:
        return self.k + 1

    def monomials(self) -> list[HomogeneousPoly]:
        return [HomogeneousPoly.monomial(self.k, i) for i in range(self.k)]


@dataclass(frozen=True)
class ModularSymbol:
    """The geometric generator [q1, q2] tensor a coefficient polynomial."""

    q1: Cusp
    q2: Cusp
    coeff: HomogeneousPoly

    @classmethod
    def weight2(cls, q1: Cusp, q2: Cusp) -> "ModularSymbol":
        return cls(q1, q2, HomogeneousPoly((1,)))


def determinant(s: ModularSymbol) -> int:
    """n(xi) = |a1 b2 - a2 b1| on reduced endpoint fractions; 1 iff unimodular."""
    return abs(s.q1.num * s.q2.den - s.q2.num * s.q1.den)


def _adj(a: int, b: int, c: int, d: int) -> tuple[int, int, int, int]:
    return d, -b, -c, a


def transform(s: ModularSymbol, g: Sequence[Sequence[int]]) -> ModularSymbol:
    """g.s for g in SL2(Z): Moebius on endpoints, adjugate substitution on coeff."""
    (a, b), (c, d) = g
    if a * d - b * c != 1:
        raise ValueError("transform expects a determinant-1 integer matrix")
    return ModularSymbol(s.q1.apply(a, b, c, d), s.q2.apply(a, b, c, d), s.coeff.subst(*_adj(a, b, c, d)))


# ---------------------------------------------------------------------------
# Manin's continued-fraction reduction


def _nearest_quotient(a: int, b: int) -> int:
    # round(a/b) with ties toward -inf; b > 0
    return -((b - 2 * a) // (2 * b))


def _convergent_chain(q: Cusp) -> list[Cusp]:
    """Cusps [oo, c_0, ..., q]: consecutive pairs are unimodular.

    Centered (nearest-integer) continued fraction: remainders at least
    halve at every step, so the chain has length <= log2(den) + 2.
    """
    if q.is_infinity:
        return [q]
    quots: list[tuple[int, int]] = []
    a, b = q.num, q.den
    sign = 1
    while b:
        quot = _nearest_quotient(a, b)
        r = a - quot * b
        quots.append((quot, sign))
        sign = 1 if r >= 0 else -1
        a, b = b, abs(r)
    chain = [Cusp.infinity()]
    pm2, qm2 = 0, 1
    pm1, qm1 = 1, 0
    for quot, s in quots:
        pc = quot * pm1 + s * pm2
        qc = quot * qm1 + s * qm2
        chain.append(Cusp(pc, qc))
        pm2, qm2, pm1, qm1 = pm1, qm1, pc, qc
    return chain


def unimodularize(s: ModularSymbol) -> list[ModularSymbol]:
    """Write s as a telescoping chain of determinant-1 symbols.

    The chain runs from s.q1 to s.q2 through the convergents of both
    endpoints, with the shared initial segment through oo cancelled
    (such a cancelled pair sums to zero by the orientation relation).
    Every output symbol carries the coefficient of s unchanged: the
    triangle relation splits [q1, q2] as [q1, c] + [c, q2] with the
    same polynomial on both parts.
    """
    if s.q1 == s.q2:
        return []
    if determinant(s) == 1:
        return [s]
    left = list(reversed(_convergent_chain(s.q1)))
    right = _convergent_chain(s.q2)
    j = 0
    while len(left) >= 2 and j + 1 < len(right) and left[-2] == right[j + 1]:
        left.pop()
        j += 1
    path = left[:-1] + right[j:]
    return [ModularSymbol(path[i], path[i + 1], s.coeff) for i in range(len(path) - 1)]


# ---------------------------------------------------------------------------
# P^1(Z/N)


class ProjectiveLine:
    """Canonical representatives and index lookup for P^1(Z/N).

    The reduction follows the standard algorithm (Stein, Algorithm
    8.29): scale by a unit so the first coordinate becomes gcd(c, N),
    then minimize the second coordinate over the residual stabilizer.
    """

    def __init__(self, level: int):
        if level < 1:
            raise ValueError("level must be positive")
        self.level = level
        if level == 1:
            pts = [(0, 1)]
        elif _is_prime(level):
            pts = [(0, 1)] + [(1, d) for d in range(level)]
        else:
            seen = set()
            for c in range(level):
                for d in range(level):
                    if gcd(gcd(c, d), level) == 1:
                        seen.add(self.reduce(c, d))
            pts = list(seen)
        self.points: list[tuple[int, int]] = sorted(pts)
        self._index = {pt: i for i, pt in enumerate(self.points)}
        self._lift_cache: dict[int, tuple[int, int, int, int]] = {}

    def __len__(self) -> int:
        return len(self.points)

    def reduce(self, c: int, d: int) -> tuple[int, int]:
        n = self.level
        if n == 1:
            return (0, 1)
        c %= n
        d %= n
        if gcd(gcd(c, d), n) != 1:
            raise ValueError(f"({c}:{d}) is not a point of P^1(Z/{n})")
        if c == 0:
            return (0, 1)
        g = gcd(c, n)
        n0 = n // g
        s = pow(c // g, -1, n0)
        while gcd(s, n) != 1:
            s += n0
        v = s * d % n
        if g == 1:
            return (1, v)
        v = min(v * t % n for t in range(1, n, n0) if gcd(t, n) == 1)
        return (g, v)

    def index(self, c: int, d: int) -> int:
        return self._index[self.reduce(c, d)]

    def lift_to_sl2(self, idx: int) -> tuple[int, int, int, int]:
        """An SL2(Z) matrix whose bottom row reduces to the idx-th point."""
        cached = self._lift_cache.get(idx)
        if cached is not None:
            return cached
        c, d = self.points[idx]
        n = self.level
        if c == 0 and gcd(0, d) != 1:
            c = n
        if gcd(c, d) != 1:
            t = 1
            while gcd(c, d + t * n) != 1:
                t += 1
            d += t * n
        if (c, d) == (0, 1):
            mat = (1, 0, 0, 1)
        else:
            x0, x1 = 1, 0
            a0, b0 = d, c
            while b0:
                q, r = divmod(a0, b0)
                a0, b0 = b0, r
                x0, x1 = x1, x0 - q * x1
            # x0*d = 1 mod c, complete to determinant one
            a = x0
            b = (a * d - 1) // c if c else 0
            assert a * d - b * c == 1
            mat = (a, b, c, d)
        self._lift_cache[idx] = mat
        return mat


# Right action of the standard torsion elements on bottom rows (c, d),
# plus the corresponding inverse substitution on coefficients:
#   S = [[0,-1],[1,0]]           (c,d) -> (d,-c)    P -> P(-Y, X)
#   sigma = [[-1,-1],[1,0]]      (c,d) -> (d-c,-c)  P -> P(-X-Y, X)
#   sigma^2 = [[0,1],[-1,-1]]    (c,d) -> (-d,c-d)  P -> P(Y, -X-Y)


# ---------------------------------------------------------------------------
# The Manin basis space


@dataclass(frozen=True)
class EigenSystem:
    """A two-prime-confirmed rational Hecke eigensystem."""

    level: int
    weight: int
    eigenvalues: dict[int, Fraction]
    cuspidal: bool
    dim: int

    def tuple_at(self, primes: Sequence[int]) -> tuple[Fraction, ...]:
        return tuple(self.eigenvalues[l] for l in primes)


@dataclass
class CuspidalSplit:
    """Eigensystem census of the cuspidal subspace at a list of primes.

    `systems` carry eigenvalues confirmed at both working primes.
    `unresolved_dim` counts the cuspidal dimension not covered by any
    confirmed system (irrational eigensystems, or disagreement between
    the primes); nothing is ever silently dropped.
    """

    systems: list[EigenSystem]
    cuspidal_dim: int
    unresolved_dim: int
    primes: list[int]


class ManinBasisSpace:
    """The quotient presentation of H^1(Gamma0(N); E_k) over one prime field.

    Immutable after construction; share freely between threads.  Hecke
    matrices are cached per operator index.
    """

    def __init__(self, level: int, module: CoefficientModule, field: PrimeField,
                 context: FieldContext):
        self.level = level
        self.module = module
        self.field = field
        self.context = context
        self.p1 = ProjectiveLine(level)
        k = module.k
        npts = len(self.p1)
        self.generators: list[tuple[int, int]] = [
            (i, j) for i in range(k) for j in range(npts)
        ]

        self.relation_matrix = self._build_relations()
        ech = echelonize(self.relation_matrix)
        ngens = len(self.generators)
        pivset = set(ech.pivots)
        self.free_columns: list[int] = [j for j in range(ngens) if j not in pivset]
        self._free_pos = {c: t for t, c in enumerate(self.free_columns)}
        # pivot generator -> its expression on the free generators
        expr: dict[int, dict[int, int]] = {}
        p = field.p
        for r, c in enumerate(ech.pivots):
            row = ech.matrix.rows[r]
            expr[c] = {
                self._free_pos[j]: (p - v) % p for j, v in row.items() if j != c
            }
        self._pivot_expr = expr
        self.quotient_basis = Subspace.from_vectors(
            field, ngens, [{c: 1} for c in self.free_columns]
        )

        self.cusp_classes: list[Cusp] = []
        self.boundary_matrix = self._build_boundary()
        _, self.cuspidal_subspace = rank_and_kernel(self.boundary_matrix)

        self._hecke_cache: dict[int, FieldMatrix] = {}
        self._partner: Optional["ManinBasisSpace"] = None

    # -- presentation ---------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.free_columns)

    @property
    def cuspidal_dim(self) -> int:
        return self.cuspidal_subspace.dim

    @property
    def eisenstein_dim(self) -> int:
        return self.dim - self.cuspidal_dim

    def _build_relations(self) -> FieldMatrix:
        k = self.module.k
        npts = len(self.p1)
        ngens = len(self.generators)
        rel = FieldMatrix.zero(self.field, 2 * ngens, ngens)
        monos = self.module.monomials()
        s_img = [m.subst(0, -1, 1, 0) for m in monos]       # P(-Y, X)
        u_img = [m.subst(-1, -1, 1, 0) for m in monos]      # P(-X-Y, X)
        u2_img = [m.subst(0, 1, -1, -1) for m in monos]     # P(Y, -X-Y)
        for j, (c, d) in enumerate(self.p1.points):
            j_s = self.p1.index(d, -c)
            j_u = self.p1.index(d - c, -c)
            j_u2 = self.p1.index(-d, c - d)
            for i in range(k):
                row = i * npts + j
                rel.add_at(row, i * npts + j, 1)
                for m, cm in enumerate(s_img[i].coeffs):
                    if cm:
                        rel.add_at(row, m * npts + j_s, cm)
                row2 = ngens + row
                rel.add_at(row2, i * npts + j, 1)
                for m, cm in enumerate(u_img[i].coeffs):
                    if cm:
                        rel.add_at(row2, m * npts + j_u, cm)
                for m, cm in enumerate(u2_img[i].coeffs):
                    if cm:
                        rel.add_at(row2, m * npts + j_u2, cm)
        return rel

    def _cusp_class(self, cusp: Cusp) -> int:
        for idx, rep in enumerate(self.cusp_classes):
            if cusps_equivalent(cusp, rep, self.level):
                return idx
        self.cusp_classes.append(cusp)
        return len(self.cusp_classes) - 1

    def _build_boundary(self) -> FieldMatrix:
        """Boundary of each free generator on Gamma0(N)-classes of cusps.

        For the Manin generator (X^i Y^(k-1-i), g) the boundary is
        e[g.oo] when i = k-1 minus e[g.0] when i = 0; the middle
        monomials evaluate to zero at both endpoints.
        """
        k = self.module.k
        npts = len(self.p1)
        entries = []
        for pos, col in enumerate(self.free_columns):
            i, j = self.generators[col]
            a, b, c, d = self.p1.lift_to_sl2(j)
            if i == k - 1:
                entries.append((self._cusp_class(Cusp(a, c)), pos, 1))
            if i == 0:
                entries.append((self._cusp_class(Cusp(b, d)), pos, -1))
        mat = FieldMatrix.zero(self.field, len(self.cusp_classes), self.dim)
        for r, c2, v in entries:
            mat.add_at(r, c2, v)
        return mat

    # -- projection to quotient coordinates ------------------------------

    def project_generator(self, gen: int) -> dict[int, int]:
        pos = self._free_pos.get(gen)
        if pos is not None:
            return {pos: 1}
        return dict(self._pivot_expr[gen])

    def _accumulate_manin(self, vec: dict[int, int], q1: Cusp, q2: Cusp,
                          poly: HomogeneousPoly, scale: int) -> None:
        """Add scale * (the Manin expansion of poly tensor [q1, q2]) to vec."""
        p = self.field.p
        npts = len(self.p1)
        for piece in unimodularize(ModularSymbol(q1, q2, poly)):
            x1, y1 = piece.q1.num, piece.q1.den
            x2, y2 = piece.q2.num, piece.q2.den
            det = x2 * y1 - x1 * y2
            if det == -1:
                x2, y2 = -x2, -y2
            elif det != 1:
                raise AssertionError("non-unimodular piece from unimodularize")
            transported = piece.coeff.subst(x2, x1, y2, y1)
            cls_idx = self.p1.index(y2, y1)
            for i, ci in enumerate(transported.coeffs):
                if not ci:
                    continue
                c = ci * scale % p
                if not c:
                    continue
                for pos, w in self.project_generator(i * npts + cls_idx).items():
                    vec[pos] = (vec.get(pos, 0) + c * w) % p

    def project_symbol(self, s: ModularSymbol) -> dict[int, int]:
        """Quotient coordinates of an arbitrary modular symbol.

        Rational coefficients are cleared to a common denominator first;
        the denominator must be a unit modulo the working prime.
        """
        if s.coeff.k != self.module.k:
            raise ValueError("coefficient polynomial has the wrong degree")
        ints, den = s.coeff.cleared()
        if den % self.field.p == 0:
            raise ArithmeticError("coefficient denominator vanishes in the field")
        scale = pow(den, -1, self.field.p)
        vec: dict[int, int] = {}
        self._accumulate_manin(vec, s.q1, s.q2, ints, scale)
        return {k2: v for k2, v in vec.items() if v}

    # -- Hecke action -----------------------------------------------------

    def _hecke_cosets(self, n: int) -> list[tuple[int, int, int, int]]:
        cosets = []
        for a in range(1, n + 1):
            if n % a:
                continue
            d = n // a
            for b in range(d):
                cosets.append((a, b, 0, d))
        return cosets

    def hecke_matrix(self, n: int) -> FieldMatrix:
        """Matrix of T_n on the quotient basis, n coprime to the level.

        Follows the symbol-level action: each coset matrix moves the
        endpoints and transports the coefficient, then the image is
        re-expressed on the Manin basis through the continued-fraction
        reduction.
        """
        if gcd(n, self.level) != 1:
            raise BadPrime(f"T_{n} undefined: {n} shares a factor with level {self.level}")
        cached = self._hecke_cache.get(n)
        if cached is not None:
            return cached
        npts = len(self.p1)
        cosets = self._hecke_cosets(n)
        mat = FieldMatrix.zero(self.field, self.dim, self.dim)
        for pos, col in enumerate(self.free_columns):
            i, j = self.generators[col]
            mono = HomogeneousPoly.monomial(self.module.k, i)
            g = self.p1.lift_to_sl2(j)
            vec: dict[int, int] = {}
            for (ca, cb, cc, cd) in cosets:
                # h0 = coset * lift; the image symbol is
                #   (mono o adj(h0)) tensor [h0.0, h0.oo]
                h11 = ca * g[0] + cb * g[2]
                h12 = ca * g[1] + cb * g[3]
                h21 = cc * g[0] + cd * g[2]
                h22 = cc * g[1] + cd * g[3]
                poly = mono.subst(*_adj(h11, h12, h21, h22))
                q1 = Cusp(h12, h22)
                q2 = Cusp(h11, h21)
                self._accumulate_manin(vec, q1, q2, poly, 1)
            for r, v in vec.items():
                if v:
                    mat.add_at(r, pos, v)
        self._hecke_cache[n] = mat
        return mat

    # -- the partner space for the two-prime protocol ----------------------

    def partner(self) -> "ManinBasisSpace":
        """The same presentation rebuilt modulo the other working prime."""
        if self._partner is None:
            other = (
                self.context.secondary
                if self.field == self.context.primary
                else self.context.primary
            )
            twin = ManinBasisSpace(self.level, self.module, other, self.context)
            twin._partner = self
            self._partner = twin
        return self._partner


def build_space(level: int, k: int, *, context: Optional[FieldContext] = None,
                field: Optional[PrimeField] = None) -> ManinBasisSpace:
    """Presentation of H^1(Gamma0(level); E_k) over the working prime field.

    k is the dimension of the coefficient module (weight k+1 forms);
    only odd k is implemented, so weights 2 and 4 are k = 1 and k = 3.
    """
    if level < 1:
        raise ValueError("level must be positive")
    if k % 2 == 0:
        raise UnsupportedWeight(
            f"k = {k} (weight {k + 1}) not supported: only odd k is implemented"
        )
    ctx = context if context is not None else _default_context()
    fld = field if field is not None else ctx.primary
    return ManinBasisSpace(level, CoefficientModule(k), fld, ctx)


def hecke_matrix(space: ManinBasisSpace, n: int) -> FieldMatrix:
    """T_n on the quotient basis for any n >= 1 coprime to the level."""
    return space.hecke_matrix(n)


def hecke_operator(space: ManinBasisSpace, l: int) -> FieldMatrix:
    """T_l for a prime l not dividing the level."""
    if not _is_prime(l):
        raise BadPrime(f"{l} is not prime")
    if space.level % l == 0:
        raise BadPrime(f"U_{l} at a prime dividing the level is out of scope")
    return space.hecke_matrix(l)


# ---------------------------------------------------------------------------
# Eigensystems, two-prime confirmation, winding pairing


def _split_cuspidal(space: ManinBasisSpace, primes: Sequence[int], threads: int = 1):
    ops = _hecke_family(space, primes, threads)
    restricted = [restrict_operator(op, space.cuspidal_subspace) for op in ops]
    return split_eigenspaces(restricted)


def _hecke_family(space: ManinBasisSpace, primes: Sequence[int], threads: int = 1):
    """Hecke matrices for several primes; independent, so parallel is safe."""
    todo = [l for l in primes if l not in space._hecke_cache]
    if threads > 1 and len(todo) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda l: hecke_operator(space, l), todo))
    return [hecke_operator(space, l) for l in primes]


def _reconstructed_systems(space, primes, threads, bound):
    """(eigenvalue tuple as Fractions, dim) for each splittable eigenspace."""
    split = _split_cuspidal(space, primes, threads)
    out = []
    covered = 0
    for eig in split.eigenspaces:
        covered += eig.space.dim
        try:
            fracs = tuple(rational_reconstruct(v, bound, space.field) for v in eig.values)
        except NoReconstruction:
            continue
        out.append((fracs, eig.space.dim))
    return out, covered


def cuspidal_coverage(space: ManinBasisSpace, primes: Sequence[int], *,
                      threads: int = 1, bound: int = RECONSTRUCT_BOUND) -> CuspidalSplit:
    """Two-prime-confirmed eigensystems plus the dimension left unresolved."""
    primes = sorted(set(primes))
    for l in primes:
        if space.level % l == 0:
            raise BadPrime(f"{l} divides the level {space.level}")
    sys_a, _ = _reconstructed_systems(space, primes, threads, bound)
    sys_b, _ = _reconstructed_systems(space.partner(), primes, threads, bound)
    confirmed = sorted(set(sys_a) & set(sys_b))
    systems = [
        EigenSystem(
            level=space.level,
            weight=space.module.weight,
            eigenvalues=dict(zip(primes, fracs)),
            cuspidal=True,
            dim=dim,
        )
        for fracs, dim in confirmed
    ]
    covered = sum(dim for _, dim in confirmed)
    return CuspidalSplit(
        systems=systems,
        cuspidal_dim=space.cuspidal_dim,
        unresolved_dim=space.cuspidal_dim - covered,
        primes=list(primes),
    )


def eigensystems(space: ManinBasisSpace, primes: Sequence[int], *,
                 threads: int = 1, bound: int = RECONSTRUCT_BOUND) -> list[EigenSystem]:
    """One EigenSystem per simultaneous eigenspace of the T_l on the
    cuspidal subspace, reconstructed and confirmed at the second prime."""
    return cuspidal_coverage(space, primes, threads=threads, bound=bound).systems


def _winding_vector(space: ManinBasisSpace) -> dict[int, int]:
    k = space.module.k
    m = (k - 1) // 2
    gen = m * len(space.p1) + space.p1.index(0, 1)
    return space.project_generator(gen)


def _left_eigenbasis(space: ManinBasisSpace, primes: Sequence[int],
                     target: tuple[int, ...], threads: int) -> list[dict[int, int]]:
    """Canonical echelon basis of the left eigenspace with the given values."""
    ops = [m.transpose() for m in _hecke_family(space, primes, threads)]
    split = split_eigenspaces(ops)
    for eig in split.eigenspaces:
        if eig.values == target:
            return [dict(v) for v in eig.space.basis]
    raise MultiPrimeMismatch(
        f"no left eigenspace with eigenvalues {target} mod {space.field.p}"
    )


def _pair(vec_u: dict[int, int], vec_w: dict[int, int], p: int) -> int:
    small, big = (vec_u, vec_w) if len(vec_u) <= len(vec_w) else (vec_w, vec_u)
    return sum(v * big.get(i, 0) for i, v in small.items()) % p


def winding_pairing(space: ManinBasisSpace, system: EigenSystem, *,
                    threads: int = 1) -> Fraction:
    """Pairing of the eigensystem against the winding symbol [0, oo] X^m Y^m.

    Returns an exact rational that vanishes if and only if the
    component of the winding symbol in the eigenspace vanishes, the
    exact surrogate for central L-value vanishing.  The value is the
    sum of squares of the pairings against the canonical left
    eigenbasis; it is well defined only up to a fixed positive rational
    per system, which does not affect the vanishing test.  Zero is
    declared only when the pairing is zero at both working primes.
    """
    if space.module.k % 2 == 0:
        raise NoCentralMonomial("even k has no central monomial X^m Y^m")
    if not system.cuspidal:
        raise ValueError("winding pairing is defined for cuspidal systems")
    primes = sorted(system.eigenvalues)
    values: list[list[int]] = []
    moduli: list[int] = []
    for sp in (space, space.partner()):
        p = sp.field.p
        target = tuple(sp.field.elem(system.eigenvalues[l]) for l in primes)
        basis = _left_eigenbasis(sp, primes, target, threads)
        w = _winding_vector(sp)
        values.append([_pair(u, w, p) for u in basis])
        moduli.append(p)
    if len(values[0]) != len(values[1]):
        raise MultiPrimeMismatch("left eigenspace dimensions differ between primes")
    zero_a = all(v == 0 for v in values[0])
    zero_b = all(v == 0 for v in values[1])
    if zero_a != zero_b:
        raise MultiPrimeMismatch("winding pairing vanishes at one prime only")
    if zero_a:
        return Fraction(0)
    total = Fraction(0)
    p1, p2 = moduli
    for va, vb in zip(values[0], values[1]):
        try:
            ra = rational_reconstruct(va, RECONSTRUCT_BOUND, p1)
            rb = rational_reconstruct(vb, RECONSTRUCT_BOUND, p2)
            if ra != rb:
                raise MultiPrimeMismatch(
                    f"winding pairing reconstructs to {ra} and {rb}"
                )
            total += ra * ra
            continue
        except NoReconstruction:
            pass
        # Taller rationals: CRT-combine the residues and lift once.
        crt_mod = p1 * p2
        inv = pow(p1, -1, p2)
        combined = (va + (vb - va) * inv % p2 * p1) % crt_mod
        r = rational_reconstruct(combined, 1 << 59, crt_mod)
        total += r * r
    return total


# ---------------------------------------------------------------------------
# Exports


def space_summary(space: ManinBasisSpace) -> dict:
    return {
        "level": space.level,
        "k": space.module.k,
        "quotient_dim": space.dim,
        "cuspidal_dim": space.cuspidal_dim,
        "eisenstein_dim": space.eisenstein_dim,
    }


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def eigensystems_csv(systems: Iterable[EigenSystem]) -> str:
    """CSV export, one row per (system, prime)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["level", "weight", "dim", "prime", "eigenvalue"])
    for sys_ in systems:
        for l in sorted(sys_.eigenvalues):
            writer.writerow([sys_.level, sys_.weight, sys_.dim, l, _frac_str(sys_.eigenvalues[l])])
    return buf.getvalue()
