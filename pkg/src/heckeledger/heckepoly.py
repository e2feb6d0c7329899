"""Hecke polynomials in T with exact rational coefficients.

The general degree-n polynomial is assembled from eigenvalues as

    sum_k (-1)^k l^(k(k-1)/2) a(l,k) T^k,    a(l,0) = 1,

normalized so that under T = l^(-s) the functional equation relates s
and n - s.  The lift families for weight-2, weight-4 and rank-3
cuspidal sources are stored expanded; their factored shapes are
checked by exact division, never by floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

__all__ = [
    "HeckePolynomial",
    "LiftClass",
    "SL3Datum",
    "WEIGHT2_A",
    "WEIGHT2_B",
    "WEIGHT4",
    "SL3_A",
    "SL3_B",
    "LIFT_KINDS",
    "assemble",
    "weight2_lifts",
    "weight4_lift",
    "sl3_lifts",
    "poly_mul",
    "poly_divmod",
    "divides_exactly",
    "linear_factor",
    "functional_dual",
    "check_factor_shape",
    "poly_to_json",
    "poly_from_json",
]

WEIGHT2_A = "weight2_a"
WEIGHT2_B = "weight2_b"
WEIGHT4 = "weight4"
SL3_A = "sl3_a"
SL3_B = "sl3_b"

# Exponents e of the forced linear factors (1 - l^e T) per kind.
LIFT_KINDS: dict[str, tuple[int, ...]] = {
    WEIGHT2_A: (2, 3),
    WEIGHT2_B: (0, 1),
    WEIGHT4: (1, 2),
    SL3_A: (3,),
    SL3_B: (0,),
}


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def poly_mul(f: Sequence[Fraction], g: Sequence[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                if b:
                    out[i + j] += a * b
    return out


def poly_divmod(f: Sequence[Fraction], g: Sequence[Fraction]):
    f = [_frac(x) for x in f]
    g = [_frac(x) for x in g]
    while g and g[-1] == 0:
        g.pop()
    if not g:
        raise ZeroDivisionError("division by the zero polynomial")
    q = [Fraction(0)] * max(0, len(f) - len(g) + 1)
    while len(f) >= len(g) and any(f):
        while f and f[-1] == 0:
            f.pop()
        if len(f) < len(g):
            break
        c = f[-1] / g[-1]
        d = len(f) - len(g)
        q[d] = c
        for i, b in enumerate(g):
            f[d + i] -= c * b
    while f and f[-1] == 0:
        f.pop()
    return q, f


def divides_exactly(f: Sequence[Fraction], g: Sequence[Fraction]) -> bool:
    """True when g divides f with zero remainder."""
    _, r = poly_divmod(f, g)
    return not r


def linear_factor(l: int, e: int) -> list[Fraction]:
    """The factor 1 - l^e T."""
    return [Fraction(1), Fraction(-(l**e))]


@dataclass(frozen=True)
class HeckePolynomial:
    """A polynomial in T, constant coefficient 1, attached to a prime l."""

    prime_l: int
    coeffs: tuple[Fraction, ...]
    n: int

    def __post_init__(self):
        if not self.coeffs or self.coeffs[0] != 1:
            raise ValueError("Hecke polynomials are normalized with constant term 1")
        if len(self.coeffs) - 1 > self.n:
            raise ValueError("degree exceeds the rank parameter")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, t: Fraction) -> Fraction:
        out = Fraction(0)
        for c in reversed(self.coeffs):
            out = out * t + c
        return out

    def __mul__(self, other: "HeckePolynomial") -> "HeckePolynomial":
        if other.prime_l != self.prime_l:
            raise ValueError("polynomials attached to different primes")
        return HeckePolynomial(
            self.prime_l, tuple(poly_mul(self.coeffs, other.coeffs)), self.n + other.n
        )


def _poly(l: int, coeffs: Sequence, n: int) -> HeckePolynomial:
    return HeckePolynomial(l, tuple(_frac(c) for c in coeffs), n)


def assemble(n: int, l: int, a: Sequence, central=1) -> HeckePolynomial:
    """The degree-n Hecke polynomial from eigenvalues a(l,1..n-1).

    Coefficient of T^k is (-1)^k l^(k(k-1)/2) a(l,k); a(l,0) = 1 and
    a(l,n) is the supplied central value (1 for the special linear
    group).
    """
    if len(a) != n - 1:
        raise ValueError(f"need {n - 1} eigenvalues for rank {n}, got {len(a)}")
    values = [Fraction(1)] + [_frac(x) for x in a] + [_frac(central)]
    coeffs = [
        (-1) ** k * Fraction(l) ** (k * (k - 1) // 2) * values[k] for k in range(n + 1)
    ]
    return _poly(l, coeffs, n)


def weight2_lifts(l: int, alpha) -> tuple[HeckePolynomial, HeckePolynomial]:
    """Both degree-4 families attached to a weight-2 newform, expanded.

    (1 - l^2 T)(1 - l^3 T)(1 - alpha T + l T^2)  and
    (1 - T)(1 - l T)(1 - l^2 alpha T + l^5 T^2).
    """
    alpha = _frac(alpha)
    first = poly_mul(
        poly_mul(linear_factor(l, 2), linear_factor(l, 3)),
        [Fraction(1), -alpha, Fraction(l)],
    )
    second = poly_mul(
        poly_mul(linear_factor(l, 0), linear_factor(l, 1)),
        [Fraction(1), -(l**2) * alpha, Fraction(l**5)],
    )
    return _poly(l, first, 4), _poly(l, second, 4)


def weight4_lift(l: int, beta) -> HeckePolynomial:
    """(1 - l T)(1 - l^2 T)(1 - beta T + l^3 T^2), expanded.

    Meaningful for a weight-4 newform whose central value vanishes;
    checking that condition is the caller's job.
    """
    beta = _frac(beta)
    out = poly_mul(
        poly_mul(linear_factor(l, 1), linear_factor(l, 2)),
        [Fraction(1), -beta, Fraction(l**3)],
    )
    return _poly(l, out, 4)


def sl3_lifts(l: int, gamma, gamma_prime) -> tuple[HeckePolynomial, HeckePolynomial]:
    """Both degree-4 families attached to a rank-3 cuspidal class.

    (1 - l^3 T)(1 - gamma T + l gamma' T^2 - l^3 T^3)  and
    (1 - T)(1 - l gamma T + l^3 gamma' T^2 - l^6 T^3).
    """
    gamma = _frac(gamma)
    gamma_prime = _frac(gamma_prime)
    first = poly_mul(
        linear_factor(l, 3),
        [Fraction(1), -gamma, l * gamma_prime, Fraction(-(l**3))],
    )
    second = poly_mul(
        linear_factor(l, 0),
        [Fraction(1), -l * gamma, l**3 * gamma_prime, Fraction(-(l**6))],
    )
    return _poly(l, first, 4), _poly(l, second, 4)


def functional_dual(poly: HeckePolynomial) -> HeckePolynomial:
    """l^6 T^4 P(1/(l^3 T)) for a degree-4 polynomial.

    The footnote normalization pairs each family with its
    contragredient: the weight-4 family is its own dual, the two
    weight-2 families are each other's, and the two rank-3 families
    are dual up to swapping gamma and gamma'.
    """
    if poly.degree != 4:
        raise ValueError("dual is implemented for the degree-4 families")
    l = poly.prime_l
    coeffs = [poly.coeffs[4 - j] * Fraction(l) ** (3 * j - 6) for j in range(5)]
    return _poly(l, coeffs, 4)


def check_factor_shape(kind: str, poly: HeckePolynomial) -> bool:
    """Exact-division check of the forced linear factors for the kind."""
    if kind not in LIFT_KINDS:
        raise ValueError(f"unknown lift kind {kind!r}")
    f = list(poly.coeffs)
    for e in LIFT_KINDS[kind]:
        g = linear_factor(poly.prime_l, e)
        if not divides_exactly(f, g):
            return False
        f, _ = poly_divmod(f, g)
    return True


@dataclass(frozen=True)
class SL3Datum:
    """Hecke data of one rank-3 cuspidal class: l -> (gamma, gamma')."""

    level: int
    eigenvalues: dict[int, tuple[Fraction, Fraction]]

    def pair(self, l: int) -> tuple[Fraction, Fraction]:
        return self.eigenvalues[l]


@dataclass(frozen=True)
class LiftClass:
    """One polynomial family of a lift, tagged with its kind and source."""

    kind: str
    source: str
    polynomial_family: dict[int, HeckePolynomial]

    def __post_init__(self):
        for poly in self.polynomial_family.values():
            if not check_factor_shape(self.kind, poly):
                raise ValueError(
                    f"{self.kind} polynomial at l={poly.prime_l} fails its factor shape"
                )


# -- wire format -------------------------------------------------------------


def _coeff_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _coeff_parse(s: str) -> Fraction:
    return Fraction(s)


def poly_to_json(poly: HeckePolynomial) -> dict:
    """Exact wire form: coefficients as decimal strings."""
    return {"l": poly.prime_l, "coeffs": [_coeff_str(c) for c in poly.coeffs]}


def poly_from_json(obj: dict, n: int | None = None) -> HeckePolynomial:
    coeffs = tuple(_coeff_parse(s) for s in obj["coeffs"])
    return HeckePolynomial(int(obj["l"]), coeffs, n if n is not None else len(coeffs) - 1)
