"""Ibukiyama's dimension formula for weight-3 paramodular cusp forms.

Everything is exact rational arithmetic: the six fractional summands
must cancel to a nonnegative integer, and a failure to do so raises
instead of rounding.  Gritsenko-lift dimensions are data, not a
formula, so they are ingested from a CSV file.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

__all__ = [
    "KroneckerSymbol",
    "ParamodularDims",
    "NonIntegralResult",
    "GritsenkoExceedsTotal",
    "kronecker",
    "kronecker_euler",
    "kronecker_reciprocity",
    "f_term",
    "g_term",
    "dim_S3",
    "complement_dims",
    "load_gritsenko_csv",
]


class NonIntegralResult(Exception):
    """The rational total failed to cancel to a nonnegative integer."""


class GritsenkoExceedsTotal(Exception):
    """Ingested Gritsenko dimension exceeds the total dimension."""


def kronecker_euler(a: int, p: int) -> int:
    """(a/p) by Euler's criterion; p an odd prime."""
    a %= p
    if a == 0:
        return 0
    r = pow(a, (p - 1) // 2, p)
    return 1 if r == 1 else -1


def kronecker_reciprocity(a: int, p: int) -> int:
    """(a/p) by quadratic reciprocity and the supplementary laws."""
    acc = 1
    b = p
    while True:
        a %= b
        if a == 0:
            return 0
        while a % 2 == 0:
            a //= 2
            if b % 8 in (3, 5):
                acc = -acc
        if a == 1:
            return acc
        if a % 4 == 3 and b % 4 == 3:
            acc = -acc
        a, b = b, a


def _small_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def kronecker(a: int, p: int) -> int:
    """The Kronecker symbol (a/p) for an odd prime p."""
    if p == 2 or not _small_prime(p):
        raise ValueError(f"{p} is not an odd prime")
    return kronecker_euler(a, p)


@dataclass(frozen=True)
class KroneckerSymbol:
    """(a/p) as a value object; mostly useful in tests and reports."""

    a: int
    p: int

    @property
    def value(self) -> int:
        return kronecker(self.a, self.p)


def f_term(p: int) -> Fraction:
    """2/5 if p = 2, 3 mod 5; 1/5 if p = 5; 0 otherwise."""
    if p == 5:
        return Fraction(1, 5)
    if p % 5 in (2, 3):
        return Fraction(2, 5)
    return Fraction(0)


def g_term(p: int) -> Fraction:
    """1/6 if p = 5 mod 12; 0 otherwise."""
    return Fraction(1, 6) if p % 12 == 5 else Fraction(0)


def dim_S3(p: int) -> int:
    """dim of the weight-3 paramodular cusp forms at prime level p.

    Zero for p = 2 and 3; for p >= 5 the six-term rational sum plus
    f(p) + g(p) - 1.  The summands always cancel to a nonnegative
    integer; NonIntegralResult flags the implementation bug (or a
    misread formula) if they ever do not.
    """
    if not _small_prime(p):
        raise ValueError(f"{p} is not prime")
    if p in (2, 3):
        return 0
    k1 = kronecker(-1, p)
    k3 = kronecker(-3, p)
    k2 = kronecker(2, p)
    total = (
        Fraction(p * p - 1, 2880)
        + Fraction((p + 1) * (1 - k1), 64)
        + Fraction(5 * (p - 1) * (1 + k1), 192)
        + Fraction((p + 1) * (1 - k3), 72)
        + Fraction((p - 1) * (1 + k3), 36)
        + Fraction(1 - k2, 8)
        + f_term(p)
        + g_term(p)
        - 1
    )
    if total.denominator != 1 or total < 0:
        raise NonIntegralResult(f"dim S3({p}) evaluated to {total}")
    return int(total)


@dataclass(frozen=True)
class ParamodularDims:
    """The dimension split at one prime; None marks unknown data."""

    p: int
    dim_S3: int
    dim_gritsenko: Optional[int]
    dim_nonGritsenko: Optional[int]

    def __post_init__(self):
        if self.dim_gritsenko is not None and self.dim_nonGritsenko is not None:
            if self.dim_S3 != self.dim_gritsenko + self.dim_nonGritsenko:
                raise ValueError("dimension split does not add up")


def complement_dims(p: int, gritsenko: Optional[int]) -> ParamodularDims:
    """Split dim S3(p) into the Gritsenko part and its Hecke complement."""
    total = dim_S3(p)
    if gritsenko is None:
        return ParamodularDims(p, total, None, None)
    if gritsenko < 0 or gritsenko > total:
        raise GritsenkoExceedsTotal(
            f"Gritsenko dimension {gritsenko} incompatible with dim S3({p}) = {total}"
        )
    return ParamodularDims(p, total, gritsenko, total - gritsenko)


def load_gritsenko_csv(text: str) -> dict[int, int]:
    """Parse the `p,dim_gritsenko` file; `#` starts a comment line.

    Validates primality of p and the bound dim_gritsenko <= dim S3(p).
    """
    out: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.lower().replace(" ", "") == "p,dim_gritsenko":
            continue
        parts = [s.strip() for s in line.split(",")]
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected `p,dim_gritsenko`, got {raw!r}")
        p, g = int(parts[0]), int(parts[1])
        if not _small_prime(p):
            raise ValueError(f"line {lineno}: {p} is not prime")
        complement_dims(p, g)  # raises GritsenkoExceedsTotal on bad data
        out[p] = g
    return out
