"""Independent first-principles oracles for the test suite.

Nothing here imports the package under test.  Dimensions of modular
form spaces come from the classical index/elliptic-point/cusp counts
for X_0(N); eigenvalues of the level-11 weight-2 form come from point
counts on a stored Weierstrass equation.
"""

from fractions import Fraction
from math import gcd, isqrt


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, isqrt(n) + 1):
        if n % d == 0:
            return False
    return True


def euler_phi(n: int) -> int:
    out = n
    for p in prime_factors(n):
        out = out // p * (p - 1)
    return out


def legendre_via_squares(a: int, p: int) -> int:
    """(a/p) by brute enumeration of squares; p odd prime."""
    a %= p
    if a == 0:
        return 0
    squares = {x * x % p for x in range(1, p)}
    return 1 if a in squares else -1


def index_gamma0(n: int) -> int:
    mu = n
    for p in prime_factors(n):
        mu = mu // p * (p + 1)
    return mu


def nu2(n: int) -> int:
    if n % 4 == 0:
        return 0
    out = 1
    for p in prime_factors(n):
        if p == 2:
            continue
        out *= 1 + (1 if p % 4 == 1 else -1)
    return out


def nu3(n: int) -> int:
    if n % 9 == 0:
        return 0
    out = 1
    for p in prime_factors(n):
        if p == 3:
            continue
        out *= 1 + (1 if p % 3 == 1 else -1)
    return out


def num_cusps(n: int) -> int:
    return sum(euler_phi(gcd(d, n // d)) for d in range(1, n + 1) if n % d == 0)


def genus_x0(n: int) -> int:
    g = (
        1
        + Fraction(index_gamma0(n), 12)
        - Fraction(nu2(n), 4)
        - Fraction(nu3(n), 3)
        - Fraction(num_cusps(n), 2)
    )
    assert g.denominator == 1
    return int(g)


def dim_cusp_forms(n: int, weight: int) -> int:
    """dim S_weight(Gamma0(n)) for even weight >= 2."""
    assert weight >= 2 and weight % 2 == 0
    g = genus_x0(n)
    if weight == 2:
        return g
    return (
        (weight - 1) * (g - 1)
        + (weight // 2 - 1) * num_cusps(n)
        + (weight // 4) * nu2(n)
        + (weight // 3) * nu3(n)
    )


def dim_eisenstein(n: int, weight: int) -> int:
    assert weight >= 2 and weight % 2 == 0
    if weight == 2:
        return num_cusps(n) - 1
    return num_cusps(n)


# Weierstrass equations:
#   11a1: y^2 + y = x^3 - x^2 - 10x - 20
#   14a1: y^2 + xy + y = x^3 + 4x - 6
CURVE_11A = (0, -1, 1, -10, -20)
CURVE_14A = (1, 0, 1, 4, -6)


def curve_ap(curve: tuple[int, int, int, int, int], l: int) -> int:
    """a_l = l + 1 - #E(F_l) by direct point counting at a good prime l."""
    a1, a2, a3, a4, a6 = curve
    count = 1  # the point at infinity
    for x in range(l):
        rhs = (x * x * x + a2 * x * x + a4 * x + a6) % l
        for y in range(l):
            if (y * y + a1 * x * y + a3 * y) % l == rhs:
                count += 1
    return l + 1 - count


def curve11_ap(l: int) -> int:
    return curve_ap(CURVE_11A, l)


def primes_upto(n: int) -> list[int]:
    return [p for p in range(2, n + 1) if is_prime(p)]
