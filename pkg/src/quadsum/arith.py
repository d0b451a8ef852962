"""Exact integer arithmetic: quadratic symbols, fourth-root-of-unity signs,
p-adic valuations, and the inverse pairing used by the theta operators.

Everything here is a pure function of its arguments.  Python integers are
arbitrary precision, so no intermediate can overflow; validation therefore
concentrates on domain errors (even denominators, n = 0, composite p).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import isqrt

from .errors import ValidationError

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; the fixed base set decides every n < 3.3e24."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
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


def primes_upto(n: int) -> list[int]:
    """All primes <= n by sieve of Eratosthenes."""
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [i for i in range(2, n + 1) if sieve[i]]


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of n >= 1 by trial division."""
    if n < 1:
        raise ValidationError(f"factorize requires n >= 1, got {n}")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def largest_prime_factor(n: int) -> int:
    """Largest prime dividing n, or 1 when n == 1."""
    fac = factorize(n)
    return max(fac) if fac else 1


def jacobi_symbol(c: int, d: int) -> int:
    """Extended quadratic symbol (c/d) for odd d.

    Legendre symbol for prime d > 0, extended multiplicatively to all odd
    d > 0, with (0/d) = 1 iff d = +-1 and, for d < 0 and c != 0,
    (c/d) = sign(c) * (c/-d).  This extension keeps (-1/d) = (-1)^((d-1)/2)
    valid for every odd d.
    """
    if d % 2 == 0 or d == 0:
        raise ValidationError(f"jacobi_symbol requires odd nonzero d, got {d}")
    if c == 0:
        return 1 if d in (1, -1) else 0
    if d < 0:
        sign = 1 if c > 0 else -1
        return sign * jacobi_symbol(c, -d)
    # binary reciprocity loop; no factorization of d needed
    a = c % d
    n = d
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def epsilon(d: int) -> complex:
    """The fourth root of unity sqrt((-1/d)): 1 for d = 1 mod 4, i for d = 3 mod 4."""
    if d % 2 == 0:
        raise ValidationError(f"epsilon requires odd d, got {d}")
    return (1 + 0j) if d % 4 == 1 else 1j


_I_POWERS = (1 + 0j, 1j, -1 + 0j, -1j)


def epsilon_power(d: int, k: int) -> complex:
    """epsilon(d)**k evaluated exactly (a power of i, never rounded)."""
    if d % 2 == 0:
        raise ValidationError(f"epsilon_power requires odd d, got {d}")
    if d % 4 == 1:
        return 1 + 0j
    return _I_POWERS[k % 4]


@dataclass(frozen=True)
class PAdicSplit:
    """n = p**ord * unit with gcd(unit, p) = 1."""

    p: int
    n: int
    ord: int
    unit: int


def p_adic_split(n: int, p: int) -> PAdicSplit:
    """Split n >= 1 as p**ord * unit.  n = 0 is rejected: ord_p(0) is undefined."""
    if n < 1:
        raise ValidationError(f"p_adic_split requires n >= 1, got {n}")
    if not is_prime(p):
        raise ValidationError(f"p_adic_split requires prime p, got {p}")
    ord_ = 0
    unit = n
    while unit % p == 0:
        unit //= p
        ord_ += 1
    return PAdicSplit(p=p, n=n, ord=ord_, unit=unit)


@lru_cache(maxsize=None)
def j_prime_k(j: int, p: int) -> tuple[int, int]:
    """The involution partner j' in [1, p-1] with 4*j*j' + 1 = 0 mod p,
    together with the integer k_j = (4*j*j' + 1) / p.
    """
    if not is_prime(p) or p == 2:
        raise ValidationError(f"j_prime_k requires odd prime p, got {p}")
    if not 1 <= j <= p - 1:
        raise ValidationError(f"j must lie in [1, {p - 1}], got {j}")
    jp = (-pow(4 * j, -1, p)) % p
    k = (4 * j * jp + 1) // p
    assert (4 * j * jp + 1) % p == 0
    return jp, k
