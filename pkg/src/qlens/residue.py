"""Modular arithmetic over Z/r: units, inverses, divisor counts, gcd sets."""
from __future__ import annotations

import math
from functools import lru_cache


class PreconditionError(ValueError):
    """Raised when an input violates the documented preconditions."""


def mod_inverse(a: int, r: int) -> int:
    if r < 1:
        raise PreconditionError("modulus must be positive")
    if math.gcd(a, r) != 1:
        raise PreconditionError(f"{a} is not a unit mod r={r}")
    return pow(a, -1, r) if r > 1 else 0


@lru_cache(maxsize=None)
def units(r: int) -> tuple[int, ...]:
    return tuple(u for u in range(1, r) if math.gcd(u, r) == 1) if r > 1 else (0,)


def is_unit(a: int, r: int) -> bool:
    return math.gcd(a, r) == 1


def tau(n: int) -> int:
    """Number of positive divisors of n."""
    if n < 1:
        raise PreconditionError("tau needs n >= 1")
    count = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            count += 1 if d * d == n else 2
        d += 1
    return count


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def admissible_gcd_set(r: int) -> set[int]:
    """The values gcd(x - y, r) can take for units x, y."""
    if r < 2:
        raise PreconditionError("need r >= 2")
    return {d for d in divisors(r) if r % 2 or d % 2 == 0}


def witness_unit_pair(r: int, d: int) -> tuple[int, int]:
    """Smallest (x, y) in lex order with x, y units and gcd(x - y, r) = d.

    Exists by a CRT argument whenever d is admissible; the scan below is
    exhaustive so it doubles as a check.
    """
    if d not in admissible_gcd_set(r):
        raise PreconditionError(f"gcd value {d} not realizable by units mod {r}")
    U = units(r)
    for x in U:
        for y in U:
            if math.gcd(x - y, r) == d:
                return x, y
    raise AssertionError("unreachable: admissible d without witness")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % p for p in range(2, math.isqrt(n) + 1))


def reduce_weights(r: int, weights) -> tuple[int, ...]:
    """Reduce integer weights mod r and check each is a unit."""
    if r < 2:
        raise PreconditionError("need r >= 2")
    out = tuple(int(w) % r for w in weights)
    for w, orig in zip(out, weights):
        if math.gcd(w, r) != 1:
            raise PreconditionError(f"weight {orig} is not a unit mod r={r}")
    return out
