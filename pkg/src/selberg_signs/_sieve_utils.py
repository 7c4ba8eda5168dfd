"""Shared prime-sieve plumbing: smallest prime factors, prime lists, primality."""

import math

import numpy as np

# Deterministic Miller-Rabin witnesses for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def smallest_prime_factors(limit: int) -> np.ndarray:
    """spf[n] = smallest prime factor of n for 2 <= n <= limit; spf[0]=spf[1]=0."""
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            block = spf[p * p::p]
            block[block == 0] = p
    rest = np.arange(limit + 1, dtype=np.int64)
    untouched = (spf == 0) & (rest >= 2)
    spf[untouched] = rest[untouched]
    return spf


def primes_from_spf(spf: np.ndarray) -> np.ndarray:
    n = np.arange(len(spf), dtype=np.int64)
    return n[(spf == n) & (n >= 2)]


def primes_up_to(limit: int) -> np.ndarray:
    return primes_from_spf(smallest_prime_factors(limit))


def is_prime(n: int) -> bool:
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
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True
