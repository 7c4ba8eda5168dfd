"""Exact multiplicative identities: congruence removal, coprimality by
Mobius inclusion-exclusion, and the standard arithmetic helper tables.

The congruence-removal identity rewrites a divisibility-restricted Dirichlet
series as an explicit local factor times the full series; both sides are
summed independently here, each with a certified truncation tail so the
comparison is a genuine two-route check.  Tail budgets use the measured
envelope |A(m)| <= C * m^0.51 from the table itself, integrable for
Re(s) > 1.51.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from ._sieve_utils import primes_from_spf, smallest_prime_factors
from .coefficients import CoefficientTable, LFunctionSpec, envelope_constant
from .dirichlet_poly import DirichletPolynomial

__all__ = [
    "ArithmeticCache",
    "moebius",
    "omega",
    "radical",
    "SeriesValue",
    "congruence_restricted_series",
    "congruence_identity_rhs",
    "CongruenceCheck",
    "verify_congruence_identity",
    "congruence_suite",
    "coprime_double_polynomial",
    "multiplicative_split_check",
]

_ENVELOPE_POWER = 0.51


@dataclass(frozen=True)
class ArithmeticCache:
    """Sieved tables up to `limit`: smallest prime factor, mu, omega, radical."""

    limit: int
    spf: np.ndarray
    moebius: np.ndarray
    omega: np.ndarray
    radical: np.ndarray

    @classmethod
    def build(cls, limit: int) -> "ArithmeticCache":
        if limit < 1:
            raise ValueError(f"limit must be >= 1, got {limit}")
        spf = smallest_prime_factors(limit)
        mu = np.ones(limit + 1, dtype=np.int8)
        om = np.zeros(limit + 1, dtype=np.int8)
        rad = np.ones(limit + 1, dtype=np.int64)
        mu[0] = 0
        rad[0] = 0
        for p in primes_from_spf(spf).tolist():
            mu[p::p] *= -1
            om[p::p] += 1
            rad[p::p] *= p
            p2 = p * p
            if p2 <= limit:
                mu[p2::p2] = 0
        return cls(limit=limit, spf=spf, moebius=mu, omega=om, radical=rad)

    def _check(self, n: int) -> None:
        if not 1 <= n <= self.limit:
            raise IndexError(f"n = {n} outside cache range [1, {self.limit}]")


def moebius(cache: ArithmeticCache, n: int) -> int:
    cache._check(n)
    return int(cache.moebius[n])


def omega(cache: ArithmeticCache, n: int) -> int:
    cache._check(n)
    return int(cache.omega[n])


def radical(cache: ArithmeticCache, n: int) -> int:
    cache._check(n)
    return int(cache.radical[n])


def _prime_factors(d: int) -> list:
    out = []
    n = d
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _is_squarefree(d: int) -> bool:
    n = d
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        while n % p == 0:
            n //= p
        p += 1
    return True


class SeriesValue(NamedTuple):
    value: complex
    tail_bound: float


def _tail_budget(constant: float, n_trunc: int, sigma: float, d: int = 1) -> float:
    # sum_{m > N, d | m} C m^(0.51 - sigma) <= C d^-1 N^(1.51 - sigma) / (sigma - 1.51)
    if sigma <= _ENVELOPE_POWER + 1.0:
        return math.inf
    return constant / d * n_trunc ** (1.0 + _ENVELOPE_POWER - sigma) / (sigma - 1.0 - _ENVELOPE_POWER)


def congruence_restricted_series(
    spec: LFunctionSpec,
    table: CoefficientTable,
    d: int,
    s: complex,
    n_trunc: Optional[int] = None,
) -> SeriesValue:
    """sum_{m <= n_trunc, d | m} A(m) m^{-s}, with a certified tail bound.

    d must be squarefree (the identity this feeds is stated for squarefree
    moduli only).
    """
    s = complex(s)
    if d < 1 or not _is_squarefree(d):
        raise ValueError(f"d = {d} must be a squarefree positive integer")
    if s.real <= 1:
        raise ValueError(f"need Re(s) > 1, got {s.real}")
    if n_trunc is None:
        n_trunc = table.x_max
    if not d <= n_trunc <= table.x_max:
        raise ValueError(f"need d <= n_trunc <= x_max, got d={d}, n_trunc={n_trunc}")
    m = np.arange(d, n_trunc + 1, d, dtype=np.float64)
    value = complex(np.sum(table.values[d:n_trunc + 1:d] * np.exp(-s * np.log(m))))
    tail = _tail_budget(envelope_constant(table, _ENVELOPE_POWER), n_trunc, s.real, d)
    return SeriesValue(value, tail)


def local_removal_factor(spec: LFunctionSpec, d: int, s: complex) -> complex:
    """d^{-s} prod_{p | d} p^s (1 - P_p(p^{-s})), the congruence-removal factor."""
    s = complex(s)
    factor = d ** (-s)
    for p in _prime_factors(d):
        x = p ** (-s)
        poly = spec.provider(p).poly
        p_val = 0.0 + 0.0j
        for c in reversed(poly):
            p_val = p_val * x + c
        factor *= p ** s * (1.0 - p_val)
    return factor


def congruence_identity_rhs(
    spec: LFunctionSpec,
    table: CoefficientTable,
    d: int,
    s: complex,
    n_trunc: Optional[int] = None,
) -> SeriesValue:
    """Removal factor times the truncated full series, with its tail bound."""
    s = complex(s)
    if d < 1 or not _is_squarefree(d):
        raise ValueError(f"d = {d} must be a squarefree positive integer")
    if s.real <= 1:
        raise ValueError(f"need Re(s) > 1, got {s.real}")
    if n_trunc is None:
        n_trunc = table.x_max
    if not 1 <= n_trunc <= table.x_max:
        raise ValueError(f"n_trunc = {n_trunc} outside [1, {table.x_max}]")
    factor = local_removal_factor(spec, d, s)
    m = np.arange(1, n_trunc + 1, dtype=np.float64)
    full = complex(np.sum(table.values[1:n_trunc + 1] * np.exp(-s * np.log(m))))
    tail = abs(factor) * _tail_budget(envelope_constant(table, _ENVELOPE_POWER), n_trunc, s.real)
    return SeriesValue(factor * full, tail)


@dataclass(frozen=True)
class CongruenceCheck:
    d: int
    s: complex
    n_trunc: int
    lhs: complex
    rhs: complex
    difference: float
    budget: float
    passed: bool


def verify_congruence_identity(
    spec: LFunctionSpec,
    table: CoefficientTable,
    d: int,
    s: complex = 2.0,
    n_trunc: Optional[int] = None,
) -> CongruenceCheck:
    """Two-route check of the congruence-removal identity at one squarefree d."""
    lhs = congruence_restricted_series(spec, table, d, s, n_trunc)
    rhs = congruence_identity_rhs(spec, table, d, s, n_trunc)
    diff = abs(lhs.value - rhs.value)
    budget = lhs.tail_bound + rhs.tail_bound
    return CongruenceCheck(
        d=d,
        s=complex(s),
        n_trunc=n_trunc if n_trunc is not None else table.x_max,
        lhs=lhs.value,
        rhs=rhs.value,
        difference=diff,
        budget=budget,
        passed=diff <= budget,
    )


def congruence_suite(
    spec: LFunctionSpec,
    table: CoefficientTable,
    d_max: int = 30,
    s: complex = 2.0,
    n_trunc: Optional[int] = None,
) -> list:
    """verify_congruence_identity over every squarefree d <= d_max."""
    return [
        verify_congruence_identity(spec, table, d, s, n_trunc)
        for d in range(1, d_max + 1)
        if _is_squarefree(d)
    ]


def coprime_double_polynomial(table: CoefficientTable, M: int, X: int) -> DirichletPolynomial:
    """Coefficients of sum_{m ~ M, k in range, (m,k)=1} A(m) A(k) (mk)^{-s},
    collapsed over products n = mk.

    Coprimality is detected by Mobius inclusion-exclusion over common divisors
    d; since m <= 2M, the expansion must run through d <= 2M (stopping at M
    would leave the m = d terms with d in (M, 2M] uncancelled).  Index
    bookkeeping is exact integer arithmetic; coefficients are floats.
    """
    if M < 1 or X < 1:
        raise ValueError(f"need X, M >= 1, got X = {X}, M = {M}")
    if 2 * M > table.x_max:
        raise ValueError(f"m-block end {2 * M} beyond x_max = {table.x_max}")
    k_lo = max(1, -(-X // (3 * M)))
    k_hi = (3 * X) // M
    if k_hi > table.x_max:
        raise ValueError(f"k-range end {k_hi} beyond x_max = {table.x_max}")
    if k_hi < k_lo:
        raise ValueError(f"empty k-range [{k_lo}, {k_hi}]")

    n_lo = (M + 1) * k_lo
    n_hi = 2 * M * k_hi
    coeffs = np.zeros(n_hi - n_lo + 1)
    cache = ArithmeticCache.build(2 * M)
    values = table.values
    for d in range(1, 2 * M + 1):
        mu_d = int(cache.moebius[d])
        if mu_d == 0:
            continue
        m_start = (M // d + 1) * d
        for m in range(m_start, 2 * M + 1, d):
            a_m = values[m]
            if a_m == 0.0:
                continue
            ks = np.arange(-(-k_lo // d) * d, k_hi + 1, d, dtype=np.int64)
            if len(ks) == 0:
                continue
            np.add.at(coeffs, m * ks - n_lo, mu_d * a_m * values[ks])
    return DirichletPolynomial(n_lo, n_hi, coeffs)


def multiplicative_split_check(table: CoefficientTable, m: int, k: int) -> Optional[bool]:
    """Whether A(mk) matches A(m)A(k) for a coprime pair; None when gcd > 1."""
    if m < 1 or k < 1 or m * k > table.x_max:
        raise ValueError(f"need 1 <= m, k with mk <= {table.x_max}")
    if math.gcd(m, k) != 1:
        return None
    product = float(table.values[m]) * float(table.values[k])
    return abs(float(table.values[m * k]) - product) <= 1e-9 * (1.0 + abs(product))
