"""Real Dirichlet coefficients generated from Euler local factors.

A coefficient family is described by an LFunctionSpec: analytic parameters
(degree, theta, kappa, epsilon) plus a provider mapping each prime p to the
inverse local polynomial P_p, so that the local factor is 1/P_p(p^{-s}).
Tables of A(1..X) are assembled multiplicatively with a smallest-prime-factor
sieve: exact prime-power coefficients come from power-series inversion of
P_p, composites from A(m) = A(p^k) * A(m / p^k).

Built-in families: zeta, real Dirichlet characters, the normalized
discriminant-form family (tau(m)/m^{11/2}, with the exact integer expansion
as oracle), and a synthetic degree-2 family with semicircle-distributed
prime coefficients.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._sieve_utils import is_prime, primes_from_spf, smallest_prime_factors
from .ramanujan import MAX_TERMS, tau_qexpansion

logger = logging.getLogger(__name__)

__all__ = [
    "EulerLocalFactor",
    "LFunctionSpec",
    "CoefficientTable",
    "local_coefficients",
    "sieve",
    "coefficient",
    "truncate",
    "zeta_spec",
    "dirichlet_char_spec",
    "delta_spec",
    "random_sato_tate_spec",
    "custom_spec",
    "real_character",
    "magnitude_report",
    "envelope_constant",
    "prime_bound_violations",
]


@dataclass(frozen=True)
class EulerLocalFactor:
    """Prime p with inverse local polynomial P(x) = sum poly[j] x^j, poly[0] = 1."""

    p: int
    poly: tuple

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if len(self.poly) == 0:
            raise ValueError("local polynomial needs at least the constant term")
        for c in self.poly:
            if isinstance(c, complex):
                raise ValueError("local polynomial coefficients must be real")
        if float(self.poly[0]) != 1.0:
            raise ValueError(f"local polynomial must have constant term 1, got {self.poly[0]}")
        object.__setattr__(self, "poly", tuple(float(c) for c in self.poly))

    @property
    def degree(self) -> int:
        return len(self.poly) - 1


@dataclass(frozen=True)
class LFunctionSpec:
    """Named coefficient family: analytic parameters plus a local-factor provider.

    theta defaults to the convexity value degree/4 when left unset.  The
    provider must yield an EulerLocalFactor for every prime requested; the
    optional prepare hook lets it batch-precompute before a sieve run.
    """

    name: str
    degree: int
    provider: Callable[[int], EulerLocalFactor]
    theta: Optional[float] = None
    kappa: float = 1.0
    epsilon: float = 1e-3
    gamma_shifts: Optional[tuple] = None
    prepare: Optional[Callable[[int], None]] = None
    prime_bound: Optional[float] = None

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError(f"degree must be >= 1, got {self.degree}")
        if self.theta is None:
            object.__setattr__(self, "theta", self.degree / 4)
        if self.theta < 0:
            raise ValueError(f"theta must be >= 0, got {self.theta}")
        if not 0 < self.kappa <= 1:
            raise ValueError(f"kappa must lie in (0, 1], got {self.kappa}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.gamma_shifts is not None:
            shifts = tuple(complex(z) for z in self.gamma_shifts)
            if len(shifts) != self.degree:
                raise ValueError(
                    f"{len(shifts)} gamma shifts for degree {self.degree}"
                )
            object.__setattr__(self, "gamma_shifts", shifts)


@dataclass(frozen=True)
class CoefficientTable:
    """Immutable array of real coefficients, values[m] = A(m) for 1 <= m <= x_max."""

    spec_name: str
    x_max: int
    values: np.ndarray

    def __post_init__(self):
        if self.x_max < 1:
            raise ValueError(f"x_max must be >= 1, got {self.x_max}")
        if self.values.shape != (self.x_max + 1,):
            raise ValueError(
                f"values must have shape ({self.x_max + 1},), got {self.values.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("coefficient values must be finite")
        self.values.setflags(write=False)


def local_coefficients(factor: EulerLocalFactor, k_max: int) -> np.ndarray:
    """Coefficients A(p^0..p^k_max) of the power series 1/P(x).

    Inverts the polynomial formally: a_0 = 1 and
    a_k = -sum_{j=1..min(deg,k)} c_j a_{k-j}.
    """
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")
    c = factor.poly
    if c[0] != 1.0:
        raise ValueError("local polynomial must have constant term 1")
    a = np.empty(k_max + 1)
    a[0] = 1.0
    for k in range(1, k_max + 1):
        a[k] = -sum(c[j] * a[k - j] for j in range(1, min(len(c) - 1, k) + 1))
    return a


def sieve(spec: LFunctionSpec, x_max: int, eps_check: float = 0.05) -> CoefficientTable:
    """Multiplicatively sieve A(1..x_max) from the spec's local factors.

    Uses a smallest-prime-factor table so every composite is assembled with a
    single multiplication; cost is O(x_max log log x_max) plus one series
    inversion per prime.  The coefficient-size check |A(m)| <= m^(1/2+eps_check)
    is soft: violations are logged, never raised.
    """
    if x_max < 1:
        raise ValueError(f"x_max must be >= 1, got {x_max}")
    if spec.prepare is not None:
        spec.prepare(x_max)

    spf = smallest_prime_factors(x_max)
    local = {}
    for p in primes_from_spf(spf).tolist():
        factor = spec.provider(p)
        if factor.p != p:
            raise ValueError(f"provider returned factor for {factor.p}, wanted {p}")
        if factor.degree > spec.degree:
            raise ValueError(
                f"local factor at p={p} has degree {factor.degree} > spec degree {spec.degree}"
            )
        k_max = 0
        pk = 1
        while pk * p <= x_max:
            pk *= p
            k_max += 1
        local[p] = local_coefficients(factor, k_max).tolist()

    spf_list = spf.tolist()
    vals = [0.0] * (x_max + 1)
    exps = [0] * (x_max + 1)
    cofs = [0] * (x_max + 1)
    if x_max >= 1:
        vals[1] = 1.0
    for m in range(2, x_max + 1):
        p = spf_list[m]
        q = m // p
        if q % p == 0:
            e = exps[q] + 1
            cof = cofs[q]
        else:
            e = 1
            cof = q
        exps[m] = e
        cofs[m] = cof
        vals[m] = vals[cof] * local[p][e]

    table = CoefficientTable(spec.name, x_max, np.array(vals))
    report = magnitude_report(table, eps_check)
    if report.violations:
        logger.warning(
            "%s: %d coefficients exceed m^(1/2+%g), worst at m=%d (ratio %.3g)",
            spec.name, report.violations, eps_check, report.worst_m, report.worst_ratio,
        )
    if spec.prime_bound is not None:
        bad = prime_bound_violations(table, spec.prime_bound)
        if bad:
            logger.warning(
                "%s: |A(p)| > %g at %d primes, first %s",
                spec.name, spec.prime_bound, len(bad), bad[:5],
            )
    return table


def coefficient(table: CoefficientTable, m: int) -> float:
    """A(m) from the table; m must lie in [1, x_max]."""
    if not 1 <= m <= table.x_max:
        raise IndexError(f"m = {m} outside table range [1, {table.x_max}]")
    return float(table.values[m])


def truncate(table: CoefficientTable, x_max: int) -> CoefficientTable:
    """View of the table restricted to m <= x_max."""
    if not 1 <= x_max <= table.x_max:
        raise ValueError(f"x_max = {x_max} outside [1, {table.x_max}]")
    return CoefficientTable(table.spec_name, x_max, table.values[:x_max + 1].copy())


@dataclass(frozen=True)
class MagnitudeReport:
    eps_check: float
    violations: int
    worst_m: int
    worst_ratio: float


def magnitude_report(table: CoefficientTable, eps_check: float = 0.05) -> MagnitudeReport:
    """Soft check of |A(m)| against the envelope m^(1/2 + eps_check)."""
    m = np.arange(1, table.x_max + 1, dtype=np.float64)
    ratio = np.abs(table.values[1:]) / m ** (0.5 + eps_check)
    worst = int(np.argmax(ratio))
    return MagnitudeReport(
        eps_check=eps_check,
        violations=int(np.sum(ratio > 1.0)),
        worst_m=worst + 1,
        worst_ratio=float(ratio[worst]),
    )


def envelope_constant(table: CoefficientTable, power: float = 0.51) -> float:
    """Smallest C with |A(m)| <= C*m^power across the table (tail-budget constant)."""
    m = np.arange(1, table.x_max + 1, dtype=np.float64)
    return float(np.max(np.abs(table.values[1:]) / m ** power))


def prime_bound_violations(table: CoefficientTable, bound: float) -> list:
    """Primes p <= x_max with |A(p)| > bound (e.g. the spinor profile bound 36)."""
    spf = smallest_prime_factors(table.x_max)
    primes = primes_from_spf(spf)
    bad = primes[np.abs(table.values[primes]) > bound]
    return bad.tolist()


# ---------------------------------------------------------------------------
# Built-in families
# ---------------------------------------------------------------------------

def zeta_spec(name: str = "zeta", **overrides) -> LFunctionSpec:
    """All-ones coefficients: P_p(x) = 1 - x at every prime."""
    def provider(p: int) -> EulerLocalFactor:
        return EulerLocalFactor(p, (1.0, -1.0))

    params = dict(degree=1, kappa=1.0, epsilon=1e-3, gamma_shifts=(0,))
    params.update(overrides)
    return LFunctionSpec(name=name, provider=provider, **params)


def real_character(modulus: int) -> Callable[[int], int]:
    """The real primitive character of the given modulus, as a callable on Z.

    Supported moduli: 1 (trivial), 4, 8, and odd primes (Legendre symbol).
    """
    if modulus == 1:
        return lambda m: 1
    if modulus == 4:
        return lambda m: 0 if m % 2 == 0 else (1 if m % 4 == 1 else -1)
    if modulus == 8:
        return lambda m: 0 if m % 2 == 0 else (1 if m % 8 in (1, 7) else -1)
    if modulus % 2 == 1 and is_prime(modulus):
        def legendre(m: int) -> int:
            r = pow(m % modulus, (modulus - 1) // 2, modulus)
            return r - modulus if r > 1 else r
        return legendre
    raise ValueError(
        f"unsupported character modulus {modulus}: use 1, 4, 8, or an odd prime"
    )


def dirichlet_char_spec(modulus: int, name: Optional[str] = None, **overrides) -> LFunctionSpec:
    """Degree-1 family with A(m) = chi(m) for the real character mod `modulus`."""
    chi = real_character(modulus)

    def provider(p: int) -> EulerLocalFactor:
        return EulerLocalFactor(p, (1.0, -float(chi(p))))

    params = dict(degree=1, kappa=1.0, epsilon=1e-3)
    params.update(overrides)
    return LFunctionSpec(name=name or f"chi{modulus}", provider=provider, **params)


def delta_spec(name: str = "delta", **overrides) -> LFunctionSpec:
    """Normalized discriminant-form family: A(m) = tau(m) / m^(11/2).

    Prime coefficients come from the exact integer q-expansion; the local
    polynomial is the usual degree-2 one, 1 - A(p) x + x^2.  The provider
    caches tau and grows the cached expansion geometrically if a prime
    beyond the prepared range is requested.
    """
    cache = {"tau": []}

    def prepare(limit: int) -> None:
        if limit > len(cache["tau"]):
            cache["tau"] = tau_qexpansion(limit)

    def provider(p: int) -> EulerLocalFactor:
        if p > len(cache["tau"]):
            # grow geometrically so one-off requests stay amortized
            prepare(max(min(2 * len(cache["tau"]), MAX_TERMS), p))
        a_p = cache["tau"][p - 1] / p ** 5.5
        return EulerLocalFactor(p, (1.0, -a_p, 1.0))

    params = dict(degree=2, kappa=1.0, epsilon=1e-3, gamma_shifts=(5.5, 6.5))
    params.update(overrides)
    return LFunctionSpec(name=name, provider=provider, prepare=prepare, **params)


_SATO_TATE_SALT = 0x5354


def random_sato_tate_spec(seed: int, name: Optional[str] = None, **overrides) -> LFunctionSpec:
    """Synthetic degree-2 family with A(p) = 2 cos(theta_p), theta_p semicircular.

    theta_p is drawn from the density (2/pi) sin^2(theta) on [0, pi],
    deterministically from (seed, p), so two specs with the same seed agree
    at every prime regardless of the order of provider calls.
    """
    def provider(p: int) -> EulerLocalFactor:
        ss = np.random.SeedSequence(entropy=(_SATO_TATE_SALT, seed, p))
        u = np.random.Generator(np.random.PCG64(ss)).random()
        a_p = 2.0 * math.cos(_semicircle_angle(u))
        return EulerLocalFactor(p, (1.0, -a_p, 1.0))

    params = dict(degree=2, kappa=1.0, epsilon=1e-3)
    params.update(overrides)
    return LFunctionSpec(name=name or f"sato_tate_{seed}", provider=provider, **params)


def _semicircle_angle(u: float) -> float:
    """Inverse CDF of (2/pi) sin^2 on [0, pi]: solve (t - sin(2t)/2)/pi = u."""
    lo, hi = 0.0, math.pi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if (mid - 0.5 * math.sin(2.0 * mid)) / math.pi < u:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def custom_spec(
    name: str,
    degree: int,
    local_factors: dict,
    **overrides,
) -> LFunctionSpec:
    """Family defined by an explicit prime -> polynomial-coefficients mapping.

    Sieving beyond the largest listed prime fails: the mapping must cover
    every prime up to the requested x_max.
    """
    factors = {int(p): tuple(float(c) for c in poly) for p, poly in local_factors.items()}
    for p in factors:
        if not is_prime(p):
            raise ValueError(f"local factor key {p} is not prime")

    def provider(p: int) -> EulerLocalFactor:
        if p not in factors:
            raise ValueError(f"spec '{name}' defines no local factor for prime {p}")
        return EulerLocalFactor(p, factors[p])

    return LFunctionSpec(name=name, degree=degree, provider=provider, **overrides)
