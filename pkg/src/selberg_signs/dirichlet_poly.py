"""Dirichlet polynomials on vertical lines: evaluation, second moments,
partial-sum subconvexity profiles, and truncated-contour window sums.

Critical-line grids are evaluated with an anchored phase recurrence: within a
block of consecutive grid points the phase factors n^{-it} advance by one
elementwise multiplication per step (a cumulative product in blocks), and
each block restarts from an exactly computed anchor so rounding drift stays
below ~1e-12.  Quadrature is composite Simpson with the step tied to the
fastest phase log(n_hi): the default puts at least 8 nodes on every
oscillation period, and coarser steps are rejected.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .coefficients import CoefficientTable
from .statistics import iter_window_pairs

__all__ = [
    "DirichletPolynomial",
    "VerticalLineProfile",
    "SubconvexityReport",
    "PerronReport",
    "KernelCheckReport",
    "evaluate",
    "evaluate_line",
    "build_M",
    "build_K",
    "second_moment",
    "second_moment_with_error",
    "mvt_ratio",
    "k_subconvexity_profile",
    "perron_window",
    "perron_kernel",
    "kernel_bound_check",
]

# Phase-recurrence blocks are bounded in rows (drift control) and in total
# elements (~64 MB of complex128 working set).
_BLOCK_ROWS = 2048
_BLOCK_ELEMENTS = 1 << 22


@dataclass(frozen=True)
class DirichletPolynomial:
    """Finite sum a_n n^{-s} supported on the integer interval [n_lo, n_hi]."""

    n_lo: int
    n_hi: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.n_lo < 1 or self.n_hi < self.n_lo:
            raise ValueError(f"bad support [{self.n_lo}, {self.n_hi}]")
        if self.coeffs.shape != (self.n_hi - self.n_lo + 1,):
            raise ValueError(
                f"coeffs must have length {self.n_hi - self.n_lo + 1}, got {self.coeffs.shape}"
            )
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("coefficients must be finite")
        self.coeffs.setflags(write=False)

    def support_values(self):
        n = np.arange(self.n_lo, self.n_hi + 1, dtype=np.int64)
        nz = np.nonzero(self.coeffs)[0]
        return n[nz], self.coeffs[nz]


@dataclass(frozen=True)
class VerticalLineProfile:
    sigma: float
    t_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.t_grid.shape != self.values.shape:
            raise ValueError("t_grid and values must have equal length")


def evaluate(poly: DirichletPolynomial, s: complex) -> complex:
    """Direct summation of a_n n^{-s}."""
    n, a = poly.support_values()
    if len(n) == 0:
        return 0.0 + 0.0j
    return complex(np.sum(a * np.exp(-s * np.log(n.astype(np.float64)))))


def _line_values(log_n: np.ndarray, weights: np.ndarray, t0: float, dt: float, count: int) -> np.ndarray:
    """sum_n w_n e^{-i t log n} for t = t0 + j*dt, j = 0..count-1."""
    out = np.empty(count, dtype=np.complex128)
    if len(log_n) == 0:
        out[:] = 0.0
        return out
    rot = np.exp(-1j * dt * log_n)
    block_rows = max(1, min(_BLOCK_ROWS, _BLOCK_ELEMENTS // len(log_n)))
    for start in range(0, count, block_rows):
        rows = min(block_rows, count - start)
        anchor = weights * np.exp(-1j * (t0 + start * dt) * log_n)
        block = np.empty((rows, len(log_n)), dtype=np.complex128)
        block[0] = anchor
        if rows > 1:
            block[1:] = rot
            np.cumprod(block, axis=0, out=block)
        out[start:start + rows] = block.sum(axis=1)
    return out


def evaluate_line(poly: DirichletPolynomial, sigma: float, t_grid: np.ndarray) -> VerticalLineProfile:
    """Values of the polynomial at sigma + i*t over the grid.

    Uniform grids take the fast recurrence path; arbitrary grids fall back
    to direct summation per point.
    """
    t_grid = np.asarray(t_grid, dtype=np.float64)
    n, a = poly.support_values()
    if len(n) == 0 or len(t_grid) == 0:
        return VerticalLineProfile(sigma, t_grid, np.zeros(len(t_grid), dtype=np.complex128))
    log_n = np.log(n.astype(np.float64))
    weights = a * n.astype(np.float64) ** (-sigma)
    if len(t_grid) >= 2:
        steps = np.diff(t_grid)
        if np.allclose(steps, steps[0], rtol=1e-12, atol=1e-12):
            values = _line_values(log_n, weights, float(t_grid[0]), float(steps[0]), len(t_grid))
            return VerticalLineProfile(sigma, t_grid, values)
    values = np.array([np.sum(weights * np.exp(-1j * t * log_n)) for t in t_grid])
    return VerticalLineProfile(sigma, t_grid, values)


def build_M(table: CoefficientTable, M: int) -> DirichletPolynomial:
    """Dyadic-block polynomial with support (M, 2M] and coefficients from the table."""
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    if 2 * M > table.x_max:
        raise ValueError(f"support (M, 2M] = ({M}, {2 * M}] beyond x_max = {table.x_max}")
    return DirichletPolynomial(M + 1, 2 * M, table.values[M + 1:2 * M + 1].copy())


def build_K(table: CoefficientTable, X: int, M: int) -> DirichletPolynomial:
    """Cofactor-range polynomial with support [ceil(X/3M), floor(3X/M)]."""
    if M < 1 or X < 1:
        raise ValueError(f"need X, M >= 1, got X = {X}, M = {M}")
    n_lo = max(1, -(-X // (3 * M)))
    n_hi = (3 * X) // M
    if n_hi < n_lo:
        raise ValueError(f"empty support [{n_lo}, {n_hi}]")
    if n_hi > table.x_max:
        raise ValueError(f"support end {n_hi} beyond x_max = {table.x_max}")
    return DirichletPolynomial(n_lo, n_hi, table.values[n_lo:n_hi + 1].copy())


def _max_step(n_hi: int) -> float:
    if n_hi < 2:
        return math.inf
    return math.pi / (4.0 * math.log(n_hi))


def _default_step(n_hi: int, T: float) -> float:
    if n_hi < 2:
        return max(T / 16.0, 1e-3)
    return math.pi / (8.0 * math.log(n_hi))


def _simpson(y: np.ndarray, h: float) -> float:
    # len(y) is odd by construction
    return h / 3.0 * float(y[0] + y[-1] + 4.0 * np.sum(y[1:-1:2]) + 2.0 * np.sum(y[2:-1:2]))


def second_moment(poly: DirichletPolynomial, T: float, step: Optional[float] = None) -> float:
    """Composite-Simpson value of the critical-line second moment over [-T, T].

    Real coefficients make the integrand even, so the quadrature runs on
    [0, T] and doubles.  Steps coarser than pi/(4 log n_hi) are rejected:
    they cannot resolve the fastest oscillation.
    """
    if T < 0:
        raise ValueError(f"T must be >= 0, got {T}")
    if T == 0:
        return 0.0
    limit = _max_step(poly.n_hi)
    if step is None:
        step = _default_step(poly.n_hi, T)
    elif step > limit:
        raise ValueError(
            f"step {step:g} too coarse for support up to {poly.n_hi}: need step <= {limit:g}"
        )
    intervals = max(2, int(math.ceil(T / step)))
    if intervals % 2:
        intervals += 1
    dt = T / intervals
    n, a = poly.support_values()
    if len(n) == 0:
        return 0.0
    log_n = np.log(n.astype(np.float64))
    weights = a * n.astype(np.float64) ** (-0.5)
    values = _line_values(log_n, weights, 0.0, dt, intervals + 1)
    return 2.0 * _simpson(np.abs(values) ** 2, dt)


def second_moment_with_error(
    poly: DirichletPolynomial, T: float, step: Optional[float] = None
) -> tuple:
    """(refined value, step-halving error estimate)."""
    if step is None:
        step = _default_step(poly.n_hi, T)
    coarse = second_moment(poly, T, step)
    fine = second_moment(poly, T, step / 2.0)
    return fine, abs(fine - coarse)


def mvt_ratio(poly: DirichletPolynomial, T: float, step: Optional[float] = None) -> float:
    """Second moment divided by the mean-value envelope (n_hi + T) * sum a_n^2 / n."""
    n, a = poly.support_values()
    if len(n) == 0:
        raise ValueError("zero polynomial: mean-value envelope vanishes")
    envelope = (poly.n_hi + T) * float(np.sum(a ** 2 / n))
    if envelope == 0.0:
        raise ValueError("zero denominator in mean-value ratio")
    return second_moment(poly, T, step) / envelope


@dataclass(frozen=True)
class SubconvexityReport:
    X: int
    M: int
    T: float
    theta: float
    eps: float
    sup: float
    sup_t: float
    envelope: float
    ratio: float


def k_subconvexity_profile(
    table: CoefficientTable,
    X: int,
    M: int,
    T: float,
    theta: float,
    eps: float = 1e-3,
    step: Optional[float] = None,
    refine: bool = True,
) -> SubconvexityReport:
    """sup |K(1/2 + it)| for |t| <= T against the envelope T^(theta+eps) + (X/MT)^(1/2+eps).

    The sup is taken over a grid fine enough for the oscillation scale, then
    sharpened by golden-section search around the best grid point.  Only the
    ratio sup/envelope is meaningful, and only across an X-sweep: the bound's
    constant is not explicit.
    """
    if T < 2:
        raise ValueError(f"T must be >= 2, got {T}")
    poly = build_K(table, X, M)
    limit = _max_step(poly.n_hi)
    if step is None:
        step = limit
    elif step > limit:
        raise ValueError(
            f"grid step {step:g} below the oscillation scale: need step <= {limit:g}"
        )
    intervals = max(1, int(math.ceil(T / step)))
    dt = T / intervals
    n, a = poly.support_values()
    sup = 0.0
    sup_t = 0.0
    if len(n):
        log_n = np.log(n.astype(np.float64))
        weights = a * n.astype(np.float64) ** (-0.5)
        values = np.abs(_line_values(log_n, weights, 0.0, dt, intervals + 1))
        best = int(np.argmax(values))
        sup = float(values[best])
        sup_t = best * dt
        if refine:
            lo = max(0.0, sup_t - dt)
            hi = min(T, sup_t + dt)
            sup_t, sup = _golden_max(
                lambda t: abs(evaluate(poly, 0.5 + 1j * t)), lo, hi, seed=(sup_t, sup)
            )
    envelope = T ** (theta + eps) + (X / (M * T)) ** (0.5 + eps)
    return SubconvexityReport(
        X=X, M=M, T=T, theta=theta, eps=eps,
        sup=sup, sup_t=sup_t, envelope=envelope, ratio=sup / envelope,
    )


def _golden_max(f, lo: float, hi: float, seed=None, iters: int = 40) -> tuple:
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    t_best, f_best = (c, fc) if fc > fd else (d, fd)
    if seed is not None and seed[1] > f_best:
        return seed
    return t_best, f_best


@dataclass(frozen=True)
class PerronReport:
    x: int
    H: int
    M: int
    T_cut: float
    contour_value: float
    direct_value: float
    abs_error: float


def perron_window(
    table: CoefficientTable, x: int, H: int, M: int, T_cut: float, step: Optional[float] = None
) -> PerronReport:
    """Truncated-contour window sum against direct enumeration.

    The integrand is D(c + it) ((x + H + 1/2)^s - (x - 1/2)^s) / s on the line
    c = 1 + 1/log x, where D collapses the coprime double sum over products
    mk.  The half-integer endpoints make the contour limit exactly the
    inclusive window sum (integer cutoffs would leave half-weight endpoint
    terms that no truncation can repair).
    """
    from .identities import coprime_double_polynomial

    if H < 1:
        raise ValueError(f"H must be >= 1, got {H}")
    if x + H > table.x_max:
        raise ValueError(f"window end {x + H} beyond x_max = {table.x_max}")
    if T_cut < x / H:
        raise ValueError(
            f"T_cut = {T_cut:g} below x/H = {x / H:g}: truncation error dominates"
        )
    poly = coprime_double_polynomial(table, M, x)
    c = 1.0 + 1.0 / math.log(x)
    lo, hi = x - 0.5, x + H + 0.5

    n, a = poly.support_values()
    if step is None:
        step = _default_step(max(poly.n_hi, 2), T_cut)
    intervals = max(2, int(math.ceil(T_cut / step)))
    if intervals % 2:
        intervals += 1
    dt = T_cut / intervals
    contour = 0.0
    if len(n):
        log_n = np.log(n.astype(np.float64))
        weights = a * n.astype(np.float64) ** (-c)
        d_vals = _line_values(log_n, weights, 0.0, dt, intervals + 1)
        t = np.linspace(0.0, T_cut, intervals + 1)
        s = c + 1j * t
        kernel = (np.exp(s * math.log(hi)) - np.exp(s * math.log(lo))) / s
        # integrand is conjugate-even in t: int over [-T, T] = 2 * int_0^T Re
        contour = _simpson(np.real(d_vals * kernel), dt) / math.pi

    direct = 0.0
    for m, k in iter_window_pairs(x, H, M):
        direct += float(table.values[m * k])
    return PerronReport(
        x=x, H=H, M=M, T_cut=T_cut,
        contour_value=contour, direct_value=direct,
        abs_error=abs(contour - direct),
    )


def perron_kernel(u: float, s: complex) -> complex:
    """((1+u)^s - 1)/s, with the s -> 0 limit log(1+u)."""
    if abs(s) < 1e-8:
        return complex(math.log1p(u))
    return (np.exp(s * math.log1p(u)) - 1.0) / s


@dataclass(frozen=True)
class KernelCheckReport:
    u: float
    passed: bool
    max_ratio: float
    witnesses: tuple


def kernel_bound_check(u: float, s_samples) -> KernelCheckReport:
    """Verify |((1+u)^s - 1)/s| <= 3 * max(u, 1/|Im s|) on samples with Re s in [1/2, 2]."""
    if not 0 < u <= 1:
        raise ValueError(f"u must lie in (0, 1], got {u}")
    witnesses = []
    max_ratio = 0.0
    for s in s_samples:
        s = complex(s)
        if not 0.5 <= s.real <= 2.0:
            raise ValueError(f"sample {s} off the strip Re(s) in [1/2, 2]")
        bound = 3.0 * max(u, 1.0 / abs(s.imag)) if s.imag != 0 else math.inf
        value = abs(perron_kernel(u, s))
        if math.isfinite(bound):
            max_ratio = max(max_ratio, value / bound)
            if value > bound:
                witnesses.append(s)
    return KernelCheckReport(
        u=u, passed=not witnesses, max_ratio=max_ratio, witnesses=tuple(witnesses)
    )
