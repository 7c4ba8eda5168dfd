"""Exact q-expansion of the weight-12 discriminant cusp form.

tau(n) is read off from Delta(q) = q * prod_{n>=1} (1-q^n)^24 = q * J(q)^8,
where J = prod (1-q^n)^3 is expanded through Jacobi's identity into the
sparse series sum_{j>=0} (-1)^j (2j+1) q^{j(j+1)/2} with O(sqrt(N)) terms.

J^2 is assembled sparsely in int64 (its coefficients stay far below 2^63 at
the supported sizes).  The two remaining squarings are carried out exactly on
arbitrary-precision integers via Kronecker substitution: each polynomial is
split into its positive and negative parts, packed into one big integer with
a fixed limb width, and multiplied with gmpy2.  The limb width is padded past
a Cauchy-Schwarz bound on the product coefficients, so no limb ever carries.
"""

import math

import gmpy2
import numpy as np

MAX_TERMS = 10 ** 6  # desk scale; memory and runtime budgets are sized for this

_cache: list = []


def tau_qexpansion(n_terms: int) -> list:
    """Return [tau(1), ..., tau(n_terms)] as exact Python integers."""
    if not 1 <= n_terms <= MAX_TERMS:
        raise ValueError(f"n_terms must be in [1, {MAX_TERMS}], got {n_terms}")
    if n_terms > len(_cache):
        _cache[:] = _compute_tau(n_terms)
    return _cache[:n_terms]


def _compute_tau(n_terms: int) -> list:
    exps, coefs = _eta3_sparse(n_terms)
    j2 = _sparse_square(exps, coefs, n_terms)
    j4 = _square_exact([int(c) for c in j2], n_terms)
    j8 = _square_exact(j4, n_terms)
    return j8  # tau(n) = coefficient of q^(n-1) in J^8


def _eta3_sparse(n_terms: int):
    """Exponents/coefficients of prod (1-q^n)^3 below q^n_terms."""
    j_max = int((math.isqrt(8 * n_terms + 1) - 1) // 2) + 1
    j = np.arange(j_max + 1, dtype=np.int64)
    exps = j * (j + 1) // 2
    keep = exps < n_terms
    coefs = np.where(j % 2 == 0, 2 * j + 1, -(2 * j + 1))
    return exps[keep], coefs[keep]


def _sparse_square(exps: np.ndarray, coefs: np.ndarray, n_terms: int) -> np.ndarray:
    out = np.zeros(n_terms, dtype=np.int64)
    for e, c in zip(exps.tolist(), coefs.tolist()):
        room = n_terms - e
        if room <= 0:
            break
        m = int(np.searchsorted(exps, room))
        np.add.at(out, e + exps[:m], c * coefs[:m])
    return out


def _square_exact(coeffs: list, n_terms: int) -> list:
    """Exact square of an integer polynomial, truncated to n_terms coefficients."""
    pos = [c if c > 0 else 0 for c in coeffs]
    neg = [-c if c < 0 else 0 for c in coeffs]
    # Any coefficient of the split products is bounded by sum c_i^2 (Cauchy-Schwarz).
    norm_sq = sum(c * c for c in coeffs)
    limb_bytes = (max(norm_sq.bit_length(), 1) + 2 + 7) // 8 + 1
    packed_pos = _pack(pos, limb_bytes)
    packed_neg = _pack(neg, limb_bytes)
    pp = _unpack(packed_pos * packed_pos, n_terms, limb_bytes)
    nn = _unpack(packed_neg * packed_neg, n_terms, limb_bytes)
    pn = _unpack(packed_pos * packed_neg, n_terms, limb_bytes)
    return [pp[k] + nn[k] - 2 * pn[k] for k in range(n_terms)]


def _pack(coeffs: list, limb_bytes: int) -> "gmpy2.mpz":
    buf = bytearray(len(coeffs) * limb_bytes)
    for i, c in enumerate(coeffs):
        if c:
            buf[i * limb_bytes:(i + 1) * limb_bytes] = c.to_bytes(limb_bytes, "little")
    return gmpy2.mpz(int.from_bytes(bytes(buf), "little"))


def _unpack(value: "gmpy2.mpz", n_limbs: int, limb_bytes: int) -> list:
    value = int(value)
    length = max((value.bit_length() + 7) // 8, n_limbs * limb_bytes) + limb_bytes
    raw = value.to_bytes(length, "little")
    return [
        int.from_bytes(raw[i * limb_bytes:(i + 1) * limb_bytes], "little")
        for i in range(n_limbs)
    ]
