"""Sign-change statistics for real Dirichlet coefficients.

Subpackages by concern: coefficient generation from Euler local factors
(`coefficients`, with the exact discriminant-form expansion in `ramanujan`),
short-interval sign detection and counting (`statistics`), the admissibility
and count-exponent calculus (`exponents`), Dirichlet polynomials on vertical
lines (`dirichlet_poly`), congruence and coprimality identities
(`identities`), on-disk formats (`formats`), and the command-line front end
(`cli`).
"""

from . import cli, coefficients, dirichlet_poly, exponents, formats, identities, ramanujan, statistics
from .coefficients import (
    CoefficientTable,
    EulerLocalFactor,
    LFunctionSpec,
    coefficient,
    delta_spec,
    dirichlet_char_spec,
    local_coefficients,
    random_sato_tate_spec,
    sieve,
    zeta_spec,
)
from .exponents import (
    ExponentInputs,
    ExponentReport,
    convexity_theta,
    delta_max,
    delta_of,
    exponent_report,
    gsp4_corollary,
    h_exponent,
    kappa_threshold,
    signchange_exponent,
)
from .ramanujan import tau_qexpansion
from .statistics import (
    SignChangeSummary,
    WindowReport,
    count_sign_changes,
    kappa_empirical,
    rankin_selberg_sum,
    sign_change_windows,
    theorem_consistency,
    window_sums,
)

__version__ = "0.1.0"

__all__ = [
    "cli", "coefficients", "dirichlet_poly", "exponents", "formats",
    "identities", "ramanujan", "statistics",
    "CoefficientTable", "EulerLocalFactor", "LFunctionSpec",
    "coefficient", "delta_spec", "dirichlet_char_spec", "local_coefficients",
    "random_sato_tate_spec", "sieve", "zeta_spec",
    "ExponentInputs", "ExponentReport", "convexity_theta", "delta_max",
    "delta_of", "exponent_report", "gsp4_corollary", "h_exponent",
    "kappa_threshold", "signchange_exponent",
    "tau_qexpansion",
    "SignChangeSummary", "WindowReport", "count_sign_changes",
    "kappa_empirical", "rankin_selberg_sum", "sign_change_windows",
    "theorem_consistency", "window_sums",
]
