"""Command-line front end.

Every command parses a family description, runs one pipeline, and emits a
JSON (or CSV) report.  JSON output is deterministic: keys sorted, floats in
fixed 17-significant-digit form, and a schema_version field on every
document.  Reports go to stdout or, with --output, through an atomic
write-rename so interrupted runs never leave truncated files.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O failure.
"""

import argparse
import dataclasses
import io
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import dirichlet_poly, identities, statistics
from .coefficients import LFunctionSpec, sieve
from .exponents import ExponentInputs, exponent_report
from .formats import SpecFileError, load_spec, save_table_cache, write_table_csv

SCHEMA_VERSION = 1

__all__ = ["RunConfig", "parse_args", "run", "main"]


@dataclass
class RunConfig:
    command: str
    spec_path: Optional[str] = None
    x: Optional[int] = None
    h: Optional[int] = None
    m: Optional[int] = None
    t: Optional[float] = None
    output: Optional[str] = None
    format: str = "json"
    # command-specific knobs
    theta: Optional[float] = None
    kappa: Optional[float] = None
    epsilon: float = 1e-3
    degree: Optional[int] = None
    n_block: Optional[int] = None
    step: Optional[float] = None
    tcut: Optional[float] = None
    s_value: float = 2.0
    d_max: int = 30
    trunc: Optional[int] = None
    eps_check: float = 1e-3
    tol: Optional[float] = None
    sweep: bool = False
    positions: bool = False
    use_spec_kappa: bool = False
    cache_out: Optional[str] = None
    verify_target: Optional[str] = None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="selberg-signs",
        description="Coefficient sieving, sign-change detection, and exponent reports",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_spec(p):
        p.add_argument("--spec", required=True, metavar="FILE", help="TOML family description")

    def add_common(p):
        p.add_argument("--output", metavar="PATH", help="write the report here (atomic)")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("sieve", help="generate a coefficient table")
    add_spec(p)
    p.add_argument("--x", type=int, required=True, help="table size x_max")
    p.add_argument("--cache-out", metavar="PATH", help="also write the binary cache")
    add_common(p)

    p = sub.add_parser("signs", help="count sign changes up to x")
    add_spec(p)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--positions", action="store_true", help="include change positions")
    add_common(p)

    p = sub.add_parser("window", help="short-interval detector (single window or sweep)")
    add_spec(p)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--H", type=int, required=True, dest="h")
    p.add_argument("--M", type=int, required=True, dest="m")
    p.add_argument("--sweep", action="store_true", help="slide x over [x, 2x] with stride H")
    p.add_argument("--tol", type=float, help="absolute detection tolerance")
    add_common(p)

    p = sub.add_parser("exponents", help="admissibility and count-exponent report")
    p.add_argument("--theta", type=float)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--degree", type=int, help="use the convexity default theta = degree/4")
    add_common(p)

    p = sub.add_parser("moment", help="critical-line second moment of a dyadic block")
    add_spec(p)
    p.add_argument("--N", type=int, required=True, dest="n_block", help="dyadic block (N, 2N]")
    p.add_argument("--T", type=float, required=True, dest="t")
    p.add_argument("--step", type=float, help="quadrature step (default resolves oscillation)")
    add_common(p)

    p = sub.add_parser("profile", help="sup of |K(1/2+it)| against the subconvex envelope")
    add_spec(p)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--M", type=int, required=True, dest="m")
    p.add_argument("--T", type=float, required=True, dest="t")
    p.add_argument("--theta", type=float, help="override the spec's theta")
    p.add_argument("--eps", type=float, default=1e-3, dest="eps_check")
    add_common(p)

    p = sub.add_parser("perron", help="truncated-contour window sum vs direct enumeration")
    add_spec(p)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--H", type=int, required=True, dest="h")
    p.add_argument("--M", type=int, required=True, dest="m")
    p.add_argument("--tcut", type=float, required=True)
    add_common(p)

    p = sub.add_parser("verify", help="identity suites")
    vsub = p.add_subparsers(dest="verify_target", required=True)
    v = vsub.add_parser("identities", help="congruence-removal identity over squarefree d")
    add_spec(v)
    v.add_argument("--dmax", type=int, default=30, dest="d_max")
    v.add_argument("--s", type=float, default=2.0, dest="s_value")
    v.add_argument("--trunc", type=int, default=10 ** 6)
    add_common(v)

    p = sub.add_parser("theorem-check", help="observed sign changes vs predicted exponent")
    add_spec(p)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--H", type=int, dest="h", help="window length (default round(x^0.3))")
    p.add_argument("--M", type=int, dest="m", help="dyadic block (default round(x^0.05))")
    p.add_argument("--use-spec-kappa", action="store_true",
                   help="use the spec's kappa instead of the measured one")
    add_common(p)

    return parser


def parse_args(argv) -> RunConfig:
    """Validated RunConfig, or SystemExit(2) on usage errors."""
    parser = _build_parser()
    ns = parser.parse_args(argv)
    fields = {f.name for f in dataclasses.fields(RunConfig)}
    data = {k: v for k, v in vars(ns).items() if k in fields}
    data["spec_path"] = getattr(ns, "spec", None)
    cfg = RunConfig(**data)

    if cfg.x is not None and cfg.x < 1:
        parser.error(f"--x must be >= 1, got {cfg.x}")
    if cfg.h is not None and cfg.x is not None and cfg.h >= cfg.x:
        parser.error(f"need H < x, got H = {cfg.h}, x = {cfg.x}")
    if cfg.command == "exponents" and cfg.theta is None and cfg.degree is None:
        parser.error("exponents needs --theta or --degree")
    if cfg.format == "csv" and cfg.command not in ("sieve", "profile", "window"):
        parser.error(f"--format csv is not supported for {cfg.command}")
    if cfg.command == "window" and cfg.format == "csv" and not cfg.sweep:
        parser.error("--format csv for window requires --sweep")
    return cfg


# ---------------------------------------------------------------------------
# Deterministic JSON
# ---------------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return format(x, ".17g")


def stable_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, complex):
        return stable_json([obj.real, obj.imag], indent)
    if isinstance(obj, str):
        import json
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{pad}  {stable_json(str(k))}: {stable_json(v, indent + 1)}'
            for k, v in sorted(obj.items())
        ]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = [f"{pad}  {stable_json(v, indent + 1)}" for v in seq]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if dataclasses.is_dataclass(obj):
        return stable_json(dataclasses.asdict(obj), indent)
    raise TypeError(f"cannot serialize {type(obj)}")


def _document(kind: str, body) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "kind": kind}
    if dataclasses.is_dataclass(body):
        body = dataclasses.asdict(body)
    doc.update(body)
    return doc


def _emit(cfg: RunConfig, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if cfg.output is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(cfg.output))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".selberg-signs-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp_path, cfg.output)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _load(cfg: RunConfig) -> LFunctionSpec:
    return load_spec(cfg.spec_path)


def _cmd_sieve(cfg: RunConfig) -> int:
    table = sieve(_load(cfg), cfg.x)
    if cfg.cache_out:
        save_table_cache(table, cfg.cache_out)
    if cfg.format == "csv":
        buf = io.StringIO()
        write_table_csv(table, buf)
        _emit(cfg, buf.getvalue())
    else:
        _emit(cfg, stable_json(_document("coefficient_table", {
            "spec_name": table.spec_name,
            "x_max": table.x_max,
            "values": [float(v) for v in table.values[1:]],
        })))
    return 0


def _cmd_signs(cfg: RunConfig) -> int:
    table = sieve(_load(cfg), cfg.x)
    summary = statistics.count_sign_changes(table, cfg.x, include_positions=cfg.positions)
    body = {"x_max": summary.x_max, "count": summary.change_count,
            "zero_policy": summary.zero_policy}
    if cfg.positions:
        body["positions"] = list(summary.change_positions)
    _emit(cfg, stable_json(_document("sign_change_summary", body)))
    return 0


def _cmd_window(cfg: RunConfig) -> int:
    spec = _load(cfg)
    if cfg.sweep:
        table = sieve(spec, 2 * cfg.x + cfg.h)
        result = statistics.sign_change_windows(
            table, cfg.x, cfg.h, cfg.m, tol=cfg.tol, include_reports=True
        )
        if cfg.format == "csv":
            lines = ["x,H,M,S1,S2,detected"]
            for r in result.reports:
                lines.append(f"{r.x},{r.H},{r.M},{r.S1:.17g},{r.S2:.17g},{int(r.detected)}")
            _emit(cfg, "\n".join(lines))
        else:
            body = dataclasses.asdict(result)
            body["reports"] = [dataclasses.asdict(r) for r in result.reports]
            _emit(cfg, stable_json(_document("window_sweep", body)))
    else:
        table = sieve(spec, cfg.x + cfg.h)
        report = statistics.window_sums(table, cfg.x, cfg.h, cfg.m, tol=cfg.tol)
        _emit(cfg, stable_json(_document("window_report", report)))
    return 0


def _cmd_exponents(cfg: RunConfig) -> int:
    inputs = ExponentInputs(
        kappa=cfg.kappa, epsilon=cfg.epsilon, theta=cfg.theta, degree_d=cfg.degree
    )
    report = exponent_report(inputs)
    rows = [
        ("theta", f"{report.theta:.6g}"),
        ("kappa", f"{report.kappa:.6g}"),
        ("epsilon", f"{report.epsilon:.6g}"),
        ("branch", report.branch),
        ("admissible", str(report.admissible)),
        ("kappa threshold", f"{report.kappa_threshold:.9f}"),
        ("delta", f"{report.delta:.9f}"),
        ("delta max", "n/a" if report.delta_max is None else f"{report.delta_max:.9f}"),
        ("window exponent", f"{report.h_exponent:.9f}"),
        ("count exponent", f"{report.signchange_exponent:.9f}"),
    ]
    width = max(len(k) for k, _ in rows)
    for key, val in rows:
        print(f"{key:<{width}}  {val}", file=sys.stderr)
    _emit(cfg, stable_json(_document("exponent_report", report)))
    return 0


def _cmd_moment(cfg: RunConfig) -> int:
    spec = _load(cfg)
    table = sieve(spec, 2 * cfg.n_block)
    poly = dirichlet_poly.build_M(table, cfg.n_block)
    value, err = dirichlet_poly.second_moment_with_error(poly, cfg.t, step=cfg.step)
    ratio = dirichlet_poly.mvt_ratio(poly, cfg.t, step=cfg.step)
    _emit(cfg, stable_json(_document("second_moment", {
        "spec_name": spec.name,
        "N": cfg.n_block,
        "T": cfg.t,
        "value": value,
        "error_estimate": err,
        "mvt_ratio": ratio,
    })))
    return 0


def _cmd_profile(cfg: RunConfig) -> int:
    spec = _load(cfg)
    theta = cfg.theta if cfg.theta is not None else spec.theta
    table = sieve(spec, (3 * cfg.x) // cfg.m)
    report = dirichlet_poly.k_subconvexity_profile(
        table, cfg.x, cfg.m, cfg.t, theta, eps=cfg.eps_check
    )
    if cfg.format == "csv":
        poly = dirichlet_poly.build_K(table, cfg.x, cfg.m)
        step = math.pi / (4.0 * math.log(poly.n_hi)) if poly.n_hi >= 2 else cfg.t / 16
        grid = np.arange(0.0, cfg.t + step, step)
        prof = dirichlet_poly.evaluate_line(poly, 0.5, grid)
        lines = ["t,absK"]
        for tval, val in zip(prof.t_grid, np.abs(prof.values)):
            lines.append(f"{tval:.17g},{val:.17g}")
        _emit(cfg, "\n".join(lines))
    else:
        _emit(cfg, stable_json(_document("subconvexity_profile", report)))
    return 0


def _cmd_perron(cfg: RunConfig) -> int:
    spec = _load(cfg)
    x_need = max(cfg.x + cfg.h, (3 * cfg.x) // cfg.m)
    table = sieve(spec, x_need)
    report = dirichlet_poly.perron_window(table, cfg.x, cfg.h, cfg.m, cfg.tcut)
    _emit(cfg, stable_json(_document("perron_window", report)))
    return 0


def _cmd_verify(cfg: RunConfig) -> int:
    spec = _load(cfg)
    table = sieve(spec, cfg.trunc)
    checks = identities.congruence_suite(
        spec, table, d_max=cfg.d_max, s=cfg.s_value, n_trunc=cfg.trunc
    )
    body = {
        "spec_name": spec.name,
        "s": complex(cfg.s_value),
        "n_trunc": cfg.trunc,
        "all_passed": all(c.passed for c in checks),
        "checks": [dataclasses.asdict(c) for c in checks],
    }
    _emit(cfg, stable_json(_document("congruence_suite", body)))
    return 0 if body["all_passed"] else 1


def _cmd_theorem_check(cfg: RunConfig) -> int:
    spec = _load(cfg)
    H = cfg.h if cfg.h is not None else max(1, round(cfg.x ** 0.3))
    M = cfg.m if cfg.m is not None else max(1, round(cfg.x ** 0.05))
    table = sieve(spec, 2 * cfg.x + H)
    kappa = None
    if not cfg.use_spec_kappa:
        kappa = statistics.kappa_empirical(table, cfg.x)
    report = statistics.theorem_consistency(table, spec, cfg.x, H, M, kappa=kappa)
    _emit(cfg, stable_json(_document("theorem_consistency", report)))
    return 0 if report.verdict in ("pass", "vacuous") else 1


_DISPATCH = {
    "sieve": _cmd_sieve,
    "signs": _cmd_signs,
    "window": _cmd_window,
    "exponents": _cmd_exponents,
    "moment": _cmd_moment,
    "profile": _cmd_profile,
    "perron": _cmd_perron,
    "verify": _cmd_verify,
    "theorem-check": _cmd_theorem_check,
}


def run(cfg: RunConfig) -> int:
    """Execute one command; returns the process exit code."""
    try:
        return _DISPATCH[cfg.command](cfg)
    except (SpecFileError, ValueError, IndexError) as exc:
        print(f"selberg-signs: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"selberg-signs: i/o error: {exc}", file=sys.stderr)
        return 3


def main(argv=None) -> int:
    return run(parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
