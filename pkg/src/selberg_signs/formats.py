"""On-disk formats: TOML family descriptions, CSV tables, binary caches.

Spec files are TOML with a `family` key selecting the coefficient family
(zeta | dirichlet_char | delta | sato_tate | custom) plus optional analytic
overrides; see the README for the documented key set.  Coefficient tables
round-trip through a compact little-endian cache: magic "SLBC", format
version u32, x_max u64, then x_max doubles A(1..x_max).
"""

import struct
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .coefficients import (
    CoefficientTable,
    LFunctionSpec,
    custom_spec,
    delta_spec,
    dirichlet_char_spec,
    random_sato_tate_spec,
    zeta_spec,
)

CACHE_MAGIC = b"SLBC"
CACHE_VERSION = 1

_COMMON_KEYS = {"name", "family", "degree", "theta", "kappa", "epsilon",
                "gamma_shifts", "prime_bound"}
_FAMILY_KEYS = {
    "zeta": set(),
    "dirichlet_char": {"modulus"},
    "delta": set(),
    "sato_tate": {"seed"},
    "custom": {"local_factors"},
}


class SpecFileError(ValueError):
    """Malformed or unsupported family description."""


def load_spec(path) -> LFunctionSpec:
    """Parse a TOML family description into an LFunctionSpec."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise SpecFileError(f"{path}: not valid TOML: {exc}") from exc
    return spec_from_mapping(data, source=str(path))


def spec_from_mapping(data: dict, source: str = "<mapping>") -> LFunctionSpec:
    family = data.get("family")
    if family not in _FAMILY_KEYS:
        raise SpecFileError(
            f"{source}: family must be one of {sorted(_FAMILY_KEYS)}, got {family!r}"
        )
    allowed = _COMMON_KEYS | _FAMILY_KEYS[family]
    unknown = set(data) - allowed
    if unknown:
        raise SpecFileError(f"{source}: unknown keys {sorted(unknown)} for family {family}")

    overrides = {}
    for key in ("theta", "kappa", "epsilon"):
        if key in data:
            overrides[key] = float(data[key])
    if "gamma_shifts" in data:
        overrides["gamma_shifts"] = tuple(_as_complex(z, source) for z in data["gamma_shifts"])
    if "prime_bound" in data:
        overrides["prime_bound"] = float(data["prime_bound"])
    name = data.get("name")

    try:
        if family == "zeta":
            _reject_degree_mismatch(data, 1, source)
            return zeta_spec(name=name or "zeta", **overrides)
        if family == "dirichlet_char":
            if "modulus" not in data:
                raise SpecFileError(f"{source}: dirichlet_char requires a modulus")
            _reject_degree_mismatch(data, 1, source)
            return dirichlet_char_spec(int(data["modulus"]), name=name, **overrides)
        if family == "delta":
            _reject_degree_mismatch(data, 2, source)
            return delta_spec(name=name or "delta", **overrides)
        if family == "sato_tate":
            if "seed" not in data:
                raise SpecFileError(f"{source}: sato_tate requires a seed")
            _reject_degree_mismatch(data, 2, source)
            return random_sato_tate_spec(int(data["seed"]), name=name, **overrides)
        # custom
        if "degree" not in data:
            raise SpecFileError(f"{source}: custom family requires a degree")
        factors = data.get("local_factors")
        if not isinstance(factors, dict) or not factors:
            raise SpecFileError(f"{source}: custom family requires a [local_factors] table")
        parsed = {}
        for key, poly in factors.items():
            try:
                p = int(key)
            except ValueError:
                raise SpecFileError(f"{source}: local_factors key {key!r} is not a prime")
            parsed[p] = [float(c) for c in poly]
        return custom_spec(
            name=name or "custom", degree=int(data["degree"]), local_factors=parsed, **overrides
        )
    except SpecFileError:
        raise
    except (TypeError, ValueError) as exc:
        raise SpecFileError(f"{source}: {exc}") from exc


def _reject_degree_mismatch(data: dict, expected: int, source: str) -> None:
    if "degree" in data and int(data["degree"]) != expected:
        raise SpecFileError(
            f"{source}: family {data['family']} has fixed degree {expected}, got {data['degree']}"
        )


def _as_complex(z, source: str) -> complex:
    if isinstance(z, (int, float)):
        return complex(z)
    if isinstance(z, (list, tuple)) and len(z) == 2:
        return complex(float(z[0]), float(z[1]))
    raise SpecFileError(f"{source}: gamma shift {z!r} must be a number or [re, im] pair")


def write_table_csv(table: CoefficientTable, fh) -> None:
    """CSV with header m,A and one row per coefficient."""
    fh.write("m,A\n")
    for m in range(1, table.x_max + 1):
        fh.write(f"{m},{table.values[m]:.17g}\n")


def save_table_cache(table: CoefficientTable, path) -> None:
    """Write the binary cache: magic, version u32, x_max u64, doubles LE."""
    payload = struct.pack("<4sIQ", CACHE_MAGIC, CACHE_VERSION, table.x_max)
    payload += table.values[1:].astype("<f8").tobytes()
    with open(path, "wb") as fh:
        fh.write(payload)


def load_table_cache(path, spec_name: str = "cached") -> CoefficientTable:
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16:
            raise ValueError(f"{path}: truncated cache header")
        magic, version, x_max = struct.unpack("<4sIQ", header)
        if magic != CACHE_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if version != CACHE_VERSION:
            raise ValueError(f"{path}: unsupported cache version {version}")
        raw = fh.read(8 * x_max)
        if len(raw) != 8 * x_max:
            raise ValueError(f"{path}: truncated cache body")
    values = np.zeros(x_max + 1)
    values[1:] = np.frombuffer(raw, dtype="<f8")
    return CoefficientTable(spec_name, int(x_max), values)
