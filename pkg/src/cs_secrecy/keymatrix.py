"""Shared-secret keys and the measurement matrices they derive.

A key is nothing more than (seed, M, N): the Gaussian matrix derived from it
is the actual key material, so derivation is bit-reproducible and matrices
survive serialization exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError, ValidationError
from .prng import GaussianStream

KEY_FORMAT_VERSION = 1
ORTHONORMAL_TOL = 1e-10
_MASK64 = 0xFFFFFFFFFFFFFFFF


def _readonly(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float, order="C")
    if arr.ndim != ndim:
        raise DimensionError(f"expected a {ndim}-dimensional array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("entries must be finite (no NaN or infinity)")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class SecretKey:
    """Shared secret: a 64-bit seed plus the matrix dimensions it derives."""

    seed: int
    m: int
    n: int
    version: int = KEY_FORMAT_VERSION

    def __post_init__(self):
        if not isinstance(self.seed, int) or not 0 <= self.seed <= _MASK64:
            raise ValidationError("seed must be an unsigned 64-bit integer")
        if self.m < 1 or self.n < 1:
            raise DimensionError(f"dimensions must be positive, got m={self.m}, n={self.n}")
        if self.m > self.n:
            raise DimensionError(f"m={self.m} exceeds n={self.n}; compressive operation needs m <= n")
        if self.version != KEY_FORMAT_VERSION:
            raise ValidationError(f"unsupported key format version {self.version}")


@dataclass(frozen=True, eq=False)
class MeasurementMatrix:
    """Dense M x N real matrix; `derived_from` records the key when applicable."""

    entries: np.ndarray
    derived_from: SecretKey | None = None

    def __post_init__(self):
        object.__setattr__(self, "entries", _readonly(self.entries, 2))

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    @property
    def provenance(self) -> str:
        return "explicit" if self.derived_from is None else "derived"


@dataclass(frozen=True, eq=False)
class Dictionary:
    """Orthonormal N x N basis; plaintexts are `entries @ coefficients`."""

    entries: np.ndarray
    kind: str = "explicit"

    def __post_init__(self):
        ent = _readonly(self.entries, 2)
        if ent.shape[0] != ent.shape[1]:
            raise DimensionError(f"dictionary must be square, got shape {ent.shape}")
        if self.kind not in ("identity", "explicit"):
            raise ValidationError(f"unknown dictionary kind {self.kind!r}")
        gram_dev = float(np.abs(ent.T @ ent - np.eye(ent.shape[0])).max())
        if gram_dev > ORTHONORMAL_TOL:
            raise ValidationError(f"dictionary columns are not orthonormal (max Gram deviation {gram_dev:.3e})")
        object.__setattr__(self, "entries", ent)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def identity(cls, n: int) -> "Dictionary":
        if n < 1:
            raise DimensionError("dimension must be positive")
        return cls(np.eye(n), kind="identity")


def derive_matrix(key: SecretKey) -> MeasurementMatrix:
    """Derive the Gaussian measurement matrix for `key`.

    Entries are i.i.d. Normal(0, 1/M): standard deviates from the seeded
    Box-Muller stream, filled row-major and divided by sqrt(M) (a single
    IEEE rounding per entry).  The same key always reproduces the same bits.
    """
    draws = GaussianStream(key.seed).draw(key.m * key.n)
    entries = (draws / math.sqrt(key.m)).reshape(key.m, key.n)
    return MeasurementMatrix(entries, derived_from=key)


def compose(phi: MeasurementMatrix, psi: Dictionary) -> MeasurementMatrix:
    """Combined operator A = Phi Psi acting directly on coefficient vectors."""
    if phi.n != psi.n:
        raise DimensionError(f"cannot compose {phi.m}x{phi.n} matrix with {psi.n}-dimensional dictionary")
    if psi.kind == "identity":
        return MeasurementMatrix(phi.entries)
    return MeasurementMatrix(phi.entries @ psi.entries)


def suggest_m(n: int, k: int, c: float) -> int:
    """Measurement count ceil(c k ln(n/k)), clamped into [2k, n]."""
    if k < 1 or k >= n:
        raise DomainError(f"sparsity must satisfy 1 <= k < n, got k={k}, n={n}")
    if c <= 0:
        raise DomainError(f"constant c must be positive, got {c}")
    m = math.ceil(c * k * math.log(n / k))
    return min(max(m, 2 * k), n)


def _require_int(raw: dict, field: str) -> int:
    value = raw.get(field)
    if not isinstance(value, int) or isinstance(value, bool):
        raise ValidationError(f"key file field '{field}' must be an integer")
    return value


def key_to_json(key: SecretKey) -> str:
    # seed travels as a decimal string: JSON numbers lose 64-bit precision
    return json.dumps({"version": key.version, "seed": str(key.seed), "m": key.m, "n": key.n})


def key_from_json(text: str) -> SecretKey:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"key file is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValidationError("key file must contain a JSON object")
    version = _require_int(raw, "version")
    seed_text = raw.get("seed")
    if not isinstance(seed_text, str) or not seed_text.isdigit():
        raise ValidationError("key file field 'seed' must be a decimal string")
    return SecretKey(seed=int(seed_text), m=_require_int(raw, "m"), n=_require_int(raw, "n"), version=version)


def save_key(key: SecretKey, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(key_to_json(key) + "\n")


def load_key(path) -> SecretKey:
    with open(path, "r", encoding="utf-8") as fh:
        return key_from_json(fh.read())


def matrix_to_csv(matrix: MeasurementMatrix) -> str:
    """CSV export, one matrix row per line, shortest round-trip decimals."""
    return "\n".join(",".join(repr(float(v)) for v in row) for row in matrix.entries) + "\n"


def matrix_from_csv(text: str) -> MeasurementMatrix:
    rows = []
    for lineno, line in enumerate(text.strip().splitlines(), start=1):
        try:
            rows.append([float(cell) for cell in line.split(",")])
        except ValueError as exc:
            raise ValidationError(f"matrix CSV line {lineno} has an unparseable entry") from exc
    if not rows:
        raise ValidationError("matrix CSV is empty")
    if any(len(row) != len(rows[0]) for row in rows):
        raise ValidationError("matrix CSV rows have inconsistent lengths")
    return MeasurementMatrix(np.array(rows))


def orthonormal_dictionary(seed: int, n: int) -> Dictionary:
    """Random orthonormal basis: QR of a seeded square Gaussian matrix.

    Column signs are fixed by the sign of the R diagonal so the result is a
    deterministic function of the seed alone.
    """
    if n < 1:
        raise DimensionError("dimension must be positive")
    g = GaussianStream(seed).draw(n * n).reshape(n, n)
    q, r = np.linalg.qr(g)
    signs = np.sign(np.diagonal(r)).copy()
    signs[signs == 0] = 1.0
    return Dictionary(q * signs, kind="explicit")
