"""Encryption (y = Phi x) and decryption via sparse recovery."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .errors import DimensionError, DomainError, RecoveryError, ValidationError
from .keymatrix import Dictionary, MeasurementMatrix, SecretKey, _readonly, compose, derive_matrix


@dataclass(frozen=True, eq=False)
class SparseMessage:
    """Length-N coefficient vector, optionally carrying a sparsity bound."""

    entries: np.ndarray
    declared_k: int | None = None

    def __post_init__(self):
        ent = _readonly(self.entries, 1)
        object.__setattr__(self, "entries", ent)
        if self.declared_k is not None:
            if self.declared_k < 0:
                raise ValidationError("declared_k must be non-negative")
            nnz = int(np.count_nonzero(ent))
            if nnz > self.declared_k:
                raise ValidationError(f"message has {nnz} nonzeros, above declared_k={self.declared_k}")

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def l0(self) -> int:
        """Exact count of nonzero entries."""
        return int(np.count_nonzero(self.entries))


@dataclass(frozen=True, eq=False)
class Ciphertext:
    """Length-M measurement vector."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _readonly(self.entries, 1))

    @property
    def m(self) -> int:
        return self.entries.shape[0]


def encrypt(a: MeasurementMatrix, alpha: SparseMessage) -> Ciphertext:
    """Encrypt coefficients: y = A alpha.

    Each ciphertext entry is accumulated left to right in double precision so
    both endpoints of the channel agree on the result bit for bit.
    """
    if a.n != alpha.n:
        raise DimensionError(f"matrix is {a.m}x{a.n} but message has dimension {alpha.n}")
    x = alpha.entries.tolist()
    y = np.empty(a.m)
    for i in range(a.m):
        acc = 0.0
        for aij, xj in zip(a.entries[i].tolist(), x):
            acc += aij * xj
        y[i] = acc
    return Ciphertext(y)


def decrypt(
    key: SecretKey,
    y: Ciphertext,
    k: int,
    psi: Dictionary | None = None,
    solver: str = "auto",
) -> SparseMessage:
    """Decrypt a ciphertext with the shared key.

    Re-derives the measurement matrix from the key, runs the chosen sparse
    recovery solver on y, and maps the recovered coefficients back through
    the dictionary (identity when `psi` is omitted).  `solver` is one of
    "omp", "bp", "l0", or "auto" (OMP with an exhaustive-search fallback for
    n <= 24).

    Raises RecoveryError when no solver reaches the feasibility tolerance;
    the error carries the final residual norm.
    """
    from .recovery import bp, l0_exhaustive, omp  # deferred: codec <-> recovery cycle

    if y.m != key.m:
        raise DimensionError(f"ciphertext has length {y.m} but the key expects m={key.m}")
    if psi is None:
        psi = Dictionary.identity(key.n)
    if psi.n != key.n:
        raise DimensionError(f"dictionary dimension {psi.n} does not match key n={key.n}")
    if k < 1:
        raise DomainError("sparsity k must be at least 1")
    if 2 * k > key.m:
        warnings.warn(f"k={k} exceeds m/2={key.m / 2:g}; unique recovery is not guaranteed", stacklevel=2)
    if solver not in ("auto", "omp", "bp", "l0"):
        raise DomainError(f"unknown solver {solver!r}")

    a = compose(derive_matrix(key), psi)
    if solver == "l0":
        result = l0_exhaustive(a, y, k)
    elif solver == "bp":
        result = bp(a, y)
    elif solver == "omp":
        result = omp(a, y, k)
    else:
        result = omp(a, y, k)
        if result.status == "failed" and key.n <= 24:
            result = l0_exhaustive(a, y, k)

    if result.status == "failed":
        raise RecoveryError(
            f"recovery failed: residual {result.residual_l2:.6e} above tolerance",
            residual_l2=result.residual_l2,
        )
    if psi.kind == "identity":
        plain = result.coefficients
    else:
        plain = psi.entries @ result.coefficients
    return SparseMessage(plain)


def sparse_sign_messages(n: int, k: int) -> list[SparseMessage]:
    """All exactly-k-sparse vectors with +-1 entries, in lexicographic order.

    Supports are enumerated lexicographically and sign patterns with +1
    before -1 per position, giving a deterministic message census.
    """
    if not 0 <= k <= n:
        raise DomainError(f"sparsity must satisfy 0 <= k <= n, got k={k}, n={n}")
    out = []
    for support in combinations(range(n), k):
        for signs in product((1.0, -1.0), repeat=k):
            v = np.zeros(n)
            for idx, s in zip(support, signs):
                v[idx] = s
            out.append(SparseMessage(v, declared_k=k))
    return out


def vector_to_json(vec: SparseMessage | Ciphertext) -> str:
    entries = [float(v) for v in vec.entries]
    return json.dumps({"n": len(entries), "entries": entries})


def _entries_from_json(text: str) -> np.ndarray:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"vector file is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValidationError("vector file must contain a JSON object")
    n = raw.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise ValidationError("vector file field 'n' must be a non-negative integer")
    entries = raw.get("entries")
    if not isinstance(entries, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in entries):
        raise ValidationError("vector file field 'entries' must be a list of numbers")
    if len(entries) != n:
        raise ValidationError(f"vector file field 'entries' has {len(entries)} values but n={n}")
    return np.array(entries, dtype=float)


def message_from_json(text: str) -> SparseMessage:
    return SparseMessage(_entries_from_json(text))


def cipher_from_json(text: str) -> Ciphertext:
    return Ciphertext(_entries_from_json(text))


def save_vector(vec: SparseMessage | Ciphertext, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(vector_to_json(vec) + "\n")


def load_message(path) -> SparseMessage:
    with open(path, "r", encoding="utf-8") as fh:
        return message_from_json(fh.read())


def load_cipher(path) -> Ciphertext:
    with open(path, "r", encoding="utf-8") as fh:
        return cipher_from_json(fh.read())
