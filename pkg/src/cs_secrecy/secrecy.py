"""Exact secrecy accounting over finite ensembles.

Two tracks are kept deliberately separate.  The idealized key models
(`ideal_t1_joint`, `ideal_t2_joint`) realize the limit arguments exactly:
permutation keys that fix the zero message, and sharply transitive cyclic
shifts.  The measured track (`cs_ensemble_joint`) quantizes real ciphertexts
produced by a finite set of seeded Gaussian matrices and makes no perfect
secrecy claim of its own; comparing the two is the point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .codec import SparseMessage, encrypt
from .errors import BudgetError, DimensionError, DomainError, ValidationError
from .keymatrix import Dictionary, MeasurementMatrix, SecretKey, _readonly, compose, derive_matrix
from .ripcheck import RipReport, rip_constant

JOINT_SUM_TOL = 1e-9
CELL_BUDGET = 1_000_000
_BAND_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class DiscreteJoint:
    """Finite joint probability table over (message index, cryptogram index)."""

    probs: np.ndarray
    model: str = "custom"

    def __post_init__(self):
        probs = _readonly(self.probs, 2)
        if np.any(probs < 0.0):
            raise ValidationError("joint probabilities must be non-negative")
        total = float(probs.sum())
        if abs(total - 1.0) > JOINT_SUM_TOL:
            raise ValidationError(f"joint probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "probs", probs)

    @property
    def t_x(self) -> int:
        return self.probs.shape[0]

    @property
    def t_y(self) -> int:
        return self.probs.shape[1]

    def to_csv(self) -> str:
        return "\n".join(",".join(repr(float(v)) for v in row) for row in self.probs) + "\n"


@dataclass(frozen=True)
class MiReport:
    mi_bits: float
    h_x_bits: float
    h_y_bits: float
    h_y_given_x_bits: float
    model: str

    def to_dict(self) -> dict:
        return {
            "mi_bits": self.mi_bits,
            "h_x_bits": self.h_x_bits,
            "h_y_bits": self.h_y_bits,
            "h_y_given_x_bits": self.h_y_given_x_bits,
            "model": self.model,
        }


@dataclass(frozen=True, eq=False)
class KeyEnsemble:
    """Finite key family with selection probabilities (uniform by default).

    `keys` holds SecretKey instances for measured ensembles; the idealized
    models only ever look at the probabilities, so opaque labels work too.
    """

    keys: tuple
    probs: np.ndarray | None = None

    def __post_init__(self):
        keys = tuple(self.keys)
        if not keys:
            raise ValidationError("key ensemble must not be empty")
        if self.probs is None:
            probs = np.full(len(keys), 1.0 / len(keys))
        else:
            probs = np.array(self.probs, dtype=float)
        if probs.shape != (len(keys),):
            raise DimensionError(f"{len(keys)} keys but {probs.shape} probabilities")
        if np.any(probs < 0.0):
            raise ValidationError("key probabilities must be non-negative")
        if abs(float(probs.sum()) - 1.0) > 1e-12:
            raise ValidationError(f"key probabilities sum to {float(probs.sum())!r}, not 1")
        probs.flags.writeable = False
        object.__setattr__(self, "keys", keys)
        object.__setattr__(self, "probs", probs)


@dataclass(frozen=True)
class KeyEntropyReport:
    ok: bool
    h_k_bits: float
    h_w_bits: float

    def to_dict(self) -> dict:
        return {"ok": self.ok, "h_k_bits": self.h_k_bits, "h_w_bits": self.h_w_bits}


@dataclass(frozen=True)
class PruneResult:
    survivors: tuple[SparseMessage, ...]
    eliminated: tuple[SparseMessage, ...]


@dataclass(frozen=True)
class AuditReport:
    consistent: bool
    violators: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"consistent": self.consistent, "violators": list(self.violators)}


def _entropy_bits(p: np.ndarray) -> float:
    p = p[p > 0.0]
    return float(-(p * np.log2(p)).sum())


def exact_mi(joint: DiscreteJoint) -> MiReport:
    """Mutual information of a finite joint, in bits.

    Definitional double sum sum p(x,y) log2(p(x,y) / (p(x) p(y))) with the
    0 log 0 = 0 convention; marginals come from the table itself.
    """
    p = joint.probs
    if np.any(p < 0.0):
        raise ValidationError("joint probabilities must be non-negative")
    total = float(p.sum())
    if abs(total - 1.0) > JOINT_SUM_TOL:
        raise ValidationError(f"joint probabilities sum to {total!r}, not 1")

    px = p.sum(axis=1)
    py = p.sum(axis=0)
    log_py = np.zeros_like(py)
    np.log2(py, out=log_py, where=py > 0.0)

    mi = 0.0
    h_y_given_x = 0.0
    for x in range(p.shape[0]):
        row = p[x]
        mask = row > 0.0
        if not mask.any():
            continue
        vals = row[mask]
        log_vals = np.log2(vals)
        log_px = math.log2(px[x])
        mi += float((vals * (log_vals - log_px - log_py[mask])).sum())
        h_y_given_x -= float((vals * (log_vals - log_px)).sum())
    return MiReport(
        mi_bits=mi,
        h_x_bits=_entropy_bits(px),
        h_y_bits=_entropy_bits(py),
        h_y_given_x_bits=h_y_given_x,
        model=joint.model,
    )


def ideal_t1_joint(t: int, method: str = "analytic") -> DiscreteJoint:
    """Joint (X, Y) for the zero-fixing permutation-key model on t messages.

    Messages 0..t-1 are uniform; the key is a uniform random relabelling of
    the t-1 nonzero messages (zero always encrypts to zero) and Y is the
    relabelled message.  Analytically: p(0,0) = 1/t, p(x,y) = 1/(t(t-1)) for
    nonzero x, y, and 0 elsewhere.  `method="enumerate"` builds the same
    table by summing over all (t-1)! keys and is limited to t <= 7; the two
    constructions agree bit for bit.
    """
    if t < 2:
        raise DomainError(f"need at least two messages, got t={t}")
    if method == "analytic":
        probs = np.zeros((t, t))
        probs[0, 0] = 1.0 / t
        probs[1:, 1:] = 1.0 / (t * (t - 1))
    elif method == "enumerate":
        if t > 7:
            raise BudgetError(f"full key enumeration is limited to t <= 7, got t={t}")
        counts = np.zeros((t, t), dtype=np.int64)
        for perm in permutations(range(1, t)):
            counts[0, 0] += 1
            for x in range(1, t):
                counts[x, perm[x - 1]] += 1
        probs = counts / (t * math.factorial(t - 1))
    else:
        raise DomainError(f"unknown construction method {method!r}")
    return DiscreteJoint(probs, model="ideal_t1")


def t1_closed_form(t: int) -> float:
    """Mutual information of the zero-fixing permutation model, in bits."""
    if t < 2:
        raise DomainError(f"need at least two messages, got t={t}")
    return math.log2(t) - (t - 1) / t * math.log2(t - 1)


def ideal_t2_joint(t: int) -> DiscreteJoint:
    """Joint for the cyclic-shift (one-time-pad) model on t nonzero messages.

    Y = X + K mod t with K uniform over the t shifts, so every (x, y) cell
    carries probability 1/t^2 and the table factorizes exactly.
    """
    if t < 2:
        raise DomainError(f"need at least two messages, got t={t}")
    return DiscreteJoint(np.full((t, t), 1.0 / (t * t)), model="ideal_t2")


def key_entropy_check(keys: KeyEnsemble, t_messages: int) -> KeyEntropyReport:
    """Shannon key-size bound H(K) >= H(W) under uniform messages."""
    if t_messages < 1:
        raise DomainError(f"message count must be positive, got {t_messages}")
    h_k = _entropy_bits(keys.probs)
    h_w = math.log2(t_messages)
    return KeyEntropyReport(ok=h_k >= h_w - 1e-12, h_k_bits=h_k, h_w_bits=h_w)


def cs_ensemble_joint(
    keys: KeyEnsemble,
    messages: list[SparseMessage],
    psi: Dictionary | None = None,
    bin_width: float = 0.25,
    budget: int = CELL_BUDGET,
) -> DiscreteJoint:
    """Exact joint distribution of (message, quantized ciphertext).

    Every (key, message) pair is encrypted, each ciphertext coordinate is
    binned by floor(y_i / bin_width), and distinct bin tuples are indexed in
    first-seen order scanning keys outer, messages inner.  No sampling: the
    table is the exact finite joint of the ensemble.
    """
    if bin_width <= 0.0:
        raise DomainError(f"bin width must be positive, got {bin_width}")
    if not messages:
        raise DomainError("need at least one message")
    dims = {(key.m, key.n) for key in keys.keys}
    if len(dims) != 1:
        raise DimensionError(f"keys disagree on dimensions: {sorted(dims)}")
    m, n = dims.pop()
    if psi is None:
        psi = Dictionary.identity(n)
    if psi.n != n:
        raise DimensionError(f"dictionary dimension {psi.n} does not match key n={n}")
    for msg in messages:
        if msg.n != n:
            raise DimensionError(f"message dimension {msg.n} does not match key n={n}")
    seen = {tuple(msg.entries.tolist()) for msg in messages}
    if len(seen) != len(messages):
        raise ValidationError("messages must be pairwise distinct")

    t_x = len(messages)
    registry: dict[tuple[int, ...], int] = {}
    weights: dict[tuple[int, int], float] = {}
    for key_index, key in enumerate(keys.keys):
        a = compose(derive_matrix(key), psi)
        key_prob = float(keys.probs[key_index])
        for msg_index, msg in enumerate(messages):
            y = encrypt(a, msg)
            bins = tuple(int(math.floor(v / bin_width)) for v in y.entries.tolist())
            cryptogram = registry.setdefault(bins, len(registry))
            if len(registry) * t_x > budget:
                raise BudgetError(f"quantized joint would exceed {budget} cells")
            cell = (msg_index, cryptogram)
            weights[cell] = weights.get(cell, 0.0) + key_prob / t_x

    probs = np.zeros((t_x, len(registry)))
    for (msg_index, cryptogram), weight in weights.items():
        probs[msg_index, cryptogram] = weight
    return DiscreteJoint(probs, model="cs_ensemble")


def prune_candidates(y, epsilon_k: float, candidates: list[SparseMessage]) -> PruneResult:
    """Eavesdropper norm pruning against the isometry band of a ciphertext.

    A candidate whose l2 norm falls outside [||y||/(1+eps), ||y||/(1-eps)]
    cannot have produced y under any matrix with isometry constant eps, so
    its posterior is zero and it is eliminated.  Both sides of the band are
    enforced; order is preserved in both output lists.
    """
    if not 0.0 <= epsilon_k < 1.0:
        raise DomainError(f"epsilon must lie in [0, 1), got {epsilon_k}; the band degenerates at 1")
    norm_y = float(np.linalg.norm(y.entries))
    lo = norm_y / (1.0 + epsilon_k)
    hi = norm_y / (1.0 - epsilon_k)
    survivors: list[SparseMessage] = []
    eliminated: list[SparseMessage] = []
    for cand in candidates:
        norm_x = float(np.linalg.norm(cand.entries))
        (survivors if lo <= norm_x <= hi else eliminated).append(cand)
    return PruneResult(tuple(survivors), tuple(eliminated))


def rip_premise_audit(
    a: MeasurementMatrix,
    k: int,
    messages: list[SparseMessage],
    rip_report: RipReport | None = None,
) -> AuditReport:
    """Check each k-sparse message's own ciphertext against the isometry band.

    With a correctly computed constant no k-sparse message can land outside
    its own band, so a non-empty violator list certifies that the declared
    constant (or the isometry claim itself) is wrong for this matrix.  Pass
    `rip_report` to audit a declared constant; otherwise it is computed.
    """
    for i, msg in enumerate(messages):
        if msg.n != a.n:
            raise DimensionError(f"message {i} has dimension {msg.n}, matrix n={a.n}")
        if msg.l0() > k:
            raise DomainError(f"message {i} has {msg.l0()} nonzeros, more than k={k}")
    if rip_report is None:
        rip_report = rip_constant(a, k)
    eps = rip_report.epsilon_k

    violators = []
    for i, msg in enumerate(messages):
        norm_x = float(np.linalg.norm(msg.entries))
        norm_y = float(np.linalg.norm(a.entries @ msg.entries))
        slack = _BAND_SLACK * (1.0 + norm_x)
        if norm_y < (1.0 - eps) * norm_x - slack or norm_y > (1.0 + eps) * norm_x + slack:
            violators.append(i)
    return AuditReport(consistent=not violators, violators=tuple(violators))
