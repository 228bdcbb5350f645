"""Compressed-sensing encryption toolkit.

Sparse messages are encrypted by multiplication with a Gaussian measurement
matrix derived deterministically from a shared 64-bit seed, decrypted by
sparse recovery, and audited: isometry constants and spark by exact
enumeration, secrecy by exact mutual information over finite ensembles.
"""

from .codec import (
    Ciphertext,
    SparseMessage,
    cipher_from_json,
    decrypt,
    encrypt,
    load_cipher,
    load_message,
    message_from_json,
    save_vector,
    sparse_sign_messages,
    vector_to_json,
)
from .errors import (
    BudgetError,
    CsSecrecyError,
    DimensionError,
    DomainError,
    RecoveryError,
    SolverError,
    ValidationError,
)
from .keymatrix import (
    Dictionary,
    MeasurementMatrix,
    SecretKey,
    compose,
    derive_matrix,
    key_from_json,
    key_to_json,
    load_key,
    matrix_from_csv,
    matrix_to_csv,
    orthonormal_dictionary,
    save_key,
    suggest_m,
)
from .recovery import RecoveryResult, bp, l0_exhaustive, omp
from .ripcheck import (
    ProjectionReport,
    RipReport,
    SparkReport,
    rip_constant,
    spark,
    spark_exceeds,
    unique_projection_check,
)
from .secrecy import (
    AuditReport,
    DiscreteJoint,
    KeyEnsemble,
    KeyEntropyReport,
    MiReport,
    PruneResult,
    cs_ensemble_joint,
    exact_mi,
    ideal_t1_joint,
    ideal_t2_joint,
    key_entropy_check,
    prune_candidates,
    rip_premise_audit,
    t1_closed_form,
)

__version__ = "0.1.0"

__all__ = [
    "AuditReport",
    "BudgetError",
    "Ciphertext",
    "CsSecrecyError",
    "Dictionary",
    "DimensionError",
    "DiscreteJoint",
    "DomainError",
    "KeyEnsemble",
    "KeyEntropyReport",
    "MeasurementMatrix",
    "MiReport",
    "ProjectionReport",
    "PruneResult",
    "RecoveryError",
    "RecoveryResult",
    "RipReport",
    "SecretKey",
    "SolverError",
    "SparkReport",
    "SparseMessage",
    "ValidationError",
    "bp",
    "cipher_from_json",
    "compose",
    "cs_ensemble_joint",
    "decrypt",
    "derive_matrix",
    "encrypt",
    "exact_mi",
    "ideal_t1_joint",
    "ideal_t2_joint",
    "key_entropy_check",
    "key_from_json",
    "key_to_json",
    "l0_exhaustive",
    "load_cipher",
    "load_key",
    "load_message",
    "matrix_from_csv",
    "matrix_to_csv",
    "message_from_json",
    "omp",
    "orthonormal_dictionary",
    "prune_candidates",
    "rip_constant",
    "rip_premise_audit",
    "save_key",
    "save_vector",
    "spark",
    "spark_exceeds",
    "sparse_sign_messages",
    "suggest_m",
    "t1_closed_form",
    "unique_projection_check",
    "vector_to_json",
]
