"""Key handling, matrix derivation, and serialization."""

import math

import numpy as np
import pytest

from cs_secrecy import (
    Dictionary,
    DimensionError,
    DomainError,
    MeasurementMatrix,
    SecretKey,
    ValidationError,
    compose,
    derive_matrix,
    key_from_json,
    key_to_json,
    matrix_from_csv,
    matrix_to_csv,
    orthonormal_dictionary,
    suggest_m,
)
from cs_secrecy.prng import GaussianStream

# fixed-seed regression constants, recorded once from the pinned stream
SEED42_MEAN = -0.00012962979306759513
SEED42_VAR = 0.015376156685672345


def test_same_key_derives_identical_matrix():
    key = SecretKey(seed=1, m=2, n=3)
    a = derive_matrix(key)
    b = derive_matrix(key)
    assert a.entries.shape == (2, 3)
    np.testing.assert_array_equal(a.entries, b.entries)
    assert a.provenance == "derived"
    assert a.derived_from == key


def test_different_seeds_differ():
    a = derive_matrix(SecretKey(seed=1, m=2, n=3))
    b = derive_matrix(SecretKey(seed=2, m=2, n=3))
    assert np.any(a.entries != b.entries)


def test_seed42_statistics_regression():
    entries = derive_matrix(SecretKey(seed=42, m=64, n=256)).entries
    mean = float(entries.mean())
    var = float(entries.var())
    # distributional sanity bands around Normal(0, 1/64)
    assert abs(mean) <= 0.004
    assert 0.0141 <= var <= 0.0172
    # exact reproduction of the recorded constants
    assert mean == SEED42_MEAN
    assert var == SEED42_VAR


def test_row_major_fill_and_scaling():
    key = SecretKey(seed=9, m=2, n=3)
    expected = GaussianStream(9).draw(6) / math.sqrt(2)
    np.testing.assert_array_equal(derive_matrix(key).entries, expected.reshape(2, 3))


def test_key_validation():
    with pytest.raises(DimensionError):
        SecretKey(seed=1, m=0, n=3)
    with pytest.raises(DimensionError):
        SecretKey(seed=1, m=2, n=0)
    with pytest.raises(DimensionError):
        SecretKey(seed=1, m=5, n=3)
    with pytest.raises(ValidationError):
        SecretKey(seed=-1, m=2, n=3)
    with pytest.raises(ValidationError):
        SecretKey(seed=2**64, m=2, n=3)
    with pytest.raises(ValidationError):
        SecretKey(seed=1, m=2, n=3, version=2)
    SecretKey(seed=1, m=3, n=3)  # square diagnostic keys are allowed


def test_matrix_entries_are_validated_and_frozen():
    with pytest.raises(ValidationError):
        MeasurementMatrix(np.array([[1.0, np.nan]]))
    with pytest.raises(DimensionError):
        MeasurementMatrix(np.zeros(4))
    mat = MeasurementMatrix(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        mat.entries[0, 0] = 1.0


def test_compose_identity_is_exact():
    phi = derive_matrix(SecretKey(seed=3, m=4, n=6))
    a = compose(phi, Dictionary.identity(6))
    np.testing.assert_array_equal(a.entries, phi.entries)
    assert a.provenance == "explicit"


def test_compose_permutation():
    phi = MeasurementMatrix(np.array([[1.0, 0.0], [0.0, 1.0]]))
    psi = Dictionary(np.array([[0.0, 1.0], [1.0, 0.0]]))
    np.testing.assert_array_equal(compose(phi, psi).entries, np.array([[0.0, 1.0], [1.0, 0.0]]))


def test_compose_dimension_mismatch():
    phi = derive_matrix(SecretKey(seed=3, m=4, n=6))
    with pytest.raises(DimensionError):
        compose(phi, Dictionary.identity(5))


def test_compose_two_path_evaluation():
    # ||A alpha|| must equal ||Phi (Psi alpha)|| computed the long way
    phi = derive_matrix(SecretKey(seed=7, m=4, n=8))
    psi = orthonormal_dictionary(21, 8)
    a = compose(phi, psi)
    rng = np.random.default_rng(0)
    for _ in range(50):
        alpha = rng.normal(size=8)
        direct = np.linalg.norm(a.entries @ alpha)
        two_step = np.linalg.norm(phi.entries @ (psi.entries @ alpha))
        assert abs(direct - two_step) <= 1e-12


def test_orthonormal_dictionary_preserves_norms():
    psi = orthonormal_dictionary(5, 12)
    rng = np.random.default_rng(1)
    for _ in range(100):
        alpha = rng.normal(size=12)
        assert abs(np.linalg.norm(psi.entries @ alpha) - np.linalg.norm(alpha)) <= 1e-10
    # deterministic function of the seed
    np.testing.assert_array_equal(psi.entries, orthonormal_dictionary(5, 12).entries)


def test_dictionary_rejects_non_orthonormal():
    with pytest.raises(ValidationError):
        Dictionary(np.array([[1.0, 0.0], [0.0, 2.0]]))
    with pytest.raises(DimensionError):
        Dictionary(np.zeros((2, 3)))


def test_suggest_m_examples():
    assert suggest_m(256, 4, 4.0) == 67  # ceil(16 ln 64) = ceil(66.54...)
    assert suggest_m(10, 4, 0.1) == 8  # lower clamp 2k
    assert suggest_m(10, 1, 100.0) == 10  # upper clamp n
    with pytest.raises(DomainError):
        suggest_m(10, 10, 1.0)
    with pytest.raises(DomainError):
        suggest_m(10, 0, 1.0)
    with pytest.raises(DomainError):
        suggest_m(10, 2, 0.0)


def test_key_json_round_trip():
    key = SecretKey(seed=2**64 - 1, m=16, n=32)
    text = key_to_json(key)
    assert '"seed": "18446744073709551615"' in text
    assert key_from_json(text) == key


def test_key_json_rejects_malformed():
    with pytest.raises(ValidationError, match="seed"):
        key_from_json('{"version": 1, "seed": 42, "m": 2, "n": 3}')
    with pytest.raises(ValidationError, match="'m'"):
        key_from_json('{"version": 1, "seed": "42", "m": "2", "n": 3}')
    with pytest.raises(ValidationError, match="JSON"):
        key_from_json("not json")
    with pytest.raises(ValidationError, match="version"):
        key_from_json('{"version": 9, "seed": "42", "m": 2, "n": 3}')


def test_matrix_csv_round_trip_is_exact():
    mat = derive_matrix(SecretKey(seed=13, m=5, n=9))
    back = matrix_from_csv(matrix_to_csv(mat))
    np.testing.assert_array_equal(back.entries, mat.entries)
    assert back.provenance == "explicit"


def test_matrix_csv_rejects_bad_input():
    with pytest.raises(ValidationError):
        matrix_from_csv("1.0,2.0\n3.0\n")
    with pytest.raises(ValidationError):
        matrix_from_csv("1.0,pear\n")
    with pytest.raises(ValidationError):
        matrix_from_csv("")
