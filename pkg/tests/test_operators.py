import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import fractional_matrix_power, logm, sqrtm

from heinzlab import operators as ops
from heinzlab import scalar as sc
from heinzlab.core import DimMismatch, NotSPD

A2 = np.array([[2.0, 1.0], [1.0, 3.0]])
B2 = np.array([[5.0, -1.0], [-1.0, 1.0]])
# mpmath sqrtm/powm at 40 digits
SHARP = {
    0.3: [[2.3999628903773147111, 0.33606198387180233934],
          [0.33606198387180233934, 1.9955224788346698937]],
    0.5: [[2.8716737364057990484, -0.044657116771861089537],
          [-0.044657116771861089537, 1.5580217753698574328]],
}


def pair(seed, dim):
    rng = np.random.default_rng(seed)
    return ops.random_spd(rng, dim), ops.random_spd(rng, dim)


@pytest.mark.parametrize("t", sorted(SHARP))
def test_sharp_high_precision(t):
    np.testing.assert_allclose(ops.sharp(A2, B2, t), SHARP[t], rtol=1e-13)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6), st.floats(0, 1))
def test_sharp_against_schur_pade(seed, dim, t):
    A, B = pair(seed, dim)
    Ah = sqrtm(A).real
    Aih = np.linalg.inv(Ah)
    ref = Ah @ fractional_matrix_power(Aih @ B @ Aih, t).real @ Ah
    np.testing.assert_allclose(ops.sharp(A, B, t), ref, rtol=1e-7, atol=1e-9 * np.abs(ref).max())


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6), st.floats(0, 1))
def test_sharp_symmetry_and_riccati(seed, dim, t):
    A, B = pair(seed, dim)
    S = ops.sharp(A, B, t)
    np.testing.assert_allclose(S, ops.sharp(B, A, 1 - t), rtol=1e-8, atol=1e-10 * np.abs(S).max())
    G = ops.sharp(A, B, 0.5)
    np.testing.assert_allclose(G @ np.linalg.solve(A, G), B, rtol=1e-7, atol=1e-9 * np.abs(B).max())


def test_endpoints_and_many():
    A, B = pair(1, 3)
    np.testing.assert_allclose(ops.sharp(A, B, 0), A, rtol=1e-12)
    np.testing.assert_allclose(ops.sharp(A, B, 1), B, rtol=1e-10)
    stack = ops.sharp_many(A, B, [0.2, 0.7])
    np.testing.assert_allclose(stack[1], ops.sharp(A, B, 0.7), rtol=1e-13)
    np.testing.assert_allclose(ops.harm_many(A, B, [0.4])[0], ops.harm(A, B, 0.4), rtol=1e-13)


def test_one_by_one_reduces_to_scalar():
    a, b, t = 2.0, 9.0, 0.3
    A, B = np.array([[a]]), np.array([[b]])
    assert ops.sharp(A, B, t)[0, 0] == pytest.approx(sc.weighted_mean(a, b, t, "geometric"))
    assert ops.harm(A, B, t)[0, 0] == pytest.approx(sc.weighted_mean(a, b, t, "harmonic"))
    assert ops.heinz_op(A, B, t)[0, 0] == pytest.approx(sc.heinz(a, b, t))
    assert ops.heron_op(A, B, t)[0, 0] == pytest.approx(sc.heron(a, b, t))
    assert ops.j_closed(A, B)[0, 0] == pytest.approx(sc.scalar_J(a, b), rel=1e-14)


def test_relative_entropy_against_logm():
    A, B = pair(5, 4)
    Ah = sqrtm(A).real
    Aih = np.linalg.inv(Ah)
    ref = Ah @ logm(Aih @ B @ Aih).real @ Ah
    np.testing.assert_allclose(ops.rel_entropy(A, B), ref, atol=1e-9 * np.abs(ref).max())


def test_j_quadrature_matches_closed_form():
    A, B = pair(11, 5)
    Jc = ops.j_closed(A, B)
    assert np.linalg.norm(ops.j_quadrature(A, B) - Jc) / np.linalg.norm(Jc) < 1e-8
    Ju = ops.j_closed(A, B, symmetric=False)
    assert np.abs(Ju - Ju.T).max() < 1e-9 * np.abs(Ju).max()


def test_jacobi_eigh_agrees_with_lapack():
    A, _ = pair(2, 7)
    w, V = ops.jacobi_eigh(A)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(A), rtol=1e-12)
    np.testing.assert_allclose(V @ np.diag(w) @ V.T, A, atol=1e-12 * np.abs(A).max())


def test_loewner_order():
    A, B = pair(3, 4)
    assert ops.loewner_leq(ops.sharp(A, B, 0.4), ops.nabla(A, B, 0.4))
    res = ops.loewner_leq(A + np.eye(4), A)
    assert not res and res.min_eig == pytest.approx(-1.0)
    assert res.witness.shape == (4,)
    m = ops.loewner_margins(np.stack([A, A]), np.stack([A, A + np.eye(4)]))
    assert m[0] == 0 and m[1] > 0


def test_equal_pair_has_zero_differences():
    A, _ = pair(4, 5)
    diffs = [ops.nabla(A, A, 0.3) - ops.sharp(A, A, 0.3), ops.heinz_op(A, A, 0.2) - ops.harm(A, A, 0.5)]
    for D in diffs:
        assert np.linalg.eigvalsh(D).min() >= -1e-13 * np.abs(A).max()


def test_random_spd_is_seeded():
    a = ops.random_spd(np.random.default_rng(9), 4)
    b = ops.random_spd(np.random.default_rng(9), 4)
    np.testing.assert_array_equal(a, b)
    w = np.linalg.eigvalsh(a)
    assert w.min() >= np.exp(-3) * (1 - 1e-12) and w.max() <= np.exp(3) * (1 + 1e-12)


def test_errors():
    with pytest.raises(DimMismatch):
        ops.sharp(np.eye(2), np.eye(3), 0.5)
    with pytest.raises(NotSPD):
        ops.as_spd([[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(ValueError):
        ops.op_mean(np.eye(2), np.eye(2), 1.5)


def test_matrix_text_round_trip():
    A, _ = pair(6, 3)
    np.testing.assert_array_equal(ops.parse_matrix(ops.format_matrix(A)), A)
