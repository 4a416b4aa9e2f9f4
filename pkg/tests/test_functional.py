import math

import numpy as np
import pytest

from heinzlab import functional as fn
from heinzlab import operators as ops
from heinzlab.core import POS_INF, DimMismatch, EmptyDomain, GridFn, LambdaMismatch
from heinzlab.legendre import QuadForm
from heinzlab.quadrature import jacobi_rule


def quad_pair(seed=0, dim=3):
    rng = np.random.default_rng(seed)
    A = ops.random_spd(rng, dim, spread=1.0)
    B = ops.random_spd(rng, dim, spread=1.0)
    return A, B, fn.FnPair(QuadForm(A), QuadForm(B))


def test_one_dimensional_geometric_mean():
    pair = fn.FnPair(QuadForm([[2.0]]), QuadForm([[9.0]]), probes=[[1.0], [2.0]])
    got = fn.geom_fn(pair, 0.3)
    exact = 0.5 * 2**0.7 * 9**0.3 * np.array([1.0, 4.0])
    np.testing.assert_allclose(got, exact, rtol=1e-12)


@pytest.mark.parametrize("lam", [0.1, 0.5, 0.8])
def test_quadratic_bridges(lam):
    A, B, pair = quad_pair()
    x = pair.probes
    np.testing.assert_allclose(fn.geom_fn(pair, lam), QuadForm(ops.sharp(A, B, lam))(x), rtol=1e-10)
    np.testing.assert_allclose(fn.heinz_fn(pair, lam), QuadForm(ops.heinz_op(A, B, lam))(x), rtol=1e-10)
    np.testing.assert_allclose(fn.heron_fn(pair, lam), QuadForm(ops.heron_op(A, B, lam))(x), rtol=1e-10)


def test_endpoint_conventions():
    A, B, pair = quad_pair(1)
    x = pair.probes
    np.testing.assert_array_equal(fn.geom_fn(pair, 0), pair.f(x))
    np.testing.assert_array_equal(fn.geom_fn(pair, 1), pair.g(x))
    assert fn.arith_fn(pair, 0) is pair.f
    assert fn.harm_fn(pair, 1) is pair.g


def test_lambda_mismatch():
    _, _, pair = quad_pair()
    with pytest.raises(LambdaMismatch):
        fn.geom_fn(pair, 0.3, jacobi_rule(0.4))


def test_pair_validation():
    with pytest.raises(DimMismatch):
        fn.FnPair(QuadForm(np.eye(2)), QuadForm(np.eye(3)))
    with pytest.raises(TypeError):
        fn.FnPair(QuadForm(np.eye(2)), GridFn.from_values(0, 1, [0, 0, 0]))
    with pytest.raises(EmptyDomain):
        fn.FnPair(GridFn.from_values(0, 1, [0, math.inf, math.inf]),
                  GridFn.from_values(0, 1, [math.inf, math.inf, 0]))


def test_identity_residuals_small():
    _, _, pair = quad_pair(2, 4)
    res = fn.identity_residuals(pair, 0.35)
    assert set(res) == {"young-gap", "young-gap-half", "heinz-gap", "j-theta"}
    assert max(float(v.max()) for v in res.values()) < 1e-8


def grid_pair(n=129):
    x = np.linspace(-2, 2, n)
    f = GridFn(-2.0, 2.0, x**2 / 2, np.ones(n, bool))
    g = GridFn(-2.0, 2.0, (x - 0.5) ** 2, np.abs(x - 0.5) <= 1.0 + 1e-12)
    return fn.FnPair(f, g)


def test_grid_harmonic_mean_of_quadratics():
    pair = grid_pair(257)
    t = 0.4
    H = fn.harm_fn(pair, t)
    x = pair.f.x
    # a/2 x^2 and b/2 (x - c)^2 have harmonic mean (x - t c)^2 / (2 ((1-t)/a + t/b)),
    # which the domain restriction leaves intact near x = t c
    a, b, c = 1.0, 2.0, 0.5
    inv = (1 - t) / a + t / b
    shift = t * c
    exact = (x - shift) ** 2 / (2 * inv)
    inner = H.dom & (np.abs(x - shift) < 0.5)
    assert np.max(np.abs(H.vals[inner] - exact[inner])) < 2 * pair.grid_tol
    lo = (1 - t) * -2 + t * -0.5
    hi = (1 - t) * 2 + t * 1.5
    assert np.all(H.dom == ((x >= lo - 1e-12) & (x <= hi + 1e-12)))


def test_grid_sandwich_and_j_domain():
    pair = grid_pair()
    H = fn.harm_fn(pair, 0.5)
    G = fn.geom_fn(pair, 0.5)
    A = fn.arith_fn(pair, 0.5)
    both = A.dom
    assert np.all(H.vals[both] <= G.vals[both] + pair.grid_tol)
    assert np.all(G.vals[both] <= A.vals[both] + pair.grid_tol)
    assert fn.j_fn(pair, -2.0) is POS_INF
    assert fn.j_fn(pair, 0.5) >= -pair.grid_tol
    with pytest.raises(ValueError):
        fn.j_fn(pair, 0.01)


def test_theta_and_ell():
    A, B, pair = quad_pair(4)
    x = pair.probes
    th = fn.theta_fn(pair, 0.3)
    exact = 0.5 * (QuadForm(ops.harm(A, B, 0.3))(x) + QuadForm(ops.harm(A, B, 0.7))(x))
    np.testing.assert_allclose(th, exact, rtol=1e-12)
    np.testing.assert_allclose(fn.ell_fn(pair, 1.0), QuadForm(ops.nabla(A, B, 0.5))(x), rtol=1e-14)
