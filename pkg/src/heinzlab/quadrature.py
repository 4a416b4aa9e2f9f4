"""Gauss rules for the singular Beta-type weight and for smooth integrands."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import POS_INF, BadInterval, EigenFailure, EndpointLambda, ExtReal, as_ext

DEFAULT_NODES = 64


@dataclass(frozen=True, eq=False)
class JacobiRule:
    """Gauss rule on (0, 1) for the density ``sin(pi*lam)/pi * t**(lam-1) * (1-t)**(-lam)``.

    The density integrates to one, so ``weights`` sum to one.
    """

    lam: float
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.nodes.size


def tridiag_eig_first(diag, off, max_iter=60):
    """Eigenvalues and first eigenvector components of a symmetric tridiagonal matrix.

    Implicit QL with Wilkinson-type shifts. Only the first row of the
    eigenvector matrix is accumulated, which is all Golub-Welsch needs.

    Returns ``(eigenvalues, first_components)`` sorted by eigenvalue.
    """
    d = [float(v) for v in diag]
    n = len(d)
    e = [float(v) for v in off] + [0.0]
    if len(e) != n:
        raise ValueError("off-diagonal must have length n - 1")
    z = [0.0] * n
    z[0] = 1.0
    eps = np.finfo(float).eps
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > max_iter:
                raise EigenFailure("tridiagonal QL iteration did not converge")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zf = z[i + 1]
                z[i + 1] = s * z[i] + c * zf
                z[i] = c * z[i] - s * zf
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    order = np.argsort(d, kind="stable")
    return np.asarray(d)[order], np.asarray(z)[order]


def _jacobi_recurrence(lam: float, n: int):
    # Monic Jacobi recurrence on [-1, 1] for (1-x)**(-lam) * (1+x)**(lam-1),
    # i.e. alpha + beta = -1, written out so the k = 1 cancellation is exact.
    k = np.arange(n, dtype=float)
    a = (1 - 2 * lam) / ((2 * k - 1) * (2 * k + 1))
    kk = np.arange(1, n, dtype=float)
    b = (kk - lam) * (kk - 1 + lam) / (2 * kk - 1) ** 2
    if n > 1:
        b[0] = 2 * lam * (1 - lam)
    return a, b


@lru_cache(maxsize=256)
def _rule_cached(lam: float, n: int) -> JacobiRule:
    a, b = _jacobi_recurrence(lam, n)
    # shift x in [-1, 1] to t = (x + 1)/2
    diag = (a + 1) / 2
    off = np.sqrt(b) / 2
    nodes, first = tridiag_eig_first(diag, off)
    weights = first**2
    if not (np.all(nodes > 0) and np.all(nodes < 1) and np.all(np.diff(nodes) > 0)):
        raise EigenFailure("Golub-Welsch produced nodes outside (0, 1)")
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return JacobiRule(lam=lam, nodes=nodes, weights=weights)


def jacobi_rule(lam: float, n: int = DEFAULT_NODES) -> JacobiRule:
    """Gauss-Jacobi rule for the normalised weight ``t**(lam-1) (1-t)**(-lam)``."""
    lam = float(lam)
    if not 0 <= lam <= 1:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    if lam in (0.0, 1.0):
        raise EndpointLambda("the Jacobi weight degenerates at lambda in {0, 1}")
    if int(n) != n or n < 1:
        raise ValueError("node count must be a positive integer")
    return _rule_cached(lam, int(n))


def integrate_beta(rule: JacobiRule, f) -> ExtReal:
    """Weighted node sum of ``f`` under extended-real arithmetic.

    ``f`` may return floats, ``POS_INF`` or numpy arrays; any ``POS_INF``
    node value makes the whole result ``POS_INF``.
    """
    total = None
    for t, w in zip(rule.nodes, rule.weights):
        v = f(float(t))
        if v is POS_INF:
            return POS_INF
        if np.ndim(v) == 0:
            v = as_ext(v)
            if v is POS_INF:
                return POS_INF
        term = w * v
        total = term if total is None else total + term
    return total


@lru_cache(maxsize=64)
def legendre_rule(n: int):
    """Gauss-Legendre nodes/weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(int(n))
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def legendre_on(a: float, b: float, n: int):
    """Gauss-Legendre nodes/weights mapped to ``[a, b]``."""
    if not a < b:
        raise BadInterval(f"need a < b, got a={a}, b={b}")
    x, w = legendre_rule(n)
    half = (b - a) / 2
    return a + half * (x + 1), half * w


def integrate_smooth(f, a: float, b: float, n: int = DEFAULT_NODES):
    """n-node Gauss-Legendre value of the integral of ``f`` over ``[a, b]``.

    ``f`` is called once with the array of nodes when it vectorises,
    otherwise node by node.
    """
    t, w = legendre_on(a, b, n)
    try:
        vals = np.asarray(f(t), dtype=float)
        if vals.shape != t.shape:
            raise ValueError
    except (TypeError, ValueError):
        vals = np.array([f(float(ti)) for ti in t], dtype=float)
    return float(np.dot(w, vals))
