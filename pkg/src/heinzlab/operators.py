"""Spectral calculus and operator means on symmetric positive-definite matrices."""

from __future__ import annotations

from typing import Callable, NamedTuple, Optional

import numpy as np

from .core import DimMismatch, EigenFailure, NotSPD
from .quadrature import legendre_on

LOEWNER_TOL = 1e-8


def symmetrize(M: np.ndarray) -> np.ndarray:
    return (M + np.swapaxes(M, -1, -2)) / 2


def as_spd(A, rtol=1e-13) -> np.ndarray:
    """Validate and return ``A`` as a float SPD matrix."""
    A = np.array(A, dtype=float, ndmin=2)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotSPD(f"expected a square matrix, got shape {A.shape}")
    scale = max(np.abs(A).max(), np.finfo(float).tiny)
    if np.abs(A - A.T).max() > rtol * scale:
        raise NotSPD("matrix is not symmetric")
    A = symmetrize(A)
    if np.linalg.eigvalsh(A).min() <= 0:
        raise NotSPD("matrix is not positive definite")
    return A


def _same_dim(*mats):
    d = {m.shape for m in mats}
    if len(d) != 1:
        raise DimMismatch(f"shapes differ: {sorted(d)}")


def jacobi_eigh(A, tol=1e-15, max_sweeps=50):
    """Cyclic Jacobi eigen-decomposition of a small symmetric matrix.

    Independent of LAPACK; used to cross-check ``numpy.linalg.eigh``.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(A, -1) ** 2))
        if off <= tol * np.sqrt(np.sum(A**2)) or n == 1:
            w = np.diag(A).copy()
            order = np.argsort(w)
            return w[order], V[:, order]
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                tau = (A[q, q] - A[p, p]) / (2 * apq)
                t = np.sign(tau) / (abs(tau) + np.hypot(1.0, tau)) if tau != 0 else 1.0
                c = 1 / np.hypot(1.0, t)
                s = t * c
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :], A[q, :] = c * rp - s * rq, s * rp + c * rq
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p], A[:, q] = c * cp - s * cq, s * cp + c * cq
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p], V[:, q] = c * vp - s * vq, s * vp + c * vq
    raise EigenFailure("Jacobi sweeps did not converge")


def _eigh(A):
    try:
        return np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc


def spectral_fn(A, phi: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """``Q phi(L) Q^T`` for the eigen-decomposition ``A = Q L Q^T``."""
    A = np.asarray(A, dtype=float)
    w, Q = _eigh(A)
    return symmetrize((Q * phi(w)) @ Q.T)


def mpower(A, t):
    return spectral_fn(A, lambda w: w**t)


def _congruence_parts(A, B):
    # A^{1/2}, A^{-1/2} and the eigen-decomposition of A^{-1/2} B A^{-1/2}
    w, Q = _eigh(A)
    rt = np.sqrt(w)
    Ah = symmetrize((Q * rt) @ Q.T)
    Aih = symmetrize((Q / rt) @ Q.T)
    T = symmetrize(Aih @ B @ Aih)
    tau, V = _eigh(T)
    if tau.min() <= 0:
        raise NotSPD("A^{-1/2} B A^{-1/2} is not positive definite")
    return Ah, Aih, tau, V


def sharp(A, B, t):
    """Weighted geometric mean ``A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    _same_dim(A, B)
    Ah, _, tau, V = _congruence_parts(A, B)
    return symmetrize(Ah @ ((V * tau**t) @ V.T) @ Ah)


def sharp_many(A, B, ts) -> np.ndarray:
    """``A sharp_t B`` for every ``t`` in ``ts``, stacked along axis 0."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    _same_dim(A, B)
    Ah, _, tau, V = _congruence_parts(A, B)
    ts = np.asarray(ts, dtype=float)
    P = np.einsum("ik,tk,jk->tij", V, tau[None, :] ** ts[:, None], V)
    return symmetrize(Ah @ P @ Ah)


def nabla(A, B, t):
    return (1 - t) * np.asarray(A, dtype=float) + t * np.asarray(B, dtype=float)


def harm(A, B, t):
    """Weighted harmonic mean ``((1-t) A^-1 + t B^-1)^-1``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    _same_dim(A, B)
    if t == 0:
        return A.copy()
    if t == 1:
        return B.copy()
    return symmetrize(np.linalg.inv((1 - t) * np.linalg.inv(A) + t * np.linalg.inv(B)))


def harm_many(A, B, ts) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    _same_dim(A, B)
    ts = np.asarray(ts, dtype=float)[:, None, None]
    M = (1 - ts) * np.linalg.inv(A) + ts * np.linalg.inv(B)
    return symmetrize(np.linalg.inv(M))


def op_mean(A, B, t, kind="sharp"):
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    _same_dim(A, B)
    if not 0 <= t <= 1:
        raise ValueError(f"weight must lie in [0, 1], got {t}")
    if kind == "nabla":
        return nabla(A, B, t)
    if kind == "sharp":
        return sharp(A, B, t)
    if kind == "harm":
        return harm(A, B, t)
    raise ValueError(f"unknown operator mean {kind!r}")


def heron_op(A, B, lam):
    """Operator Heron mean ``(1-lam) A#B + lam A nabla B``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    _same_dim(A, B)
    return (1 - lam) * sharp(A, B, 0.5) + lam * nabla(A, B, 0.5)


def heinz_op(A, B, lam):
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    _same_dim(A, B)
    S = sharp_many(A, B, [lam, 1 - lam])
    return (S[0] + S[1]) / 2


def rel_entropy(A, B):
    """Relative operator entropy ``A^{1/2} log(A^{-1/2} B A^{-1/2}) A^{1/2}``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    _same_dim(A, B)
    Ah, _, tau, V = _congruence_parts(A, B)
    return symmetrize(Ah @ ((V * np.log(tau)) @ V.T) @ Ah)


def j_closed(A, B, symmetric=True):
    """``(B - A) A^{-1} S(A|B)``; symmetrised unless ``symmetric=False``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    _same_dim(A, B)
    J = (B - A) @ np.linalg.solve(A, rel_entropy(A, B))
    return symmetrize(J) if symmetric else J


def j_quadrature(A, B, n=96):
    """Gauss-Legendre value of the integral of ``(A nabla_t B - A !_t B) / (t(1-t))`` over (0, 1)."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    _same_dim(A, B)
    t, w = legendre_on(0.0, 1.0, n)
    H = harm_many(A, B, t)
    Nt = (1 - t)[:, None, None] * A + t[:, None, None] * B
    integrand = (Nt - H) / (t * (1 - t))[:, None, None]
    return symmetrize(np.einsum("t,tij->ij", w, integrand))


class LoewnerResult(NamedTuple):
    ok: bool
    min_eig: float
    witness: Optional[np.ndarray]

    def __bool__(self):
        return self.ok


def loewner_leq(T, S, tol=LOEWNER_TOL) -> LoewnerResult:
    """Decide ``T <= S`` in the Loewner order.

    True when ``min eig(S - T) >= -tol * (1 + ||S - T||_2)``. On failure the
    offending eigenvalue and its eigenvector are returned as a witness.
    """
    T = np.asarray(T, dtype=float)
    S = np.asarray(S, dtype=float)
    _same_dim(T, S)
    D = symmetrize(S - T)
    w, Q = _eigh(D)
    norm = np.abs(w).max()
    ok = bool(w[0] >= -tol * (1 + norm))
    return LoewnerResult(ok, float(w[0]), None if ok else Q[:, 0].copy())


def loewner_margins(T, S) -> np.ndarray:
    """Scaled ``min eig(S - T) / (1 + ||S - T||)`` for stacks of matrices."""
    D = symmetrize(np.asarray(S) - np.asarray(T))
    w = np.linalg.eigvalsh(D)
    return w[..., 0] / (1 + np.abs(w).max(axis=-1))


def random_spd(rng: np.random.Generator, dim: int, spread=3.0) -> np.ndarray:
    """``Q diag(exp(u)) Q^T`` with Haar-like ``Q`` and ``u ~ U[-spread, spread]``."""
    Z = rng.standard_normal((dim, dim))
    Q, R = np.linalg.qr(Z)
    Q = Q * np.sign(np.diag(R))
    u = rng.uniform(-spread, spread, dim)
    return symmetrize((Q * np.exp(u)) @ Q.T)


def format_matrix(M) -> str:
    """Plain-text rows of space-separated entries."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    return "\n".join(" ".join(repr(float(v)) for v in row) for row in M)


def parse_matrix(text: str) -> np.ndarray:
    rows = [line.split() for line in text.strip().splitlines() if line.strip()]
    M = np.array([[float(v) for v in r] for r in rows])
    if M.ndim != 2:
        raise ValueError("ragged matrix text")
    return M
