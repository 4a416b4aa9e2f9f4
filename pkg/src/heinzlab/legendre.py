"""Fenchel conjugation of sampled and quadratic functionals.

Grid conjugates use the restricted supremum over the sampled points:
``f*(s) = max_i (s*x_i - f(x_i))`` over finite samples. The maximiser for
each slope is found by walking the lower convex hull of the samples, so the
transform costs one hull pass plus a sorted merge of slopes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import EmptyDomain, GridFn, NotSPD

HULL_RTOL = 1e-12


class DualGridFn(GridFn):
    """A grid function over the slope variable."""


def lower_hull(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Indices of the vertices of the lower convex hull of sorted points.

    A middle point is dropped when it lies on or above the chord of its
    neighbours, up to a relative slack of ``HULL_RTOL`` so that points
    reconstructed on a hull edge are recognised as collinear.
    """
    idx = []
    for i in range(x.size):
        while len(idx) >= 2:
            j, k = idx[-2], idx[-1]
            dx1, dy1 = x[k] - x[j], y[k] - y[j]
            dx2, dy2 = x[i] - x[j], y[i] - y[j]
            cross = dx1 * dy2 - dy1 * dx2
            slack = HULL_RTOL * (abs(dx1 * dy2) + abs(dy1 * dx2))
            if cross <= slack:
                idx.pop()
            else:
                break
        idx.append(i)
    return np.asarray(idx, dtype=int)


def _finite_points(f: GridFn):
    if not f.dom.any():
        raise EmptyDomain("conjugate of an identically +inf function")
    x = f.x[f.dom]
    y = f.vals[f.dom]
    return x, y


def slope_range(f: GridFn, pad=0.1):
    """Range of hull slopes of ``f`` padded by ``pad`` of its width."""
    x, y = _finite_points(f)
    hv = lower_hull(x, y)
    if hv.size < 2:
        return -1.0, 1.0
    sl = np.diff(y[hv]) / np.diff(x[hv])
    lo, hi = float(sl.min()), float(sl.max())
    width = hi - lo
    if width <= 0:
        width = max(abs(lo), 1.0)
    return lo - pad * width, hi + pad * width


def conjugate_at(f: GridFn, s: np.ndarray) -> np.ndarray:
    """Restricted conjugate of ``f`` evaluated at the sorted slopes ``s``."""
    x, y = _finite_points(f)
    s = np.asarray(s, dtype=float)
    hv = lower_hull(x, y)
    hx, hy = x[hv], y[hv]
    if hv.size == 1:
        return s * hx[0] - hy[0]
    slopes = np.diff(hy) / np.diff(hx)
    # vertex k supports every s with slopes[k-1] <= s <= slopes[k];
    # side="left" keeps the leftmost vertex on ties.
    k = np.searchsorted(slopes, s, side="left")
    best = s * hx[k] - hy[k]
    # neighbours guard against slope rounding near a kink
    for dk in (-1, 1):
        kk = np.clip(k + dk, 0, hv.size - 1)
        best = np.maximum(best, s * hx[kk] - hy[kk])
    return best


def conjugate_grid(f: GridFn, dual_lo=None, dual_hi=None, m=None) -> DualGridFn:
    """Sampled Fenchel conjugate of ``f`` on ``m`` uniform slopes.

    Defaults: the slope range of ``f`` padded by 10% and ``m = n``.
    """
    if dual_lo is None or dual_hi is None:
        lo, hi = slope_range(f)
        dual_lo = lo if dual_lo is None else dual_lo
        dual_hi = hi if dual_hi is None else dual_hi
    m = f.n if m is None else int(m)
    if m < 3:
        raise ValueError("need at least 3 dual samples")
    s = np.linspace(dual_lo, dual_hi, m)
    vals = conjugate_at(f, s)
    return DualGridFn(float(dual_lo), float(dual_hi), vals, np.ones(m, dtype=bool))


def naive_conjugate(f: GridFn, s: np.ndarray) -> np.ndarray:
    """Double-loop reference: max over every finite sample for every slope."""
    x, y = _finite_points(f)
    out = np.empty(len(s))
    for j, sj in enumerate(s):
        best = -np.inf
        for xi, yi in zip(x, y):
            v = sj * xi - yi
            if v > best:
                best = v
        out[j] = best
    return out


def convex_envelope(f: GridFn) -> GridFn:
    """Lower convex envelope of the finite samples, on ``f``'s grid.

    This is the biconjugate with the dual variable ranging over all reals:
    the piecewise-linear hull interpolant, ``+inf`` outside the outermost
    finite samples.
    """
    x, y = _finite_points(f)
    hv = lower_hull(x, y)
    hx, hy = x[hv], y[hv]
    grid = f.x
    dom = (grid >= hx[0]) & (grid <= hx[-1])
    vals = np.zeros(f.n)
    if hv.size == 1:
        vals[dom] = hy[0]
    else:
        g = grid[dom]
        k = np.clip(np.searchsorted(hx, g, side="right") - 1, 0, hv.size - 2)
        t = (g - hx[k]) / (hx[k + 1] - hx[k])
        vals[dom] = hy[k] + t * (hy[k + 1] - hy[k])
    # hull vertices keep their sample value exactly
    on_grid = np.flatnonzero(f.dom)[hv]
    vals[on_grid] = hy
    return GridFn(f.lo, f.hi, vals, dom)


def biconjugate_grid(f: GridFn, m=None) -> GridFn:
    """Biconjugate of ``f`` sampled back on its own grid.

    With ``m=None`` the intermediate conjugate is taken over all slopes,
    which gives the convex envelope exactly. With an integer ``m`` the
    conjugate is sampled at ``m`` slopes first, as the functional means do,
    and the result differs from the envelope by ``O(h * ds)``.
    """
    if m is None:
        return convex_envelope(f)
    fs = conjugate_grid(f, m=m)
    back = conjugate_at(fs, f.x)
    x, _ = _finite_points(f)
    grid = f.x
    dom = (grid >= x[0]) & (grid <= x[-1])
    return GridFn(f.lo, f.hi, np.where(dom, back, 0.0), dom)


@dataclass(frozen=True, eq=False)
class QuadForm:
    """The quadratic functional ``x -> <A x, x> / 2`` for SPD ``A``."""

    A: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float, ndmin=2)
        if A.shape[0] != A.shape[1]:
            raise NotSPD("quadratic form needs a square matrix")
        if not np.allclose(A, A.T, rtol=1e-13, atol=1e-13 * np.abs(A).max()):
            raise NotSPD("matrix is not symmetric")
        A = (A + A.T) / 2
        if np.linalg.eigvalsh(A).min() <= 0:
            raise NotSPD("matrix is not positive definite")
        A.setflags(write=False)
        object.__setattr__(self, "A", A)

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def __call__(self, x):
        """Value at a point ``(d,)`` or at each row of ``(k, d)``."""
        x = np.asarray(x, dtype=float)
        return 0.5 * np.einsum("...i,ij,...j->...", x, self.A, x)


def conjugate_quad(q: QuadForm) -> QuadForm:
    return QuadForm(np.linalg.inv(q.A))


def harmonic_combine_quad(q1: QuadForm, q2: QuadForm, t: float) -> QuadForm:
    """The form of ``((1-t) A^-1 + t B^-1)^-1``, i.e. the harmonic functional mean."""
    if q1.dim != q2.dim:
        from .core import DimMismatch

        raise DimMismatch(f"{q1.dim} vs {q2.dim}")
    if not 0 <= t <= 1:
        raise ValueError(f"weight must lie in [0, 1], got {t}")
    if t == 0:
        return q1
    if t == 1:
        return q2
    M = (1 - t) * np.linalg.inv(q1.A) + t * np.linalg.inv(q2.A)
    return QuadForm(np.linalg.inv(M))
